//! Report files. Machine files carry 17 significant digits, `summary.txt`
//! carries 4.

use std::fmt::Write as _;
use std::path::Path;

use mfadcca_core::dcca::VERDICT_MARGIN;
use mfadcca_core::garch::fit_asymmetry;
use mfadcca_core::mfadcca::SUMMARY_QS;
use mfadcca_core::series::{fmt_machine, DescriptiveStats, DroppedDay};
use mfadcca_core::{DccaCurve, GarchFit, MultifractalResult, QccResult, TrendClass};

pub fn num(x: f64) -> String {
    fmt_machine(x)
}

pub fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "NA".to_string(), fmt_machine)
}

/// Four significant digits.
pub fn human(x: f64) -> String {
    if !x.is_finite() {
        return "NA".into();
    }
    if x == 0.0 {
        return "0".into();
    }
    let e = x.abs().log10().floor() as i32;
    if (-3..4).contains(&e) {
        format!("{:.*}", (3 - e).max(0) as usize, x)
    } else {
        format!("{x:.3e}")
    }
}

pub fn human_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "NA".to_string(), human)
}

/// Accumulates CSV rows; every field written is plain text without commas.
pub struct Table {
    text: String,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        let mut text = header.join(",");
        text.push('\n');
        Self { text }
    }

    pub fn row<S: AsRef<str>>(&mut self, fields: &[S]) {
        for (i, f) in fields.iter().enumerate() {
            if i > 0 {
                self.text.push(',');
            }
            self.text.push_str(f.as_ref());
        }
        self.text.push('\n');
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        std::fs::write(path, &self.text)
    }
}

pub fn descriptive_table(rows: &[(String, DescriptiveStats)]) -> Table {
    let mut t = Table::new(&[
        "series",
        "n",
        "mean",
        "median",
        "std_dev",
        "max",
        "min",
        "skewness",
        "kurtosis",
        "kurtosis_convention",
        "jarque_bera",
        "jb_p_value",
    ]);
    for (name, d) in rows {
        t.row(&[
            name.clone(),
            d.n.to_string(),
            num(d.mean),
            num(d.median),
            num(d.std_dev),
            num(d.max),
            num(d.min),
            num(d.skewness),
            num(d.kurtosis()),
            format!("{:?}", d.kurtosis_convention).to_lowercase(),
            num(d.jarque_bera),
            num(d.jb_p_value),
        ]);
    }
    t
}

pub fn dropped_table(days: &[DroppedDay]) -> Table {
    let mut t = Table::new(&["date", "reason"]);
    for d in days {
        t.row(&[d.date.to_string(), d.reason.replace(',', ";")]);
    }
    t
}

pub fn qcc_table(r: &QccResult) -> Table {
    let mut t = Table::new(&["m", "q_cc", "critical", "significant"]);
    for i in 0..r.m_values.len() {
        t.row(&[r.m_values[i].to_string(), num(r.q_cc[i]), num(r.critical[i]), r.significant[i].to_string()]);
    }
    t
}

pub fn fluctuation_table(r: &MultifractalResult) -> Table {
    let mut t = Table::new(&["trend", "q", "s", "f_q"]);
    let tab = &r.table;
    for class in TrendClass::ALL {
        let cells = tab.class(class);
        for (qi, q) in tab.qs.iter().enumerate() {
            for (si, s) in tab.scales.iter().enumerate() {
                t.row(&[class.name().to_string(), num(*q), s.to_string(), opt(cells[qi][si])]);
            }
        }
    }
    t
}

pub fn counts_table(r: &MultifractalResult) -> Table {
    let tab = &r.table;
    let mut t = Table::new(&["s", "segments", "up", "down", "flat"]);
    for i in 0..tab.scales.len() {
        t.row(&[
            tab.scales[i].to_string(),
            tab.segments[i].to_string(),
            tab.m_up[i].to_string(),
            tab.m_down[i].to_string(),
            tab.m_flat[i].to_string(),
        ]);
    }
    t
}

pub fn exponents_table(r: &MultifractalResult) -> Table {
    let mut t = Table::new(&["trend", "q", "h", "stderr", "points", "tau"]);
    for class in TrendClass::ALL {
        let e = r.class(class);
        for (i, q) in r.qs().iter().enumerate() {
            let h = e.h[i];
            t.row(&[
                class.name().to_string(),
                num(*q),
                opt(h.map(|h| h.h)),
                opt(h.map(|h| h.stderr)),
                h.map_or_else(|| "0".to_string(), |h| h.points.to_string()),
                opt(e.tau[i]),
            ]);
        }
    }
    t
}

pub fn spectrum_table(r: &MultifractalResult) -> Table {
    let mut t = Table::new(&["trend", "q", "alpha", "f_alpha"]);
    for class in TrendClass::ALL {
        for p in &r.class(class).spectrum.points {
            t.row(&[class.name().to_string(), num(p.q), num(p.alpha), num(p.f_alpha)]);
        }
    }
    t
}

/// Key-value scalars: `Delta h`, `D_xy` and per-trend spectrum summaries.
pub fn mf_summary_table(r: &MultifractalResult) -> Table {
    let mut t = Table::new(&["key", "value"]);
    for d in &r.summary.delta_h {
        t.row(&[format!("delta_h_q{}", d.q), opt(d.value)]);
    }
    for q in SUMMARY_QS {
        for class in TrendClass::ALL {
            t.row(&[format!("h_{}_q{q}", class.name()), opt(r.h_at(class, q))]);
        }
    }
    t.row(&["d_xy".to_string(), opt(r.summary.d_xy)]);
    for s in &r.summary.trends {
        let c = s.class.name();
        let sc = s.scalars;
        t.row(&[format!("{c}_delta_alpha"), opt(sc.map(|v| v.delta_alpha))]);
        t.row(&[format!("{c}_alpha0"), opt(sc.map(|v| v.alpha0))]);
        t.row(&[format!("{c}_alpha_min"), opt(sc.map(|v| v.alpha_min))]);
        t.row(&[format!("{c}_alpha_max"), opt(sc.map(|v| v.alpha_max))]);
        t.row(&[format!("{c}_asymmetry"), opt(sc.and_then(|v| v.asymmetry))]);
        t.row(&[format!("{c}_spectrum_ok"), s.quality.ok().to_string()]);
        t.row(&[format!("{c}_monotone"), s.quality.monotone.to_string()]);
        t.row(&[format!("{c}_f_bounded"), s.quality.f_bounded.to_string()]);
        t.row(&[format!("{c}_fine_grid"), s.quality.fine_grid.to_string()]);
        t.row(&[format!("{c}_branch_points"), s.quality.branch_points.to_string()]);
    }
    t
}

#[allow(clippy::needless_range_loop)]
pub fn dcca_table(c: &DccaCurve) -> Table {
    let mut t = Table::new(&["s", "rho", "rho_up", "rho_down", "n_up", "n_down", "n_flat", "verdict"]);
    let verdicts = c.verdicts(VERDICT_MARGIN);
    for i in 0..c.scales.len() {
        t.row(&[
            c.scales[i].to_string(),
            num(c.rho[i]),
            opt(c.rho_up[i]),
            opt(c.rho_down[i]),
            c.n_up[i].to_string(),
            c.n_down[i].to_string(),
            c.n_flat[i].to_string(),
            verdicts[i].name().to_string(),
        ]);
    }
    t
}

const PARAM_NAMES: [&str; 4] = ["omega", "alpha1", "alpha2", "beta"];

pub fn garch_params_table(fits: &[GarchFit]) -> Table {
    let mut t = Table::new(&["model", "parameter", "estimate", "std_error", "p_value", "stars"]);
    for f in fits {
        let p = f.params.as_array();
        let se = f.std_errors.as_array();
        let pv = f.p_values();
        let stars = f.stars();
        for i in 0..4 {
            t.row(&[
                f.model.name().to_string(),
                PARAM_NAMES[i].to_string(),
                num(p[i]),
                opt(se[i]),
                opt(pv[i]),
                stars[i].to_string(),
            ]);
        }
    }
    t
}

pub fn garch_fit_table(fits: &[GarchFit]) -> Table {
    let mut t = Table::new(&["model", "n_obs", "loglik", "aic", "q2_10", "q2_p_value", "converged", "asymmetry"]);
    for f in fits {
        t.row(&[
            f.model.name().to_string(),
            f.n_obs.to_string(),
            num(f.loglik),
            num(f.aic),
            num(f.q2_stat),
            num(f.q2_pvalue),
            f.converged.to_string(),
            fit_asymmetry(f).name().to_string(),
        ]);
    }
    t
}

// Human-readable blocks for summary.txt and the single-verb commands.

pub fn describe_text(rows: &[(String, DescriptiveStats)]) -> String {
    let mut s = String::new();
    let conv = rows.first().map(|r| format!("{:?}", r.1.kurtosis_convention).to_lowercase());
    let _ = writeln!(s, "Descriptive statistics (kurtosis: {})", conv.unwrap_or_default());
    let _ = writeln!(
        s,
        "{:<12} {:>6} {:>11} {:>11} {:>11} {:>11} {:>11} {:>11} {:>11} {:>11} {:>11}",
        "series", "n", "mean", "median", "std", "max", "min", "skew", "kurt", "JB", "JB p"
    );
    for (name, d) in rows {
        let _ = writeln!(
            s,
            "{:<12} {:>6} {:>11} {:>11} {:>11} {:>11} {:>11} {:>11} {:>11} {:>11} {:>11}",
            name,
            d.n,
            human(d.mean),
            human(d.median),
            human(d.std_dev),
            human(d.max),
            human(d.min),
            human(d.skewness),
            human(d.kurtosis()),
            human(d.jarque_bera),
            human(d.jb_p_value)
        );
    }
    s
}

pub fn qcc_text(r: &QccResult) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "Q_cc cross-correlation test (level {})", human(r.level));
    let _ = writeln!(s, "{:>6} {:>11} {:>11} {:>5}", "m", "Q_cc", "critical", "sig");
    let m_max = r.m_values.len();
    let mut picks: Vec<usize> = [1, 5, 10, 50, 100, 200, 500].into_iter().filter(|m| *m <= m_max).collect();
    if picks.last() != Some(&m_max) {
        picks.push(m_max);
    }
    for m in picks {
        let i = m - 1;
        let sig = if r.significant[i] { "yes" } else { "no" };
        let _ = writeln!(s, "{:>6} {:>11} {:>11} {:>5}", m, human(r.q_cc[i]), human(r.critical[i]), sig);
    }
    let first = r.significant.iter().position(|b| *b).map(|i| i + 1);
    let _ = writeln!(s, "first significant m: {}", first.map_or_else(|| "none".to_string(), |m| m.to_string()));
    s
}

pub fn mf_text(r: &MultifractalResult) -> String {
    let mut s = String::new();
    let tab = &r.table;
    let _ = writeln!(
        s,
        "MF-ADCCA: {} scales from {} to {}, q from {} to {}",
        tab.scales.len(),
        tab.scales.first().copied().unwrap_or(0),
        tab.scales.last().copied().unwrap_or(0),
        human(*tab.qs.first().unwrap_or(&f64::NAN)),
        human(*tab.qs.last().unwrap_or(&f64::NAN))
    );
    let _ = writeln!(s, "{:>6} {:>9} {:>9} {:>9} {:>9}", "q", "h", "h+", "h-", "dh");
    for q in SUMMARY_QS {
        let _ = writeln!(
            s,
            "{:>6} {:>9} {:>9} {:>9} {:>9}",
            human(q),
            human_opt(r.h_at(TrendClass::Overall, q)),
            human_opt(r.h_at(TrendClass::Up, q)),
            human_opt(r.h_at(TrendClass::Down, q)),
            human_opt(r.delta_h_at(q))
        );
    }
    let _ = writeln!(s, "efficiency degree D: {}", human_opt(r.summary.d_xy));
    let _ = writeln!(
        s,
        "{:<8} {:>9} {:>9} {:>9} {:>9} {:>8}",
        "trend", "d_alpha", "alpha0", "A_alpha", "alpha_min", "quality"
    );
    for t in &r.summary.trends {
        let sc = t.scalars;
        let _ = writeln!(
            s,
            "{:<8} {:>9} {:>9} {:>9} {:>9} {:>8}",
            t.class.name(),
            human_opt(sc.map(|v| v.delta_alpha)),
            human_opt(sc.map(|v| v.alpha0)),
            human_opt(sc.and_then(|v| v.asymmetry)),
            human_opt(sc.map(|v| v.alpha_min)),
            if t.quality.ok() { "ok" } else { "flagged" }
        );
    }
    s
}

pub fn dcca_text(c: &DccaCurve) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "DCCA coefficients (verdict margin {})", human(VERDICT_MARGIN));
    let _ = writeln!(s, "{:>6} {:>9} {:>9} {:>9}  verdict", "s", "rho", "rho+", "rho-");
    for (i, v) in c.verdicts(VERDICT_MARGIN).iter().enumerate() {
        let _ = writeln!(
            s,
            "{:>6} {:>9} {:>9} {:>9}  {}",
            c.scales[i],
            human(c.rho[i]),
            human_opt(c.rho_up[i]),
            human_opt(c.rho_down[i]),
            v.name()
        );
    }
    s
}

pub fn garch_text(fits: &[GarchFit]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "GARCH(1,1) fits, Gaussian innovations; AIC per observation");
    for f in fits {
        let p = f.params.as_array();
        let se = f.std_errors.as_array();
        let stars = f.stars();
        let _ = writeln!(s, "{}{}", f.model.name(), if f.converged { "" } else { " (not converged)" });
        for i in 0..4 {
            let _ = writeln!(s, "  {:<7} {:>11} ({}){}", PARAM_NAMES[i], human(p[i]), human_opt(se[i]), stars[i]);
        }
        let _ = writeln!(
            s,
            "  loglik {}  AIC {}  Q2(10) {} (p {})  shocks: {}",
            human(f.loglik),
            human(f.aic),
            human(f.q2_stat),
            human(f.q2_pvalue),
            fit_asymmetry(f).name()
        );
    }
    s
}
