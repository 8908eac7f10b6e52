//! Acceptance criteria 1-11. Prints one PASS/FAIL line per criterion and
//! exits non-zero when any fails.
//!
//! Criterion 11 reads a real 5-minute `timestamp,price` file from
//! `MFADCCA_INTRADAY_CSV` when set; otherwise it runs on a simulated surrogate
//! and says so.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use mfadcca_core::chi2::chi2_quantile;
use mfadcca_core::dcca::{rho_dcca, rho_dcca_asym, VERDICT_MARGIN};
use mfadcca_core::garch::{fit, fit_symmetric};
use mfadcca_core::mfadcca::{analyze_values, mfdfa};
use mfadcca_core::qcc::qcc;
use mfadcca_core::series::write_intraday;
use mfadcca_core::synth::{
    binomial_cascade, cascade_hurst, cascade_spectrum_width, correlated_fgn_pair, coupled_pair, fgn, iid_gaussian,
    simulate_garch, simulate_intraday, CoupledRegime, CouplingSpec, IntradaySimSpec,
};
use mfadcca_core::{GarchModel, GarchParams, MfadccaConfig, MultifractalResult, ScaleGrid, TrendClass, Verdict};
use rayon::prelude::*;

const N16: usize = 1 << 16;
const SEEDS: u64 = 10;

struct Outcome {
    id: u32,
    pass: bool,
}

fn report(id: u32, title: &str, pass: bool, detail: String) -> Outcome {
    println!("criterion {id:>2} {}: {title} | {detail}", if pass { "PASS" } else { "FAIL" });
    Outcome { id, pass }
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn delta_alpha(r: &MultifractalResult) -> f64 {
    r.overall.spectrum.scalars.map_or(f64::NAN, |s| s.delta_alpha)
}

struct FgnRun {
    hurst: f64,
    h2: Vec<f64>,
    width: Vec<f64>,
    slowest: Duration,
}

/// Scales from 20 to N/10: the range over which the synthetic oracles are
/// self-similar. The length policy at N = 2^16 starts at 655 and leaves too
/// few windows per scale for single-realisation checks.
fn oracle_config() -> MfadccaConfig {
    MfadccaConfig { scales: Some(ScaleGrid::log_spaced(20, N16 / 10, 100).unwrap()), ..Default::default() }
}

fn fgn_runs() -> Vec<FgnRun> {
    let cfg = oracle_config();
    [0.3, 0.5, 0.7]
        .into_iter()
        .map(|hurst| {
            let mut run = FgnRun { hurst, h2: Vec::new(), width: Vec::new(), slowest: Duration::ZERO };
            for seed in 0..SEEDS {
                let t = Instant::now();
                let x = fgn(hurst, N16, seed).unwrap();
                let r = mfdfa(&x, &cfg).unwrap();
                run.slowest = run.slowest.max(t.elapsed());
                run.h2.push(r.h_at(TrendClass::Overall, 2.0).unwrap_or(f64::NAN));
                run.width.push(delta_alpha(&r));
            }
            run
        })
        .collect()
}

fn criterion_1(runs: &[FgnRun]) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for r in runs {
        let worst = r.h2.iter().map(|h| (h - r.hurst).abs()).fold(0.0, f64::max);
        let bias = (mean(&r.h2) - r.hurst).abs();
        pass &= worst <= 0.05 && bias <= 0.03 && r.slowest < Duration::from_secs(30);
        parts.push(format!(
            "H={}: mean h(2)={:.4} max|err|={:.4} slowest {:.2}s",
            r.hurst,
            mean(&r.h2),
            worst,
            r.slowest.as_secs_f64()
        ));
    }
    // the default length policy, for the record
    let policy: Vec<f64> = (0..SEEDS)
        .map(|s| {
            let r = mfdfa(&fgn(0.7, N16, s).unwrap(), &MfadccaConfig::default()).unwrap();
            (r.h_at(TrendClass::Overall, 2.0).unwrap_or(f64::NAN) - 0.7).abs()
        })
        .collect();
    parts.push(format!(
        "info: policy grid 655..6553 at H=0.7 max|err|={:.4}",
        policy.iter().copied().fold(0.0, f64::max)
    ));
    report(1, "Hurst recovery on fGn, N=2^16, 10 seeds, scales 20..N/10", pass, parts.join("; "))
}

const CASCADE_QS: [f64; 5] = [-10.0, -5.0, 2.0, 5.0, 10.0];

struct CascadeRun {
    /// Seed-averaged `h(q) - h_oracle(q)` at [`CASCADE_QS`].
    mean_err: [f64; 5],
    worst_h: f64,
    seeds_within: usize,
    width: Vec<f64>,
    analytic_width: f64,
}

fn cascade_runs() -> CascadeRun {
    let p = 0.75;
    let cfg = oracle_config();
    let mut mean_err = [0.0; 5];
    let mut worst_h: f64 = 0.0;
    let mut seeds_within = 0;
    let mut width = Vec::new();
    for seed in 0..SEEDS {
        let x = binomial_cascade(p, 16, seed).unwrap();
        let r = mfdfa(&x, &cfg).unwrap();
        let mut seed_worst: f64 = 0.0;
        for (i, q) in CASCADE_QS.into_iter().enumerate() {
            let err = r.h_at(TrendClass::Overall, q).map_or(f64::INFINITY, |h| h - cascade_hurst(p, q));
            mean_err[i] += err / SEEDS as f64;
            seed_worst = seed_worst.max(err.abs());
        }
        worst_h = worst_h.max(seed_worst);
        seeds_within += usize::from(seed_worst <= 0.08);
        width.push(delta_alpha(&r));
    }
    CascadeRun { mean_err, worst_h, seeds_within, width, analytic_width: cascade_spectrum_width(p, -10.0, 10.0) }
}

fn criterion_2(c: &CascadeRun) -> Outcome {
    let rel: Vec<f64> = c.width.iter().map(|w| (w / c.analytic_width - 1.0).abs()).collect();
    let worst_rel = rel.iter().copied().fold(0.0, f64::max);
    let worst_mean = c.mean_err.iter().map(|e| e.abs()).fold(0.0, f64::max);
    let pass = worst_mean <= 0.08 && worst_rel <= 0.2;

    // the default policy grid, for the record
    let x = binomial_cascade(0.75, 16, 0).unwrap();
    let r = mfdfa(&x, &MfadccaConfig::default()).unwrap();
    let policy_err = CASCADE_QS
        .iter()
        .map(|&q| r.h_at(TrendClass::Overall, q).map_or(f64::INFINITY, |h| (h - cascade_hurst(0.75, q)).abs()))
        .fold(0.0, f64::max);
    report(
        2,
        "binomial cascade p=0.75, 2^16 points, 10 seeds, scales 20..N/10",
        pass,
        format!(
            "seed-mean h-h_oracle at q=-10,-5,2,5,10: {}; delta_alpha mean {:.4} vs analytic {:.4}, worst rel err {:.3}; \
             info: single seeds within 0.08 at every q {}/{SEEDS} (worst {:.4}); policy grid seed 0 max|h err|={policy_err:.4}",
            c.mean_err.iter().map(|e| format!("{e:+.4}")).collect::<Vec<_>>().join(" "),
            mean(&c.width),
            c.analytic_width,
            worst_rel,
            c.seeds_within,
            c.worst_h
        ),
    )
}

fn criterion_3(runs: &[FgnRun], c: &CascadeRun) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for r in runs {
        let m = mean(&r.width);
        let paired = r.width.iter().zip(&c.width).all(|(f, k)| f < k);
        pass &= m < 0.25 && paired;
        parts.push(format!("H={}: mean delta_alpha {:.4}, below cascade in every pairing: {paired}", r.hurst, m));
    }
    report(3, "monofractal collapse", pass, parts.join("; "))
}

fn criterion_4() -> Outcome {
    let x = iid_gaussian(1000, 41);
    let neg: Vec<f64> = x.iter().map(|v| -v).collect();
    let grid = ScaleGrid::coefficient_default(1000).unwrap();
    let same = rho_dcca_asym(&x, &x, &grid).unwrap();
    let opp = rho_dcca_asym(&x, &neg, &grid).unwrap();
    let mut exact_err: f64 = 0.0;
    for (c, target) in [(&same, 1.0), (&opp, -1.0)] {
        for v in c.rho.iter().chain(c.rho_up.iter().flatten()).chain(c.rho_down.iter().flatten()) {
            exact_err = exact_err.max((v - target).abs());
        }
    }

    let pairs = 10_000u64;
    let small = ScaleGrid::from_scales(vec![4, 8, 16, 32, 64]).unwrap();
    let violations: usize = (0..pairs)
        .into_par_iter()
        .map(|k| {
            let a = iid_gaussian(256, 2 * k + 1000);
            let b = iid_gaussian(256, 2 * k + 1001);
            // correlation weight in [-1, 1] and heavy tails on every third pair
            let w = ((k * 7919) % 2001) as f64 / 1000.0 - 1.0;
            let y: Vec<f64> = a
                .iter()
                .zip(&b)
                .map(|(u, v)| {
                    let t = w * u + (1.0 - w * w).sqrt() * v;
                    if k % 3 == 0 {
                        t * t * t
                    } else {
                        t
                    }
                })
                .collect();
            let c = rho_dcca_asym(&a, &y, &small).unwrap();
            c.rho
                .iter()
                .chain(c.rho_up.iter().flatten())
                .chain(c.rho_down.iter().flatten())
                .filter(|r| r.abs() > 1.0 + 1e-12)
                .count()
        })
        .sum();
    let pass = exact_err <= 1e-12 && violations == 0;
    report(
        4,
        "DCCA exactness and Cauchy-Schwarz",
        pass,
        format!(
            "max|rho -/+ 1| over {} scales (all, up, down) = {exact_err:.2e}; |rho|>1 on {pairs} random pairs: {violations}",
            grid.len()
        ),
    )
}

fn criterion_5() -> Outcome {
    let scales = [10usize, 50, 250];
    let grid = ScaleGrid::from_scales(scales.to_vec()).unwrap();
    let pairs = 200u64;
    let rhos: Vec<Vec<f64>> = (0..pairs)
        .into_par_iter()
        .map(|k| rho_dcca(&iid_gaussian(4096, 2 * k + 50_000), &iid_gaussian(4096, 2 * k + 50_001), &grid).unwrap())
        .collect();
    let means: Vec<f64> = (0..scales.len()).map(|i| mean(&rhos.iter().map(|r| r[i]).collect::<Vec<_>>())).collect();
    let pass = means.iter().all(|m| m.abs() <= 0.02);
    let detail = scales.iter().zip(&means).map(|(s, m)| format!("s={s}: {m:+.4}")).collect::<Vec<_>>().join(", ");
    report(5, "independence null, 200 i.i.d. pairs of N=4096", pass, detail)
}

fn criterion_6() -> Outcome {
    let grid = ScaleGrid::from_scales(vec![30]).unwrap();
    let seeds = 50u64;
    let count = |regime: CoupledRegime, want: Verdict| {
        let spec = CouplingSpec { coupled: regime, ..CouplingSpec::default() };
        (0..seeds)
            .filter(|&s| {
                let (x, y) = coupled_pair(&spec, 4096, s).unwrap();
                rho_dcca_asym(&x, &y, &grid).unwrap().verdicts(VERDICT_MARGIN)[0] == want
            })
            .count()
    };
    let asym = count(CoupledRegime::Down, Verdict::Asymmetric);
    let inv = count(CoupledRegime::Up, Verdict::InverseAsymmetric);
    let need = (0.9 * seeds as f64).ceil() as usize;
    report(
        6,
        "asymmetry detector at s=30, N=4096, 50 seeds",
        asym >= need && inv >= need,
        format!(
            "down-coupled -> asymmetric {asym}/{seeds}; up-coupled -> inverse_asymmetric {inv}/{seeds}; need {need}"
        ),
    )
}

fn criterion_7() -> Outcome {
    // independent gamma-inverse reference values
    const TABLE: [(u32, f64, f64); 6] = [
        (1, 0.05, 3.8414588206941285),
        (10, 0.05, 18.30703805327515),
        (100, 0.05, 124.34211340400408),
        (500, 0.05, 553.1268089342569),
        (50, 0.001, 86.66081519040317),
        (7, 0.999, 0.598493752375376),
    ];
    let worst_rel =
        TABLE.iter().map(|&(m, level, want)| (chi2_quantile(m, level).unwrap() / want - 1.0).abs()).fold(0.0, f64::max);

    let pairs = 2000u64;
    let lags = [1usize, 10, 100];
    let hits: Vec<[bool; 3]> = (0..pairs)
        .into_par_iter()
        .map(|k| {
            let r = qcc(&iid_gaussian(1000, 2 * k + 90_000), &iid_gaussian(1000, 2 * k + 90_001), 100, 0.05).unwrap();
            lags.map(|m| r.significant[m - 1])
        })
        .collect();
    let rates: Vec<f64> = (0..3).map(|i| hits.iter().filter(|h| h[i]).count() as f64 / pairs as f64).collect();
    let pass = worst_rel <= 1e-8 && rates.iter().all(|r| (0.035..=0.065).contains(r));
    let detail =
        lags.iter().zip(&rates).map(|(m, r)| format!("m={m}: {:.2}%", 100.0 * r)).collect::<Vec<_>>().join(", ");
    report(
        7,
        "Q_cc calibration, 2000 i.i.d. pairs of N=1000 at 5%",
        pass,
        format!("rejection rates {detail}; chi2 quantile worst rel err {worst_rel:.1e}"),
    )
}

fn criterion_8() -> Outcome {
    let seeds = 30u64;
    let cfg = MfadccaConfig::default();
    let dh = |x: &[f64], y: &[f64]| analyze_values(x, y, &cfg).unwrap().delta_h_at(2.0).unwrap_or(f64::NAN);
    let sym: Vec<f64> = (0..seeds)
        .into_par_iter()
        .map(|s| {
            let (x, y) = correlated_fgn_pair(0.5, 0.6, 4096, s).unwrap();
            dh(&x, &y)
        })
        .collect();
    let asym: Vec<f64> = (0..seeds)
        .into_par_iter()
        .map(|s| {
            let (x, y) = coupled_pair(&CouplingSpec::default(), 4096, s).unwrap();
            dh(&x, &y)
        })
        .collect();
    let sym_abs = mean(&sym.iter().map(|v| v.abs()).collect::<Vec<_>>());
    let asym_abs = mean(&asym.iter().map(|v| v.abs()).collect::<Vec<_>>());
    let pass = mean(&sym).abs() < 0.05 && sym_abs < 0.5 * asym_abs;
    report(
        8,
        "symmetric fGn pairs are neutral, 30 seeds, N=4096",
        pass,
        format!(
            "mean dh(2) {:+.4}, mean|dh(2)| {sym_abs:.4} vs asymmetric construction mean|dh(2)| {asym_abs:.4} (need < half)",
            mean(&sym)
        ),
    )
}

fn criterion_9() -> Outcome {
    let seeds = 40u64;
    let n = 20_000;
    let cases = [
        (GarchModel::Gjr, GarchParams::new(1e-4, 0.1, 0.1, 0.8)),
        (GarchModel::Egarch, GarchParams::new(-0.58, 0.15, -0.08, 0.95)),
    ];
    let need = (0.95 * seeds as f64).ceil() as usize;
    let mut pass = true;
    let mut parts = Vec::new();
    for (model, truth) in cases {
        let rows: Vec<(bool, bool)> = (0..seeds)
            .into_par_iter()
            .map(|s| {
                let r = simulate_garch(model, &truth, n, 7000 + s).unwrap();
                let full = fit(model, &r).unwrap();
                let sym = fit_symmetric(model, &r).unwrap();
                let est = full.params.as_array();
                let se = full.std_errors.as_array();
                let within = truth
                    .as_array()
                    .iter()
                    .zip(est.iter().zip(se))
                    .all(|(t, (e, s))| s.is_some_and(|s| (e - t).abs() <= 3.0 * s));
                (within, sym.loglik <= full.loglik + 1e-6)
            })
            .collect();
        let ok = rows.iter().filter(|r| r.0).count();
        let nested = rows.iter().filter(|r| r.1).count();
        pass &= ok >= need && nested == seeds as usize;
        parts.push(format!(
            "{}: all params within 3 SE in {ok}/{seeds} (need {need}), nested loglik held {nested}/{seeds}",
            model.name()
        ));
    }
    report(9, "GARCH simulate-and-refit, N=20000", pass, parts.join("; "))
}

// Criteria 10 and 11 drive the binary.

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_mfadcca")
}

fn run_analyze(config: &Path, out: &Path) -> (i32, Duration) {
    let t = Instant::now();
    let o = Command::new(bin())
        .args(["analyze", config.to_str().unwrap(), "--out", out.to_str().unwrap()])
        .output()
        .expect("binary runs");
    if !o.status.success() {
        eprintln!("{}", String::from_utf8_lossy(&o.stderr));
    }
    (o.status.code().unwrap_or(-1), t.elapsed())
}

fn bundle(dir: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    let mut files = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else if p.file_name().unwrap() != "timings.json" {
                files.push((p.strip_prefix(dir).unwrap().to_path_buf(), std::fs::read(&p).unwrap()));
            }
        }
    }
    files.sort();
    files
}

fn sim_asset(name: &str, model: &str, params: &str, days: usize) -> String {
    format!(
        "[[asset]]\nname = \"{name}\"\n[asset.simulated_intraday]\nmodel = \"{model}\"\nparams = {params}\ndays = {days}\n"
    )
}

fn criterion_10(tmp: &Path) -> Outcome {
    let config = tmp.join("four.toml");
    let body = [
        "seed = 11\n".to_string(),
        sim_asset("a", "gjr", "{ omega = 2e-5, alpha1 = 0.03, alpha2 = 0.12, beta = 0.85 }", 1700),
        sim_asset("b", "egarch", "{ omega = -0.35, alpha1 = 0.2, alpha2 = 0.08, beta = 0.95 }", 1700),
        sim_asset("c", "gjr", "{ omega = 1e-5, alpha1 = 0.08, alpha2 = 0.0, beta = 0.9 }", 1700),
        sim_asset("d", "egarch", "{ omega = -0.5, alpha1 = 0.15, alpha2 = -0.05, beta = 0.94 }", 1700),
    ]
    .concat();
    std::fs::write(&config, body).unwrap();
    let (c1, t1) = run_analyze(&config, &tmp.join("run1"));
    let (c2, t2) = run_analyze(&config, &tmp.join("run2"));
    let a = bundle(&tmp.join("run1"));
    let b = bundle(&tmp.join("run2"));
    let identical = !a.is_empty() && a == b;
    let slowest = t1.max(t2);
    let pass = c1 == 0 && c2 == 0 && identical && slowest < Duration::from_secs(300);
    report(
        10,
        "end-to-end determinism, 4 simulated assets of 1700 days",
        pass,
        format!(
            "exit codes {c1}/{c2}; {} files byte-identical: {identical}; slowest run {:.2}s (budget 300s)",
            a.len(),
            slowest.as_secs_f64()
        ),
    )
}

fn missing_cells(path: &Path, skip_cols: usize) -> usize {
    std::fs::read_to_string(path)
        .map(|t| t.lines().skip(1).map(|l| l.split(',').skip(skip_cols).filter(|f| *f == "NA").count()).sum())
        .unwrap_or(usize::MAX)
}

fn criterion_11(tmp: &Path) -> Outcome {
    let (csv, label) = match std::env::var("MFADCCA_INTRADAY_CSV") {
        Ok(p) => (PathBuf::from(&p), format!("dataset {p}")),
        Err(_) => {
            let spec = IntradaySimSpec {
                model: GarchModel::Gjr,
                params: GarchParams::new(2e-5, 0.03, 0.12, 0.85),
                days: 1670,
                interval_minutes: 5,
                start: chrono::NaiveDate::from_ymd_opt(2016, 6, 1).unwrap(),
                initial_price: 600.0,
            };
            let p = tmp.join("surrogate_5min.csv");
            write_intraday(&p, &simulate_intraday(&spec, 2016).unwrap()).unwrap();
            (p, "SURROGATE: simulated 5-min GJR prices, 1670 days (no real dataset supplied)".to_string())
        }
    };
    let config = tmp.join("real.toml");
    std::fs::write(
        &config,
        format!("[[asset]]\nname = \"asset\"\nintraday = \"{}\"\n", csv.display().to_string().replace('\\', "/")),
    )
    .unwrap();
    let out = tmp.join("real_out");
    let (code, _) = run_analyze(&config, &out);
    let dir = out.join("asset");
    let lines =
        |name: &str| std::fs::read_to_string(dir.join(name)).map(|t| t.lines().count().saturating_sub(1)).unwrap_or(0);
    let days = lines("returns.csv");
    let counts = std::fs::read_to_string(dir.join("counts.csv")).unwrap_or_default();
    let scales: Vec<usize> = counts.lines().skip(1).filter_map(|l| l.split(',').next()?.parse().ok()).collect();
    let (s_min, s_max) = (scales.first().copied().unwrap_or(0), scales.last().copied().unwrap_or(0));
    let policy = ScaleGrid::fluctuation_policy(days.max(1)).ok().map(|g| g.policy());

    let reports = [
        "descriptive.csv",
        "qcc.csv",
        "fluctuation.csv",
        "exponents.csv",
        "spectrum.csv",
        "mfadcca_summary.csv",
        "dcca.csv",
        "garch_params.csv",
        "garch_fit.csv",
    ];
    let present = reports.iter().filter(|r| lines(r) > 0).count();
    // h and tau columns, every trend and q; rho columns at every scale; GARCH standard errors
    let na_h = missing_cells(&dir.join("exponents.csv"), 2);
    let na_dcca = missing_cells(&dir.join("dcca.csv"), 1);
    let na_garch = missing_cells(&dir.join("garch_params.csv"), 2);
    let na_desc = missing_cells(&dir.join("descriptive.csv"), 1);
    let trends_with_spectrum = ["overall", "up", "down"]
        .iter()
        .filter(|t| {
            std::fs::read_to_string(dir.join("spectrum.csv"))
                .map(|s| s.lines().any(|l| l.starts_with(&format!("{t},"))))
                .unwrap_or(false)
        })
        .count();
    let na_fluct = missing_cells(&dir.join("fluctuation.csv"), 3);
    let pass = code == 0
        && days >= 1500
        && present == reports.len()
        && na_h == 0
        && na_dcca == 0
        && na_garch == 0
        && na_desc == 0
        && trends_with_spectrum == 3
        && policy.is_some_and(|p| p.s_min == s_min && p.s_max == s_max);
    report(
        11,
        "end-to-end run on 5-minute data",
        pass,
        format!(
            "{label}; exit {code}; N={days}; scales {s_min}..{s_max} ({} points); reports {present}/{}; \
             missing h/tau {na_h}, dcca {na_dcca}, garch {na_garch}, descriptive {na_desc}; \
             spectra for {trends_with_spectrum}/3 trends; info: empty F_q(s) cells {na_fluct}",
            scales.len(),
            reports.len()
        ),
    )
}

fn main() {
    let start = Instant::now();
    let tmp = tempfile::tempdir().expect("temp dir");
    let fgn = fgn_runs();
    let cascade = cascade_runs();
    let outcomes = vec![
        criterion_1(&fgn),
        criterion_2(&cascade),
        criterion_3(&fgn, &cascade),
        criterion_4(),
        criterion_5(),
        criterion_6(),
        criterion_7(),
        criterion_8(),
        criterion_9(),
        criterion_10(tmp.path()),
        criterion_11(tmp.path()),
    ];
    let failed: Vec<u32> = outcomes.iter().filter(|o| !o.pass).map(|o| o.id).collect();
    println!(
        "acceptance: {}/{} criteria passed in {:.1}s",
        outcomes.len() - failed.len(),
        outcomes.len(),
        start.elapsed().as_secs_f64()
    );
    if !failed.is_empty() {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
