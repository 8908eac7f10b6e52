//! The `analyze` batch run: every asset through every enabled stage.

use std::path::{Path, PathBuf};
use std::time::Instant;

use mfadcca_core::dcca::rho_dcca_asym;
use mfadcca_core::garch;
use mfadcca_core::mfadcca::{analyze_values, FluctuationOptions};
use mfadcca_core::qcc::qcc;
use mfadcca_core::series::{
    describe, read_intraday, returns_and_vol_changes, write_daily, write_series, DayBoundary, DescriptiveStats,
    DroppedDay,
};
use mfadcca_core::synth::simulate_intraday;
use mfadcca_core::{
    DailySeries, DccaCurve, GarchFit, GarchModel, IncrementSeries, IntradaySeries, MfadccaConfig, MultifractalResult,
    QccResult, ScaleGrid, SeriesRole,
};
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::{AssetConfig, RunConfig, Source};
use crate::report::{self, Table};
use crate::CliError;

/// The increment pair every stage consumes, plus the daily levels behind it.
#[derive(Debug, Clone)]
pub struct AssetData {
    pub returns: IncrementSeries,
    pub vol_changes: IncrementSeries,
    pub closes: Option<DailySeries>,
    pub sigma: Option<DailySeries>,
    pub dropped: Vec<DroppedDay>,
    /// `(path, sha256)` of every input file read.
    pub inputs: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum StageStatus {
    Ok,
    Skipped,
    Failed { error: String },
}

#[derive(Debug, Clone, Serialize)]
pub struct StageRecord {
    pub stage: &'static str,
    #[serde(flatten)]
    pub status: StageStatus,
    #[serde(skip)]
    pub seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FileRecord {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct AssetOutcome {
    pub name: String,
    pub failed: bool,
    pub stages: Vec<StageRecord>,
    pub inputs: Vec<FileRecord>,
    pub files: Vec<FileRecord>,
}

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub core_version: &'static str,
    pub config_hash: String,
    pub failures: usize,
    pub assets: Vec<AssetOutcome>,
}

#[derive(Debug, Serialize)]
struct StageTiming {
    stage: &'static str,
    seconds: f64,
}

#[derive(Debug, Serialize)]
struct AssetTiming {
    name: String,
    stages: Vec<StageTiming>,
}

#[derive(Debug, Serialize)]
struct Timings {
    total_seconds: f64,
    assets: Vec<AssetTiming>,
}

#[derive(Default)]
struct Findings {
    describe: Vec<(String, DescriptiveStats)>,
    qcc: Option<QccResult>,
    mf: Option<MultifractalResult>,
    dcca: Option<DccaCurve>,
    garch: Vec<GarchFit>,
}

pub const STAGES: [&str; 6] = ["load", "describe", "qcc", "mf_adcca", "dcca_coeff", "garch"];

fn sha256_file(path: &Path) -> std::io::Result<String> {
    Ok(hex::encode(Sha256::digest(std::fs::read(path)?)))
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn from_intraday(raw: IntradaySeries, cfg: &RunConfig, inputs: Vec<(String, String)>) -> Result<AssetData, String> {
    let (from, to) = cfg.timestamp_range();
    let series = if from.is_some() || to.is_some() { raw.restrict(from, to).map_err(err)? } else { raw };
    let pair =
        returns_and_vol_changes(&series, DayBoundary { utc_offset_minutes: cfg.day_offset_minutes }).map_err(err)?;
    Ok(AssetData {
        returns: pair.returns,
        vol_changes: pair.vol_changes,
        closes: Some(pair.closes),
        sigma: Some(pair.sigma),
        dropped: pair.dropped,
        inputs,
    })
}

/// Builds the return and volatility-change series of one asset.
pub fn load_asset(asset: &AssetConfig, cfg: &RunConfig) -> Result<AssetData, String> {
    match &asset.source {
        Source::Intraday { resolved, .. } => {
            let digest = sha256_file(resolved).map_err(|e| format!("{}: {e}", resolved.display()))?;
            let raw = read_intraday(resolved, cfg.rv_interval_minutes).map_err(err)?;
            from_intraday(raw, cfg, vec![(resolved.display().to_string(), digest)])
        }
        Source::SimulatedIntraday { spec, seed } => {
            let raw = simulate_intraday(spec, *seed).map_err(err)?;
            from_intraday(raw, cfg, Vec::new())
        }
        Source::Synthetic { x, y } => {
            if cfg.date_from.is_some() || cfg.date_to.is_some() {
                log::warn!("{}: synthetic series are undated; date range ignored", asset.name);
            }
            let xs = x.generate().map_err(err)?;
            let ys = match y {
                Some(y) => y.generate().map_err(err)?,
                None => xs.clone(),
            };
            if xs.len() != ys.len() {
                return Err(format!("synthetic x has {} points, y has {}", xs.len(), ys.len()));
            }
            let returns =
                IncrementSeries::new(xs.values().to_vec(), SeriesRole::Return, xs.source_id()).map_err(err)?;
            let vol_changes = IncrementSeries::new(ys.values().to_vec(), SeriesRole::VolatilityChange, ys.source_id())
                .map_err(err)?;
            Ok(AssetData { returns, vol_changes, closes: None, sigma: None, dropped: Vec::new(), inputs: Vec::new() })
        }
    }
}

/// Writes a table and records its name.
fn emit(dir: &Path, name: &str, table: Table, written: &mut Vec<String>) -> Result<(), String> {
    table.write(&dir.join(name)).map_err(|e| format!("{}: {e}", dir.join(name).display()))?;
    written.push(name.to_string());
    Ok(())
}

fn write_series_files(dir: &Path, data: &AssetData, written: &mut Vec<String>) -> Result<(), String> {
    write_series(dir.join("returns.csv"), &data.returns).map_err(err)?;
    write_series(dir.join("vol_changes.csv"), &data.vol_changes).map_err(err)?;
    written.extend(["returns.csv".to_string(), "vol_changes.csv".to_string()]);
    if let Some(s) = &data.sigma {
        write_daily(dir.join("sigma.csv"), s).map_err(err)?;
        written.push("sigma.csv".into());
    }
    if let Some(c) = &data.closes {
        write_daily(dir.join("closes.csv"), c).map_err(err)?;
        written.push("closes.csv".into());
    }
    if data.sigma.is_some() {
        emit(dir, "dropped_days.csv", report::dropped_table(&data.dropped), written)?;
    }
    Ok(())
}

fn run_describe(
    data: &AssetData,
    cfg: &RunConfig,
    dir: &Path,
    f: &mut Findings,
    w: &mut Vec<String>,
) -> Result<(), String> {
    let mut rows = Vec::new();
    if let Some(c) = &data.closes {
        let s = IncrementSeries::new(c.values().to_vec(), SeriesRole::Generic, "price").map_err(err)?;
        rows.push(("price".to_string(), describe(&s, cfg.kurtosis).map_err(err)?));
    }
    if let Some(v) = &data.sigma {
        let s = IncrementSeries::new(v.values().to_vec(), SeriesRole::Generic, "volatility").map_err(err)?;
        rows.push(("volatility".to_string(), describe(&s, cfg.kurtosis).map_err(err)?));
    }
    rows.push(("returns".to_string(), describe(&data.returns, cfg.kurtosis).map_err(err)?));
    rows.push(("vol_changes".to_string(), describe(&data.vol_changes, cfg.kurtosis).map_err(err)?));
    emit(dir, "descriptive.csv", report::descriptive_table(&rows), w)?;
    f.describe = rows;
    Ok(())
}

/// Largest lag that fits the series, capped at the configured maximum.
pub fn qcc_lags(n: usize, m_max: usize) -> usize {
    m_max.min(n.saturating_sub(2))
}

fn run_qcc(data: &AssetData, cfg: &RunConfig, dir: &Path, f: &mut Findings, w: &mut Vec<String>) -> Result<(), String> {
    let n = data.returns.len();
    let m = qcc_lags(n, cfg.grids.qcc_m_max);
    if m < cfg.grids.qcc_m_max {
        log::warn!("qcc: m_max {} reduced to {m} for N = {n}", cfg.grids.qcc_m_max);
    }
    let r = qcc(data.returns.values(), data.vol_changes.values(), m, cfg.grids.level).map_err(err)?;
    emit(dir, "qcc.csv", report::qcc_table(&r), w)?;
    f.qcc = Some(r);
    Ok(())
}

pub fn mf_config(cfg: &RunConfig) -> MfadccaConfig {
    MfadccaConfig {
        scales: cfg.grids.scales.clone(),
        qs: cfg.grids.qs.clone(),
        options: FluctuationOptions { order: cfg.grids.detrend_order, ..FluctuationOptions::default() },
    }
}

fn run_mf(data: &AssetData, cfg: &RunConfig, dir: &Path, f: &mut Findings, w: &mut Vec<String>) -> Result<(), String> {
    let r = analyze_values(data.returns.values(), data.vol_changes.values(), &mf_config(cfg)).map_err(err)?;
    emit(dir, "fluctuation.csv", report::fluctuation_table(&r), w)?;
    emit(dir, "counts.csv", report::counts_table(&r), w)?;
    emit(dir, "exponents.csv", report::exponents_table(&r), w)?;
    emit(dir, "spectrum.csv", report::spectrum_table(&r), w)?;
    emit(dir, "mfadcca_summary.csv", report::mf_summary_table(&r), w)?;
    f.mf = Some(r);
    Ok(())
}

fn run_dcca(
    data: &AssetData,
    cfg: &RunConfig,
    dir: &Path,
    f: &mut Findings,
    w: &mut Vec<String>,
) -> Result<(), String> {
    let grid = match &cfg.grids.dcca_scales {
        Some(g) => g.clone(),
        None => ScaleGrid::coefficient_default(data.returns.len()).map_err(err)?,
    };
    let c = rho_dcca_asym(data.returns.values(), data.vol_changes.values(), &grid).map_err(err)?;
    emit(dir, "dcca.csv", report::dcca_table(&c), w)?;
    f.dcca = Some(c);
    Ok(())
}

fn run_garch(name: &str, data: &AssetData, dir: &Path, f: &mut Findings, w: &mut Vec<String>) -> Result<(), String> {
    let r = data.returns.values();
    let fits = [GarchModel::Egarch, GarchModel::Gjr]
        .into_iter()
        .map(|m| garch::fit(m, r).map_err(|e| format!("{}: {e}", m.name())))
        .collect::<Result<Vec<_>, _>>()?;
    for fit in &fits {
        if !fit.converged {
            log::warn!("{name}: {} optimizer did not converge; standard errors may be missing", fit.model.name());
        }
    }
    emit(dir, "garch_params.csv", report::garch_params_table(&fits), w)?;
    emit(dir, "garch_fit.csv", report::garch_fit_table(&fits), w)?;
    f.garch = fits;
    Ok(())
}

fn summary_text(asset: &AssetConfig, data: Option<&AssetData>, f: &Findings, stages: &[StageRecord]) -> String {
    let mut s = format!("asset: {}\n", asset.name);
    if let Some(d) = data {
        s.push_str(&format!("observations: {}\n", d.returns.len()));
        if let Some(dates) = d.returns.dates() {
            if let (Some(a), Some(b)) = (dates.first(), dates.last()) {
                s.push_str(&format!("dates: {a} to {b}\n"));
            }
        }
        if d.sigma.is_some() {
            s.push_str(&format!("days dropped: {}\n", d.dropped.len()));
        }
    }
    for r in stages {
        if let StageStatus::Failed { error } = &r.status {
            s.push_str(&format!("FAILED {}: {error}\n", r.stage));
        }
    }
    let blocks = [
        (!f.describe.is_empty()).then(|| report::describe_text(&f.describe)),
        f.qcc.as_ref().map(report::qcc_text),
        f.mf.as_ref().map(report::mf_text),
        f.dcca.as_ref().map(report::dcca_text),
        (!f.garch.is_empty()).then(|| report::garch_text(&f.garch)),
    ];
    for b in blocks.into_iter().flatten() {
        s.push('\n');
        s.push_str(&b);
    }
    s
}

fn timed(f: impl FnOnce() -> Result<(), String>) -> (StageStatus, f64) {
    let t = Instant::now();
    let status = match f() {
        Ok(()) => StageStatus::Ok,
        Err(error) => StageStatus::Failed { error },
    };
    (status, t.elapsed().as_secs_f64())
}

fn run_asset(asset: &AssetConfig, cfg: &RunConfig) -> AssetOutcome {
    let dir = cfg.output_dir.join(&asset.name);
    let mut written = Vec::new();
    let mut findings = Findings::default();
    let mut stages = Vec::new();
    let mut data = None;

    let (status, seconds) = timed(|| {
        std::fs::create_dir_all(&dir).map_err(|e| format!("{}: {e}", dir.display()))?;
        let d = load_asset(asset, cfg)?;
        write_series_files(&dir, &d, &mut written)?;
        data = Some(d);
        Ok(())
    });
    stages.push(StageRecord { stage: "load", status, seconds });

    let toggles = cfg.analyses;
    let enabled = [toggles.describe, toggles.qcc, toggles.mf_adcca, toggles.dcca_coeff, toggles.garch];
    for (stage, on) in STAGES[1..].iter().zip(enabled) {
        let Some(d) = data.as_ref().filter(|_| on) else {
            stages.push(StageRecord { stage, status: StageStatus::Skipped, seconds: 0.0 });
            continue;
        };
        let f = &mut findings;
        let w = &mut written;
        let (status, seconds) = timed(|| match *stage {
            "describe" => run_describe(d, cfg, &dir, f, w),
            "qcc" => run_qcc(d, cfg, &dir, f, w),
            "mf_adcca" => run_mf(d, cfg, &dir, f, w),
            "dcca_coeff" => run_dcca(d, cfg, &dir, f, w),
            _ => run_garch(&asset.name, d, &dir, f, w),
        });
        if let StageStatus::Failed { error } = &status {
            log::error!("{}: {stage} failed: {error}", asset.name);
        }
        stages.push(StageRecord { stage, status, seconds });
    }

    if dir.is_dir() {
        let text = summary_text(asset, data.as_ref(), &findings, &stages);
        match std::fs::write(dir.join("summary.txt"), text) {
            Ok(()) => written.push("summary.txt".into()),
            Err(e) => log::error!("{}: cannot write summary: {e}", asset.name),
        }
    }

    written.sort();
    let files = written
        .iter()
        .filter_map(|name| {
            let digest = sha256_file(&dir.join(name)).ok()?;
            Some(FileRecord { path: format!("{}/{name}", asset.name), sha256: digest })
        })
        .collect();
    let inputs = data
        .map(|d| d.inputs.into_iter().map(|(path, sha256)| FileRecord { path, sha256 }).collect())
        .unwrap_or_default();
    let failed = stages.iter().any(|r| matches!(r.status, StageStatus::Failed { .. }));
    AssetOutcome { name: asset.name.clone(), failed, stages, inputs, files }
}

pub struct RunSummary {
    pub manifest: Manifest,
    pub manifest_path: PathBuf,
}

/// Runs every asset concurrently, then writes `manifest.json` and
/// `timings.json`. Only the latter varies between identical runs.
pub fn run_pipeline(cfg: &RunConfig) -> Result<RunSummary, CliError> {
    let start = Instant::now();
    std::fs::create_dir_all(&cfg.output_dir)
        .map_err(|e| CliError::Config(format!("cannot create {}: {e}", cfg.output_dir.display())))?;
    let outcomes: Vec<AssetOutcome> = cfg.assets.par_iter().map(|a| run_asset(a, cfg)).collect();

    let timings = Timings {
        total_seconds: start.elapsed().as_secs_f64(),
        assets: outcomes
            .iter()
            .map(|o| AssetTiming {
                name: o.name.clone(),
                stages: o.stages.iter().map(|s| StageTiming { stage: s.stage, seconds: s.seconds }).collect(),
            })
            .collect(),
    };
    let manifest = Manifest {
        tool: "mfadcca",
        version: env!("CARGO_PKG_VERSION"),
        core_version: mfadcca_core::VERSION,
        config_hash: cfg.hash(),
        failures: outcomes.iter().filter(|o| o.failed).count(),
        assets: outcomes,
    };
    let write_json = |name: &str, body: String| {
        let path = cfg.output_dir.join(name);
        std::fs::write(&path, body + "\n")
            .map_err(|e| CliError::Analysis(format!("{}: {e}", path.display())))
            .map(|_| path)
    };
    write_json("timings.json", serde_json::to_string_pretty(&timings).expect("timings serialize"))?;
    let manifest_path =
        write_json("manifest.json", serde_json::to_string_pretty(&manifest).expect("manifest serializes"))?;
    Ok(RunSummary { manifest, manifest_path })
}
