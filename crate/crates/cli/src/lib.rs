//! Command-line front end and batch pipeline for `mfadcca-core`.

pub mod config;
pub mod grids;
pub mod pipeline;
pub mod report;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use mfadcca_core::dcca::rho_dcca_asym;
use mfadcca_core::garch;
use mfadcca_core::mfadcca::{analyze_values, FluctuationOptions};
use mfadcca_core::qcc::{qcc, DEFAULT_M_MAX};
use mfadcca_core::series::{describe, read_series, write_series, KurtosisConvention};
use mfadcca_core::{GarchModel, GarchParams, GeneratorKind, GeneratorSpec, IncrementSeries, MfadccaConfig, ScaleGrid};

use crate::config::{Overrides, RunConfig};
use crate::grids::{parse_q_grid, parse_scale_grid};
use crate::report::Table;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad configuration, arguments or unreadable input.
    #[error("{0}")]
    Config(String),
    /// An analysis rejected its input.
    #[error("{0}")]
    Analysis(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Analysis(_) => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "mfadcca", version, about = "Asymmetric multifractal cross-correlation analysis")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Kurtosis {
    Excess,
    Raw,
}

impl From<Kurtosis> for KurtosisConvention {
    fn from(k: Kurtosis) -> Self {
        match k {
            Kurtosis::Excess => KurtosisConvention::Excess,
            Kurtosis::Raw => KurtosisConvention::Raw,
        }
    }
}

#[derive(Debug, Args)]
pub struct PairArgs {
    /// First series (`timestamp,price`, `date,value` or `index,value`).
    pub x: PathBuf,
    /// Second series, same length as the first.
    pub y: PathBuf,
    /// Directory for machine-readable output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the full pipeline described by a TOML config.
    Analyze {
        config: PathBuf,
        /// Output directory; overrides `output_dir`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Run seed for generators without their own.
        #[arg(long)]
        seed: Option<u64>,
        /// MIN:MAX:COUNT
        #[arg(long, allow_hyphen_values = true)]
        scales: Option<String>,
        /// MIN:MAX:STEP
        #[arg(long, allow_hyphen_values = true)]
        q: Option<String>,
        /// Significance level of the cross-correlation test.
        #[arg(long)]
        level: Option<f64>,
    },
    /// Write a synthetic series as `index,value` CSV.
    Synth(SynthArgs),
    /// Descriptive statistics of one series.
    Describe {
        csv: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "excess")]
        kurtosis: Kurtosis,
    },
    /// Cumulative cross-correlation test.
    Qcc {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, default_value_t = 0.05)]
        level: f64,
        #[arg(long, default_value_t = DEFAULT_M_MAX)]
        m_max: usize,
    },
    /// Generalized Hurst exponents and spectra for overall, up and down trends.
    Mfadcca {
        #[command(flatten)]
        pair: PairArgs,
        /// MIN:MAX:COUNT; defaults to the length-dependent policy.
        #[arg(long, allow_hyphen_values = true)]
        scales: Option<String>,
        /// MIN:MAX:STEP
        #[arg(long, allow_hyphen_values = true, default_value = "-10:10:0.5")]
        q: String,
        #[arg(long, default_value_t = 2)]
        order: usize,
    },
    /// DCCA coefficients with trend-conditioned variants.
    Dcca {
        #[command(flatten)]
        pair: PairArgs,
        /// MIN:MAX:COUNT; defaults to 30 scales from 10 to N/5.
        #[arg(long, allow_hyphen_values = true)]
        scales: Option<String>,
    },
    /// EGARCH(1,1) and GJR-GARCH(1,1) fits of a return series.
    Garch {
        returns: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SynthKind {
    Fgn,
    Cascade,
    Iid,
    Garch,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, value_enum)]
    pub kind: SynthKind,
    /// Output CSV file.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub length: Option<usize>,
    #[arg(long)]
    pub hurst: Option<f64>,
    /// Cascade weight in (0.5, 1).
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub levels: Option<u32>,
    /// egarch or gjr
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub omega: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha2: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<f64>,
}

/// What a successful command did, for the exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    PartialFailure,
}

fn need<T>(v: Option<T>, flag: &str, kind: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::Config(format!("--{flag} is required for --kind {kind}")))
}

pub fn synth_spec(a: &SynthArgs) -> Result<GeneratorSpec, CliError> {
    let kind = match a.kind {
        SynthKind::Fgn => {
            GeneratorKind::Fgn { hurst: need(a.hurst, "hurst", "fgn")?, length: need(a.length, "length", "fgn")? }
        }
        SynthKind::Cascade => GeneratorKind::BinomialCascade {
            p: need(a.p, "p", "cascade")?,
            levels: need(a.levels, "levels", "cascade")?,
        },
        SynthKind::Iid => GeneratorKind::IidGaussian { length: need(a.length, "length", "iid")? },
        SynthKind::Garch => {
            let model: GarchModel = need(a.model.as_deref(), "model", "garch")?
                .parse()
                .map_err(|e: mfadcca_core::Error| CliError::Config(e.to_string()))?;
            GeneratorKind::GarchSim {
                model,
                params: GarchParams::new(
                    need(a.omega, "omega", "garch")?,
                    need(a.alpha1, "alpha1", "garch")?,
                    need(a.alpha2, "alpha2", "garch")?,
                    need(a.beta, "beta", "garch")?,
                ),
                length: need(a.length, "length", "garch")?,
            }
        }
    };
    let spec = GeneratorSpec::new(kind, a.seed);
    spec.validate().map_err(|e| CliError::Config(format!("invalid generator: {e}")))?;
    Ok(spec)
}

fn read_input(path: &Path) -> Result<IncrementSeries, CliError> {
    if !path.is_file() {
        return Err(CliError::Config(format!("input file not found: {}", path.display())));
    }
    read_series(path).map_err(|e| CliError::Config(e.to_string()))
}

fn read_pair(p: &PairArgs) -> Result<(IncrementSeries, IncrementSeries), CliError> {
    let x = read_input(&p.x)?;
    let y = read_input(&p.y)?;
    if x.len() != y.len() {
        return Err(CliError::Config(format!(
            "{} has {} values but {} has {}",
            p.x.display(),
            x.len(),
            p.y.display(),
            y.len()
        )));
    }
    Ok((x, y))
}

fn analysis<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Analysis(e.to_string())
}

fn write_tables(out: Option<&Path>, tables: Vec<(&str, Table)>) -> Result<(), CliError> {
    let Some(dir) = out else { return Ok(()) };
    std::fs::create_dir_all(dir).map_err(|e| CliError::Config(format!("cannot create {}: {e}", dir.display())))?;
    for (name, t) in tables {
        let path = dir.join(name);
        t.write(&path).map_err(|e| CliError::Analysis(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

/// Executes one command; human-readable results go to stdout.
pub fn run(cli: Cli) -> Result<Outcome, CliError> {
    match cli.command {
        Command::Analyze { config, out, seed, scales, q, level } => {
            let overrides = Overrides { output_dir: out, seed, scales, q, level };
            let cfg = RunConfig::load(&config, &overrides)?;
            let run = pipeline::run_pipeline(&cfg)?;
            let m = &run.manifest;
            for a in &m.assets {
                println!("{:<16} {}", a.name, if a.failed { "FAILED" } else { "ok" });
            }
            println!("manifest: {}", run.manifest_path.display());
            Ok(if m.failures > 0 { Outcome::PartialFailure } else { Outcome::Success })
        }
        Command::Synth(args) => {
            let spec = synth_spec(&args)?;
            let series = spec.generate().map_err(|e| CliError::Config(format!("invalid generator: {e}")))?;
            write_series(&args.out, &series).map_err(analysis)?;
            println!("wrote {} values to {}", series.len(), args.out.display());
            Ok(Outcome::Success)
        }
        Command::Describe { csv, out, kurtosis } => {
            let x = read_input(&csv)?;
            let stats = describe(&x, kurtosis.into()).map_err(analysis)?;
            let rows = vec![(x.source_id().to_string(), stats)];
            print!("{}", report::describe_text(&rows));
            write_tables(out.as_deref(), vec![("descriptive.csv", report::descriptive_table(&rows))])?;
            Ok(Outcome::Success)
        }
        Command::Qcc { pair, level, m_max } => {
            let (x, y) = read_pair(&pair)?;
            let m = pipeline::qcc_lags(x.len(), m_max);
            let r = qcc(x.values(), y.values(), m, level).map_err(analysis)?;
            print!("{}", report::qcc_text(&r));
            write_tables(pair.out.as_deref(), vec![("qcc.csv", report::qcc_table(&r))])?;
            Ok(Outcome::Success)
        }
        Command::Mfadcca { pair, scales, q, order } => {
            let (x, y) = read_pair(&pair)?;
            let cfg = MfadccaConfig {
                scales: scales.as_deref().map(parse_scale_grid).transpose().map_err(CliError::Config)?,
                qs: parse_q_grid(&q).map_err(CliError::Config)?,
                options: FluctuationOptions { order, ..FluctuationOptions::default() },
            };
            let r = analyze_values(x.values(), y.values(), &cfg).map_err(analysis)?;
            print!("{}", report::mf_text(&r));
            write_tables(
                pair.out.as_deref(),
                vec![
                    ("fluctuation.csv", report::fluctuation_table(&r)),
                    ("counts.csv", report::counts_table(&r)),
                    ("exponents.csv", report::exponents_table(&r)),
                    ("spectrum.csv", report::spectrum_table(&r)),
                    ("mfadcca_summary.csv", report::mf_summary_table(&r)),
                ],
            )?;
            Ok(Outcome::Success)
        }
        Command::Dcca { pair, scales } => {
            let (x, y) = read_pair(&pair)?;
            let grid = match scales {
                Some(s) => parse_scale_grid(&s).map_err(CliError::Config)?,
                None => ScaleGrid::coefficient_default(x.len()).map_err(analysis)?,
            };
            let c = rho_dcca_asym(x.values(), y.values(), &grid).map_err(analysis)?;
            print!("{}", report::dcca_text(&c));
            write_tables(pair.out.as_deref(), vec![("dcca.csv", report::dcca_table(&c))])?;
            Ok(Outcome::Success)
        }
        Command::Garch { returns, out } => {
            let r = read_input(&returns)?;
            let fits = [GarchModel::Egarch, GarchModel::Gjr]
                .into_iter()
                .map(|m| garch::fit(m, r.values()))
                .collect::<Result<Vec<_>, _>>()
                .map_err(analysis)?;
            print!("{}", report::garch_text(&fits));
            write_tables(
                out.as_deref(),
                vec![
                    ("garch_params.csv", report::garch_params_table(&fits)),
                    ("garch_fit.csv", report::garch_fit_table(&fits)),
                ],
            )?;
            Ok(Outcome::Success)
        }
    }
}
