//! `specsum`: generate test matrices, run spectral-sum estimators, sweep
//! parameters and run the acceptance suites.
//!
//! Exit status: 0 when every checked guarantee holds, 1 when an estimate
//! misses its guarantee or a suite fails, 2 on usage or precondition errors.
//! `SPECSUM_THREADS` sets the worker count.

mod commands;
mod manifest;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use specsum_core::matrix::SpectrumProfile;
use specsum_core::measurement::InnerProductMethod;
use specsum_core::qmodel::NoiseMode;
use specsum_core::sums::{AlgoConfig, Algorithm, EncodingKind, MonomialMode};
use specsum_core::verify::Suite;

use commands::Axis;
use manifest::{Command, Format, GeneratorSpec, MatrixSource, RunManifest};

#[derive(Parser)]
#[command(name = "specsum", version, about = "Spectral-sum estimators under an emulated quantum cost model")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write a random SPD matrix (Matrix Market) and a JSON sidecar with its exact spectral sums.
    Gen {
        #[command(flatten)]
        spec: GenArgs,
        /// Output .mtx path; the sidecar goes next to it with a .json extension.
        #[arg(long, default_value = "matrix.mtx")]
        out: PathBuf,
    },
    /// Run one estimator and print its report.
    Estimate {
        /// Read the whole run description from a JSON manifest instead of flags.
        #[arg(long, conflicts_with_all = ["matrix", "algorithm"])]
        manifest: Option<PathBuf>,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value_t = 1024)]
        exact_cap: usize,
    },
    /// Run an estimator over a grid of one parameter and seeds; writes CSV rows and a log-log fit.
    Sweep {
        #[arg(long, value_enum)]
        axis: Axis,
        /// Comma-separated axis values.
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        values: Vec<f64>,
        /// Comma-separated algorithm seeds.
        #[arg(long, value_delimiter = ',', default_value = "1")]
        seeds: Vec<u64>,
        #[command(flatten)]
        run: RunArgs,
        /// Where to write the fit summary (JSON); stderr when absent.
        #[arg(long)]
        fit_output: Option<PathBuf>,
        #[arg(long, default_value_t = 1024)]
        exact_cap: usize,
    },
    /// Run an acceptance suite and print one line per criterion.
    Verify {
        #[arg(long, default_value = "all")]
        suite: Suite,
    },
}

#[derive(Args, Clone)]
struct GenArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    kappa: f64,
    #[arg(long, default_value = "log-uniform")]
    profile: SpectrumProfile,
    #[arg(long, default_value_t = 0.5)]
    norm: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Rescale to unit trace (for the entropy).
    #[arg(long)]
    unit_trace: bool,
}

impl From<&GenArgs> for GeneratorSpec {
    fn from(g: &GenArgs) -> Self {
        Self { n: g.n, kappa: g.kappa, profile: g.profile, norm: g.norm, seed: g.seed, unit_trace: g.unit_trace }
    }
}

#[derive(Args, Clone)]
struct RunArgs {
    /// Matrix Market input; otherwise a matrix is generated from --n/--kappa.
    #[arg(long)]
    matrix: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    kappa: Option<f64>,
    #[arg(long, default_value = "log-uniform")]
    profile: SpectrumProfile,
    #[arg(long, default_value_t = 0.5)]
    norm: f64,
    #[arg(long, default_value_t = 1)]
    gen_seed: u64,
    #[arg(long)]
    unit_trace: bool,

    /// logdet-svt, logdet-sve, logdet-taylor, logdet-chebyshev, logdet-qmc,
    /// schatten-p, vn-entropy, trace-inverse, or a classical-* baseline.
    #[arg(long)]
    algorithm: Option<String>,
    /// Schatten order.
    #[arg(long)]
    p: Option<u32>,
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    #[arg(long, default_value = "exact")]
    mode: NoiseMode,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, value_parser = parse_encoding)]
    encoding: Option<EncodingKind>,
    /// Use the approximate monomial in the Schatten estimator.
    #[arg(long)]
    approx_monomial: bool,
    #[arg(long, value_parser = parse_inner_product)]
    inner_product: Option<InnerProductMethod>,
    /// Known condition-number bound.
    #[arg(long)]
    kappa_bound: Option<f64>,
    /// Probe count for the classical baselines.
    #[arg(long)]
    probes: Option<usize>,

    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

fn parse_encoding(s: &str) -> Result<EncodingKind, String> {
    match s {
        "qram" => Ok(EncodingKind::Qram),
        "unit" => Ok(EncodingKind::Unit),
        "purification" => Ok(EncodingKind::Purification),
        _ => Err(format!("unknown encoding '{s}' (qram, unit, purification)")),
    }
}

fn parse_inner_product(s: &str) -> Result<InnerProductMethod, String> {
    match s {
        "amplitude-estimation" => Ok(InnerProductMethod::AmplitudeEstimation),
        "hadamard-sampling" => Ok(InnerProductMethod::HadamardSampling),
        _ => Err(format!("unknown inner-product method '{s}' (amplitude-estimation, hadamard-sampling)")),
    }
}

impl RunArgs {
    fn manifest(&self, command: Command) -> Result<RunManifest> {
        let source = match (&self.matrix, self.n, self.kappa) {
            (Some(p), _, _) => MatrixSource::Path(p.clone()),
            (None, Some(n), Some(kappa)) => MatrixSource::Generator(GeneratorSpec {
                n,
                kappa,
                profile: self.profile,
                norm: self.norm,
                seed: self.gen_seed,
                unit_trace: self.unit_trace,
            }),
            _ => anyhow::bail!("give --matrix, or --n and --kappa to generate one"),
        };
        let name = self.algorithm.as_deref().context("--algorithm is required")?;
        let mut cfg = AlgoConfig::new(Algorithm::from_name(name, self.p)?, self.eps, self.delta, self.mode, self.seed);
        if let Some(e) = self.encoding {
            cfg.encoding = e;
        }
        if self.approx_monomial {
            cfg.monomial = MonomialMode::Approximate;
        }
        cfg.inner_product = self.inner_product;
        cfg.kappa_bound = self.kappa_bound;
        cfg.probes = self.probes;
        Ok(RunManifest { command, matrix_source: source, algorithm: cfg, output_path: self.output.clone(), format: self.format })
    }
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("SPECSUM_THREADS") {
        let n: usize = v.trim().parse().with_context(|| format!("SPECSUM_THREADS must be a positive integer, got '{v}'"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("configuring the thread pool")?;
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<commands::Status> {
    configure_threads()?;
    match cli.command {
        Cmd::Gen { spec, out } => {
            let spec = GeneratorSpec::from(&spec);
            spec.validate()?;
            commands::gen(&spec, &out)
        }
        Cmd::Estimate { manifest, run, exact_cap } => {
            let m = match manifest {
                Some(p) => RunManifest::read(&p)?,
                None => run.manifest(Command::Estimate)?,
            };
            commands::estimate(&m, exact_cap)
        }
        Cmd::Sweep { axis, values, seeds, run, fit_output, exact_cap } => {
            commands::sweep(&run.manifest(Command::Sweep)?, axis, &values, &seeds, exact_cap, fit_output.as_deref())
        }
        Cmd::Verify { suite } => commands::verify(suite),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
