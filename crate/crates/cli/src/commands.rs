use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde::Serialize;
use specsum_core::fit::{loglog_fit, FitSummary};
use specsum_core::matrix::{exact_spectral_sum, schatten_norm, SpectralFunction, SymmetricMatrix};
use specsum_core::mtx::write_matrix_market;
use specsum_core::output::to_json;
use specsum_core::sums::{run, AlgoConfig, Algorithm};
use specsum_core::verify::{run_suite, Suite};

use crate::manifest::{Format, GeneratorSpec, MatrixSource, RunManifest};
use crate::report::{write_csv, Rendered};

/// Process exit status: 0 all guarantees met, 1 some estimate outside its
/// guarantee, 2 usage or precondition error.
pub type Status = u8;

// ---------------------------------------------------------------------------
// gen

#[derive(Serialize)]
struct ExactSums {
    logdet: Option<f64>,
    trace_inverse: Option<f64>,
    trace: f64,
    frobenius_norm: f64,
    schatten_1: f64,
    schatten_2: f64,
    schatten_3: f64,
    schatten_4: f64,
    /// Only for unit-trace input.
    von_neumann_entropy: Option<f64>,
}

#[derive(Serialize)]
struct Sidecar<'a> {
    generator: &'a GeneratorSpec,
    matrix_file: String,
    n: usize,
    eigenvalues: Vec<f64>,
    spectral_norm: f64,
    kappa: f64,
    mu: f64,
    exact: ExactSums,
}

pub fn sidecar_path(mtx: &Path) -> PathBuf {
    mtx.with_extension("json")
}

pub fn gen(spec: &GeneratorSpec, out: &Path) -> Result<Status> {
    let a = spec.build()?;
    write_matrix_market(out, &a).with_context(|| format!("writing {}", out.display()))?;
    let spd = a.min_eigenvalue()? > 0.0;
    let trace = a.trace();
    let stats = a.stats(specsum_core::matrix::MU_GRID_POINTS)?;
    let exact = ExactSums {
        logdet: spd.then(|| exact_spectral_sum(&a, SpectralFunction::Log)).transpose()?,
        trace_inverse: spd.then(|| exact_spectral_sum(&a, SpectralFunction::Inverse)).transpose()?,
        trace,
        frobenius_norm: a.frobenius_norm(),
        schatten_1: schatten_norm(&a, 1.0)?,
        schatten_2: schatten_norm(&a, 2.0)?,
        schatten_3: schatten_norm(&a, 3.0)?,
        schatten_4: schatten_norm(&a, 4.0)?,
        von_neumann_entropy: ((trace - 1.0).abs() < 1e-10).then(|| exact_spectral_sum(&a, SpectralFunction::NegXLogX)).transpose()?,
    };
    let car = Sidecar {
        generator: spec,
        matrix_file: out.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default(),
        n: a.dim(),
        eigenvalues: a.spectral()?.eigenvalues.clone(),
        spectral_norm: stats.spectral_norm,
        kappa: stats.kappa,
        mu: stats.mu,
        exact,
    };
    let path = sidecar_path(out);
    std::fs::write(&path, to_json(&car)? + "\n").with_context(|| format!("writing {}", path.display()))?;
    Ok(0)
}

// ---------------------------------------------------------------------------
// estimate

fn emit(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

pub fn estimate(m: &RunManifest, exact_cap: usize) -> Result<Status> {
    m.validate()?;
    let a = m.matrix_source.load()?;
    let report = run(&a, &m.algorithm)?;
    let rendered = Rendered { report: &report, cfg: &m.algorithm, exact_shown: a.dim() <= exact_cap };
    let text = match m.format {
        Format::Json => rendered.json()? + "\n",
        Format::Csv => {
            let mut buf = vec![];
            write_csv(&mut buf, &[rendered.csv_row("", None)])?;
            String::from_utf8(buf)?
        }
    };
    emit(m.output_path.as_deref(), &text)?;
    Ok(match rendered.verdict() {
        Some(false) => 1,
        _ => 0,
    })
}

// ---------------------------------------------------------------------------
// sweep

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    Eps,
    Kappa,
    N,
    P,
}

impl Axis {
    fn name(&self) -> &'static str {
        match self {
            Self::Eps => "eps",
            Self::Kappa => "kappa",
            Self::N => "n",
            Self::P => "p",
        }
    }

    /// The fit abscissa: `1/ε` for the accuracy axis, the value otherwise.
    fn abscissa(&self, v: f64) -> f64 {
        if *self == Self::Eps {
            1.0 / v
        } else {
            v
        }
    }
}

#[derive(Serialize)]
pub struct SweepFit {
    pub axis: Axis,
    pub abscissa: String,
    pub queries: FitSummary,
    pub soft_queries: FitSummary,
}

fn generator_of(s: &mut MatrixSource, axis: Axis) -> Result<&mut GeneratorSpec> {
    match s {
        MatrixSource::Generator(g) => Ok(g),
        MatrixSource::Path(_) => bail!("sweeping {} needs a generated matrix, not a file", axis.name()),
    }
}

/// The matrix and configuration of one sweep cell.
fn cell(base: &RunManifest, axis: Axis, value: f64, seed: u64) -> Result<(MatrixSource, AlgoConfig)> {
    let mut cfg = base.algorithm.clone();
    cfg.seed = seed;
    let mut source = base.matrix_source.clone();
    match axis {
        Axis::Eps => cfg.eps = value,
        Axis::Kappa => generator_of(&mut source, axis)?.kappa = value,
        Axis::N => {
            if value.fract() != 0.0 || value < 2.0 {
                bail!("n values must be integers >= 2, got {value}");
            }
            generator_of(&mut source, axis)?.n = value as usize;
        }
        Axis::P => {
            if value.fract() != 0.0 || value < 1.0 {
                bail!("p values must be integers >= 1, got {value}");
            }
            let p = value as u32;
            cfg.algorithm = match cfg.algorithm {
                Algorithm::SchattenP { .. } => Algorithm::SchattenP { p },
                Algorithm::ClassicalSchattenP { .. } => Algorithm::ClassicalSchattenP { p },
                other => bail!("sweeping p needs a Schatten algorithm, got {}", other.name()),
            };
        }
    }
    Ok((source, cfg))
}

pub fn sweep(base: &RunManifest, axis: Axis, values: &[f64], seeds: &[u64], exact_cap: usize, fit_path: Option<&Path>) -> Result<Status> {
    if values.is_empty() {
        bail!("sweep needs at least one value");
    }
    if seeds.is_empty() {
        bail!("sweep needs at least one seed");
    }
    base.validate()?;
    let mut values = values.to_vec();
    values.sort_by(f64::total_cmp);
    let mut seeds = seeds.to_vec();
    seeds.sort_unstable();
    let cells: Vec<(f64, u64)> = values.iter().flat_map(|&v| seeds.iter().map(move |&s| (v, s))).collect();
    // parallel across cells; collect keeps the canonical (value, seed) order
    let runs: Vec<(f64, AlgoConfig, specsum_core::sums::SpectralSumReport)> = cells
        .par_iter()
        .map(|&(v, s)| {
            let (source, cfg) = cell(base, axis, v, s)?;
            cfg.validate()?;
            let a: SymmetricMatrix = source.load()?;
            let r = run(&a, &cfg).with_context(|| format!("{} = {v}, seed {s}", axis.name()))?;
            Ok((v, cfg, r))
        })
        .collect::<Result<_>>()?;

    let mut rows = vec![];
    let mut status = 0;
    for (v, cfg, r) in &runs {
        let rendered = Rendered { report: r, cfg, exact_shown: r.n <= exact_cap };
        if rendered.verdict() == Some(false) {
            status = 1;
        }
        rows.push(rendered.csv_row(axis.name(), Some(*v)));
    }
    let mut buf = vec![];
    write_csv(&mut buf, &rows)?;
    emit(base.output_path.as_deref(), &String::from_utf8(buf)?)?;

    let xs: Vec<f64> = runs.iter().map(|(v, _, _)| axis.abscissa(*v)).collect();
    let q: Vec<f64> = runs.iter().map(|(_, _, r)| r.ledger.queries).collect();
    let soft: Vec<f64> = runs.iter().map(|(_, _, r)| r.soft_queries).collect();
    let fit = SweepFit {
        axis,
        abscissa: if axis == Axis::Eps { "1/eps".into() } else { axis.name().into() },
        queries: loglog_fit(&xs, &q),
        soft_queries: loglog_fit(&xs, &soft),
    };
    let text = to_json(&fit)? + "\n";
    match fit_path {
        Some(p) => std::fs::write(p, &text).with_context(|| format!("writing {}", p.display()))?,
        None => eprint!("{text}"),
    }
    Ok(status)
}

// ---------------------------------------------------------------------------
// verify

pub fn verify(suite: Suite) -> Result<Status> {
    let mut status = 0;
    for r in run_suite(suite) {
        println!("{}", r.line());
        if !r.passed {
            status = 1;
        }
    }
    Ok(status)
}
