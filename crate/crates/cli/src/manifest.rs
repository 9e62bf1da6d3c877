//! Run manifests: where the matrix comes from and how to estimate on it.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use specsum_core::matrix::{generate_spd, SpectrumProfile, SymmetricMatrix};
use specsum_core::mtx::load_matrix_market;
use specsum_core::sums::AlgoConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Estimate,
    Sweep,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub n: usize,
    pub kappa: f64,
    pub profile: SpectrumProfile,
    pub norm: f64,
    pub seed: u64,
    /// Rescale to unit trace after generation (density matrices).
    #[serde(default)]
    pub unit_trace: bool,
}

impl GeneratorSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            bail!("generator: n must be at least 2, got {}", self.n);
        }
        if !(self.kappa >= 1.0 && self.kappa.is_finite()) {
            bail!("generator: kappa must be a finite number >= 1, got {}", self.kappa);
        }
        if !(self.norm > 0.0 && self.norm <= 1.0) {
            bail!("generator: norm must lie in (0, 1], got {}", self.norm);
        }
        Ok(())
    }

    pub fn build(&self) -> Result<SymmetricMatrix> {
        self.validate()?;
        let a = generate_spd(self.n, self.kappa, self.profile, self.norm, self.seed)?;
        Ok(if self.unit_trace { a.scaled(1.0 / a.trace()) } else { a })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatrixSource {
    Path(PathBuf),
    Generator(GeneratorSpec),
}

impl MatrixSource {
    pub fn load(&self) -> Result<SymmetricMatrix> {
        match self {
            Self::Path(p) => load_matrix_market(p).with_context(|| format!("reading {}", p.display())),
            Self::Generator(g) => g.build(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: Command,
    pub matrix_source: MatrixSource,
    pub algorithm: AlgoConfig,
    #[serde(default)]
    pub output_path: Option<PathBuf>,
    #[serde(default = "default_format")]
    pub format: Format,
}

fn default_format() -> Format {
    Format::Json
}

impl RunManifest {
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading manifest {}", path.display()))?;
        let m: Self = serde_json::from_str(&text).with_context(|| format!("parsing manifest {}", path.display()))?;
        m.validate()?;
        Ok(m)
    }

    /// Checks everything that can be checked before any computation.
    pub fn validate(&self) -> Result<()> {
        if let MatrixSource::Generator(g) = &self.matrix_source {
            g.validate()?;
        }
        self.algorithm.validate()?;
        if let Some(p) = &self.output_path {
            let dir = p.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
            if !dir.is_dir() {
                bail!("output directory {} does not exist", dir.display());
            }
        }
        Ok(())
    }
}
