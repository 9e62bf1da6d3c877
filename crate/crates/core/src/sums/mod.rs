//! Spectral-sum estimators assembled from the emulated primitives.
//!
//! Every estimator returns a [`SpectralSumReport`] carrying the estimate, the
//! exact value from the eigendecomposition, the guarantee it promises, the
//! derived parameters, and the query ledger.

mod logdet_variants;
mod entropy;
mod inverse;
mod logdet;
mod schatten;
mod zhao;

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::baselines;
use crate::error::{domain, invalid, Result};
use crate::ledger::CostLedger;
use crate::matrix::{SpectralData, SymmetricMatrix, MU_GRID_POINTS};
use crate::measurement::{Estimate, InnerProductMethod};
use crate::poly::{self, ChebyshevSeries};
use crate::qmodel::{NoiseMode, SveMode};

pub use logdet_variants::{logdet_chebyshev, logdet_qmc, logdet_sve, logdet_taylor, qmc_variance_bound, VarianceCheck};
pub use entropy::vn_entropy;
pub use inverse::trace_inverse;
pub use logdet::{logdet, logdet_edge_cases, logdet_svt};
pub use schatten::schatten_p;
pub use zhao::{zhao_rounded_logdet, zhao_variance, RoundingCorrelation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum Algorithm {
    LogdetSvt,
    LogdetSve,
    LogdetTaylor,
    LogdetChebyshev,
    LogdetQmc,
    SchattenP { p: u32 },
    VnEntropy,
    TraceInverse,
    ClassicalLogdetTaylor,
    ClassicalLogdetChebyshev,
    ClassicalSchattenP { p: u32 },
    ClassicalEntropy,
    ClassicalTraceInverse,
}

impl Algorithm {
    pub const QUANTUM: [&'static str; 8] =
        ["logdet-svt", "logdet-sve", "logdet-taylor", "logdet-chebyshev", "logdet-qmc", "schatten-p", "vn-entropy", "trace-inverse"];

    /// Parses a kebab-case name; `p` is required for the Schatten variants.
    pub fn from_name(name: &str, p: Option<u32>) -> Result<Self> {
        let need_p = || p.filter(|&v| v >= 1).ok_or_else(|| invalid("Schatten norms need an integer p >= 1"));
        Ok(match name.replace('_', "-").as_str() {
            "logdet-svt" => Self::LogdetSvt,
            "logdet-sve" => Self::LogdetSve,
            "logdet-taylor" => Self::LogdetTaylor,
            "logdet-chebyshev" => Self::LogdetChebyshev,
            "logdet-qmc" => Self::LogdetQmc,
            "schatten-p" => Self::SchattenP { p: need_p()? },
            "vn-entropy" => Self::VnEntropy,
            "trace-inverse" => Self::TraceInverse,
            "classical-logdet-taylor" => Self::ClassicalLogdetTaylor,
            "classical-logdet-chebyshev" => Self::ClassicalLogdetChebyshev,
            "classical-schatten-p" => Self::ClassicalSchattenP { p: need_p()? },
            "classical-entropy" => Self::ClassicalEntropy,
            "classical-trace-inverse" => Self::ClassicalTraceInverse,
            other => return Err(invalid(format!("unknown algorithm '{other}'"))),
        })
    }

    pub fn name(&self) -> String {
        match self {
            Self::LogdetSvt => "logdet-svt".into(),
            Self::LogdetSve => "logdet-sve".into(),
            Self::LogdetTaylor => "logdet-taylor".into(),
            Self::LogdetChebyshev => "logdet-chebyshev".into(),
            Self::LogdetQmc => "logdet-qmc".into(),
            Self::SchattenP { p } => format!("schatten-p{p}"),
            Self::VnEntropy => "vn-entropy".into(),
            Self::TraceInverse => "trace-inverse".into(),
            Self::ClassicalLogdetTaylor => "classical-logdet-taylor".into(),
            Self::ClassicalLogdetChebyshev => "classical-logdet-chebyshev".into(),
            Self::ClassicalSchattenP { p } => format!("classical-schatten-p{p}"),
            Self::ClassicalEntropy => "classical-entropy".into(),
            Self::ClassicalTraceInverse => "classical-trace-inverse".into(),
        }
    }

    pub fn is_logdet(&self) -> bool {
        matches!(
            self,
            Self::LogdetSvt
                | Self::LogdetSve
                | Self::LogdetTaylor
                | Self::LogdetChebyshev
                | Self::LogdetQmc
                | Self::ClassicalLogdetTaylor
                | Self::ClassicalLogdetChebyshev
        )
    }
}

/// Where the block-encoding of the input comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum EncodingKind {
    /// `(μ, log n, 0)` from quantum access to the entries.
    #[default]
    Qram,
    /// `(1, ·, ε₁)` with `ε₁` chosen to meet the estimator's requirement.
    Unit,
    /// `(1, ·, 0)` from a purification (density matrices only).
    Purification,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum MonomialMode {
    #[default]
    Exact,
    Approximate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgoConfig {
    pub algorithm: Algorithm,
    pub eps: f64,
    pub delta: f64,
    pub mode: NoiseMode,
    pub seed: u64,
    /// Defaults to the SVE mode matching `mode`.
    #[serde(default)]
    pub sve_mode: Option<SveMode>,
    #[serde(default)]
    pub encoding: EncodingKind,
    #[serde(default)]
    pub monomial: MonomialMode,
    /// Defaults to amplitude estimation, except for the Chebyshev log-det
    /// which samples Hadamard tests.
    #[serde(default)]
    pub inner_product: Option<InnerProductMethod>,
    /// Known `κ` with `σ_min ≥ 1/κ`; defaults to `1/σ_min`.
    #[serde(default)]
    pub kappa_bound: Option<f64>,
    #[serde(default = "default_mu_grid")]
    pub mu_grid: usize,
    /// Error of each SVT circuit beyond the polynomial's own.
    #[serde(default = "default_nu")]
    pub nu: f64,
    /// Probe count for the classical baselines; defaults to the Hutchinson
    /// bound for `(eps, delta)`.
    #[serde(default)]
    pub probes: Option<usize>,
}

fn default_mu_grid() -> usize {
    MU_GRID_POINTS
}

fn default_nu() -> f64 {
    1e-12
}

impl AlgoConfig {
    pub fn new(algorithm: Algorithm, eps: f64, delta: f64, mode: NoiseMode, seed: u64) -> Self {
        Self {
            algorithm,
            eps,
            delta,
            mode,
            seed,
            sve_mode: None,
            encoding: EncodingKind::default(),
            monomial: MonomialMode::default(),
            inner_product: None,
            kappa_bound: None,
            mu_grid: MU_GRID_POINTS,
            nu: default_nu(),
            probes: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(invalid(format!("eps must lie in (0, 1), got {}", self.eps)));
        }
        if !(self.delta > 0.0 && self.delta < 0.5) {
            return Err(invalid(format!("delta must lie in (0, 1/2), got {}", self.delta)));
        }
        if self.mu_grid < 2 {
            return Err(invalid("mu grid needs at least 2 points"));
        }
        Ok(())
    }

    pub fn sve(&self) -> SveMode {
        self.sve_mode.unwrap_or_else(|| self.mode.into())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GuaranteeKind {
    Relative,
    Absolute,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralSumReport {
    pub algorithm: String,
    pub n: usize,
    pub estimate: Estimate,
    pub exact: f64,
    pub error: f64,
    pub guarantee: GuaranteeKind,
    /// Relative: the `ε`; absolute: the error bound itself.
    pub guarantee_eps: f64,
    /// The promised bound on `|estimate − exact|`.
    pub guarantee_bound: f64,
    pub within_guarantee: bool,
    pub parameters: BTreeMap<String, f64>,
    pub notes: Vec<String>,
    pub ledger: CostLedger,
    /// Product of the logarithmic factors in the estimator's cost.
    pub polylog_factor: f64,
    /// `ledger.queries / polylog_factor`.
    pub soft_queries: f64,
}

/// What an estimator promises before the exact value is known.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Guarantee {
    Relative(f64),
    Absolute(f64),
}

pub(crate) struct Outcome {
    pub estimate: Estimate,
    pub guarantee: Guarantee,
    pub parameters: BTreeMap<String, f64>,
    pub notes: Vec<String>,
    pub polylog: f64,
}

impl Outcome {
    pub fn new(estimate: Estimate, guarantee: Guarantee) -> Self {
        Self { estimate, guarantee, parameters: BTreeMap::new(), notes: vec![], polylog: 1.0 }
    }

    pub fn param(&mut self, key: &str, v: f64) -> &mut Self {
        self.parameters.insert(key.to_string(), v);
        self
    }

    pub fn into_report(self, algorithm: String, n: usize, exact: f64) -> SpectralSumReport {
        let error = (self.estimate.value - exact).abs();
        let (guarantee, guarantee_eps, bound) = match self.guarantee {
            Guarantee::Relative(e) => (GuaranteeKind::Relative, e, e * exact.abs()),
            Guarantee::Absolute(b) => (GuaranteeKind::Absolute, b, b),
        };
        let ledger = self.estimate.ledger.clone();
        let polylog = self.polylog.max(1.0);
        SpectralSumReport {
            algorithm,
            n,
            exact,
            error,
            guarantee,
            guarantee_eps,
            guarantee_bound: bound,
            within_guarantee: error <= bound,
            soft_queries: ledger.queries / polylog,
            polylog_factor: polylog,
            parameters: self.parameters,
            notes: self.notes,
            ledger,
            estimate: self.estimate,
        }
    }
}

// ---------------------------------------------------------------------------
// Shared helpers

/// `σ_min` and the `κ` used inside the algorithms: the caller's bound if
/// given, otherwise `1/σ_min`, which keeps `[1/κ, 1]` around the spectrum of
/// a contraction.
pub(crate) fn spectral_floor(spec: &SpectralData, cfg: &AlgoConfig) -> Result<(f64, f64)> {
    let smin = *spec.singular_values.last().expect("n >= 1");
    if smin <= 0.0 {
        return Err(domain("matrix is singular"));
    }
    let kappa = match cfg.kappa_bound {
        Some(k) => {
            if smin < (1.0 / k) * (1.0 - 1e-12) {
                return Err(domain(format!("smallest singular value {smin:e} is below the declared 1/kappa = {:e}", 1.0 / k)));
            }
            k
        }
        None => 1.0 / smin,
    };
    Ok((smin, kappa))
}

/// Requires positive-definite input.
pub(crate) fn require_spd(spec: &SpectralData) -> Result<()> {
    let lmin = *spec.eigenvalues.last().expect("n >= 1");
    if lmin <= 0.0 {
        return Err(domain(format!("matrix is not positive definite (smallest eigenvalue {lmin:e})")));
    }
    Ok(())
}

/// Per-dimension error budget for log-det: `log(1/‖A‖)`, or 1 with an
/// absolute guarantee when `‖A‖` is too close to 1 for the relative
/// conversion.
pub(crate) fn logdet_budget(norm: f64) -> (f64, bool) {
    if 1.0 - norm < 1e-6 {
        (1.0, true)
    } else {
        (-norm.ln(), false)
    }
}

pub(crate) fn logdet_guarantee(eps: f64, n: usize, absolute: bool) -> Guarantee {
    if absolute {
        Guarantee::Absolute(eps * n as f64)
    } else {
        Guarantee::Relative(eps)
    }
}

/// Largest `x` in `[1e-14, 1]` with `bound(x) ≤ target`, for `bound`
/// increasing in `x`.
pub(crate) fn calibrate(target: f64, bound: impl Fn(f64) -> f64) -> Result<f64> {
    let (mut lo, mut hi) = (1e-14f64, 1.0f64);
    if bound(hi) <= target {
        return Ok(hi);
    }
    if !(bound(lo) <= target) {
        return Err(domain(format!("no precision meets the error budget {target:e}")));
    }
    for _ in 0..100 {
        let mid = (lo * hi).sqrt();
        if bound(mid) <= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Rounds down to the grid `2^{-k/steps}`.
pub(crate) fn quantize_down(x: f64, steps: f64) -> f64 {
    let k = (-x.log2() * steps).ceil();
    let q = 2f64.powf(-k / steps);
    if q > x { 2f64.powf(-(k + 1.0) / steps) } else { q }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub(crate) enum SeriesKind {
    Log,
    Inverse,
}

type SeriesCache = Mutex<HashMap<(SeriesKind, u64, u64), Arc<ChebyshevSeries>>>;

fn series_cache() -> &'static SeriesCache {
    static CACHE: OnceLock<SeriesCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Memoised constructor; parameters should already be quantized so that
/// nearby requests share a series.
pub(crate) fn cached_series(kind: SeriesKind, param: f64, eps: f64) -> Result<Arc<ChebyshevSeries>> {
    let key = (kind, param.to_bits(), eps.to_bits());
    if let Some(s) = series_cache().lock().expect("cache lock").get(&key) {
        return Ok(s.clone());
    }
    let built = Arc::new(match kind {
        SeriesKind::Log => poly::approx_log(param, eps)?,
        SeriesKind::Inverse => poly::approx_inverse(param, eps)?,
    });
    series_cache().lock().expect("cache lock").insert(key, built.clone());
    Ok(built)
}

/// Exact value of the quantity `algorithm` estimates.
pub fn exact_value(a: &SymmetricMatrix, algorithm: Algorithm) -> Result<f64> {
    use crate::matrix::{exact_spectral_sum, schatten_norm, SpectralFunction};
    match algorithm {
        Algorithm::SchattenP { p } | Algorithm::ClassicalSchattenP { p } => schatten_norm(a, p as f64),
        Algorithm::VnEntropy | Algorithm::ClassicalEntropy => exact_spectral_sum(a, SpectralFunction::NegXLogX),
        Algorithm::TraceInverse | Algorithm::ClassicalTraceInverse => exact_spectral_sum(a, SpectralFunction::Inverse),
        _ => exact_spectral_sum(a, SpectralFunction::Log),
    }
}

/// Runs the configured algorithm. Log-det through SVT is routed to the
/// edge-case handler when `‖A‖ ≥ 1`.
pub fn run(a: &SymmetricMatrix, cfg: &AlgoConfig) -> Result<SpectralSumReport> {
    cfg.validate()?;
    match cfg.algorithm {
        Algorithm::LogdetSvt => logdet(a, cfg),
        Algorithm::LogdetSve => logdet_sve(a, cfg),
        Algorithm::LogdetTaylor => logdet_taylor(a, cfg),
        Algorithm::LogdetChebyshev => logdet_chebyshev(a, cfg),
        Algorithm::LogdetQmc => logdet_qmc(a, cfg),
        Algorithm::SchattenP { p } => schatten_p(a, p, cfg),
        Algorithm::VnEntropy => vn_entropy(a, cfg),
        Algorithm::TraceInverse => trace_inverse(a, cfg),
        Algorithm::ClassicalLogdetTaylor
        | Algorithm::ClassicalLogdetChebyshev
        | Algorithm::ClassicalSchattenP { .. }
        | Algorithm::ClassicalEntropy
        | Algorithm::ClassicalTraceInverse => baselines::run_classical(a, cfg),
    }
}
