//! Bounded Chebyshev approximations consumed by singular value
//! transformation, and the truncated log-det expansions.
//!
//! Targets with a singularity below their domain are first extended past the
//! cutoff with a Gaussian-smoothed maximum, `x ↦ c + w·G((x − c)/w)` with
//! `G(u) = uΦ(u) + φ(u)`. `G(u) ≥ max(u, 0)`, so the extension never dips
//! below the floor `c` and the extended target stays bounded on all of
//! `[−1, 1]`. The extension is interpolated at Chebyshev nodes and the result
//! is certified on a uniform grid; the degree is escalated until both the
//! domain error and the global bound pass, then bisected back down to the
//! smallest passing degree.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;
use statrs::function::factorial::ln_binomial;

use crate::error::{invalid, Error, Result};

/// Certification grid size used by the constructors.
pub const CERT_GRID: usize = 10_000;

/// Ceiling on `max |P|` over `[−1, 1]` for series fed to SVT, kept a hair
/// under 1/2 so round-off can't push it over.
pub const SVT_GLOBAL_LIMIT: f64 = 0.4995;

/// Fraction of the requested error the grid certificate must meet.
const CERT_MARGIN: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const FULL: Interval = Interval { lo: -1.0, hi: 1.0 };

    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn grid(&self, points: usize) -> impl IndexedParallelIterator<Item = f64> + '_ {
        let step = if points > 1 { (self.hi - self.lo) / (points - 1) as f64 } else { 0.0 };
        (0..points).into_par_iter().map(move |k| if k + 1 == points { self.hi } else { self.lo + step * k as f64 })
    }
}

/// What a series approximates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SeriesTarget {
    /// `ln(x) / (2 ln(2/β))` on `[β, 1]`.
    Log { beta: f64 },
    /// `3δ / (8x)` on `[−1, −δ] ∪ [δ, 1]`.
    Inverse { delta: f64 },
    /// `√x / 3` on `[β, 1]`.
    Sqrt { beta: f64 },
    /// `scale · x^s` on `[−1, 1]`.
    Monomial { s: u32, scale: f64 },
    /// `−x ln(x) / (2 ln(2/β))` on `[β, 1]`.
    Entropy { beta: f64 },
    /// `Σ c_j T_j` given directly.
    Explicit,
}

impl SeriesTarget {
    pub fn value(&self, x: f64) -> f64 {
        match *self {
            SeriesTarget::Log { beta } => x.ln() / (2.0 * (2.0 / beta).ln()),
            SeriesTarget::Inverse { delta } => 3.0 * delta / (8.0 * x),
            SeriesTarget::Sqrt { .. } => x.sqrt() / 3.0,
            SeriesTarget::Monomial { s, scale } => scale * x.powi(s as i32),
            SeriesTarget::Entropy { beta } => -x * x.ln() / (2.0 * (2.0 / beta).ln()),
            SeriesTarget::Explicit => f64::NAN,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChebyshevSeries {
    pub degree: usize,
    pub coefficients: Vec<f64>,
    pub target: SeriesTarget,
    pub certified_sup_error: f64,
    pub certified_on: Vec<Interval>,
    pub global_bound: f64,
    /// The lemma's asymptotic degree expression, e.g. `(1/β) ln(1/ε)`.
    pub lemma_degree: f64,
    /// `degree / lemma_degree`.
    pub degree_constant: f64,
}

impl ChebyshevSeries {
    /// A series with no certification attached.
    pub fn from_coefficients(coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(invalid("a series needs at least one coefficient"));
        }
        let global_bound = global_max(&coefficients, CERT_GRID);
        Ok(Self {
            degree: coefficients.len() - 1,
            coefficients,
            target: SeriesTarget::Explicit,
            certified_sup_error: 0.0,
            certified_on: vec![],
            global_bound,
            lemma_degree: 0.0,
            degree_constant: 0.0,
        })
    }

    /// Unchecked Clenshaw evaluation.
    pub fn value(&self, x: f64) -> f64 {
        clenshaw(&self.coefficients, x)
    }

    /// Largest deviation from the target over `points` grid points per
    /// certified interval.
    pub fn measured_error(&self, points: usize) -> f64 {
        domain_error(&self.coefficients, &|x| self.target.value(x), &self.certified_on, points)
    }

    pub fn measured_global_bound(&self, points: usize) -> f64 {
        global_max(&self.coefficients, points)
    }
}

/// `Σ c_j T_j(x)`; errors outside `[−1, 1]`.
pub fn eval_series(p: &ChebyshevSeries, x: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&x) {
        return Err(invalid(format!("series evaluated at {x}, outside [-1, 1]")));
    }
    Ok(p.value(x))
}

pub fn clenshaw(coeffs: &[f64], x: f64) -> f64 {
    let (mut b1, mut b2) = (0.0, 0.0);
    for &c in coeffs.iter().skip(1).rev() {
        let b0 = c + 2.0 * x * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    coeffs.first().copied().unwrap_or(0.0) + x * b1 - b2
}

/// Interpolant of `f` at the `degree + 1` Chebyshev points of the first kind.
pub fn chebyshev_interpolant(f: &(dyn Fn(f64) -> f64 + Sync), degree: usize) -> Vec<f64> {
    let n = degree + 1;
    let period = 4 * n;
    let cos_table: Vec<f64> = (0..period).map(|m| (std::f64::consts::PI * m as f64 / (2 * n) as f64).cos()).collect();
    // node k sits at angle π(2k+1)/(2n), i.e. index (2k+1) in the table
    let samples: Vec<f64> = (0..n).map(|k| f(cos_table[2 * k + 1])).collect();
    let mut coeffs: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|j| {
            let mut acc = 0.0;
            for (k, fk) in samples.iter().enumerate() {
                acc += fk * cos_table[(j * (2 * k + 1)) % period];
            }
            2.0 * acc / n as f64
        })
        .collect();
    coeffs[0] *= 0.5;
    coeffs
}

fn domain_error(coeffs: &[f64], target: &(dyn Fn(f64) -> f64 + Sync), intervals: &[Interval], points: usize) -> f64 {
    intervals
        .iter()
        .map(|iv| iv.grid(points).map(|x| (clenshaw(coeffs, x) - target(x)).abs()).reduce(|| 0.0, f64::max))
        .fold(0.0, f64::max)
}

fn global_max(coeffs: &[f64], points: usize) -> f64 {
    Interval::FULL.grid(points).map(|x| clenshaw(coeffs, x).abs()).reduce(|| 0.0, f64::max)
}

// ---------------------------------------------------------------------------
// Smoothed floor

fn normal_pdf(u: f64) -> f64 {
    (-0.5 * u * u).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

fn normal_cdf(u: f64) -> f64 {
    0.5 * erfc(-u / std::f64::consts::SQRT_2)
}

/// `E[max(u + Z, 0)]` for standard normal `Z`.
fn gauss_softplus(u: f64) -> f64 {
    u * normal_cdf(u) + normal_pdf(u)
}

#[derive(Debug, Clone, Copy)]
struct SmoothFloor {
    floor: f64,
    width: f64,
}

impl SmoothFloor {
    /// Picks the widest transition whose excess over `x` at `x = edge` is at
    /// most `tol`, using `G(u) − u ≤ φ(u)/u²`.
    fn fit(floor: f64, edge: f64, tol: f64) -> Self {
        let gap = edge - floor;
        let excess = |w: f64| {
            let u = gap / w;
            w * normal_pdf(u) / (u * u)
        };
        let (mut lo, mut hi) = (gap * 1e-6, gap);
        for _ in 0..200 {
            let mid = (lo * hi).sqrt();
            if excess(mid) <= tol {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Self { floor, width: lo }
    }

    fn apply(&self, x: f64) -> f64 {
        self.floor + self.width * gauss_softplus((x - self.floor) / self.width)
    }
}

// ---------------------------------------------------------------------------
// Certified construction

struct Build<'a> {
    target: SeriesTarget,
    extension: &'a (dyn Fn(f64) -> f64 + Sync),
    intervals: Vec<Interval>,
    eps: f64,
    lemma_degree: f64,
    odd: bool,
}

struct Trial {
    coeffs: Vec<f64>,
    error: f64,
    global: f64,
}

impl Build<'_> {
    fn attempt(&self, degree: usize) -> (bool, Trial) {
        let mut coeffs = chebyshev_interpolant(self.extension, degree);
        if self.odd {
            coeffs.iter_mut().step_by(2).for_each(|c| *c = 0.0);
        }
        let target = |x: f64| self.target.value(x);
        let error = domain_error(&coeffs, &target, &self.intervals, CERT_GRID);
        if error > CERT_MARGIN * self.eps {
            return (false, Trial { coeffs, error, global: f64::NAN });
        }
        let global = global_max(&coeffs, CERT_GRID);
        (global <= SVT_GLOBAL_LIMIT, Trial { coeffs, error, global })
    }

    fn run(self) -> Result<ChebyshevSeries> {
        let cap = ((8.0 * self.lemma_degree).ceil() as usize).max(64);
        let mut degree = ((self.lemma_degree / 4.0).ceil() as usize).max(2);
        let mut last_fail: Option<usize> = None;
        let mut pass;
        loop {
            let (ok, trial) = self.attempt(degree);
            if ok {
                pass = (degree, trial);
                break;
            }
            last_fail = Some(degree);
            if degree >= cap {
                return Err(Error::Certification(format!(
                    "{:?}: degree {degree} (cap {cap}) reached error {:.3e} against {:.3e}, global bound {:.4}",
                    self.target, trial.error, self.eps, trial.global
                )));
            }
            degree = ((degree as f64 * 1.25).ceil() as usize).max(degree + 1).min(cap);
        }
        if let Some(mut lo) = last_fail {
            while pass.0 - lo > 1 {
                let mid = lo + (pass.0 - lo) / 2;
                let (ok, trial) = self.attempt(mid);
                if ok {
                    pass = (mid, trial);
                } else {
                    lo = mid;
                }
            }
        }
        let (degree, trial) = pass;
        Ok(ChebyshevSeries {
            degree,
            coefficients: trial.coeffs,
            target: self.target,
            certified_sup_error: trial.error,
            certified_on: self.intervals,
            global_bound: trial.global,
            lemma_degree: self.lemma_degree,
            degree_constant: degree as f64 / self.lemma_degree,
        })
    }
}

fn check_unit(name: &str, v: f64, hi: f64) -> Result<()> {
    if !(v > 0.0 && v <= hi) {
        return Err(invalid(format!("{name} must lie in (0, {hi}], got {v}")));
    }
    Ok(())
}

/// `S̃ ≈ ln(x)/(2 ln(2/β))` on `[β, 1]`, `|S̃| ≤ 1/2` on `[−1, 1]`.
pub fn approx_log(beta: f64, eps: f64) -> Result<ChebyshevSeries> {
    check_unit("beta", beta, 1.0)?;
    check_unit("eps", eps, 0.5)?;
    let lam = (2.0 / beta).ln();
    // The floor at 0.6β keeps the extension ln(1.2)/(2Λ) above −1/2,
    // independently of ε, so the global bound does not tighten with ε.
    let floor = 0.6 * beta;
    let tol = beta * ((0.5 * lam * eps).exp() - 1.0);
    let sf = SmoothFloor::fit(floor, beta, tol);
    let ext = move |x: f64| sf.apply(x).ln() / (2.0 * lam);
    Build {
        target: SeriesTarget::Log { beta },
        extension: &ext,
        intervals: vec![Interval::new(beta, 1.0)],
        eps,
        lemma_degree: (1.0 / beta) * (1.0 / eps).ln().max(1.0),
        odd: false,
    }
    .run()
}

/// `Ṽ ≈ 3δ/(8x)` on `[−1, −δ] ∪ [δ, 1]`, odd, `|Ṽ| ≤ 1/2` on `[−1, 1]`.
pub fn approx_inverse(delta: f64, eps: f64) -> Result<ChebyshevSeries> {
    check_unit("delta", delta, 0.5)?;
    check_unit("eps", eps, 0.5)?;
    let c = 0.8 * delta;
    // smoothing acts on x², the relative error at x = δ is excess/δ²
    let tol = 0.25 * eps * delta * delta * 8.0 / 3.0;
    let sf = SmoothFloor::fit(c * c, delta * delta, tol);
    let ext = move |x: f64| 3.0 * delta / 8.0 * x / sf.apply(x * x);
    Build {
        target: SeriesTarget::Inverse { delta },
        extension: &ext,
        intervals: vec![Interval::new(-1.0, -delta), Interval::new(delta, 1.0)],
        eps,
        lemma_degree: (1.0 / delta) * (1.0 / (delta * eps)).ln().max(1.0),
        odd: true,
    }
    .run()
}

/// `P̃ ≈ √x/3` on `[β, 1]`, `|P̃| ≤ 1/2` on `[−1, 1]`.
pub fn approx_sqrt(beta: f64, eta: f64) -> Result<ChebyshevSeries> {
    check_unit("beta", beta, 1.0)?;
    check_unit("eta", eta, 0.5)?;
    let floor = 0.5 * beta;
    let tol = (beta.sqrt() + 0.75 * eta).powi(2) - beta;
    let sf = SmoothFloor::fit(floor, beta, tol);
    let ext = move |x: f64| sf.apply(x).sqrt() / 3.0;
    Build {
        target: SeriesTarget::Sqrt { beta },
        extension: &ext,
        intervals: vec![Interval::new(beta, 1.0)],
        eps: eta,
        lemma_degree: (1.0 / beta) * (1.0 / eta).ln().max(1.0),
        odd: false,
    }
    .run()
}

/// Chebyshev coefficients of `x^s`.
pub fn monomial_coefficients(s: u32) -> Vec<f64> {
    let s64 = s as u64;
    let mut c = vec![0.0; s as usize + 1];
    for k in 0..=(s64 / 2) {
        let w = (ln_binomial(s64, k) - s as f64 * std::f64::consts::LN_2).exp();
        let j = (s64 - 2 * k) as usize;
        c[j] = if j == 0 { w } else { 2.0 * w };
    }
    c
}

/// Chebyshev truncation of `x^s` to degree `d`; the exact monomial when
/// `d ≥ s`. The certified error is the dropped coefficient mass.
pub fn approx_monomial(s: u32, d: u32) -> Result<ChebyshevSeries> {
    if s == 0 || d == 0 {
        return Err(invalid("monomial power and degree must be positive"));
    }
    let full = monomial_coefficients(s);
    let keep = (d.min(s) as usize) + 1;
    let dropped: f64 = full[keep..].iter().map(|c| c.abs()).sum();
    let mut coeffs = full[..keep].to_vec();
    coeffs.resize(d as usize + 1, 0.0);
    let bound = if d >= s { 0.0 } else { 2.0 * (-(d as f64).powi(2) / (2.0 * s as f64)).exp() };
    Ok(ChebyshevSeries {
        degree: d as usize,
        global_bound: global_max(&coeffs, CERT_GRID),
        coefficients: coeffs,
        target: SeriesTarget::Monomial { s, scale: 1.0 },
        certified_sup_error: dropped,
        certified_on: vec![Interval::FULL],
        lemma_degree: (2.0 * s as f64 * (2.0 / bound.max(f64::MIN_POSITIVE)).ln()).sqrt(),
        degree_constant: 1.0,
    })
}

/// Multiplies every coefficient (and the target) by `factor`.
pub fn scale_series(p: &ChebyshevSeries, factor: f64) -> ChebyshevSeries {
    let mut q = p.clone();
    q.coefficients.iter_mut().for_each(|c| *c *= factor);
    q.certified_sup_error *= factor.abs();
    q.global_bound *= factor.abs();
    if let SeriesTarget::Monomial { s, scale } = q.target {
        q.target = SeriesTarget::Monomial { s, scale: scale * factor };
    }
    q
}

/// Coefficients of `x · P(x)`, using `x T_j = (T_{j+1} + T_{|j−1|}) / 2`.
pub fn multiply_by_x(coeffs: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; coeffs.len() + 1];
    for (j, &c) in coeffs.iter().enumerate() {
        if j == 0 {
            out[1] += c;
        } else {
            out[j + 1] += 0.5 * c;
            out[j - 1] += 0.5 * c;
        }
    }
    out
}

/// `P(x) = −x S̃(x)` with `S̃ = approx_log(β, ε₁)`.
pub fn entropy_poly(beta: f64, eps1: f64) -> Result<ChebyshevSeries> {
    let log = approx_log(beta, eps1)?;
    entropy_from_log(&log)
}

pub fn entropy_from_log(log: &ChebyshevSeries) -> Result<ChebyshevSeries> {
    let SeriesTarget::Log { beta } = log.target else {
        return Err(invalid("entropy polynomial needs a log series"));
    };
    let coeffs: Vec<f64> = multiply_by_x(&log.coefficients).into_iter().map(|c| -c).collect();
    let target = SeriesTarget::Entropy { beta };
    let intervals = log.certified_on.clone();
    let error = domain_error(&coeffs, &|x| target.value(x), &intervals, CERT_GRID);
    Ok(ChebyshevSeries {
        degree: log.degree + 1,
        global_bound: global_max(&coeffs, CERT_GRID),
        coefficients: coeffs,
        target,
        certified_sup_error: error,
        certified_on: intervals,
        lemma_degree: log.lemma_degree,
        degree_constant: (log.degree + 1) as f64 / log.lemma_degree,
    })
}

// ---------------------------------------------------------------------------
// Log-det expansions

/// `⌈κ ln(κ/ε)⌉`, at least 1.
pub fn taylor_logdet_degree(kappa: f64, eps: f64) -> Result<usize> {
    if !(kappa >= 1.0) {
        return Err(invalid(format!("kappa must be >= 1, got {kappa}")));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(invalid(format!("eps must lie in (0, 1), got {eps}")));
    }
    Ok(((kappa * (kappa / eps).ln()).ceil() as usize).max(1))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChebyshevLogdetSetup {
    /// Coefficients of `log(1 − scale·y)` in `T_0..T_d`; evaluate at
    /// `y = (1 − λ)/scale`.
    pub coefficients: Vec<f64>,
    pub scale: f64,
    pub degree: usize,
    /// Per-dimension truncation bound at `degree`.
    pub bound: f64,
    pub k: f64,
}

pub fn chebyshev_logdet_k(delta: f64) -> f64 {
    let (a, b) = ((2.0 - delta).sqrt(), delta.sqrt());
    (a + b) / (a - b)
}

/// `20 ln(2/δ) / (K^d (K − 1))`.
pub fn chebyshev_truncation_bound(delta: f64, degree: usize) -> f64 {
    let k = chebyshev_logdet_k(delta);
    20.0 * (2.0 / delta).ln() / (k.powi(degree as i32) * (k - 1.0))
}

pub fn chebyshev_log_coefficients(degree: usize) -> Vec<f64> {
    (0..=degree).map(|j| if j == 0 { -std::f64::consts::LN_2 } else { -2.0 / j as f64 }).collect()
}

/// Coefficients of `log(1 − (1 − δ)y)`: `c_0 = −ln(1 + r²)` and
/// `c_j = −2r^j/j` with `r = 1/K`, from `log(1 − 2ry + r²) = −2Σ r^j T_j(y)/j`.
/// At `δ → 0` these become the `−ln 2, −2/j` series.
pub fn chebyshev_log_coefficients_scaled(delta: f64, degree: usize) -> Vec<f64> {
    let r = 1.0 / chebyshev_logdet_k(delta);
    let mut pow = 1.0;
    (0..=degree)
        .map(|j| {
            if j == 0 {
                -(1.0 + r * r).ln()
            } else {
                pow *= r;
                -2.0 * pow / j as f64
            }
        })
        .collect()
}

pub fn chebyshev_logdet_setup(delta: f64, eps: f64) -> Result<ChebyshevLogdetSetup> {
    if !(delta > 0.0 && delta < 0.5) {
        return Err(invalid(format!("delta must lie in (0, 1/2), got {delta}")));
    }
    if !(eps > 0.0) {
        return Err(invalid("eps must be positive"));
    }
    let mut degree = 0;
    while chebyshev_truncation_bound(delta, degree) > eps {
        degree += 1;
    }
    Ok(ChebyshevLogdetSetup {
        coefficients: chebyshev_log_coefficients_scaled(delta, degree),
        scale: 1.0 - delta,
        degree,
        bound: chebyshev_truncation_bound(delta, degree),
        k: chebyshev_logdet_k(delta),
    })
}
