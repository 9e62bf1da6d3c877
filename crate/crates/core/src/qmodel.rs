//! Block-encodings and their algebra, emulated with explicit matrices.
//!
//! A [`BlockEncoding`] keeps two matrices: the ideal block (`payload`, what
//! the encoding is supposed to contain) and the block the emulated circuit
//! actually realises (`effective`). Perturbations are injected into the
//! effective block according to the [`NoiseMode`], and every composition
//! acts on effective blocks, so errors propagate the way they would on
//! hardware. `alpha · ‖effective − payload‖ ≤ eps` is checked by the tests
//! for every constructor.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{domain, invalid, precondition, Result};
use crate::matrix::{compute_mu, operator_norm, spectral_decompose_dense, SpectralData, SymmetricMatrix, MU_GRID_POINTS};
use crate::poly::ChebyshevSeries;
use crate::rng;

/// How emulated primitives realise their error contracts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum NoiseMode {
    /// No error at all.
    #[default]
    Exact,
    /// Random errors drawn inside the contract (with failure branches where
    /// the primitive has them).
    Stochastic,
    /// Errors that saturate the stated bound.
    Adversarial,
}

impl std::str::FromStr for NoiseMode {
    type Err = crate::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Self::Exact),
            "stochastic" => Ok(Self::Stochastic),
            "adversarial" => Ok(Self::Adversarial),
            _ => Err(invalid(format!("unknown mode '{s}'"))),
        }
    }
}

/// `⌈log₂ n⌉²`, the uniform stand-in for polylog(n) factors.
pub fn polylog_n(n: usize) -> f64 {
    let l = ceil_log2(n as f64).max(1) as f64;
    l * l
}

pub fn ceil_log2(x: f64) -> u32 {
    if x <= 1.0 {
        0
    } else {
        x.log2().ceil() as u32
    }
}

#[derive(Debug, Clone)]
pub struct BlockEncoding {
    payload: DMatrix<f64>,
    effective: DMatrix<f64>,
    pub alpha: f64,
    pub ancillas: u32,
    pub eps: f64,
    pub use_cost: f64,
    pub mode: NoiseMode,
    pub seed: u64,
}

impl BlockEncoding {
    pub fn dim(&self) -> usize {
        self.payload.nrows()
    }

    /// The ideal block.
    pub fn payload(&self) -> &DMatrix<f64> {
        &self.payload
    }

    /// The realised block, perturbation included.
    pub fn effective(&self) -> &DMatrix<f64> {
        &self.effective
    }

    /// The matrix the encoding claims to represent, `alpha · payload`.
    pub fn target(&self) -> DMatrix<f64> {
        &self.payload * self.alpha
    }

    /// Re-declares the ideal block, e.g. when the realised block only
    /// approximates a function of the input; `eps` must cover the gap.
    pub(crate) fn with_ideal(mut self, payload: DMatrix<f64>, eps: f64) -> Self {
        self.payload = payload;
        self.eps = eps;
        self
    }

    /// `‖alpha · effective − target‖`.
    pub fn deviation(&self) -> f64 {
        operator_norm(&((&self.effective - &self.payload) * self.alpha))
    }
}

/// Perturbation of spectral norm at most `budget`.
fn perturbation(mode: NoiseMode, budget: f64, reference: &DMatrix<f64>, seed: u64) -> Result<DMatrix<f64>> {
    let n = reference.nrows();
    if budget <= 0.0 || mode == NoiseMode::Exact {
        return Ok(DMatrix::zeros(n, n));
    }
    match mode {
        NoiseMode::Adversarial => {
            let s = spectral_decompose_dense(reference)?;
            // top eigenvector by magnitude
            let k = if s.eigenvalues[0].abs() >= s.eigenvalues[n - 1].abs() { 0 } else { n - 1 };
            let v = s.eigenvectors.column(k);
            Ok(&v * v.transpose() * budget)
        }
        NoiseMode::Stochastic => {
            let mut r = rng::stream(seed, rng::label::PERTURB, 0);
            let mut g = DMatrix::from_fn(n, n, |_, _| r.sample::<f64, _>(StandardNormal));
            g = (&g + g.transpose()) * 0.5;
            let norm = operator_norm(&g);
            let size: f64 = r.random::<f64>() * budget;
            Ok(if norm > 0.0 { g * (size / norm) } else { g })
        }
        NoiseMode::Exact => unreachable!(),
    }
}

fn check_contraction(m: &DMatrix<f64>, what: &str) -> Result<f64> {
    let norm = operator_norm(m);
    if norm > 1.0 + 1e-12 {
        return Err(precondition(format!("{what} has spectral norm {norm} > 1")));
    }
    Ok(norm)
}

/// `(μ(A), ⌈log₂ n⌉, 0)`-encoding from quantum access to `A`.
pub fn qram_block_encoding(a: &SymmetricMatrix) -> Result<BlockEncoding> {
    qram_block_encoding_with_grid(a, MU_GRID_POINTS)
}

pub fn qram_block_encoding_with_grid(a: &SymmetricMatrix, mu_grid: usize) -> Result<BlockEncoding> {
    let norm = a.spectral_norm()?;
    if norm > 1.0 + 1e-12 {
        return Err(precondition(format!("quantum access encoding needs ||A|| <= 1, got {norm}")));
    }
    let mu = compute_mu(a, mu_grid)?;
    if mu == 0.0 {
        return Err(invalid("cannot encode the zero matrix"));
    }
    let payload = a.entries() / mu;
    let n = a.dim();
    Ok(BlockEncoding {
        effective: payload.clone(),
        payload,
        alpha: mu,
        ancillas: ceil_log2(n as f64),
        eps: 0.0,
        use_cost: polylog_n(n),
        mode: NoiseMode::Exact,
        seed: 0,
    })
}

/// `(1, 1 + ⌈log₂(n/ε)⌉, ε)`-encoding, charged `μ/ε · polylog(n)` per use.
pub fn unit_block_encoding(a: &SymmetricMatrix, eps: f64, mode: NoiseMode, seed: u64) -> Result<BlockEncoding> {
    unit_block_encoding_with_mu(a, eps, mode, seed, compute_mu(a, MU_GRID_POINTS)?)
}

pub fn unit_block_encoding_with_mu(a: &SymmetricMatrix, eps: f64, mode: NoiseMode, seed: u64, mu: f64) -> Result<BlockEncoding> {
    if !(eps > 0.0) {
        return Err(invalid(format!("encoding error must be positive, got {eps}")));
    }
    let norm = a.spectral_norm()?;
    if norm > 1.0 + 1e-12 {
        return Err(precondition(format!("unit encoding needs ||A|| <= 1, got {norm}")));
    }
    let lmin = a.min_eigenvalue()?;
    if lmin < 0.0 {
        return Err(domain(format!("unit encoding is restricted to positive semidefinite input (eigenvalue {lmin:e})")));
    }
    let n = a.dim();
    let payload = a.entries().clone();
    let effective = &payload + perturbation(mode, eps, &payload, seed)?;
    Ok(BlockEncoding {
        payload,
        effective,
        alpha: 1.0,
        ancillas: 1 + ceil_log2(n as f64 / eps),
        eps,
        use_cost: mu / eps * polylog_n(n),
        mode,
        seed,
    })
}

/// `(1, 2⌈log₂ n⌉, 0)`-encoding of a density matrix via its purification.
pub fn density_block_encoding(rho: &SymmetricMatrix) -> Result<BlockEncoding> {
    let tr = rho.trace();
    if (tr - 1.0).abs() > 1e-10 {
        return Err(precondition(format!("density matrix must have unit trace, got {tr}")));
    }
    let lmin = rho.min_eigenvalue()?;
    if lmin < -1e-12 {
        return Err(domain(format!("density matrix has negative eigenvalue {lmin:e}")));
    }
    let n = rho.dim();
    Ok(BlockEncoding {
        payload: rho.entries().clone(),
        effective: rho.entries().clone(),
        alpha: 1.0,
        ancillas: 2 * ceil_log2(n as f64),
        eps: 0.0,
        use_cost: 1.0,
        mode: NoiseMode::Exact,
        seed: 0,
    })
}

/// `P` applied to the eigenvalues of a symmetric matrix, clamped to `[−1, 1]`.
pub fn polynomial_of(m: &DMatrix<f64>, p: &ChebyshevSeries) -> Result<DMatrix<f64>> {
    let s = spectral_decompose_dense(m)?;
    Ok(s.map(|x| p.value(x.clamp(-1.0, 1.0))))
}

/// `(1, q + 2, 4d√(ε/α) + ν)`-encoding of `P(A/α)`.
pub fn apply_svt(be: &BlockEncoding, p: &ChebyshevSeries, nu: f64) -> Result<BlockEncoding> {
    let gb = p.measured_global_bound(crate::poly::CERT_GRID).max(p.global_bound);
    if gb > 0.5 + 1e-12 {
        return Err(precondition(format!("polynomial global bound {gb} exceeds 1/2")));
    }
    if nu < 0.0 {
        return Err(invalid("nu must be non-negative"));
    }
    let d = p.degree as f64;
    let seed = rng::derive(be.seed, 0x5356_54);
    let payload = polynomial_of(&be.payload, p)?;
    let effective = polynomial_of(&be.effective, p)? + perturbation(be.mode, nu, &payload, seed)?;
    Ok(BlockEncoding {
        payload,
        effective,
        alpha: 1.0,
        ancillas: be.ancillas + 2,
        eps: 4.0 * d * (be.eps / be.alpha).sqrt() + nu,
        use_cost: (d + 1.0) * be.use_cost,
        mode: be.mode,
        seed,
    })
}

/// `(1, a₁ + a₂ + 2, ε₁ + ε₂)`-encoding of `A₁A₂/2`.
pub fn product_preamplified(be1: &BlockEncoding, be2: &BlockEncoding) -> Result<BlockEncoding> {
    check_contraction(&be1.target(), "first factor")?;
    check_contraction(&be2.target(), "second factor")?;
    let payload = be1.target() * be2.target() * 0.5;
    let effective = (&be1.effective * be1.alpha) * (&be2.effective * be2.alpha) * 0.5;
    Ok(BlockEncoding {
        payload,
        effective,
        alpha: 1.0,
        ancillas: be1.ancillas + be2.ancillas + 2,
        eps: be1.eps + be2.eps,
        use_cost: be1.alpha * (be1.ancillas as f64 + be1.use_cost) + be2.alpha * (be2.ancillas as f64 + be2.use_cost),
        mode: be1.mode,
        seed: rng::derive(be1.seed ^ be2.seed.rotate_left(17), 0x50_52_4f_44),
    })
}

/// `(αβ, a + b, αε₂ + βε₁)`-encoding of `A₁A₂` (no amplification).
pub fn product_plain(be1: &BlockEncoding, be2: &BlockEncoding) -> BlockEncoding {
    BlockEncoding {
        payload: &be1.payload * &be2.payload,
        effective: &be1.effective * &be2.effective,
        alpha: be1.alpha * be2.alpha,
        ancillas: be1.ancillas + be2.ancillas,
        eps: be1.alpha * be2.eps + be2.alpha * be1.eps,
        use_cost: be1.use_cost + be2.use_cost,
        mode: be1.mode,
        seed: rng::derive(be1.seed ^ be2.seed.rotate_left(29), 0x504c_4149_4e),
    }
}

/// `(1, a + ⌈log₂log₂(1/ε)⌉ + 2, ε)`-encoding of `H^c/2` for `I/κ ⪯ H ⪯ I`.
pub fn matrix_power(be: &BlockEncoding, c: f64, kappa: f64, eps: f64) -> Result<BlockEncoding> {
    if !(c > 0.0 && c <= 1.0) {
        return Err(invalid(format!("power must lie in (0, 1], got {c}")));
    }
    if !(kappa >= 2.0) {
        return Err(invalid(format!("kappa must be >= 2, got {kappa}")));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(invalid(format!("eps must lie in (0, 1), got {eps}")));
    }
    let target = be.target();
    let spec = spectral_decompose_dense(&target)?;
    let (hi, lo) = (spec.eigenvalues[0], *spec.eigenvalues.last().expect("n >= 1"));
    if lo < 1.0 / kappa * (1.0 - 1e-12) || hi > 1.0 + 1e-12 {
        return Err(precondition(format!("spectrum [{lo:e}, {hi:e}] is not inside [1/kappa, 1] = [{:e}, 1]", 1.0 / kappa)));
    }
    let log = (kappa / eps).ln();
    let limit = eps / (10.0 * kappa * log.powi(3));
    if be.eps > limit {
        return Err(precondition(format!("input encoding error {:e} exceeds eps/(10 kappa log^3(kappa/eps)) = {limit:e}", be.eps)));
    }
    let power = |s: &SpectralData| s.map(|x| 0.5 * x.max(0.0).powf(c));
    let payload = power(&spec);
    let mut effective = power(&spectral_decompose_dense(&(&be.effective * be.alpha))?);
    let inherited = operator_norm(&(&effective - &payload));
    let seed = rng::derive(be.seed, 0x504f_5745_52);
    effective += perturbation(be.mode, (eps - inherited).max(0.0), &payload, seed)?;
    let loglog = ceil_log2((1.0 / eps).log2().max(1.0));
    Ok(BlockEncoding {
        payload,
        effective,
        alpha: 1.0,
        ancillas: be.ancillas + loglog + 2,
        eps,
        use_cost: be.alpha * kappa * (be.ancillas as f64 + be.use_cost) * log * log,
        mode: be.mode,
        seed,
    })
}

// ---------------------------------------------------------------------------
// Singular value estimation

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SveMode {
    /// Returns the singular value untouched.
    Exact,
    /// Rounds to the nearest multiple of the precision.
    GridRound,
    /// Adds `ε₁ u` with `u` uniform on `[−1, 1]`.
    Stochastic,
}

impl From<NoiseMode> for SveMode {
    fn from(m: NoiseMode) -> Self {
        match m {
            NoiseMode::Exact => SveMode::Exact,
            NoiseMode::Stochastic => SveMode::Stochastic,
            NoiseMode::Adversarial => SveMode::GridRound,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SveOracle {
    pub singular_values: Vec<f64>,
    pub precision: f64,
    pub mode: SveMode,
    pub seed: u64,
    /// Cost of one coherent call is `mu / precision`.
    pub mu: f64,
}

impl SveOracle {
    pub fn new(source: &SpectralData, precision: f64, mode: SveMode, seed: u64, mu: f64) -> Result<Self> {
        if !(precision > 0.0) {
            return Err(invalid("SVE precision must be positive"));
        }
        Ok(Self { singular_values: source.singular_values.clone(), precision, mode, seed, mu })
    }

    pub fn call_cost(&self) -> f64 {
        self.mu / self.precision
    }

    /// Phase-estimation register size, `⌈log₂(1/ε₁)⌉`.
    pub fn phase_bits(&self) -> u32 {
        ceil_log2(1.0 / self.precision)
    }

    pub fn value(&self, j: usize) -> Result<f64> {
        let sigma = *self
            .singular_values
            .get(j)
            .ok_or_else(|| invalid(format!("singular value index {j} out of range (n = {})", self.singular_values.len())))?;
        Ok(match self.mode {
            SveMode::Exact => sigma,
            SveMode::GridRound => self.precision * (sigma / self.precision).round(),
            SveMode::Stochastic => {
                let u: f64 = rng::stream(self.seed, rng::label::SVE, j as u64).random_range(-1.0..=1.0);
                sigma + self.precision * u
            }
        })
    }

    /// All estimates, as produced by one coherent call on a superposition.
    pub fn values(&self) -> Vec<f64> {
        (0..self.singular_values.len()).map(|j| self.value(j).expect("index in range")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{generate_spd, SpectrumProfile};
    use crate::poly::{approx_log, monomial_coefficients};
    use approx::assert_relative_eq;

    fn oracle_function(m: &DMatrix<f64>, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
        // independent route: nalgebra's own decomposition, no sorting
        let e = m.clone().symmetric_eigen();
        let d = DMatrix::from_diagonal(&e.eigenvalues.map(f));
        &e.eigenvectors * d * e.eigenvectors.transpose()
    }

    #[test]
    fn qram_encoding() {
        let a = SymmetricMatrix::scaled_identity(4, 0.5);
        let be = qram_block_encoding(&a).unwrap();
        assert_relative_eq!(be.alpha, 0.5, epsilon = 1e-15);
        assert!((be.payload() - DMatrix::identity(4, 4)).norm() < 1e-15);
        let g = generate_spd(16, 5.0, SpectrumProfile::LogUniform, 0.8, 2).unwrap();
        let be = qram_block_encoding(&g).unwrap();
        assert_eq!(be.alpha, compute_mu(&g, MU_GRID_POINTS).unwrap());
        assert!((be.target() - g.entries()).norm() < 1e-15);
        assert_eq!(be.deviation(), 0.0);
        assert!(qram_block_encoding(&SymmetricMatrix::scaled_identity(2, 1.5)).is_err());
    }

    #[test]
    fn unit_encoding_modes_and_cost() {
        let a = SymmetricMatrix::scaled_identity(2, 0.3);
        let be = unit_block_encoding(&a, 0.01, NoiseMode::Exact, 1).unwrap();
        assert_eq!(be.alpha, 1.0);
        assert_eq!(be.effective(), a.entries());
        let g = generate_spd(8, 4.0, SpectrumProfile::Uniform, 0.9, 3).unwrap();
        let adv = unit_block_encoding(&g, 0.01, NoiseMode::Adversarial, 1).unwrap();
        assert_relative_eq!(adv.deviation(), 0.01, epsilon = 1e-12);
        let sto = unit_block_encoding(&g, 0.01, NoiseMode::Stochastic, 5).unwrap();
        assert!(sto.deviation() <= 0.01 + 1e-15);
        let c1 = unit_block_encoding_with_mu(&g, 0.01, NoiseMode::Exact, 0, 4.0).unwrap().use_cost;
        let c2 = unit_block_encoding_with_mu(&g, 1.0, NoiseMode::Exact, 0, 4.0).unwrap().use_cost;
        assert_relative_eq!(c1 / c2, 100.0, max_relative = 1e-12);
        assert!(unit_block_encoding(&g, 0.0, NoiseMode::Exact, 0).is_err());
    }

    #[test]
    fn density_encoding() {
        let rho = SymmetricMatrix::scaled_identity(4, 0.25);
        let be = density_block_encoding(&rho).unwrap();
        assert_eq!(be.payload(), rho.entries());
        let e1 = SymmetricMatrix::from_diagonal(&[1.0, 0.0, 0.0]);
        let be = density_block_encoding(&e1).unwrap();
        let ev = spectral_decompose_dense(be.payload()).unwrap().eigenvalues;
        assert_eq!(ev, vec![1.0, 0.0, 0.0]);
        assert!(density_block_encoding(&SymmetricMatrix::scaled_identity(3, 0.3)).is_err());
    }

    #[test]
    fn svt_constant_and_identity() {
        let g = generate_spd(12, 6.0, SpectrumProfile::LogUniform, 0.7, 9).unwrap();
        let be = qram_block_encoding(&g).unwrap();
        let quarter = ChebyshevSeries::from_coefficients(vec![0.25]).unwrap();
        let out = apply_svt(&be, &quarter, 0.0).unwrap();
        assert!((out.payload() - DMatrix::identity(12, 12) * 0.25).norm() < 1e-13);
        let t1 = ChebyshevSeries::from_coefficients(vec![0.0, 0.5]).unwrap();
        let out = apply_svt(&be, &t1, 0.0).unwrap();
        assert!((out.payload() * 2.0 - be.payload()).norm() < 1e-12);
    }

    #[test]
    fn svt_matches_independent_matrix_function() {
        let g = generate_spd(20, 10.0, SpectrumProfile::LogUniform, 0.9, 4).unwrap();
        let be = qram_block_encoding(&g).unwrap();
        let p = approx_log(0.05, 1e-2).unwrap();
        let out = apply_svt(&be, &p, 1e-12).unwrap();
        assert_eq!(out.eps, 1e-12);
        let oracle = oracle_function(be.payload(), |x| p.value(x));
        assert!((out.payload() - oracle).norm() <= 1e-10 * 20.0);
        assert!(apply_svt(&be, &ChebyshevSeries::from_coefficients(vec![0.9]).unwrap(), 0.0).is_err());
    }

    #[test]
    fn preamplified_product() {
        let half = qram_block_encoding(&SymmetricMatrix::scaled_identity(3, 0.5)).unwrap();
        let out = product_preamplified(&half, &half).unwrap();
        assert!((out.payload() - DMatrix::identity(3, 3) * 0.125).norm() < 1e-15);
        let g = generate_spd(10, 3.0, SpectrumProfile::Uniform, 0.6, 1).unwrap();
        let mut a = unit_block_encoding(&g, 0.01, NoiseMode::Adversarial, 1).unwrap();
        let mut b = unit_block_encoding(&g, 0.02, NoiseMode::Adversarial, 2).unwrap();
        assert_relative_eq!(product_preamplified(&a, &b).unwrap().eps, 0.03, epsilon = 1e-15);
        a.mode = NoiseMode::Exact;
        b.mode = NoiseMode::Exact;
        let e = qram_block_encoding(&g).unwrap();
        let out = product_preamplified(&e, &e).unwrap();
        assert!((out.payload() - g.entries() * g.entries() * 0.5).norm() < 1e-12);
    }

    #[test]
    fn powers() {
        let g = generate_spd(10, 4.0, SpectrumProfile::Uniform, 1.0, 8).unwrap();
        let be = qram_block_encoding(&g).unwrap();
        let out = matrix_power(&be, 1.0, 4.0, 1e-3).unwrap();
        assert!((out.payload() - g.entries() * 0.5).norm() < 1e-12);
        let q = qram_block_encoding(&SymmetricMatrix::scaled_identity(3, 0.25)).unwrap();
        let out = matrix_power(&q, 0.5, 4.0, 1e-3).unwrap();
        assert!((out.payload() - DMatrix::identity(3, 3) * 0.25).norm() < 1e-14);
        let out = matrix_power(&be, 0.75, 4.0, 1e-3).unwrap();
        let oracle = oracle_function(g.entries(), |x| 0.5 * x.powf(0.75));
        assert!((out.payload() - oracle).norm() < 1e-10);
        assert!(matrix_power(&be, 0.5, 2.0, 1e-3).is_err());
        let noisy = unit_block_encoding(&g, 1e-3, NoiseMode::Exact, 0).unwrap();
        assert!(matrix_power(&noisy, 0.5, 4.0, 1e-3).is_err());
    }

    #[test]
    fn sve_modes() {
        let s = SpectralData {
            eigenvalues: vec![0.5, 0.47],
            eigenvectors: DMatrix::identity(2, 2),
            singular_values: vec![0.5, 0.47],
        };
        let o = SveOracle::new(&s, 0.1, SveMode::GridRound, 0, 1.0).unwrap();
        assert_eq!(o.value(0).unwrap(), 0.5);
        assert_relative_eq!(o.value(1).unwrap(), 0.5, epsilon = 1e-15);
        assert!(o.value(2).is_err());

        let flat = SpectralData {
            eigenvalues: vec![0.3; 10_000],
            eigenvectors: DMatrix::zeros(0, 0),
            singular_values: vec![0.3; 10_000],
        };
        let o = SveOracle::new(&flat, 0.01, SveMode::Stochastic, 3, 1.0).unwrap();
        let v = o.values();
        assert!(v.iter().all(|x| (0.29 - 1e-15..=0.31 + 1e-15).contains(x)));
        let mean = v.iter().sum::<f64>() / v.len() as f64;
        assert!((mean - 0.3).abs() <= 3.0 * (0.01 / 3f64.sqrt()) / 100.0);
    }

    #[test]
    fn monomial_through_svt() {
        let g = generate_spd(8, 3.0, SpectrumProfile::Uniform, 0.9, 6).unwrap();
        let be = qram_block_encoding(&g).unwrap();
        let p = ChebyshevSeries::from_coefficients(monomial_coefficients(3).iter().map(|c| c * 0.5).collect()).unwrap();
        let out = apply_svt(&be, &p, 0.0).unwrap();
        let x = be.payload();
        assert!((out.payload() - x * x * x * 0.5).norm() < 1e-12);
    }
}
