//! Dense symmetric matrices, their spectra, and the exact spectral-sum oracle.
//!
//! Everything the estimators are scored against is computed here from a full
//! eigendecomposition.

use std::sync::OnceLock;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{domain, invalid, Error, Result};
use crate::rng;

/// Absolute tolerance for accepting a numerically symmetric input.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Default number of exponents on the p-grid used by [`compute_mu`].
pub const MU_GRID_POINTS: usize = 101;

#[derive(Debug, Clone)]
pub struct SymmetricMatrix {
    entries: DMatrix<f64>,
    spd: bool,
    spectral: OnceLock<SpectralData>,
}

#[derive(Debug, Clone)]
pub struct SpectralData {
    /// Sorted descending.
    pub eigenvalues: Vec<f64>,
    /// Column `k` belongs to `eigenvalues[k]`.
    pub eigenvectors: DMatrix<f64>,
    /// `|eigenvalues|`, sorted descending.
    pub singular_values: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct MatrixStats {
    pub n: usize,
    pub spectral_norm: f64,
    pub frobenius_norm: f64,
    pub kappa: f64,
    pub mu: f64,
    pub mu_grid_points: usize,
    pub mu_grid_resolution: f64,
    /// `(p, s_p(A))` pairs.
    pub s_p_values: Vec<(f64, f64)>,
}

impl SymmetricMatrix {
    /// Accepts a square matrix that is symmetric within [`SYMMETRY_TOL`] and
    /// stores its symmetric part.
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        let (r, c) = entries.shape();
        if r != c {
            return Err(Error::NotSquare(r, c));
        }
        if r == 0 {
            return Err(invalid("empty matrix"));
        }
        let mut worst = (0, 0, 0.0f64);
        for j in 0..c {
            for i in (j + 1)..r {
                let d = (entries[(i, j)] - entries[(j, i)]).abs();
                if d.is_nan() || d > worst.2 {
                    worst = (i, j, if d.is_nan() { f64::INFINITY } else { d });
                }
            }
        }
        if worst.2 > SYMMETRY_TOL {
            return Err(Error::Asymmetric { i: worst.0, j: worst.1, diff: worst.2 });
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(invalid("matrix has non-finite entries"));
        }
        Ok(Self::from_symmetric_parts(entries))
    }

    fn from_symmetric_parts(m: DMatrix<f64>) -> Self {
        let sym = symmetrize(&m);
        Self { entries: sym, spd: false, spectral: OnceLock::new() }
    }

    pub fn from_row_slice(n: usize, data: &[f64]) -> Result<Self> {
        if data.len() != n * n {
            return Err(invalid(format!("expected {} entries, got {}", n * n, data.len())));
        }
        Self::new(DMatrix::from_row_slice(n, n, data))
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = DMatrix::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        Self::from_symmetric_parts(m)
    }

    pub fn scaled_identity(n: usize, c: f64) -> Self {
        Self::from_symmetric_parts(DMatrix::identity(n, n) * c)
    }

    /// `U diag(values) Uᵀ` for an orthogonal `U`.
    pub fn from_spectrum(values: &[f64], basis: &DMatrix<f64>) -> Self {
        let mut scaled = basis.clone();
        for (k, &v) in values.iter().enumerate() {
            scaled.column_mut(k).scale_mut(v);
        }
        Self::from_symmetric_parts(&scaled * basis.transpose())
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn is_spd(&self) -> bool {
        self.spd
    }

    /// Verifies positive-definiteness and sets the flag.
    pub fn into_spd(self) -> Result<Self> {
        let lmin = self.min_eigenvalue()?;
        if lmin <= 0.0 {
            return Err(domain(format!("smallest eigenvalue {lmin:e} is not positive")));
        }
        Ok(Self { spd: true, ..self })
    }

    /// Cached eigendecomposition.
    pub fn spectral(&self) -> Result<&SpectralData> {
        if let Some(s) = self.spectral.get() {
            return Ok(s);
        }
        let s = spectral_decompose_dense(&self.entries)?;
        let _ = self.spectral.set(s);
        Ok(self.spectral.get().expect("just set"))
    }

    pub fn scaled(&self, c: f64) -> Self {
        let spd = self.spd && c > 0.0;
        let out = Self { entries: &self.entries * c, spd, spectral: OnceLock::new() };
        if let Some(s) = self.spectral.get() {
            let mut t = s.clone();
            t.eigenvalues.iter_mut().for_each(|v| *v *= c);
            if c < 0.0 {
                t.eigenvalues.reverse();
                let n = t.eigenvectors.ncols();
                let cols: Vec<_> = (0..n).rev().map(|k| t.eigenvectors.column(k).clone_owned()).collect();
                t.eigenvectors = DMatrix::from_columns(&cols);
            }
            t.singular_values.iter_mut().for_each(|v| *v *= c.abs());
            let _ = out.spectral.set(t);
        }
        out
    }

    pub fn spectral_norm(&self) -> Result<f64> {
        Ok(self.spectral()?.singular_values[0])
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(*self.spectral()?.eigenvalues.last().expect("n >= 1"))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.norm()
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace()
    }

    /// `σ₁ / σ_min` over the numerically nonzero singular values.
    pub fn condition_number(&self) -> Result<f64> {
        let sv = &self.spectral()?.singular_values;
        let top = sv[0];
        if top == 0.0 {
            return Err(domain("condition number of the zero matrix"));
        }
        let floor = top * f64::EPSILON * self.dim() as f64;
        let low = sv.iter().rev().find(|&&s| s > floor).copied().unwrap_or(top);
        Ok(top / low)
    }

    pub fn stats(&self, mu_grid: usize) -> Result<MatrixStats> {
        let exps = [0.0, 0.5, 1.0, 1.5, 2.0];
        Ok(MatrixStats {
            n: self.dim(),
            spectral_norm: self.spectral_norm()?,
            frobenius_norm: self.frobenius_norm(),
            kappa: self.condition_number()?,
            mu: compute_mu(self, mu_grid)?,
            mu_grid_points: mu_grid,
            mu_grid_resolution: 1.0 / (mu_grid.max(2) - 1) as f64,
            s_p_values: exps.iter().map(|&p| (p, row_power_sum(&self.entries, p))).collect(),
        })
    }
}

fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    let mut s = m.clone();
    let n = s.nrows();
    for j in 0..n {
        for i in (j + 1)..n {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            s[(i, j)] = v;
            s[(j, i)] = v;
        }
    }
    s
}

impl SpectralData {
    /// `U diag(f(λ)) Uᵀ`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
        let mut scaled = self.eigenvectors.clone();
        for (k, &v) in self.eigenvalues.iter().enumerate() {
            scaled.column_mut(k).scale_mut(f(v));
        }
        symmetrize(&(&scaled * self.eigenvectors.transpose()))
    }

    pub fn reconstruct(&self) -> DMatrix<f64> {
        self.map(|x| x)
    }

    pub fn sum(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.eigenvalues.iter().map(|&v| f(v)).sum()
    }
}

pub fn spectral_decompose(a: &SymmetricMatrix) -> Result<SpectralData> {
    a.spectral().cloned()
}

/// Eigendecomposition of a dense matrix assumed symmetric (its symmetric part
/// is used).
pub fn spectral_decompose_dense(m: &DMatrix<f64>) -> Result<SpectralData> {
    let n = m.nrows();
    let sym = symmetrize(m);
    let eig = SymmetricEigen::try_new(sym, f64::EPSILON, 1000 * n.max(10))
        .ok_or(Error::NoConvergence(n))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let eigenvalues: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let cols: Vec<_> = order.iter().map(|&k| eig.eigenvectors.column(k).clone_owned()).collect();
    let mut singular_values: Vec<f64> = eigenvalues.iter().map(|v| v.abs()).collect();
    singular_values.sort_by(|a, b| b.total_cmp(a));
    Ok(SpectralData { eigenvalues, eigenvectors: DMatrix::from_columns(&cols), singular_values })
}

/// Spectral norm of an arbitrary dense matrix.
pub fn operator_norm(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    m.clone().svd(false, false).singular_values.max()
}

// ---------------------------------------------------------------------------
// mu(A)

/// `s_q(A) = max_i Σ_j |a_ij|^q`, zero entries skipped (so `s_0` is the row
/// sparsity).
pub fn row_power_sum(a: &DMatrix<f64>, q: f64) -> f64 {
    let n = a.nrows();
    (0..n)
        .map(|i| a.row(i).iter().filter(|v| **v != 0.0).map(|v| v.abs().powf(q)).sum::<f64>())
        .fold(0.0, f64::max)
}

struct LogAbs {
    rows: Vec<Vec<f64>>,
}

impl LogAbs {
    fn new(a: &DMatrix<f64>) -> Self {
        let rows = (0..a.nrows())
            .map(|i| a.row(i).iter().filter(|v| **v != 0.0).map(|v| v.abs().ln()).collect())
            .collect();
        Self { rows }
    }

    fn s(&self, q: f64) -> f64 {
        self.rows.iter().map(|r| r.iter().map(|l| (q * l).exp()).sum::<f64>()).fold(0.0, f64::max)
    }

    /// `ln(s_{2p} · s_{2(1−p)})`; convex in `p`.
    fn phi(&self, p: f64) -> f64 {
        self.s(2.0 * p).ln() + self.s(2.0 - 2.0 * p).ln()
    }
}

/// μ(A): the smallest of `‖A‖_F` and `√(s_{2p}(A) s_{2(1−p)}(A))` over
/// grid exponents.
///
/// The exponent set for `grid_points = g` is every uniform grid on `[0, 1]`
/// with at most `g` points, so refining `g` never raises the result. The
/// candidate is log-convex in `p`, so each grid's minimum sits next to the
/// continuous minimiser and only a handful of exponents per grid are
/// evaluated.
pub fn compute_mu(a: &SymmetricMatrix, grid_points: usize) -> Result<f64> {
    if grid_points < 2 {
        return Err(invalid("grid_points must be at least 2"));
    }
    let fro = a.frobenius_norm();
    if fro == 0.0 {
        return Ok(0.0);
    }
    let la = LogAbs::new(a.entries());
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..80 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if la.phi(m1) <= la.phi(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    let p_star = 0.5 * (lo + hi);
    let mut best_phi = f64::INFINITY;
    let mut seen = std::collections::HashSet::new();
    for g in 2..=grid_points {
        let steps = (g - 1) as i64;
        let centre = (p_star * steps as f64).floor() as i64;
        for k in (centre - 1)..=(centre + 2) {
            if k < 0 || k > steps {
                continue;
            }
            let key = reduce(k, steps);
            if seen.insert(key) {
                best_phi = best_phi.min(la.phi(k as f64 / steps as f64));
            }
        }
    }
    Ok(fro.min((0.5 * best_phi).exp()))
}

fn reduce(k: i64, m: i64) -> (i64, i64) {
    fn gcd(a: i64, b: i64) -> i64 {
        if b == 0 { a } else { gcd(b, a % b) }
    }
    let g = gcd(k, m).max(1);
    (k / g, m / g)
}

// ---------------------------------------------------------------------------
// Generation

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectrumProfile {
    LogUniform,
    Uniform,
    Clustered,
}

impl std::str::FromStr for SpectrumProfile {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.replace('_', "-").as_str() {
            "log-uniform" => Ok(Self::LogUniform),
            "uniform" => Ok(Self::Uniform),
            "clustered" => Ok(Self::Clustered),
            other => Err(invalid(format!("unknown spectrum profile '{other}'"))),
        }
    }
}

/// Haar-distributed orthogonal matrix (QR of a Gaussian matrix with the sign
/// of `R`'s diagonal folded into `Q`).
pub fn haar_orthogonal(n: usize, rng: &mut impl Rng) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for k in 0..n {
        if r[(k, k)] < 0.0 {
            q.column_mut(k).neg_mut();
        }
    }
    q
}

/// Eigenvalues on `[norm_cap/kappa, norm_cap]` with both endpoints present.
pub fn generate_spectrum(n: usize, kappa: f64, profile: SpectrumProfile, norm_cap: f64, rng: &mut impl Rng) -> Vec<f64> {
    let hi = norm_cap;
    let lo = norm_cap / kappa;
    let (llo, lhi) = (lo.ln(), hi.ln());
    let mut vals = vec![hi, lo];
    for k in 0..n.saturating_sub(2) {
        let u: f64 = rng.random();
        let v = match profile {
            SpectrumProfile::LogUniform => (llo + u * (lhi - llo)).exp(),
            SpectrumProfile::Uniform => lo + u * (hi - lo),
            SpectrumProfile::Clustered => {
                // three tight clusters in log-space: bottom, middle, top
                let centre = [llo, 0.5 * (llo + lhi), lhi][k % 3];
                let spread = 0.02 * (lhi - llo);
                (centre + (2.0 * u - 1.0) * spread).clamp(llo, lhi).exp()
            }
        };
        vals.push(v.clamp(lo, hi));
    }
    vals.sort_by(|a, b| b.total_cmp(a));
    vals
}

pub fn generate_spd(n: usize, kappa: f64, profile: SpectrumProfile, norm_cap: f64, seed: u64) -> Result<SymmetricMatrix> {
    if n < 2 {
        return Err(invalid("n must be at least 2"));
    }
    if !(kappa >= 1.0) || !kappa.is_finite() {
        return Err(invalid(format!("kappa must be >= 1, got {kappa}")));
    }
    if !(norm_cap > 0.0 && norm_cap <= 1.0) {
        return Err(invalid(format!("norm_cap must lie in (0, 1], got {norm_cap}")));
    }
    if kappa == 1.0 {
        return SymmetricMatrix::scaled_identity(n, norm_cap).into_spd();
    }
    let mut rng = rng::stream(seed, rng::label::GENERATE, 0);
    let vals = generate_spectrum(n, kappa, profile, norm_cap, &mut rng);
    let q = haar_orthogonal(n, &mut rng);
    let a = SymmetricMatrix::from_spectrum(&vals, &q);
    a.into_spd()
}

// ---------------------------------------------------------------------------
// Exact spectral sums

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectralFunction {
    Log,
    Inverse,
    XPowP(f64),
    NegXLogX,
    Exp,
}

/// `Σ_j f(λ_j)` from the full spectrum.
pub fn exact_spectral_sum(a: &SymmetricMatrix, f: SpectralFunction) -> Result<f64> {
    let s = a.spectral()?;
    let lmin = *s.eigenvalues.last().expect("n >= 1");
    match f {
        SpectralFunction::Log | SpectralFunction::Inverse => {
            if lmin <= 0.0 {
                return Err(domain(format!("eigenvalue {lmin:e} is not positive")));
            }
            Ok(match f {
                SpectralFunction::Log => s.sum(f64::ln),
                _ => s.sum(|x| 1.0 / x),
            })
        }
        SpectralFunction::XPowP(p) => {
            let integral = p.fract() == 0.0;
            if !integral && lmin < 0.0 {
                return Err(domain(format!("non-integer power {p} of negative eigenvalue {lmin:e}")));
            }
            Ok(s.sum(|x| if integral { x.powi(p as i32) } else { x.powf(p) }))
        }
        SpectralFunction::NegXLogX => {
            let lmax = s.eigenvalues[0];
            let noise = 1e-14 * a.dim() as f64;
            if lmin < -noise || lmax > 1.0 + noise {
                return Err(domain(format!("eigenvalues must lie in (0, 1], found [{lmin:e}, {lmax:e}]")));
            }
            Ok(s.sum(|x| if x <= 0.0 { 0.0 } else { -x * x.ln() }))
        }
        SpectralFunction::Exp => Ok(s.sum(f64::exp)),
    }
}

/// Schatten p-norm `(Σ σ_j^p)^{1/p}`.
pub fn schatten_norm(a: &SymmetricMatrix, p: f64) -> Result<f64> {
    Ok(a.spectral()?.singular_values.iter().map(|s| s.powf(p)).sum::<f64>().powf(1.0 / p))
}

/// Divides by `α = ‖A‖/target` so the result has spectral norm `target`.
pub fn scale_to_contraction(a: &SymmetricMatrix, target: f64) -> Result<(SymmetricMatrix, f64)> {
    if !(target > 0.0 && target < 1.0) {
        return Err(invalid(format!("target norm must lie in (0, 1), got {target}")));
    }
    let norm = a.spectral_norm()?;
    if norm == 0.0 {
        return Err(invalid("cannot rescale the zero matrix"));
    }
    let alpha = norm / target;
    Ok((a.scaled(1.0 / alpha), alpha))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn brute_mu(a: &DMatrix<f64>, points: usize) -> f64 {
        let mut best = a.norm();
        for k in 0..points {
            let p = k as f64 / (points - 1) as f64;
            best = best.min((row_power_sum(a, 2.0 * p) * row_power_sum(a, 2.0 - 2.0 * p)).sqrt());
        }
        best
    }

    #[test]
    fn construction_symmetrizes_within_tolerance() {
        let a = SymmetricMatrix::from_row_slice(2, &[1.0, 0.5, 0.5 + 1e-13, 1.0]).unwrap();
        assert_eq!(a.entries()[(0, 1)], a.entries()[(1, 0)]);
        assert!((a.entries()[(0, 1)] - 0.5).abs() <= 5e-14 + 1e-16);
        let err = SymmetricMatrix::from_row_slice(2, &[1.0, 0.5, 0.9, 1.0]).unwrap_err();
        assert!(err.to_string().contains("asymmetric beyond tolerance"));
        assert!(matches!(SymmetricMatrix::new(DMatrix::zeros(2, 3)), Err(Error::NotSquare(2, 3))));
    }

    #[test]
    fn spectra_of_small_cases() {
        let s = spectral_decompose(&SymmetricMatrix::scaled_identity(3, 1.0)).unwrap();
        assert_eq!(s.eigenvalues, vec![1.0; 3]);
        let d = SymmetricMatrix::from_diagonal(&[0.1, 0.5]);
        let s = spectral_decompose(&d).unwrap();
        assert_relative_eq!(s.eigenvalues[0], 0.5, epsilon = 1e-15);
        assert_relative_eq!(s.eigenvalues[1], 0.1, epsilon = 1e-15);
        assert_relative_eq!(s.eigenvectors[(1, 0)].abs(), 1.0, epsilon = 1e-15);
        assert_relative_eq!(s.eigenvectors[(0, 1)].abs(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn reconstruction_and_orthogonality() {
        let a = generate_spd(32, 20.0, SpectrumProfile::Uniform, 0.9, 3).unwrap();
        let s = a.spectral().unwrap();
        let n = 32.0;
        let norm = a.spectral_norm().unwrap();
        assert!((s.reconstruct() - a.entries()).norm() <= 1e-10 * n * norm);
        let u = &s.eigenvectors;
        assert!((u.transpose() * u - DMatrix::identity(32, 32)).norm() <= 1e-10 * n);
    }

    #[test]
    fn generated_spectrum_pins_endpoints() {
        let a = generate_spd(4, 1.0, SpectrumProfile::Clustered, 0.5, 7).unwrap();
        for v in &a.spectral().unwrap().eigenvalues {
            assert_relative_eq!(*v, 0.5, epsilon = 1e-15);
        }
        let a = generate_spd(64, 10.0, SpectrumProfile::LogUniform, 0.5, 1).unwrap();
        let s = a.spectral().unwrap();
        assert_relative_eq!(s.eigenvalues[0], 0.5, epsilon = 1e-13);
        assert_relative_eq!(*s.eigenvalues.last().unwrap(), 0.05, epsilon = 1e-13);
        assert_relative_eq!(a.condition_number().unwrap(), 10.0, max_relative = 1e-12);
        assert!(generate_spd(8, 0.5, SpectrumProfile::Uniform, 0.5, 1).is_err());
        assert!(generate_spd(1, 2.0, SpectrumProfile::Uniform, 0.5, 1).is_err());
    }

    #[test]
    fn generated_logdet_matches_independent_solver() {
        let a = generate_spd(64, 10.0, SpectrumProfile::LogUniform, 0.5, 1).unwrap();
        // Cholesky gives logdet = 2 Σ log L_ii without any eigensolver.
        let chol = a.entries().clone().cholesky().unwrap();
        let oracle: f64 = 2.0 * chol.l().diagonal().iter().map(|v| v.ln()).sum::<f64>();
        let ours = exact_spectral_sum(&a, SpectralFunction::Log).unwrap();
        assert!((ours - oracle).abs() <= 1e-9);
    }

    #[test]
    fn mu_small_cases() {
        let i = SymmetricMatrix::scaled_identity(5, 1.0);
        assert_relative_eq!(compute_mu(&i, 101).unwrap(), 1.0, epsilon = 1e-12);
        let mut m = DMatrix::zeros(4, 4);
        m[(0, 0)] = 0.3;
        let single = SymmetricMatrix::new(m).unwrap();
        assert_relative_eq!(compute_mu(&single, 101).unwrap(), 0.3, epsilon = 1e-12);
        assert!(compute_mu(&i, 1).is_err());
    }

    #[test]
    fn mu_against_fine_brute_force() {
        let a = generate_spd(24, 30.0, SpectrumProfile::LogUniform, 0.8, 11).unwrap();
        let mu = compute_mu(&a, 101).unwrap();
        let fine = brute_mu(a.entries(), 10_000);
        let coarse = brute_mu(a.entries(), 101);
        assert!(mu <= a.frobenius_norm() + 1e-15);
        assert!(mu >= a.spectral_norm().unwrap() - 1e-12);
        assert!(mu <= coarse + 1e-12);
        // the p-candidate is smooth, so one grid step changes it by a small relative amount
        assert!((mu - fine).abs() / fine <= 0.01);
    }

    #[test]
    fn exact_sums_on_identities() {
        let a = SymmetricMatrix::scaled_identity(6, 0.3);
        assert_relative_eq!(exact_spectral_sum(&a, SpectralFunction::Log).unwrap(), 6.0 * 0.3f64.ln(), epsilon = 1e-13);
        assert_relative_eq!(exact_spectral_sum(&a, SpectralFunction::Inverse).unwrap(), 20.0, epsilon = 1e-12);
        let b = SymmetricMatrix::from_row_slice(2, &[1.0, -2.0, -2.0, 0.5]).unwrap();
        assert_relative_eq!(
            exact_spectral_sum(&b, SpectralFunction::XPowP(2.0)).unwrap(),
            b.frobenius_norm().powi(2),
            max_relative = 1e-12
        );
        assert!(exact_spectral_sum(&b, SpectralFunction::Log).is_err());
        assert!(exact_spectral_sum(&b, SpectralFunction::XPowP(0.5)).is_err());
    }

    #[test]
    fn rescaling_round_trip() {
        let a = SymmetricMatrix::scaled_identity(3, 2.0);
        let (b, alpha) = scale_to_contraction(&a, 0.5).unwrap();
        assert_relative_eq!(alpha, 4.0, epsilon = 1e-15);
        assert_relative_eq!(b.entries()[(1, 1)], 0.5, epsilon = 1e-15);
        let (_, again) = scale_to_contraction(&b, 0.5).unwrap();
        assert_relative_eq!(again, 1.0, epsilon = 1e-14);

        let g = generate_spd(16, 8.0, SpectrumProfile::Uniform, 1.0, 5).unwrap().scaled(3.0);
        let (h, alpha) = scale_to_contraction(&g, 0.5).unwrap();
        let recovered = 16.0 * alpha.ln() + exact_spectral_sum(&h, SpectralFunction::Log).unwrap();
        let direct = exact_spectral_sum(&g, SpectralFunction::Log).unwrap();
        assert!((recovered - direct).abs() <= 1e-9);
        assert!(scale_to_contraction(&SymmetricMatrix::scaled_identity(2, 0.0), 0.5).is_err());
    }
}
