//! Classical randomized baselines: Hutchinson trace estimation combined with
//! Taylor or Chebyshev expansions applied to probe blocks.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, invalid, precondition, Result};
use crate::ledger::CostLedger;
use crate::matrix::SymmetricMatrix;
use crate::measurement::Estimate;
use crate::poly::{chebyshev_interpolant, chebyshev_logdet_setup, clenshaw, taylor_logdet_degree};
use crate::rng;
use crate::sums::{exact_value, logdet_budget, require_spd, spectral_floor, AlgoConfig, Algorithm, Guarantee, Outcome, SpectralSumReport};

/// Probe columns processed together; each block has its own stream.
const BLOCK: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ProbeKind {
    #[default]
    Rademacher,
    Gaussian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeConfig {
    pub num_probes: usize,
    pub probe_kind: ProbeKind,
    pub seed: u64,
}

/// `⌈24 ln(2/δ)/ε²⌉`.
pub fn hutchinson_probes(eps: f64, delta: f64) -> Result<usize> {
    if !(eps > 0.0) || !(delta > 0.0 && delta < 1.0) {
        return Err(invalid(format!("need eps > 0 and delta in (0, 1), got ({eps}, {delta})")));
    }
    Ok((24.0 * (2.0 / delta).ln() / (eps * eps)).ceil() as usize)
}

fn probe_block(n: usize, cols: usize, kind: ProbeKind, seed: u64, block: u64) -> DMatrix<f64> {
    let mut r = rng::stream(seed, rng::label::PROBES, block);
    match kind {
        ProbeKind::Rademacher => DMatrix::from_fn(n, cols, |_, _| if r.random::<bool>() { 1.0 } else { -1.0 }),
        ProbeKind::Gaussian => DMatrix::from_fn(n, cols, |_, _| r.sample::<f64, _>(StandardNormal)),
    }
}

/// Mean of `zᵀ(Mz)` over probes, where `apply` maps a block of probe columns
/// to `M` times it. `abs_error_bound` carries the sample standard error and
/// the ledger counts one operator application per probe.
pub fn hutchinson_trace<F>(apply: F, n: usize, cfg: &ProbeConfig) -> Result<Estimate>
where
    F: Fn(&DMatrix<f64>) -> DMatrix<f64> + Sync,
{
    if cfg.num_probes == 0 {
        return Err(invalid("need at least one probe"));
    }
    let blocks = cfg.num_probes.div_ceil(BLOCK);
    let samples: Vec<f64> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let cols = BLOCK.min(cfg.num_probes - b * BLOCK);
            let z = probe_block(n, cols, cfg.probe_kind, cfg.seed, b as u64);
            let mz = apply(&z);
            (0..cols).map(|c| z.column(c).dot(&mz.column(c))).collect::<Vec<_>>()
        })
        .collect::<Vec<_>>()
        .concat();
    let k = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / k;
    let stderr = if samples.len() > 1 {
        (samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (k - 1.0) / k).sqrt()
    } else {
        0.0
    };
    let matvecs = k;
    Ok(Estimate {
        value: mean,
        abs_error_bound: stderr,
        success_prob: 1.0,
        queries_charged: matvecs * (n * n) as f64,
        seed: cfg.seed,
        failed: false,
        ledger: CostLedger { queries: matvecs * (n * n) as f64, matvecs, shots: k, ..Default::default() },
    })
}

/// Charges `per_probe` matrix-vector products for every probe.
fn scale_cost(mut e: Estimate, per_probe: f64) -> Estimate {
    e.ledger.matvecs *= per_probe;
    e.ledger.queries *= per_probe;
    e.queries_charged = e.ledger.queries;
    e
}

fn probe_config(cfg: &AlgoConfig, eps: f64) -> Result<ProbeConfig> {
    Ok(ProbeConfig {
        num_probes: match cfg.probes {
            Some(p) => p,
            None => hutchinson_probes(eps, cfg.delta)?,
        },
        probe_kind: ProbeKind::Rademacher,
        seed: rng::derive(cfg.seed, rng::label::PROBES),
    })
}

/// `−Σ_{k≤m} Tr[(I − A)^k]/k` with `m` from the Taylor truncation bound at
/// `ε/4`.
pub fn classical_logdet_taylor(a: &SymmetricMatrix, cfg: &AlgoConfig) -> Result<(Estimate, usize)> {
    let spec = a.spectral()?;
    require_spd(spec)?;
    if spec.singular_values[0] > 1.0 + 1e-12 {
        return Err(precondition("Taylor log-determinant needs ||A|| <= 1"));
    }
    let (_, kappa) = spectral_floor(spec, cfg)?;
    let m = taylor_logdet_degree(kappa, cfg.eps / 4.0)?;
    let probes = probe_config(cfg, cfg.eps)?;
    let m_ = a.entries();
    let e = hutchinson_trace(
        |z| {
            let mut v = z.clone();
            let mut acc = DMatrix::zeros(z.nrows(), z.ncols());
            for k in 1..=m {
                v = &v - m_ * &v;
                acc += &v / k as f64;
            }
            -acc
        },
        a.dim(),
        &probes,
    )?;
    Ok((scale_cost(e, m as f64), m))
}

/// `Σ c_j Tr[T_j(I − A)]` by the three-term recurrence on probe blocks.
fn chebyshev_apply(a: &DMatrix<f64>, coeffs: &[f64], lo: f64, hi: f64, z: &DMatrix<f64>) -> DMatrix<f64> {
    // x = (2λ − (hi + lo))/(hi − lo)
    let (s, t) = (2.0 / (hi - lo), (hi + lo) / (hi - lo));
    let map = |v: &DMatrix<f64>| a * v * s - v * t;
    let mut prev = z.clone();
    let mut acc = &prev * coeffs[0];
    if coeffs.len() == 1 {
        return acc;
    }
    let mut cur = map(z);
    acc += &cur * coeffs[1];
    for c in &coeffs[2..] {
        let next = map(&cur) * 2.0 - &prev;
        acc += &next * *c;
        prev = cur;
        cur = next;
    }
    acc
}

/// Chebyshev expansion of `log(1 − x)` on `B = I − A`, degree chosen so the
/// truncation stays within `ε·n log(1/‖A‖)/2`.
pub fn classical_logdet_chebyshev(a: &SymmetricMatrix, cfg: &AlgoConfig) -> Result<(Estimate, usize)> {
    let spec = a.spectral()?;
    require_spd(spec)?;
    let norm = spec.singular_values[0];
    let (smin, _) = spectral_floor(spec, cfg)?;
    let delta = smin.min(1.0 - norm).min(0.499);
    if !(delta > 0.0) {
        return Err(precondition("Chebyshev log-determinant needs the spectrum inside [delta, 1 - delta]"));
    }
    let (budget, _) = logdet_budget(norm);
    let setup = chebyshev_logdet_setup(delta, cfg.eps * budget / 2.0)?;
    let probes = probe_config(cfg, cfg.eps)?;
    let b = DMatrix::identity(a.dim(), a.dim()) - a.entries();
    // T_j(B/scale): the interval [−scale, scale] maps onto [−1, 1]
    let e = hutchinson_trace(|z| chebyshev_apply(&b, &setup.coefficients, -setup.scale, setup.scale, z), a.dim(), &probes)?;
    Ok((scale_cost(e, setup.degree as f64), setup.degree))
}

/// Interpolation degree for `f` on `[lo, hi]` with pointwise error at most
/// `rel · min|f|` on a fine grid.
fn interpolation_degree(f: &(dyn Fn(f64) -> f64 + Sync), lo: f64, hi: f64, rel: f64) -> Result<Vec<f64>> {
    let g = |x: f64| f(0.5 * (hi - lo) * x + 0.5 * (hi + lo));
    let grid: Vec<f64> = (0..=2000).map(|i| -1.0 + 2.0 * i as f64 / 2000.0).collect();
    let fmax = grid.iter().map(|x| g(*x).abs()).fold(0.0, f64::max);
    let fmin = grid.iter().map(|x| g(*x).abs()).fold(f64::INFINITY, f64::min);
    let tol = rel * fmin.max(1e-10 * fmax);
    let mut d = 4;
    while d <= 4096 {
        let c = chebyshev_interpolant(&g, d);
        if grid.iter().all(|x| (clenshaw(&c, *x) - g(*x)).abs() <= tol) {
            return Ok(c);
        }
        d *= 2;
    }
    Err(crate::Error::NoConvergence(d))
}

/// `Tr[f(M)]` for `f` interpolated on the interval `[lo, hi]` containing the
/// spectrum of `M`.
fn classical_function_trace(m: &DMatrix<f64>, f: &(dyn Fn(f64) -> f64 + Sync), lo: f64, hi: f64, matvec_weight: f64, cfg: &AlgoConfig) -> Result<(Estimate, usize)> {
    let pad = (1e-9 * hi.abs()).max(1e-12);
    let (lo, hi) = (lo - pad, hi + pad);
    let coeffs = interpolation_degree(f, lo, hi, cfg.eps / 4.0)?;
    let probes = probe_config(cfg, cfg.eps)?;
    let e = hutchinson_trace(|z| chebyshev_apply(m, &coeffs, lo, hi, z), m.nrows(), &probes)?;
    let d = coeffs.len() - 1;
    Ok((scale_cost(e, d as f64 * matvec_weight), d))
}

pub fn classical_entropy(rho: &SymmetricMatrix, cfg: &AlgoConfig) -> Result<(Estimate, usize)> {
    let tr = rho.trace();
    if (tr - 1.0).abs() > 1e-10 {
        return Err(precondition(format!("density matrix must have unit trace, got {tr}")));
    }
    let spec = rho.spectral()?;
    let (lo, hi) = (*spec.eigenvalues.last().expect("n >= 1"), spec.eigenvalues[0]);
    if lo <= 0.0 {
        return Err(domain(format!("eigenvalue {lo:e} is not positive")));
    }
    classical_function_trace(rho.entries(), &|x: f64| -x * x.ln(), lo, hi, 1.0, cfg)
}

pub fn classical_trace_inverse(a: &SymmetricMatrix, cfg: &AlgoConfig) -> Result<(Estimate, usize)> {
    let spec = a.spectral()?;
    require_spd(spec)?;
    let (smin, _) = spectral_floor(spec, cfg)?;
    classical_function_trace(a.entries(), &|x: f64| 1.0 / x, smin, spec.eigenvalues[0], 1.0, cfg)
}

/// `(Tr[(A²)^{p/2}])^{1/p}`.
pub fn classical_schatten_p(a: &SymmetricMatrix, p: u32, cfg: &AlgoConfig) -> Result<(Estimate, usize)> {
    if p == 0 {
        return Err(invalid("Schatten norms need p >= 1"));
    }
    let spec = a.spectral()?;
    let (smin, _) = spectral_floor(spec, cfg)?;
    let norm = spec.singular_values[0];
    let sq = a.entries() * a.entries();
    let half = p as f64 / 2.0;
    let (mut e, d) = classical_function_trace(&sq, &move |y: f64| y.max(0.0).powf(half), smin * smin, norm * norm, 2.0, cfg)?;
    e.value = e.value.max(0.0).powf(1.0 / p as f64);
    Ok((e, d))
}

/// Runs a classical variant and wraps it in a report with the exact value.
pub fn run_classical(a: &SymmetricMatrix, cfg: &AlgoConfig) -> Result<SpectralSumReport> {
    cfg.validate()?;
    let (mut est, degree) = match cfg.algorithm {
        Algorithm::ClassicalLogdetTaylor => classical_logdet_taylor(a, cfg)?,
        Algorithm::ClassicalLogdetChebyshev => classical_logdet_chebyshev(a, cfg)?,
        Algorithm::ClassicalSchattenP { p } => classical_schatten_p(a, p, cfg)?,
        Algorithm::ClassicalEntropy => classical_entropy(a, cfg)?,
        Algorithm::ClassicalTraceInverse => classical_trace_inverse(a, cfg)?,
        other => return Err(invalid(format!("{} is not a classical baseline", other.name()))),
    };
    let stderr = est.abs_error_bound;
    let n = a.dim();
    let exact = exact_value(a, cfg.algorithm)?;
    est.abs_error_bound = cfg.eps * exact.abs();
    est.success_prob = 1.0 - cfg.delta;
    est.seed = cfg.seed;
    let probes = est.ledger.shots;
    let mut out = Outcome::new(est, Guarantee::Relative(cfg.eps));
    out.param("degree", degree as f64).param("num_probes", probes).param("stderr", stderr);
    out.notes.push("Hutchinson concentration: relative guarantee holds with probability 1 - delta".into());
    out.polylog = (2.0 / cfg.delta).ln() * (n * n) as f64;
    Ok(out.into_report(cfg.algorithm.name(), n, exact))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{generate_spd, SpectrumProfile};
    use crate::qmodel::NoiseMode;

    fn probes(k: usize, seed: u64) -> ProbeConfig {
        ProbeConfig { num_probes: k, probe_kind: ProbeKind::Rademacher, seed }
    }

    #[test]
    fn identity_is_exact_with_rademacher() {
        let e = hutchinson_trace(|z| z.clone(), 7, &probes(5, 1)).unwrap();
        assert_eq!(e.value, 7.0);
        assert_eq!(e.ledger.matvecs, 5.0);
    }

    #[test]
    fn diagonal_converges() {
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 2.0, 3.0]));
        let e = hutchinson_trace(|z| &m * z, 3, &probes(10_000, 2)).unwrap();
        assert!((e.value - 6.0).abs() <= 3.0 * e.abs_error_bound, "{} ± {}", e.value, e.abs_error_bound);
    }

    #[test]
    fn single_probe_is_unbiased() {
        let a = generate_spd(6, 5.0, SpectrumProfile::Uniform, 1.0, 3).unwrap();
        let m = a.entries().clone();
        let draws: Vec<f64> = (0..100_000u64).map(|s| hutchinson_trace(|z| &m * z, 6, &probes(1, s)).unwrap().value).collect();
        let mean = draws.iter().sum::<f64>() / draws.len() as f64;
        let sd = (draws.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / draws.len() as f64).sqrt();
        assert!((mean - a.trace()).abs() <= 3.0 * sd / (draws.len() as f64).sqrt());
    }

    #[test]
    fn thread_count_does_not_change_result() {
        let m = generate_spd(20, 5.0, SpectrumProfile::Uniform, 1.0, 3).unwrap().entries().clone();
        let run = |threads| {
            rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(|| {
                hutchinson_trace(|z| &m * z, 20, &probes(500, 9)).unwrap().value
            })
        };
        assert_eq!(run(1).to_bits(), run(4).to_bits());
    }

    fn cfg(alg: Algorithm, probes: usize) -> AlgoConfig {
        let mut c = AlgoConfig::new(alg, 0.1, 0.1, NoiseMode::Stochastic, 4);
        c.probes = Some(probes);
        c
    }

    #[test]
    fn scalar_identities() {
        let a = SymmetricMatrix::scaled_identity(8, 0.5);
        let r = run_classical(&a, &cfg(Algorithm::ClassicalLogdetTaylor, 4)).unwrap();
        assert!(r.within_guarantee, "{r:?}");
        let r = run_classical(&a, &cfg(Algorithm::ClassicalTraceInverse, 4)).unwrap();
        assert!((r.estimate.value - 16.0).abs() < 1e-6 * 16.0);
        let rho = SymmetricMatrix::scaled_identity(8, 1.0 / 8.0);
        let r = run_classical(&rho, &cfg(Algorithm::ClassicalEntropy, 4)).unwrap();
        assert!((r.estimate.value - 8f64.ln()).abs() < 0.1 * 8f64.ln() / 4.0);
    }

    #[test]
    fn schatten_two_within_stderr() {
        let a = generate_spd(16, 5.0, SpectrumProfile::Uniform, 0.9, 1).unwrap();
        let r = run_classical(&a, &cfg(Algorithm::ClassicalSchattenP { p: 2 }, 2000)).unwrap();
        let s = r.parameters["stderr"];
        // stderr is on ‖A‖_F², pass through the square root
        assert!((r.estimate.value.powi(2) - a.frobenius_norm().powi(2)).abs() <= 4.0 * s + 1e-9);
    }

    #[test]
    fn chebyshev_matches_exact_traces() {
        let a = SymmetricMatrix::from_diagonal(&[0.3, 0.5, 0.7, 0.2]);
        let c = cfg(Algorithm::ClassicalLogdetChebyshev, 64);
        let (e, d) = classical_logdet_chebyshev(&a, &c).unwrap();
        let coeffs = crate::poly::chebyshev_log_coefficients_scaled(0.2, d);
        let oracle: f64 = [0.3, 0.5, 0.7, 0.2].iter().map(|l| clenshaw(&coeffs, (1.0 - l) / 0.8)).sum();
        // diagonal matrix: Rademacher probes are exact
        assert!((e.value - oracle).abs() < 1e-10);
    }

    #[test]
    fn matvecs_scale_with_degree_and_probes() {
        let a = generate_spd(16, 5.0, SpectrumProfile::Uniform, 0.8, 1).unwrap();
        let (e1, d1) = classical_logdet_taylor(&a, &cfg(Algorithm::ClassicalLogdetTaylor, 10)).unwrap();
        let (e2, _) = classical_logdet_taylor(&a, &cfg(Algorithm::ClassicalLogdetTaylor, 20)).unwrap();
        assert_eq!(e1.ledger.matvecs, 10.0 * d1 as f64);
        assert_eq!(e2.ledger.matvecs, 2.0 * e1.ledger.matvecs);
    }
}
