//! Acceptance suites. Each criterion is a deterministic function returning
//! one pass/fail line; tolerances are pinned here.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::fit::loglog_fit;
use crate::matrix::{generate_spd, SpectrumProfile, SymmetricMatrix};
use crate::measurement::{ae_bound, amplitude_estimate};
use crate::output::to_json;
use crate::poly::{
    approx_inverse, approx_log, approx_monomial, approx_sqrt, chebyshev_log_coefficients_scaled, chebyshev_truncation_bound,
    clenshaw, entropy_poly, taylor_logdet_degree, ChebyshevSeries,
};
use crate::qmodel::NoiseMode;
use crate::rng;
use crate::sums::{qmc_variance_bound, run, zhao_rounded_logdet, zhao_variance, AlgoConfig, Algorithm, RoundingCorrelation, SpectralSumReport};

/// Success probability of one amplitude estimation.
const AE_SUCCESS: f64 = 8.0 / (std::f64::consts::PI * std::f64::consts::PI);
/// Grid points per interval when measuring polynomial errors.
const GRID: usize = 20_001;
/// Round-off allowance on top of a closed-form error bound.
const ROUNDOFF: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Lemmas,
    Algorithms,
    Scaling,
    All,
}

impl std::str::FromStr for Suite {
    type Err = crate::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lemmas" => Ok(Self::Lemmas),
            "algorithms" => Ok(Self::Algorithms),
            "scaling" => Ok(Self::Scaling),
            "all" => Ok(Self::All),
            other => Err(invalid(format!("unknown suite '{other}' (expected lemmas, algorithms, scaling or all)"))),
        }
    }
}

impl Suite {
    pub fn criteria(&self) -> Vec<u32> {
        match self {
            Self::Lemmas => vec![1, 2, 5, 7],
            Self::Algorithms => vec![3, 4, 8, 9, 10],
            Self::Scaling => vec![6],
            Self::All => (1..=10).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub id: u32,
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "criterion {:>2} [{}] {}: {} ({:.1}s)",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.detail,
            self.seconds
        )
    }
}

pub const CRITERIA: [(u32, &str); 10] = [
    (1, "polynomial lemma certification"),
    (2, "truncation bounds with exact traces"),
    (3, "guarantee soundness, exact noise"),
    (4, "guarantee soundness, stochastic noise"),
    (5, "amplitude-estimation contract"),
    (6, "scaling laws from the query ledger"),
    (7, "variance lemmas"),
    (8, "trivial identities"),
    (9, "cross-algorithm log-det consistency"),
    (10, "determinism across runs and thread counts"),
];

pub fn run_criterion(id: u32) -> Result<CriterionResult> {
    let name = CRITERIA
        .iter()
        .find(|c| c.0 == id)
        .map(|c| c.1.to_string())
        .ok_or_else(|| invalid(format!("no criterion {id}")))?;
    let t0 = Instant::now();
    let outcome = match id {
        1 => polynomial_lemmas(),
        2 => truncation_bounds(),
        3 => soundness_exact(),
        4 => soundness_stochastic(),
        5 => amplitude_contract(),
        6 => scaling_laws(),
        7 => variance_lemmas(),
        8 => trivial_identities(),
        9 => cross_consistency(),
        _ => determinism(),
    };
    let (passed, detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
    Ok(CriterionResult { id, name, passed, detail, seconds: t0.elapsed().as_secs_f64() })
}

pub fn run_suite(suite: Suite) -> Vec<CriterionResult> {
    suite.criteria().into_iter().map(|id| run_criterion(id).expect("suite ids are valid")).collect()
}

type Check = Result<(bool, String)>;

// ---------------------------------------------------------------------------
// Instances

pub const SOUNDNESS_N: [usize; 3] = [32, 64, 128];
pub const SOUNDNESS_KAPPA: [f64; 3] = [5.0, 10.0, 50.0];

/// The eleven estimator configurations of the soundness criteria.
pub fn soundness_algorithms() -> Vec<Algorithm> {
    let mut v = vec![Algorithm::LogdetSvt];
    v.extend((1..=4).map(|p| Algorithm::SchattenP { p }));
    v.extend([
        Algorithm::VnEntropy,
        Algorithm::TraceInverse,
        Algorithm::LogdetSve,
        Algorithm::LogdetTaylor,
        Algorithm::LogdetChebyshev,
        Algorithm::LogdetQmc,
    ]);
    v
}

/// Log-uniform spectrum with `‖A‖ = 1/2`, rescaled to unit trace for the
/// entropy.
pub fn instance(algorithm: Algorithm, n: usize, kappa: f64, seed: u64) -> Result<SymmetricMatrix> {
    let a = generate_spd(n, kappa, SpectrumProfile::LogUniform, 0.5, seed)?;
    Ok(if algorithm == Algorithm::VnEntropy { a.scaled(1.0 / a.trace()) } else { a })
}

fn grid_instance(algorithm: Algorithm, k: usize) -> Result<SymmetricMatrix> {
    let n = SOUNDNESS_N[k % 3];
    let kappa = SOUNDNESS_KAPPA[(k / 3) % 3];
    instance(algorithm, n, kappa, 1000 + k as u64)
}

// ---------------------------------------------------------------------------
// 1

fn sup_error(series: &ChebyshevSeries) -> f64 {
    series.measured_error(GRID)
}

fn polynomial_lemmas() -> Check {
    let mut failures = vec![];
    let mut worst_monomial: f64 = 0.0;
    for (s, d) in [(4u32, 4u32), (16, 8), (16, 16), (64, 24), (64, 64)] {
        let p = approx_monomial(s, d)?;
        let err = (0..GRID)
            .into_par_iter()
            .map(|i| {
                let x = -1.0 + 2.0 * i as f64 / (GRID - 1) as f64;
                (p.value(x) - x.powi(s as i32)).abs()
            })
            .reduce(|| 0.0, f64::max);
        let bound = 2.0 * (-(d as f64).powi(2) / (2.0 * s as f64)).exp();
        worst_monomial = worst_monomial.max(err / (bound + ROUNDOFF));
        if err > bound + ROUNDOFF {
            failures.push(format!("monomial s={s} d={d}: {err:e} > {bound:e}"));
        }
    }
    let mut count = 0;
    for beta in [0.25, 0.1, 1.0 / 32.0] {
        for eps in [1e-2, 1e-3] {
            let series = [
                ("log", approx_log(beta, eps)?),
                ("inverse", approx_inverse(beta, eps)?),
                ("sqrt", approx_sqrt(beta, eps)?),
                ("entropy", entropy_poly(beta, eps)?),
            ];
            for (name, p) in series {
                count += 1;
                let err = sup_error(&p);
                let glob = p.measured_global_bound(GRID);
                if err > eps || glob > 0.5 {
                    failures.push(format!("{name} beta={beta} eps={eps}: error {err:e}, global {glob:.4}"));
                }
            }
        }
    }
    let detail = if failures.is_empty() {
        format!("5 monomial cases (worst error/bound {worst_monomial:.3}), {count} series certified and bounded by 1/2")
    } else {
        failures.join("; ")
    };
    Ok((failures.is_empty(), detail))
}

// ---------------------------------------------------------------------------
// 2

fn truncation_bounds() -> Check {
    let mut worst_taylor: f64 = 0.0;
    let mut taylor_fail = 0;
    let mut cases = 0;
    for kappa in [5.0, 10.0, 50.0] {
        for k in 0..20u64 {
            let a = generate_spd(64, kappa, SpectrumProfile::LogUniform, 1.0, 2000 + k)?;
            let spec = a.spectral()?;
            let exact: f64 = spec.eigenvalues.iter().map(|l| l.ln()).sum();
            for eps in [0.1, 0.01] {
                let m = taylor_logdet_degree(kappa, eps)?;
                let est: f64 = spec
                    .eigenvalues
                    .iter()
                    .map(|l| {
                        let b = 1.0 - l;
                        let mut pow = 1.0;
                        -(1..=m).map(|j| {
                            pow *= b;
                            pow / j as f64
                        })
                        .sum::<f64>()
                    })
                    .sum();
                let rel = (est - exact).abs() / exact.abs();
                worst_taylor = worst_taylor.max(rel / eps);
                cases += 1;
                if rel > eps {
                    taylor_fail += 1;
                }
            }
        }
    }
    let delta = 0.1;
    let n = 64;
    let mut worst_cheb: f64 = 0.0;
    let mut cheb_fail = 0;
    for k in 0..5u64 {
        // spectrum on [δ, 1 − δ]
        let a = generate_spd(n, (1.0 - delta) / delta, SpectrumProfile::LogUniform, 1.0 - delta, 3000 + k)?;
        let spec = a.spectral()?;
        let exact: f64 = spec.eigenvalues.iter().map(|l| l.ln()).sum();
        for d in 0..=30 {
            let c = chebyshev_log_coefficients_scaled(delta, d);
            let est: f64 = spec.eigenvalues.iter().map(|l| clenshaw(&c, (1.0 - l) / (1.0 - delta))).sum();
            let bound = n as f64 * chebyshev_truncation_bound(delta, d);
            let err = (est - exact).abs();
            worst_cheb = worst_cheb.max(err / bound);
            if err > bound + ROUNDOFF * exact.abs() {
                cheb_fail += 1;
            }
        }
    }
    let ok = taylor_fail == 0 && cheb_fail == 0;
    Ok((
        ok,
        format!(
            "Taylor {}/{cases} within eps (worst error/eps {worst_taylor:.3}); Chebyshev {} of 155 (matrix, d) cases over bound (worst error/bound {worst_cheb:.3})",
            cases - taylor_fail,
            cheb_fail
        ),
    ))
}

// ---------------------------------------------------------------------------
// 3, 4

fn soundness(mode: NoiseMode, count: usize) -> Result<Vec<(Algorithm, usize, Vec<String>)>> {
    soundness_algorithms()
        .into_iter()
        .map(|alg| {
            let outcomes: Vec<Result<(bool, String)>> = (0..count)
                .into_par_iter()
                .map(|k| {
                    let a = grid_instance(alg, k)?;
                    let cfg = AlgoConfig::new(alg, 0.1, 0.1, mode, k as u64);
                    let r = run(&a, &cfg)?;
                    Ok((r.within_guarantee, format!("n={} seed={k}: error {:e} > {:e}", r.n, r.error, r.guarantee_bound)))
                })
                .collect();
            let mut passed = 0;
            let mut misses = vec![];
            for o in outcomes {
                let (ok, msg) = o?;
                if ok {
                    passed += 1;
                } else {
                    misses.push(msg);
                }
            }
            Ok((alg, passed, misses))
        })
        .collect()
}

fn soundness_exact() -> Check {
    let rows = soundness(NoiseMode::Exact, 100)?;
    let mut ok = true;
    let mut parts = vec![];
    for (alg, passed, misses) in rows {
        if passed < 100 {
            ok = false;
            parts.push(format!("{} {passed}/100 [{}]", alg.name(), misses.first().cloned().unwrap_or_default()));
        } else {
            parts.push(format!("{} 100/100", alg.name()));
        }
    }
    Ok((ok, parts.join(", ")))
}

/// `1 − δ − 3σ` with the binomial `σ` of `seeds` draws.
pub fn stochastic_threshold(delta: f64, seeds: usize) -> f64 {
    let p = 1.0 - delta;
    p - 3.0 * (p * (1.0 - p) / seeds as f64).sqrt()
}

fn soundness_stochastic() -> Check {
    let seeds = 200;
    let threshold = stochastic_threshold(0.1, seeds);
    let rows = soundness(NoiseMode::Stochastic, seeds)?;
    let mut ok = true;
    let mut parts = vec![];
    for (alg, passed, _) in rows {
        let frac = passed as f64 / seeds as f64;
        ok &= frac >= threshold;
        parts.push(format!("{} {frac:.3}", alg.name()));
    }
    Ok((ok, format!("threshold {threshold:.4}: {}", parts.join(", "))))
}

// ---------------------------------------------------------------------------
// 5

fn amplitude_contract() -> Check {
    let draws = 10_000u64;
    let sigma = (AE_SUCCESS * (1.0 - AE_SUCCESS) / draws as f64).sqrt();
    let threshold = AE_SUCCESS - 3.0 * sigma;
    let mut ok = true;
    let mut worst: f64 = 1.0;
    for a in [0.1, 0.3, 0.5, 0.9] {
        for t in [50u64, 200] {
            let bound = ae_bound(a, t);
            let hits = (0..draws)
                .into_par_iter()
                .map(|k| {
                    let seed = rng::derive(rng::derive(k, t), a.to_bits());
                    amplitude_estimate(a, t, NoiseMode::Stochastic, 1.0, seed).map(|e| u64::from((e.value - a).abs() <= bound))
                })
                .collect::<Result<Vec<u64>>>()?
                .into_iter()
                .sum::<u64>();
            let frac = hits as f64 / draws as f64;
            worst = worst.min(frac);
            ok &= frac >= threshold;
        }
    }
    Ok((ok, format!("lowest within-bound fraction {worst:.4} over 8 (a, t) cells, threshold {threshold:.4}")))
}

// ---------------------------------------------------------------------------
// 6

pub const SCALING_EPS: [f64; 4] = [0.2, 0.1, 0.05, 0.025];
pub const SCALING_KAPPA: [f64; 4] = [5.0, 10.0, 20.0, 40.0];

/// Fitted slope of soft queries against `1/ε` on the scaling instance.
pub fn eps_slope(alg: Algorithm) -> Result<f64> {
    let a = instance(alg, 32, 10.0, 1)?;
    let reports: Vec<SpectralSumReport> =
        SCALING_EPS.iter().map(|&e| run(&a, &AlgoConfig::new(alg, e, 0.1, NoiseMode::Exact, 1))).collect::<Result<_>>()?;
    let inv: Vec<f64> = SCALING_EPS.iter().map(|e| 1.0 / e).collect();
    let q: Vec<f64> = reports.iter().map(|r| r.soft_queries).collect();
    loglog_fit(&inv, &q).slope.ok_or_else(|| invalid("degenerate fit"))
}

/// Fitted slope of soft queries against `κ` at `ε = 0.1`.
pub fn kappa_slope(alg: Algorithm) -> Result<f64> {
    let reports: Vec<SpectralSumReport> = SCALING_KAPPA
        .iter()
        .map(|&k| run(&instance(alg, 32, k, 1)?, &AlgoConfig::new(alg, 0.1, 0.1, NoiseMode::Exact, 1)))
        .collect::<Result<_>>()?;
    let q: Vec<f64> = reports.iter().map(|r| r.soft_queries).collect();
    loglog_fit(&SCALING_KAPPA, &q).slope.ok_or_else(|| invalid("degenerate fit"))
}

fn scaling_laws() -> Check {
    let eps_cases: [(Algorithm, f64, f64); 8] = [
        (Algorithm::LogdetSvt, 0.85, 1.15),
        (Algorithm::SchattenP { p: 3 }, 0.85, 1.15),
        (Algorithm::VnEntropy, 0.85, 1.15),
        (Algorithm::TraceInverse, 0.85, 1.15),
        (Algorithm::LogdetSve, 1.7, 2.3),
        (Algorithm::LogdetTaylor, 1.7, 2.3),
        (Algorithm::LogdetChebyshev, 1.7, 2.3),
        (Algorithm::LogdetQmc, 1.7, 2.3),
    ];
    let kappa_cases: [(Algorithm, f64, f64); 3] =
        [(Algorithm::LogdetSvt, 0.85, 1.15), (Algorithm::TraceInverse, 1.7, 2.3), (Algorithm::LogdetSve, 2.6, 3.4)];
    let mut ok = true;
    let mut parts = vec![];
    for (alg, lo, hi) in eps_cases {
        let s = eps_slope(alg)?;
        ok &= (lo..=hi).contains(&s);
        parts.push(format!("{} eps {s:.3}", alg.name()));
    }
    for (alg, lo, hi) in kappa_cases {
        let s = kappa_slope(alg)?;
        ok &= (lo..=hi).contains(&s);
        parts.push(format!("{} kappa {s:.3}", alg.name()));
    }
    Ok((ok, parts.join(", ")))
}

// ---------------------------------------------------------------------------
// 7

fn variance_lemmas() -> Check {
    let mut held = 0;
    for k in 0..100u64 {
        let kappa = [4.0, 10.0, 50.0, 100.0][(k % 4) as usize];
        // σ log-uniform on [1/κ, 1/2], endpoints included
        let mut r = rng::stream(k, rng::label::GENERATE, 7);
        let (lo, hi) = ((1.0 / kappa as f64).ln(), 0.5f64.ln());
        let mut sigma: Vec<f64> = (0..62).map(|_| (lo + rand::Rng::random::<f64>(&mut r) * (hi - lo)).exp()).collect();
        sigma.extend([1.0 / kappa, 0.5]);
        if qmc_variance_bound(&sigma, kappa).holds {
            held += 1;
        }
    }
    let a = generate_spd(16, 10.0, SpectrumProfile::LogUniform, 1.0, 7)?;
    let trials = 10_000u64;
    let draws: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| zhao_rounded_logdet(&a, 0.1, RoundingCorrelation::Shared, 7, t))
        .collect::<Result<_>>()?;
    let m = draws.iter().sum::<f64>() / trials as f64;
    let v = draws.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (trials - 1) as f64;
    let ratio = v / zhao_variance(16, 0.1, a.condition_number()?);
    let ok = held == 100 && (0.5..=2.0).contains(&ratio);
    Ok((ok, format!("QMC variance bound held on {held}/100 spectra; rounded-estimator variance / formula = {ratio:.4}")))
}

// ---------------------------------------------------------------------------
// 8

fn identity_check(a: &SymmetricMatrix, alg: Algorithm, expected: f64) -> Result<(bool, String)> {
    let r = run(a, &AlgoConfig::new(alg, 0.1, 0.1, NoiseMode::Exact, 1))?;
    let err = (r.estimate.value - expected).abs();
    Ok((err <= r.guarantee_bound, format!("{} {:.6} vs {expected:.6}", alg.name(), r.estimate.value)))
}

fn trivial_identities() -> Check {
    let c = 0.5;
    let n = 16;
    let ci = SymmetricMatrix::scaled_identity(n, c);
    let nf = n as f64;
    let mut checks = vec![
        identity_check(&ci, Algorithm::LogdetSvt, nf * c.ln())?,
        identity_check(&ci, Algorithm::TraceInverse, nf / c)?,
        identity_check(&SymmetricMatrix::scaled_identity(n, 1.0 / nf), Algorithm::VnEntropy, nf.ln())?,
    ];
    for p in 1..=4u32 {
        checks.push(identity_check(&ci, Algorithm::SchattenP { p }, c * nf.powf(1.0 / p as f64))?);
    }
    let a = generate_spd(32, 10.0, SpectrumProfile::LogUniform, 0.5, 8)?;
    checks.push(identity_check(&a, Algorithm::SchattenP { p: 2 }, a.frobenius_norm())?);
    let ok = checks.iter().all(|c| c.0);
    let parts: Vec<String> = checks.into_iter().map(|(ok, s)| if ok { s } else { format!("MISS {s}") }).collect();
    Ok((ok, parts.join(", ")))
}

// ---------------------------------------------------------------------------
// 9

pub const LOGDET_ALGORITHMS: [Algorithm; 5] =
    [Algorithm::LogdetSvt, Algorithm::LogdetSve, Algorithm::LogdetTaylor, Algorithm::LogdetChebyshev, Algorithm::LogdetQmc];

fn cross_consistency() -> Check {
    let results: Vec<Result<(usize, Vec<String>)>> = (0..20u64)
        .into_par_iter()
        .map(|k| {
            let kappa = [5.0, 10.0, 20.0][(k % 3) as usize];
            let a = generate_spd(32, kappa, SpectrumProfile::LogUniform, 0.5, 4000 + k)?;
            let reports: Vec<SpectralSumReport> = LOGDET_ALGORITHMS
                .iter()
                .map(|&alg| run(&a, &AlgoConfig::new(alg, 0.1, 0.1, NoiseMode::Exact, k)))
                .collect::<Result<_>>()?;
            let mut agree = 0;
            let mut misses = vec![];
            for i in 0..reports.len() {
                for j in i + 1..reports.len() {
                    let (x, y) = (&reports[i], &reports[j]);
                    if (x.estimate.value - y.estimate.value).abs() <= x.guarantee_bound + y.guarantee_bound {
                        agree += 1;
                    } else {
                        misses.push(format!("instance {k}: {} vs {}", x.algorithm, y.algorithm));
                    }
                }
            }
            Ok((agree, misses))
        })
        .collect();
    let mut agree = 0;
    let mut misses = vec![];
    for r in results {
        let (a, m) = r?;
        agree += a;
        misses.extend(m);
    }
    let detail = format!("{agree}/200 pairs agree{}", misses.first().map(|m| format!(" (first miss {m})")).unwrap_or_default());
    Ok((misses.is_empty(), detail))
}

// ---------------------------------------------------------------------------
// 10

fn determinism_configs() -> Vec<AlgoConfig> {
    let mut algs = soundness_algorithms();
    algs.extend([Algorithm::ClassicalLogdetTaylor, Algorithm::ClassicalTraceInverse]);
    algs.into_iter()
        .map(|alg| {
            let mut cfg = AlgoConfig::new(alg, 0.2, 0.1, NoiseMode::Stochastic, 42);
            if matches!(alg, Algorithm::ClassicalLogdetTaylor | Algorithm::ClassicalTraceInverse) {
                cfg.probes = Some(300);
            }
            cfg
        })
        .collect()
}

fn serialized_runs(threads: usize) -> Result<Vec<String>> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().map_err(|e| invalid(e.to_string()))?;
    pool.install(|| {
        determinism_configs()
            .iter()
            .map(|cfg| {
                let a = instance(cfg.algorithm, 48, 10.0, 5)?;
                to_json(&run(&a, cfg)?)
            })
            .collect()
    })
}

fn determinism() -> Check {
    let base = serialized_runs(1)?;
    let mut mismatches = 0;
    for threads in [1, 2, 4, 8] {
        let again = serialized_runs(threads)?;
        mismatches += base.iter().zip(&again).filter(|(x, y)| x != y).count();
    }
    Ok((mismatches == 0, format!("{} configurations x 4 thread counts, {mismatches} byte mismatches", base.len())))
}
