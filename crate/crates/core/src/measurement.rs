//! Emulated estimation primitives.
//!
//! The exact quantity is always computed classically; what is emulated is
//! the output distribution of the primitive and its price in oracle queries.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, precondition, Result};
use crate::ledger::CostLedger;
use crate::qmodel::{BlockEncoding, NoiseMode};
use crate::rng;

/// Base success probability of amplitude estimation.
pub const AE_SUCCESS: f64 = 8.0 / (PI * PI);

/// Base success probability of the Monte Carlo mean estimator.
pub const QMC_SUCCESS: f64 = 0.75;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub abs_error_bound: f64,
    pub success_prob: f64,
    pub queries_charged: f64,
    pub seed: u64,
    /// Set when the emulated draw came from a failure branch (for an
    /// amplified estimate: when at least half of the repetitions failed).
    pub failed: bool,
    pub ledger: CostLedger,
}

/// `2π√(a(1−a))/t + π²/t²`.
pub fn ae_bound(a: f64, t: u64) -> f64 {
    let t = t as f64;
    2.0 * PI * (a * (1.0 - a)).max(0.0).sqrt() / t + PI * PI / (t * t)
}

/// Smallest `t` whose worst-case bound `π/t + π²/t²` is at most `eps`.
pub fn ae_rounds_for(eps: f64) -> Result<u64> {
    if !(eps > 0.0) {
        return Err(invalid("precision must be positive"));
    }
    let x = (-1.0 + (1.0 + 4.0 * eps).sqrt()) / 2.0;
    let mut t = (PI / x).ceil() as u64;
    while PI / t as f64 + (PI / t as f64).powi(2) > eps {
        t += 1;
    }
    Ok(t.max(1))
}

/// `⌈18 ln(1/δ)⌉` repetitions for a median to fail with probability ≤ δ.
pub fn repetitions_for(delta: f64) -> Result<u64> {
    if !(delta > 0.0 && delta < 0.5) {
        return Err(invalid(format!("failure probability must lie in (0, 1/2), got {delta}")));
    }
    Ok(((18.0 * (1.0 / delta).ln()).ceil() as u64).max(1))
}

/// Success probability of a median of `k` runs each correct with `p > 1/2`
/// (Hoeffding).
pub fn median_success(p: f64, k: u64) -> f64 {
    if p >= 1.0 {
        return 1.0;
    }
    (1.0 - (-2.0 * k as f64 * (p - 0.5).powi(2)).exp()).max(0.0)
}

fn amplitude_draw(a: f64, t: u64, mode: NoiseMode, r: &mut impl Rng) -> (f64, bool) {
    let bound = ae_bound(a, t);
    match mode {
        NoiseMode::Exact => (a, false),
        NoiseMode::Adversarial => ((a + bound).clamp(0.0, 1.0), false),
        NoiseMode::Stochastic => {
            let tf = t as f64;
            let pos = tf * a.sqrt().asin() / PI;
            let grid = |m: f64| (PI * m / tf).sin().powi(2);
            if (pos - pos.round()).abs() < 1e-12 {
                return (grid(pos.round()).clamp(0.0, 1.0), false);
            }
            let u: f64 = r.random();
            if u < AE_SUCCESS {
                let frac = pos - pos.floor();
                let m = if r.random::<f64>() < frac { pos.ceil() } else { pos.floor() };
                (grid(m), false)
            } else {
                let m = r.random_range(0..t) as f64;
                (grid(m), true)
            }
        }
    }
}

/// Amplitude estimation with `t` rounds, each round charged `round_cost`.
pub fn amplitude_estimate(a: f64, t: u64, mode: NoiseMode, round_cost: f64, seed: u64) -> Result<Estimate> {
    if t == 0 {
        return Err(invalid("amplitude estimation needs t >= 1"));
    }
    if !(0.0..=1.0).contains(&a) {
        return Err(invalid(format!("amplitude {a} outside [0, 1]")));
    }
    let mut r = rng::stream(seed, rng::label::AMPLITUDE, 0);
    let (value, failed) = amplitude_draw(a, t, mode, &mut r);
    let queries = t as f64 * round_cost;
    Ok(Estimate {
        value,
        abs_error_bound: ae_bound(a, t),
        success_prob: if mode == NoiseMode::Stochastic { AE_SUCCESS } else { 1.0 },
        queries_charged: queries,
        seed,
        failed,
        ledger: CostLedger { queries, ae_rounds: t as f64, repetitions: 1.0, ..Default::default() },
    })
}

/// Median of `k` runs of `run(seed_i)`. Every repetition is charged, also in
/// exact mode where they all agree.
pub fn median_of(k: u64, seed: u64, base_success: f64, run: impl Fn(u64) -> Result<Estimate>) -> Result<Estimate> {
    let mut runs = Vec::with_capacity(k as usize);
    for i in 0..k {
        runs.push(run(rng::derive(seed, rng::label::REPETITION ^ i.wrapping_mul(0x9e37_79b9)))?);
    }
    let mut values: Vec<f64> = runs.iter().map(|e| e.value).collect();
    values.sort_by(f64::total_cmp);
    let value = if k % 2 == 1 {
        values[(k / 2) as usize]
    } else {
        0.5 * (values[(k / 2 - 1) as usize] + values[(k / 2) as usize])
    };
    let mut ledger = CostLedger::default();
    runs.iter().for_each(|e| ledger.merge(&e.ledger));
    let fails = runs.iter().filter(|e| e.failed).count() as u64;
    let all_sure = runs.iter().all(|e| e.success_prob >= 1.0);
    Ok(Estimate {
        value,
        abs_error_bound: runs.iter().map(|e| e.abs_error_bound).fold(0.0, f64::max),
        success_prob: if all_sure { 1.0 } else { median_success(base_success, k) },
        queries_charged: ledger.queries,
        seed,
        failed: 2 * fails >= k,
        ledger,
    })
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0) {
        return Err(invalid(format!("eps must be positive, got {eps}")));
    }
    Ok(())
}

/// Hadamard-test trace estimate with `|value − Tr[target]| ≤ n·eps`.
///
/// `delta = None` runs a single amplitude estimation.
pub fn trace_estimate_abs(be: &BlockEncoding, eps: f64, delta: Option<f64>, mode: NoiseMode, seed: u64) -> Result<Estimate> {
    check_eps(eps)?;
    if be.eps > eps / 2.0 {
        return Err(precondition(format!("encoding error {:e} exceeds eps/2 = {:e}", be.eps, eps / 2.0)));
    }
    let n = be.dim() as f64;
    let a = ((1.0 + be.effective().trace() / n) / 2.0).clamp(0.0, 1.0);
    let t = (8.0 * be.alpha * PI / eps).ceil() as u64;
    let alpha = be.alpha;
    let once = |s: u64| -> Result<Estimate> {
        let mut e = amplitude_estimate(a, t, mode, be.use_cost, s)?;
        e.value = n * alpha * (2.0 * e.value - 1.0);
        e.abs_error_bound = n * eps;
        Ok(e)
    };
    match delta {
        None => once(seed),
        Some(d) => median_of(repetitions_for(d)?, seed, AE_SUCCESS, once),
    }
}

/// Relative trace estimate, `|value − Tr| ≤ eps·Tr`, using a known lower
/// bound on the trace (default `n·λ_min(target)`).
pub fn trace_estimate_rel(
    be: &BlockEncoding,
    eps: f64,
    delta: Option<f64>,
    trace_lower: Option<f64>,
    mode: NoiseMode,
    seed: u64,
) -> Result<Estimate> {
    check_eps(eps)?;
    let n = be.dim() as f64;
    let lower = match trace_lower {
        Some(l) => l,
        None => {
            let s = crate::matrix::spectral_decompose_dense(&be.target())?;
            n * *s.eigenvalues.last().expect("n >= 1")
        }
    };
    if !(lower > 0.0) {
        return Err(precondition(format!("trace lower bound must be positive, got {lower:e}")));
    }
    let mut e = trace_estimate_abs(be, eps * lower / n, delta, mode, seed)?;
    e.abs_error_bound = eps * lower;
    Ok(e)
}

/// Rounds `t` for which amplitude estimation is within relative `rel` of
/// every amplitude `a ≥ a_lower`.
fn ae_rounds_relative(a_lower: f64, rel: f64) -> u64 {
    // 2π√a/t + π²/t² ≤ rel·a, solved for t at a = a_lower
    let (b, c) = (2.0 * PI * a_lower.sqrt(), PI * PI);
    let t = (b + (b * b + 4.0 * rel * a_lower * c).sqrt()) / (2.0 * rel * a_lower);
    t.ceil() as u64
}

/// Relative estimate of `Tr[BᵀB]` for a block-encoding of `B`, given a lower
/// bound on that trace.
pub fn trace_product_estimate(
    be: &BlockEncoding,
    eps: f64,
    delta: Option<f64>,
    trace_lower: f64,
    mode: NoiseMode,
    seed: u64,
) -> Result<Estimate> {
    check_eps(eps)?;
    if !(trace_lower > 0.0) {
        return Err(precondition("trace lower bound must be positive"));
    }
    let n = be.dim() as f64;
    let limit = eps * trace_lower / (4.0 * n);
    if be.eps > limit {
        return Err(precondition(format!("encoding error {:e} exceeds eps*Tr/(4n) = {limit:e}", be.eps)));
    }
    let eff = be.effective() * be.alpha;
    let a = ((eff.transpose() * &eff).trace() / n).clamp(0.0, 1.0);
    // the encoding error can move Tr by up to 2.25 n·δ ≤ 0.5625 eps·Tr; the
    // amplitude estimate gets the remainder
    let t = ae_rounds_relative(trace_lower / n, 0.4 * eps);
    let once = |s: u64| -> Result<Estimate> {
        let mut e = amplitude_estimate(a, t, mode, be.use_cost, s)?;
        e.value *= n;
        e.abs_error_bound = eps * trace_lower;
        Ok(e)
    };
    match delta {
        None => once(seed),
        Some(d) => median_of(repetitions_for(d)?, seed, AE_SUCCESS, once),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum InnerProductMethod {
    /// Median of amplitude estimations; cost `~ log(1/δ)/ε`.
    #[default]
    AmplitudeEstimation,
    /// Averaged Hadamard-test shots; cost `~ log(1/δ)/ε²`.
    HadamardSampling,
}

/// Estimate of a real overlap `psi ∈ [−1, 1]` with `|value − psi| ≤ eps`
/// with probability at least `1 − 2δ`.
pub fn inner_product_estimate(
    psi: f64,
    eps: f64,
    delta: f64,
    unit_cost: f64,
    method: InnerProductMethod,
    mode: NoiseMode,
    seed: u64,
) -> Result<Estimate> {
    check_eps(eps)?;
    if !(-1.0 - 1e-12..=1.0 + 1e-12).contains(&psi) {
        return Err(invalid(format!("overlap {psi} outside [-1, 1]")));
    }
    let psi = psi.clamp(-1.0, 1.0);
    let a = (1.0 + psi) / 2.0;
    match method {
        InnerProductMethod::AmplitudeEstimation => {
            let t = ae_rounds_for(eps / 2.0)?;
            let k = repetitions_for(delta)?;
            let mut e = median_of(k, seed, AE_SUCCESS, |s| {
                let mut e = amplitude_estimate(a, t, mode, unit_cost, s)?;
                e.value = 2.0 * e.value - 1.0;
                e.abs_error_bound = eps;
                Ok(e)
            })?;
            if mode == NoiseMode::Exact {
                e.value = psi;
            }
            Ok(e)
        }
        InnerProductMethod::HadamardSampling => {
            if !(delta > 0.0 && delta < 0.5) {
                return Err(invalid(format!("failure probability must lie in (0, 1/2), got {delta}")));
            }
            let shots = (2.0 * (2.0 / delta).ln() / (eps * eps)).ceil() as u64;
            let value = match mode {
                NoiseMode::Exact => psi,
                NoiseMode::Adversarial => (psi + eps).min(1.0),
                NoiseMode::Stochastic => {
                    let mut r = rng::stream(seed, rng::label::SHOTS, 0);
                    let ones = Binomial::new(shots, a).expect("valid binomial").sample(&mut r);
                    2.0 * ones as f64 / shots as f64 - 1.0
                }
            };
            let queries = shots as f64 * unit_cost;
            Ok(Estimate {
                value,
                abs_error_bound: eps,
                success_prob: if mode == NoiseMode::Stochastic { 1.0 - delta } else { 1.0 },
                queries_charged: queries,
                seed,
                failed: mode == NoiseMode::Stochastic && (value - psi).abs() > eps,
                ledger: CostLedger { queries, shots: shots as f64, repetitions: 1.0, ..Default::default() },
            })
        }
    }
}

/// Relative-error mean of non-negative `values` for a sampler costing
/// `sampler_cost` per use, given `Var/E² ≤ b`.
pub fn qmc_mean_estimate(values: &[f64], b: f64, eps: f64, delta: Option<f64>, sampler_cost: f64, mode: NoiseMode, seed: u64) -> Result<Estimate> {
    check_eps(eps)?;
    if values.is_empty() {
        return Err(invalid("no values to average"));
    }
    if values.iter().any(|v| *v < 0.0 || !v.is_finite()) {
        return Err(invalid("values must be finite and non-negative"));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    let rel_var = if mean > 0.0 { var / (mean * mean) } else { 0.0 };
    if rel_var > b * (1.0 + 1e-12) + 1e-15 {
        return Err(precondition(format!("relative variance {rel_var:.6e} exceeds the bound B = {b:.6e}")));
    }
    let uses = (b.max(1.0) / eps).ceil();
    // a constant sampler has nothing to estimate
    let exact_input = values.iter().all(|v| *v == values[0]);
    let mean = if exact_input { values[0] } else { mean };
    let once = |s: u64| -> Result<Estimate> {
        let mut r = rng::stream(s, rng::label::QMC, 0);
        let (value, failed) = if exact_input {
            (mean, false)
        } else {
            match mode {
                NoiseMode::Exact => (mean, false),
                NoiseMode::Adversarial => (mean * (1.0 + eps), false),
                NoiseMode::Stochastic => {
                    if r.random::<f64>() < QMC_SUCCESS {
                        (mean * (1.0 + eps * r.random_range(-1.0..=1.0)), false)
                    } else {
                        let sign = if r.random::<bool>() { 1.0 } else { -1.0 };
                        let excess: f64 = 1.0 + r.random::<f64>();
                        ((mean * (1.0 + sign * eps * excess)).max(0.0), true)
                    }
                }
            }
        };
        let queries = uses * sampler_cost;
        Ok(Estimate {
            value,
            abs_error_bound: eps * mean,
            success_prob: if mode == NoiseMode::Stochastic && !exact_input { QMC_SUCCESS } else { 1.0 },
            queries_charged: queries,
            seed: s,
            failed,
            ledger: CostLedger { queries, shots: uses, repetitions: 1.0, ..Default::default() },
        })
    };
    match delta {
        None => once(seed),
        Some(d) => median_of(repetitions_for(d)?, seed, QMC_SUCCESS, once).map(|mut e| {
            e.seed = seed;
            e
        }),
    }
}
