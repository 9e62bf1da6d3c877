use crate::error::{invalid, precondition, Result};
use crate::matrix::{schatten_norm, SymmetricMatrix};
use crate::measurement::{repetitions_for, trace_product_estimate};
use crate::poly::{approx_monomial, scale_series};
use crate::qmodel::{apply_svt, matrix_power, polylog_n, polynomial_of, product_preamplified, qram_block_encoding_with_grid, BlockEncoding};
use crate::rng;

use super::{spectral_floor, AlgoConfig, Guarantee, MonomialMode, Outcome, SpectralSumReport};

/// `x^q/2` applied to the encoding of `B/2`, exactly or through the
/// truncated Chebyshev series. Returns the encoding and its scale `1/f`.
fn monomial_factor(be_b: &BlockEncoding, q: u32, budget: f64, cfg: &AlgoConfig, params: &mut Vec<(&'static str, f64)>) -> Result<(BlockEncoding, f64)> {
    match cfg.monomial {
        MonomialMode::Exact => {
            let series = scale_series(&approx_monomial(q, q)?, 0.5);
            params.push(("monomial_degree", q as f64));
            Ok((apply_svt(be_b, &series, cfg.nu)?, 2.0))
        }
        MonomialMode::Approximate => {
            // target error eps' for the un-halved series
            let eps_m = budget;
            let d = ((2.0 * q as f64 * (2.0 / eps_m).ln()).sqrt().ceil() as u32).max(1);
            let raw = approx_monomial(q, d)?;
            // truncation can overshoot 1 near ±1; shrink so the SVT bound holds
            let f = 0.5 / raw.global_bound.max(raw.measured_global_bound(crate::poly::CERT_GRID)).max(1.0);
            let series = scale_series(&raw, f);
            let svt = apply_svt(be_b, &series, cfg.nu)?;
            let ideal = polynomial_of(be_b.payload(), &approx_monomial(q, q)?)? * f;
            let eps = svt.eps + f * raw.certified_sup_error;
            params.extend([("monomial_degree", d as f64), ("monomial_eps", eps_m), ("monomial_scale", f)]);
            Ok((svt.with_ideal(ideal, eps), 1.0 / f))
        }
    }
}

/// Schatten-`p` norm `(Σ σᵢ^p)^{1/p}` for `‖A‖ < 1`, relative error.
pub fn schatten_p(a: &SymmetricMatrix, p: u32, cfg: &AlgoConfig) -> Result<SpectralSumReport> {
    cfg.validate()?;
    if p == 0 {
        return Err(invalid("Schatten norms need p >= 1"));
    }
    let spec = a.spectral()?;
    let norm = spec.singular_values[0];
    if norm >= 1.0 {
        return Err(precondition(format!("Schatten estimator needs ||A|| < 1, got {norm}")));
    }
    let (sigma_lb, kappa) = spectral_floor(spec, cfg)?;
    let n = a.dim();
    let nf = n as f64;
    let (q, r) = (p / 4, p % 4);
    let seed = rng::derive(cfg.seed, 0x5343_4841);

    let mut be_a = qram_block_encoding_with_grid(a, cfg.mu_grid)?;
    be_a.mode = cfg.mode;
    be_a.seed = seed;
    // B/2 with B = AᵀA
    let be_b = product_preamplified(&be_a, &be_a)?;

    let mut params = Vec::new();
    let kappa_h = (2.0 * kappa * kappa).max(2.0);
    let pf = p as f64;
    // W1 = (B/2)^q · f, W2 = (B/2)^{r/4}/2, W = W1·W2/2
    let scale_of = |s1: Option<f64>, has_w2: bool| -> f64 {
        let w2 = if has_w2 { 2f64.powf(1.0 + r as f64 / 4.0) } else { 1.0 };
        match (s1, has_w2) {
            (Some(s1), true) => s1 * 2f64.powi(q as i32) * w2 * 2.0,
            (Some(s1), false) => s1 * 2f64.powi(q as i32),
            (None, _) => w2,
        }
    };
    let trace_lower = |scale: f64| (norm.powf(pf) + (nf - 1.0) * sigma_lb.powf(pf)) / (scale * scale);
    let limit_for = |scale: f64| cfg.eps * trace_lower(scale) / (4.0 * nf);

    let w1 = if q > 0 {
        let budget = limit_for(scale_of(Some(2.0), r > 0)) / 4.0;
        Some(monomial_factor(&be_b, q, budget, cfg, &mut params)?)
    } else {
        None
    };
    let scale = scale_of(w1.as_ref().map(|(_, s)| *s), r > 0);
    let limit = limit_for(scale);
    let eps2 = (limit - w1.as_ref().map_or(0.0, |(w, _)| w.eps)) / 2.0;
    if !(eps2 > 0.0) {
        return Err(precondition("monomial factor uses the whole encoding error budget"));
    }
    let w2 = if r > 0 { Some(matrix_power(&be_b, r as f64 / 4.0, kappa_h, eps2)?) } else { None };
    let w = match (&w1, &w2) {
        (Some((x, _)), Some(y)) => product_preamplified(x, y)?,
        (Some((x, _)), None) => x.clone(),
        (None, Some(y)) => y.clone(),
        (None, None) => unreachable!("p >= 1"),
    };
    let tr_lower = trace_lower(scale);
    let est = trace_product_estimate(&w, cfg.eps, Some(cfg.delta), tr_lower, cfg.mode, rng::derive(cfg.seed, 0x5452))?;

    let mut estimate = est.clone();
    let power_sum = scale * scale * est.value;
    estimate.value = power_sum.max(0.0).powf(1.0 / pf);
    let exact = schatten_norm(a, pf)?;
    estimate.abs_error_bound = cfg.eps * exact;
    estimate.seed = cfg.seed;

    let reps = repetitions_for(cfg.delta)? as f64;
    let mut out = Outcome::new(estimate, Guarantee::Relative(cfg.eps));
    for (k, v) in params {
        out.param(k, v);
    }
    out.param("p", pf)
        .param("q", q as f64)
        .param("r", r as f64)
        .param("mu", be_a.alpha)
        .param("kappa", kappa)
        .param("kappa_h", kappa_h)
        .param("scale", scale)
        .param("scale_pow_p", scale * scale)
        .param("trace_lower", tr_lower)
        .param("encoding_eps", w.eps)
        .param("encoding_limit", limit)
        .param("power_eps", if w2.is_some() { eps2 } else { 0.0 })
        .param("power_sum_estimate", power_sum)
        .param("repetitions", reps);
    let log_pow = if w2.is_some() { (kappa_h / eps2).ln().powi(2) } else { 1.0 };
    out.polylog = reps * log_pow * polylog_n(n);
    Ok(out.into_report(cfg.algorithm.name(), n, exact))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{generate_spd, SpectrumProfile};
    use crate::qmodel::NoiseMode;
    use crate::sums::Algorithm;

    fn cfg(p: u32, mode: NoiseMode, seed: u64) -> AlgoConfig {
        AlgoConfig::new(Algorithm::SchattenP { p }, 0.1, 0.1, mode, seed)
    }

    #[test]
    fn frobenius_for_p2() {
        let a = generate_spd(32, 5.0, SpectrumProfile::Uniform, 0.8, 4).unwrap();
        let r = schatten_p(&a, 2, &cfg(2, NoiseMode::Exact, 1)).unwrap();
        assert!((r.exact - a.frobenius_norm()).abs() < 1e-12);
        assert!(r.error <= 0.1 * r.exact);
    }

    #[test]
    fn scaled_identity_all_residues() {
        for p in 1..=9u32 {
            let a = SymmetricMatrix::scaled_identity(8, 0.6);
            let r = schatten_p(&a, p, &cfg(p, NoiseMode::Stochastic, p as u64)).unwrap();
            let expect = 0.6 * 8f64.powf(1.0 / p as f64);
            assert!((r.exact - expect).abs() < 1e-12);
            assert!(r.within_guarantee, "p={p}: {r:?}");
        }
    }

    #[test]
    fn scale_matches_composition() {
        let a = generate_spd(16, 5.0, SpectrumProfile::LogUniform, 0.5, 1).unwrap();
        let r = schatten_p(&a, 7, &cfg(7, NoiseMode::Exact, 1)).unwrap();
        // q = 1, r = 3: 2^{q+3+r/4}
        assert!((r.parameters["scale"] - 2f64.powf(4.75)).abs() < 1e-12);
        assert!((r.estimate.value - r.exact).abs() < 1e-9 * r.exact);
    }

    #[test]
    fn approximate_monomial_path() {
        let a = generate_spd(16, 5.0, SpectrumProfile::LogUniform, 0.8, 1).unwrap();
        let mut c = cfg(12, NoiseMode::Adversarial, 2);
        c.monomial = MonomialMode::Approximate;
        let r = schatten_p(&a, 12, &c).unwrap();
        assert!(r.parameters["monomial_degree"] >= 1.0);
        assert!(r.parameters["encoding_eps"] <= r.parameters["encoding_limit"]);
        assert!(r.within_guarantee, "{r:?}");
    }

    #[test]
    fn rejects_bad_input() {
        let a = SymmetricMatrix::scaled_identity(4, 1.0);
        assert!(schatten_p(&a, 2, &cfg(2, NoiseMode::Exact, 1)).is_err());
        assert!(schatten_p(&SymmetricMatrix::scaled_identity(4, 0.5), 0, &cfg(1, NoiseMode::Exact, 1)).is_err());
    }
}
