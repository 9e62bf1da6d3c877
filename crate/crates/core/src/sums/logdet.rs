use crate::error::{precondition, Result};
use crate::matrix::{exact_spectral_sum, SpectralFunction, SymmetricMatrix};
use crate::measurement::{inner_product_estimate, repetitions_for, InnerProductMethod};
use crate::qmodel::{apply_svt, polylog_n, qram_block_encoding_with_grid, unit_block_encoding_with_mu, BlockEncoding};
use crate::rng;

use super::{
    cached_series, logdet_budget, logdet_guarantee, quantize_down, require_spd, spectral_floor, AlgoConfig, EncodingKind,
    Guarantee, Outcome, SeriesKind, SpectralSumReport,
};

/// Log-determinant through a polynomial approximation of `log` applied by
/// singular value transformation, for SPD `A` with `‖A‖ < 1`.
pub fn logdet_svt(a: &SymmetricMatrix, cfg: &AlgoConfig) -> Result<SpectralSumReport> {
    cfg.validate()?;
    let out = logdet_svt_outcome(a, cfg)?;
    let exact = exact_spectral_sum(a, SpectralFunction::Log)?;
    Ok(out.into_report("logdet-svt".into(), a.dim(), exact))
}

fn logdet_svt_outcome(a: &SymmetricMatrix, cfg: &AlgoConfig) -> Result<Outcome> {
    let spec = a.spectral()?;
    require_spd(spec)?;
    let norm = spec.singular_values[0];
    if norm >= 1.0 {
        return Err(precondition(format!("||A|| = {norm} >= 1; use the edge-case handler")));
    }
    let (_, kappa) = spectral_floor(spec, cfg)?;
    let n = a.dim();
    let nf = n as f64;
    let (budget, absolute) = logdet_budget(norm);

    let mu = crate::matrix::compute_mu(a, cfg.mu_grid)?;
    let alpha = match cfg.encoding {
        EncodingKind::Unit => 1.0,
        _ => mu,
    };
    let beta_exact = 1.0 / (kappa * alpha);
    let beta = quantize_down(beta_exact.min(1.0), 8.0);
    let lambda = (2.0 / beta).ln();
    let eps23 = cfg.eps * budget / (6.0 * lambda);
    let eps3 = quantize_down(eps23.min(0.5), 4.0);
    let series = cached_series(SeriesKind::Log, beta, eps3)?;
    let d = series.degree as f64;

    let seed = rng::derive(cfg.seed, 0x4c4f_4744);
    let mut eps1 = 0.0;
    let be: BlockEncoding = match cfg.encoding {
        EncodingKind::Unit => {
            let ka = kappa * alpha;
            let stated = cfg.eps.powi(2) * budget.powi(2) / (alpha * kappa * kappa * ka.ln().max(1e-300).powi(2));
            eps1 = stated.min(alpha * (eps23 / (4.0 * d)).powi(2));
            unit_block_encoding_with_mu(a, eps1, cfg.mode, seed, mu)?
        }
        _ => {
            let mut be = qram_block_encoding_with_grid(a, cfg.mu_grid)?;
            be.mode = cfg.mode;
            be.seed = seed;
            be
        }
    };
    let svt = apply_svt(&be, &series, cfg.nu)?;
    let psi = svt.effective().trace() / nf;
    let method = cfg.inner_product.unwrap_or(InnerProductMethod::AmplitudeEstimation);
    let ip = inner_product_estimate(psi, eps23, cfg.delta / 2.0, svt.use_cost, method, cfg.mode, rng::derive(cfg.seed, 0x4950))?;

    let mut est = ip.clone();
    est.value = 2.0 * nf * ip.value * lambda + nf * alpha.ln();
    est.abs_error_bound = cfg.eps * nf * budget;
    est.seed = cfg.seed;

    let reps = repetitions_for(cfg.delta / 2.0)? as f64;
    let mut out = Outcome::new(est, logdet_guarantee(cfg.eps, n, absolute));
    out.param("alpha", alpha)
        .param("mu", mu)
        .param("kappa", kappa)
        .param("norm", norm)
        .param("log_inv_norm", budget)
        .param("beta", beta)
        .param("beta_exact", beta_exact)
        .param("log_2_over_beta", lambda)
        .param("eps1", eps1)
        .param("eps2", eps23)
        .param("eps3", eps23)
        .param("eps3_series", eps3)
        .param("degree", d)
        .param("degree_constant", series.degree_constant)
        .param("series_sup_error", series.certified_sup_error)
        .param("svt_eps", svt.eps)
        .param("repetitions", reps)
        .param("overlap", psi);
    if absolute {
        out.notes.push("||A|| within 1e-6 of 1: relative conversion degenerates, absolute n*eps guarantee".into());
    }
    // the degree beyond its leading 1/β term is a polylog(1/ε) factor
    out.polylog = reps * lambda * (d * beta).max(1.0) * polylog_n(n);
    Ok(out)
}

/// `‖A‖ ≥ 1`: deflates unit singular values when `‖A‖ = 1`, otherwise
/// rescales by `2‖A‖` and returns an absolute-error estimate.
pub fn logdet_edge_cases(a: &SymmetricMatrix, cfg: &AlgoConfig) -> Result<SpectralSumReport> {
    cfg.validate()?;
    let spec = a.spectral()?;
    require_spd(spec)?;
    let n = a.dim();
    let nf = n as f64;
    let norm = spec.singular_values[0];
    let exact = exact_spectral_sum(a, SpectralFunction::Log)?;
    let name = "logdet-svt".to_string();

    if norm < 1.0 - 1e-10 {
        return logdet_svt(a, cfg);
    }

    if (norm - 1.0).abs() <= 1e-10 {
        let m = spec.eigenvalues.iter().filter(|l| (**l - 1.0).abs() <= 1e-10).count();
        if m == n {
            let est = crate::measurement::Estimate {
                value: 0.0,
                abs_error_bound: 0.0,
                success_prob: 1.0,
                queries_charged: 0.0,
                seed: cfg.seed,
                failed: false,
                ledger: Default::default(),
            };
            let mut out = Outcome::new(est, Guarantee::Absolute(0.0));
            out.param("unit_multiplicity", m as f64);
            out.notes.push("every singular value is 1: log-determinant is 0".into());
            return Ok(out.into_report(name, n, exact));
        }
        // project onto the complement of the unit eigenspace
        let rest = spec.eigenvectors.columns(m, n - m).into_owned();
        let deflated = SymmetricMatrix::new(rest.transpose() * a.entries() * &rest)?;
        let mut out = logdet_svt_outcome(&deflated, cfg)?;
        out.param("unit_multiplicity", m as f64).param("sigma_next", spec.singular_values[m]);
        out.notes.push(format!("deflated {m} unit singular values; guarantee refers to the remaining {} dimensions", n - m));
        return Ok(out.into_report(name, n, exact));
    }

    // ‖A‖ > 1: B = A/α with α = 2‖A‖ has norm 1/2
    let alpha = 2.0 * norm;
    let b = a.scaled(1.0 / alpha);
    let kappa_b = 1.0 / b.spectral()?.singular_values[n - 1];
    let inner_eps = (cfg.eps / kappa_b.ln().max(1.0)).min(cfg.eps);
    let inner_cfg = AlgoConfig { eps: inner_eps, kappa_bound: None, ..cfg.clone() };
    let mut out = logdet_svt_outcome(&b, &inner_cfg)?;
    out.estimate.value += nf * alpha.ln();
    out.estimate.abs_error_bound = cfg.eps * nf;
    out.guarantee = Guarantee::Absolute(cfg.eps * nf);
    out.param("rescale_alpha", alpha).param("inner_eps", inner_eps);
    let smin = spec.singular_values[n - 1];
    if smin < 1.0 {
        out.param("mixed_sign", 1.0);
        out.notes.push("singular values on both sides of 1 (mixed-sign logs): absolute guarantee only".into());
    } else {
        out.notes.push("||A|| > 1: rescaled, absolute n*eps guarantee".into());
    }
    Ok(out.into_report(name, n, exact))
}

/// SVT log-det for any SPD input, dispatching on `‖A‖`.
pub fn logdet(a: &SymmetricMatrix, cfg: &AlgoConfig) -> Result<SpectralSumReport> {
    if a.spectral_norm()? < 1.0 - 1e-10 {
        logdet_svt(a, cfg)
    } else {
        logdet_edge_cases(a, cfg)
    }
}
