use crate::error::{domain, precondition, Result};
use crate::matrix::{compute_mu, exact_spectral_sum, SpectralFunction, SymmetricMatrix};
use crate::measurement::{repetitions_for, trace_estimate_abs};
use crate::poly::entropy_from_log;
use crate::qmodel::{apply_svt, density_block_encoding, polylog_n, qram_block_encoding_with_grid};
use crate::rng;

use super::{cached_series, quantize_down, spectral_floor, AlgoConfig, EncodingKind, Guarantee, Outcome, SeriesKind, SpectralSumReport};

/// Von Neumann entropy `−Tr[ρ ln ρ]` of a full-rank density matrix, absolute
/// error `ε`.
pub fn vn_entropy(rho: &SymmetricMatrix, cfg: &AlgoConfig) -> Result<SpectralSumReport> {
    cfg.validate()?;
    let tr = rho.trace();
    if (tr - 1.0).abs() > 1e-10 {
        return Err(precondition(format!("density matrix must have unit trace, got {tr}")));
    }
    let spec = rho.spectral()?;
    let lmin = *spec.eigenvalues.last().expect("n >= 1");
    if lmin <= 0.0 {
        return Err(domain(format!("eigenvalue {lmin:e} lies outside the polynomial domain [beta, 1]")));
    }
    let (_, kappa) = spectral_floor(spec, cfg)?;
    let n = rho.dim();
    let nf = n as f64;

    let seed = rng::derive(cfg.seed, 0x454e_5452);
    let mut be = match cfg.encoding {
        EncodingKind::Purification => density_block_encoding(rho)?,
        _ => qram_block_encoding_with_grid(rho, cfg.mu_grid)?,
    };
    be.mode = cfg.mode;
    be.seed = seed;
    let alpha = be.alpha;
    let beta = quantize_down((1.0 / (alpha * kappa)).min(1.0), 8.0);
    if lmin / alpha < beta * (1.0 - 1e-12) {
        return Err(domain(format!("eigenvalue {lmin:e} lies below beta*alpha = {:e}", beta * alpha)));
    }
    let lambda = (2.0 / beta).ln();
    let eps1 = cfg.eps / (4.0 * lambda);
    let eps1_q = quantize_down(eps1.min(0.5), 4.0);
    let log = cached_series(SeriesKind::Log, beta, eps1_q)?;
    let series = entropy_from_log(&log)?;
    let svt = apply_svt(&be, &series, cfg.nu)?;

    // per-dimension precision; n·eps_t·2αΛ = ε/2
    let eps_t = cfg.eps / (4.0 * alpha * lambda * nf);
    let t = trace_estimate_abs(&svt, eps_t, Some(cfg.delta), cfg.mode, rng::derive(cfg.seed, 0x5452))?;

    let mut est = t.clone();
    est.value = 2.0 * alpha * lambda * t.value - alpha.ln();
    est.abs_error_bound = cfg.eps;
    est.seed = cfg.seed;

    let reps = repetitions_for(cfg.delta)? as f64;
    let mut out = Outcome::new(est, Guarantee::Absolute(cfg.eps));
    out.param("alpha", alpha)
        .param("mu", compute_mu(rho, cfg.mu_grid)?)
        .param("kappa", kappa)
        .param("beta", beta)
        .param("log_2_over_beta", lambda)
        .param("eps1", eps1)
        .param("eps1_series", eps1_q)
        .param("trace_eps", eps_t)
        .param("trace_bound", nf * eps_t)
        .param("degree", series.degree as f64)
        .param("series_sup_error", series.certified_sup_error)
        .param("repetitions", reps);
    out.polylog = reps * lambda * (series.degree as f64 * beta).max(1.0) * polylog_n(n);
    let exact = exact_spectral_sum(rho, SpectralFunction::NegXLogX)?;
    Ok(out.into_report(cfg.algorithm.name(), n, exact))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmodel::NoiseMode;
    use crate::sums::Algorithm;

    fn cfg(mode: NoiseMode) -> AlgoConfig {
        AlgoConfig::new(Algorithm::VnEntropy, 0.1, 0.1, mode, 5)
    }

    #[test]
    fn maximally_mixed() {
        let rho = SymmetricMatrix::scaled_identity(16, 1.0 / 16.0);
        let r = vn_entropy(&rho, &cfg(NoiseMode::Stochastic)).unwrap();
        assert!((r.exact - 16f64.ln()).abs() < 1e-12);
        assert!(r.within_guarantee, "{r:?}");
    }

    #[test]
    fn dyadic_spectrum() {
        let rho = SymmetricMatrix::from_diagonal(&[0.5, 0.25, 0.125, 0.125]);
        let r = vn_entropy(&rho, &cfg(NoiseMode::Exact)).unwrap();
        assert!((r.exact - 1.75 * 2f64.ln()).abs() < 1e-12);
        assert!((r.exact - 1.2130).abs() < 1e-4);
        assert!(r.within_guarantee);
    }

    #[test]
    fn purification_encoding() {
        let rho = SymmetricMatrix::from_diagonal(&[0.4, 0.3, 0.2, 0.1]);
        let mut c = cfg(NoiseMode::Adversarial);
        c.encoding = EncodingKind::Purification;
        let r = vn_entropy(&rho, &c).unwrap();
        assert_eq!(r.parameters["alpha"], 1.0);
        assert!(r.within_guarantee, "{r:?}");
    }

    #[test]
    fn preconditions() {
        assert!(vn_entropy(&SymmetricMatrix::from_diagonal(&[1.0, 0.0]), &cfg(NoiseMode::Exact)).is_err());
        assert!(vn_entropy(&SymmetricMatrix::from_diagonal(&[0.5, 0.4]), &cfg(NoiseMode::Exact)).is_err());
    }
}
