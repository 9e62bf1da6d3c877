use crate::error::Result;
use crate::matrix::{exact_spectral_sum, SpectralFunction, SymmetricMatrix};
use crate::measurement::{repetitions_for, trace_estimate_abs};
use crate::qmodel::{apply_svt, polylog_n, qram_block_encoding_with_grid};
use crate::rng;

use super::{cached_series, quantize_down, require_spd, spectral_floor, AlgoConfig, Guarantee, Outcome, SeriesKind, SpectralSumReport};

/// `Tr[A⁻¹]` for SPD `A` with `‖A‖ ≤ 1`, relative error `ε`.
pub fn trace_inverse(a: &SymmetricMatrix, cfg: &AlgoConfig) -> Result<SpectralSumReport> {
    cfg.validate()?;
    let spec = a.spectral()?;
    require_spd(spec)?;
    let (_, kappa) = spectral_floor(spec, cfg)?;
    let n = a.dim();
    let nf = n as f64;

    let mut be = qram_block_encoding_with_grid(a, cfg.mu_grid)?;
    be.mode = cfg.mode;
    be.seed = rng::derive(cfg.seed, 0x494e_56);
    let alpha = be.alpha;
    let delta_exact = (1.0 / (alpha * kappa)).min(0.5);
    let delta = quantize_down(delta_exact, 8.0);
    let eps12 = 3.0 * cfg.eps * delta * alpha / 16.0;
    let eps1_q = quantize_down(eps12.min(0.5), 4.0);
    let series = cached_series(SeriesKind::Inverse, delta, eps1_q)?;
    let svt = apply_svt(&be, &series, cfg.nu)?;
    let t = trace_estimate_abs(&svt, eps12, Some(cfg.delta), cfg.mode, rng::derive(cfg.seed, 0x5452))?;

    let factor = 8.0 / (3.0 * delta * alpha);
    let mut est = t.clone();
    est.value = factor * t.value;
    est.abs_error_bound = factor * nf * 2.0 * eps12;
    est.seed = cfg.seed;

    let reps = repetitions_for(cfg.delta)? as f64;
    let mut out = Outcome::new(est, Guarantee::Relative(cfg.eps));
    out.param("alpha", alpha)
        .param("kappa", kappa)
        .param("delta", delta)
        .param("delta_exact", delta_exact)
        .param("eps1", eps12)
        .param("eps2", eps12)
        .param("eps1_series", eps1_q)
        .param("degree", series.degree as f64)
        .param("series_sup_error", series.certified_sup_error)
        .param("output_factor", factor)
        .param("repetitions", reps);
    out.polylog = reps * (series.degree as f64 * delta).max(1.0) * polylog_n(n);
    let exact = exact_spectral_sum(a, SpectralFunction::Inverse)?;
    Ok(out.into_report(cfg.algorithm.name(), n, exact))
}
