//! Rounding model of the classical-sampling log-determinant estimator.
//!
//! Each `ln σ̃ⱼ` is off from `ln σⱼ` by `ε ln κ · u` with `u` uniform on
//! `[−1/2, 1/2]`. With one draw of `u` shared across the spectrum the
//! variance of the sum is `(nε ln κ)²/12`; with independent draws it is
//! `n(ε ln κ)²/12`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::matrix::{exact_spectral_sum, SpectralFunction, SymmetricMatrix};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum RoundingCorrelation {
    #[default]
    Shared,
    Independent,
}

/// `(nε ln κ)²/12`.
pub fn zhao_variance(n: usize, eps: f64, kappa: f64) -> f64 {
    (n as f64 * eps * kappa.ln()).powi(2) / 12.0
}

/// One draw of the rounded estimator; `trial` selects the stream.
pub fn zhao_rounded_logdet(a: &SymmetricMatrix, eps: f64, correlation: RoundingCorrelation, seed: u64, trial: u64) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(invalid("eps must be positive"));
    }
    let kappa = a.condition_number()?;
    let logdet = exact_spectral_sum(a, SpectralFunction::Log)?;
    let width = eps * kappa.ln();
    let mut r = rng::stream(seed, rng::label::ZHAO, trial);
    let n = a.dim();
    Ok(match correlation {
        RoundingCorrelation::Shared => logdet + n as f64 * width * (r.random::<f64>() - 0.5),
        RoundingCorrelation::Independent => logdet + (0..n).map(|_| width * (r.random::<f64>() - 0.5)).sum::<f64>(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{generate_spd, SpectrumProfile};

    fn spread(correlation: RoundingCorrelation) -> (f64, f64) {
        let a = generate_spd(16, 10.0, SpectrumProfile::LogUniform, 1.0, 1).unwrap();
        let draws: Vec<f64> = (0..20_000).map(|t| zhao_rounded_logdet(&a, 0.1, correlation, 3, t).unwrap()).collect();
        let m = draws.iter().sum::<f64>() / draws.len() as f64;
        let v = draws.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (draws.len() - 1) as f64;
        (v, zhao_variance(16, 0.1, a.condition_number().unwrap()))
    }

    #[test]
    fn shared_rounding_matches_formula() {
        let (v, f) = spread(RoundingCorrelation::Shared);
        assert!((v / f - 1.0).abs() < 0.05, "{v} vs {f}");
    }

    #[test]
    fn independent_rounding_scales_with_n() {
        let (v, f) = spread(RoundingCorrelation::Independent);
        assert!((v * 16.0 / f - 1.0).abs() < 0.05, "{v} vs {}", f / 16.0);
    }
}
