//! Log-log least-squares fits for the scaling sweeps.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitSummary {
    pub points: usize,
    /// `"ok"`, or `"insufficient points"` when fewer than two distinct `x`
    /// values are available.
    pub status: String,
    pub slope: Option<f64>,
    pub intercept: Option<f64>,
    /// 95% Student-t interval on the slope; needs at least three points.
    pub slope_ci_low: Option<f64>,
    pub slope_ci_high: Option<f64>,
}

impl FitSummary {
    pub fn is_ok(&self) -> bool {
        self.slope.is_some()
    }

    pub fn slope_within(&self, lo: f64, hi: f64) -> bool {
        self.slope.is_some_and(|s| s >= lo && s <= hi)
    }
}

/// Ordinary least squares of `ln y` on `ln x`. Pairs with a non-positive or
/// non-finite coordinate are dropped.
pub fn loglog_fit(xs: &[f64], ys: &[f64]) -> FitSummary {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > 0.0 && **y > 0.0 && x.is_finite() && y.is_finite())
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    let m = pts.len();
    let insufficient = FitSummary {
        points: m,
        status: "insufficient points".into(),
        slope: None,
        intercept: None,
        slope_ci_low: None,
        slope_ci_high: None,
    };
    if m < 2 {
        return insufficient;
    }
    let mf = m as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / mf;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / mf;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx <= 1e-300 {
        return insufficient;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let (lo, hi) = if m >= 3 {
        let rss: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
        let se = (rss / (mf - 2.0) / sxx).sqrt();
        let t = StudentsT::new(0.0, 1.0, mf - 2.0).expect("dof >= 1").inverse_cdf(0.975);
        (Some(slope - t * se), Some(slope + t * se))
    } else {
        (None, None)
    };
    FitSummary { points: m, status: "ok".into(), slope: Some(slope), intercept: Some(intercept), slope_ci_low: lo, slope_ci_high: hi }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn exact_power_law() {
        let xs = [1.0, 2.0, 4.0, 8.0];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powf(1.5)).collect();
        let f = loglog_fit(&xs, &ys);
        assert_relative_eq!(f.slope.unwrap(), 1.5, epsilon = 1e-12);
        assert_relative_eq!(f.intercept.unwrap(), 3f64.ln(), epsilon = 1e-12);
        assert_relative_eq!(f.slope_ci_low.unwrap(), 1.5, epsilon = 1e-9);
    }

    #[test]
    fn single_point_is_insufficient() {
        let f = loglog_fit(&[0.1], &[10.0]);
        assert_eq!(f.status, "insufficient points");
        assert!(!f.is_ok());
        assert_eq!(loglog_fit(&[2.0, 2.0], &[1.0, 3.0]).status, "insufficient points");
    }

    #[test]
    fn ci_matches_textbook_example() {
        // y = x·e^{noise}: residuals ±0.1 around slope 1
        let xs = [1.0, std::f64::consts::E, std::f64::consts::E.powi(2)];
        let ys = [1.0f64, (1.0f64 + 0.1).exp(), (2.0f64).exp()];
        let f = loglog_fit(&xs, &ys);
        // slope = 1, rss = 0.1²·(2/3), se = sqrt(rss/1/2), t_{0.975,1} = 12.7062
        let se = (0.01 * 2.0 / 3.0 / 2.0f64).sqrt();
        assert_relative_eq!(f.slope.unwrap(), 1.0, epsilon = 1e-12);
        assert_relative_eq!(f.slope_ci_high.unwrap() - 1.0, 12.706204736 * se, epsilon = 1e-6);
    }

    proptest! {
        #[test]
        fn slope_recovers_exponent(k in -3.0f64..3.0, c in 0.1f64..10.0) {
            let xs = [0.5f64, 1.0, 3.0, 7.0, 20.0];
            let ys: Vec<f64> = xs.iter().map(|x| c * x.powf(k)).collect();
            let f = loglog_fit(&xs, &ys);
            prop_assert!((f.slope.unwrap() - k).abs() < 1e-9);
            prop_assert!(f.slope_ci_low.unwrap() <= k + 1e-9 && f.slope_ci_high.unwrap() >= k - 1e-9);
        }
    }
}
