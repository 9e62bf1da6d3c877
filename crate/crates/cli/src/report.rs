//! Report rendering: JSON objects and CSV rows with a fixed column set.

use anyhow::Result;
use serde_json::Value;
use specsum_core::output::{format_f64, to_json};
use specsum_core::sums::{AlgoConfig, GuaranteeKind, SpectralSumReport};

/// Stable CSV columns, in order.
pub const CSV_COLUMNS: [&str; 24] = [
    "axis",
    "value",
    "seed",
    "algorithm",
    "n",
    "eps",
    "delta",
    "mode",
    "estimate",
    "exact",
    "error",
    "guarantee",
    "guarantee_eps",
    "guarantee_bound",
    "within_guarantee",
    "queries",
    "soft_queries",
    "polylog_factor",
    "ae_rounds",
    "shots",
    "sve_calls",
    "matvecs",
    "repetitions",
    "failed",
];

/// A report plus whether its exact value may be shown (above the size cap
/// the oracle fields are withheld).
pub struct Rendered<'a> {
    pub report: &'a SpectralSumReport,
    pub cfg: &'a AlgoConfig,
    pub exact_shown: bool,
}

impl Rendered<'_> {
    /// `Some(pass)` when the exact value is shown.
    pub fn verdict(&self) -> Option<bool> {
        self.exact_shown.then_some(self.report.within_guarantee)
    }

    pub fn json(&self) -> Result<String> {
        let mut v = serde_json::to_value(self.report)?;
        if !self.exact_shown {
            for key in ["exact", "error", "within_guarantee"] {
                v[key] = Value::Null;
            }
        }
        v["config"] = serde_json::to_value(self.cfg)?;
        Ok(to_json(&v)?)
    }

    pub fn csv_row(&self, axis: &str, value: Option<f64>) -> Vec<String> {
        let r = self.report;
        let l = &r.ledger;
        let oracle = |x: f64| if self.exact_shown { format_f64(x) } else { String::new() };
        vec![
            axis.to_string(),
            value.map(format_f64).unwrap_or_default(),
            self.cfg.seed.to_string(),
            r.algorithm.clone(),
            r.n.to_string(),
            format_f64(self.cfg.eps),
            format_f64(self.cfg.delta),
            serde_json::to_value(self.cfg.mode).ok().and_then(|m| m.as_str().map(String::from)).unwrap_or_default(),
            format_f64(r.estimate.value),
            oracle(r.exact),
            oracle(r.error),
            match r.guarantee {
                GuaranteeKind::Relative => "relative".into(),
                GuaranteeKind::Absolute => "absolute".into(),
            },
            format_f64(r.guarantee_eps),
            format_f64(r.guarantee_bound),
            self.verdict().map(|b| b.to_string()).unwrap_or_default(),
            format_f64(l.queries),
            format_f64(r.soft_queries),
            format_f64(r.polylog_factor),
            format_f64(l.ae_rounds),
            format_f64(l.shots),
            format_f64(l.sve_calls),
            format_f64(l.matvecs),
            format_f64(l.repetitions),
            r.estimate.failed.to_string(),
        ]
    }
}

pub fn write_csv<W: std::io::Write>(out: W, rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_COLUMNS)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}
