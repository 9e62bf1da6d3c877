//! Emulated quantum estimators for spectral sums of symmetric matrices.
//!
//! Each estimator runs the algorithm's arithmetic exactly, replaces every
//! quantum primitive with a classical model that honours the primitive's
//! error and success contract, and counts oracle queries. Exact spectral
//! sums from a dense eigendecomposition are the ground truth.

pub mod baselines;
pub mod error;
pub mod fit;
pub mod ledger;
pub mod matrix;
pub mod measurement;
pub mod mtx;
pub mod output;
pub mod poly;
pub mod qmodel;
pub mod rng;
pub mod sums;
pub mod verify;

pub use error::{Error, Result};
