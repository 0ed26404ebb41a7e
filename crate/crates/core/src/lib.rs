//! Estimation of ROC curves, AUC, Youden index and optimal thresholds for
//! continuous diagnostic tests, with covariate-specific, covariate-adjusted
//! and time-dependent extensions.

// `!(x > 0.0)` is the deliberate NaN-rejecting form
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod binary;
pub mod covariate;
pub mod error;
mod gibbs;
pub mod indices;
pub mod mixture;
pub mod numeric;
pub mod pooled;
pub mod simulate;
pub mod timedep;

pub use error::{Result, RocError};
pub use nalgebra;
