//! Improved equivariant estimation of the larger of two location parameters.
//!
//! Given one observation from each of two location families with common
//! standard density `f`, every estimator here has the form `X₍₂₎ − φ(U)`
//! with `U = X₍₂₎ − X₍₁₎`. [`calibrate`] computes the constants and curves
//! `φ` is built from, [`estimate`] evaluates the estimators, and
//! [`risklab`] compares them by simulation.

#![allow(
    clippy::neg_cmp_op_on_partial_ord,
    clippy::excessive_precision,
    clippy::needless_range_loop
)]

pub mod calibrate;
pub mod check;
pub mod data;
pub mod error;
pub mod estimate;
pub mod family;
pub mod loss;
pub mod numerics;
pub mod report;
pub mod risklab;

pub use calibrate::{Calibration, NumericSettings, Provenance};
pub use error::{Error, Result};
pub use estimate::{Estimate, EstimatorKind};
pub use family::{exponential_family, normal_family, LocationFamily, ObservationPair};
pub use loss::{make_loss, LossKind, LossSpec};
pub use risklab::{GpnCurve, RiskCurve, SweepConfig};
