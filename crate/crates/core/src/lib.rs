//! Prediction of threshold-exceedance events in heavy-tailed linear time series.
//!
//! The crate covers the full workflow:
//!
//! * [`series`] — series container, empirical distributions, data preparation;
//! * [`sim`] — seeded generation of heavy-tailed innovations and linear-model paths;
//! * [`linear`] — AR(d) estimation, horizon coefficients, moving-average expansions;
//! * [`evt`] — extreme-value estimators (GEV, GP, declustering, extreme quantiles,
//!   periodogram, long-memory parameter);
//! * [`tail`] — tail-dependence coefficients and limiting precision of calibrated
//!   exceedance predictors;
//! * [`predict`] — calibrated predictor construction and path scoring;
//! * [`metrics`] — confusion tallies, skill scores, ROC/PR curves;
//! * [`backtest`] — rolling-window experiment harness and report assembly.

pub mod backtest;
pub mod error;
pub mod evt;
pub mod io;
pub mod linear;
pub mod metrics;
pub mod predict;
pub mod series;
pub mod sim;
pub mod tail;

pub use error::{Error, Result};
