//! Identification of a first-order filtered-noise process with AR(1)/AR(2) predictors.
//!
//! The true system is
//!
//! ```text
//! y(t) = lambda y(t-1) + q(t) + v(t) - lambda v(t-1)
//! ```
//!
//! i.e. process noise `q` through the pole `lambda` plus measurement noise `v`.
//! The crate provides
//!
//! - [`noise`]: seedable white and first-order colored Gaussian sources,
//! - [`system`]: trajectory simulation, single and batched,
//! - [`moments`]: exact mean and covariance sequences,
//! - [`ar`]: PEM-optimal AR(1)/AR(2) predictors and their error variances,
//! - [`lsq`]: least-squares fitting and multi-batch statistics,
//! - [`repro`]: a scenario harness with config files, JSON reports and band verdicts.
//!
//! ```
//! use arident::{ar, moments, system::SystemParams};
//!
//! let params = SystemParams::white(1.0 / 3.0, 4.0, 9.0).unwrap();
//! let cov = moments::theoretical_covariance(&params, 2).unwrap();
//! let best = ar::optimal_ar1(&cov).unwrap();
//! assert!((best.coeffs[0] - 1.0 / 9.0).abs() < 1e-15);
//! ```

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ar;
pub mod error;
pub mod lsq;
pub mod moments;
pub mod noise;
pub mod repro;
pub mod system;

pub use ar::{ArEstimate, ArOrder};
pub use error::{Error, Result};
pub use lsq::{BatchSummary, EmpVariance, RegressionProblem};
pub use moments::CovarianceSeq;
pub use noise::{NoiseKind, NoiseSpec, SeededStream};
pub use system::{SystemParams, Trajectory};
