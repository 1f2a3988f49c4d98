//! PEM-optimal AR(1) and AR(2) one-step predictors.
//!
//! For the predictor `y_hat(t|t-1) = sum_i phi_i y(t-i)` the expected squared
//! prediction error of a process with mean `m` and covariances `Psi` is
//!
//! ```text
//! Gamma(phi) = Psi(0) - 2 sum_i phi_i Psi(i) + sum_ij phi_i phi_j Psi(|i-j|)
//!            + (1 - sum_i phi_i)^2 m^2
//! ```
//!
//! Minimizing it gives Yule-Walker equations with every covariance augmented
//! by `m^2`. No intercept is fitted, so a non-zero mean shifts the optimum.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moments::CovarianceSeq;
use crate::system::SystemParams;

/// Largest accepted condition number of a normal matrix.
pub const MAX_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum ArOrder {
    One,
    Two,
}

impl ArOrder {
    pub fn lags(self) -> usize {
        match self {
            ArOrder::One => 1,
            ArOrder::Two => 2,
        }
    }
}

impl TryFrom<u8> for ArOrder {
    type Error = String;

    fn try_from(v: u8) -> std::result::Result<Self, String> {
        match v {
            1 => Ok(ArOrder::One),
            2 => Ok(ArOrder::Two),
            other => Err(format!("AR order must be 1 or 2, got {other}")),
        }
    }
}

impl From<ArOrder> for u8 {
    fn from(o: ArOrder) -> u8 {
        o.lags() as u8
    }
}

impl fmt::Display for ArOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AR({})", self.lags())
    }
}

/// Fitted or optimal AR parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArEstimate {
    pub order: ArOrder,
    /// `[phi1]` or `[phi1, phi2]`.
    pub coeffs: Vec<f64>,
    pub pred_error_variance: Option<f64>,
}

impl ArEstimate {
    pub fn new(order: ArOrder, coeffs: Vec<f64>) -> Self {
        assert_eq!(
            coeffs.len(),
            order.lags(),
            "coefficient count must match order"
        );
        ArEstimate {
            order,
            coeffs,
            pred_error_variance: None,
        }
    }

    fn with_variance(mut self, variance: f64) -> Self {
        self.pred_error_variance = Some(variance);
        self
    }
}

fn require_lags(cov: &CovarianceSeq, lags: usize) -> Result<()> {
    if cov.tau_max() < lags {
        return Err(Error::InsufficientLength {
            needed: lags + 1,
            got: cov.values.len(),
        });
    }
    Ok(())
}

/// Centered part of the prediction-error quadratic form.
fn centered_form(psi: &[f64], coeffs: &[f64]) -> f64 {
    let mut acc = psi[0];
    for (i, &a) in coeffs.iter().enumerate() {
        acc -= 2.0 * a * psi[i + 1];
        for (j, &b) in coeffs.iter().enumerate() {
            acc += a * b * psi[i.abs_diff(j)];
        }
    }
    acc
}

/// Expected squared one-step prediction error `Gamma(phi)`.
pub fn pem_cost(cov: &CovarianceSeq, coeffs: &[f64]) -> Result<f64> {
    require_lags(cov, coeffs.len())?;
    let err_mean = prediction_error_mean(cov.mean, coeffs);
    Ok(centered_form(&cov.values, coeffs) + err_mean * err_mean)
}

/// `(1 - sum phi) y_bar`
pub fn prediction_error_mean(mean: f64, coeffs: &[f64]) -> f64 {
    (1.0 - coeffs.iter().sum::<f64>()) * mean
}

/// Variance of the prediction error: `Gamma(phi)` minus the squared error mean.
///
/// Evaluated as the centered quadratic form, which is the same quantity
/// without the cancellation.
pub fn prediction_error_variance(cov: &CovarianceSeq, est: &ArEstimate) -> Result<f64> {
    require_lags(cov, est.order.lags())?;
    Ok(centered_form(&cov.values, &est.coeffs))
}

/// `phi1 = (Psi(1) + y_bar^2) / (Psi(0) + y_bar^2)`
pub fn optimal_ar1(cov: &CovarianceSeq) -> Result<ArEstimate> {
    require_lags(cov, 1)?;
    let m = cov.mean * cov.mean;
    let denom = cov.values[0] + m;
    if !(denom > 0.0) {
        return Err(Error::DegenerateProcess);
    }
    let est = ArEstimate::new(ArOrder::One, vec![(cov.values[1] + m) / denom]);
    let var = prediction_error_variance(cov, &est)?;
    Ok(est.with_variance(var))
}

/// Solves the mean-augmented 2x2 Yule-Walker system in ratio form:
///
/// ```text
/// D    = Psi0^2 - Psi1^2 + 2m (Psi0 - Psi1)
/// phi1 = [Psi1 Psi0 - Psi2 Psi1 + m (Psi0 - Psi2)] / D
/// phi2 = [Psi2 Psi0 - Psi1^2 + m (Psi0 - 2 Psi1 + Psi2)] / D
/// ```
pub fn optimal_ar2(cov: &CovarianceSeq) -> Result<ArEstimate> {
    require_lags(cov, 2)?;
    let m = cov.mean * cov.mean;
    let (p0, p1, p2) = (cov.values[0], cov.values[1], cov.values[2]);
    if !(p0 + m > 0.0) {
        return Err(Error::DegenerateProcess);
    }
    // eigenvalues of [[p0+m, p1+m], [p1+m, p0+m]]
    let hi = (p0 + p1 + 2.0 * m).abs().max((p0 - p1).abs());
    let lo = (p0 + p1 + 2.0 * m).abs().min((p0 - p1).abs());
    let condition = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    if !(condition <= MAX_CONDITION) {
        return Err(Error::NonIdentifiable { condition });
    }

    let d = p0 * p0 - p1 * p1 + 2.0 * m * (p0 - p1);
    let phi1 = (p1 * p0 - p2 * p1 + m * (p0 - p2)) / d;
    let phi2 = (p2 * p0 - p1 * p1 + m * (p0 - 2.0 * p1 + p2)) / d;
    let est = ArEstimate::new(ArOrder::Two, vec![phi1, phi2]);
    let var = prediction_error_variance(cov, &est)?;
    Ok(est.with_variance(var))
}

/// Optimal predictor of the given order from a covariance sequence.
pub fn optimal(cov: &CovarianceSeq, order: ArOrder) -> Result<ArEstimate> {
    match order {
        ArOrder::One => optimal_ar1(cov),
        ArOrder::Two => optimal_ar2(cov),
    }
}

/// Optimal predictors written directly in `lambda`, `delta2`, `xi2` and `y_bar`.
///
/// AR(1):
/// `phi1 = (lambda delta2 + (1-lambda^2) m) / (delta2 + (1-lambda^2)(xi2 + m))`.
///
/// AR(2), with `s = delta2 + xi2` and
/// `D = (s + 2m) s - xi2 lambda^2 (xi2 + 2m) - 2 lambda delta2 m`:
///
/// ```text
/// phi1 = (lambda delta2 + (1-lambda^2) m) s / D
/// phi2 = (lambda^2 delta2 xi2 + [delta2 (1-lambda)^2 + xi2 (1-lambda^2)] m) / D
/// ```
///
/// where `m = y_bar^2`. At zero mean the AR(1) error variance is
/// `(s^2 - lambda^2 xi2^2) / (delta2 + (1-lambda^2) xi2)`; otherwise the
/// centered quadratic form is evaluated at the optimum.
pub fn closed_form_white(params: &SystemParams, order: ArOrder) -> Result<ArEstimate> {
    params.validate()?;
    if !(params.q_spec.is_white() && params.v_spec.is_white()) {
        return Err(Error::UnsupportedScenario(
            "closed forms cover white noise only; use the covariance path".into(),
        ));
    }
    let l = params.lambda;
    let l2 = l * l;
    let d2 = params.q_spec.variance;
    let x2 = params.v_spec.variance;
    let ybar = params.output_mean();
    let m = ybar * ybar;
    let s = d2 + x2;

    let psi = [
        d2 / (1.0 - l2) + x2,
        l * d2 / (1.0 - l2),
        l2 * d2 / (1.0 - l2),
    ];

    match order {
        ArOrder::One => {
            let denom = d2 + (1.0 - l2) * (x2 + m);
            if !(denom > 0.0) {
                return Err(Error::DegenerateProcess);
            }
            let phi1 = (l * d2 + (1.0 - l2) * m) / denom;
            let var = if m == 0.0 {
                (s * s - l2 * x2 * x2) / (d2 + (1.0 - l2) * x2)
            } else {
                centered_form(&psi, &[phi1])
            };
            Ok(ArEstimate::new(ArOrder::One, vec![phi1]).with_variance(var))
        }
        ArOrder::Two => {
            if !(psi[0] + m > 0.0) {
                return Err(Error::DegenerateProcess);
            }
            let d = (s + 2.0 * m) * s - x2 * l2 * (x2 + 2.0 * m) - 2.0 * l * d2 * m;
            if !(d > 0.0) {
                return Err(Error::NonIdentifiable {
                    condition: f64::INFINITY,
                });
            }
            let phi1 = (l * d2 + (1.0 - l2) * m) * s / d;
            let phi2 = (l2 * d2 * x2 + (d2 * (1.0 - l) * (1.0 - l) + x2 * (1.0 - l2)) * m) / d;
            let coeffs = vec![phi1, phi2];
            let var = centered_form(&psi, &coeffs);
            Ok(ArEstimate::new(ArOrder::Two, coeffs).with_variance(var))
        }
    }
}
