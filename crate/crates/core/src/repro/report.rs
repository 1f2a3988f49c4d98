use serde::{Deserialize, Serialize};

use crate::ar::{closed_form_white, optimal_ar1, optimal_ar2, ArEstimate, ArOrder};
use crate::error::Result;
use crate::lsq::BatchSummary;
use crate::moments::covariance_for;
use crate::system::SystemParams;

use super::config::ScenarioConfig;

/// Tolerance for agreement between the closed-form and covariance routes.
pub const PATH_CONSISTENCY_TOL: f64 = 1e-12;

/// Sigma multiple for stochastic bands.
pub const BAND_SIGMAS: f64 = 3.0;

/// Exact quantities for one scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Theory {
    pub mean: f64,
    pub variance: f64,
    /// `Psi(0..=2)`
    pub covariance: Vec<f64>,
    /// Optimum for the scenario's order.
    pub theta_star: Vec<f64>,
    pub pred_error_variance: f64,
    pub ar1: ArEstimate,
    pub ar2: ArEstimate,
    /// Largest scaled gap between closed forms and the covariance route
    /// (white scenarios only).
    pub closed_form_gap: Option<f64>,
}

impl Theory {
    pub fn compute(params: &SystemParams, order: ArOrder) -> Result<Self> {
        let cov = covariance_for(params, 2)?;
        let ar1 = optimal_ar1(&cov)?;
        let ar2 = optimal_ar2(&cov)?;

        let closed_form_gap = if params.q_spec.is_white() && params.v_spec.is_white() {
            let mut gap: f64 = 0.0;
            for est in [&ar1, &ar2] {
                let closed = closed_form_white(params, est.order)?;
                let pairs = est.coeffs.iter().zip(&closed.coeffs).chain(
                    est.pred_error_variance
                        .iter()
                        .zip(&closed.pred_error_variance),
                );
                for (a, b) in pairs {
                    gap = gap.max((a - b).abs() / b.abs().max(1.0));
                }
            }
            Some(gap)
        } else {
            None
        };

        let chosen = match order {
            ArOrder::One => &ar1,
            ArOrder::Two => &ar2,
        };
        Ok(Theory {
            mean: cov.mean,
            variance: cov.values[0],
            covariance: cov.values.clone(),
            theta_star: chosen.coeffs.clone(),
            pred_error_variance: chosen.pred_error_variance.unwrap_or(f64::NAN),
            closed_form_gap,
            ar1,
            ar2,
        })
    }

    pub fn optimum(&self, order: ArOrder) -> &ArEstimate {
        match order {
            ArOrder::One => &self.ar1,
            ArOrder::Two => &self.ar2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Empirical {
    Single(ArEstimate),
    Batch(BatchSummary),
}

impl Empirical {
    pub fn coeffs(&self) -> &[f64] {
        match self {
            Empirical::Single(e) => &e.coeffs,
            Empirical::Batch(b) => &b.emp_mean,
        }
    }
}

/// One verdict: `lower <= value <= upper`, with open ends when absent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandCheck {
    pub name: String,
    pub value: f64,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub passed: bool,
}

impl BandCheck {
    pub fn within(
        name: impl Into<String>,
        value: f64,
        lower: Option<f64>,
        upper: Option<f64>,
    ) -> Self {
        let passed = value.is_finite()
            && lower.is_none_or(|l| value >= l)
            && upper.is_none_or(|u| value <= u);
        BandCheck {
            name: name.into(),
            value,
            lower,
            upper,
            passed,
        }
    }

    pub fn around(name: impl Into<String>, value: f64, center: f64, half_width: f64) -> Self {
        Self::within(
            name,
            value,
            Some(center - half_width),
            Some(center + half_width),
        )
    }
}

/// Everything known about one scenario run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub scenario: ScenarioConfig,
    pub theory: Theory,
    pub empirical: Option<Empirical>,
    /// `empirical - theta_star`, per coefficient.
    pub deltas: Option<Vec<f64>>,
    pub checks: Vec<BandCheck>,
    pub notes: Vec<String>,
    pub passed: bool,
}

impl RunReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}
