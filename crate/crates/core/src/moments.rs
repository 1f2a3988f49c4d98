//! Exact first- and second-order statistics of the system output.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::noise::NoiseKind;
use crate::system::SystemParams;

/// Mean and autocovariances `Psi(0..=tau_max)` of a stationary process.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovarianceSeq {
    pub mean: f64,
    pub values: Vec<f64>,
}

impl CovarianceSeq {
    pub fn tau_max(&self) -> usize {
        self.values.len().saturating_sub(1)
    }

    pub fn variance(&self) -> f64 {
        self.values[0]
    }

    /// Writes `tau,psi` rows.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "tau,psi")?;
        for (tau, psi) in self.values.iter().enumerate() {
            writeln!(out, "{tau},{psi}")?;
        }
        Ok(())
    }
}

fn require_tau_max(tau_max: usize) -> Result<()> {
    if tau_max < 2 {
        return Err(Error::InvalidArgument(format!(
            "tau_max must be >= 2, got {tau_max}"
        )));
    }
    Ok(())
}

fn require_white(params: &SystemParams) -> Result<()> {
    if !params.q_spec.is_white() {
        return Err(Error::UnsupportedScenario(
            "colored process noise; use colored_covariance".into(),
        ));
    }
    if !params.v_spec.is_white() {
        return Err(Error::UnsupportedScenario(
            "colored measurement noise is not supported".into(),
        ));
    }
    Ok(())
}

/// `y_bar = v_bar + q_bar / (1 - lambda)`
pub fn theoretical_mean(params: &SystemParams) -> Result<f64> {
    params.validate()?;
    Ok(params.output_mean())
}

/// `Phi_y = delta2 / (1 - lambda^2) + xi2`, independent of the noise means.
pub fn theoretical_variance(params: &SystemParams) -> Result<f64> {
    params.validate()?;
    require_white(params)?;
    let l2 = params.lambda * params.lambda;
    Ok(params.q_spec.variance / (1.0 - l2) + params.v_spec.variance)
}

/// Covariance sequence for white `q` and `v`.
///
/// `Psi(0) = delta2/(1-lambda^2) + xi2` and `Psi(tau) = lambda^tau delta2/(1-lambda^2)`
/// for `tau >= 1`. The tail is built by repeated multiplication so that
/// `Psi(tau+1) = lambda Psi(tau)` holds bit-for-bit.
pub fn theoretical_covariance(params: &SystemParams, tau_max: usize) -> Result<CovarianceSeq> {
    require_tau_max(tau_max)?;
    let variance = theoretical_variance(params)?;
    let lambda = params.lambda;
    let filtered = params.q_spec.variance / (1.0 - lambda * lambda);

    let mut values = Vec::with_capacity(tau_max + 1);
    values.push(variance);
    let mut psi = lambda * filtered;
    for _ in 1..=tau_max {
        values.push(psi);
        psi *= lambda;
    }
    Ok(CovarianceSeq {
        mean: params.output_mean(),
        values,
    })
}

/// `Psi(0..=2)` from the three moment equations obtained by multiplying the
/// system recursion by `y(t)`, `y(t-1)` and `y(t-2)`:
///
/// ```text
/// Psi(0) = lambda Psi(1) + delta2 + xi2
/// Psi(1) = lambda Psi(0) - lambda xi2
/// Psi(2) = lambda Psi(1)
/// ```
///
/// Kept as an independent route to cross-check [`theoretical_covariance`].
pub fn covariance_recursion(params: &SystemParams) -> Result<[f64; 3]> {
    params.validate()?;
    require_white(params)?;
    let (l, d2, x2) = (
        params.lambda,
        params.q_spec.variance,
        params.v_spec.variance,
    );
    // substitute the second equation into the first
    let psi0 = (d2 + x2 - l * l * x2) / (1.0 - l * l);
    let psi1 = l * psi0 - l * x2;
    Ok([psi0, psi1, l * psi1])
}

/// Exact covariances when `q` is first-order colored noise and `v` is white.
///
/// With `x = q / (1 - lambda z^-1)`, `sigma_q^2 = var_eta / (1 - a^2)`:
///
/// ```text
/// Psi_x(0)   = sigma_q^2 / (1 - lambda^2) * (1 + 2 a lambda / (1 - a lambda))
/// Psi_x(tau) = lambda Psi_x(tau-1) + sigma_q^2 a^tau / (1 - a lambda)
/// Psi_y(tau) = Psi_x(tau) + xi2 [tau = 0]
/// ```
pub fn colored_covariance(params: &SystemParams, tau_max: usize) -> Result<CovarianceSeq> {
    require_tau_max(tau_max)?;
    params.validate()?;
    let a = match params.q_spec.kind {
        NoiseKind::ColoredAr1 { coeff } => coeff,
        NoiseKind::White => {
            return Err(Error::UnsupportedScenario(
                "white process noise; use theoretical_covariance".into(),
            ))
        }
    };
    if !params.v_spec.is_white() {
        return Err(Error::UnsupportedScenario(
            "colored measurement noise is not supported".into(),
        ));
    }
    let lambda = params.lambda;
    let sigma_q2 = params.q_spec.stationary_variance();
    let cross = 1.0 - a * lambda;

    let mut values = Vec::with_capacity(tau_max + 1);
    let mut psi_x = sigma_q2 / (1.0 - lambda * lambda) * (1.0 + 2.0 * a * lambda / cross);
    values.push(psi_x + params.v_spec.variance);
    let mut a_pow = 1.0;
    for _ in 1..=tau_max {
        a_pow *= a;
        psi_x = lambda * psi_x + sigma_q2 * a_pow / cross;
        values.push(psi_x);
    }
    Ok(CovarianceSeq {
        mean: params.output_mean(),
        values,
    })
}

/// Exact covariances for any supported scenario.
pub fn covariance_for(params: &SystemParams, tau_max: usize) -> Result<CovarianceSeq> {
    match params.q_spec.kind {
        NoiseKind::White => theoretical_covariance(params, tau_max),
        NoiseKind::ColoredAr1 { .. } => colored_covariance(params, tau_max),
    }
}

/// Sample mean and biased (`1/N`) sample autocovariances.
pub fn sample_covariance(values: &[f64], tau_max: usize) -> Result<CovarianceSeq> {
    let n = values.len();
    if n <= tau_max {
        return Err(Error::InsufficientLength {
            needed: tau_max + 1,
            got: n,
        });
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let centered: Vec<f64> = values.iter().map(|y| y - mean).collect();
    let values = (0..=tau_max)
        .map(|tau| {
            centered[tau..]
                .iter()
                .zip(&centered)
                .map(|(a, b)| a * b)
                .sum::<f64>()
                / n as f64
        })
        .collect();
    Ok(CovarianceSeq { mean, values })
}
