//! Least-squares AR fitting and multi-batch estimator statistics.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ar::{ArEstimate, ArOrder, MAX_CONDITION};
use crate::error::{Error, Result};
use crate::noise::SeededStream;
use crate::system::{simulate, SystemParams, Trajectory};

/// Lag-aligned regression `y(t) = zeta(t)^T theta + e(t)` for `t = order+1..N`.
///
/// `zeta(t) = [y(t-1)]` or `[y(t-1), y(t-2)]`; there is no intercept column.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionProblem {
    pub order: ArOrder,
    pub targets: Vec<f64>,
    /// Row-major, `order.lags()` columns.
    regressors: Vec<f64>,
}

impl RegressionProblem {
    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.regressors.chunks_exact(self.order.lags())
    }

    /// `y(t) - zeta(t)^T theta` for every row.
    pub fn residuals(&self, coeffs: &[f64]) -> Vec<f64> {
        self.rows()
            .zip(&self.targets)
            .map(|(z, y)| y - z.iter().zip(coeffs).map(|(a, b)| a * b).sum::<f64>())
            .collect()
    }

    /// `max_i |sum_t zeta_i(t) e(t)|`; zero at the least-squares solution.
    pub fn orthogonality_defect(&self, coeffs: &[f64]) -> f64 {
        let eps = self.residuals(coeffs);
        (0..self.order.lags())
            .map(|i| {
                self.rows()
                    .zip(&eps)
                    .map(|(z, e)| z[i] * e)
                    .sum::<f64>()
                    .abs()
            })
            .fold(0.0, f64::max)
    }
}

pub fn build_problem(values: &[f64], order: ArOrder) -> Result<RegressionProblem> {
    let p = order.lags();
    if values.len() < p + 1 {
        return Err(Error::InsufficientLength {
            needed: p + 1,
            got: values.len(),
        });
    }
    let targets = values[p..].to_vec();
    let mut regressors = Vec::with_capacity(targets.len() * p);
    for t in p..values.len() {
        regressors.extend((1..=p).map(|lag| values[t - lag]));
    }
    Ok(RegressionProblem {
        order,
        targets,
        regressors,
    })
}

/// Solves the normal equations `[sum zeta zeta^T] theta = sum zeta y`.
///
/// The 2x2 system is solved by Cholesky after a condition-number check
/// against [`MAX_CONDITION`]. The attached `pred_error_variance` is the
/// (1/M) variance of the residuals.
pub fn ls_fit(problem: &RegressionProblem) -> Result<ArEstimate> {
    let coeffs = match problem.order {
        ArOrder::One => {
            let (mut s, mut r) = (0.0, 0.0);
            for (z, y) in problem.rows().zip(&problem.targets) {
                s += z[0] * z[0];
                r += z[0] * y;
            }
            if !(s > 0.0 && s.is_finite()) {
                return Err(Error::NonIdentifiable {
                    condition: f64::INFINITY,
                });
            }
            vec![r / s]
        }
        ArOrder::Two => {
            let (mut a, mut b, mut c, mut r0, mut r1) = (0.0, 0.0, 0.0, 0.0, 0.0);
            for (z, y) in problem.rows().zip(&problem.targets) {
                a += z[0] * z[0];
                b += z[0] * z[1];
                c += z[1] * z[1];
                r0 += z[0] * y;
                r1 += z[1] * y;
            }
            let half_gap = (((a - c) / 2.0).powi(2) + b * b).sqrt();
            let mid = (a + c) / 2.0;
            let (hi, lo) = (mid + half_gap, mid - half_gap);
            let condition = if lo > 0.0 { hi / lo } else { f64::INFINITY };
            if !(condition <= MAX_CONDITION) {
                return Err(Error::NonIdentifiable { condition });
            }
            let l11 = a.sqrt();
            let l21 = b / l11;
            let l22 = (c - l21 * l21).sqrt();
            let w0 = r0 / l11;
            let w1 = (r1 - l21 * w0) / l22;
            let phi2 = w1 / l22;
            let phi1 = (w0 - l21 * phi2) / l11;
            vec![phi1, phi2]
        }
    };

    let eps = problem.residuals(&coeffs);
    let m = eps.len() as f64;
    let e_mean = eps.iter().sum::<f64>() / m;
    let var = eps.iter().map(|e| (e - e_mean) * (e - e_mean)).sum::<f64>() / m;
    Ok(ArEstimate {
        order: problem.order,
        coeffs,
        pred_error_variance: Some(var),
    })
}

/// Builds and solves the regression for one trajectory.
pub fn fit_trajectory(traj: &Trajectory, order: ArOrder) -> Result<ArEstimate> {
    ls_fit(&build_problem(&traj.values, order)?)
}

/// Spread of the per-batch estimates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EmpVariance {
    Scalar(f64),
    Matrix([[f64; 2]; 2]),
}

impl EmpVariance {
    pub fn diagonal(&self) -> Vec<f64> {
        match self {
            EmpVariance::Scalar(v) => vec![*v],
            EmpVariance::Matrix(m) => vec![m[0][0], m[1][1]],
        }
    }
}

/// Empirical mean and `1/kappa`-normalized dispersion of the estimates.
///
/// The `1/kappa` normalization is the biased (maximum-likelihood) variance,
/// not the `1/(kappa-1)` sample variance.
pub fn empirical_stats(estimates: &[ArEstimate]) -> Result<(Vec<f64>, EmpVariance)> {
    let first = estimates
        .first()
        .ok_or(Error::InsufficientLength { needed: 1, got: 0 })?;
    let p = first.order.lags();
    let k = estimates.len() as f64;

    let mut mean = vec![0.0; p];
    for est in estimates {
        if est.order != first.order {
            return Err(Error::InvalidArgument(
                "mixed AR orders in one batch".into(),
            ));
        }
        for (m, c) in mean.iter_mut().zip(&est.coeffs) {
            *m += c;
        }
    }
    mean.iter_mut().for_each(|m| *m /= k);

    let variance = match first.order {
        ArOrder::One => {
            let v = estimates
                .iter()
                .map(|e| (e.coeffs[0] - mean[0]).powi(2))
                .sum::<f64>();
            EmpVariance::Scalar(v / k)
        }
        ArOrder::Two => {
            let mut m = [[0.0; 2]; 2];
            for e in estimates {
                let d = [e.coeffs[0] - mean[0], e.coeffs[1] - mean[1]];
                m[0][0] += d[0] * d[0];
                m[0][1] += d[0] * d[1];
                m[1][1] += d[1] * d[1];
            }
            m[0][0] /= k;
            m[0][1] /= k;
            m[1][1] /= k;
            m[1][0] = m[0][1];
            EmpVariance::Matrix(m)
        }
    };
    Ok((mean, variance))
}

/// Per-batch estimates with their empirical mean and dispersion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchSummary {
    pub order: ArOrder,
    pub kappa: usize,
    /// Samples per batch.
    pub n: usize,
    pub estimates: Vec<ArEstimate>,
    pub emp_mean: Vec<f64>,
    pub emp_variance: EmpVariance,
}

impl BatchSummary {
    pub fn from_estimates(n: usize, estimates: Vec<ArEstimate>) -> Result<Self> {
        let (emp_mean, emp_variance) = empirical_stats(&estimates)?;
        Ok(BatchSummary {
            order: estimates[0].order,
            kappa: estimates.len(),
            n,
            estimates,
            emp_mean,
            emp_variance,
        })
    }

    /// Writes `batch_index,phi1[,phi2]` rows; `batch_index` is the stream index.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        match self.order {
            ArOrder::One => writeln!(out, "batch_index,phi1")?,
            ArOrder::Two => writeln!(out, "batch_index,phi1,phi2")?,
        }
        for (i, est) in self.estimates.iter().enumerate() {
            let row: Vec<String> = est.coeffs.iter().map(f64::to_string).collect();
            writeln!(out, "{i},{}", row.join(","))?;
        }
        Ok(())
    }

    /// Summary object `{order, kappa, n, emp_mean, emp_variance}`.
    pub fn summary_json(&self) -> serde_json::Value {
        serde_json::json!({
            "order": self.order,
            "kappa": self.kappa,
            "n": self.n,
            "emp_mean": self.emp_mean,
            "emp_variance": self.emp_variance,
        })
    }
}

/// Runs `kappa` independent simulate-and-fit cycles.
///
/// Batch `i` uses stream `i` of `master_seed`, so the result does not depend
/// on how rayon schedules the work.
pub fn batch_estimate(
    params: &SystemParams,
    order: ArOrder,
    n: usize,
    kappa: usize,
    burn_in: usize,
    master_seed: u64,
) -> Result<BatchSummary> {
    if kappa < 2 {
        return Err(Error::InvalidArgument(format!(
            "kappa must be >= 2 for batch statistics, got {kappa}"
        )));
    }
    params.validate()?;
    let results: Vec<Result<ArEstimate>> = (0..kappa as u64)
        .into_par_iter()
        .map(|i| {
            let traj = simulate(params, n, burn_in, SeededStream::new(master_seed, i))?;
            fit_trajectory(&traj, order)
        })
        .collect();

    let mut estimates = Vec::with_capacity(kappa);
    for (index, r) in results.into_iter().enumerate() {
        estimates.push(r.map_err(|e| Error::BatchFailed {
            index,
            source: Box::new(e),
        })?);
    }
    BatchSummary::from_estimates(n, estimates)
}

/// Running statistics after each batch.
#[derive(Debug, Clone, PartialEq)]
pub struct RunningRow {
    /// 1-based count of batches included.
    pub batch: usize,
    pub coeffs: Vec<f64>,
    pub mean: Vec<f64>,
    /// Diagonal of the running dispersion.
    pub variance: Vec<f64>,
}

/// Prefix statistics; the last row equals the full-batch summary bit-for-bit.
pub fn running_statistics(estimates: &[ArEstimate]) -> Result<Vec<RunningRow>> {
    (1..=estimates.len())
        .map(|k| {
            let (mean, var) = empirical_stats(&estimates[..k])?;
            Ok(RunningRow {
                batch: k,
                coeffs: estimates[k - 1].coeffs.clone(),
                mean,
                variance: var.diagonal(),
            })
        })
        .collect()
}
