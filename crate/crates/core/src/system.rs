//! The true system: first-order filtered process noise plus measurement noise.
//!
//! ```text
//! y(t) = lambda y(t-1) + q(t) + v(t) - lambda v(t-1)
//! ```
//!
//! which is the difference-equation form of `y = q / (1 - lambda z^-1) + v`.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::noise::{NoiseSource, NoiseSpec, SeededStream};

/// Burn-in used when callers do not pick one.
pub const DEFAULT_BURN_IN: usize = 1000;

/// Minimum trajectory length; an AR(2) fit needs two lags plus a target.
pub const MIN_LENGTH: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub lambda: f64,
    /// Process noise `q`, filtered by the pole.
    pub q_spec: NoiseSpec,
    /// Measurement noise `v`, added at the output.
    pub v_spec: NoiseSpec,
}

impl SystemParams {
    pub fn new(lambda: f64, q_spec: NoiseSpec, v_spec: NoiseSpec) -> Result<Self> {
        let params = SystemParams {
            lambda,
            q_spec,
            v_spec,
        };
        params.validate()?;
        Ok(params)
    }

    /// Zero-mean white scenario with process variance `delta2` and measurement variance `xi2`.
    pub fn white(lambda: f64, delta2: f64, xi2: f64) -> Result<Self> {
        Self::new(
            lambda,
            NoiseSpec::white(0.0, delta2),
            NoiseSpec::white(0.0, xi2),
        )
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda.abs() < 1.0) {
            return Err(Error::NonstationarySystem {
                lambda: self.lambda,
            });
        }
        self.q_spec.validate()?;
        self.v_spec.validate()
    }

    /// `v_bar + q_bar / (1 - lambda)`
    pub fn output_mean(&self) -> f64 {
        self.v_spec.mean + self.q_spec.mean / (1.0 - self.lambda)
    }
}

/// One simulated output record `y(1..N)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub values: Vec<f64>,
    pub params: SystemParams,
    pub q_stream: SeededStream,
    pub v_stream: SeededStream,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Writes `t,y` rows with `t` starting at 1.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "t,y")?;
        for (t, y) in self.values.iter().enumerate() {
            writeln!(out, "{},{}", t + 1, y)?;
        }
        Ok(())
    }
}

/// Simulates `burn_in + n` steps and keeps the last `n`.
///
/// `q` and `v` are drawn from the two halves of `stream.split()`. The
/// recursion starts at `y(0) = y_bar`, `v(0) = v_bar`.
pub fn simulate(
    params: &SystemParams,
    n: usize,
    burn_in: usize,
    stream: SeededStream,
) -> Result<Trajectory> {
    params.validate()?;
    if n < MIN_LENGTH {
        return Err(Error::InsufficientLength {
            needed: MIN_LENGTH,
            got: n,
        });
    }
    let (q_stream, v_stream) = stream.split()?;
    let mut q = NoiseSource::new(params.q_spec, q_stream)?;
    let mut v = NoiseSource::new(params.v_spec, v_stream)?;

    let lambda = params.lambda;
    let mut y_prev = params.output_mean();
    let mut v_prev = params.v_spec.mean;
    let mut step = || {
        let v_now = v.next_sample();
        let y = lambda * y_prev + q.next_sample() + v_now - lambda * v_prev;
        y_prev = y;
        v_prev = v_now;
        y
    };

    for _ in 0..burn_in {
        step();
    }
    let values = (0..n).map(|_| step()).collect();
    Ok(Trajectory {
        values,
        params: *params,
        q_stream,
        v_stream,
    })
}

/// `kappa` independent trajectories; batch `i` uses stream index `i` of `master_seed`.
///
/// Batches run on the rayon pool; the output order and contents do not
/// depend on scheduling.
pub fn simulate_batches(
    params: &SystemParams,
    n: usize,
    kappa: usize,
    burn_in: usize,
    master_seed: u64,
) -> Result<Vec<Trajectory>> {
    if kappa == 0 {
        return Err(Error::InsufficientLength { needed: 1, got: 0 });
    }
    params.validate()?;
    (0..kappa as u64)
        .into_par_iter()
        .map(|i| simulate(params, n, burn_in, SeededStream::new(master_seed, i)))
        .collect::<Vec<_>>()
        .into_iter()
        .collect()
}
