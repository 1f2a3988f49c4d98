//! Seedable Gaussian noise sources.
//!
//! Two families are supported: white noise `WN(mean, variance)` and zero-mean
//! colored noise obtained by passing white noise through a first-order filter
//! `q(t) = a q(t-1) + eta(t)`, `eta ~ N(0, variance)`.
//!
//! Every stream is a pure function of `(seed, stream_index)`. Streams are
//! ChaCha8 keystreams; distinct indices select distinct 64-bit stream ids of
//! the same key, so they never overlap.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Shape of a noise source.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    White,
    /// First-order filtered white noise with the given pole.
    ColoredAr1 {
        coeff: f64,
    },
}

/// Distribution of one noise source.
///
/// For [`NoiseKind::ColoredAr1`] the `variance` is that of the driving white
/// sequence, not of the colored output.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub mean: f64,
    pub variance: f64,
    pub kind: NoiseKind,
}

impl NoiseSpec {
    pub fn white(mean: f64, variance: f64) -> Self {
        NoiseSpec {
            mean,
            variance,
            kind: NoiseKind::White,
        }
    }

    /// Zero-mean colored noise driven by `N(0, variance)`.
    pub fn colored(coeff: f64, variance: f64) -> Self {
        NoiseSpec {
            mean: 0.0,
            variance,
            kind: NoiseKind::ColoredAr1 { coeff },
        }
    }

    pub fn is_white(&self) -> bool {
        matches!(self.kind, NoiseKind::White)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.mean.is_finite() {
            return Err(Error::InvalidSpec(format!(
                "mean {} is not finite",
                self.mean
            )));
        }
        if !(self.variance.is_finite() && self.variance >= 0.0) {
            return Err(Error::InvalidSpec(format!(
                "variance {} must be finite and >= 0",
                self.variance
            )));
        }
        if let NoiseKind::ColoredAr1 { coeff } = self.kind {
            if !(coeff.abs() < 1.0) {
                return Err(Error::NonstationaryFilter { coeff });
            }
            if self.mean != 0.0 {
                return Err(Error::InvalidSpec(format!(
                    "colored noise must be zero-mean, got mean {}",
                    self.mean
                )));
            }
        }
        Ok(())
    }

    /// Stationary variance of the emitted sequence.
    pub fn stationary_variance(&self) -> f64 {
        match self.kind {
            NoiseKind::White => self.variance,
            NoiseKind::ColoredAr1 { coeff } => self.variance / (1.0 - coeff * coeff),
        }
    }
}

/// Identifies one deterministic random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeededStream {
    pub seed: u64,
    pub stream_index: u64,
}

impl SeededStream {
    pub fn new(seed: u64, stream_index: u64) -> Self {
        SeededStream { seed, stream_index }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_index);
        rng
    }

    /// Two disjoint child streams (`2i` and `2i + 1`).
    ///
    /// Used to feed independent noise sources of one simulated trajectory.
    pub fn split(&self) -> Result<(SeededStream, SeededStream)> {
        let base = self.stream_index.checked_mul(2).ok_or_else(|| {
            Error::InvalidSpec(format!(
                "stream index {} too large to split",
                self.stream_index
            ))
        })?;
        Ok((
            SeededStream::new(self.seed, base),
            SeededStream::new(self.seed, base + 1),
        ))
    }
}

/// Incremental sampler for one noise source.
///
/// The colored filter starts from its stationary distribution: the first
/// emitted sample is `N(0, variance / (1 - a^2))`, so with `a = 0` the output
/// coincides draw-for-draw with white noise on the same stream.
#[derive(Debug, Clone)]
pub struct NoiseSource {
    spec: NoiseSpec,
    std_dev: f64,
    rng: ChaCha8Rng,
    prev: Option<f64>,
}

impl NoiseSource {
    pub fn new(spec: NoiseSpec, stream: SeededStream) -> Result<Self> {
        spec.validate()?;
        Ok(NoiseSource {
            spec,
            std_dev: spec.variance.sqrt(),
            rng: stream.rng(),
            prev: None,
        })
    }

    #[inline]
    fn standard(&mut self) -> f64 {
        StandardNormal.sample(&mut self.rng)
    }

    #[inline]
    pub fn next_sample(&mut self) -> f64 {
        match self.spec.kind {
            NoiseKind::White => self.spec.mean + self.std_dev * self.standard(),
            NoiseKind::ColoredAr1 { coeff } => {
                let z = self.standard();
                let q = match self.prev {
                    Some(prev) => coeff * prev + self.std_dev * z,
                    None => self.spec.stationary_variance().sqrt() * z,
                };
                self.prev = Some(q);
                q
            }
        }
    }
}

/// `n` i.i.d. Gaussian draws with the spec's mean and variance.
pub fn sample_white(spec: &NoiseSpec, n: usize, stream: SeededStream) -> Result<Vec<f64>> {
    if !spec.is_white() {
        return Err(Error::InvalidSpec(
            "sample_white requires a white noise spec".into(),
        ));
    }
    if n == 0 {
        return Err(Error::InsufficientLength { needed: 1, got: 0 });
    }
    let mut source = NoiseSource::new(*spec, stream)?;
    Ok((0..n).map(|_| source.next_sample()).collect())
}

/// `n` samples of the colored sequence after discarding `burn_in` samples.
pub fn sample_colored(
    spec: &NoiseSpec,
    n: usize,
    stream: SeededStream,
    burn_in: usize,
) -> Result<Vec<f64>> {
    if spec.is_white() {
        return Err(Error::InvalidSpec(
            "sample_colored requires a colored noise spec".into(),
        ));
    }
    let mut source = NoiseSource::new(*spec, stream)?;
    for _ in 0..burn_in {
        source.next_sample();
    }
    Ok((0..n).map(|_| source.next_sample()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mean_var(xs: &[f64]) -> (f64, f64) {
        let n = xs.len() as f64;
        let m = xs.iter().sum::<f64>() / n;
        let v = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / n;
        (m, v)
    }

    fn autocov(xs: &[f64], lag: usize) -> f64 {
        let (m, _) = mean_var(xs);
        let n = xs.len();
        (lag..n)
            .map(|t| (xs[t] - m) * (xs[t - lag] - m))
            .sum::<f64>()
            / n as f64
    }

    #[test]
    fn zero_variance_is_constant() {
        let s = SeededStream::new(1, 0);
        assert_eq!(
            sample_white(&NoiseSpec::white(0.0, 0.0), 5, s).unwrap(),
            vec![0.0; 5]
        );
        assert_eq!(
            sample_white(&NoiseSpec::white(4.0, 0.0), 3, s).unwrap(),
            vec![4.0; 3]
        );
    }

    #[test]
    fn negative_variance_rejected() {
        let err = sample_white(&NoiseSpec::white(0.0, -1.0), 3, SeededStream::new(0, 0));
        assert!(matches!(err, Err(Error::InvalidSpec(_))));
    }

    #[test]
    fn unit_root_filter_rejected() {
        for coeff in [1.0, -1.0, 1.5] {
            let err = sample_colored(
                &NoiseSpec::colored(coeff, 1.0),
                3,
                SeededStream::new(0, 0),
                0,
            );
            assert!(matches!(err, Err(Error::NonstationaryFilter { .. })));
        }
    }

    #[test]
    fn colored_with_mean_rejected() {
        let spec = NoiseSpec {
            mean: 1.0,
            variance: 1.0,
            kind: NoiseKind::ColoredAr1 { coeff: 0.5 },
        };
        assert!(matches!(spec.validate(), Err(Error::InvalidSpec(_))));
    }

    #[test]
    fn zero_coeff_matches_white() {
        let s = SeededStream::new(99, 3);
        let white = sample_white(&NoiseSpec::white(0.0, 1.0), 1000, s).unwrap();
        let colored = sample_colored(&NoiseSpec::colored(0.0, 1.0), 1000, s, 0).unwrap();
        assert_eq!(white, colored);
    }

    #[test]
    fn reproducible_and_distinct_streams() {
        let spec = NoiseSpec::white(0.0, 2.0);
        let a = sample_white(&spec, 100, SeededStream::new(7, 0)).unwrap();
        let b = sample_white(&spec, 100, SeededStream::new(7, 0)).unwrap();
        let c = sample_white(&spec, 100, SeededStream::new(7, 1)).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().zip(&c).all(|(x, y)| x != y));
    }

    #[test]
    fn white_law_of_large_numbers() {
        let xs = sample_white(
            &NoiseSpec::white(0.0, 9.0),
            1_000_000,
            SeededStream::new(2024, 0),
        )
        .unwrap();
        let (m, v) = mean_var(&xs);
        assert!(m.abs() < 0.02, "mean {m}");
        assert!((v - 9.0).abs() < 0.1, "var {v}");
    }

    #[test]
    fn white_is_uncorrelated() {
        let n = 1_000_000;
        let xs = sample_white(&NoiseSpec::white(0.0, 9.0), n, SeededStream::new(11, 0)).unwrap();
        let band = 4.0 / (n as f64).sqrt() * 9.0;
        for lag in 1..=10 {
            let c = autocov(&xs, lag);
            assert!(c.abs() < band, "lag {lag}: {c} vs band {band}");
        }
    }

    #[test]
    fn colored_second_moments() {
        let spec = NoiseSpec::colored(-0.5, 1.0);
        let xs = sample_colored(&spec, 1_000_000, SeededStream::new(5, 0), 0).unwrap();
        let (_, v) = mean_var(&xs);
        assert!((v - 4.0 / 3.0).abs() < 0.01, "var {v}");
        let c1 = autocov(&xs, 1);
        assert!((c1 + 2.0 / 3.0).abs() < 0.01, "lag1 {c1}");
    }

    #[test]
    fn colored_starts_stationary() {
        let spec = NoiseSpec::colored(-0.5, 1.0);
        let target = spec.stationary_variance();
        let avg = (0..100)
            .map(|i| {
                let xs = sample_colored(&spec, 1000, SeededStream::new(17, i), 0).unwrap();
                xs.iter().map(|x| x * x).sum::<f64>() / xs.len() as f64
            })
            .sum::<f64>()
            / 100.0;
        assert!((avg - target).abs() < 0.05 * target, "{avg} vs {target}");
    }

    #[test]
    fn burn_in_skips_prefix() {
        let spec = NoiseSpec::colored(0.7, 1.0);
        let s = SeededStream::new(3, 0);
        let full = sample_colored(&spec, 20, s, 0).unwrap();
        let tail = sample_colored(&spec, 15, s, 5).unwrap();
        assert_eq!(&full[5..], &tail[..]);
    }
}
