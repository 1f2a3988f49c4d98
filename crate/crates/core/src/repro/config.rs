//! Scenario configuration files.
//!
//! Flat `key = value` text with `[scenario.<name>]` section headers. Lines
//! starting with `#` are comments. Example:
//!
//! ```text
//! [scenario.white-ar1]
//! mode = batch
//! lambda = 0.3333333333333333
//! q.variance = 4
//! v.variance = 9
//! n = 1000
//! kappa = 100
//! order = 1
//! seed = 7
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::ar::ArOrder;
use crate::error::{Error, Result};
use crate::noise::{NoiseKind, NoiseSpec};
use crate::system::{SystemParams, DEFAULT_BURN_IN};

/// The bundled suite reproducing every reported experiment.
pub const BUNDLED_CONFIG: &str = include_str!("../../configs/paper.cfg");

/// Recognized keys, in the order they are documented.
pub const KEYS: &[&str] = &[
    "mode",
    "lambda",
    "q.mean",
    "q.variance",
    "q.kind",
    "v.mean",
    "v.variance",
    "v.kind",
    "n",
    "alpha",
    "kappa",
    "order",
    "seed",
    "burn_in",
    "tolerance",
    "variance_min",
    "variance_max",
    "variance_below",
    "reference_variance",
    "reported_value",
    "bias_reference",
    "bias_min",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunMode {
    /// Closed-form quantities only.
    Theory,
    /// One seeded trajectory, one fit.
    Single,
    /// `kappa` independent trajectories.
    Batch,
}

/// Acceptance bands attached to a scenario. All optional.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Bands {
    /// Half-width for `|emp_mean - theta*|`; defaults to `3 sqrt(var / kappa)`.
    pub tolerance: Option<f64>,
    pub variance_min: Option<f64>,
    pub variance_max: Option<f64>,
    /// Every diagonal dispersion entry must be below the named scenario's.
    pub variance_below: Option<String>,
    /// Per-coefficient estimator variance for single-run 3-sigma bands.
    pub reference_variance: Option<Vec<f64>>,
    /// Externally reported single-run estimate, checked against the same band.
    pub reported_value: Option<Vec<f64>>,
    /// Scenario whose optimum this one must stay away from.
    pub bias_reference: Option<String>,
    pub bias_min: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub name: String,
    pub mode: RunMode,
    pub lambda: f64,
    pub q: NoiseSpec,
    pub v: NoiseSpec,
    pub n: usize,
    /// Sample-count multiplier; trajectories have `alpha * n` samples.
    pub alpha: usize,
    pub kappa: usize,
    pub order: ArOrder,
    pub seed: u64,
    pub burn_in: usize,
    pub bands: Bands,
}

impl ScenarioConfig {
    pub fn params(&self) -> Result<SystemParams> {
        SystemParams::new(self.lambda, self.q, self.v)
    }

    pub fn effective_n(&self) -> usize {
        self.alpha * self.n
    }

    /// Builds a scenario from raw `key = value` pairs.
    pub fn from_pairs(name: &str, pairs: &BTreeMap<String, String>) -> Result<Self> {
        let field = |key: &str| format!("scenario.{name}.{key}");
        for key in pairs.keys() {
            if !KEYS.contains(&key.as_str()) {
                return Err(Error::config(field(key), "unknown key"));
            }
        }
        let get = |key: &str| pairs.get(key).map(String::as_str);
        let real = |key: &str| -> Result<Option<f64>> {
            get(key)
                .map(|s| parse_real(s).map_err(|m| Error::config(field(key), m)))
                .transpose()
        };
        let required_real = |key: &str| -> Result<f64> {
            real(key)?.ok_or_else(|| Error::config(field(key), "missing required key"))
        };
        let count = |key: &str, default: u64| -> Result<u64> {
            get(key).map_or(Ok(default), |s| {
                s.parse::<u64>().map_err(|_| {
                    Error::config(
                        field(key),
                        format!("expected a non-negative integer, got `{s}`"),
                    )
                })
            })
        };
        let reals = |key: &str| -> Result<Option<Vec<f64>>> {
            get(key)
                .map(|s| {
                    s.split(',')
                        .map(|p| parse_real(p.trim()))
                        .collect::<std::result::Result<Vec<_>, _>>()
                        .map_err(|m| Error::config(field(key), m))
                })
                .transpose()
        };
        let noise = |prefix: &str| -> Result<NoiseSpec> {
            let kind_key = format!("{prefix}.kind");
            let kind = match get(&kind_key) {
                None => NoiseKind::White,
                Some(s) => parse_kind(s).map_err(|m| Error::config(field(&kind_key), m))?,
            };
            let spec = NoiseSpec {
                mean: real(&format!("{prefix}.mean"))?.unwrap_or(0.0),
                variance: required_real(&format!("{prefix}.variance"))?,
                kind,
            };
            spec.validate()
                .map_err(|e| Error::config(field(prefix), e.to_string()))?;
            Ok(spec)
        };

        let mode = match get("mode").unwrap_or("batch") {
            "theory" => RunMode::Theory,
            "single" => RunMode::Single,
            "batch" => RunMode::Batch,
            other => {
                return Err(Error::config(
                    field("mode"),
                    format!("expected theory|single|batch, got `{other}`"),
                ))
            }
        };
        let order = u8::try_from(count("order", 1)?)
            .map_err(|_| "AR order must be 1 or 2".to_string())
            .and_then(ArOrder::try_from)
            .map_err(|m| Error::config(field("order"), m))?;

        let cfg = ScenarioConfig {
            name: name.to_string(),
            mode,
            lambda: required_real("lambda")?,
            q: noise("q")?,
            v: noise("v")?,
            n: count("n", 1000)? as usize,
            alpha: count("alpha", 1)? as usize,
            kappa: count("kappa", 100)? as usize,
            order,
            seed: count("seed", 0)?,
            burn_in: count("burn_in", DEFAULT_BURN_IN as u64)? as usize,
            bands: Bands {
                tolerance: real("tolerance")?,
                variance_min: real("variance_min")?,
                variance_max: real("variance_max")?,
                variance_below: get("variance_below").map(str::to_string),
                reference_variance: reals("reference_variance")?,
                reported_value: reals("reported_value")?,
                bias_reference: get("bias_reference").map(str::to_string),
                bias_min: real("bias_min")?,
            },
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Field-level checks beyond parsing.
    pub fn validate(&self) -> Result<()> {
        let field = |key: &str| format!("scenario.{}.{key}", self.name);
        if !(self.lambda.abs() < 1.0) {
            return Err(Error::config(
                field("lambda"),
                format!(
                    "|lambda| must be < 1 for a stationary system, got {}",
                    self.lambda
                ),
            ));
        }
        if self.alpha < 1 {
            return Err(Error::config(field("alpha"), "alpha must be >= 1"));
        }
        if self.mode != RunMode::Theory && self.effective_n() < crate::system::MIN_LENGTH {
            return Err(Error::config(
                field("n"),
                format!("alpha * n must be >= {}", crate::system::MIN_LENGTH),
            ));
        }
        if self.mode == RunMode::Batch && self.kappa < 2 {
            return Err(Error::config(
                field("kappa"),
                format!("batch scenarios need kappa >= 2, got {}", self.kappa),
            ));
        }
        let lags = self.order.lags();
        for (key, v) in [
            ("reference_variance", &self.bands.reference_variance),
            ("reported_value", &self.bands.reported_value),
        ] {
            if let Some(v) = v {
                if v.len() != lags {
                    return Err(Error::config(
                        field(key),
                        format!("expected {lags} comma-separated values, got {}", v.len()),
                    ));
                }
            }
        }
        if let Some(rv) = &self.bands.reference_variance {
            if rv.iter().any(|v| !(*v >= 0.0)) {
                return Err(Error::config(
                    field("reference_variance"),
                    "variances must be >= 0",
                ));
            }
        }
        if self.mode == RunMode::Single && self.bands.reference_variance.is_none() {
            return Err(Error::config(
                field("reference_variance"),
                "single-run scenarios need a reference estimator variance for their 3-sigma band",
            ));
        }
        if let Some(t) = self.bands.tolerance {
            if !(t >= 0.0) {
                return Err(Error::config(field("tolerance"), "must be >= 0"));
            }
        }
        Ok(())
    }
}

fn parse_real(s: &str) -> std::result::Result<f64, String> {
    s.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| format!("expected a finite decimal number, got `{s}`"))
}

/// `white` or `colored:<coeff>`.
pub fn parse_kind(s: &str) -> std::result::Result<NoiseKind, String> {
    match s.split_once(':') {
        None if s == "white" => Ok(NoiseKind::White),
        Some(("colored", c)) => Ok(NoiseKind::ColoredAr1 {
            coeff: parse_real(c.trim())?,
        }),
        _ => Err(format!("expected `white` or `colored:<coeff>`, got `{s}`")),
    }
}

/// Splits the text into named sections of raw pairs, keeping file order.
pub fn parse_sections(text: &str) -> Result<Vec<(String, BTreeMap<String, String>)>> {
    let mut sections: Vec<(String, BTreeMap<String, String>)> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let at = || format!("line {}", lineno + 1);
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(header) = line.strip_prefix('[') {
            let name = header
                .strip_suffix(']')
                .and_then(|h| h.trim().strip_prefix("scenario."))
                .map(str::trim)
                .filter(|n| !n.is_empty())
                .ok_or_else(|| Error::config(at(), format!("bad section header `{line}`")))?;
            if sections.iter().any(|(n, _)| n == name) {
                return Err(Error::config(
                    format!("scenario.{name}"),
                    "duplicate scenario name",
                ));
            }
            sections.push((name.to_string(), BTreeMap::new()));
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::config(at(), format!("expected `key = value`, got `{line}`")))?;
        let (name, map) = sections
            .last_mut()
            .ok_or_else(|| Error::config(at(), "key outside of a [scenario.<name>] section"))?;
        let key = key.trim().to_string();
        if map.insert(key.clone(), value.trim().to_string()).is_some() {
            return Err(Error::config(
                format!("scenario.{name}.{key}"),
                "duplicate key",
            ));
        }
    }
    Ok(sections)
}

pub fn parse_config(text: &str) -> Result<Vec<ScenarioConfig>> {
    parse_sections(text)?
        .iter()
        .map(|(name, pairs)| ScenarioConfig::from_pairs(name, pairs))
        .collect()
}

pub fn load_config(path: &Path) -> Result<Vec<ScenarioConfig>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::config("--config", format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text)
}
