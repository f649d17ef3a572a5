//! JSON experiment configuration: schema, validation, defaults.
//!
//! The schema is versioned and strict: unknown keys are rejected, invariant
//! violations name the offending field. `resolved()` returns the config with
//! every default filled in, which is what gets embedded in `metrics.json`
//! and what round-trips through `canonical_json`.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagnostics::Box2;
use crate::error::{ModelError, PotentialError};
use crate::point::Point;
use crate::potentials::{DcPotential, QuadraticF, SmoothTerm};
use crate::regularizers::{DcRegularizer, RegKind};
use crate::samplers::SamplerKind;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("config does not match the schema: {0}")]
    Schema(#[from] serde_json::Error),
    #[error("invalid field `{field}`: {message}")]
    Invalid { field: &'static str, message: String },
    #[error(transparent)]
    Potential(#[from] PotentialError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

fn invalid(field: &'static str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { field, message: message.into() }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub seed: u64,
    pub gamma: f64,
    pub lambda: f64,
    pub n_chains: usize,
    pub n_steps: usize,
    pub samplers: Vec<SamplerKind>,
    pub potential: PotentialSpec,
    /// Initial point; defaults to the origin.
    #[serde(default)]
    pub init: Option<Vec<f64>>,
    #[serde(default)]
    pub mode: ModeSpec,
    #[serde(default)]
    pub histogram: HistogramSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialSpec {
    pub f: QuadraticSpec,
    pub regularizer: RegularizerSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadraticSpec {
    pub mean: Vec<f64>,
    pub precision: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegularizerSpec {
    pub kind: String,
    pub scale: f64,
    #[serde(default, skip_serializing_if = "RegParams::is_empty")]
    pub params: RegParams,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub holder_m: Option<f64>,
}

impl RegParams {
    pub fn is_empty(&self) -> bool {
        self == &Self::default()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModeSpec {
    MultiChainLast,
    SingleChainBurnIn { burn_in: usize },
}

impl Default for ModeSpec {
    fn default() -> Self {
        ModeSpec::MultiChainLast
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HistogramSpec {
    /// Evaluation box; defaults to `mean +- max(6/sqrt(eig_min), R + 2)`
    /// per axis, which covers the dissipativity radius.
    #[serde(default, rename = "box", skip_serializing_if = "Option::is_none")]
    pub bounds: Option<Box2>,
    #[serde(default = "default_bins")]
    pub bins: usize,
    #[serde(default = "default_bin_sweep")]
    pub bin_sweep: Vec<usize>,
    #[serde(default = "default_quad_order")]
    pub quad_order: usize,
    #[serde(default = "default_quad_tol")]
    pub quad_tol: f64,
}

fn default_bins() -> usize {
    40
}
fn default_bin_sweep() -> Vec<usize> {
    vec![20, 30, 40, 60]
}
fn default_quad_order() -> usize {
    8
}
fn default_quad_tol() -> f64 {
    1e-6
}

impl Default for HistogramSpec {
    fn default() -> Self {
        Self {
            bounds: None,
            bins: default_bins(),
            bin_sweep: default_bin_sweep(),
            quad_order: default_quad_order(),
            quad_tol: default_quad_tol(),
        }
    }
}

impl RegularizerSpec {
    pub fn build(&self) -> Result<DcRegularizer, ConfigError> {
        let p = &self.params;
        let need = |field: &'static str, v: Option<f64>| {
            v.ok_or_else(|| invalid(field, format!("required by regularizer kind `{}`", self.kind)))
        };
        let kind = match self.kind.as_str() {
            "l1_minus_l2" => RegKind::L1MinusL2,
            "l1_minus_sigma_q" => RegKind::L1MinusSigmaQ {
                q: p.q.ok_or_else(|| {
                    invalid("regularizer.params.q", "required by kind `l1_minus_sigma_q`")
                })?,
            },
            "capped_l1" => RegKind::CappedL1 { theta: need("regularizer.params.theta", p.theta)? },
            "pil" => RegKind::PiL {
                theta: need("regularizer.params.theta", p.theta)?,
                a: need("regularizer.params.a", p.a)?,
            },
            "l1_minus_l2_pow_p" => RegKind::L1MinusL2PowP {
                p: need("regularizer.params.p", p.p)?,
                holder_m: p.holder_m,
            },
            "zero" => RegKind::Zero,
            other => {
                return Err(invalid(
                    "regularizer.kind",
                    format!("unknown kind `{other}` (custom regularizers are API-only)"),
                ))
            }
        };
        DcRegularizer::new(kind, self.scale)
            .map_err(|e| invalid("regularizer.scale", e.to_string()))
    }
}

/// Config with all defaults resolved plus the assembled potential.
#[derive(Debug)]
pub struct ResolvedExperiment {
    pub config: ExperimentConfig,
    pub potential: DcPotential,
    pub init: Point,
    pub bounds: Box2,
}

impl ExperimentConfig {
    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(invalid(
                "schema_version",
                format!("expected {SCHEMA_VERSION}, got {}", self.schema_version),
            ));
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(invalid("gamma", format!("must be positive, got {}", self.gamma)));
        }
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(invalid("lambda", format!("must be positive, got {}", self.lambda)));
        }
        if self.n_chains == 0 {
            return Err(invalid("n_chains", "must be at least 1"));
        }
        if self.n_steps == 0 {
            return Err(invalid("n_steps", "must be at least 1"));
        }
        if self.samplers.is_empty() {
            return Err(invalid("samplers", "need at least one sampler"));
        }
        if self.histogram.bins < 2 {
            return Err(invalid("histogram.bins", "need at least 2 bins per axis"));
        }
        if self.histogram.bin_sweep.iter().any(|&b| b < 2) {
            return Err(invalid("histogram.bin_sweep", "every resolution needs at least 2 bins"));
        }
        if self.histogram.quad_order < 2 {
            return Err(invalid("histogram.quad_order", "need at least order 2"));
        }
        if !(self.histogram.quad_tol > 0.0) {
            return Err(invalid("histogram.quad_tol", "must be positive"));
        }
        if let ModeSpec::SingleChainBurnIn { burn_in } = self.mode {
            if burn_in >= self.n_steps {
                return Err(invalid("mode.burn_in", "burn-in must be below n_steps"));
            }
        }
        let d = self.potential.f.mean.len();
        if let Some(init) = &self.init {
            if init.len() != d {
                return Err(invalid("init", format!("expected {d} coordinates, got {}", init.len())));
            }
        }
        Ok(())
    }

    /// Assembles the potential and fills every default.
    pub fn resolve(&self) -> Result<ResolvedExperiment, ConfigError> {
        self.validate()?;
        let mean = Point::new(self.potential.f.mean.clone())
            .map_err(|e| invalid("potential.f.mean", e.to_string()))?;
        let d = mean.dim();
        let quadratic = QuadraticF::new(mean.clone(), self.potential.f.precision.clone())?;
        let reg = self.potential.regularizer.build()?;
        let potential = DcPotential::new(SmoothTerm::Quadratic(quadratic), reg, d)?;

        let init = match &self.init {
            Some(v) => Point::new(v.clone()).map_err(|e| invalid("init", e.to_string()))?,
            None => Point::zeros(d),
        };

        let bounds = match self.histogram.bounds {
            Some(b) => {
                if !(b.x.1 > b.x.0 && b.y.1 > b.y.0) {
                    return Err(invalid("histogram.box", "box must have positive extent"));
                }
                b
            }
            None => {
                if d != 2 {
                    return Err(invalid(
                        "histogram.box",
                        "default box derivation needs a 2-dimensional potential",
                    ));
                }
                let constants = potential.dissipativity_constants()?;
                let eig_min = match &potential.f {
                    SmoothTerm::Quadratic(q) => q.mu_f(),
                    _ => unreachable!("config potentials are quadratic"),
                };
                let half = (6.0 / eig_min.sqrt()).max(constants.radius + 2.0);
                Box2 {
                    x: (mean[0] - half, mean[0] + half),
                    y: (mean[1] - half, mean[1] + half),
                }
            }
        };

        let mut config = self.clone();
        config.init = Some(init.as_slice().to_vec());
        config.histogram.bounds = Some(bounds);
        Ok(ResolvedExperiment { config, potential, init, bounds })
    }

    /// Canonical JSON of the resolved config; reparsing it yields an equal
    /// config.
    pub fn canonical_json(&self) -> Result<String, ConfigError> {
        let resolved = self.resolve()?.config;
        Ok(serde_json::to_string_pretty(&resolved).expect("config serializes"))
    }
}
