//! Strict JSON experiment configuration.
//!
//! One format, one schema: unknown keys are rejected, the seed is
//! mandatory (no entropy defaulting), and every omitted optional field is
//! filled with its documented default. Command-line flags override the
//! corresponding config fields after parsing.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use secperc_core::graph::{Fading, ModelKind, ModelParams};
use secperc_core::Error;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    model: Option<ModelKind>,
    alpha: Option<f64>,
    power: Option<f64>,
    gamma: Option<f64>,
    fading: Option<RawFading>,
    lambda: Option<f64>,
    lambda_e: Option<f64>,
    geometry: Option<RawGeometry>,
    trials: Option<u64>,
    seed: Option<u64>,
    workers: Option<usize>,
    tolerances: Option<RawTolerances>,
    output_dir: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFading {
    #[serde(rename = "type")]
    kind: String,
    kappa: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGeometry {
    r: Option<f64>,
    m: Option<u32>,
    #[serde(rename = "L")]
    l: Option<f64>,
    margin: Option<f64>,
    n1: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTolerances {
    truncation_tol: Option<f64>,
    g_cap: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Geometry {
    pub r: Option<f64>,
    pub m: u32,
    #[serde(rename = "L")]
    pub l: Option<f64>,
    pub margin: Option<f64>,
    pub n1: Option<f64>,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Tolerances {
    pub truncation_tol: f64,
    pub g_cap: f64,
}

/// Fully resolved configuration: defaults applied, preconditions checked.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentConfig {
    pub model: ModelKind,
    pub alpha: f64,
    pub power: f64,
    pub gamma: f64,
    pub fading: Fading,
    pub lambda: Option<f64>,
    pub lambda_e: Option<f64>,
    pub geometry: Geometry,
    pub trials: u64,
    pub seed: u64,
    pub workers: usize,
    pub tolerances: Tolerances,
    pub output_dir: PathBuf,
}

/// Flag overrides collected from the command line.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub trials: Option<u64>,
    pub workers: Option<usize>,
    pub output_dir: Option<PathBuf>,
}

pub const DEFAULT_KAPPA: f64 = 16.0;

fn validation(msg: String) -> Error {
    Error::Parameter(msg)
}

impl ExperimentConfig {
    /// Parse a config document (strict mode) and apply flag overrides.
    /// `source` may be absent, in which case every field falls back to
    /// its default and the seed must come from the flags.
    pub fn resolve(source: Option<&str>, overrides: &Overrides) -> Result<Self, Error> {
        let raw: RawConfig = match source {
            Some(text) => serde_json::from_str(text)
                .map_err(|e| validation(format!("config: {e}")))?,
            None => RawConfig {
                model: None,
                alpha: None,
                power: None,
                gamma: None,
                fading: None,
                lambda: None,
                lambda_e: None,
                geometry: None,
                trials: None,
                seed: None,
                workers: None,
                tolerances: None,
                output_dir: None,
            },
        };
        if source.is_some() && raw.model.is_none() {
            return Err(validation("model: required in a config document".to_string()));
        }
        let model = raw.model.unwrap_or(ModelKind::PathLoss);
        let alpha = raw.alpha.unwrap_or(4.0);
        if !(alpha > 2.0) || !alpha.is_finite() {
            return Err(validation(format!("alpha: must exceed 2, got {alpha}")));
        }
        let power = raw.power.unwrap_or(1.0);
        if !(power > 0.0) {
            return Err(validation(format!("power: must be positive, got {power}")));
        }
        let gamma = raw.gamma.unwrap_or(0.0);
        if !(gamma >= 0.0) {
            return Err(validation(format!("gamma: must be nonnegative, got {gamma}")));
        }
        let fading = match (&raw.fading, model) {
            (None, ModelKind::PathLoss) => Fading::None,
            (None, ModelKind::Fading) => Fading::UnitExp,
            (Some(f), _) => {
                let parsed = match f.kind.as_str() {
                    "none" => Fading::None,
                    "unit-exp" => Fading::UnitExp,
                    "bounded-exp" => {
                        let kappa = f.kappa.unwrap_or(DEFAULT_KAPPA);
                        if !(kappa > 0.0) {
                            return Err(validation(format!(
                                "fading.kappa: must be positive, got {kappa}"
                            )));
                        }
                        Fading::BoundedExp { kappa }
                    }
                    other => {
                        return Err(validation(format!(
                            "fading.type: unknown variant {other:?} (expected none, unit-exp or bounded-exp)"
                        )))
                    }
                };
                if f.kappa.is_some() && f.kind != "bounded-exp" {
                    return Err(validation(
                        "fading.kappa: only meaningful for type bounded-exp".to_string(),
                    ));
                }
                match (model, parsed) {
                    (ModelKind::PathLoss, Fading::None) => parsed,
                    (ModelKind::PathLoss, _) => {
                        return Err(validation(
                            "fading: model pathloss requires fading type none".to_string(),
                        ))
                    }
                    (ModelKind::Fading, Fading::None) => {
                        return Err(validation(
                            "fading: model fading requires unit-exp or bounded-exp".to_string(),
                        ))
                    }
                    (ModelKind::Fading, _) => parsed,
                }
            }
        };
        for (name, v) in [("lambda", raw.lambda), ("lambda_e", raw.lambda_e)] {
            if let Some(v) = v {
                if !(v >= 0.0) || !v.is_finite() {
                    return Err(validation(format!("{name}: must be nonnegative, got {v}")));
                }
            }
        }
        let geo = raw.geometry.unwrap_or(RawGeometry {
            r: None,
            m: None,
            l: None,
            margin: None,
            n1: None,
        });
        if let Some(r) = geo.r {
            if !(r > 0.0) {
                return Err(validation(format!("geometry.r: must be positive, got {r}")));
            }
        }
        let m = geo.m.unwrap_or(10);
        if !(1..=100).contains(&m) {
            return Err(validation(format!("geometry.m: must lie in 1..=100, got {m}")));
        }
        if let Some(l) = geo.l {
            if !(l > 0.0) {
                return Err(validation(format!("geometry.L: must be positive, got {l}")));
            }
        }
        let margin = match (geo.margin, geo.l) {
            (Some(mg), Some(l)) => {
                if !(mg > 0.0 && mg < l / 4.0) {
                    return Err(validation(format!(
                        "geometry.margin: must lie in (0, L/4), got {mg} for L = {l}"
                    )));
                }
                Some(mg)
            }
            (Some(mg), None) => {
                if !(mg > 0.0) {
                    return Err(validation(format!(
                        "geometry.margin: must be positive, got {mg}"
                    )));
                }
                Some(mg)
            }
            (None, Some(l)) => Some(l / 10.0),
            (None, None) => None,
        };
        if let Some(n1) = geo.n1 {
            if !(n1 >= 0.0) {
                return Err(validation(format!("geometry.n1: must be nonnegative, got {n1}")));
            }
        }
        let trials = overrides.trials.or(raw.trials).unwrap_or(10_000);
        if trials == 0 {
            return Err(validation("trials: must be at least 1".to_string()));
        }
        let seed = overrides
            .seed
            .or(raw.seed)
            .ok_or_else(|| validation("seed: required (no entropy defaulting)".to_string()))?;
        let workers = overrides
            .workers
            .or(raw.workers)
            .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1));
        if workers == 0 {
            return Err(validation("workers: must be at least 1".to_string()));
        }
        let tol = raw.tolerances.unwrap_or(RawTolerances { truncation_tol: None, g_cap: None });
        let truncation_tol = tol.truncation_tol.unwrap_or(1e-4);
        if !(truncation_tol > 0.0 && truncation_tol < 1.0) {
            return Err(validation(format!(
                "tolerances.truncation_tol: must lie in (0, 1), got {truncation_tol}"
            )));
        }
        let g_cap = tol.g_cap.unwrap_or(40.0);
        if !(g_cap > 0.0) {
            return Err(validation(format!(
                "tolerances.g_cap: must be positive, got {g_cap}"
            )));
        }
        let output_dir = overrides
            .output_dir
            .clone()
            .or(raw.output_dir)
            .unwrap_or_else(|| PathBuf::from("runs"));
        Ok(ExperimentConfig {
            model,
            alpha,
            power,
            gamma,
            fading,
            lambda: raw.lambda,
            lambda_e: raw.lambda_e,
            geometry: Geometry { r: geo.r, m, l: geo.l, margin, n1: geo.n1 },
            trials,
            seed,
            workers,
            tolerances: Tolerances { truncation_tol, g_cap },
            output_dir,
        })
    }

    pub fn resolve_from_path(
        path: Option<&Path>,
        overrides: &Overrides,
    ) -> Result<Self, crate::CliError> {
        let text = match path {
            Some(p) => Some(std::fs::read_to_string(p).map_err(|e| {
                crate::CliError::Io(format!("cannot read config {}: {e}", p.display()))
            })?),
            None => None,
        };
        Ok(Self::resolve(text.as_deref(), overrides)?)
    }

    /// Propagation parameters for the configured model.
    pub fn model_params(&self) -> Result<ModelParams, Error> {
        ModelParams::new(self.alpha, self.power, self.gamma, self.fading)
    }

    pub fn require_lambda(&self) -> Result<f64, Error> {
        self.lambda
            .ok_or_else(|| validation("lambda: required for this subcommand".to_string()))
    }

    pub fn require_lambda_e(&self) -> Result<f64, Error> {
        self.lambda_e
            .ok_or_else(|| validation("lambda_e: required for this subcommand".to_string()))
    }

    pub fn require_l(&self) -> Result<f64, Error> {
        self.geometry
            .l
            .ok_or_else(|| validation("geometry.L: required for this subcommand".to_string()))
    }

    pub fn require_n1(&self) -> Result<f64, Error> {
        self.geometry
            .n1
            .ok_or_else(|| validation("geometry.n1: required for this subcommand".to_string()))
    }

    /// Bounded-fading cap: the configured kappa, or the default when the
    /// model carries no bound.
    pub fn kappa(&self) -> f64 {
        match self.fading {
            Fading::BoundedExp { kappa } => kappa,
            _ => DEFAULT_KAPPA,
        }
    }
}
