//! Run configuration, loaded from JSON with unknown keys rejected.

use hill_core::collision::CollisionSettings;
use hill_core::equilibria::DegreeMode;
use hill_core::model::{Alignment, PotentialVariant};
use hill_core::{ExtendedState, ModelParams, ToleranceSettings};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("{path}: cannot read config: {reason}")]
    Io { path: String, reason: String },
    #[error("config line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("config field `{field}`: {reason}")]
    Invalid { field: String, reason: String },
}

fn invalid(field: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        field: field.to_string(),
        reason: reason.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct EquilibriaConfig {
    pub variant: PotentialVariant,
    pub degree_mode: DegreeMode,
    pub alignment: Alignment,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Pretty,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub path: PathBuf,
    pub format: OutputFormat,
    /// Write the first collision arc as CSV next to the collide envelope.
    pub trajectory_csv: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            path: PathBuf::from("hill-out"),
            format: OutputFormat::Json,
            trajectory_csv: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulateConfig {
    /// Ejection angle used when `initial` is absent.
    pub alpha: f64,
    /// Momentum magnitude of the ejection; the level-set value when absent.
    pub p0: Option<f64>,
    pub initial: Option<ExtendedState>,
    /// Span in units of `T₀`.
    pub periods: f64,
    /// Uniform output samples; `0` writes the accepted integrator steps.
    pub samples: usize,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        Self {
            alpha: 0.0,
            p0: None,
            initial: None,
            periods: 1.0,
            samples: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub model: ModelParams,
    #[serde(default)]
    pub integrator: ToleranceSettings,
    #[serde(default)]
    pub collision: CollisionSettings,
    #[serde(default)]
    pub equilibria: EquilibriaConfig,
    #[serde(default)]
    pub simulate: SimulateConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            model: ModelParams::default(),
            integrator: ToleranceSettings::default(),
            collision: CollisionSettings::default(),
            equilibria: EquilibriaConfig::default(),
            simulate: SimulateConfig::default(),
            output: OutputConfig::default(),
        }
    }
}

fn positive(field: &str, x: f64) -> Result<(), ConfigError> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(invalid(field, format!("must be finite and > 0, got {x}")))
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| ConfigError::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
            path: path.display().to_string(),
            reason: e.to_string(),
        })?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.model.validate().map_err(|e| match e {
            hill_core::model::ModelError::InvalidParameter { field, reason } => {
                invalid(&format!("model.{field}"), reason)
            }
            other => invalid("model", other.to_string()),
        })?;
        let i = &self.integrator;
        positive("integrator.rel_tol", i.rel_tol)?;
        positive("integrator.abs_tol", i.abs_tol)?;
        positive("integrator.max_step_fraction", i.max_step_fraction)?;
        if i.max_step_fraction > 1.0 {
            return Err(invalid("integrator.max_step_fraction", "must be <= 1"));
        }
        let c = &self.collision;
        if !(c.delta > 0.0 && c.delta < std::f64::consts::FRAC_PI_2) {
            return Err(invalid("collision.delta", "must lie in (0, pi/2)"));
        }
        if c.grid < 8 {
            return Err(invalid("collision.grid", "must be >= 8"));
        }
        positive("collision.bisect_tol", c.bisect_tol)?;
        positive("collision.origin_tol_factor", c.origin_tol_factor)?;
        if c.n_passages < 1 {
            return Err(invalid("collision.n_passages", "must be >= 1"));
        }
        if !c.target_alpha.is_finite() {
            return Err(invalid("collision.target_alpha", "must be finite"));
        }
        let s = &self.simulate;
        positive("simulate.periods", s.periods)?;
        if !s.alpha.is_finite() {
            return Err(invalid("simulate.alpha", "must be finite"));
        }
        if let Some(p0) = s.p0 {
            positive("simulate.p0", p0)?;
        }
        if let Some(st) = &s.initial {
            if !st.to_array().iter().all(|x| x.is_finite()) {
                return Err(invalid("simulate.initial", "all components must be finite"));
            }
        }
        if s.samples == 1 {
            return Err(invalid("simulate.samples", "must be 0 or >= 2"));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}
