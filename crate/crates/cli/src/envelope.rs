//! JSON result envelope shared by every subcommand.

use crate::checks::CheckOutcome;
use crate::config::{OutputFormat, RunConfig};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};
use std::path::Path;
use thiserror::Error;

pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum EnvelopeError {
    #[error("envelope json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("payload digest mismatch: recorded {recorded}, computed {computed}")]
    Digest { recorded: String, computed: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResultEnvelope {
    pub command: String,
    pub version: String,
    pub wall_time_s: f64,
    pub config: RunConfig,
    pub payload: Value,
    /// SHA-256 of the compact serialization of `payload`.
    pub payload_sha256: String,
    pub checks: Vec<CheckOutcome>,
    pub exit_code: i32,
}

/// Hex SHA-256 of the compact JSON form of `payload`. Object keys are sorted,
/// so the digest does not depend on construction order.
pub fn payload_digest(payload: &Value) -> String {
    let text = serde_json::to_string(payload).expect("json value serializes");
    hex::encode(Sha256::digest(text.as_bytes()))
}

impl ResultEnvelope {
    pub fn new(
        command: &str,
        config: &RunConfig,
        payload: Value,
        checks: Vec<CheckOutcome>,
        exit_code: i32,
        wall_time_s: f64,
    ) -> Self {
        Self {
            command: command.to_string(),
            version: ARTIFACT_VERSION.to_string(),
            wall_time_s,
            config: config.clone(),
            payload_sha256: payload_digest(&payload),
            payload,
            checks,
            exit_code,
        }
    }

    pub fn to_json(&self, format: OutputFormat) -> String {
        let out = match format {
            OutputFormat::Json => serde_json::to_string(self),
            OutputFormat::Pretty => serde_json::to_string_pretty(self),
        };
        out.expect("envelope serializes")
    }

    /// Parses an envelope and checks the recorded payload digest.
    pub fn from_json(text: &str) -> Result<Self, EnvelopeError> {
        let env: ResultEnvelope = serde_json::from_str(text)?;
        let computed = payload_digest(&env.payload);
        if computed != env.payload_sha256 {
            return Err(EnvelopeError::Digest {
                recorded: env.payload_sha256,
                computed,
            });
        }
        Ok(env)
    }

    pub fn write(&self, path: &Path, format: OutputFormat) -> Result<(), EnvelopeError> {
        let mut text = self.to_json(format);
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self, EnvelopeError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}
