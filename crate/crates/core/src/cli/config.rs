//! JSON run configuration.
//!
//! ```json
//! {
//!   "profile": { "breakpoints": [-2, -1, 0], "vorticities": [1, -2] },
//!   "gravity": 9.81,
//!   "surface_tension": 0.07,
//!   "solver": { "steps_per_layer": 2000, "root_tolerance": 1e-10 },
//!   "output_dir": "out"
//! }
//! ```
//!
//! `solver` and `output_dir` are optional. Unknown keys are rejected.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use sha2::{Digest, Sha256};

use crate::error::Error;
use crate::model::{PhysicalConstants, VorticityProfile};
use crate::sturm::SolverConfig;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProfile {
    breakpoints: Vec<f64>,
    vorticities: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    profile: RawProfile,
    gravity: f64,
    surface_tension: f64,
    #[serde(default)]
    solver: SolverConfig,
    output_dir: Option<PathBuf>,
}

/// A validated configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub profile: VorticityProfile,
    pub constants: PhysicalConstants,
    pub solver: SolverConfig,
    pub output_dir: PathBuf,
    /// First 16 hex digits of the SHA-256 of the config file bytes.
    pub hash: String,
}

/// Why a configuration was rejected, with a position or field path.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub source: String,
    pub location: Location,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Location {
    None,
    Line { line: usize, column: usize },
    Field(String),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.location {
            Location::None => write!(f, "{}: {}", self.source, self.message),
            Location::Line { line, column } => {
                write!(f, "{}:{line}:{column}: {}", self.source, self.message)
            }
            Location::Field(field) => write!(f, "{}: field {field}: {}", self.source, self.message),
        }
    }
}

pub fn config_hash(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let source = path.display().to_string();
        let bytes = std::fs::read(path).map_err(|e| ConfigError {
            source: source.clone(),
            location: Location::None,
            message: format!("cannot read: {e}"),
        })?;
        Self::parse(&bytes, &source)
    }

    /// Parses and validates `bytes`; `source` names the input in diagnostics.
    pub fn parse(bytes: &[u8], source: &str) -> Result<Self, ConfigError> {
        let err = |location, message: String| ConfigError {
            source: source.to_string(),
            location,
            message,
        };
        let raw: RawConfig = serde_json::from_slice(bytes).map_err(|e| {
            let mut message = e.to_string();
            // serde_json appends " at line L column C"; we report it as a prefix
            if let Some(i) = message.find(" at line ") {
                message.truncate(i);
            }
            err(
                Location::Line {
                    line: e.line(),
                    column: e.column(),
                },
                message,
            )
        })?;
        let profile = VorticityProfile::new(raw.profile.breakpoints, raw.profile.vorticities)
            .map_err(|e| match e {
                Error::InvalidProfile { index, reason } => {
                    let list = if reason.contains("vorticit") {
                        "vorticities"
                    } else {
                        "breakpoints"
                    };
                    err(Location::Field(format!("profile.{list}[{index}]")), reason)
                }
                other => err(Location::Field("profile".into()), other.to_string()),
            })?;
        let constants =
            PhysicalConstants::new(raw.gravity, raw.surface_tension).map_err(|e| match e {
                Error::InvalidParameter { name, reason } => err(Location::Field(name.into()), reason),
                other => err(Location::None, other.to_string()),
            })?;
        raw.solver.validate().map_err(|e| match e {
            Error::InvalidParameter { name, reason } => {
                err(Location::Field(format!("solver.{name}")), reason)
            }
            other => err(Location::Field("solver".into()), other.to_string()),
        })?;
        Ok(RunConfig {
            profile,
            constants,
            solver: raw.solver,
            output_dir: raw.output_dir.unwrap_or_else(|| PathBuf::from("out")),
            hash: config_hash(bytes),
        })
    }
}
