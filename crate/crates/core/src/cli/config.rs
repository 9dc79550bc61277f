//! JSON experiment configuration.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dynamics::GridSpec;
use crate::spectrum::{DistanceFunction, DistanceKind, EnergySpectrum, PopulationVector};
use crate::spin_chain::SpinChainConfig;

use super::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Evolve,
    Crossing,
    CheckMpemba,
    Certificate,
    GeneralF,
    Estimate,
    MaxAccel,
    Collinear,
    SpinChain,
    Preset,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Evolve => "evolve",
            Mode::Crossing => "crossing",
            Mode::CheckMpemba => "check-mpemba",
            Mode::Certificate => "certificate",
            Mode::GeneralF => "general-f",
            Mode::Estimate => "estimate",
            Mode::MaxAccel => "max-accel",
            Mode::Collinear => "collinear",
            Mode::SpinChain => "spin-chain",
            Mode::Preset => "preset",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Chain section of a config: the target coupling `gamma1` and the
/// pre-evolution coupling `gamma0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainSection {
    pub sites: usize,
    pub gamma0: f64,
    pub gamma1: f64,
    pub mu: f64,
    pub theta: f64,
    pub tau_pre: f64,
}

impl ChainSection {
    pub fn target(&self) -> SpinChainConfig {
        SpinChainConfig {
            sites: self.sites,
            gamma: self.gamma1,
            mu: self.mu,
            theta: self.theta,
            tau_pre: self.tau_pre,
        }
    }
}

/// Every field any mode may read. Which ones are required depends on the mode.
///
/// A JSON result written by a run embeds its config plus a `result` member;
/// `result` is ignored on input so results can be fed back as configs.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<EnergySpectrum>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distance: Option<DistanceKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<PopulationVector>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hot: Option<PopulationVector>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cold: Option<PopulationVector>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    /// Free parameter of the general-f bound.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anchor_a: Option<PopulationVector>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anchor_b: Option<PopulationVector>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambdas: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chain: Option<ChainSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing)]
    pub result: Option<serde_json::Value>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config {
            field: locate_bad_field(text).unwrap_or_else(|| field_of_serde_error(&e.to_string())),
            message: e.to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config {
            field: "config".into(),
            message: format!("cannot read {}: {e}", path.display()),
        })?;
        Self::from_json(&text)
    }

    pub(crate) fn require<'a, T>(
        &self,
        value: &'a Option<T>,
        field: &'static str,
    ) -> Result<&'a T, CliError> {
        value.as_ref().ok_or_else(|| CliError::Config {
            field: field.into(),
            message: format!(
                "missing field `{field}` (required by {} mode)",
                self.mode.map_or("this", Mode::name)
            ),
        })
    }

    pub(crate) fn spectrum(&self) -> Result<&EnergySpectrum, CliError> {
        self.require(&self.spectrum, "spectrum")
    }

    /// Population field checked against the spectrum length.
    pub(crate) fn populations(
        &self,
        value: &Option<PopulationVector>,
        field: &'static str,
    ) -> Result<PopulationVector, CliError> {
        let p = self.require(value, field)?;
        let n = self.spectrum()?.level_count();
        if p.len() != n {
            return Err(CliError::Config {
                field: field.into(),
                message: format!("`{field}` has {} entries, spectrum has {n} levels", p.len()),
            });
        }
        Ok(p.clone())
    }

    pub(crate) fn distance_function(&self) -> Result<DistanceFunction, CliError> {
        let spectrum = self.spectrum()?;
        let kind = *self.require(&self.distance, "distance")?;
        if kind != DistanceKind::Custom && self.weights.is_some() {
            return Err(CliError::Config {
                field: "weights".into(),
                message: "`weights` is only read with \"distance\": \"custom\"".into(),
            });
        }
        DistanceFunction::make(spectrum, kind, self.weights.clone()).map_err(|e| CliError::Config {
            field: "weights".into(),
            message: e.to_string(),
        })
    }

    pub(crate) fn positive(
        &self,
        value: &Option<f64>,
        field: &'static str,
    ) -> Result<f64, CliError> {
        let v = *self.require(value, field)?;
        if !(v > 0.0 && v.is_finite()) {
            return Err(CliError::Config {
                field: field.into(),
                message: format!("`{field}` must be positive and finite, got {v}"),
            });
        }
        Ok(v)
    }

    pub(crate) fn grid(&self) -> GridSpec {
        self.grid.unwrap_or_default()
    }
}

/// Re-parses each top-level member on its own to find the first one that fails.
fn locate_bad_field(text: &str) -> Option<String> {
    let serde_json::Value::Object(map) = serde_json::from_str(text).ok()? else {
        return None;
    };
    map.into_iter().find_map(|(key, value)| {
        let single = serde_json::Value::Object([(key.clone(), value)].into_iter().collect());
        serde_json::from_value::<ExperimentConfig>(single)
            .is_err()
            .then_some(key)
    })
}

/// Pulls the offending field name out of a serde error message when present.
fn field_of_serde_error(message: &str) -> String {
    for marker in ["unknown field `", "missing field `", "duplicate field `"] {
        if let Some(start) = message.find(marker) {
            let rest = &message[start + marker.len()..];
            if let Some(end) = rest.find('`') {
                return rest[..end].to_string();
            }
        }
    }
    "config".into()
}
