//! Pipeline configuration. Every report embeds the full config so a run can
//! be reproduced bit-for-bit from its own output.

use serde::{Deserialize, Serialize};

use crate::curve::FreenessParams;
use crate::dynamics::{FateParams, WindingParams};

/// Candidate-curve family for module estimation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CurveFamilyParams {
    pub samples: usize,
    pub circle_radii: Vec<f64>,
    pub star_count: usize,
    pub star_amplitude: f64,
}

impl Default for CurveFamilyParams {
    fn default() -> Self {
        CurveFamilyParams {
            samples: 512,
            circle_radii: vec![0.25, 0.5, 1.0, 2.0, 4.0],
            star_count: 2,
            star_amplitude: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Config {
    pub fate: FateParams,
    pub winding: WindingParams,
    pub freeness: FreenessParams,
    pub curves: CurveFamilyParams,
    /// Radius of the curve used for word recovery.
    pub recovery_radius: f64,
    /// Radii over which the numeric index must agree.
    pub stability_radii: Vec<f64>,
    /// Probe budget per indifferent sector for the reverse-orbit search.
    pub reverse_probe_budget: usize,
    pub seed: u64,
    pub jobs: Option<usize>,
    pub out: Option<String>,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            fate: FateParams::default(),
            winding: WindingParams::default(),
            freeness: FreenessParams::default(),
            curves: CurveFamilyParams::default(),
            recovery_radius: 1.0,
            stability_radii: vec![0.25, 1.0, 4.0],
            reverse_probe_budget: 10_000,
            seed: 0,
            jobs: None,
            out: None,
        }
    }
}

impl Config {
    pub fn validate(&self) -> Result<(), String> {
        self.fate.validate()?;
        if self.recovery_radius <= 0.0 {
            return Err("recovery_radius must be positive".into());
        }
        if self.curves.samples < 8 {
            return Err("curve sampling needs at least 8 points".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_config_fills_defaults() {
        let cfg: Config = serde_json::from_str(r#"{"seed": 42}"#).unwrap();
        assert_eq!(cfg.seed, 42);
        assert_eq!(cfg.curves.samples, 512);
        assert_eq!(cfg.fate.max_iter, 2000);
    }

    #[test]
    fn roundtrip() {
        let cfg = Config::default();
        let json = serde_json::to_string(&cfg).unwrap();
        let back: Config = serde_json::from_str(&json).unwrap();
        assert_eq!(cfg, back);
    }
}
