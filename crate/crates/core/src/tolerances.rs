use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Thresholds for the pointwise verdicts. Relative quantities are measured
/// against `‖II_0‖` (membership) or `‖∇II‖` (harmonicity).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub associativity: f64,
    /// Largest associativity residual at which an SO(4)-frame is built.
    pub frame: f64,
    pub mean_curvature: f64,
    pub symmetry: f64,
    pub membership: f64,
    pub harmonic: f64,
    /// Lower bound on `‖II_0‖` (zero disables the check).
    pub min_traceless: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            associativity: 1e-9,
            frame: 1e-6,
            mean_curvature: 1e-8,
            symmetry: 1e-7,
            membership: 1e-6,
            harmonic: 1e-5,
            min_traceless: 0.0,
        }
    }
}

impl Tolerances {
    /// Closed-form curved examples, which must also be visibly curved.
    pub fn curved() -> Self {
        Self {
            min_traceless: 0.1,
            ..Self::default()
        }
    }

    /// Spline patches built from solver output.
    pub fn solver_patch() -> Self {
        Self {
            associativity: 1e-4,
            frame: 1e-3,
            mean_curvature: 1e-3,
            symmetry: 1e-3,
            membership: 1e-3,
            harmonic: 1e-3,
            min_traceless: 0.0,
        }
    }

    pub fn set(&mut self, key: &str, value: f64) -> Result<()> {
        if !(value.is_finite() && (value > 0.0 || key == "min_traceless" && value >= 0.0)) {
            return Err(Error::InvalidConfig(format!(
                "tolerance {key} must be positive, got {value}"
            )));
        }
        let slot = match key {
            "associativity" => &mut self.associativity,
            "frame" => &mut self.frame,
            "mean_curvature" => &mut self.mean_curvature,
            "symmetry" => &mut self.symmetry,
            "membership" => &mut self.membership,
            "harmonic" => &mut self.harmonic,
            "min_traceless" => &mut self.min_traceless,
            _ => return Err(Error::InvalidConfig(format!("unknown tolerance {key:?}"))),
        };
        *slot = value;
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let mut copy = *self;
        for (k, v) in [
            ("associativity", self.associativity),
            ("frame", self.frame),
            ("mean_curvature", self.mean_curvature),
            ("symmetry", self.symmetry),
            ("membership", self.membership),
            ("harmonic", self.harmonic),
            ("min_traceless", self.min_traceless),
        ] {
            copy.set(k, v)?;
        }
        Ok(())
    }
}
