use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Result, SbtError};
use crate::force::ForceDensity;
use crate::geometry::{Centerline, FourierMode, Frame};
use crate::quadrature::QuadratureSpec;
use crate::Vec3;

/// Samples used for both the arclength table and the frame when a curve is
/// built from a config.
pub const GEOMETRY_SAMPLES: usize = 512;
pub const DEFAULT_N_THETA: usize = 64;
pub const DEFAULT_N_S: usize = 64;

/// A centerline given by name or by raw Fourier modes.
///
/// Named curves: `"circle"`, `"fourier-knot"` (a trefoil) and `"wobbly"`
/// (a nonplanar two-mode loop).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CurveSpec {
    Named(String),
    Modes { modes: Vec<FourierMode> },
}

impl CurveSpec {
    pub fn named(name: &str) -> Self {
        CurveSpec::Named(name.to_string())
    }

    pub fn modes(&self) -> Result<Vec<FourierMode>> {
        match self {
            CurveSpec::Modes { modes } => Ok(modes.clone()),
            CurveSpec::Named(name) => match name.as_str() {
                "circle" => Ok(vec![FourierMode::new(1, [1.0, 0.0, 0.0], [0.0, 1.0, 0.0])]),
                "fourier-knot" => Ok(vec![
                    FourierMode::new(1, [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]),
                    FourierMode::new(2, [2.0, 0.0, 0.0], [0.0, -2.0, 0.0]),
                    FourierMode::new(3, [0.0; 3], [0.0, 0.0, -1.0]),
                ]),
                "wobbly" => Ok(vec![
                    FourierMode::new(1, [1.0, 0.0, 0.0], [0.0, 1.0, 0.2]),
                    FourierMode::new(2, [0.0, 0.1, 0.3], [0.2, 0.0, 0.0]),
                ]),
                other => Err(SbtError::ConfigInvalid(format!("unknown geometry '{other}'"))),
            },
        }
    }

    pub fn build(&self) -> Result<Frame> {
        let centerline = Centerline::build(&self.modes()?, GEOMETRY_SAMPLES)?;
        Frame::build(&centerline, GEOMETRY_SAMPLES)
    }
}

/// A force density given by name, as a constant vector, or by Fourier modes.
///
/// Named forces: `"constant"` is `(0, 0, 1)`; `"harmonic"` is
/// `(0, 0, 1) + 0.5 cos(2πs) x̂ + 0.5 sin(4πs) ŷ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ForceSpec {
    Named(String),
    Constant { constant: [f64; 3] },
    Modes { modes: Vec<FourierMode> },
}

impl ForceSpec {
    pub fn named(name: &str) -> Self {
        ForceSpec::Named(name.to_string())
    }

    pub fn build(&self) -> Result<ForceDensity> {
        match self {
            ForceSpec::Constant { constant } => {
                if constant.iter().any(|c| !c.is_finite()) {
                    return Err(SbtError::ConfigInvalid("force constant must be finite".into()));
                }
                Ok(ForceDensity::constant(Vec3::from(*constant)))
            }
            ForceSpec::Modes { modes } => ForceDensity::new(modes.clone()),
            ForceSpec::Named(name) => match name.as_str() {
                "constant" => Ok(ForceDensity::constant(Vec3::z())),
                "harmonic" => ForceDensity::new(vec![
                    FourierMode::new(0, [0.0, 0.0, 1.0], [0.0; 3]),
                    FourierMode::new(1, [0.5, 0.0, 0.0], [0.0; 3]),
                    FourierMode::new(2, [0.0; 3], [0.0, 0.5, 0.0]),
                ]),
                other => Err(SbtError::ConfigInvalid(format!("unknown force '{other}'"))),
            },
        }
    }
}

fn default_n_theta() -> usize {
    DEFAULT_N_THETA
}

fn default_n_s() -> usize {
    DEFAULT_N_S
}

/// An ε-sweep experiment as read from JSON.
///
/// An empty `eps_list` selects [`default_eps_list`]. Without `quadrature`,
/// each ε uses [`QuadratureSpec::for_eps`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub centerline: CurveSpec,
    pub force: ForceSpec,
    #[serde(default)]
    pub eps_list: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quadrature: Option<QuadratureSpec>,
    #[serde(default = "default_n_theta")]
    pub n_theta: usize,
    #[serde(default = "default_n_s")]
    pub n_s: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
}

/// Six octaves `2⁻⁵ … 2⁻¹⁰`, shifted down by whole octaves until the largest
/// value is admissible.
pub fn default_eps_list(eps_limit: f64) -> Vec<f64> {
    let mut top = 5;
    while 2f64.powi(-top) >= eps_limit {
        top += 1;
    }
    (top..top + 6).map(|k| 2f64.powi(-k)).collect()
}

impl ExperimentConfig {
    pub fn new(centerline: CurveSpec, force: ForceSpec) -> Self {
        ExperimentConfig {
            centerline,
            force,
            eps_list: Vec::new(),
            quadrature: None,
            n_theta: DEFAULT_N_THETA,
            n_s: DEFAULT_N_S,
            output_dir: None,
            seed: 0,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| SbtError::ConfigInvalid(e.to_string()))
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Checks everything that does not need the geometry.
    pub fn validate(&self) -> Result<()> {
        if !self.eps_list.is_empty() && self.eps_list.len() < 3 {
            return Err(SbtError::ConfigInvalid(format!(
                "eps_list needs at least 3 entries for a slope fit, got {}",
                self.eps_list.len()
            )));
        }
        if let Some(bad) = self.eps_list.iter().find(|e| !(e.is_finite() && **e > 0.0)) {
            return Err(SbtError::ConfigInvalid(format!("eps values must be positive, got {bad}")));
        }
        if self.n_theta < crate::residuals::MIN_THETA_FORCE {
            return Err(SbtError::ConfigInvalid(format!(
                "n_theta must be >= {}, got {}",
                crate::residuals::MIN_THETA_FORCE,
                self.n_theta
            )));
        }
        if self.n_s == 0 {
            return Err(SbtError::ConfigInvalid("n_s must be positive".into()));
        }
        if let Some(q) = &self.quadrature {
            q.validate()?;
        }
        Ok(())
    }

    /// The ε values to run, after checking admissibility against `frame`.
    pub fn resolved_eps(&self, frame: &Frame) -> Result<Vec<f64>> {
        let list = if self.eps_list.is_empty() {
            default_eps_list(frame.eps_limit())
        } else {
            self.eps_list.clone()
        };
        for &eps in &list {
            frame.check_eps(eps)?;
        }
        Ok(list)
    }

    pub fn quadrature_for(&self, eps: f64) -> QuadratureSpec {
        self.quadrature.unwrap_or_else(|| QuadratureSpec::for_eps(eps))
    }

    /// Hex SHA-256 of the config serialized with sorted keys. `output_dir`
    /// is excluded so the same experiment hashes equally wherever it is
    /// written.
    pub fn hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.output_dir = None;
        let value = serde_json::to_value(&canonical).expect("config serializes");
        hex::encode(Sha256::digest(value.to_string().as_bytes()))
    }
}
