//! Run configuration: JSON ingestion and up-front validation of every
//! referenced spec before any computation starts.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::PolynomialP;
use crate::models::Model;
use crate::testfn::{Convention, TestFunction};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelSpec {
    pub kind: String,
    pub mass: f64,
    #[serde(default)]
    pub name: Option<String>,
    /// sinh-Gordon coupling B in (0, 2)
    #[serde(default)]
    pub coupling: Option<f64>,
    /// custom models: CSV of (theta, Re F_min, Im F_min) on a uniform grid
    #[serde(default)]
    pub fmin_table: Option<PathBuf>,
    #[serde(default)]
    pub asymptote: Option<f64>,
}

impl ModelSpec {
    pub fn build(&self) -> Result<Model> {
        match self.kind.as_str() {
            "free" => Model::free(self.mass),
            "ising" => Model::ising(self.mass),
            "sinh_gordon" => {
                let b = self.coupling.ok_or_else(|| {
                    Error::InvalidModel("sinh_gordon requires a coupling".into())
                })?;
                Model::sinh_gordon(self.mass, b)
            }
            "custom" => {
                let table = self.fmin_table.as_ref().ok_or_else(|| {
                    Error::InvalidModel("custom model requires an fmin_table path".into())
                })?;
                let asym = self.asymptote.ok_or_else(|| {
                    Error::InvalidModel("custom model requires a declared asymptote".into())
                })?;
                let name = self.name.as_deref().unwrap_or("custom");
                Model::custom_from_csv(name, self.mass, table, asym)
            }
            other => Err(Error::InvalidModel(format!("unknown model kind '{other}'"))),
        }
    }
}

/// Either explicit coefficients (lowest degree first) or the linear-family
/// parameter alpha; defaults to P = 1.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct PolySpec {
    #[serde(default)]
    pub coeffs: Option<Vec<f64>>,
    #[serde(default)]
    pub alpha: Option<f64>,
}

impl PolySpec {
    pub fn build(&self) -> Result<PolynomialP> {
        match (&self.coeffs, self.alpha) {
            (Some(_), Some(_)) => {
                Err(Error::InvalidParameter("give either coeffs or alpha, not both".into()))
            }
            (Some(c), None) => PolynomialP::new(c.clone()),
            (None, Some(a)) => PolynomialP::linear(a),
            (None, None) => Ok(PolynomialP::one()),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TestFnSpec {
    #[serde(default = "default_kind")]
    pub kind: String,
    #[serde(default = "one")]
    pub sigma: f64,
    #[serde(default)]
    pub center: f64,
    #[serde(default = "one")]
    pub amplitude: f64,
    /// tabulated kind: CSV of (t, g(t)) with uniform spacing
    #[serde(default)]
    pub path: Option<PathBuf>,
}

fn default_kind() -> String {
    "gaussian".into()
}

fn one() -> f64 {
    1.0
}

impl Default for TestFnSpec {
    fn default() -> Self {
        TestFnSpec { kind: default_kind(), sigma: 1.0, center: 0.0, amplitude: 1.0, path: None }
    }
}

impl TestFnSpec {
    pub fn build(&self) -> Result<TestFunction> {
        let g = match self.kind.as_str() {
            "gaussian" => TestFunction::gaussian(self.sigma, self.center)?,
            "bump" => TestFunction::bump(self.sigma, self.center)?,
            "tabulated" => {
                let path = self.path.as_ref().ok_or_else(|| {
                    Error::InvalidParameter("tabulated test function requires a path".into())
                })?;
                TestFunction::tabulated_from_csv(path)?
            }
            other => return Err(Error::InvalidParameter(format!("unknown test function kind '{other}'"))),
        };
        Ok(g.scaled(self.amplitude))
    }

    /// Whether the bound evaluation is an extrapolation beyond the
    /// compactly-supported hypothesis.
    pub fn is_compactly_supported(&self) -> bool {
        matches!(self.kind.as_str(), "bump" | "tabulated")
    }
}

fn default_ladder() -> Vec<(f64, usize)> {
    vec![(8.0, 64), (8.0, 128), (8.0, 256)]
}

fn default_tolerance() -> f64 {
    1e-6
}

fn default_theta_max() -> f64 {
    40.0
}

fn default_margin() -> f64 {
    0.01
}

fn default_samples() -> usize {
    4001
}

fn default_epsilon() -> f64 {
    1e-9
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub model: ModelSpec,
    #[serde(default)]
    pub polynomial: PolySpec,
    #[serde(default)]
    pub test_function: TestFnSpec,
    #[serde(default = "default_ladder")]
    pub grid_ladder: Vec<(f64, usize)>,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default = "default_theta_max")]
    pub theta_max: f64,
    #[serde(default = "default_margin")]
    pub margin: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// strictness margin of the negativity scan
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default)]
    pub convention: Convention,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

/// Fully validated run inputs.
pub struct Validated {
    pub model: Model,
    pub polynomial: PolynomialP,
    pub test_function: TestFunction,
}

impl RunConfig {
    pub fn from_path<P: AsRef<Path>>(path: P) -> Result<Self> {
        let bytes = std::fs::read(path)?;
        Ok(serde_json::from_slice(&bytes)?)
    }

    /// Validates every referenced spec against its module constructor.
    pub fn validate(&self) -> Result<Validated> {
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidParameter("tolerance must be positive".into()));
        }
        Ok(Validated {
            model: self.model.build()?,
            polynomial: self.polynomial.build()?,
            test_function: self.test_function.build()?,
        })
    }
}
