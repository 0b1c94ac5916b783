//! JSON experiment configuration.

use std::fmt;
use std::path::Path;

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};
use sweep_core::solvers::{PicardInit, PicardOptions, Scheme};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scheme: SchemeName,
    pub set: SetSpec,
    pub initial: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<FieldSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub driver: Option<DriverSpec>,
    pub n: usize,
    pub horizon: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub picard_init: InitName,
    #[serde(default)]
    pub output: OutputSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeName {
    CatchingUp,
    Skorokhod,
    Euler,
    PicardYoung,
    PicardRough,
}

impl From<SchemeName> for Scheme {
    fn from(s: SchemeName) -> Self {
        match s {
            SchemeName::CatchingUp => Scheme::CatchingUp,
            SchemeName::Skorokhod => Scheme::Skorokhod,
            SchemeName::Euler => Scheme::Euler,
            SchemeName::PicardYoung => Scheme::PicardYoung,
            SchemeName::PicardRough => Scheme::PicardRough,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitName {
    #[default]
    CatchingUp,
    Constant,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetSpec {
    #[serde(flatten)]
    pub family: SetFamily,
    #[serde(default)]
    pub motion: MotionSpec,
    pub gamma: Vec<f64>,
    pub r: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hoelder: Option<HoelderSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum SetFamily {
    Ball { center: Vec<f64>, radius: f64 },
    Box { lower: Vec<Real>, upper: Vec<Real> },
    Polytope { halfspaces: Vec<HalfspaceSpec> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HalfspaceSpec {
    pub normal: Vec<f64>,
    pub offset: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MotionSpec {
    #[default]
    Static,
    Linear { velocity: Vec<f64> },
    Oscillating { amplitude: Vec<f64>, frequency: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HoelderSpec {
    pub k: f64,
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FieldSpec {
    Zero,
    /// Row-major `e x d` matrix.
    Constant { matrix: Vec<f64> },
    /// `offset + slope x`, `slope` row-major `(e d) x e`.
    Linear { offset: Vec<f64>, slope: Vec<f64> },
    /// `amplitude cos(<wave, x> + phase)`.
    ScalarTrig {
        amplitude: Vec<f64>,
        wave: Vec<f64>,
        #[serde(default)]
        phase: f64,
    },
    /// Drift `b0 + b1 x` against time and constant `sigma` against the noise.
    TimeSpace { b0: Vec<f64>, b1: Vec<f64>, sigma: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DriverSpec {
    /// `z_i(t) = slope_i t + amplitude_i sin(2 pi frequency t)`.
    Analytic {
        slope: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        amplitude: Option<Vec<f64>>,
        #[serde(default = "one")]
        frequency: f64,
    },
    Fbm {
        hurst: f64,
        #[serde(default = "one_usize")]
        dims: usize,
        #[serde(default)]
        method: FbmMethodName,
    },
    /// Columns of a CSV file with a `t` column; its grid replaces `n` and `horizon`.
    Csv { path: String, columns: Vec<String> },
}

fn one() -> f64 {
    1.0
}

fn one_usize() -> usize {
    1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FbmMethodName {
    #[default]
    Hosking,
    Cholesky,
}

impl From<FbmMethodName> for sweep_core::fbm::FbmMethod {
    fn from(m: FbmMethodName) -> Self {
        match m {
            FbmMethodName::Hosking => sweep_core::fbm::FbmMethod::Hosking,
            FbmMethodName::Cholesky => sweep_core::fbm::FbmMethod::Cholesky,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub proj_tol: f64,
    pub max_sweeps: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub tol_u: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { proj_tol: 1e-10, max_sweeps: 10_000, tol: 1e-8, max_iter: 200, tol_u: 1e-6 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSpec {
    pub trajectory: String,
    pub report: String,
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self { trajectory: "trajectory.csv".into(), report: "convergence.csv".into() }
    }
}

/// A float that may be written as `"inf"` or `"-inf"` in JSON.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Real(pub f64);

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0 {
            v if v == f64::INFINITY => s.serialize_str("inf"),
            v if v == f64::NEG_INFINITY => s.serialize_str("-inf"),
            v => s.serialize_f64(v),
        }
    }
}

impl<'de> Deserialize<'de> for Real {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct RealVisitor;

        impl Visitor<'_> for RealVisitor {
            type Value = Real;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number, \"inf\" or \"-inf\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Real, E> {
                Ok(Real(v))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Real, E> {
                Ok(Real(v as f64))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Real, E> {
                Ok(Real(v as f64))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Real, E> {
                match v {
                    "inf" | "+inf" | "infinity" => Ok(Real(f64::INFINITY)),
                    "-inf" | "-infinity" => Ok(Real(f64::NEG_INFINITY)),
                    _ => Err(E::invalid_value(de::Unexpected::Str(v), &self)),
                }
            }
        }

        d.deserialize_any(RealVisitor)
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| CliError::Input { path: path.to_path_buf(), source })?;
        Self::from_json(&text)
    }

    /// Single-line JSON echo for output metadata.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme.into()
    }

    pub fn picard_options(&self) -> PicardOptions {
        PicardOptions {
            tol: self.tolerances.tol,
            max_iter: self.tolerances.max_iter,
            init: match self.picard_init {
                InitName::CatchingUp => PicardInit::CatchingUp,
                InitName::Constant => PicardInit::Constant,
            },
        }
    }

    /// Applies a `SWEEP_PROJ_TOL` value.
    pub fn override_proj_tol(&mut self, value: Option<&str>) -> Result<(), CliError> {
        if let Some(v) = value {
            let tol: f64 = v
                .trim()
                .parse()
                .map_err(|_| CliError::config(format!("SWEEP_PROJ_TOL is not a number: {v:?}")))?;
            if !(tol > 0.0) {
                return Err(CliError::config("SWEEP_PROJ_TOL must be positive"));
            }
            self.tolerances.proj_tol = tol;
        }
        Ok(())
    }
}
