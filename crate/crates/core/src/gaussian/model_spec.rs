use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::fbm::{FbmBackend, FbmSampler, FBMSpec};
use super::fourier::{coupled_pair, FourierCoefficients, FourierGaussianModel};
use super::PathSampler;
use crate::error::{arg, Error, Result};
use crate::paths::{Path, TimeGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Fbm,
    Fourier,
    CoupledFourier,
}

/// Uniform grid with `m` segments on `[0, T]`; `T` defaults to 1 for fBM and
/// to `2π` for Fourier models.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    #[serde(rename = "T", default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
    pub m: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoefficientSpec {
    Decay { c: f64, alpha: f64, n_max: usize },
    /// `explicit[i][k - 1] = [cos, sin]`.
    Explicit(Vec<Vec<[f64; 2]>>),
}

impl CoefficientSpec {
    pub fn build(&self, dim: usize) -> Result<FourierCoefficients> {
        let c = match self {
            CoefficientSpec::Decay { c, alpha, n_max } => FourierCoefficients::decay(dim, *n_max, *c, *alpha)?,
            CoefficientSpec::Explicit(rows) => FourierCoefficients::new(rows.clone())?,
        };
        if c.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: c.dim() });
        }
        Ok(c)
    }
}

fn default_version() -> u32 {
    1
}

/// JSON model description.
///
/// ```json
/// {"version": 1, "type": "fourier", "d": 2, "grid": {"m": 512},
///  "coefficients": {"decay": {"c": 1.0, "alpha": 0.45, "n_max": 256}}, "seed": 7}
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    #[serde(default = "default_version")]
    pub version: u32,
    #[serde(rename = "type")]
    pub kind: ModelKind,
    #[serde(rename = "H", default, skip_serializing_if = "Option::is_none")]
    pub hurst: Option<f64>,
    pub d: usize,
    pub grid: GridSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<CoefficientSpec>,
    /// Second coefficient set of a coupled pair.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficients_y: Option<CoefficientSpec>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub backend: Option<FbmBackend>,
}

/// A built sampler.
#[derive(Debug, Clone)]
pub enum Model {
    Fbm(FbmSampler),
    Fourier(FourierGaussianModel),
    CoupledFourier { x: FourierGaussianModel, y: FourierCoefficients },
}

impl ModelSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: ModelSpec = serde_json::from_str(text)?;
        if spec.version != 1 {
            return arg(format!("unsupported model spec version {}", spec.version));
        }
        Ok(spec)
    }

    pub fn grid(&self) -> Result<TimeGrid> {
        let default_t = match self.kind {
            ModelKind::Fbm => 1.0,
            _ => TAU,
        };
        TimeGrid::uniform(self.grid.horizon.unwrap_or(default_t), self.grid.m)
    }

    pub fn build(&self) -> Result<Model> {
        let grid = self.grid()?;
        let coeffs = |c: &Option<CoefficientSpec>, name: &str| -> Result<FourierCoefficients> {
            c.as_ref()
                .ok_or_else(|| Error::Argument(format!("a {name} entry is required for this model type")))?
                .build(self.d)
        };
        match self.kind {
            ModelKind::Fbm => {
                let h = self.hurst.ok_or_else(|| Error::Argument("fbm models need H".into()))?;
                let spec = FBMSpec::new(h, self.d, grid, self.backend.unwrap_or_default())?;
                Ok(Model::Fbm(FbmSampler::new(spec)?))
            }
            ModelKind::Fourier => Ok(Model::Fourier(FourierGaussianModel::new(
                coeffs(&self.coefficients, "coefficients")?,
                grid,
            )?)),
            ModelKind::CoupledFourier => {
                let x = coeffs(&self.coefficients, "coefficients")?;
                let y = coeffs(&self.coefficients_y, "coefficients_y")?;
                if y.n_max() != x.n_max() {
                    return arg("coupled coefficient sets must have the same length");
                }
                Ok(Model::CoupledFourier { x: FourierGaussianModel::new(x, grid)?, y })
            }
        }
    }
}

impl Model {
    /// Both paths of a coupled model; `None` for single models.
    pub fn sample_pair(&self, seed: u64, index: u64) -> Option<Result<(Path, Path)>> {
        match self {
            Model::CoupledFourier { x, y } => {
                Some(coupled_pair(x.coefficients(), y, x.grid(), seed, index))
            }
            _ => None,
        }
    }

    fn sampler(&self) -> &dyn PathSampler {
        match self {
            Model::Fbm(s) => s,
            Model::Fourier(m) => m,
            Model::CoupledFourier { x, .. } => x,
        }
    }
}

impl PathSampler for Model {
    fn dim(&self) -> usize {
        self.sampler().dim()
    }

    fn grid(&self) -> &TimeGrid {
        self.sampler().grid()
    }

    fn sample(&self, seed: u64, index: u64) -> Result<Path> {
        self.sampler().sample(seed, index)
    }
}
