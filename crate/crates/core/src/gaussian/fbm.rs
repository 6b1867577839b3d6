use std::sync::Arc;

use nalgebra::DMatrix;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use super::rng::standard_normals;
use super::PathSampler;
use crate::error::{arg, Error, Result};
use crate::paths::{Path, TimeGrid};

/// Largest number of random grid values the dense backend factorizes.
pub const DENSE_MAX_POINTS: usize = 1 << 11;

/// `E[B_s B_t] = (s^{2H} + t^{2H} - |t - s|^{2H}) / 2`.
pub fn fbm_covariance(hurst: f64, s: f64, t: f64) -> f64 {
    let e = 2.0 * hurst;
    0.5 * (s.abs().powf(e) + t.abs().powf(e) - (t - s).abs().powf(e))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FbmBackend {
    /// Cholesky factor of the grid covariance: exact law on any grid.
    #[default]
    Dense,
    /// Circulant embedding of the increment covariance: uniform grids from 0.
    Circulant,
}

/// fBM with independent components observed on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FBMSpec {
    pub hurst: f64,
    pub dim: usize,
    pub grid: TimeGrid,
    pub backend: FbmBackend,
}

impl FBMSpec {
    pub fn new(hurst: f64, dim: usize, grid: TimeGrid, backend: FbmBackend) -> Result<Self> {
        if !(hurst > 0.25 && hurst < 1.0) {
            return arg(format!("Hurst index must lie in (1/4, 1), got {hurst}"));
        }
        if dim == 0 {
            return arg("fBM dimension must be at least 1");
        }
        if grid.start() < 0.0 {
            return arg("fBM grids must lie in [0, T]");
        }
        Ok(Self { hurst, dim, grid, backend })
    }
}

#[derive(Debug)]
enum Factor {
    /// Row-major lower-triangular factor over the grid points in `random`.
    Dense { lower: Vec<f64>, random: Vec<usize> },
    Circulant { sqrt_eigs: Vec<f64>, scale: f64 },
}

/// A prepared fBM sampler; the factorization is shared between clones.
#[derive(Debug, Clone)]
pub struct FbmSampler {
    spec: FBMSpec,
    factor: Arc<Factor>,
}

impl FbmSampler {
    pub fn new(spec: FBMSpec) -> Result<Self> {
        let factor = match spec.backend {
            FbmBackend::Dense => dense_factor(&spec)?,
            FbmBackend::Circulant => circulant_factor(&spec)?,
        };
        Ok(Self { spec, factor: Arc::new(factor) })
    }

    pub fn spec(&self) -> &FBMSpec {
        &self.spec
    }

    /// Number of standard normals consumed per sample.
    pub fn noise_len(&self) -> usize {
        self.spec.dim * self.per_component()
    }

    fn per_component(&self) -> usize {
        match &*self.factor {
            Factor::Dense { random, .. } => random.len(),
            Factor::Circulant { sqrt_eigs, .. } => 2 * (sqrt_eigs.len() - 1),
        }
    }

    /// The path driven by a given noise vector of length [`noise_len`](Self::noise_len).
    pub fn path_from_noise(&self, noise: &[f64]) -> Result<Path> {
        if noise.len() != self.noise_len() {
            return Err(Error::DimensionMismatch { expected: self.noise_len(), found: noise.len() });
        }
        let d = self.spec.dim;
        let n = self.spec.grid.len();
        let k = self.per_component();
        let mut values = vec![0.0; n * d];
        for (c, z) in noise.chunks_exact(k).enumerate() {
            let col = match &*self.factor {
                Factor::Dense { lower, random } => dense_column(lower, random, z, n),
                Factor::Circulant { sqrt_eigs, scale } => circulant_column(sqrt_eigs, *scale, z),
            };
            for (i, v) in col.into_iter().enumerate() {
                values[i * d + c] = v;
            }
        }
        Path::new(self.spec.grid.clone(), d, values)
    }
}

impl PathSampler for FbmSampler {
    fn dim(&self) -> usize {
        self.spec.dim
    }

    fn grid(&self) -> &TimeGrid {
        &self.spec.grid
    }

    fn sample(&self, seed: u64, index: u64) -> Result<Path> {
        self.path_from_noise(&standard_normals(seed, index, self.noise_len()))
    }
}

fn dense_factor(spec: &FBMSpec) -> Result<Factor> {
    let pts = spec.grid.points();
    let random: Vec<usize> = (0..pts.len()).filter(|&i| pts[i] > 0.0).collect();
    let n = random.len();
    if n > DENSE_MAX_POINTS {
        return arg(format!(
            "dense fBM backend supports at most {DENSE_MAX_POINTS} random grid values, got {n}"
        ));
    }
    let cov = DMatrix::from_fn(n, n, |a, b| fbm_covariance(spec.hurst, pts[random[a]], pts[random[b]]));
    let chol = match cov.clone().cholesky() {
        Some(c) => c,
        None => {
            let mut jittered = cov;
            for i in 0..n {
                jittered[(i, i)] *= 1.0 + 1e-12;
            }
            jittered.cholesky().ok_or_else(|| {
                Error::Factorization(
                    "fBM covariance is not positive definite, even after a 1e-12 relative diagonal jitter"
                        .into(),
                )
            })?
        }
    };
    let l = chol.l();
    let mut lower = vec![0.0; n * n];
    for a in 0..n {
        for b in 0..=a {
            lower[a * n + b] = l[(a, b)];
        }
    }
    Ok(Factor::Dense { lower, random })
}

fn dense_column(lower: &[f64], random: &[usize], z: &[f64], n_points: usize) -> Vec<f64> {
    let n = random.len();
    let mut out = vec![0.0; n_points];
    for (a, &gi) in random.iter().enumerate() {
        let row = &lower[a * n..a * n + a + 1];
        out[gi] = row.iter().zip(z).map(|(l, x)| l * x).sum();
    }
    out
}

fn circulant_factor(spec: &FBMSpec) -> Result<Factor> {
    let g = &spec.grid;
    if g.start() != 0.0 || !g.is_uniform() {
        return Err(Error::Unsupported(
            "circulant fBM backend needs a uniform grid starting at 0".into(),
        ));
    }
    let n = g.segments();
    let h = g.horizon() / n as f64;
    let e = 2.0 * spec.hurst;
    // Unit-spacing fractional Gaussian noise autocovariance.
    let gamma = |k: usize| {
        let k = k as f64;
        0.5 * ((k + 1.0).powf(e) - 2.0 * k.powf(e) + (k - 1.0).abs().powf(e))
    };
    let size = 2 * n;
    let mut row: Vec<Complex<f64>> = (0..size)
        .map(|j| Complex::new(gamma(if j <= n { j } else { size - j }), 0.0))
        .collect();
    FftPlanner::new().plan_fft_forward(size).process(&mut row);
    let top = row.iter().map(|c| c.re).fold(0.0, f64::max);
    let mut sqrt_eigs = Vec::with_capacity(n + 1);
    for c in &row[..=n] {
        if c.re < -1e-10 * top {
            return Err(Error::Factorization(format!(
                "circulant embedding has a negative eigenvalue {}",
                c.re
            )));
        }
        sqrt_eigs.push(c.re.max(0.0).sqrt());
    }
    Ok(Factor::Circulant { sqrt_eigs, scale: h.powf(spec.hurst) })
}

fn circulant_column(sqrt_eigs: &[f64], scale: f64, z: &[f64]) -> Vec<f64> {
    let n = sqrt_eigs.len() - 1;
    let size = 2 * n;
    let mut w = vec![Complex::new(0.0, 0.0); size];
    w[0] = Complex::new(sqrt_eigs[0] * z[0], 0.0);
    w[n] = Complex::new(sqrt_eigs[n] * z[1], 0.0);
    let r = std::f64::consts::FRAC_1_SQRT_2;
    for k in 1..n {
        let c = Complex::new(z[2 * k], z[2 * k + 1]) * (sqrt_eigs[k] * r);
        w[k] = c;
        w[size - k] = c.conj();
    }
    FftPlanner::new().plan_fft_forward(size).process(&mut w);
    let norm = scale / (size as f64).sqrt();
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for c in &w[..n] {
        acc += c.re * norm;
        out.push(acc);
    }
    out
}
