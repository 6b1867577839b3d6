use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use super::rng::{standard_normals, RngSeed};
use super::PathSampler;
use crate::error::{arg, Error, Result};
use crate::norms::p_variation_profile;
use crate::paths::{Path, TimeGrid};
use crate::signature::PairSet;
use crate::stats::mean_stderr;

/// Per-component coefficients `x_k^i`, stored per frequency `k >= 1` as a
/// (cosine, sine) pair: `comps[i][k - 1] = [x^i_{k,cos}, x^i_{k,sin}]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierCoefficients {
    comps: Vec<Vec<[f64; 2]>>,
    decay: Option<(f64, f64)>,
}

impl FourierCoefficients {
    pub fn new(comps: Vec<Vec<[f64; 2]>>) -> Result<Self> {
        if comps.is_empty() {
            return arg("coefficients need at least one component");
        }
        let n = comps[0].len();
        if comps.iter().any(|c| c.len() != n) {
            return arg("all components must share the same number of frequencies");
        }
        if comps.iter().flatten().flatten().any(|x| !x.is_finite()) {
            return arg("coefficients must be finite");
        }
        Ok(Self { comps, decay: None })
    }

    /// `x_k = c k^{-1/2-α}` on both the cosine and the sine of frequency `k`.
    pub fn decay(dim: usize, n_max: usize, c: f64, alpha: f64) -> Result<Self> {
        if dim == 0 {
            return arg("coefficients need at least one component");
        }
        let row: Vec<[f64; 2]> = (1..=n_max)
            .map(|k| {
                let x = c * (k as f64).powf(-0.5 - alpha);
                [x, x]
            })
            .collect();
        let mut out = Self::new(vec![row; dim])?;
        out.decay = Some((c, alpha));
        Ok(out)
    }

    pub fn zeros(dim: usize, n_max: usize) -> Result<Self> {
        Self::new(vec![vec![[0.0, 0.0]; n_max]; dim])
    }

    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    pub fn n_max(&self) -> usize {
        self.comps[0].len()
    }

    pub fn component(&self, i: usize) -> &[[f64; 2]] {
        &self.comps[i]
    }

    /// `(c, α)` when built by [`decay`](Self::decay).
    pub fn decay_params(&self) -> Option<(f64, f64)> {
        self.decay
    }

    /// Zeroes every frequency above `n`, keeping the layout.
    pub fn truncated(&self, n: usize) -> Self {
        if n >= self.n_max() {
            return self.clone();
        }
        let comps = self
            .comps
            .iter()
            .map(|c| c.iter().enumerate().map(|(k, v)| if k < n { *v } else { [0.0, 0.0] }).collect())
            .collect();
        Self { comps, decay: None }
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        if self.n_max() != other.n_max() {
            return arg(format!(
                "coefficient sets differ in length: {} vs {}",
                self.n_max(),
                other.n_max()
            ));
        }
        Ok(())
    }

    pub fn minus(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let comps = self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| [x[0] - y[0], x[1] - y[1]]).collect())
            .collect();
        Ok(Self { comps, decay: None })
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let comps = self
            .comps
            .iter()
            .map(|c| c.iter().map(|v| [v[0] * factor, v[1] * factor]).collect())
            .collect();
        Self { comps, decay: self.decay.map(|(c, a)| (c * factor, a)) }
    }

    /// `Var X^i(t) = Σ_k c_k^2 cos^2(kt) + s_k^2 sin^2(kt)`.
    pub fn variance(&self, i: usize, t: f64) -> f64 {
        self.comps[i]
            .iter()
            .enumerate()
            .map(|(k, [c, s])| {
                let (sn, cs) = ((k + 1) as f64 * t).sin_cos();
                c * c * cs * cs + s * s * sn * sn
            })
            .sum()
    }
}

/// Evaluates trigonometric sums `Σ_k a_k cos(kt) + b_k sin(kt)` on a grid,
/// through an FFT when the grid is the uniform grid of `[0, 2π]`.
#[derive(Clone)]
struct Synth {
    grid: TimeGrid,
    fft: Option<Arc<dyn Fft<f64>>>,
}

impl Synth {
    fn new(grid: &TimeGrid) -> Self {
        let full = grid.start() == 0.0 && (grid.end() - TAU).abs() <= 1e-12 * TAU && grid.is_uniform();
        let fft = full.then(|| FftPlanner::new().plan_fft_inverse(grid.segments()));
        Self { grid: grid.clone(), fft }
    }

    fn eval(&self, amps: &[[f64; 2]]) -> Vec<f64> {
        let ts = self.grid.points();
        match &self.fft {
            Some(fft) => {
                let m = self.grid.segments();
                let mut buf = vec![Complex::new(0.0, 0.0); m];
                for (k, [a, b]) in amps.iter().enumerate() {
                    buf[(k + 1) % m] += Complex::new(*a, -*b);
                }
                fft.process(&mut buf);
                let mut out: Vec<f64> = buf.iter().map(|c| c.re).collect();
                out.push(out[0]);
                out
            }
            None => ts
                .iter()
                .map(|&t| {
                    let step = Complex::from_polar(1.0, t);
                    let mut rot = step;
                    let mut acc = 0.0;
                    for (k, [a, b]) in amps.iter().enumerate() {
                        if k % 64 == 63 {
                            rot = Complex::from_polar(1.0, (k + 1) as f64 * t);
                        }
                        acc += a * rot.re + b * rot.im;
                        rot *= step;
                    }
                    acc
                })
                .collect(),
        }
    }
}

/// `X^i(t) = Σ_k x_{k,cos}^i γ_{k,cos}^i cos(kt) + x_{k,sin}^i γ_{k,sin}^i sin(kt)`
/// with i.i.d. standard normal `γ`, observed on a grid inside `[0, 2π]`.
///
/// Noise layout: component `i`, frequency `k`, slot `c` (0 cosine, 1 sine)
/// reads entry `2 (i n_max + k - 1) + c`. Truncation keeps `n_max`, so a
/// truncated model sees the same noise as its parent.
#[derive(Clone)]
pub struct FourierGaussianModel {
    coeffs: FourierCoefficients,
    synth: Synth,
}

impl fmt::Debug for FourierGaussianModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FourierGaussianModel")
            .field("coeffs", &self.coeffs)
            .field("grid", &self.synth.grid)
            .finish()
    }
}

impl FourierGaussianModel {
    pub fn new(coeffs: FourierCoefficients, grid: TimeGrid) -> Result<Self> {
        if grid.end() > TAU * (1.0 + 1e-12) {
            return Err(Error::Domain(format!("grid end {} lies beyond 2π", grid.end())));
        }
        Ok(Self { synth: Synth::new(&grid), coeffs })
    }

    /// The model on the uniform `m`-segment grid of `[0, 2π]`.
    pub fn on_circle(coeffs: FourierCoefficients, m: usize) -> Result<Self> {
        Self::new(coeffs, TimeGrid::uniform(TAU, m)?)
    }

    pub fn coefficients(&self) -> &FourierCoefficients {
        &self.coeffs
    }

    pub fn with_coefficients(&self, coeffs: FourierCoefficients) -> Result<Self> {
        if coeffs.dim() != self.coeffs.dim() {
            return Err(Error::DimensionMismatch { expected: self.coeffs.dim(), found: coeffs.dim() });
        }
        Ok(Self { coeffs, synth: self.synth.clone() })
    }

    pub fn noise_len(&self) -> usize {
        2 * self.coeffs.dim() * self.coeffs.n_max()
    }

    /// Basis function `cos(kt)` (`slot = 0`) or `sin(kt)` on the grid.
    pub fn basis_values(&self, k: usize, slot: usize) -> Vec<f64> {
        self.synth
            .grid
            .points()
            .iter()
            .map(|&t| if slot == 0 { (k as f64 * t).cos() } else { (k as f64 * t).sin() })
            .collect()
    }

    pub fn path_from_noise(&self, noise: &[f64]) -> Result<Path> {
        if noise.len() != self.noise_len() {
            return Err(Error::DimensionMismatch { expected: self.noise_len(), found: noise.len() });
        }
        let n = self.coeffs.n_max();
        let cols: Vec<Vec<f64>> = (0..self.coeffs.dim())
            .map(|i| {
                let g = &noise[2 * i * n..2 * (i + 1) * n];
                let amps: Vec<[f64; 2]> = self.coeffs.comps[i]
                    .iter()
                    .zip(g.chunks_exact(2))
                    .map(|([c, s], z)| [c * z[0], s * z[1]])
                    .collect();
                self.synth.eval(&amps)
            })
            .collect();
        columns_to_path(&self.synth.grid, &cols)
    }
}

fn columns_to_path(grid: &TimeGrid, cols: &[Vec<f64>]) -> Result<Path> {
    let d = cols.len();
    let mut values = vec![0.0; grid.len() * d];
    for (c, col) in cols.iter().enumerate() {
        for (j, v) in col.iter().enumerate() {
            values[j * d + c] = *v;
        }
    }
    Path::new(grid.clone(), d, values)
}

impl PathSampler for FourierGaussianModel {
    fn dim(&self) -> usize {
        self.coeffs.dim()
    }

    fn grid(&self) -> &TimeGrid {
        &self.synth.grid
    }

    fn sample(&self, seed: u64, index: u64) -> Result<Path> {
        self.path_from_noise(&standard_normals(seed, index, self.noise_len()))
    }
}

/// `X^N = E[X | γ_k, k <= N]`: the model with frequencies above `N` removed.
pub fn kl_truncation(model: &FourierGaussianModel, n: usize) -> FourierGaussianModel {
    FourierGaussianModel { coeffs: model.coeffs.truncated(n), synth: model.synth.clone() }
}

/// `(X, Y)` driven by the same noise draw.
pub fn coupled_pair(
    x: &FourierCoefficients,
    y: &FourierCoefficients,
    grid: &TimeGrid,
    seed: u64,
    index: u64,
) -> Result<(Path, Path)> {
    x.check_same_shape(y)?;
    let mx = FourierGaussianModel::new(x.clone(), grid.clone())?;
    let my = mx.with_coefficients(y.clone())?;
    let noise = standard_normals(seed, index, mx.noise_len());
    Ok((mx.path_from_noise(&noise)?, my.path_from_noise(&noise)?))
}

/// `max_i sup_k (|x_k^i| + |y_k^i|) k^{1/2+α}`, with the cosine and sine of a
/// frequency treated as separate basis elements.
pub fn ccyr_constant_upper(x: &FourierCoefficients, y: Option<&FourierCoefficients>, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0) {
        return arg(format!("alpha must be positive, got {alpha}"));
    }
    if let Some(y) = y {
        x.check_same_shape(y)?;
    }
    let mut best = 0.0f64;
    for i in 0..x.dim() {
        for k in 0..x.n_max() {
            let w = ((k + 1) as f64).powf(0.5 + alpha);
            for slot in 0..2 {
                let mut v = x.comps[i][k][slot].abs();
                if let Some(y) = y {
                    v += y.comps[i][k][slot].abs();
                }
                best = best.max(v * w);
            }
        }
    }
    Ok(best)
}

/// `max_i sup_k |x_k^i - y_k^i| k^{1/2+β}`.
pub fn fourier_distance_driver(x: &FourierCoefficients, y: &FourierCoefficients, beta: f64) -> Result<f64> {
    ccyr_constant_upper(&x.minus(y)?, None, beta)
}

/// A Cameron–Martin element `h^i = Σ_k x_k^i u_k^i e_k` with `||h||_H = ||u||_2`.
#[derive(Debug, Clone, PartialEq)]
pub struct CameronMartinElement {
    pub u: Vec<Vec<[f64; 2]>>,
    pub path: Path,
    pub norm: f64,
}

pub fn cm_element_path(
    coeffs: &FourierCoefficients,
    u: &[Vec<[f64; 2]>],
    grid: &TimeGrid,
) -> Result<CameronMartinElement> {
    let shape = FourierCoefficients::new(u.to_vec())?;
    coeffs.check_same_shape(&shape)?;
    let synth = Synth::new(grid);
    let cols: Vec<Vec<f64>> = (0..coeffs.dim())
        .map(|i| {
            let amps: Vec<[f64; 2]> = coeffs.comps[i]
                .iter()
                .zip(&u[i])
                .map(|(x, v)| [x[0] * v[0], x[1] * v[1]])
                .collect();
            synth.eval(&amps)
        })
        .collect();
    let norm = u.iter().flatten().flatten().map(|v| v * v).sum::<f64>().sqrt();
    Ok(CameronMartinElement { u: u.to_vec(), path: columns_to_path(grid, &cols)?, norm })
}

/// Outcome of an empirical cCYR scan.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct CcyrReport {
    /// `max_{u, (s,t)} ||h_u||_{q-var;[s,t]} / (t - s)^α` over unit `u`.
    pub k_lower: f64,
    /// `max_i sup_k |x_k^i| k^{1/2+α}`, which bounds the best constant up to
    /// the embedding constants.
    pub k_upper: f64,
    pub q: f64,
    pub alpha: f64,
    /// Whether `1/q + α > 1`.
    pub complementary: bool,
    pub best_pair: (f64, f64),
    pub directions: usize,
}

/// Lower bound on the cCYR constant from random unit directions in the
/// Cameron–Martin space. Directions live on the nonzero coefficients, which
/// span that space.
pub fn ccyr_empirical(
    coeffs: &FourierCoefficients,
    alpha: f64,
    q: f64,
    n_directions: usize,
    pairs: PairSet,
    grid: &TimeGrid,
    seed: u64,
) -> Result<CcyrReport> {
    if n_directions == 0 {
        return arg("need at least one direction");
    }
    if !(q >= 1.0) {
        return arg(format!("q-variation needs q >= 1, got {q}"));
    }
    let k_upper = ccyr_constant_upper(coeffs, None, alpha)?;
    let mut report = CcyrReport {
        k_lower: 0.0,
        k_upper,
        q,
        alpha,
        complementary: 1.0 / q + alpha > 1.0,
        best_pair: (grid.start(), grid.end()),
        directions: n_directions,
    };
    let support: Vec<(usize, usize, usize)> = (0..coeffs.dim())
        .flat_map(|i| (0..coeffs.n_max()).flat_map(move |k| (0..2).map(move |c| (i, k, c))))
        .filter(|&(i, k, c)| coeffs.comps[i][k][c] != 0.0)
        .collect();
    if support.is_empty() {
        return Ok(report);
    }
    let ts = grid.points();
    let m = grid.segments();
    for dir in 0..n_directions as u64 {
        let mut rng = RngSeed(seed).stream(dir);
        let mut g: Vec<f64> = (0..support.len()).map(|_| rng.sample(rand_distr::StandardNormal)).collect();
        let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        g.iter_mut().for_each(|v| *v /= norm);
        let mut u = vec![vec![[0.0, 0.0]; coeffs.n_max()]; coeffs.dim()];
        for (&(i, k, c), v) in support.iter().zip(&g) {
            u[i][k][c] = *v;
        }
        let h = cm_element_path(coeffs, &u, grid)?.path;
        let allowed: Option<std::collections::HashSet<(usize, usize)>> = match pairs {
            PairSet::AllGridPairs => None,
            PairSet::Dyadic => Some(pairs.pairs(m).into_iter().collect()),
        };
        let best = (0..m)
            .into_par_iter()
            .map(|i| -> Result<(f64, usize, usize)> {
                let prof = p_variation_profile(&h, q, i)?;
                let mut best = (0.0, i, i + 1);
                for j in i + 1..=m {
                    if allowed.as_ref().is_some_and(|a| !a.contains(&(i, j))) {
                        continue;
                    }
                    let r = prof[j].powf(1.0 / q) / (ts[j] - ts[i]).powf(alpha);
                    if r > best.0 {
                        best = (r, i, j);
                    }
                }
                Ok(best)
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold((0.0, 0, 0), |a, b| if b.0 > a.0 { b } else { a });
        if best.0 > report.k_lower {
            report.k_lower = best.0;
            report.best_pair = (ts[best.1], ts[best.2]);
        }
    }
    Ok(report)
}

/// Monte Carlo `sup_t E|X_t - Y_t|` over the grid, with the standard error at
/// the maximizing time.
pub fn expected_sup_distance(
    x: &FourierCoefficients,
    y: &FourierCoefficients,
    grid: &TimeGrid,
    samples: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    if samples < 100 {
        return arg(format!("expected sup distance needs at least 100 samples, got {samples}"));
    }
    let dists: Vec<Vec<f64>> = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let (a, b) = coupled_pair(x, y, grid, seed, i)?;
            Ok((0..a.len())
                .map(|j| {
                    a.point(j).iter().zip(b.point(j)).map(|(u, v)| (u - v) * (u - v)).sum::<f64>().sqrt()
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    let mut best = (0.0, 0.0);
    for j in 0..grid.len() {
        let col: Vec<f64> = dists.iter().map(|d| d[j]).collect();
        let (m, se) = mean_stderr(&col);
        if m > best.0 {
            best = (m, se);
        }
    }
    Ok(best)
}

/// `sup_t E|X_t - Y_t|` in closed form when the difference has the same
/// standard deviation `σ(t)` in every component: `E|Z| = σ √2 Γ((d+1)/2) / Γ(d/2)`.
pub fn expected_sup_distance_exact(
    x: &FourierCoefficients,
    y: &FourierCoefficients,
    grid: &TimeGrid,
) -> Result<f64> {
    let diff = x.minus(y)?;
    let d = diff.dim();
    // Γ((d+1)/2) / Γ(d/2) by the recursion r(d+1) = (d/2) / r(d).
    let mut ratio = 1.0 / std::f64::consts::PI.sqrt();
    for k in 1..d {
        ratio = (k as f64 / 2.0) / ratio;
    }
    let mut best = 0.0f64;
    for &t in grid.points() {
        let v0 = diff.variance(0, t);
        for i in 1..d {
            if (diff.variance(i, t) - v0).abs() > 1e-12 * v0.max(1e-300) {
                return Err(Error::Unsupported(
                    "closed-form sup distance needs equal component variances".into(),
                ));
            }
        }
        best = best.max(v0.sqrt() * std::f64::consts::SQRT_2 * ratio);
    }
    Ok(best)
}
