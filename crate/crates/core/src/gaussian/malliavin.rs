use rayon::prelude::*;

use super::fourier::FourierGaussianModel;
use super::rng::standard_normals;
use crate::error::{arg, Error, Result};
use crate::paths::Path;
use crate::signature::signature_coefficient;
use crate::stats::{mean_stderr, variance_stderr};
use crate::words::Word;

/// Longest word whose Malliavin gradient is supported.
pub const MAX_GRADIENT_WORD: usize = 3;

fn check_word(model: &FourierGaussianModel, w: &Word) -> Result<()> {
    if w.is_empty() {
        return arg("the empty word is constant");
    }
    if w.len() > MAX_GRADIENT_WORD {
        return Err(Error::Unsupported(format!(
            "Malliavin gradients are implemented for words of length <= {MAX_GRADIENT_WORD}, got {w}"
        )));
    }
    w.check_alphabet(model.coefficients().dim())
}

/// `∂F/∂γ` for `F = <S(X)_{s,t}, w>` at a noise draw, in the model's noise
/// layout.
///
/// `F` is multilinear in the increments of `X`, so the derivative along a
/// basis direction `x_k e_k` is the sum over positions `j` of the mixed
/// integral with the `j`-th increment replaced. For a piecewise-linear path
/// the replaced increment sits in one segment `a`; collecting the prefix
/// integrals before `a`, the suffix integrals after `a` and the block of
/// letters sharing segment `a` gives a weight `G_j(a)`, and the derivative is
/// `x_k Σ_a Δe_k(a) Σ_{j: w_j = i} G_j(a)`.
pub fn malliavin_gradient(
    model: &FourierGaussianModel,
    w: &Word,
    s: f64,
    t: f64,
    noise: &[f64],
) -> Result<Vec<f64>> {
    check_word(model, w)?;
    let coeffs = model.coefficients();
    let n_max = coeffs.n_max();
    let mut grad = vec![0.0; model.noise_len()];
    if s > t {
        return arg(format!("need s <= t, got s = {s}, t = {t}"));
    }
    let x = model.path_from_noise(noise)?;
    if s == t {
        return Ok(grad);
    }
    let piece = x.restrict(s, t)?;
    let weights = segment_weights(&piece, w);
    // Summation by parts: Σ_a Δe(a) G(a) = Σ_b e(τ_b) (G(b-1) - G(b)).
    let n = piece.segments();
    let node_w: Vec<Vec<f64>> = weights
        .iter()
        .map(|g| {
            (0..=n)
                .map(|b| {
                    let left = if b > 0 { g[b - 1] } else { 0.0 };
                    let right = if b < n { g[b] } else { 0.0 };
                    left - right
                })
                .collect()
        })
        .collect();
    let interp = Interp::new(&x, piece.times());
    for (i, nw) in node_w.iter().enumerate() {
        if nw.iter().all(|&v| v == 0.0) {
            continue;
        }
        for k in 0..n_max {
            for slot in 0..2 {
                let xk = coeffs.component(i)[k][slot];
                if xk == 0.0 {
                    continue;
                }
                let freq = (k + 1) as f64;
                let e = |tt: f64| if slot == 0 { (freq * tt).cos() } else { (freq * tt).sin() };
                let sum: f64 = nw.iter().enumerate().map(|(b, v)| v * interp.eval(b, &e)).sum();
                grad[2 * (i * n_max + k) + slot] = xk * sum;
            }
        }
    }
    Ok(grad)
}

/// `||DF||_H^2 = Σ (∂F/∂γ)^2`.
pub fn malliavin_grad_sq(model: &FourierGaussianModel, w: &Word, s: f64, t: f64, noise: &[f64]) -> Result<f64> {
    Ok(malliavin_gradient(model, w, s, t, noise)?.iter().map(|g| g * g).sum())
}

/// Evaluates the piecewise-linear interpolant of a basis function at the
/// nodes of a restricted path.
struct Interp {
    /// `(t_a, t_{a+1}, λ)` per node.
    cells: Vec<(f64, f64, f64)>,
}

impl Interp {
    fn new(x: &Path, nodes: &[f64]) -> Self {
        let ts = x.times();
        let cells = nodes
            .iter()
            .map(|&tau| {
                let a = x.grid().locate(tau);
                let lam = ((tau - ts[a]) / (ts[a + 1] - ts[a])).clamp(0.0, 1.0);
                (ts[a], ts[a + 1], lam)
            })
            .collect();
        Self { cells }
    }

    fn eval(&self, b: usize, e: &impl Fn(f64) -> f64) -> f64 {
        let (t0, t1, lam) = self.cells[b];
        if lam == 0.0 {
            e(t0)
        } else if lam == 1.0 {
            e(t1)
        } else {
            (1.0 - lam) * e(t0) + lam * e(t1)
        }
    }
}

/// `Σ_{j: w_j = i} G_j(a)` for every component `i` and segment `a`.
fn segment_weights(piece: &Path, w: &Word) -> Vec<Vec<f64>> {
    let d = piece.dim();
    let n = piece.segments();
    let k = w.len();
    let ch: Vec<usize> = w.letters().iter().map(|&l| l as usize - 1).collect();
    let inc = piece.increments();
    let seg = |a: usize| &inc[a * d..(a + 1) * d];
    let fact = [1.0, 1.0, 2.0, 6.0, 24.0, 120.0];

    // pre[a][l]: integral of w_1..w_l over segments before a.
    let mut pre = vec![vec![0.0; k + 1]; n + 1];
    pre[0][0] = 1.0;
    for a in 0..n {
        let v = seg(a);
        let mut next = pre[a].clone();
        for l in 1..=k {
            let mut prod = 1.0;
            for m in (0..l).rev() {
                prod *= v[ch[m]];
                next[l] += pre[a][m] * prod / fact[l - m];
            }
        }
        pre[a + 1] = next;
    }
    // suf[a][r]: integral of w_{r+1}..w_k (zero-based r) over segments from a on.
    let mut suf = vec![vec![0.0; k + 1]; n + 1];
    suf[n][k] = 1.0;
    for a in (0..n).rev() {
        let v = seg(a);
        let mut cur = suf[a + 1].clone();
        for r in 0..k {
            let mut prod = 1.0;
            for m in r..k {
                prod *= v[ch[m]];
                cur[r] += prod / fact[m - r + 1] * suf[a + 1][m + 1];
            }
        }
        suf[a] = cur;
    }
    let mut out = vec![vec![0.0; n]; d];
    for a in 0..n {
        let v = seg(a);
        for j in 0..k {
            let mut g = 0.0;
            // Block of zero-based positions l..=r inside segment a containing j.
            for l in 0..=j {
                for r in j..k {
                    let mut prod = 1.0;
                    for p in l..=r {
                        if p != j {
                            prod *= v[ch[p]];
                        }
                    }
                    g += pre[a][l] * prod / fact[r - l + 1] * suf[a + 1][r + 1];
                }
            }
            out[ch[j]][a] += g;
        }
    }
    out
}

/// Monte Carlo sides of `Var[F] <= E||DF||_H^2`.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct PoincareReport {
    pub word: String,
    pub s: f64,
    pub t: f64,
    pub samples: usize,
    pub variance: f64,
    pub variance_stderr: f64,
    pub grad_sq_mean: f64,
    pub grad_sq_stderr: f64,
    /// Standard error of `Var[F] - E||DF||^2`, from the paired samples.
    pub difference_stderr: f64,
    /// `Var[F] <= E||DF||^2 + 3 · difference_stderr`.
    pub holds: bool,
}

fn functional_draws(
    model: &FourierGaussianModel,
    w: &Word,
    s: f64,
    t: f64,
    samples: usize,
    seed: u64,
    with_grad: bool,
) -> Result<Vec<(f64, f64)>> {
    check_word(model, w)?;
    (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let noise = standard_normals(seed, i, model.noise_len());
            let x = model.path_from_noise(&noise)?;
            let f = signature_coefficient(&x, w, s, t)?;
            let g = if with_grad { malliavin_grad_sq(model, w, s, t, &noise)? } else { 0.0 };
            Ok((f, g))
        })
        .collect()
}

pub fn poincare_check(
    model: &FourierGaussianModel,
    w: &Word,
    s: f64,
    t: f64,
    samples: usize,
    seed: u64,
) -> Result<PoincareReport> {
    if samples < 1000 {
        return arg(format!("Poincaré check needs at least 1000 samples, got {samples}"));
    }
    let draws = functional_draws(model, w, s, t, samples, seed, true)?;
    let fs: Vec<f64> = draws.iter().map(|d| d.0).collect();
    let gs: Vec<f64> = draws.iter().map(|d| d.1).collect();
    let (variance, var_se) = variance_stderr(&fs);
    let (grad_mean, grad_se) = mean_stderr(&gs);
    let fbar = fs.iter().sum::<f64>() / fs.len() as f64;
    let diffs: Vec<f64> = fs.iter().zip(&gs).map(|(f, g)| (f - fbar).powi(2) - g).collect();
    let (_, diff_se) = mean_stderr(&diffs);
    Ok(PoincareReport {
        word: w.to_string(),
        s,
        t,
        samples,
        variance,
        variance_stderr: var_se,
        grad_sq_mean: grad_mean,
        grad_sq_stderr: grad_se,
        difference_stderr: diff_se,
        holds: variance <= grad_mean + 3.0 * diff_se,
    })
}

/// Monte Carlo `||F||_{L^q} / ||F||_{L^p}` for `F = <S(X)_{s,t}, w>`; `1` when
/// `F` vanishes.
#[allow(clippy::too_many_arguments)]
pub fn hypercontractivity_ratio(
    model: &FourierGaussianModel,
    w: &Word,
    s: f64,
    t: f64,
    p: f64,
    q: f64,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    if !(p >= 1.0 && p < q) {
        return arg(format!("need 1 <= p < q, got p = {p}, q = {q}"));
    }
    let draws = functional_draws(model, w, s, t, samples, seed, false)?;
    let norm = |r: f64| (draws.iter().map(|d| d.0.abs().powf(r)).sum::<f64>() / draws.len() as f64).powf(1.0 / r);
    let lp = norm(p);
    if lp == 0.0 {
        return Ok(1.0);
    }
    Ok(norm(q) / lp)
}
