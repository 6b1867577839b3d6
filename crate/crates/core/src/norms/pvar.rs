use crate::error::{arg, Result};
use crate::paths::Path;

/// How increments are measured inside a p-variation sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum VariationNorm {
    /// Euclidean norm of the vector increment.
    #[default]
    Euclidean,
    /// Absolute increment of one (zero-based) component.
    Component(usize),
}

impl VariationNorm {
    fn measure(&self, a: &[f64], b: &[f64]) -> f64 {
        match *self {
            VariationNorm::Euclidean => a
                .iter()
                .zip(b)
                .map(|(x, y)| (y - x) * (y - x))
                .sum::<f64>()
                .sqrt(),
            VariationNorm::Component(c) => (b[c] - a[c]).abs(),
        }
    }
}

/// `||x||_{p-var;[s,t]}` with Euclidean increments.
pub fn p_variation(x: &Path, p: f64, s: f64, t: f64) -> Result<f64> {
    p_variation_with(x, p, s, t, VariationNorm::Euclidean)
}

/// Exact p-variation over `[s, t]` by dynamic programming on grid points.
///
/// For a piecewise-linear path and `p >= 1` an optimal partition only uses
/// grid points (and the endpoints), so the `O(m^2)` recursion
/// `best[j] = max_{i<j} best[i] + |x_j - x_i|^p` is exact.
pub fn p_variation_with(x: &Path, p: f64, s: f64, t: f64, norm: VariationNorm) -> Result<f64> {
    if !(p >= 1.0) {
        return arg(format!("p-variation needs p >= 1, got {p}"));
    }
    if let VariationNorm::Component(c) = norm {
        if c >= x.dim() {
            return arg(format!("component {c} out of range for a {}-d path", x.dim()));
        }
    }
    if s == t {
        return Ok(0.0);
    }
    let piece = x.restrict(s, t)?;
    let sums = profile(&piece, p, 0, norm);
    Ok(sums[piece.segments()].powf(1.0 / p))
}

/// `||x||^p_{p-var;[t_start, t_j]}` for every grid index `j >= start`
/// (entries before `start` are zero). One DP pass yields all right endpoints.
pub fn p_variation_profile(x: &Path, p: f64, start: usize) -> Result<Vec<f64>> {
    if !(p >= 1.0) {
        return arg(format!("p-variation needs p >= 1, got {p}"));
    }
    Ok(profile(x, p, start, VariationNorm::Euclidean))
}

fn profile(x: &Path, p: f64, start: usize, norm: VariationNorm) -> Vec<f64> {
    let n = x.len();
    let mut best = vec![0.0; n];
    for j in start + 1..n {
        let xj = x.point(j);
        let mut b = 0.0f64;
        for i in start..j {
            let inc = norm.measure(x.point(i), xj);
            let cand = best[i] + if p == 1.0 { inc } else { inc.powf(p) };
            if cand > b {
                b = cand;
            }
        }
        best[j] = b;
    }
    best
}
