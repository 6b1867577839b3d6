use crate::error::{arg, Error, Result};
use crate::paths::Path;
use crate::signature::{max_over_pairs_joint, PairSet, SignatureTensor, MAX_LEVEL};

/// Parameters of `|||x|||_{α,n}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolderNormParams {
    pub alpha: f64,
    pub level: usize,
    pub pairs: PairSet,
}

impl HolderNormParams {
    pub fn new(alpha: f64, level: usize, pairs: PairSet) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return arg(format!("alpha must lie in (0, 1], got {alpha}"));
        }
        if level == 0 || level > MAX_LEVEL {
            return arg(format!("level must lie in 1..={MAX_LEVEL}, got {level}"));
        }
        Ok(Self { alpha, level, pairs })
    }
}

/// Parameters of `ρ_{β,α,n}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InhomDistanceParams {
    pub beta: f64,
    pub alpha: f64,
    pub level: usize,
    pub pairs: PairSet,
}

impl InhomDistanceParams {
    pub fn new(beta: f64, alpha: f64, level: usize, pairs: PairSet) -> Result<Self> {
        if !(beta > 0.0 && beta <= alpha && alpha <= 1.0) {
            return arg(format!("need 0 < beta <= alpha <= 1, got beta = {beta}, alpha = {alpha}"));
        }
        if level == 0 || level > MAX_LEVEL {
            return arg(format!("level must lie in 1..={MAX_LEVEL}, got {level}"));
        }
        Ok(Self { beta, alpha, level, pairs })
    }
}

/// Largest `n` with `β + (n - 1)α <= 1`.
pub fn n_beta_alpha(beta: f64, alpha: f64) -> Result<usize> {
    if !(beta > 0.0) || beta > alpha {
        return arg(format!("need 0 < beta <= alpha, got beta = {beta}, alpha = {alpha}"));
    }
    // Slack keeps exact decimal boundaries such as 0.2 + 2 * 0.4 = 1 inside.
    let n = ((1.0 - beta) / alpha + 1e-9).floor() as usize + 1;
    Ok(n.max(1))
}

/// `(t_j - t_i)^{e_k}` for a few exponents, tabulated by index offset on
/// uniform grids.
pub(crate) struct PairPowers<'a> {
    times: &'a [f64],
    exps: Vec<f64>,
    table: Option<Vec<Vec<f64>>>,
}

impl<'a> PairPowers<'a> {
    pub(crate) fn new(path: &'a Path, exps: Vec<f64>) -> Self {
        let grid = path.grid();
        let table = grid.is_uniform().then(|| {
            let h = grid.horizon() / grid.segments() as f64;
            exps.iter()
                .map(|&e| (0..=grid.segments()).map(|o| (o as f64 * h).powf(e)).collect())
                .collect()
        });
        Self { times: grid.points(), exps, table }
    }

    #[inline]
    pub(crate) fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        match &self.table {
            Some(t) => t[k][j - i],
            None => (self.times[j] - self.times[i]).powf(self.exps[k]),
        }
    }
}

/// `sup_{pairs} sup_{1 <= |w| <= n} |<S(x)_{s,t}, w>| / (t - s)^{|w| α}`.
///
/// The empty word is left out, so constant paths have norm zero.
pub fn holder_signature_norm(x: &Path, params: &HolderNormParams) -> Result<f64> {
    let n = params.level;
    let powers = PairPowers::new(x, (1..=n).map(|k| k as f64 * params.alpha).collect());
    Ok(max_over_pairs_joint(x, None, n, params.pairs, |i, j, s, _| {
        level_sup(s, None, n, |k| powers.get(k - 1, i, j))
    }))
}

fn level_sup(
    a: &SignatureTensor,
    b: Option<&SignatureTensor>,
    n: usize,
    weight: impl Fn(usize) -> f64,
) -> f64 {
    let mut best = 0.0f64;
    for k in 1..=n {
        let la = a.level_slice(k);
        let top = match b {
            Some(b) => la
                .iter()
                .zip(b.level_slice(k))
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max),
            None => la.iter().map(|x| x.abs()).fold(0.0, f64::max),
        };
        if top > 0.0 {
            best = best.max(top / weight(k));
        }
    }
    best
}

fn common_grid(x: &Path, y: &Path) -> Result<(Path, Path)> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch { expected: x.dim(), found: y.dim() });
    }
    if x.grid() == y.grid() {
        return Ok((x.clone(), y.clone()));
    }
    let grid = x.grid().union(y.grid());
    Ok((x.pl_interpolate(&grid)?, y.pl_interpolate(&grid)?))
}

/// `ρ_{β,α,n}[x, y] = sup_{pairs} sup_{|w| <= n} |<S(x)_{s,t} - S(y)_{s,t}, w>| /
/// (t - s)^{β + α(|w| - 1)}`.
///
/// Paths on different grids are first refined onto the union grid, which
/// leaves both piecewise-linear paths unchanged.
pub fn inhom_distance(x: &Path, y: &Path, params: &InhomDistanceParams) -> Result<f64> {
    let (x, y) = common_grid(x, y)?;
    let n = params.level;
    let exps = (1..=n)
        .map(|k| params.beta + params.alpha * (k as f64 - 1.0))
        .collect();
    let powers = PairPowers::new(&x, exps);
    Ok(max_over_pairs_joint(&x, Some(&y), n, params.pairs, |i, j, a, b| {
        level_sup(a, b, n, |k| powers.get(k - 1, i, j))
    }))
}

/// Both sides of the Lyons extension estimate for a pair of paths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LyonsCheck {
    /// `ρ_{β,α,n}[x, y]`.
    pub lhs: f64,
    /// `(1 + |||x|||_{α,n-N} + |||y|||_{α,n-N}) ρ_{β,α,N}[x, y]` with `N = N_{β,α}`.
    pub rhs_factor: f64,
    pub n_beta_alpha: usize,
}

impl LyonsCheck {
    /// Empirical constant `lhs / rhs_factor`; zero when both sides vanish.
    pub fn ratio(&self) -> f64 {
        if self.rhs_factor == 0.0 {
            if self.lhs == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            self.lhs / self.rhs_factor
        }
    }
}

pub fn lyons_extension_check(
    x: &Path,
    y: &Path,
    beta: f64,
    alpha: f64,
    level: usize,
    pairs: PairSet,
) -> Result<LyonsCheck> {
    let nb = n_beta_alpha(beta, alpha)?;
    if level < nb {
        return arg(format!("level {level} is below N_(beta,alpha) = {nb}"));
    }
    let (x, y) = common_grid(x, y)?;
    let lhs = inhom_distance(&x, &y, &InhomDistanceParams::new(beta, alpha, level, pairs)?)?;
    let base = inhom_distance(&x, &y, &InhomDistanceParams::new(beta, alpha, nb, pairs)?)?;
    let extra = level - nb;
    let norms = if extra == 0 {
        0.0
    } else {
        let p = HolderNormParams::new(alpha, extra, pairs)?;
        holder_signature_norm(&x, &p)? + holder_signature_norm(&y, &p)?
    };
    Ok(LyonsCheck { lhs, rhs_factor: (1.0 + norms) * base, n_beta_alpha: nb })
}
