use rayon::prelude::*;

use crate::error::{arg, Result};
use crate::paths::Path;
use crate::quadrature::GaussRule;

use super::pvar::p_variation;

/// Smoothness `δ` and integrability `p` of `B^δ_p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesovParams {
    pub delta: f64,
    pub p: f64,
}

impl BesovParams {
    pub fn new(delta: f64, p: f64) -> Result<Self> {
        if !(delta > 0.0 && delta < 1.0) {
            return arg(format!("Besov smoothness must lie in (0, 1), got {delta}"));
        }
        if !(p >= 1.0) || !p.is_finite() {
            return arg(format!("Besov integrability must be a finite p >= 1, got {p}"));
        }
        Ok(Self { delta, p })
    }
}

/// A seminorm value with the gap to a lower-order evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesovEstimate {
    pub value: f64,
    pub error: f64,
}

/// `||f||_{B^δ_p([0,T])}` for a piecewise-linear `f`.
pub fn besov_seminorm(f: &Path, params: &BesovParams) -> Result<BesovEstimate> {
    let g = f.grid();
    besov_seminorm_on(f, params, g.start(), g.end())
}

/// `(∫∫_{s <= u < v <= t} |f_v - f_u|^p / (v - u)^{pδ + 1} du dv)^{1/p}`.
///
/// The square `[s, t]^2` is cut into grid-cell pairs. Diagonal cells are
/// integrated in closed form. Neighbouring cells are integrated in polar
/// coordinates around their shared corner, where the radial integral is exact
/// and the angular one is split at its kinks and done by Gauss–Legendre. All
/// other cell pairs carry a smooth integrand and use tensor Gauss–Legendre
/// rules whose order drops with the distance between the cells. The reported
/// error is the change when every rule gains two nodes.
pub fn besov_seminorm_on(f: &Path, params: &BesovParams, s: f64, t: f64) -> Result<BesovEstimate> {
    if s == t {
        return Ok(BesovEstimate { value: 0.0, error: 0.0 });
    }
    let piece = f.restrict(s, t)?;
    let hi = besov_integral(&piece, params.delta, params.p, 2);
    let lo = besov_integral(&piece, params.delta, params.p, 0);
    let value = hi.powf(1.0 / params.p);
    Ok(BesovEstimate { value, error: (value - lo.powf(1.0 / params.p)).abs() })
}

/// `||f||^p_{B^δ_p([s,t])}` with the higher-order rules.
pub(crate) fn besov_integral_on(f: &Path, delta: f64, p: f64, s: f64, t: f64) -> Result<f64> {
    if s >= t {
        return Ok(0.0);
    }
    Ok(besov_integral(&f.restrict(s, t)?, delta, p, 2))
}

struct Cells {
    dim: usize,
    widths: Vec<f64>,
    slopes: Vec<f64>,
}

impl Cells {
    fn new(f: &Path) -> Self {
        let d = f.dim();
        let widths: Vec<f64> = f.times().windows(2).map(|w| w[1] - w[0]).collect();
        let mut slopes = f.increments();
        for (row, h) in slopes.chunks_mut(d).zip(&widths) {
            row.iter_mut().for_each(|v| *v /= h);
        }
        Self { dim: d, widths, slopes }
    }

    fn slope(&self, i: usize) -> &[f64] {
        &self.slopes[i * self.dim..(i + 1) * self.dim]
    }
}

/// Gauss order for a cell pair whose larger side is `ratio` times their gap.
fn far_order(ratio: f64) -> usize {
    if ratio <= 0.125 {
        2
    } else if ratio <= 1.0 / 3.0 {
        4
    } else {
        6
    }
}

struct FarRules {
    rules: [GaussRule; 3],
}

impl FarRules {
    fn new(boost: usize) -> Self {
        Self { rules: [2, 4, 6].map(|o| GaussRule::new(o + boost)) }
    }

    fn for_ratio(&self, ratio: f64) -> &GaussRule {
        &self.rules[far_order(ratio) / 2 - 1]
    }
}

/// Integral over `[ua, ub] x [wa, wb]` inside cells `i < j`, `ub < wa`.
/// Rectangles larger than their gap are halved first.
#[allow(clippy::too_many_arguments)]
fn far_rect(
    f: &Path,
    cells: &Cells,
    rules: &FarRules,
    (i, ua, ub): (usize, f64, f64),
    (j, wa, wb): (usize, f64, f64),
    p: f64,
    e: f64,
    buf: &mut Vec<f64>,
) -> f64 {
    let gap = wa - ub;
    let (lu, lw) = (ub - ua, wb - wa);
    if lu.max(lw) > gap {
        if lu >= lw {
            let mid = 0.5 * (ua + ub);
            return far_rect(f, cells, rules, (i, ua, mid), (j, wa, wb), p, e, buf)
                + far_rect(f, cells, rules, (i, mid, ub), (j, wa, wb), p, e, buf);
        }
        let mid = 0.5 * (wa + wb);
        return far_rect(f, cells, rules, (i, ua, ub), (j, wa, mid), p, e, buf)
            + far_rect(f, cells, rules, (i, ua, ub), (j, mid, wb), p, e, buf);
    }
    let rule = rules.for_ratio(lu.max(lw) / gap);
    let d = cells.dim;
    let (ti, tj) = (f.times()[i], f.times()[j]);
    let (fi, fj) = (f.point(i), f.point(j));
    let (vi, vj) = (cells.slope(i), cells.slope(j));
    buf.resize(d, 0.0);
    let mut acc = 0.0;
    for (u, wu) in rule.on(ua, ub) {
        for c in 0..d {
            buf[c] = fi[c] + (u - ti) * vi[c];
        }
        for (w, ww) in rule.on(wa, wb) {
            let mut n2 = 0.0;
            for c in 0..d {
                let diff = fj[c] + (w - tj) * vj[c] - buf[c];
                n2 += diff * diff;
            }
            if n2 == 0.0 {
                continue;
            }
            let num = if p == 2.0 { n2 } else { n2.powf(0.5 * p) };
            acc += wu * ww * num / (w - u).powf(e);
        }
    }
    acc
}

fn besov_integral(f: &Path, delta: f64, p: f64, boost: usize) -> f64 {
    let cells = Cells::new(f);
    let m = f.segments();
    let a = p * (1.0 - delta);
    let e = p * delta + 1.0;

    let diag: f64 = (0..m)
        .map(|i| norm_pow(cells.slope(i), p) * cells.widths[i].powf(a + 1.0) / (a * (a + 1.0)))
        .sum();

    let rule = GaussRule::new(8 + boost);
    let adjacent: f64 = (0..m.saturating_sub(1))
        .map(|i| adjacent_cells(&cells, i, a, p, &rule))
        .sum();

    let rules = FarRules::new(boost);
    let ts = f.times();
    let rows: Vec<f64> = (0..m.saturating_sub(2))
        .into_par_iter()
        .map(|i| {
            let mut buf = Vec::new();
            (i + 2..m)
                .map(|j| {
                    far_rect(f, &cells, &rules, (i, ts[i], ts[i + 1]), (j, ts[j], ts[j + 1]), p, e, &mut buf)
                })
                .sum::<f64>()
        })
        .collect();
    diag + adjacent + rows.iter().sum::<f64>()
}

fn norm_pow(v: &[f64], p: f64) -> f64 {
    let n2: f64 = v.iter().map(|x| x * x).sum();
    if p == 2.0 {
        n2
    } else {
        n2.powf(0.5 * p)
    }
}

/// Cells `i` and `i + 1`. With `x = t_{i+1} - u`, `y = v - t_{i+1}`,
/// `r = x + y`, `θ = x / r` the integrand is `r^a |θ v_i + (1-θ) v_{i+1}|^p`
/// on `r <= R(θ) = min(h_i / θ, h_{i+1} / (1 - θ))`.
fn adjacent_cells(cells: &Cells, i: usize, a: f64, p: f64, rule: &GaussRule) -> f64 {
    let (hi, hj) = (cells.widths[i], cells.widths[i + 1]);
    let (vi, vj) = (cells.slope(i), cells.slope(i + 1));
    let g = |theta: f64| -> f64 {
        let n2: f64 = vi
            .iter()
            .zip(vj)
            .map(|(x, y)| {
                let c = theta * x + (1.0 - theta) * y;
                c * c
            })
            .sum();
        if p == 2.0 {
            n2
        } else {
            n2.powf(0.5 * p)
        }
    };
    let radial = |theta: f64| -> f64 {
        let r = if theta * hj <= (1.0 - theta) * hi {
            hj / (1.0 - theta)
        } else {
            hi / theta
        };
        r.powf(a + 1.0) / (a + 1.0)
    };
    let kink = hi / (hi + hj);
    let mut cuts = vec![0.0, 1.0, kink];
    // Minimum of |θ v_i + (1-θ) v_j|, a kink in 1-D.
    let dv: Vec<f64> = vi.iter().zip(vj).map(|(x, y)| x - y).collect();
    let dd: f64 = dv.iter().map(|x| x * x).sum();
    let mut dip = None;
    if dd > 0.0 {
        let th = -vj.iter().zip(&dv).map(|(y, z)| y * z).sum::<f64>() / dd;
        if th > 0.0 && th < 1.0 {
            cuts.push(th);
            dip = Some(th);
        }
    }
    cuts.sort_by(f64::total_cmp);
    let mut total = 0.0;
    for w in cuts.windows(2).filter(|w| w[1] > w[0]) {
        // R(θ) blows up at θ = 1 left of the kink and at θ = 0 right of it;
        // panels shrink geometrically towards those ends and towards the dip.
        let pole = if w[1] <= kink { 1.0 } else { 0.0 };
        for (lo, hi) in graded(w[0], w[1], pole, dip) {
            total += rule.integrate(lo, hi, |th| g(th) * radial(th));
        }
    }
    total
}

/// Splits `[lo, hi]` so each panel is no longer than its distance to `pole`,
/// with a few extra halvings towards `dip` when it is an endpoint.
fn graded(lo: f64, hi: f64, pole: f64, dip: Option<f64>) -> Vec<(f64, f64)> {
    let mut panels = Vec::new();
    if pole >= hi {
        let mut a = lo;
        while pole - hi < hi - a && panels.len() < 60 {
            let b = 0.5 * (a + pole);
            if b >= hi {
                break;
            }
            panels.push((a, b));
            a = b;
        }
        panels.push((a, hi));
    } else {
        let mut b = hi;
        while lo - pole < b - lo && panels.len() < 60 {
            let a = 0.5 * (b + pole);
            if a <= lo {
                break;
            }
            panels.push((a, b));
            b = a;
        }
        panels.push((lo, b));
        panels.reverse();
    }
    let Some(dip) = dip else { return panels };
    let mut out = Vec::with_capacity(panels.len() + 16);
    for (a, b) in panels {
        if a == dip || b == dip {
            let mut parts = vec![(a, b)];
            for _ in 0..8 {
                let (x, y) = if a == dip { parts.remove(0) } else { parts.pop().unwrap() };
                let mid = 0.5 * (x + y);
                if a == dip {
                    parts.insert(0, (mid, y));
                    parts.insert(0, (x, mid));
                } else {
                    parts.push((x, mid));
                    parts.push((mid, y));
                }
            }
            out.extend(parts);
        } else {
            out.push((a, b));
        }
    }
    out
}

/// `(Σ_k (c_k^2 + s_k^2) k^{2α})^{1/2}` for per-frequency (cosine, sine)
/// coefficients, `coeffs[k - 1]` holding frequency `k`.
pub fn fourier_sobolev_norm(coeffs: &[[f64; 2]], alpha: f64) -> f64 {
    coeffs
        .iter()
        .enumerate()
        .map(|(i, [c, s])| (c * c + s * s) * ((i + 1) as f64).powf(2.0 * alpha))
        .sum::<f64>()
        .sqrt()
}

/// `||f||_{(1/p+α)^{-1}-var;[s,t]} / ((t-s)^α ||f||_{B^{1/p+α}_p([s,t])})`,
/// zero when the denominator vanishes.
pub fn variation_embedding_ratio(f: &Path, alpha: f64, p: f64, s: f64, t: f64) -> Result<f64> {
    let delta = 1.0 / p + alpha;
    if !(alpha > 0.0) || !(p >= 1.0) || delta >= 1.0 {
        return arg(format!("need alpha > 0, p >= 1 and alpha + 1/p < 1, got alpha = {alpha}, p = {p}"));
    }
    if !(s < t) {
        return arg(format!("need s < t, got s = {s}, t = {t}"));
    }
    let besov = besov_seminorm_on(f, &BesovParams::new(delta, p)?, s, t)?.value;
    let denom = (t - s).powf(alpha) * besov;
    if denom == 0.0 {
        return Ok(0.0);
    }
    Ok(p_variation(f, 1.0 / delta, s, t)? / denom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::paths::TimeGrid;

    #[test]
    fn params_validation() {
        assert!(BesovParams::new(1.0, 2.0).is_err());
        assert!(BesovParams::new(0.0, 2.0).is_err());
        assert!(BesovParams::new(0.5, 0.5).is_err());
        assert!(BesovParams::new(0.5, 1.0).is_ok());
    }

    #[test]
    fn constant_path_vanishes() {
        let grid = TimeGrid::uniform(1.0, 7).unwrap();
        let c = Path::constant(grid, &[3.0, -1.0]).unwrap();
        let b = besov_seminorm(&c, &BesovParams::new(0.4, 2.0).unwrap()).unwrap();
        assert_eq!(b.value, 0.0);
    }

    #[test]
    fn identity_function_closed_form() {
        // ∫∫_{s<t} (t-s)^{2-2δ-1} = 1/((2-2δ)(3-2δ)) on [0, 1].
        for m in [1, 2, 5, 16] {
            let grid = TimeGrid::uniform(1.0, m).unwrap();
            let f = Path::from_fn(grid, 1, |t| vec![t]).unwrap();
            let b = besov_seminorm(&f, &BesovParams::new(0.25, 2.0).unwrap()).unwrap();
            let exact = (1.0f64 / (1.5 * 2.5)).sqrt();
            assert!((b.value - exact).abs() < 1e-9 * exact, "m = {m}: {}", b.value);
        }
    }

    #[test]
    fn linear_path_any_p() {
        // |f_t - f_s|^p / (t-s)^{pδ+1} = |v|^p (t-s)^{a-1} with a = p(1-δ).
        let (v, p, delta) = (1.7f64, 3.0, 0.6);
        let a = p * (1.0 - delta);
        let grid = TimeGrid::new(vec![0.0, 0.1, 0.45, 0.5, 1.0]).unwrap();
        let f = Path::from_fn(grid, 1, |t| vec![v * t]).unwrap();
        let b = besov_seminorm(&f, &BesovParams::new(delta, p).unwrap()).unwrap();
        let exact = (v.powf(p) / (a * (a + 1.0))).powf(1.0 / p);
        assert!((b.value - exact).abs() < 1e-8 * exact, "{b:?} vs {exact}");
    }

    #[test]
    fn zigzag_error_estimate_is_small() {
        let grid = TimeGrid::uniform(1.0, 24).unwrap();
        let f = Path::from_fn(grid, 2, |t| vec![(17.0 * t).sin(), (11.0 * t).cos()]).unwrap();
        let b = besov_seminorm(&f, &BesovParams::new(0.7, 2.0).unwrap()).unwrap();
        assert!(b.error < 1e-5 * b.value, "{b:?}");
    }

    #[test]
    fn fourier_norm_single_mode() {
        let mut c = vec![[0.0, 0.0]; 5];
        c[3] = [0.0, -2.0];
        assert!((fourier_sobolev_norm(&c, 0.3) - 2.0 * 4f64.powf(0.3)).abs() < 1e-14);
        assert_eq!(fourier_sobolev_norm(&[[0.0, 0.0]; 3], 0.3), 0.0);
    }

    #[test]
    fn embedding_ratio_degenerate_and_linear() {
        let grid = TimeGrid::uniform(1.0, 8).unwrap();
        let c = Path::constant(grid.clone(), &[1.0]).unwrap();
        assert_eq!(variation_embedding_ratio(&c, 0.2, 2.0, 0.0, 1.0).unwrap(), 0.0);
        let f = Path::from_fn(grid, 1, |t| vec![t]).unwrap();
        // Ratio is scale invariant for a line: (t-s) / ((t-s)^α (t-s)^{1-δ+1/p} C).
        let r1 = variation_embedding_ratio(&f, 0.2, 2.0, 0.0, 1.0).unwrap();
        let r2 = variation_embedding_ratio(&f, 0.2, 2.0, 0.25, 0.5).unwrap();
        assert!((r1 - r2).abs() < 1e-8 * r1);
        assert!(variation_embedding_ratio(&f, 0.6, 2.0, 0.0, 1.0).is_err());
    }
}
