//! Independent oracles shared by the integration tests. Nothing here calls
//! the library's signature, variation or Besov code.
#![allow(dead_code, clippy::needless_range_loop)]

use roughlift::gaussian::FourierGaussianModel;
use roughlift::{Path, Word};

/// Iterated integral `<S(x)_{s,t}, w>` by nested trapezoid sums on a grid
/// that splits every segment of `x` (clipped to `[s, t]`) into `refine`
/// pieces.
pub fn nested_quadrature(x: &Path, w: &Word, s: f64, t: f64, refine: usize) -> f64 {
    let mut nodes = vec![s];
    let mut knots: Vec<f64> = x.times().iter().copied().filter(|&u| u > s && u < t).collect();
    knots.push(t);
    let mut left = s;
    for &right in &knots {
        for k in 1..=refine {
            nodes.push(left + (right - left) * k as f64 / refine as f64);
        }
        left = right;
    }
    let vals: Vec<Vec<f64>> = nodes.iter().map(|&u| x.eval(u)).collect();
    // level[j] holds the running integral of the first letters up to node j.
    let mut level = vec![1.0; nodes.len()];
    for &letter in w.letters() {
        let c = letter as usize - 1;
        let mut next = vec![0.0; nodes.len()];
        for j in 1..nodes.len() {
            let dx = vals[j][c] - vals[j - 1][c];
            next[j] = next[j - 1] + 0.5 * (level[j - 1] + level[j]) * dx;
        }
        level = next;
    }
    level[nodes.len() - 1]
}

/// `||x||^p_{p-var}` over `[t_0, t_m]` by enumerating every subset of the
/// interior grid points.
pub fn brute_p_variation_pow(x: &Path, p: f64) -> f64 {
    let m = x.segments();
    assert!(m <= 20, "exhaustive enumeration needs a small grid");
    let interior = m.saturating_sub(1);
    let mut best = 0.0f64;
    for mask in 0u32..(1u32 << interior) {
        let mut idx = vec![0];
        idx.extend((1..m).filter(|k| mask & (1 << (k - 1)) != 0));
        idx.push(m);
        let sum: f64 = idx
            .windows(2)
            .map(|pair| {
                let (a, b) = (x.point(pair[0]), x.point(pair[1]));
                a.iter().zip(b).map(|(u, v)| (v - u) * (v - u)).sum::<f64>().sqrt().powf(p)
            })
            .sum();
        best = best.max(sum);
    }
    best
}

fn gauss_nodes(n: usize) -> Vec<(f64, f64)> {
    // Golub–Welsch would be overkill: Newton on Legendre polynomials.
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        out.push((z, 2.0 / ((1.0 - z * z) * dp * dp)));
    }
    out
}

fn integrate(nodes: &[(f64, f64)], a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    nodes.iter().map(|&(z, w)| w * f(mid + half * z)).sum::<f64>() * half
}

/// `∫∫_{u < v} |x_v - x_u|^p / (v - u)^{pδ + 1} du dv` over the whole grid of
/// a one-dimensional PL path, written as `∫ dr r^{-pδ-1} ∫ du |x_{u+r} - x_u|^p`.
/// The lag integral uses geometrically graded panels towards `r = 0`; the
/// inner integral splits at every kink of `u ↦ x_{u+r} - x_u` and its zeros.
pub fn brute_besov_pow(x: &Path, delta: f64, p: f64) -> f64 {
    assert_eq!(x.dim(), 1);
    let rule = gauss_nodes(24);
    let (t0, t1) = (x.times()[0], *x.times().last().unwrap());
    let horizon = t1 - t0;
    let inner = |r: f64| {
        let mut cuts: Vec<f64> = vec![t0, t1 - r];
        for &g in x.times() {
            for c in [g, g - r] {
                if c > t0 && c < t1 - r {
                    cuts.push(c);
                }
            }
        }
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let diff = |u: f64| x.eval(u + r)[0] - x.eval(u)[0];
        let mut total = 0.0;
        for pair in cuts.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            let (da, db) = (diff(a), diff(b));
            let mut pieces = vec![a];
            if da * db < 0.0 {
                pieces.push(a + (b - a) * da / (da - db));
            }
            pieces.push(b);
            for q in pieces.windows(2) {
                total += integrate(&rule, q[0], q[1], |u| diff(u).abs().powf(p));
            }
        }
        total
    };
    // The lag integrand is smooth between the grid's gap lengths, so split
    // there too.
    let mut lags: Vec<f64> = vec![0.0, horizon];
    for a in x.times() {
        for b in x.times() {
            let d = b - a;
            if d > 0.0 && d < horizon {
                lags.push(d);
            }
        }
    }
    lags.sort_by(f64::total_cmp);
    lags.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
    let mut total = 0.0;
    for pair in lags.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        if a == 0.0 {
            for k in 0..60 {
                let hi = b * 0.5f64.powi(k);
                let lo = hi * 0.5;
                total += integrate(&rule, lo, hi, |r| inner(r) * r.powf(-p * delta - 1.0));
            }
        } else {
            total += integrate(&rule, a, b, |r| inner(r) * r.powf(-p * delta - 1.0));
        }
    }
    total
}

/// Linear map from the noise vector to the increments of component `i` over
/// the grid segments `from..to`, one row per segment.
fn increment_rows(model: &FourierGaussianModel, i: usize, from: usize, to: usize) -> Vec<Vec<f64>> {
    let n = model.noise_len();
    let cols: Vec<Path> = (0..n)
        .map(|k| {
            let mut e = vec![0.0; n];
            e[k] = 1.0;
            model.path_from_noise(&e).unwrap()
        })
        .collect();
    (from..to)
        .map(|a| cols.iter().map(|c| c.point(a + 1)[i] - c.point(a)[i]).collect())
        .collect()
}

/// Exact `(Var[F], E||DF||^2)` for a two-letter word `F = <S(X)_{t_from,
/// t_to}, w>` of a finite Fourier model. `F = γᵀAγ` with
/// `A = Σ_{a<b} u_a v_bᵀ + ½ Σ_a u_a v_aᵀ`, so Isserlis gives
/// `Var F = 2 tr(A_s²)` and `E|∇F|² = 4 tr(A_s²)` with `A_s = (A + Aᵀ)/2`.
pub fn wick_level_two(model: &FourierGaussianModel, w: &Word, from: usize, to: usize) -> (f64, f64) {
    assert_eq!(w.len(), 2);
    let l = w.letters();
    let u = increment_rows(model, l[0] as usize - 1, from, to);
    let v = increment_rows(model, l[1] as usize - 1, from, to);
    let n = model.noise_len();
    let mut a = vec![vec![0.0; n]; n];
    let mut prefix = vec![0.0; n];
    for seg in 0..u.len() {
        for r in 0..n {
            let left = prefix[r] + 0.5 * u[seg][r];
            for c in 0..n {
                a[r][c] += left * v[seg][c];
            }
        }
        for r in 0..n {
            prefix[r] += u[seg][r];
        }
    }
    let mut tr = 0.0;
    for r in 0..n {
        for c in 0..n {
            let s_rc = 0.5 * (a[r][c] + a[c][r]);
            tr += s_rc * s_rc;
        }
    }
    (2.0 * tr, 4.0 * tr)
}
