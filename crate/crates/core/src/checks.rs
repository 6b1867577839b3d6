//! Verification batteries. Each returns a [`CheckOutcome`] whose `passed`
//! flag drives the CLI exit code and the acceptance suite.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::gaussian::{
    cm_element_path, kl_truncation, poincare_check, standard_normals, FourierCoefficients,
    FourierGaussianModel, PathSampler, RngSeed,
};
use crate::norms::{
    besov_seminorm, control_from_besov, control_integral_check, fourier_sobolev_norm,
    lyons_extension_check, pl_control, variation_embedding_ratio, BesovParams, Control,
};
use crate::paths::{Path, TimeGrid};
use crate::signature::{chen_product, path_signature, young_translation_ratio, PairSet};
use crate::words::{shuffle, ShuffleExpansion, Word};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub summary: String,
    pub details: Vec<String>,
}

impl CheckOutcome {
    fn new(name: &str, passed: bool, summary: String, details: Vec<String>) -> Self {
        Self { name: name.into(), passed, summary, details }
    }
}

/// Random PL path on `[0, 1]` with `1..=max_segments` uneven segments and
/// `1..=max_dim` components; increments have variance equal to the segment
/// length, so values stay of order one.
pub fn random_pl_path(seed: u64, index: u64, max_segments: usize, max_dim: usize) -> Path {
    let mut rng = RngSeed(seed).stream(index);
    let segments = rng.random_range(1..=max_segments.max(1));
    let dim = rng.random_range(1..=max_dim.max(1));
    random_path_with(&mut rng, segments, dim)
}

fn random_path_with(rng: &mut impl Rng, segments: usize, dim: usize) -> Path {
    let gaps: Vec<f64> = (0..segments).map(|_| rng.random_range(0.1..1.0)).collect();
    let total: f64 = gaps.iter().sum();
    let mut times = vec![0.0];
    let mut acc = 0.0;
    for g in &gaps[..segments - 1] {
        acc += g / total;
        times.push(acc);
    }
    times.push(1.0);
    let mut values: Vec<f64> = (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
    for k in 0..segments {
        let sd = (times[k + 1] - times[k]).sqrt();
        for i in 0..dim {
            let prev = values[k * dim + i];
            values.push(prev + sd * rng.sample::<f64, _>(StandardNormal));
        }
    }
    let grid = TimeGrid::new(times).expect("increasing times");
    Path::new(grid, dim, values).expect("consistent shape")
}

/// `2 · 1122` as a shuffle combination; the corrected form of the identity
/// used to write `<S, 1122>` through shuffles of shorter words:
///
/// `1122 = 112 ⧢ 2 - ½ 11 ⧢ 22 + ½(2211 - 1122) + ½(2121 - 1212) + ½(1221 - 2112)`.
pub fn remark_identity_rhs() -> ShuffleExpansion {
    let w = |s: &str| ShuffleExpansion::word(s.parse().expect("valid word"));
    shuffle(&"112".parse().unwrap(), &"2".parse().unwrap())
        .scaled(2)
        .minus(&shuffle(&"11".parse().unwrap(), &"22".parse().unwrap()))
        .plus(&w("2211").minus(&w("1122")))
        .plus(&w("2121").minus(&w("1212")))
        .plus(&w("1221").minus(&w("2112")))
}

/// The same combination with the last bracket as usually printed,
/// `½(2112 - 1221)`.
pub fn remark_identity_printed_rhs() -> ShuffleExpansion {
    let w = |s: &str| ShuffleExpansion::word(s.parse().expect("valid word"));
    remark_identity_rhs()
        .minus(&w("1221").minus(&w("2112")))
        .plus(&w("2112").minus(&w("1221")))
}

/// Shuffle relation `<S,u><S,v> = <S, u ⧢ v>` for all `|u| + |v| <= 4` on
/// `n_paths` random PL paths, plus the `1122` identity formally and
/// numerically. Errors are relative to the largest of the two sides, the
/// absolute sum of the expanded terms and `||x||_1-var^n / n!`; the tolerance
/// is `1e-10`.
pub fn shuffle_check(seed: u64, n_paths: usize) -> Result<CheckOutcome> {
    let tol = 1e-10;
    let pairs: Vec<(Word, Word, ShuffleExpansion)> = Word::all_up_to(3, 3)
        .into_iter()
        .filter(|u| !u.is_empty())
        .flat_map(|u| {
            Word::all_up_to(3, 4 - u.len())
                .into_iter()
                .filter(|v| !v.is_empty())
                .map(move |v| (u.clone(), v))
                .collect::<Vec<_>>()
        })
        .map(|(u, v)| {
            let s = shuffle(&u, &v);
            (u, v, s)
        })
        .collect();
    let formal = remark_identity_rhs() == ShuffleExpansion::word("1122".parse()?).scaled(2);
    let results: Vec<(f64, f64, usize)> = (0..n_paths as u64)
        .into_par_iter()
        .map(|i| -> Result<(f64, f64, usize)> {
            let x = random_pl_path(seed, i, 50, 3);
            let d = x.dim();
            let sig = path_signature(&x, 0.0, 1.0, 4)?;
            let coef = |w: &Word| sig.coefficient(w).unwrap_or(f64::NAN);
            let var = one_variation(&x);
            // Rounding in the Chen products is relative to |<S,w>|'s bound
            // ||x||_1-var^|w| / |w|!, not to the value, which can cancel.
            let natural = |n: usize| var.powi(n as i32) / (1..=n).product::<usize>() as f64;
            let mut worst = 0.0f64;
            let mut count = 0;
            for (u, v, s) in &pairs {
                if u.check_alphabet(d).is_err() || v.check_alphabet(d).is_err() {
                    continue;
                }
                let lhs = coef(u) * coef(v);
                let rhs = s.evaluate(coef);
                let scale: f64 = s
                    .terms()
                    .map(|(w, c)| (c as f64 * coef(w)).abs())
                    .sum::<f64>()
                    .max(lhs.abs())
                    .max(natural(u.len() + v.len()));
                worst = worst.max(relative(lhs, rhs, scale));
                count += 1;
            }
            let remark = if d >= 2 {
                let lhs = 2.0 * coef(&"1122".parse()?);
                let rhs_expr = remark_identity_rhs_unexpanded();
                let (rhs, scale) = rhs_expr
                    .iter()
                    .fold((0.0, lhs.abs()), |(acc, sc), (c, u, v)| {
                        let term = c * product_or_single(&coef, u, v.as_ref());
                        (acc + term, sc + term.abs())
                    });
                let scale = scale.max(natural(4));
                relative(lhs, rhs, scale)
            } else {
                0.0
            };
            Ok((worst, remark, count))
        })
        .collect::<Result<_>>()?;
    let worst = results.iter().map(|r| r.0).fold(0.0, f64::max);
    let remark = results.iter().map(|r| r.1).fold(0.0, f64::max);
    let count: usize = results.iter().map(|r| r.2).sum();
    let passed = worst <= tol && remark <= tol && formal;
    Ok(CheckOutcome::new(
        "shuffle",
        passed,
        format!(
            "{count} shuffle relations on {n_paths} paths: max relative error {worst:.2e}; \
             1122 identity formal {}, numeric max relative error {remark:.2e}",
            if formal { "ok" } else { "FAILED" }
        ),
        vec![
            format!("tolerance {tol:e}"),
            format!("printed form residual: {}", describe(&remark_identity_printed_rhs().minus(&remark_identity_rhs()))),
        ],
    ))
}

/// `Σ_k |Δx_k|_1`.
fn one_variation(x: &Path) -> f64 {
    x.increments().iter().map(|v| v.abs()).sum()
}

fn relative(a: f64, b: f64, scale: f64) -> f64 {
    let diff = (a - b).abs();
    if scale > 0.0 {
        diff / scale
    } else {
        diff
    }
}

/// The `1122` identity term by term, each shuffle evaluated as a product of
/// coefficients rather than expanded: `(coefficient, u, Some(v))` stands for
/// `c <S,u><S,v>`, `(c, w, None)` for `c <S,w>`.
fn remark_identity_rhs_unexpanded() -> Vec<(f64, Word, Option<Word>)> {
    let w = |s: &str| -> Word { s.parse().expect("valid word") };
    vec![
        (2.0, w("112"), Some(w("2"))),
        (-1.0, w("11"), Some(w("22"))),
        (1.0, w("2211"), None),
        (-1.0, w("1122"), None),
        (1.0, w("2121"), None),
        (-1.0, w("1212"), None),
        (1.0, w("1221"), None),
        (-1.0, w("2112"), None),
    ]
}

fn product_or_single(coef: &impl Fn(&Word) -> f64, u: &Word, v: Option<&Word>) -> f64 {
    match v {
        Some(v) => coef(u) * coef(v),
        None => coef(u),
    }
}

fn describe(e: &ShuffleExpansion) -> String {
    if e.is_empty() {
        return "0".into();
    }
    e.terms().map(|(w, c)| format!("{c:+} {w}")).collect::<Vec<_>>().join(" ")
}

/// Chen's identity `S_{s,t} = S_{s,u} ⊗ S_{u,t}` at a random interior point
/// (not a grid point) for `n_paths` random PL paths at level 5; absolute
/// error `1e-12` scaled by `max(1, |S_{s,t}|)` per coefficient.
pub fn chen_check(seed: u64, n_paths: usize) -> Result<CheckOutcome> {
    let tol = 1e-12;
    let worst: Vec<f64> = (0..n_paths as u64)
        .into_par_iter()
        .map(|i| -> Result<f64> {
            let x = random_pl_path(seed, i, 50, 3);
            let mut rng = RngSeed(seed ^ 0x9e37_79b9).stream(i);
            let u: f64 = rng.random_range(0.01..0.99);
            let whole = path_signature(&x, 0.0, 1.0, 5)?;
            let joined = chen_product(&path_signature(&x, 0.0, u, 5)?, &path_signature(&x, u, 1.0, 5)?)?;
            Ok(whole
                .coefficients()
                .iter()
                .zip(joined.coefficients())
                .map(|(a, b)| (a - b).abs() / a.abs().max(1.0))
                .fold(0.0, f64::max))
        })
        .collect::<Result<_>>()?;
    let max = worst.iter().copied().fold(0.0, f64::max);
    Ok(CheckOutcome::new(
        "chen",
        max <= tol,
        format!("Chen identity on {n_paths} paths at level 5: max error {max:.2e} (tolerance {tol:e})"),
        Vec::new(),
    ))
}

/// Fourier model with `modes` random frequencies per component.
pub fn random_fourier_model(seed: u64, dim: usize, modes: usize, m: usize) -> Result<FourierGaussianModel> {
    let mut rng = RngSeed(seed).stream(u64::MAX);
    let comps = (0..dim)
        .map(|_| {
            (1..=modes)
                .map(|k| {
                    let scale = (k as f64).powf(-0.95);
                    [scale * rng.random_range(-1.0..1.0), scale * rng.random_range(-1.0..1.0)]
                })
                .collect()
        })
        .collect();
    FourierGaussianModel::on_circle(FourierCoefficients::new(comps)?, m)
}

/// Random `(s, t)` pairs of grid points of `grid`.
pub fn random_intervals(seed: u64, grid: &TimeGrid, count: usize) -> Vec<(f64, f64)> {
    let mut rng = RngSeed(seed).stream(u64::MAX - 1);
    let m = grid.segments();
    (0..count)
        .map(|_| {
            let a = rng.random_range(0..m);
            let b = rng.random_range(a + 1..=m);
            (grid.points()[a], grid.points()[b])
        })
        .collect()
}

/// Poincaré inequality `Var[F] <= E||DF||^2` for all words `|w| <= 3` of an
/// 8-mode, 2-dimensional Fourier model on 5 random intervals, with equality
/// at `|w| = 1` within three standard errors.
pub fn poincare_battery(seed: u64, samples: usize) -> Result<CheckOutcome> {
    let model = random_fourier_model(seed, 2, 8, 128)?;
    let intervals = random_intervals(seed, model.grid(), 5);
    let mut failures = Vec::new();
    let mut details = Vec::new();
    let mut checked = 0;
    for &(s, t) in &intervals {
        for w in Word::all_up_to(2, 3).into_iter().filter(|w| !w.is_empty()) {
            let r = poincare_check(&model, &w, s, t, samples, seed)?;
            checked += 1;
            let eq_ok = w.len() != 1 || (r.variance - r.grad_sq_mean).abs() <= 3.0 * r.difference_stderr;
            let line = format!(
                "w={} [{:.4}, {:.4}] var={:.6e} grad={:.6e} se={:.2e}",
                r.word, s, t, r.variance, r.grad_sq_mean, r.difference_stderr
            );
            if !r.holds || !eq_ok {
                failures.push(line.clone());
            }
            details.push(line);
        }
    }
    Ok(CheckOutcome::new(
        "poincare",
        failures.is_empty(),
        format!(
            "{checked} word/interval cases with M = {samples}: {} failed",
            failures.len()
        ),
        details,
    ))
}

/// Besov-derived control of a random PL path with random `(r, p)`.
fn random_control(seed: u64, case: u64) -> Result<(Control, f64, f64)> {
    let mut rng = RngSeed(seed).stream(case);
    let segments = rng.random_range(4..=10);
    let dim = rng.random_range(1..=2);
    let f = random_path_with(&mut rng, segments, dim);
    let r = rng.random_range(0.3..0.7);
    let p = [1.5, 2.0, 3.0][rng.random_range(0..3)];
    Ok((control_from_besov(&f, r, p)?, r, p))
}

/// `pl_control` superadditivity and `ω^D(0,T) <= ω(0,T)` on `cases` random
/// `(ω, D)`, and `control_integral_check` on `cases` Besov-derived controls.
pub fn control_battery(seed: u64, cases: usize) -> Result<CheckOutcome> {
    // Controls are evaluated by quadrature, so allow for its relative error.
    let tol = 1e-8;
    let results: Vec<(f64, f64, f64)> = (0..cases as u64)
        .into_par_iter()
        .map(|c| -> Result<(f64, f64, f64)> {
            let (omega, r, p) = random_control(seed, c)?;
            let mut rng = RngSeed(seed ^ 0xc0_47_01).stream(c);
            let n = rng.random_range(2..=6);
            let mut pts: Vec<f64> = (0..n).map(|_| rng.random_range(0.02..0.98)).collect();
            pts.push(0.0);
            pts.push(1.0);
            pts.sort_by(f64::total_cmp);
            pts.dedup();
            let d = TimeGrid::new(pts.clone())?;
            let wd = pl_control(&omega, &d, p, r)?;
            let mut probe = pts.clone();
            probe.extend((0..5).map(|_| rng.random_range(0.0..1.0)));
            probe.sort_by(f64::total_cmp);
            let mut worst_super = 0.0f64;
            for a in 0..probe.len() {
                for b in a + 1..probe.len() {
                    for e in b + 1..probe.len() {
                        let (s, u, t) = (probe[a], probe[b], probe[e]);
                        let excess = wd.superadditivity_excess(s, u, t);
                        worst_super = worst_super.max(excess / wd.eval(s, t).max(1e-300));
                    }
                }
            }
            let whole = (wd.eval(0.0, 1.0) - omega.eval(0.0, 1.0)) / omega.eval(0.0, 1.0).max(1e-300);
            let h = if c % 2 == 0 { 0.25 } else { 1.0 / 16.0 };
            let (lhs, rhs) = control_integral_check(&omega, h, 1.0)?;
            Ok((worst_super, whole, (lhs - rhs) / rhs.max(1e-300)))
        })
        .collect::<Result<_>>()?;
    let sup = results.iter().map(|r| r.0).fold(f64::NEG_INFINITY, f64::max);
    let whole = results.iter().map(|r| r.1).fold(f64::NEG_INFINITY, f64::max);
    let integral = results.iter().map(|r| r.2).fold(f64::NEG_INFINITY, f64::max);
    let passed = sup <= tol && whole <= tol && integral <= tol;
    Ok(CheckOutcome::new(
        "control",
        passed,
        format!(
            "{cases} random (omega, D): max relative superadditivity excess {sup:.2e}, \
             max (omega^D(0,T) - omega(0,T)) / omega(0,T) {whole:.2e}, \
             max (lhs - rhs) / rhs of the integral estimate {integral:.2e}"
        ),
        vec![format!("tolerance {tol:e}")],
    ))
}

/// Empirical maxima of the variation embedding ratio and of the Young
/// translation ratio, on a grid and on its refinement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EmbeddingMaxima {
    pub variation: (f64, f64),
    pub young: (f64, f64),
}

impl EmbeddingMaxima {
    pub fn variation_ratio(&self) -> f64 {
        self.variation.1 / self.variation.0
    }

    pub fn young_ratio(&self) -> f64 {
        self.young.1 / self.young.0
    }
}

/// Suprema over the pairs of a 9-point coarse grid, for a Fourier sample `x`
/// and a random unit Cameron–Martin direction `h`, on grids of `m` and `2m`
/// segments.
pub fn embedding_maxima(seed: u64, m: usize) -> Result<EmbeddingMaxima> {
    const ALPHA: f64 = 0.3;
    const P: f64 = 2.0;
    let q = 1.0 / (1.0 / P + ALPHA);
    if m % 8 != 0 {
        return crate::error::arg("grid size must be a multiple of 8");
    }
    let coeffs = FourierCoefficients::decay(2, 16, 1.0, 0.45)?;
    let mut rng = RngSeed(seed).stream(u64::MAX - 2);
    let mut u: Vec<Vec<[f64; 2]>> = (0..2)
        .map(|_| (0..16).map(|_| [rng.sample(StandardNormal), rng.sample(StandardNormal)]).collect())
        .collect();
    let norm = u.iter().flatten().flatten().map(|v: &f64| v * v).sum::<f64>().sqrt();
    u.iter_mut().flatten().flatten().for_each(|v| *v /= norm);
    let noise = standard_normals(seed, 0, 2 * 2 * 16);
    let words: Vec<Word> = Word::all_up_to(2, 3).into_iter().filter(|w| !w.is_empty()).collect();
    let mut out = [(0.0, 0.0); 2];
    for (slot, mm) in [m, 2 * m].into_iter().enumerate() {
        let model = FourierGaussianModel::on_circle(coeffs.clone(), mm)?;
        let x = model.path_from_noise(&noise)?;
        let h = cm_element_path(&coeffs, &u, model.grid())?.path;
        let ts = model.grid().points();
        let coarse: Vec<f64> = (0..=8).map(|k| ts[k * mm / 8]).collect();
        let pairs: Vec<(f64, f64)> = (0..8)
            .flat_map(|a| (a + 1..=8).map(move |b| (a, b)))
            .map(|(a, b)| (coarse[a], coarse[b]))
            .collect();
        let maxima: Vec<(f64, f64)> = pairs
            .par_iter()
            .map(|&(s, t)| -> Result<(f64, f64)> {
                let v = variation_embedding_ratio(&h, ALPHA, P, s, t)?;
                let mut y = 0.0f64;
                for w in &words {
                    for j in 1..=w.len() {
                        y = y.max(young_translation_ratio(&x, &h, w, j, s, t, ALPHA, q)?);
                    }
                }
                Ok((v, y))
            })
            .collect::<Result<_>>()?;
        out[slot] = maxima.iter().fold((0.0f64, 0.0f64), |a, b| (a.0.max(b.0), a.1.max(b.1)));
    }
    Ok(EmbeddingMaxima { variation: (out[0].0, out[1].0), young: (out[0].1, out[1].1) })
}

/// Spread of `besov_seminorm(p = 2, δ) / fourier_sobolev_norm(δ)` over random
/// truncated series, `δ = α + 1/2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BandReport {
    pub delta: f64,
    pub min: f64,
    pub max: f64,
    /// Smallest `C` with every ratio in `[1/C, C]`.
    pub constant: f64,
    pub ratios: Vec<f64>,
}

/// Draw `j` is the model truncated at `ladder[j % ladder.len()]` and driven by
/// noise stream `j`; its realized coefficients are `x_k γ_k`.
pub fn besov_fourier_band(
    model: &FourierGaussianModel,
    alpha: f64,
    ladder: &[usize],
    series: usize,
    seed: u64,
) -> Result<BandReport> {
    let delta = alpha + 0.5;
    let params = BesovParams::new(delta, 2.0)?;
    if ladder.is_empty() || series == 0 {
        return crate::error::arg("need a nonempty ladder and at least one series");
    }
    let coeffs = model.coefficients();
    let n_max = coeffs.n_max();
    let ratios: Vec<f64> = (0..series as u64)
        .into_par_iter()
        .map(|j| -> Result<f64> {
            let trunc = kl_truncation(model, ladder[j as usize % ladder.len()]);
            let noise = standard_normals(seed, j, model.noise_len());
            let path = trunc.path_from_noise(&noise)?;
            let mut sq = 0.0;
            for i in 0..coeffs.dim() {
                let realized: Vec<[f64; 2]> = trunc
                    .coefficients()
                    .component(i)
                    .iter()
                    .enumerate()
                    .map(|(k, c)| {
                        let base = 2 * (i * n_max + k);
                        [c[0] * noise[base], c[1] * noise[base + 1]]
                    })
                    .collect();
                sq += fourier_sobolev_norm(&realized, delta).powi(2);
            }
            let besov = besov_seminorm(&path, &params)?.value;
            Ok(besov / sq.sqrt())
        })
        .collect::<Result<_>>()?;
    let min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let max = ratios.iter().copied().fold(0.0, f64::max);
    Ok(BandReport { delta, min, max, constant: max.max(1.0 / min), ratios })
}

/// Embedding and Young ratio maxima stable within a factor 2 under one grid
/// refinement, and the Besov/Fourier band constant stable within 20% across
/// two seeds.
pub fn embedding_check(seed: u64) -> Result<CheckOutcome> {
    let e = embedding_maxima(seed, 32)?;
    let within2 = |r: f64| r.is_finite() && (0.5..=2.0).contains(&r);
    let model = FourierGaussianModel::on_circle(FourierCoefficients::decay(1, 64, 1.0, 0.45)?, 512)?;
    let b1 = besov_fourier_band(&model, 0.45, &[4, 8, 16, 32, 64], 30, seed)?;
    let b2 = besov_fourier_band(&model, 0.45, &[4, 8, 16, 32, 64], 30, seed.wrapping_add(1))?;
    let band_change = (b1.constant - b2.constant).abs() / b1.constant.max(b2.constant);
    let passed = within2(e.variation_ratio()) && within2(e.young_ratio()) && band_change <= 0.2;
    Ok(CheckOutcome::new(
        "embedding",
        passed,
        format!(
            "variation embedding max {:.4} -> {:.4} (ratio {:.3}); Young translation max {:.4} -> {:.4} (ratio {:.3}); \
             Besov/Fourier band constants {:.4} and {:.4} (change {:.1}%)",
            e.variation.0,
            e.variation.1,
            e.variation_ratio(),
            e.young.0,
            e.young.1,
            e.young_ratio(),
            b1.constant,
            b2.constant,
            100.0 * band_change
        ),
        vec![
            format!("band seed {seed}: [{:.4}, {:.4}]", b1.min, b1.max),
            format!("band seed {}: [{:.4}, {:.4}]", seed.wrapping_add(1), b2.min, b2.max),
        ],
    ))
}

/// Lyons extension ratio `ρ_{β,α,n} / ((1 + norms) ρ_{β,α})` for
/// `β = 0.25, α = 0.35, n = 4` across random PL pairs `(x, x + εz)`. A bounded
/// ratio shows up as a maximum that is finite and does not grow between the
/// two halves of the sample.
pub fn lyons_ratios(seed: u64, pairs: usize) -> Result<Vec<f64>> {
    (0..pairs as u64)
        .into_par_iter()
        .map(|i| -> Result<f64> {
            let mut rng = RngSeed(seed).stream(i);
            let segments = rng.random_range(2..=20);
            let x = random_path_with(&mut rng, segments, 2);
            let z = random_path_with(&mut rng, segments, 2);
            let z = Path::new(x.grid().clone(), 2, z.values().to_vec())?;
            let eps = 10f64.powf(rng.random_range(-3.0..0.0));
            let y = Path::new(
                x.grid().clone(),
                2,
                x.values().iter().zip(z.values()).map(|(a, b)| a + eps * b).collect(),
            )?;
            Ok(lyons_extension_check(&x, &y, 0.25, 0.35, 4, PairSet::AllGridPairs)?.ratio())
        })
        .collect()
}

pub fn lyons_check(seed: u64, pairs: usize) -> Result<CheckOutcome> {
    let ratios = lyons_ratios(seed, pairs)?;
    let half = ratios.len() / 2;
    let first = ratios[..half].iter().copied().fold(0.0, f64::max);
    let all = ratios.iter().copied().fold(0.0, f64::max);
    let passed = all.is_finite() && all <= 2.0 * first;
    Ok(CheckOutcome::new(
        "lyons",
        passed,
        format!("Lyons extension ratio over {pairs} random PL pairs: max {all:.4} (first half {first:.4})"),
        Vec::new(),
    ))
}
