use std::time::Instant;

use rayon::prelude::*;

use super::config::ExperimentConfig;
use super::fit::{fit_rows, RungRow};
use super::{ExperimentReport, Verdict};
use crate::checks::{besov_fourier_band, random_intervals};
use crate::error::{arg, Error, Result};
use crate::gaussian::{
    expected_sup_distance, expected_sup_distance_exact, fourier_distance_driver, kl_truncation,
    poincare_check, standard_normals, FourierGaussianModel, Model, PathSampler,
};
use crate::norms::{inhom_distance, moment_scaling_table, InhomDistanceParams};
use crate::paths::TimeGrid;
use crate::stats::mean_stderr;
use crate::words::Word;

// Indices into `ExperimentConfig::constraint_audit`.
const BETA_3ALPHA: usize = 1;
const ALPHA_BETA_P: usize = 2;
const BETA_ALPHA_HALF: usize = 3;

fn distance_params(config: &ExperimentConfig, level: usize) -> Result<InhomDistanceParams> {
    InhomDistanceParams::new(config.beta_prime(), config.alpha, level, config.pairs)
}

fn warn_constraints(report: &mut ExperimentReport, relevant: &[usize]) {
    for &i in relevant {
        let c = &report.constraints[i];
        if !c.holds {
            let msg = format!("hypothesis {} fails for these parameters", c.name);
            report.warnings.push(msg);
        }
    }
}

fn fourier_model(model: &Model) -> Result<&FourierGaussianModel> {
    match model {
        Model::Fourier(m) => Ok(m),
        Model::CoupledFourier { x, .. } => Ok(x),
        Model::Fbm(_) => Err(Error::Unsupported("this experiment needs a Fourier model".into())),
    }
}

/// `errs[sample][rung]` reduced to one row per rung.
fn rung_rows(errs: &[Vec<f64>], mesh: &[f64]) -> Vec<RungRow> {
    mesh.iter()
        .enumerate()
        .map(|(r, &mesh)| {
            let col: Vec<f64> = errs.iter().map(|e| e[r]).collect();
            let (mean_err, stderr) = mean_stderr(&col);
            RungRow { rung: r, mesh, mean_err, stderr, samples: errs.len() }
        })
        .collect()
}

/// Paired test that errors decrease along `order` by more than two standard
/// errors of the per-sample differences. Rungs that are exactly zero on both
/// sides count as decreasing.
fn decrease_verdict(name: &str, errs: &[Vec<f64>], order: &[usize]) -> Verdict {
    let mut bad = Vec::new();
    for w in order.windows(2) {
        let (a, b) = (w[0], w[1]);
        let diffs: Vec<f64> = errs.iter().map(|e| e[a] - e[b]).collect();
        let zero = errs.iter().all(|e| e[a] == 0.0 && e[b] == 0.0);
        let (m, se) = mean_stderr(&diffs);
        if !(zero || m > 2.0 * se) {
            bad.push(format!("rung {a} -> {b}: mean decrease {m:.3e} with stderr {se:.3e}"));
        }
    }
    let detail = if bad.is_empty() {
        format!("{} consecutive rungs decrease beyond noise", order.len().saturating_sub(1))
    } else {
        bad.join("; ")
    };
    Verdict::new(name, bad.is_empty(), detail)
}

fn slope_verdict(report: &mut ExperimentReport, rows: &[RungRow], target: f64) {
    report.target = Some(target);
    let tol = report.tolerance;
    match fit_rows(rows) {
        Ok(fit) => {
            let ok = fit.within(target, tol);
            report.verdicts.push(Verdict::new(
                "slope",
                ok,
                format!(
                    "fitted slope {:.4} ± {:.4} (R² {:.4}) vs target {target:.4} ± {tol}",
                    fit.slope, fit.slope_stderr, fit.r_squared
                ),
            ));
            report.fit = Some(fit);
        }
        Err(e) => {
            report.warnings.push(format!("degenerate fit: {e}"));
            report.verdicts.push(Verdict::new("slope", false, format!("degenerate fit: {e}")));
        }
    }
}

/// Indices sorted so that the approximation improves along the order.
fn order_by(values: &[f64], improving_when_larger: bool) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| {
        let o = values[a].total_cmp(&values[b]);
        if improving_when_larger {
            o
        } else {
            o.reverse()
        }
    });
    idx
}

fn finish(mut report: ExperimentReport, started: Instant) -> ExperimentReport {
    report.wall_clock_seconds = started.elapsed().as_secs_f64();
    report
}

pub fn pl_rate_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let model = config.model.build()?;
    pl_rate_with_sampler(config, &model)
}

/// PL approximation rate for any sampler: `X^D` is interpolated back onto the
/// sampler's grid and compared with `X` over that grid's pairs.
pub fn pl_rate_with_sampler(config: &ExperimentConfig, sampler: &dyn PathSampler) -> Result<ExperimentReport> {
    let started = Instant::now();
    config.validate()?;
    let mut report = ExperimentReport::new(config)?;
    warn_constraints(&mut report, &[BETA_3ALPHA, ALPHA_BETA_P]);
    let grid = sampler.grid().clone();
    let m = grid.segments();
    let coarse: Vec<TimeGrid> = config
        .ladder
        .iter()
        .map(|&r| {
            if r > m || m % r != 0 {
                return arg(format!("rung {r} does not divide the reference grid's {m} segments"));
            }
            TimeGrid::new((0..=r).map(|k| grid.points()[k * (m / r)]).collect())
        })
        .collect::<Result<_>>()?;
    let params = distance_params(config, report.level)?;
    let seed = report.seed;
    let errs: Vec<Vec<f64>> = (0..config.samples as u64)
        .into_par_iter()
        .map(|i| {
            let x = sampler.sample(seed, i)?;
            coarse
                .iter()
                .map(|d| inhom_distance(&x, &x.pl_interpolate(d)?.pl_interpolate(&grid)?, &params))
                .collect()
        })
        .collect::<Result<_>>()?;
    let mesh: Vec<f64> = coarse.iter().map(TimeGrid::mesh).collect();
    let rows = rung_rows(&errs, &mesh);
    slope_verdict(&mut report, &rows, config.alpha - config.beta);
    report.verdicts.push(decrease_verdict("monotone", &errs, &order_by(&mesh, false)));
    report.tables.insert("pl-rate".into(), rows);
    Ok(finish(report, started))
}

/// Truncation rate `ρ(X, X^N)` with shared noise, alongside the analytic
/// driver `max_i sup_{k>N} |x_k^i| k^{1/2+β}`.
pub fn fourier_rate_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let started = Instant::now();
    config.validate()?;
    let mut report = ExperimentReport::new(config)?;
    warn_constraints(&mut report, &[BETA_3ALPHA, BETA_ALPHA_HALF]);
    let built = config.model.build()?;
    let model = fourier_model(&built)?;
    let truncs: Vec<FourierGaussianModel> = config.ladder.iter().map(|&n| kl_truncation(model, n)).collect();
    let params = distance_params(config, report.level)?;
    let seed = report.seed;
    let errs: Vec<Vec<f64>> = (0..config.samples as u64)
        .into_par_iter()
        .map(|i| {
            let noise = standard_normals(seed, i, model.noise_len());
            let x = model.path_from_noise(&noise)?;
            truncs
                .iter()
                .map(|t| inhom_distance(&x, &t.path_from_noise(&noise)?, &params))
                .collect()
        })
        .collect::<Result<_>>()?;
    let ns: Vec<f64> = config.ladder.iter().map(|&n| n as f64).collect();
    let rows = rung_rows(&errs, &ns);
    let target = -(config.alpha - config.beta);
    slope_verdict(&mut report, &rows, target);
    report.verdicts.push(decrease_verdict("monotone", &errs, &order_by(&ns, true)));

    let coeffs = model.coefficients();
    let driver: Vec<f64> = truncs
        .iter()
        .map(|t| fourier_distance_driver(coeffs, t.coefficients(), config.beta))
        .collect::<Result<_>>()?;
    let driver_rows: Vec<RungRow> = ns
        .iter()
        .zip(&driver)
        .enumerate()
        .map(|(rung, (&mesh, &mean_err))| RungRow { rung, mesh, mean_err, stderr: 0.0, samples: 1 })
        .collect();
    match fit_rows(&driver_rows) {
        Ok(fit) => {
            let ok = (fit.slope - target).abs() <= 0.02;
            report.verdicts.push(Verdict::new(
                "driver-exponent",
                ok,
                format!("analytic driver slope {:.4} vs target {target:.4} ± 0.02", fit.slope),
            ));
            if let Some(mc) = &report.fit {
                report.summary.insert("driver_minus_mc_slope".into(), fit.slope - mc.slope);
            }
            report.secondary_fits.insert("driver".into(), fit);
        }
        Err(e) => report.warnings.push(format!("driver fit failed: {e}")),
    }
    report.tables.insert("fourier-rate".into(), rows);
    report.tables.insert("driver".into(), driver_rows);
    Ok(finish(report, started))
}

/// Distances between successive truncations `X^N` and `X^{2N}`; the verdict is
/// a strict decrease along the ladder.
pub fn kl_convergence_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let started = Instant::now();
    config.validate()?;
    let mut report = ExperimentReport::new(config)?;
    warn_constraints(&mut report, &[BETA_ALPHA_HALF]);
    let built = config.model.build()?;
    let model = fourier_model(&built)?;
    let n_max = model.coefficients().n_max();
    let pairs: Vec<(FourierGaussianModel, FourierGaussianModel)> = config
        .ladder
        .iter()
        .map(|&n| (kl_truncation(model, n), kl_truncation(model, 2 * n)))
        .collect();
    let params = distance_params(config, report.level)?;
    let seed = report.seed;
    let errs: Vec<Vec<f64>> = (0..config.samples as u64)
        .into_par_iter()
        .map(|i| {
            let noise = standard_normals(seed, i, model.noise_len());
            pairs
                .iter()
                .map(|(a, b)| inhom_distance(&a.path_from_noise(&noise)?, &b.path_from_noise(&noise)?, &params))
                .collect()
        })
        .collect::<Result<_>>()?;
    let ns: Vec<f64> = config.ladder.iter().map(|&n| n as f64).collect();
    let rows = rung_rows(&errs, &ns);
    report.verdicts.push(decrease_verdict("monotone", &errs, &order_by(&ns, true)));
    for (r, &n) in config.ladder.iter().enumerate() {
        if n >= n_max {
            let zero = errs.iter().all(|e| e[r] == 0.0);
            report.verdicts.push(Verdict::new(
                format!("terminal-{n}"),
                zero,
                format!("N = {n} >= N_max = {n_max}: distance {}", if zero { "0" } else { "nonzero" }),
            ));
        }
    }
    // Empirical constant of mean distance against the analytic driver.
    let mut band = (f64::INFINITY, 0.0f64);
    for ((a, b), row) in pairs.iter().zip(&rows) {
        let d = fourier_distance_driver(b.coefficients(), a.coefficients(), config.beta)?;
        if d > 0.0 && row.mean_err > 0.0 {
            let c = row.mean_err / d;
            band = (band.0.min(c), band.1.max(c));
        }
    }
    if band.1 > 0.0 {
        report.summary.insert("driver_constant_min".into(), band.0);
        report.summary.insert("driver_constant_max".into(), band.1);
    }
    match fit_rows(&rows) {
        Ok(fit) => report.fit = Some(fit),
        Err(e) => report.warnings.push(format!("no rate fitted: {e}")),
    }
    report.tables.insert("kl-convergence".into(), rows);
    Ok(finish(report, started))
}

/// Mean `ρ(X, Y_N)` against `sup_t E|X_t - Y_{N,t}|` for the coefficient-gap
/// family `Y_N = X^N`, one member per ladder entry. The table's `mesh` column
/// holds the sup distance.
pub fn dist_sup_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let started = Instant::now();
    config.validate()?;
    let mut report = ExperimentReport::new(config)?;
    warn_constraints(&mut report, &[BETA_3ALPHA, BETA_ALPHA_HALF]);
    let built = config.model.build()?;
    if let Model::CoupledFourier { .. } = built {
        report
            .warnings
            .push("coefficients_y is ignored: the gap family is built from truncations of coefficients".into());
    }
    let model = fourier_model(&built)?;
    let coeffs = model.coefficients();
    let family: Vec<FourierGaussianModel> = config.ladder.iter().map(|&n| kl_truncation(model, n)).collect();
    let seed = report.seed;
    let mut sup = Vec::with_capacity(family.len());
    for y in &family {
        let d = match expected_sup_distance_exact(coeffs, y.coefficients(), model.grid()) {
            Ok(d) => d,
            Err(Error::Unsupported(_)) => {
                report.warnings.push("sup distance estimated by Monte Carlo".into());
                expected_sup_distance(coeffs, y.coefficients(), model.grid(), config.samples.max(100), seed)?.0
            }
            Err(e) => return Err(e),
        };
        sup.push(d);
    }
    let params = distance_params(config, report.level)?;
    let errs: Vec<Vec<f64>> = (0..config.samples as u64)
        .into_par_iter()
        .map(|i| {
            let noise = standard_normals(seed, i, model.noise_len());
            let x = model.path_from_noise(&noise)?;
            family
                .iter()
                .map(|y| inhom_distance(&x, &y.path_from_noise(&noise)?, &params))
                .collect()
        })
        .collect::<Result<_>>()?;
    let rows = rung_rows(&errs, &sup);
    let exponent = 1.0 - config.beta / config.alpha;
    slope_verdict(&mut report, &rows, exponent);
    let consts: Vec<f64> = rows
        .iter()
        .filter(|r| r.mesh > 0.0 && r.mean_err > 0.0)
        .map(|r| r.mean_err / r.mesh.powf(exponent))
        .collect();
    if !consts.is_empty() {
        let lo = consts.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = consts.iter().copied().fold(0.0, f64::max);
        report.summary.insert("constant_min".into(), lo);
        report.summary.insert("constant_max".into(), hi);
    }
    report.tables.insert("dist-sup".into(), rows);
    Ok(finish(report, started))
}

/// `Var[F] <= E||DF||^2` for each configured word (default: all words up to
/// length 3) on five random grid intervals.
pub fn poincare_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let started = Instant::now();
    config.validate()?;
    let mut report = ExperimentReport::new(config)?;
    let built = config.model.build()?;
    let model = fourier_model(&built)?;
    let mut words = config.word_list()?;
    if words.is_empty() {
        words = Word::all_up_to(model.dim(), 3).into_iter().filter(|w| !w.is_empty()).collect();
    }
    let seed = report.seed;
    for (s, t) in random_intervals(seed, model.grid(), 5) {
        for w in &words {
            let r = poincare_check(model, w, s, t, config.samples, seed)?;
            let name = format!("poincare-{w}-[{s:.4},{t:.4}]");
            report.verdicts.push(Verdict::new(
                name,
                r.holds,
                format!("var {:.6e} vs E|DF|^2 {:.6e} (stderr {:.2e})", r.variance, r.grad_sq_mean, r.difference_stderr),
            ));
            if w.len() == 1 {
                let eq = (r.variance - r.grad_sq_mean).abs() <= 3.0 * r.difference_stderr;
                report.verdicts.push(Verdict::new(
                    format!("equality-{w}-[{s:.4},{t:.4}]"),
                    eq,
                    "linear functionals attain equality",
                ));
            }
            report.poincare.push(r);
        }
    }
    Ok(finish(report, started))
}

/// Moments `||<S_{t_0,t_k}, w>||_{L^{p/|w|}}` over interval lengths `k` (in
/// grid steps) with one log-log fit per word against the exponent `α|w|`.
pub fn moment_scaling_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let started = Instant::now();
    config.validate()?;
    let mut report = ExperimentReport::new(config)?;
    let model = config.model.build()?;
    let mut words = config.word_list()?;
    if words.is_empty() {
        words = if model.dim() >= 2 {
            vec![Word::from([1]), Word::from([1, 2])]
        } else {
            vec![Word::from([1]), Word::from([1, 1])]
        };
    }
    let grid = model.grid().clone();
    let t0 = grid.start();
    let intervals: Vec<(f64, f64)> = config
        .ladder
        .iter()
        .map(|&k| {
            if k > grid.segments() {
                return arg(format!("interval of {k} steps exceeds the grid"));
            }
            Ok((t0, grid.points()[k]))
        })
        .collect::<Result<_>>()?;
    let seed = report.seed;
    let table = moment_scaling_table(|i| model.sample(seed, i), &words, &intervals, config.p, config.samples)?;
    for (wi, w) in words.iter().enumerate() {
        let rows: Vec<RungRow> = table
            .iter()
            .skip(wi)
            .step_by(words.len())
            .enumerate()
            .map(|(rung, r)| RungRow {
                rung,
                mesh: r.t - r.s,
                mean_err: r.estimate,
                stderr: r.stderr,
                samples: r.n_samples,
            })
            .collect();
        let target = config.alpha * w.len() as f64;
        match fit_rows(&rows) {
            Ok(fit) => {
                let ok = fit.within(target, report.tolerance);
                report.verdicts.push(Verdict::new(
                    format!("scaling-{w}"),
                    ok,
                    format!("slope {:.4} vs alpha|w| = {target:.4} ± {}", fit.slope, report.tolerance),
                ));
                if wi == 0 {
                    report.fit = Some(fit.clone());
                    report.target = Some(target);
                }
                report.secondary_fits.insert(format!("word-{w}"), fit);
            }
            Err(e) => {
                report.warnings.push(format!("word {w}: {e}"));
                report.verdicts.push(Verdict::new(format!("scaling-{w}"), false, e.to_string()));
            }
        }
        report.tables.insert(format!("moment-{w}"), rows);
    }
    report.moments = table;
    Ok(finish(report, started))
}

/// Band of `besov_seminorm(p = 2, α + 1/2) / fourier_sobolev_norm` over
/// `series` random truncated series (default 30), for the seed and the next
/// one; the verdict asks the band constants to agree within 20%.
pub fn embedding_band_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let started = Instant::now();
    config.validate()?;
    let mut report = ExperimentReport::new(config)?;
    let built = config.model.build()?;
    let model = fourier_model(&built)?;
    let series = config.series.unwrap_or(30);
    let seed = report.seed;
    let a = besov_fourier_band(model, config.alpha, &config.ladder, series, seed)?;
    let b = besov_fourier_band(model, config.alpha, &config.ladder, series, seed.wrapping_add(1))?;
    let change = (a.constant - b.constant).abs() / a.constant.max(b.constant);
    report.verdicts.push(Verdict::new(
        "band-stability",
        change <= 0.2,
        format!("band constants {:.4} and {:.4} differ by {:.1}%", a.constant, b.constant, 100.0 * change),
    ));
    for (tag, band) in [("seed", &a), ("next_seed", &b)] {
        report.summary.insert(format!("{tag}_band_min"), band.min);
        report.summary.insert(format!("{tag}_band_max"), band.max);
        report.summary.insert(format!("{tag}_band_constant"), band.constant);
    }
    Ok(finish(report, started))
}
