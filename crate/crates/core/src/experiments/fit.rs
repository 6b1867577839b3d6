use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::stats::ols;

/// One rung of a ladder: mean error over `samples` draws at one mesh.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RungRow {
    pub rung: usize,
    pub mesh: f64,
    pub mean_err: f64,
    pub stderr: f64,
    pub samples: usize,
}

/// Least-squares fit of `log mean_err` against `log mesh`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
    pub r_squared: f64,
    /// Rungs that entered the fit.
    pub rows: Vec<RungRow>,
    /// Rungs dropped because their mean sits within two standard errors of 0.
    pub rejected: Vec<usize>,
}

impl RateFit {
    /// `|slope - target| <= tol`.
    pub fn within(&self, target: f64, tol: f64) -> bool {
        (self.slope - target).abs() <= tol
    }
}

/// Builds rows for `fit_rows` from parallel slices.
pub fn rows_from(mesh: &[f64], mean: &[f64], stderr: &[f64], samples: usize) -> Vec<RungRow> {
    mesh.iter()
        .zip(mean)
        .zip(stderr)
        .enumerate()
        .map(|(rung, ((&mesh, &mean_err), &stderr))| RungRow { rung, mesh, mean_err, stderr, samples })
        .collect()
}

pub fn fit_rate(mesh: &[f64], mean: &[f64], stderr: &[f64]) -> Result<RateFit> {
    if mesh.len() != mean.len() || mesh.len() != stderr.len() {
        return Err(Error::Fit("mesh, mean and stderr lengths differ".into()));
    }
    fit_rows(&rows_from(mesh, mean, stderr, 0))
}

pub fn fit_rows(rows: &[RungRow]) -> Result<RateFit> {
    let (kept, rejected): (Vec<RungRow>, Vec<RungRow>) =
        rows.iter().partition(|r| r.mesh > 0.0 && r.mean_err > 2.0 * r.stderr && r.mean_err > 0.0);
    if kept.len() < 3 {
        return Err(Error::Fit(format!(
            "{} of {} rungs are above the noise floor; need 3",
            kept.len(),
            rows.len()
        )));
    }
    let lx: Vec<f64> = kept.iter().map(|r| r.mesh.ln()).collect();
    let ly: Vec<f64> = kept.iter().map(|r| r.mean_err.ln()).collect();
    let f = ols(&lx, &ly);
    Ok(RateFit {
        slope: f.slope,
        intercept: f.intercept,
        slope_stderr: f.slope_stderr,
        r_squared: f.r_squared,
        rows: kept,
        rejected: rejected.iter().map(|r| r.rung).collect(),
    })
}

/// CSV with header `rung,mesh,mean_err,stderr,M`.
pub fn write_rung_csv<W: Write>(rows: &[RungRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["rung", "mesh", "mean_err", "stderr", "M"])?;
    for r in rows {
        w.write_record([
            r.rung.to_string(),
            format!("{:e}", r.mesh),
            format!("{:e}", r.mean_err),
            format!("{:e}", r.stderr),
            r.samples.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
