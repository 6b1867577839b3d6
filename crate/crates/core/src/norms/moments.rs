use std::io::Write;

use rayon::prelude::*;

use crate::error::{arg, Result};
use crate::paths::Path;
use crate::signature::path_signature;
use crate::stats::lq_norm_stderr;
use crate::words::Word;

/// One row of a moment-scaling table.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct MomentRow {
    pub word: String,
    pub s: f64,
    pub t: f64,
    pub p: f64,
    pub estimate: f64,
    pub stderr: f64,
    pub n_samples: usize,
}

/// Monte Carlo estimates of `||<S(X)_{s,t}, w>||_{L^{p/|w|}}` for every word
/// and interval. `sampler(i)` must return the `i`-th independent draw.
pub fn moment_scaling_table<F>(
    sampler: F,
    words: &[Word],
    intervals: &[(f64, f64)],
    p: f64,
    samples: usize,
) -> Result<Vec<MomentRow>>
where
    F: Fn(u64) -> Result<Path> + Sync,
{
    if samples < 50 {
        return arg(format!("moment table needs at least 50 samples, got {samples}"));
    }
    if !(p > 0.0) {
        return arg(format!("moment exponent must be positive, got {p}"));
    }
    if words.iter().any(Word::is_empty) {
        return arg("the empty word has no moment to estimate");
    }
    let level = words.iter().map(Word::len).max().unwrap_or(1);
    // draws[i][pair * words.len() + word]
    let draws: Vec<Vec<f64>> = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let x = sampler(i)?;
            let mut out = Vec::with_capacity(intervals.len() * words.len());
            for &(s, t) in intervals {
                let sig = path_signature(&x, s, t, level)?;
                for w in words {
                    out.push(sig.coefficient(w)?);
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    for (pi, &(s, t)) in intervals.iter().enumerate() {
        for (wi, w) in words.iter().enumerate() {
            let col: Vec<f64> = draws.iter().map(|d| d[pi * words.len() + wi]).collect();
            let (estimate, stderr) = lq_norm_stderr(&col, p / w.len() as f64);
            rows.push(MomentRow {
                word: w.to_string(),
                s,
                t,
                p,
                estimate,
                stderr,
                n_samples: samples,
            });
        }
    }
    Ok(rows)
}

/// CSV with header `word,s,t,p,estimate,stderr,n_samples`.
pub fn write_moment_csv<W: Write>(rows: &[MomentRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}
