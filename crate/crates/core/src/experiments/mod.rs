//! Monte Carlo experiment drivers, log-log rate fits and reports.
//!
//! Every driver samples through counter-based RNG streams and reduces in a
//! fixed order, so a config and seed determine the tables byte for byte.

mod config;
mod drivers;
mod fit;

use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path as FsPath, PathBuf};

use serde::Serialize;

pub use config::{Constraint, ExperimentConfig, ExperimentKind, LevelPolicy};
pub use drivers::{
    dist_sup_experiment, embedding_band_experiment, fourier_rate_experiment, kl_convergence_experiment,
    moment_scaling_experiment, pl_rate_experiment, pl_rate_with_sampler, poincare_experiment,
};
pub use fit::{fit_rate, fit_rows, rows_from, write_rung_csv, RateFit, RungRow};

use crate::error::Result;
use crate::gaussian::PoincareReport;
use crate::norms::{write_moment_csv, MomentRow};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Verdict {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self { name: name.into(), passed, detail: detail.into() }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub seed: u64,
    pub level: usize,
    pub beta_prime: f64,
    /// Headline fit, if the experiment has one and it succeeded.
    pub fit: Option<RateFit>,
    pub target: Option<f64>,
    pub tolerance: f64,
    /// Further named fits, e.g. the analytic driver or one fit per word.
    pub secondary_fits: BTreeMap<String, RateFit>,
    pub verdicts: Vec<Verdict>,
    pub constraints: Vec<Constraint>,
    pub warnings: Vec<String>,
    /// Named scalars such as empirical constant bands.
    pub summary: BTreeMap<String, f64>,
    pub tables: BTreeMap<String, Vec<RungRow>>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub moments: Vec<MomentRow>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub poincare: Vec<PoincareReport>,
    pub wall_clock_seconds: f64,
}

impl ExperimentReport {
    pub(crate) fn new(config: &ExperimentConfig) -> Result<Self> {
        Ok(Self {
            config: config.clone(),
            seed: config.seed(),
            level: config.resolved_level()?,
            beta_prime: config.beta_prime(),
            fit: None,
            target: None,
            tolerance: config.tolerance(),
            secondary_fits: BTreeMap::new(),
            verdicts: Vec::new(),
            constraints: config.constraint_audit(),
            warnings: Vec::new(),
            summary: BTreeMap::new(),
            tables: BTreeMap::new(),
            moments: Vec::new(),
            poincare: Vec::new(),
            wall_clock_seconds: 0.0,
        })
    }

    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }

    pub fn verdict(&self, name: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.name == name)
    }

    /// Writes `report.json`, one `<table>.csv` per table and `moments.csv`
    /// when present. Returns the written paths.
    pub fn write_to(&self, dir: &FsPath) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        let report = dir.join("report.json");
        serde_json::to_writer_pretty(BufWriter::new(File::create(&report)?), self)?;
        written.push(report);
        for (name, rows) in &self.tables {
            let path = dir.join(format!("{name}.csv"));
            write_rung_csv(rows, BufWriter::new(File::create(&path)?))?;
            written.push(path);
        }
        if !self.moments.is_empty() {
            let path = dir.join("moments.csv");
            write_moment_csv(&self.moments, BufWriter::new(File::create(&path)?))?;
            written.push(path);
        }
        Ok(written)
    }
}

/// Dispatches on the configured kind.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    match config.kind {
        ExperimentKind::PlRate => pl_rate_experiment(config),
        ExperimentKind::FourierRate => fourier_rate_experiment(config),
        ExperimentKind::KlConvergence => kl_convergence_experiment(config),
        ExperimentKind::DistSup => dist_sup_experiment(config),
        ExperimentKind::Poincare => poincare_experiment(config),
        ExperimentKind::MomentScaling => moment_scaling_experiment(config),
        ExperimentKind::EmbeddingBand => embedding_band_experiment(config),
    }
}
