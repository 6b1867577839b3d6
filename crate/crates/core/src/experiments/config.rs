use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{arg, Result};
use crate::gaussian::ModelSpec;
use crate::norms::n_beta_alpha;
use crate::signature::{PairSet, MAX_LEVEL};
use crate::words::Word;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    PlRate,
    FourierRate,
    KlConvergence,
    DistSup,
    Poincare,
    MomentScaling,
    EmbeddingBand,
}

impl ExperimentKind {
    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::PlRate => "pl-rate",
            ExperimentKind::FourierRate => "fourier-rate",
            ExperimentKind::KlConvergence => "kl-convergence",
            ExperimentKind::DistSup => "dist-sup",
            ExperimentKind::Poincare => "poincare",
            ExperimentKind::MomentScaling => "moment-scaling",
            ExperimentKind::EmbeddingBand => "embedding-band",
        }
    }

    /// Kinds whose ladder feeds a log-log fit.
    fn needs_ladder(&self) -> bool {
        !matches!(self, ExperimentKind::Poincare)
    }
}

/// Truncation level of the distances: fixed, or `auto` for `N_{β',α}`
/// (capped at 3 when `β + 3α > 1`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LevelPolicy {
    #[default]
    Auto,
    Fixed(usize),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RawLevel {
    Fixed(usize),
    Named(String),
}

impl Serialize for LevelPolicy {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            LevelPolicy::Auto => RawLevel::Named("auto".into()).serialize(s),
            LevelPolicy::Fixed(n) => RawLevel::Fixed(*n).serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for LevelPolicy {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match RawLevel::deserialize(d)? {
            RawLevel::Fixed(n) => Ok(LevelPolicy::Fixed(n)),
            RawLevel::Named(s) if s == "auto" => Ok(LevelPolicy::Auto),
            RawLevel::Named(s) => Err(serde::de::Error::custom(format!(
                "level must be a number or \"auto\", got {s:?}"
            ))),
        }
    }
}

fn default_samples() -> usize {
    200
}

fn default_p() -> f64 {
    2.0
}

/// JSON experiment description. The meaning of `ladder` depends on the kind:
///
/// * `pl-rate`: segment counts of the coarse partitions (each must divide the
///   reference grid's segment count);
/// * `fourier-rate`, `kl-convergence`, `dist-sup`: truncation levels `N`;
/// * `moment-scaling`: interval lengths `[t_0, t_k]` in reference-grid steps;
/// * `embedding-band`: truncation levels the random series cycle through.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub model: ModelSpec,
    pub alpha: f64,
    pub beta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta_prime: Option<f64>,
    #[serde(default)]
    pub level: LevelPolicy,
    #[serde(default)]
    pub ladder: Vec<usize>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Falls back to the model seed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default)]
    pub pairs: PairSet,
    #[serde(default = "default_p")]
    pub p: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    /// Words for `poincare` and `moment-scaling`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub words: Vec<String>,
    /// Slope tolerance; defaults to 0.1 (0.15 for `dist-sup`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    /// Number of random series for `embedding-band`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub series: Option<usize>,
    /// Output directory for the report and tables.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let (a, b, bp) = (self.alpha, self.beta, self.beta_prime());
        if !(a > 0.0 && a <= 1.0) {
            return arg(format!("alpha must lie in (0, 1], got {a}"));
        }
        if !(bp > 0.0 && bp < b && b <= a) {
            return arg(format!("need 0 < beta' < beta <= alpha, got beta' = {bp}, beta = {b}, alpha = {a}"));
        }
        if self.kind.needs_ladder() && self.ladder.len() < 3 {
            return arg(format!("the ladder needs at least 3 rungs, got {}", self.ladder.len()));
        }
        if self.ladder.contains(&0) {
            return arg("ladder rungs must be positive");
        }
        if self.samples < 50 {
            return arg(format!("need at least 50 samples, got {}", self.samples));
        }
        if !(self.p >= 1.0) {
            return arg(format!("p must be at least 1, got {}", self.p));
        }
        if let LevelPolicy::Fixed(n) = self.level {
            if !(1..=MAX_LEVEL).contains(&n) {
                return arg(format!("level must lie in 1..={MAX_LEVEL}, got {n}"));
            }
        }
        self.word_list()?;
        Ok(())
    }

    pub fn beta_prime(&self) -> f64 {
        self.beta_prime.unwrap_or(self.beta - 0.02)
    }

    /// `q` with `1/q = 1/p + α` unless given.
    pub fn q(&self) -> f64 {
        self.q.unwrap_or(1.0 / (1.0 / self.p + self.alpha))
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(self.model.seed)
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance.unwrap_or(match self.kind {
            ExperimentKind::DistSup => 0.15,
            _ => 0.1,
        })
    }

    pub fn resolved_level(&self) -> Result<usize> {
        match self.level {
            LevelPolicy::Fixed(n) => Ok(n),
            LevelPolicy::Auto => {
                let mut n = n_beta_alpha(self.beta_prime(), self.alpha)?;
                if self.beta + 3.0 * self.alpha > 1.0 {
                    n = n.min(3);
                }
                Ok(n.min(MAX_LEVEL))
            }
        }
    }

    pub fn word_list(&self) -> Result<Vec<Word>> {
        self.words
            .iter()
            .map(|s| {
                let w: Word = s.parse()?;
                if w.is_empty() {
                    return arg("experiment words must be nonempty");
                }
                w.check_alphabet(self.model.d)?;
                Ok(w)
            })
            .collect()
    }

    /// The paper's standing hypotheses for these parameters.
    pub fn constraint_audit(&self) -> Vec<Constraint> {
        let (a, b, p, q) = (self.alpha, self.beta, self.p, self.q());
        vec![
            Constraint::new("1/q + alpha > 1", 1.0 / q + a > 1.0),
            Constraint::new("beta + 3 alpha > 1", b + 3.0 * a > 1.0),
            Constraint::new("alpha + beta + 1/p > 1", a + b + 1.0 / p > 1.0),
            Constraint::new("beta + alpha > 1/2", b + a > 0.5),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Constraint {
    pub name: String,
    pub holds: bool,
}

impl Constraint {
    fn new(name: &str, holds: bool) -> Self {
        Self { name: name.into(), holds }
    }
}
