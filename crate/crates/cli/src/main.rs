use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use roughlift::checks::{
    chen_check, control_battery, embedding_check, lyons_check, poincare_battery, shuffle_check, CheckOutcome,
};
use roughlift::experiments::{run_experiment, ExperimentConfig, ExperimentKind};
use roughlift::gaussian::{ModelSpec, PathSampler};
use roughlift::norms::{besov_seminorm_on, inhom_distance, p_variation, BesovParams, InhomDistanceParams};
use roughlift::signature::path_signature;
use roughlift::{Error, PairSet, Path};

/// Rough-path numerics and Gaussian rough-path lift experiments.
#[derive(Parser)]
#[command(name = "roughlift", version)]
struct Cli {
    /// Accepted for scripts; reductions already run in a fixed order.
    #[arg(long, global = true)]
    deterministic: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw one sample path from a model spec and write it as CSV.
    Sample {
        #[arg(long)]
        model: PathBuf,
        /// Overrides the spec's seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 0)]
        index: u64,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Second path of a coupled model.
        #[arg(long)]
        out_y: Option<PathBuf>,
    },
    /// Truncated signature of a path CSV as `word,value` rows.
    Signature {
        #[arg(long)]
        path: PathBuf,
        #[arg(long)]
        level: usize,
        #[command(flatten)]
        span: Span,
    },
    /// Exact p-variation of a path CSV.
    Pvar {
        #[arg(long)]
        path: PathBuf,
        #[arg(long)]
        p: f64,
        #[command(flatten)]
        span: Span,
    },
    /// Besov seminorm of a path CSV, with its quadrature error estimate.
    Besov {
        #[arg(long)]
        path: PathBuf,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        p: f64,
        #[command(flatten)]
        span: Span,
    },
    /// Inhomogeneous rough-path distance between two path CSVs.
    Distance {
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        y: PathBuf,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        level: usize,
        #[arg(long, value_enum, default_value_t = Pairs::All)]
        pairs: Pairs,
    },
    /// Run a verification battery; exit code 2 when it fails.
    Check {
        #[arg(value_enum)]
        kind: CheckKind,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Paths, cases or samples; each battery has its own default.
        #[arg(long)]
        count: Option<usize>,
    },
    /// Run an experiment from a JSON config and write the report and tables.
    Experiment {
        #[arg(value_enum)]
        kind: ExperimentArg,
        #[arg(long)]
        config: PathBuf,
        /// Output directory; falls back to the config's `output`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Span {
    /// Interval start; defaults to the first grid time.
    #[arg(long)]
    s: Option<f64>,
    /// Interval end; defaults to the last grid time.
    #[arg(long)]
    t: Option<f64>,
}

impl Span {
    fn resolve(&self, x: &Path) -> (f64, f64) {
        (self.s.unwrap_or(x.grid().start()), self.t.unwrap_or(x.grid().end()))
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Pairs {
    All,
    Dyadic,
}

#[derive(Clone, Copy, ValueEnum)]
enum CheckKind {
    Shuffle,
    Chen,
    Poincare,
    Control,
    Embedding,
    Lyons,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExperimentArg {
    PlRate,
    FourierRate,
    #[value(alias = "kl-convergence")]
    Kl,
    DistSup,
    MomentScaling,
    Poincare,
    EmbeddingBand,
}

impl ExperimentArg {
    fn kind(self) -> ExperimentKind {
        match self {
            ExperimentArg::PlRate => ExperimentKind::PlRate,
            ExperimentArg::FourierRate => ExperimentKind::FourierRate,
            ExperimentArg::Kl => ExperimentKind::KlConvergence,
            ExperimentArg::DistSup => ExperimentKind::DistSup,
            ExperimentArg::MomentScaling => ExperimentKind::MomentScaling,
            ExperimentArg::Poincare => ExperimentKind::Poincare,
            ExperimentArg::EmbeddingBand => ExperimentKind::EmbeddingBand,
        }
    }
}

enum Failure {
    /// Bad flags, unreadable or malformed input.
    Usage(String),
    /// A check ran and did not pass.
    Check,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn read_path(file: &PathBuf) -> Result<Path, Failure> {
    let f = File::open(file).map_err(|e| Failure::Usage(format!("{}: {e}", file.display())))?;
    Ok(Path::read_csv(BufReader::new(f))?)
}

fn read_text(file: &PathBuf) -> Result<String, Failure> {
    std::fs::read_to_string(file).map_err(|e| Failure::Usage(format!("{}: {e}", file.display())))
}

fn write_path(x: &Path, out: Option<&PathBuf>) -> Result<(), Failure> {
    match out {
        Some(file) => x.write_csv(BufWriter::new(File::create(file)?))?,
        None => x.write_csv(io::stdout().lock())?,
    }
    Ok(())
}

fn run_check(kind: CheckKind, seed: u64, count: Option<usize>) -> Result<CheckOutcome, Error> {
    match kind {
        CheckKind::Shuffle => shuffle_check(seed, count.unwrap_or(100)),
        CheckKind::Chen => chen_check(seed, count.unwrap_or(100)),
        CheckKind::Poincare => poincare_battery(seed, count.unwrap_or(10_000)),
        CheckKind::Control => control_battery(seed, count.unwrap_or(50)),
        CheckKind::Embedding => embedding_check(seed),
        CheckKind::Lyons => lyons_check(seed, count.unwrap_or(100)),
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let mut stdout = io::stdout().lock();
    match cli.command {
        Command::Sample { model, seed, index, out, out_y } => {
            let spec = ModelSpec::from_json(&read_text(&model)?)?;
            let built = spec.build()?;
            let seed = seed.unwrap_or(spec.seed);
            match built.sample_pair(seed, index) {
                Some(pair) => {
                    let (x, y) = pair?;
                    write_path(&x, out.as_ref())?;
                    match out_y {
                        Some(file) => write_path(&y, Some(&file))?,
                        None => eprintln!("coupled model: pass --out-y to keep the second path"),
                    }
                }
                None => {
                    if out_y.is_some() {
                        return Err(Failure::Usage("--out-y needs a coupled-fourier model".into()));
                    }
                    write_path(&built.sample(seed, index)?, out.as_ref())?;
                }
            }
        }
        Command::Signature { path, level, span } => {
            let x = read_path(&path)?;
            let (s, t) = span.resolve(&x);
            path_signature(&x, s, t, level)?.write_csv(stdout)?;
        }
        Command::Pvar { path, p, span } => {
            let x = read_path(&path)?;
            let (s, t) = span.resolve(&x);
            writeln!(stdout, "{}", p_variation(&x, p, s, t)?)?;
        }
        Command::Besov { path, delta, p, span } => {
            let x = read_path(&path)?;
            let (s, t) = span.resolve(&x);
            let est = besov_seminorm_on(&x, &BesovParams::new(delta, p)?, s, t)?;
            writeln!(stdout, "{} {:e}", est.value, est.error)?;
        }
        Command::Distance { x, y, alpha, beta, level, pairs } => {
            let (x, y) = (read_path(&x)?, read_path(&y)?);
            let pairs = match pairs {
                Pairs::All => PairSet::AllGridPairs,
                Pairs::Dyadic => PairSet::Dyadic,
            };
            let params = InhomDistanceParams::new(beta, alpha, level, pairs)?;
            writeln!(stdout, "{}", inhom_distance(&x, &y, &params)?)?;
        }
        Command::Check { kind, seed, count } => {
            let outcome = run_check(kind, seed, count)?;
            writeln!(stdout, "{} {}: {}", if outcome.passed { "PASS" } else { "FAIL" }, outcome.name, outcome.summary)?;
            for line in &outcome.details {
                writeln!(stdout, "  {line}")?;
            }
            if !outcome.passed {
                return Err(Failure::Check);
            }
        }
        Command::Experiment { kind, config, out } => {
            let cfg = ExperimentConfig::from_json(&read_text(&config)?)?;
            if cfg.kind != kind.kind() {
                return Err(Failure::Usage(format!(
                    "config describes a {} experiment, not {}",
                    cfg.kind.name(),
                    kind.kind().name()
                )));
            }
            let dir = out
                .or_else(|| cfg.output.as_ref().map(PathBuf::from))
                .ok_or_else(|| Failure::Usage("pass --out or set `output` in the config".into()))?;
            let report = run_experiment(&cfg)?;
            let written = report.write_to(&dir)?;
            for c in &report.constraints {
                writeln!(stdout, "constraint {}: {}", c.name, if c.holds { "holds" } else { "violated" })?;
            }
            for w in &report.warnings {
                writeln!(stdout, "warning: {w}")?;
            }
            for v in &report.verdicts {
                writeln!(stdout, "{} {}: {}", if v.passed { "PASS" } else { "FAIL" }, v.name, v.detail)?;
            }
            for f in written {
                writeln!(stdout, "wrote {}", f.display())?;
            }
        }
    }
    Ok(())
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(text) = std::env::var("ROUGHLIFT_THREADS") else {
        return Ok(());
    };
    let n: usize = text
        .trim()
        .parse()
        .map_err(|_| Failure::Usage(format!("ROUGHLIFT_THREADS must be a positive integer, got {text:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Usage(e.to_string()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match configure_threads().and_then(|_| run(cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Check) => ExitCode::from(2),
    }
}
