use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use rand::RngExt;
use serde::Serialize;

use fuzzy_donsker::convex::DirectionGrid;
use fuzzy_donsker::fuzzy::{dist_inf, dist_p, rho_inf, rho_p, AlphaGrid, FuzzyVector};
use fuzzy_donsker::harness::{
    self, cdf_curve_csv, column, BatteryConfig, FddReport, DEFAULT_REPLICATES, DEFAULT_SEED,
};
use fuzzy_donsker::random::{estimate_moments, RngStream, SamplerSpec};
use fuzzy_donsker::walk::{paths_to_csv, PinnedPath, PinnedWalk, WalkConfig};
use fuzzy_donsker::Error;

#[derive(Parser)]
#[command(name = "fdonsker", version, about = "Fuzzy random walks and Donsker-type checks")]
struct Cli {
    /// Master seed.
    #[arg(long, global = true, env = "FD_SEED")]
    seed: Option<u64>,
    /// Worker threads for replicate evaluation (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,
    /// Output file (stdout when omitted).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Write a fuzzy vector fixture as JSON.
    Gen {
        #[command(subcommand)]
        shape: Shape,
    },
    /// Distances between two fixtures and the embedding's isometry gap.
    Metrics {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        /// Sphere directions for the support-surface metrics.
        #[arg(long, default_value_t = 256)]
        m: usize,
    },
    /// Monte Carlo mean surface and variances of a sampler.
    Estimate {
        /// Sampler JSON.
        #[arg(long)]
        sampler: PathBuf,
        #[arg(long, default_value_t = 64)]
        m: usize,
        #[arg(long, default_value_t = 4000)]
        replicates: usize,
    },
    /// Dump pinned walk paths.
    Walk {
        /// Walk configuration JSON.
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 100)]
        replicates: usize,
    },
    /// Run the battery; exit 0 on pass, 2 on a threshold failure, 1 on error.
    Verify {
        /// Walk configuration JSON (reference configuration when omitted).
        #[arg(long)]
        config: Option<PathBuf>,
        /// Battery thresholds JSON.
        #[arg(long)]
        battery: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_REPLICATES)]
        replicates: usize,
        /// Feed exact Brownian draws instead of walk paths.
        #[arg(long)]
        null: bool,
        /// Also write the per-replicate paths as CSV.
        #[arg(long)]
        paths_csv: Option<PathBuf>,
        /// Also write empirical-vs-target CDF curves for the last time.
        #[arg(long)]
        cdf_csv: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum Shape {
    /// Every level equal to one point.
    Crisp {
        /// Comma-separated coordinates.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        at: Vec<f64>,
        #[arg(long, default_value_t = 10)]
        levels: usize,
    },
    /// Centered squares with side `2 (1 - a/2)`.
    SquareStack {
        #[arg(long, default_value_t = 10)]
        levels: usize,
    },
    /// Random planar hull shrunk toward its centroid as the level rises.
    ShrinkingHull {
        #[arg(long, default_value_t = 10)]
        levels: usize,
        #[arg(long, default_value_t = 8)]
        points: usize,
    },
}

enum Outcome {
    Done,
    ThresholdFailure,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::ThresholdFailure) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: &Cli) -> Result<Outcome> {
    let seed = cli.seed.unwrap_or(DEFAULT_SEED);
    match &cli.command {
        Command::Gen { shape } => {
            require_json(cli.format)?;
            let x = generate(shape, seed)?;
            emit(cli.out.as_deref(), &to_json(&x)?)?;
        }
        Command::Metrics { a, b, p, m } => {
            let x: FuzzyVector = read_json(a)?;
            let y: FuzzyVector = read_json(b)?;
            let row = metrics(&x, &y, *p, *m)?;
            let text = match cli.format.unwrap_or(Format::Json) {
                Format::Json => to_json(&row)?,
                Format::Csv => row.to_csv(),
            };
            emit(cli.out.as_deref(), &text)?;
        }
        Command::Estimate {
            sampler,
            m,
            replicates,
        } => {
            let spec: SamplerSpec = read_json(sampler)?;
            let grid = DirectionGrid::for_dim(spec.dim(), *m)?;
            let est = estimate_moments(&spec, &grid, *replicates, RngStream::new(seed, 0))?;
            let text = match cli.format.unwrap_or(Format::Json) {
                Format::Json => to_json(&est)?,
                Format::Csv => est.mean_surface.to_csv(),
            };
            emit(cli.out.as_deref(), &text)?;
        }
        Command::Walk { config, replicates } => {
            let cfg: WalkConfig = read_json(config)?;
            let walk = PinnedWalk::new(cfg, seed)?;
            let values = harness::walk_paths(&walk, seed, *replicates, cli.workers)?;
            let paths: Vec<PinnedPath> = values
                .into_iter()
                .enumerate()
                .map(|(r, values)| PinnedPath {
                    replicate: r as u64,
                    values,
                })
                .collect();
            let text = match cli.format.unwrap_or(Format::Csv) {
                Format::Json => to_json(&paths)?,
                Format::Csv => paths_to_csv(&walk.config().times, &paths),
            };
            emit(cli.out.as_deref(), &text)?;
        }
        Command::Verify {
            config,
            battery,
            replicates,
            null,
            paths_csv,
            cdf_csv,
        } => {
            require_json(cli.format)?;
            let cfg: WalkConfig = match config {
                Some(path) => read_json(path)?,
                None => harness::default_config(),
            };
            let battery: BatteryConfig = match battery {
                Some(path) => read_json(path)?,
                None => BatteryConfig::default(),
            };
            let report = if *null {
                harness::run_null(&cfg, *replicates, seed, &battery)?
            } else {
                harness::run_fdd(&cfg, *replicates, seed, &battery, cli.workers)?
            };
            emit(cli.out.as_deref(), &to_json(&report)?)?;
            if paths_csv.is_some() || cdf_csv.is_some() {
                write_path_extras(&cfg, &report, seed, cli.workers, paths_csv, cdf_csv)?;
            }
            eprintln!("{}", summary(&report));
            if !report.passed {
                return Ok(Outcome::ThresholdFailure);
            }
        }
    }
    Ok(Outcome::Done)
}

fn generate(shape: &Shape, seed: u64) -> Result<FuzzyVector> {
    let levels = match shape {
        Shape::Crisp { levels, .. } | Shape::SquareStack { levels } | Shape::ShrinkingHull { levels, .. } => *levels,
    };
    if levels == 0 {
        return Err(Error::InvalidConfig("at least one alpha level is required".into()).into());
    }
    let alpha = AlphaGrid::uniform(levels)?;
    Ok(match shape {
        Shape::Crisp { at, .. } => {
            if at.is_empty() {
                bail!("--at needs at least one coordinate");
            }
            FuzzyVector::crisp(alpha, at.clone())?
        }
        Shape::SquareStack { levels } => FuzzyVector::square_stack(*levels)?,
        Shape::ShrinkingHull { points, .. } => {
            if *points < 3 {
                return Err(Error::InvalidConfig("a hull needs at least 3 points".into()).into());
            }
            let mut rng = RngStream::new(seed, 0).rng();
            let pts: Vec<Vec<f64>> = (0..*points)
                .map(|_| vec![rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() * 2.0 - 1.0])
                .collect();
            FuzzyVector::shrinking_hull(alpha, &pts)?
        }
    })
}

#[derive(Serialize)]
struct MetricsRow {
    p: f64,
    m: usize,
    dist_p: f64,
    dist_inf: f64,
    rho_p: f64,
    rho_inf: f64,
    gap_p: f64,
    gap_inf: f64,
}

impl MetricsRow {
    fn to_csv(&self) -> String {
        format!(
            "p,m,dist_p,dist_inf,rho_p,rho_inf,gap_p,gap_inf\n{:?},{},{:?},{:?},{:?},{:?},{:?},{:?}\n",
            self.p, self.m, self.dist_p, self.dist_inf, self.rho_p, self.rho_inf, self.gap_p, self.gap_inf
        )
    }
}

fn metrics(x: &FuzzyVector, y: &FuzzyVector, p: f64, m: usize) -> Result<MetricsRow> {
    if x.alpha() != y.alpha() {
        return Err(Error::GridMismatch.into());
    }
    let grid = DirectionGrid::for_dim(x.dim(), m)?;
    let sx = x.support_surface(&grid)?;
    let sy = y.support_surface(&grid)?;
    let dp = dist_p(x, y, p)?;
    let di = dist_inf(x, y)?;
    let rp = rho_p(&sx, &sy, p)?;
    let ri = rho_inf(&sx, &sy)?;
    Ok(MetricsRow {
        p,
        m,
        dist_p: dp,
        dist_inf: di,
        rho_p: rp,
        rho_inf: ri,
        gap_p: (dp - rp).abs(),
        gap_inf: (di - ri).abs(),
    })
}

fn write_path_extras(
    cfg: &WalkConfig,
    report: &FddReport,
    seed: u64,
    workers: usize,
    paths_csv: &Option<PathBuf>,
    cdf_csv: &Option<PathBuf>,
) -> Result<()> {
    let values = match report.source {
        harness::PathSource::Brownian => harness::brownian_paths(&cfg.times, seed, report.replicates),
        harness::PathSource::Walk => {
            let walk = PinnedWalk::new(cfg.clone(), seed)?;
            harness::walk_paths(&walk, seed, report.replicates, workers)?
        }
    };
    if let Some(path) = paths_csv {
        let paths: Vec<PinnedPath> = values
            .iter()
            .enumerate()
            .map(|(r, v)| PinnedPath {
                replicate: r as u64,
                values: v.clone(),
            })
            .collect();
        emit(Some(path), &paths_to_csv(&cfg.times, &paths))?;
    }
    if let Some(path) = cdf_csv {
        let last = cfg.times.len() - 1;
        let t = cfg.times[last];
        emit(Some(path), &cdf_curve_csv(&column(&values, last), t)?)?;
    }
    Ok(())
}

fn summary(report: &FddReport) -> String {
    let mark = |ok: bool| if ok { "pass" } else { "FAIL" };
    let mut lines = Vec::new();
    for m in &report.marginals {
        lines.push(format!("ks t={}: {:.4} [{}]", m.t, m.ks, mark(m.passed)));
    }
    lines.push(format!(
        "covariance max off-diagonal deviation: {:.4} [{}]",
        report.covariance.max_off_diagonal_deviation,
        mark(report.covariance.passed)
    ));
    lines.push(format!(
        "increment correlation: {:.4} [{}]",
        report.increments.max_abs_off_diagonal,
        mark(report.increments.passed)
    ));
    for e in &report.ecf {
        lines.push(format!(
            "ecf {:?}: {:.4} [{}]",
            e.check.times,
            e.check.joint_error,
            mark(e.passed)
        ));
    }
    lines.push(format!(
        "chebyshev t={} eps={}: {:.4} vs bound {:.4} [{}]",
        report.chebyshev.row.t,
        report.chebyshev.row.epsilon,
        report.chebyshev.row.exceed_rate,
        report.chebyshev.row.bound,
        mark(report.chebyshev.passed)
    ));
    lines.push(format!("overall: {}", mark(report.passed)));
    lines.join("\n")
}

fn require_json(format: Option<Format>) -> Result<()> {
    if format == Some(Format::Csv) {
        bail!("this command only writes JSON");
    }
    Ok(())
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}
