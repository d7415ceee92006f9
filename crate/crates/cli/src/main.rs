//! `roughsupport`: density grids, walk-survival curves, Monte-Carlo
//! experiments and the verification suite, written as CSV and JSON.
//!
//! Exit codes: 0 success, 1 failure (a failed check or an I/O error),
//! 2 usage error.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use roughsupport::circle::{plane_coeffs, PhiTriple};
use roughsupport::comb::{HeightDistribution, Placement};
use roughsupport::interval::{LinePlacement, SupportPoint2};
use roughsupport::montecarlo::{
    robustness_experiment, run_circle_experiment, run_interval_experiment, ExperimentConfig, ExperimentKind,
    FixedPlacement, Variant,
};
use roughsupport::report::{self, Body};
use roughsupport::verify::{run_criterion, LawSet, Profile};
use roughsupport::Error;

#[derive(Parser, Debug)]
#[command(name = "roughsupport", version, about = "Support points of rigid bodies on random combs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Interval density p(a1, a2) on a grid over [-1,0] x [0,1].
    DensityInterval {
        #[arg(long, default_value_t = 101)]
        grid: usize,
        #[command(flatten)]
        out: OutArg,
    },
    /// Circle density p_T(theta1, theta2) on a grid over the gap triangle.
    DensityCircle {
        #[arg(long, default_value_t = 101)]
        grid: usize,
        #[command(flatten)]
        out: OutArg,
    },
    /// Walk-survival probability p*(mu) of the beam or the hoop.
    Pstar {
        #[arg(value_enum)]
        body: BodyArg,
        /// Comma-separated values of mu; overrides --steps.
        #[arg(long, value_delimiter = ',')]
        mu: Vec<f64>,
        /// Number of equal steps over [0, 1].
        #[arg(long, default_value_t = 100)]
        steps: usize,
        #[command(flatten)]
        out: OutArg,
    },
    /// Monte-Carlo histogram of the support law against the limit density.
    Mc {
        #[arg(value_enum)]
        kind: KindArg,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value_t = 20)]
        bins: usize,
        #[arg(long, default_value = "uniform")]
        dist: DistArg,
        #[arg(long, value_enum, default_value_t = PlacementArg::Midpoint)]
        placement: PlacementArg,
        /// Histogram CSV; the manifest goes next to it with a .json extension.
        #[command(flatten)]
        out: OutArg,
        /// Manifest path, overriding the default next to --out.
        #[arg(long)]
        manifest: Option<PathBuf>,
    },
    /// Probability that a fresh comb lies below a fixed line or plane.
    CombBelow {
        #[command(subcommand)]
        surface: Surface,
    },
    /// Interval experiment repeated under other height laws and placements.
    Robustness {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value_t = 20)]
        bins: usize,
        /// `DIST@PLACEMENT`, e.g. `beta:2,2@midpoint`; repeatable. Defaults
        /// to uniform heights, Beta(2,2) heights and random placement.
        #[arg(long = "variant")]
        variants: Vec<VariantArg>,
        #[command(flatten)]
        out: OutArg,
    },
    /// Runs the acceptance criteria and prints one line per criterion.
    Verify {
        #[arg(long, value_enum, default_value_t = ProfileArg::Fast)]
        profile: ProfileArg,
        /// Comma-separated criterion numbers; all when omitted.
        #[arg(long, value_delimiter = ',')]
        criteria: Vec<u32>,
        /// Writes the outcomes as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
        #[arg(long, hide = true)]
        tamper_density: bool,
    },
}

#[derive(Subcommand, Debug)]
enum Surface {
    /// Line through support points a1 < 0 < a2 with scaled tip gaps.
    Line {
        #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
        support: Vec<f64>,
        #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
        gaps: Vec<f64>,
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        out: OutArg,
    },
    /// Plane through teeth at angles phi with scaled tip gaps.
    Plane {
        #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
        phi: Vec<f64>,
        #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
        gaps: Vec<f64>,
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        out: OutArg,
    },
}

#[derive(Args, Debug)]
struct RunArgs {
    #[arg(long, default_value_t = 1000)]
    teeth: usize,
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Args, Debug)]
struct OutArg {
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BodyArg {
    Beam,
    Hoop,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum KindArg {
    Interval,
    Circle,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PlacementArg {
    Midpoint,
    Paper,
    Random,
}

impl From<PlacementArg> for Placement {
    fn from(p: PlacementArg) -> Self {
        match p {
            PlacementArg::Midpoint => Placement::MidpointGrid,
            PlacementArg::Paper => Placement::PaperGrid,
            PlacementArg::Random => Placement::UniformRandom,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ProfileArg {
    Fast,
    Full,
}

/// `uniform`, `beta:A,B` or `triangular:M`.
#[derive(Clone, Copy, Debug)]
struct DistArg(HeightDistribution);

impl FromStr for DistArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let num = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("bad number {v:?}: {e}"));
        let dist = match s.split_once(':') {
            None if s == "uniform" => HeightDistribution::Uniform01,
            Some(("beta", params)) => {
                let (a, b) = params.split_once(',').ok_or("beta takes two parameters, e.g. beta:2,2")?;
                HeightDistribution::Beta { alpha: num(a)?, beta: num(b)? }
            }
            Some(("triangular", m)) => HeightDistribution::Triangular { mode: num(m)? },
            _ => return Err(format!("unknown height law {s:?}; expected uniform, beta:A,B or triangular:M")),
        };
        dist.validate().map_err(|e| e.to_string())?;
        Ok(DistArg(dist))
    }
}

#[derive(Clone, Debug)]
struct VariantArg(Variant);

impl FromStr for VariantArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (dist, placement) = s.split_once('@').unwrap_or((s, "midpoint"));
        let DistArg(dist) = dist.parse()?;
        let placement = PlacementArg::from_str(placement, false)?;
        Ok(VariantArg(Variant { label: s.to_string(), dist, placement: placement.into() }))
    }
}

/// Failure with the exit code it maps to.
enum Failure {
    Usage(String),
    Runtime(String),
    ChecksFailed(usize),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidInput(_) | Error::OutOfDomain { .. } | Error::NotEquilibrium(_) => {
                Failure::Usage(e.to_string())
            }
            other => Failure::Runtime(other.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Runtime(format!("io: {e}"))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::ChecksFailed(n)) => {
            eprintln!("{n} criteria failed");
            ExitCode::from(1)
        }
    }
}

fn open(out: &OutArg) -> Result<Box<dyn Write>, Failure> {
    Ok(match &out.out {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).map_err(|e| Failure::Runtime(format!("cannot create {}: {e}", path.display())))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn config(kind: ExperimentKind, run: &RunArgs, bins: usize) -> Result<ExperimentConfig, Failure> {
    let cfg = ExperimentConfig::new(kind, run.teeth, run.trials, bins, run.seed);
    cfg.validate()?;
    Ok(cfg)
}

fn exactly<const K: usize>(flag: &str, values: &[f64]) -> Result<[f64; K], Failure> {
    values.try_into().map_err(|_| Failure::Usage(format!("--{flag} takes {K} comma-separated values")))
}

fn manifest_path(out: &Path) -> PathBuf {
    out.with_extension("json")
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::DensityInterval { grid, out } => {
            check_grid(grid)?;
            report::write_density_interval(grid, open(&out)?)?;
        }
        Command::DensityCircle { grid, out } => {
            check_grid(grid)?;
            report::write_density_circle(grid, open(&out)?)?;
        }
        Command::Pstar { body, mu, steps, out } => {
            let mus = if mu.is_empty() { report::mu_steps(steps)? } else { mu };
            if let Some(bad) = mus.iter().find(|m| !(0.0..=1.0).contains(*m)) {
                return Err(Failure::Usage(format!("--mu values must lie in [0, 1], got {bad}")));
            }
            let body = match body {
                BodyArg::Beam => Body::Beam,
                BodyArg::Hoop => Body::Hoop,
            };
            report::write_p_star(body, &mus, open(&out)?)?;
        }
        Command::Mc { kind, run, bins, dist, placement, out, manifest } => {
            let kind = match kind {
                KindArg::Interval => ExperimentKind::Interval,
                KindArg::Circle => ExperimentKind::Circle,
            };
            let mut cfg = config(kind, &run, bins)?;
            cfg.dist = dist.0;
            cfg.placement = placement.into();
            cfg.validate()?;
            let result = match kind {
                ExperimentKind::Interval => run_interval_experiment(&cfg)?,
                ExperimentKind::Circle => run_circle_experiment(&cfg)?,
            };
            report::write_histogram(&result, open(&out)?)?;
            if let Some(path) = manifest.or_else(|| out.out.as_deref().map(manifest_path)) {
                report::write_json(&result.manifest, BufWriter::new(File::create(path)?))?;
            }
            eprintln!(
                "TV {:.4}, chi2/dof {:.3}, {} degenerate of {} trials, {:.1} s",
                result.fit.tv_distance,
                result.fit.chi_square_per_dof(),
                result.degenerate_count,
                cfg.trials,
                result.elapsed_seconds
            );
        }
        Command::CombBelow { surface } => match surface {
            Surface::Line { support, gaps, run, out } => {
                let [a1, a2] = exactly::<2>("support", &support)?;
                let [g1, g2] = exactly::<2>("gaps", &gaps)?;
                let line = LinePlacement::new(g1, g2, SupportPoint2::new(a1, a2)?)?;
                let cfg = config(ExperimentKind::Interval, &run, 2)?;
                let r = report::comb_below_report(&cfg, FixedPlacement::Line(&line))?;
                report::write_json(&r, open(&out)?)?;
            }
            Surface::Plane { phi, gaps, run, out } => {
                let phi = PhiTriple::new(exactly::<3>("phi", &phi)?)?;
                let plane = plane_coeffs(&phi, exactly::<3>("gaps", &gaps)?)?;
                let cfg = config(ExperimentKind::Circle, &run, 2)?;
                let r = report::comb_below_report(&cfg, FixedPlacement::Plane(&plane))?;
                report::write_json(&r, open(&out)?)?;
            }
        },
        Command::Robustness { run, bins, variants, out } => {
            let cfg = config(ExperimentKind::Interval, &run, bins)?;
            let variants: Vec<Variant> = if variants.is_empty() {
                ["uniform@midpoint", "beta:2,2@midpoint", "uniform@random"]
                    .iter()
                    .map(|s| s.parse::<VariantArg>().expect("built-in variant parses").0)
                    .collect()
            } else {
                variants.into_iter().map(|v| v.0).collect()
            };
            let table = robustness_experiment(&cfg, &variants)?;
            report::write_json(&table, open(&out)?)?;
        }
        Command::Verify { profile, criteria, json, tamper_density } => {
            let profile = match profile {
                ProfileArg::Fast => Profile::Fast,
                ProfileArg::Full => Profile::Full,
            };
            let mut laws = LawSet::default();
            if tamper_density {
                laws.interval_constant *= 1.05;
                laws.circle_constant *= 1.05;
            }
            let ids = if criteria.is_empty() { (1..=15).collect() } else { criteria };
            let mut outcomes = Vec::with_capacity(ids.len());
            for id in ids {
                let outcome = run_criterion(id, &laws, profile)?;
                println!("{outcome}");
                outcomes.push(outcome);
            }
            if let Some(path) = json {
                report::write_json(&outcomes, BufWriter::new(File::create(path)?))?;
            }
            let failed = outcomes.iter().filter(|o| o.is_failure()).count();
            if failed > 0 {
                return Err(Failure::ChecksFailed(failed));
            }
            println!("all gating criteria passed");
        }
    }
    Ok(())
}

fn check_grid(grid: usize) -> Result<(), Failure> {
    if grid < 2 {
        return Err(Failure::Usage(format!("--grid must be at least 2, got {grid}")));
    }
    Ok(())
}
