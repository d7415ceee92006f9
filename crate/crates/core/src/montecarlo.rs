//! Monte-Carlo experiments: sample combs, settle the body, and compare the
//! empirical support law with the analytic one.
//!
//! Trial `t` draws from `ChaCha8Rng::seed_from_u64(master_seed)` switched
//! to stream `t`, so a trial's comb depends only on the configuration and
//! its index. Trials run in parallel chunks whose partial results are merged
//! in chunk order, which makes every result independent of the thread count.
//! A degenerate settle is dropped and counted, so the histogram's sample
//! count plus the degenerate count always equals the number of trials.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circle::{density_pt_at, theta_from_phi, PhiTriple, PlanePlacement, ThetaTriple, KERNEL_TABLE_SPEC};
use crate::comb::{
    circle_angles, line_positions, sample_circular_comb_with, sample_line_comb_with, support_pair_with, support_triple,
    HeightDistribution, HeightSampler, Placement,
};
use crate::error::{Error, Result};
use crate::interval::{density_p_at, LinePlacement};
use crate::quadrature::QuadratureSpec;
use crate::scalar::Real;
use crate::stats::{expected_fractions, fit_against, tv_between, DomainTag, FitReport, Histogram2D};

/// Which body is settled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Interval,
    Circle,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub n_teeth: usize,
    pub trials: u64,
    pub dist: HeightDistribution,
    pub bins_x: usize,
    pub bins_y: usize,
    pub master_seed: u64,
    pub placement: Placement,
}

impl ExperimentConfig {
    /// Uniform heights on the midpoint grid.
    pub fn new(kind: ExperimentKind, n_teeth: usize, trials: u64, bins: usize, master_seed: u64) -> Self {
        Self {
            kind,
            n_teeth,
            trials,
            dist: HeightDistribution::Uniform01,
            bins_x: bins,
            bins_y: bins,
            master_seed,
            placement: Placement::MidpointGrid,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials < 1 {
            return Err(Error::InvalidInput("trials must be at least 1".into()));
        }
        if self.bins_x < 2 || self.bins_y < 2 {
            return Err(Error::InvalidInput(format!(
                "bins must be at least 2 per axis, got {}x{}",
                self.bins_x, self.bins_y
            )));
        }
        let min_teeth = match self.kind {
            ExperimentKind::Interval => 2,
            ExperimentKind::Circle => 3,
        };
        if self.n_teeth < min_teeth {
            return Err(Error::InvalidInput(format!(
                "{:?} experiments need at least {min_teeth} teeth, got {}",
                self.kind, self.n_teeth
            )));
        }
        self.dist.validate()
    }

    fn expect_kind(&self, kind: ExperimentKind) -> Result<()> {
        self.validate()?;
        if self.kind != kind {
            return Err(Error::InvalidInput(format!("expected a {kind:?} configuration, got {:?}", self.kind)));
        }
        Ok(())
    }
}

/// Numerical tolerances in force for a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub analytic: QuadratureSpec,
    pub monte_carlo: QuadratureSpec,
    pub kernel_table: QuadratureSpec,
    pub geometric: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            analytic: QuadratureSpec::analytic(),
            monte_carlo: QuadratureSpec::monte_carlo(),
            kernel_table: KERNEL_TABLE_SPEC,
            geometric: <f64 as Real>::geometric_tol(),
        }
    }
}

/// Everything needed to reproduce a run, plus its headline numbers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub config: ExperimentConfig,
    pub master_seed: u64,
    pub tolerances: Tolerances,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degenerate_count: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit: Option<FitReport>,
}

impl RunManifest {
    pub fn for_config(config: &ExperimentConfig) -> Self {
        Self {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            config: *config,
            master_seed: config.master_seed,
            tolerances: Tolerances::default(),
            samples: None,
            degenerate_count: None,
            fit: None,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub histogram: Histogram2D<f64>,
    pub degenerate_count: u64,
    pub fit: FitReport,
    /// Probability of each bin under the limit law, row-major like the counts.
    pub expected: Vec<f64>,
    pub elapsed_seconds: f64,
    pub manifest: RunManifest,
}

/// A proportion with its Wald standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
    /// Trials that contributed (degenerate settles excluded).
    pub samples: u64,
    pub degenerate_count: u64,
}

impl Estimate {
    fn from_counts(hits: u64, samples: u64, degenerate_count: u64) -> Result<Self> {
        if samples == 0 {
            return Err(Error::InvalidInput("every trial was degenerate".into()));
        }
        let n = samples as f64;
        let p = hits as f64 / n;
        Ok(Self { value: p, std_error: (p * (1.0 - p) / n).sqrt(), samples, degenerate_count })
    }

    /// `|value - target| <= k * std_error`, with exact agreement required
    /// when the standard error is zero.
    pub fn within(&self, target: f64, k: f64) -> bool {
        (self.value - target).abs() <= k * self.std_error
    }
}

/// Generator for trial `trial` of a run seeded with `master_seed`.
pub fn trial_rng(master_seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(trial);
    rng
}

const CHUNK: u64 = 4096;

/// Runs `step` for every trial index, folding into per-chunk accumulators
/// that are merged in chunk order.
fn fold_trials<A, I, S, M>(trials: u64, init: I, step: S, merge: M) -> Result<A>
where
    A: Send,
    I: Fn() -> A + Sync,
    S: Fn(&mut A, u64) -> Result<()> + Sync,
    M: Fn(&mut A, A) -> Result<()>,
{
    let chunks = trials.div_ceil(CHUNK);
    let parts: Vec<Result<A>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = init();
            for t in c * CHUNK..((c + 1) * CHUNK).min(trials) {
                step(&mut acc, t)?;
            }
            Ok(acc)
        })
        .collect();
    let mut out = init();
    for part in parts {
        merge(&mut out, part?)?;
    }
    Ok(out)
}

/// A settled trial, in the coordinates the analytic laws use.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Settled {
    Pair { a1: f64, a2: f64 },
    Gaps(ThetaTriple<f64>),
}

struct Sampler {
    cfg: ExperimentConfig,
    heights: HeightSampler,
}

impl Sampler {
    fn new(cfg: &ExperimentConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self { cfg: *cfg, heights: cfg.dist.sampler()? })
    }

    /// Settles trial `t`; `None` when the configuration is degenerate.
    fn settle(&self, t: u64, hull: &mut Vec<usize>) -> Result<Option<Settled>> {
        let mut rng = trial_rng(self.cfg.master_seed, t);
        let settled = match self.cfg.kind {
            ExperimentKind::Interval => {
                let comb =
                    sample_line_comb_with::<f64, _>(self.cfg.n_teeth, &self.heights, self.cfg.placement, &mut rng)?;
                support_pair_with(&comb, hull).map(|p| Settled::Pair { a1: p.a1, a2: p.a2 })
            }
            ExperimentKind::Circle => {
                let comb =
                    sample_circular_comb_with::<f64, _>(self.cfg.n_teeth, &self.heights, self.cfg.placement, &mut rng)?;
                support_triple(&comb).and_then(|s| theta_from_phi(&PhiTriple::new(s.phi)?)).map(Settled::Gaps)
            }
        };
        match settled {
            Ok(s) => Ok(Some(s)),
            Err(e) if e.is_degenerate() || matches!(e, Error::NotEquilibrium(_)) => Ok(None),
            Err(e) => Err(e),
        }
    }
}

/// Histogram of settled configurations for `cfg`, with the degenerate count.
pub fn collect_histogram(cfg: &ExperimentConfig) -> Result<(Histogram2D<f64>, u64)> {
    let sampler = Sampler::new(cfg)?;
    let domain = match cfg.kind {
        ExperimentKind::Interval => DomainTag::IntervalRect,
        ExperimentKind::Circle => DomainTag::ThetaTriangle,
    };
    let empty = Histogram2D::<f64>::for_domain(domain, cfg.bins_x, cfg.bins_y)?;
    fold_trials(
        cfg.trials,
        || (empty.clone(), 0u64, Vec::new()),
        |(hist, degenerate, hull), t| match sampler.settle(t, hull)? {
            Some(Settled::Pair { a1, a2 }) => hist.deposit(&[(a1, a2)]),
            Some(Settled::Gaps(theta)) => {
                let [t1, t2, t3] = theta.theta();
                hist.deposit(&[(t1, t2), (t2, t3), (t3, t1)])
            }
            None => {
                *degenerate += 1;
                Ok(())
            }
        },
        |(hist, degenerate, _), (h, d, _)| {
            *degenerate += d;
            hist.merge(&h)
        },
    )
    .map(|(hist, degenerate, _)| (hist, degenerate))
}

fn finish(
    cfg: &ExperimentConfig,
    started: Instant,
    histogram: Histogram2D<f64>,
    degenerate_count: u64,
    expected: Vec<f64>,
) -> Result<ExperimentResult> {
    let fit = fit_against(&histogram, &expected)?;
    let mut manifest = RunManifest::for_config(cfg);
    manifest.samples = Some(histogram.samples());
    manifest.degenerate_count = Some(degenerate_count);
    manifest.fit = Some(fit);
    Ok(ExperimentResult {
        histogram,
        degenerate_count,
        fit,
        expected,
        elapsed_seconds: started.elapsed().as_secs_f64(),
        manifest,
    })
}

/// Empirical law of the support pair against the interval density.
pub fn run_interval_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.expect_kind(ExperimentKind::Interval)?;
    let started = Instant::now();
    let (histogram, degenerate) = collect_histogram(cfg)?;
    let expected = expected_fractions(
        &histogram,
        |a1, a2| density_p_at(a1, a2).unwrap_or(0.0),
        1.0,
        &QuadratureSpec::monte_carlo(),
    )?;
    finish(cfg, started, histogram, degenerate, expected)
}

/// Empirical law of the gap triple against the circle density. Each sample
/// deposits all three cyclic images of its gaps, so the histogram covers
/// the full triangle, where the density has mass 3.
pub fn run_circle_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.expect_kind(ExperimentKind::Circle)?;
    let started = Instant::now();
    let (histogram, degenerate) = collect_histogram(cfg)?;
    let expected = expected_fractions(&histogram, density_pt_at, 3.0, &QuadratureSpec::monte_carlo())?;
    finish(cfg, started, histogram, degenerate, expected)
}

/// Fraction of trials whose support survives a point load walking out to
/// mass fraction `mu`: `-a1 > mu` and `a2 > mu` for the interval, every
/// gap below `2 acos(mu)` for the hoop.
pub fn estimate_p_star(cfg: &ExperimentConfig, mu: f64) -> Result<Estimate> {
    Ok(estimate_p_star_curve(cfg, &[mu])?.remove(0))
}

/// [`estimate_p_star`] at several `mu` from a single pass over the trials.
pub fn estimate_p_star_curve(cfg: &ExperimentConfig, mus: &[f64]) -> Result<Vec<Estimate>> {
    if let Some(&mu) = mus.iter().find(|mu| !(0.0..=1.0).contains(*mu)) {
        return Err(Error::domain("mu", mu, "[0, 1]"));
    }
    let sampler = Sampler::new(cfg)?;
    let limits: Vec<f64> = mus.iter().map(|mu| 2.0 * mu.acos()).collect();
    let (hits, samples, degenerate) = fold_trials(
        cfg.trials,
        || (vec![0u64; mus.len()], 0u64, 0u64, Vec::new()),
        |(hits, samples, degenerate, hull), t| {
            match sampler.settle(t, hull)? {
                Some(Settled::Pair { a1, a2 }) => {
                    *samples += 1;
                    for (h, &mu) in hits.iter_mut().zip(mus) {
                        *h += u64::from(-a1 > mu && a2 > mu);
                    }
                }
                Some(Settled::Gaps(theta)) => {
                    *samples += 1;
                    let widest = theta.theta().into_iter().fold(0.0, f64::max);
                    for (h, &limit) in hits.iter_mut().zip(&limits) {
                        *h += u64::from(widest < limit);
                    }
                }
                None => *degenerate += 1,
            }
            Ok(())
        },
        |acc, (h, s, d, _)| {
            acc.0.iter_mut().zip(&h).for_each(|(a, b)| *a += b);
            acc.1 += s;
            acc.2 += d;
            Ok(())
        },
    )
    .map(|(h, s, d, _)| (h, s, d))?;
    hits.into_iter().map(|h| Estimate::from_counts(h, samples, degenerate)).collect()
}

/// A fixed supporting line or plane whose clearance over a fresh comb is
/// tested.
#[derive(Debug, Clone, Copy)]
pub enum FixedPlacement<'a> {
    Line(&'a LinePlacement<f64>),
    Plane(&'a PlanePlacement<f64>),
}

/// Fraction of uniform combs with `cfg.n_teeth` teeth lying entirely below
/// a fixed line or plane at height `1 - depth / N`.
pub fn estimate_comb_below(cfg: &ExperimentConfig, placement: FixedPlacement<'_>) -> Result<Estimate> {
    cfg.validate()?;
    if cfg.dist != HeightDistribution::Uniform01 {
        return Err(Error::InvalidInput("comb-below estimates assume uniform heights".into()));
    }
    let expected_kind = match placement {
        FixedPlacement::Line(_) => ExperimentKind::Interval,
        FixedPlacement::Plane(_) => ExperimentKind::Circle,
    };
    cfg.expect_kind(expected_kind)?;
    let n = cfg.n_teeth as f64;
    let clearance = |rng: &mut ChaCha8Rng| -> Vec<f64> {
        match placement {
            FixedPlacement::Line(line) => line_positions(cfg.n_teeth, cfg.placement, rng)
                .into_iter()
                .map(|x| 1.0 - line.depth_at(x) / n)
                .collect(),
            FixedPlacement::Plane(plane) => circle_angles(cfg.n_teeth, cfg.placement, rng)
                .into_iter()
                .map(|a| 1.0 - plane.depth_at(a) / n)
                .collect(),
        }
    };
    // grid placements share one clearance profile across trials
    let fixed = match cfg.placement {
        Placement::UniformRandom => None,
        _ => Some(clearance(&mut trial_rng(cfg.master_seed, 0))),
    };
    let hits = fold_trials(
        cfg.trials,
        || 0u64,
        |hits, t| {
            let mut rng = trial_rng(cfg.master_seed, t);
            let owned;
            let levels = match &fixed {
                Some(levels) => levels,
                None => {
                    owned = clearance(&mut rng);
                    &owned
                }
            };
            let below = levels.iter().filter(|&&z| z < 1.0).all(|&z| rand::Rng::random::<f64>(&mut rng) < z);
            *hits += u64::from(below);
            Ok(())
        },
        |acc, h| {
            *acc += h;
            Ok(())
        },
    )?;
    Estimate::from_counts(hits, cfg.trials, 0)
}

/// Load-weighted densities of the left and right support points: the
/// Monte-Carlo counterpart of the scratch rates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScratchProfile {
    /// Bin edges over `[0, 1]` in `|a|`.
    pub edges: Vec<f64>,
    /// Per-bin mean of `l1 * 1{-a1 in bin}` divided by the bin width.
    pub left: Vec<f64>,
    /// Same for `l2` and `a2`.
    pub right: Vec<f64>,
    pub samples: u64,
    pub degenerate_count: u64,
}

pub fn estimate_scratch_rates(cfg: &ExperimentConfig, bins: usize) -> Result<ScratchProfile> {
    cfg.expect_kind(ExperimentKind::Interval)?;
    if bins < 1 {
        return Err(Error::InvalidInput("scratch profile needs at least one bin".into()));
    }
    let sampler = Sampler::new(cfg)?;
    let bin = |v: f64| ((v * bins as f64) as usize).min(bins - 1);
    let (left, right, samples, degenerate) = fold_trials(
        cfg.trials,
        || (vec![0.0; bins], vec![0.0; bins], 0u64, 0u64, Vec::new()),
        |(left, right, samples, degenerate, hull), t| {
            match sampler.settle(t, hull)? {
                Some(Settled::Pair { a1, a2 }) => {
                    let span = a2 - a1;
                    left[bin(-a1)] += a2 / span;
                    right[bin(a2)] += -a1 / span;
                    *samples += 1;
                }
                _ => *degenerate += 1,
            }
            Ok(())
        },
        |acc, (l, r, s, d, _)| {
            acc.0.iter_mut().zip(&l).for_each(|(a, b)| *a += b);
            acc.1.iter_mut().zip(&r).for_each(|(a, b)| *a += b);
            acc.2 += s;
            acc.3 += d;
            Ok(())
        },
    )
    .map(|(l, r, s, d, _)| (l, r, s, d))?;
    if samples == 0 {
        return Err(Error::InvalidInput("every trial was degenerate".into()));
    }
    let scale = bins as f64 / samples as f64;
    Ok(ScratchProfile {
        edges: (0..=bins).map(|i| i as f64 / bins as f64).collect(),
        left: left.into_iter().map(|v| v * scale).collect(),
        right: right.into_iter().map(|v| v * scale).collect(),
        samples,
        degenerate_count: degenerate,
    })
}

/// One arm of a robustness comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Variant {
    pub label: String,
    pub dist: HeightDistribution,
    pub placement: Placement,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobustnessRow {
    pub label: String,
    pub tv_vs_analytic: f64,
    pub chi_square_per_dof: f64,
    pub degenerate_count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobustnessTable {
    pub rows: Vec<RobustnessRow>,
    /// `pairwise[i][j]`: TV distance between the histograms of variants
    /// `i` and `j`.
    pub pairwise: Vec<Vec<f64>>,
}

/// Runs `base` once per variant, changing only the height law and tooth
/// placement.
pub fn robustness_experiment(base: &ExperimentConfig, variants: &[Variant]) -> Result<RobustnessTable> {
    let mut rows = Vec::with_capacity(variants.len());
    let mut hists = Vec::with_capacity(variants.len());
    for v in variants {
        let cfg = ExperimentConfig { dist: v.dist, placement: v.placement, ..*base };
        let result = match cfg.kind {
            ExperimentKind::Interval => run_interval_experiment(&cfg)?,
            ExperimentKind::Circle => run_circle_experiment(&cfg)?,
        };
        rows.push(RobustnessRow {
            label: v.label.clone(),
            tv_vs_analytic: result.fit.tv_distance,
            chi_square_per_dof: result.fit.chi_square_per_dof(),
            degenerate_count: result.degenerate_count,
        });
        hists.push(result.histogram);
    }
    let mut pairwise = vec![vec![0.0; hists.len()]; hists.len()];
    for i in 0..hists.len() {
        for j in i + 1..hists.len() {
            let tv = tv_between(&hists[i], &hists[j])?;
            pairwise[i][j] = tv;
            pairwise[j][i] = tv;
        }
    }
    Ok(RobustnessTable { rows, pairwise })
}
