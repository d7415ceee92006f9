//! The acceptance suite: fifteen numbered checks of the analytic laws, the
//! settling algorithms and the Monte-Carlo engine.
//!
//! Checks that depend on the two limit densities evaluate them through a
//! [`LawSet`], so a deliberately perturbed law can be fed through the whole
//! suite to confirm that it notices.

use std::f64::consts::PI;
use std::fmt;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::circle::{
    cot_identity_residuals, density_argmax_grid, p_star_hoop, plane_coeffs, prob_comb_below_plane, script_a,
    script_a_by_quadrature, theta_from_phi, FKernelTable, PhiTriple, PlanePlacement, ThetaTriple,
};
use crate::comb::{
    brute_force_support_pair, brute_force_support_triple, sample_circular_comb_with, sample_line_comb_with,
    support_pair, support_triple, HeightDistribution, Placement,
};
use crate::error::{Error, Result};
use crate::interval::{
    marginal_right, p_star_beam, prob_comb_below_line, q_decomposition, scratch_rate_right,
    scratch_rate_right_reference, LinePlacement, SupportPoint2,
};
use crate::montecarlo::{
    collect_histogram, estimate_comb_below, estimate_p_star_curve, estimate_scratch_rates, ExperimentConfig,
    ExperimentKind, FixedPlacement,
};
use crate::quadrature::{integrate_1d, integrate_2d, LinearBound, QuadratureSpec, Region2};
use crate::stats::{expected_fractions, fit_against, DomainTag, Histogram2D};

/// Run sizes. `Full` uses the published sizes; `Fast` shrinks the
/// Monte-Carlo runs so the suite finishes in about a minute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Profile {
    Fast,
    Full,
}

/// The two limit densities, with their additive constants exposed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LawSet {
    /// Constant term inside the interval density bracket (`1/6`).
    pub interval_constant: f64,
    /// Constant term inside the circle density bracket (`1/pi^2`).
    pub circle_constant: f64,
}

impl Default for LawSet {
    fn default() -> Self {
        Self { interval_constant: 1.0 / 6.0, circle_constant: 1.0 / (PI * PI) }
    }
}

impl LawSet {
    pub fn density_interval(&self, a1: f64, a2: f64) -> f64 {
        if !((-1.0..=0.0).contains(&a1) && (0.0..=1.0).contains(&a2)) {
            return 0.0;
        }
        let right = 4.0 / (3.0 * (1.0 + a2).powi(3));
        let left = 4.0 / (3.0 * (1.0 - a1).powi(3));
        (a2 - a1) * (right + left + self.interval_constant)
    }

    pub fn density_circle(&self, t1: f64, t2: f64) -> f64 {
        let Ok(theta) = ThetaTriple::from_pair(t1, t2) else { return 0.0 };
        let table = FKernelTable::shared();
        let theta = theta.theta();
        let sines: f64 = theta.iter().map(|t| (t / 2.0).sin()).product();
        let kernels: f64 = theta.iter().map(|&t| table.eval(t)).sum();
        2.0 * PI * sines * (self.circle_constant + kernels)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub id: u32,
    pub name: String,
    pub expected: String,
    pub observed: String,
    pub tolerance: String,
    pub passed: bool,
    /// Reported only; never fails the suite.
    pub informational: bool,
    pub elapsed_seconds: f64,
}

impl Outcome {
    pub fn status(&self) -> &'static str {
        match (self.informational, self.passed) {
            (true, _) => "INFO",
            (false, true) => "PASS",
            (false, false) => "FAIL",
        }
    }

    /// A non-informational check that did not pass.
    pub fn is_failure(&self) -> bool {
        !self.informational && !self.passed
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {:>2} {} | expected {} | observed {} | tolerance {} | {:.1} s",
            self.status(),
            self.id,
            self.name,
            self.expected,
            self.observed,
            self.tolerance,
            self.elapsed_seconds
        )
    }
}

struct Draft {
    expected: String,
    observed: String,
    tolerance: String,
    passed: bool,
}

fn timed(id: u32, name: &str, informational: bool, body: impl FnOnce() -> Result<Draft>) -> Outcome {
    let started = Instant::now();
    let draft = body().unwrap_or_else(|e| Draft {
        expected: "a completed run".into(),
        observed: format!("error: {e}"),
        tolerance: "-".into(),
        passed: false,
    });
    Outcome {
        id,
        name: name.to_string(),
        expected: draft.expected,
        observed: draft.observed,
        tolerance: draft.tolerance,
        passed: draft.passed,
        informational,
        elapsed_seconds: started.elapsed().as_secs_f64(),
    }
}

const ANALYTIC: QuadratureSpec = QuadratureSpec::analytic();
const MC_SPEC: QuadratureSpec = QuadratureSpec::monte_carlo();

fn rect() -> Region2<f64> {
    Region2::rect(-1.0, 0.0, 0.0, 1.0)
}

fn theta_triangle() -> Region2<f64> {
    Region2::Between {
        x: (0.0, PI),
        lower: LinearBound { intercept: PI, slope: -1.0 },
        upper: LinearBound::constant(PI),
    }
}

pub fn interval_normalization(laws: &LawSet) -> Outcome {
    timed(1, "interval density normalization", false, || {
        let mass = integrate_2d(|a1, a2| laws.density_interval(a1, a2), &rect(), &ANALYTIC)?;
        let marginal = integrate_1d(|a2| marginal_right(a2).unwrap_or(f64::NAN), 0.0, 1.0, &ANALYTIC)?;
        let err = (mass - 1.0).abs().max((marginal - 1.0).abs());
        Ok(Draft {
            expected: "mass 1, marginal mass 1".into(),
            observed: format!("mass {mass:.12}, marginal mass {marginal:.12}"),
            tolerance: "1e-8".into(),
            passed: err <= 1e-8,
        })
    })
}

pub fn marginal_identity(laws: &LawSet) -> Outcome {
    timed(2, "right marginal closed form and 14/11 ratio", false, || {
        let mut worst = 0.0f64;
        for i in 0..50 {
            let a2 = i as f64 / 49.0;
            let quad = integrate_1d(|a1| laws.density_interval(a1, a2), -1.0, 0.0, &ANALYTIC)?;
            worst = worst.max((quad - marginal_right(a2)?).abs());
        }
        let ratio: f64 = marginal_right(1.0)? / marginal_right(0.0)?;
        Ok(Draft {
            expected: "closed form = quadrature at 50 points; ratio 14/11".into(),
            observed: format!("max diff {worst:.3e}; ratio {ratio:.12}"),
            tolerance: "1e-8; 1e-9".into(),
            passed: worst <= 1e-8 && (ratio - 14.0 / 11.0).abs() <= 1e-9,
        })
    })
}

pub fn beam_walk_survival(laws: &LawSet) -> Outcome {
    timed(3, "beam walk-survival closed form", false, || {
        let mut worst = 0.0f64;
        for i in 0..20 {
            let mu = i as f64 / 20.0;
            let region = Region2::rect(-1.0, -mu, mu, 1.0);
            let quad = integrate_2d(|a1, a2| laws.density_interval(a1, a2), &region, &ANALYTIC)?;
            worst = worst.max((quad - p_star_beam(mu)?).abs());
        }
        let half = p_star_beam(0.5f64)?;
        Ok(Draft {
            expected: "closed form = quadrature at 20 mu; p*(0.5) = 0.252314815".into(),
            observed: format!("max diff {worst:.3e}; p*(0.5) = {half:.9}"),
            tolerance: "1e-8; 1e-6".into(),
            passed: worst <= 1e-8 && (half - 0.252_314_815).abs() <= 1e-6,
        })
    })
}

pub fn decomposition(laws: &LawSet) -> Outcome {
    timed(4, "three-term decomposition of the interval density", false, || {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut worst = 0.0f64;
        for _ in 0..1000 {
            let (a1, a2) = (-rng.random::<f64>(), rng.random::<f64>());
            let q = q_decomposition(&SupportPoint2::new(a1, a2)?);
            worst = worst.max((q.sum() - laws.density_interval(a1, a2)).abs());
        }
        Ok(Draft {
            expected: "Q1 + Q2+ + Q2- = p at 1000 random points".into(),
            observed: format!("max diff {worst:.3e}"),
            tolerance: "1e-12".into(),
            passed: worst <= 1e-12,
        })
    })
}

struct Sizes {
    interval_teeth: usize,
    interval_trials: u64,
    circle_teeth: usize,
    circle_trials: u64,
    below_trials: u64,
    hoop_teeth: usize,
    hoop_trials: u64,
    oracle_cases: usize,
    scratch_teeth: usize,
    scratch_trials: u64,
    robust_teeth: usize,
    robust_trials: u64,
}

impl Sizes {
    fn of(profile: Profile) -> Self {
        match profile {
            Profile::Full => Self {
                interval_teeth: 1000,
                interval_trials: 1_000_000,
                circle_teeth: 400,
                circle_trials: 200_000,
                below_trials: 100_000,
                hoop_teeth: 4000,
                hoop_trials: 100_000,
                oracle_cases: 10_000,
                scratch_teeth: 1000,
                scratch_trials: 1_000_000,
                robust_teeth: 1000,
                robust_trials: 1_000_000,
            },
            Profile::Fast => Self {
                interval_teeth: 400,
                interval_trials: 200_000,
                circle_teeth: 400,
                circle_trials: 50_000,
                below_trials: 20_000,
                hoop_teeth: 2000,
                hoop_trials: 20_000,
                oracle_cases: 2000,
                scratch_teeth: 400,
                scratch_trials: 100_000,
                robust_teeth: 400,
                robust_trials: 200_000,
            },
        }
    }
}

/// Histogram of `cfg` compared with `density / norm`; returns the fit and
/// the degenerate count.
fn mc_fit(
    cfg: &ExperimentConfig,
    density: impl Fn(f64, f64) -> f64,
    norm: f64,
) -> Result<(crate::stats::FitReport, u64, u64)> {
    let (hist, degenerate) = collect_histogram(cfg)?;
    let expected = expected_fractions(&hist, density, norm, &MC_SPEC)?;
    Ok((fit_against(&hist, &expected)?, degenerate, hist.samples()))
}

pub fn interval_mc(laws: &LawSet, profile: Profile) -> Outcome {
    timed(5, "interval Monte-Carlo against the limit density", false, || {
        let s = Sizes::of(profile);
        let cfg = ExperimentConfig::new(ExperimentKind::Interval, s.interval_teeth, s.interval_trials, 20, 42);
        let (fit, degenerate, _) = mc_fit(&cfg, |a1, a2| laws.density_interval(a1, a2), 1.0)?;
        let chi = fit.chi_square_per_dof();
        Ok(Draft {
            expected: format!("N={}, {} trials, 20x20 bins, seed 42", cfg.n_teeth, cfg.trials),
            observed: format!(
                "TV {:.4}, chi2/dof {chi:.3} ({} dof), {degenerate} degenerate",
                fit.tv_distance, fit.dof
            ),
            tolerance: "TV <= 0.05, chi2/dof <= 1.6".into(),
            passed: fit.tv_distance <= 0.05 && chi <= 1.6,
        })
    })
}

fn random_theta(rng: &mut impl Rng) -> ThetaTriple<f64> {
    loop {
        if let Ok(t) = ThetaTriple::from_pair(rng.random_range(0.0..PI), rng.random_range(0.0..PI)) {
            return t;
        }
    }
}

pub fn cot_identities() -> Outcome {
    timed(6, "cotangent identities", false, || {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let mut worst = [0.0f64; 3];
        for _ in 0..10_000 {
            let r = cot_identity_residuals(&random_theta(&mut rng));
            for (w, v) in worst.iter_mut().zip(r) {
                *w = w.max(v.abs());
            }
        }
        Ok(Draft {
            expected: "three residuals 0 on 10^4 random triples".into(),
            observed: format!("max residuals {:.2e}, {:.2e}, {:.2e}", worst[0], worst[1], worst[2]),
            tolerance: "1e-10".into(),
            passed: worst.iter().all(|&w| w <= 1e-10),
        })
    })
}

/// Random contact triple whose gaps are an equilibrium.
fn random_phi(rng: &mut impl Rng) -> PhiTriple<f64> {
    loop {
        let mut phi = [0.0; 3].map(|_| rng.random_range(0.0..2.0 * PI));
        phi.sort_by(f64::total_cmp);
        if let Ok(p) = PhiTriple::new(phi) {
            if theta_from_phi(&p).is_ok() {
                return p;
            }
        }
    }
}

pub fn script_a_check() -> Outcome {
    timed(7, "ceiling-overlap factor closed form", false, || {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let spec = QuadratureSpec::new(1e-12, 1e-12, 60)?;
        let mut worst = 0.0f64;
        let mut checked = 0;
        while checked < 1000 {
            let phi = random_phi(&mut rng);
            let a = [0.0; 3].map(|_| rng.random_range(0.0..3.0));
            let placement = plane_coeffs(&phi, a)?;
            // keep A itself of moderate size so an absolute tolerance is meaningful
            if placement.is_case_one() || placement.sigma0() < 1e-2 {
                continue;
            }
            let diff = (script_a(&placement)? - script_a_by_quadrature(&placement, &spec)?).abs();
            worst = worst.max(diff);
            checked += 1;
        }
        let phi = PhiTriple::new([0.0, 2.0 * PI / 3.0, 4.0 * PI / 3.0])?;
        let edge = PlanePlacement::from_sigma(&phi, 1.0, 1.0, 0.0)?;
        let boundary = script_a(&edge)?;
        Ok(Draft {
            expected: "closed form = quadrature on 1000 case-2 placements; A = 1 at sigma* = sigma0".into(),
            observed: format!("max diff {worst:.3e}; boundary A = {boundary:.15}"),
            tolerance: "1e-8; 1e-12".into(),
            passed: worst <= 1e-8 && (boundary - 1.0).abs() <= 1e-12,
        })
    })
}

/// Fixed placements for the comb-below check, mixing both cases.
fn line_placements() -> Result<Vec<LinePlacement<f64>>> {
    [(2.0, 2.0, -1.0, 1.0), (1.0, 0.5, -0.5, 0.5), (3.0, 0.2, -0.3, 0.6), (0.1, 2.5, -0.8, 0.2), (0.5, 1.5, -0.2, 0.9)]
        .into_iter()
        .map(|(g1, g2, a1, a2)| LinePlacement::new(g1, g2, SupportPoint2::new(a1, a2)?))
        .collect()
}

fn plane_placements() -> Result<Vec<PlanePlacement<f64>>> {
    let phi = PhiTriple::new([0.3, 1.9, 4.0])?;
    let wide = PhiTriple::new([0.0, 2.0 * PI / 3.0, 4.0 * PI / 3.0])?;
    vec![
        plane_coeffs(&phi, [1.0, 1.0, 1.0]),
        plane_coeffs(&wide, [0.5, 0.8, 0.6]),
        plane_coeffs(&phi, [0.1, 3.0, 0.5]),
        plane_coeffs(&wide, [2.0, 0.1, 0.2]),
        plane_coeffs(&phi, [0.0, 1.0, 2.0]),
    ]
    .into_iter()
    .collect()
}

pub fn comb_below(profile: Profile) -> Outcome {
    timed(8, "comb-below-line and comb-below-plane probabilities", false, || {
        let s = Sizes::of(profile);
        let mut cfg = ExperimentConfig::new(ExperimentKind::Interval, 2000, s.below_trials, 2, 8);
        let mut worst = 0.0f64;
        let mut cases = Vec::new();
        for line in line_placements()? {
            let est = estimate_comb_below(&cfg, FixedPlacement::Line(&line))?;
            let z = (est.value - prob_comb_below_line(&line)).abs() / est.std_error;
            worst = worst.max(z);
            cases.push(if line.x_star().is_some() { 2 } else { 1 });
        }
        cfg.kind = ExperimentKind::Circle;
        for plane in plane_placements()? {
            let est = estimate_comb_below(&cfg, FixedPlacement::Plane(&plane))?;
            let z = (est.value - prob_comb_below_plane(&plane)).abs() / est.std_error;
            worst = worst.max(z);
            cases.push(if plane.is_case_one() { 1 } else { 2 });
        }
        Ok(Draft {
            expected: format!("5 line + 5 plane placements (cases {cases:?}), N=2000, {} combs", cfg.trials),
            observed: format!("max |z| {worst:.2}"),
            tolerance: "3 standard errors".into(),
            passed: worst <= 3.0,
        })
    })
}

pub fn circle_normalization(laws: &LawSet) -> Outcome {
    timed(9, "circle density normalization", false, || {
        let mass = integrate_2d(|t1, t2| laws.density_circle(t1, t2), &theta_triangle(), &MC_SPEC)?;
        let hist = Histogram2D::<f64>::for_domain(DomainTag::ThetaTriangle, 12, 12)?;
        let binned: f64 = expected_fractions(&hist, |t1, t2| laws.density_circle(t1, t2), 3.0, &MC_SPEC)?.iter().sum();
        Ok(Draft {
            expected: "mass 3 on the full triangle; 12x12 binned mass / 3 = 1".into(),
            observed: format!("mass {mass:.6}; binned {binned:.6}"),
            tolerance: "1e-3".into(),
            passed: (mass - 3.0).abs() <= 1e-3 && (binned - 1.0).abs() <= 1e-3,
        })
    })
}

pub fn circle_mc(laws: &LawSet, profile: Profile) -> Outcome {
    timed(10, "circle Monte-Carlo against the limit density", false, || {
        let s = Sizes::of(profile);
        let cfg = ExperimentConfig::new(ExperimentKind::Circle, s.circle_teeth, s.circle_trials, 12, 7);
        let (fit, degenerate, _) = mc_fit(&cfg, |t1, t2| laws.density_circle(t1, t2), 3.0)?;
        Ok(Draft {
            expected: format!("N={}, {} trials, 12x12 bins, seed 7", cfg.n_teeth, cfg.trials),
            observed: format!(
                "TV {:.4}, chi2/dof {:.3}, {degenerate} degenerate ({:.2}%)",
                fit.tv_distance,
                fit.chi_square_per_dof(),
                100.0 * degenerate as f64 / cfg.trials as f64
            ),
            tolerance: "TV <= 0.08".into(),
            passed: fit.tv_distance <= 0.08,
        })
    })
}

pub fn hoop_walk_survival(profile: Profile) -> Outcome {
    timed(11, "hoop walk-survival", false, || {
        let s = Sizes::of(profile);
        let zeros = [0.5, 0.6, 0.75, 1.0].iter().map(|&mu| p_star_hoop(mu, &MC_SPEC)).collect::<Result<Vec<f64>>>()?;
        let at_zero: f64 = p_star_hoop(0.0, &MC_SPEC)?;
        let (mut lo, mut hi) = (0.0f64, 0.5);
        for _ in 0..30 {
            let mid = 0.5 * (lo + hi);
            if p_star_hoop(mid, &MC_SPEC)? > 0.5 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let crossing = 0.5 * (lo + hi);
        let mus = [0.1, 0.2, 0.4];
        let cfg = ExperimentConfig::new(ExperimentKind::Circle, s.hoop_teeth, s.hoop_trials, 2, 11);
        let estimates = estimate_p_star_curve(&cfg, &mus)?;
        let mut zs = Vec::new();
        for (est, &mu) in estimates.iter().zip(&mus) {
            zs.push((est.value - p_star_hoop(mu, &MC_SPEC)?) / est.std_error);
        }
        let passed = zeros.iter().all(|&z| z == 0.0)
            && (at_zero - 1.0).abs() <= 1e-3
            && (crossing - 1.0 / 6.0).abs() <= 0.02
            && zs.iter().all(|z| z.abs() <= 3.0);
        Ok(Draft {
            expected: format!(
                "p*=0 for mu>=1/2; p*(0)=1; p*=1/2 at mu=1/6; MC (N={}, {} trials) at 0.1, 0.2, 0.4",
                cfg.n_teeth, cfg.trials
            ),
            observed: format!(
                "zeros {zeros:?}; p*(0) = {at_zero:.6}; crossing {crossing:.4}; MC z = [{}]",
                zs.iter().map(|z| format!("{z:.2}")).collect::<Vec<_>>().join(", ")
            ),
            tolerance: "exact; 1e-3; 0.02; 3 standard errors".into(),
            passed,
        })
    })
}

pub fn density_argmax(laws: &LawSet) -> Outcome {
    timed(12, "location of the circle density maximum", false, || {
        let n = 400;
        let cell = PI / n as f64;
        let (theta, value) = if *laws == LawSet::default() {
            density_argmax_grid::<f64>(n)?
        } else {
            let mut best = (ThetaTriple::from_pair(2.0 * PI / 3.0, 2.0 * PI / 3.0)?, f64::MIN);
            for i in 0..n {
                for j in 0..n {
                    let (t1, t2) = ((i as f64 + 0.5) * cell, (j as f64 + 0.5) * cell);
                    let v = laws.density_circle(t1, t2);
                    if v > best.1 {
                        best = (ThetaTriple::from_pair(t1, t2)?, v);
                    }
                }
            }
            best
        };
        let target = [PI, PI / 2.0, PI / 2.0];
        let distance = (0..3)
            .map(|k| {
                let t = theta.rotate(k).theta();
                (t[0] - target[0]).abs().max((t[1] - target[1]).abs())
            })
            .fold(f64::INFINITY, f64::min);
        Ok(Draft {
            expected: "argmax within one cell of an image of (pi, pi/2, pi/2)".into(),
            observed: format!("argmax {:?} (p = {value:.5}), {:.2} cells away", theta.theta(), distance / cell),
            tolerance: "one cell diagonal".into(),
            // cell centres sit half a cell from the boundary the maximum lies on
            passed: distance <= 1.5 * cell,
        })
    })
}

pub fn oracle_equivalence(profile: Profile) -> Outcome {
    timed(13, "settling algorithms against brute-force oracles", false, || {
        let s = Sizes::of(profile);
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let heights = HeightDistribution::Uniform01.sampler()?;
        let placements = [Placement::MidpointGrid, Placement::UniformRandom];
        let (mut pair_mismatch, mut pair_degenerate) = (0, 0);
        for case in 0..s.oracle_cases {
            let n = rng.random_range(2..=40);
            let comb = sample_line_comb_with::<f64, _>(n, &heights, placements[case % 2], &mut rng)?;
            match (support_pair(&comb), brute_force_support_pair(&comb, 200)) {
                (Ok(a), Ok(b)) if (a.left_index, a.right_index) == (b.left_index, b.right_index) => {}
                (Err(a), Err(b)) if a.is_degenerate() && b.is_degenerate() => pair_degenerate += 1,
                _ => pair_mismatch += 1,
            }
        }
        let (mut triple_mismatch, mut triple_degenerate) = (0, 0);
        for case in 0..s.oracle_cases {
            let n = rng.random_range(3..=16);
            let comb = sample_circular_comb_with::<f64, _>(n, &heights, placements[case % 2], &mut rng)?;
            match (support_triple(&comb), brute_force_support_triple(&comb, 60)) {
                (Ok(a), Ok(b)) if a.indices == b.indices => {}
                (Err(a), Err(b)) if a.is_degenerate() && b.is_degenerate() => triple_degenerate += 1,
                _ => triple_mismatch += 1,
            }
        }
        Ok(Draft {
            expected: format!("{} line combs (N<=40) and {} circular combs (N<=16)", s.oracle_cases, s.oracle_cases),
            observed: format!(
                "{pair_mismatch} + {triple_mismatch} mismatches; {pair_degenerate} + {triple_degenerate} agreed degenerate"
            ),
            tolerance: "zero mismatches".into(),
            passed: pair_mismatch == 0 && triple_mismatch == 0,
        })
    })
}

pub fn scratch_report(profile: Profile) -> Outcome {
    timed(14, "scratch rates at the middle and the end", true, || {
        let s = Sizes::of(profile);
        let (mid, end) = (scratch_rate_right(0.0f64, &ANALYTIC)?, scratch_rate_right(1.0f64, &ANALYTIC)?);
        let (ref_mid, ref_end) = (scratch_rate_right_reference(0.0f64)?, scratch_rate_right_reference(1.0f64)?);
        let constant = mid - 2.0 / 3.0;
        let cfg = ExperimentConfig::new(ExperimentKind::Interval, s.scratch_teeth, s.scratch_trials, 2, 14);
        let bins = 20;
        let profile = estimate_scratch_rates(&cfg, bins)?;
        let (mc_mid, mc_end) = (profile.right[0], profile.right[bins - 1]);
        // bin averages of the quadrature rate, for a like-for-like comparison
        let width = 1.0 / bins as f64;
        let quad_bin = |lo: f64| -> Result<f64> {
            Ok(integrate_1d(|a2| scratch_rate_right(a2, &MC_SPEC).unwrap_or(f64::NAN), lo, lo + width, &MC_SPEC)?
                / width)
        };
        let (bin_mid, bin_end) = (quad_bin(0.0)?, quad_bin(1.0 - width)?);
        let holds = [mid > end, ref_mid > ref_end, mc_mid > mc_end];
        Ok(Draft {
            expected: "scr2(0) > scr2(1) in all three estimates".into(),
            observed: format!(
                "quadrature {mid:.5} / {end:.5} (ratio {:.4}, constant {constant:.6}); printed form {ref_mid:.5} / {ref_end:.5} \
                 (ratio {:.4}); MC end bins {mc_mid:.4} / {mc_end:.4} vs quadrature bins {bin_mid:.4} / {bin_end:.4}; \
                 claim holds {holds:?}",
                mid / end,
                ref_mid / ref_end
            ),
            tolerance: "qualitative".into(),
            passed: holds.iter().all(|&h| h),
        })
    })
}

pub fn robustness(laws: &LawSet, profile: Profile) -> Outcome {
    timed(15, "other height laws and placements", true, || {
        let s = Sizes::of(profile);
        let base = ExperimentConfig::new(ExperimentKind::Interval, s.robust_teeth, s.robust_trials, 20, 15);
        let variants = [
            ("beta(2,2)", ExperimentConfig { dist: HeightDistribution::Beta { alpha: 2.0, beta: 2.0 }, ..base }),
            ("uniform placement", ExperimentConfig { placement: Placement::UniformRandom, ..base }),
        ];
        let mut observed = Vec::new();
        let mut passed = true;
        for (label, cfg) in variants {
            let (fit, _, _) = mc_fit(&cfg, |a1, a2| laws.density_interval(a1, a2), 1.0)?;
            passed &= fit.tv_distance <= 0.10;
            observed.push(format!("{label}: TV {:.4}", fit.tv_distance));
        }
        observed.push(format!("conjecture {}", if passed { "supported" } else { "not supported at this size" }));
        Ok(Draft {
            expected: format!("TV against the uniform-grid law (N={}, {} trials)", base.n_teeth, base.trials),
            observed: observed.join("; "),
            tolerance: "TV <= 0.10".into(),
            passed,
        })
    })
}

/// Runs one criterion by number.
pub fn run_criterion(id: u32, laws: &LawSet, profile: Profile) -> Result<Outcome> {
    Ok(match id {
        1 => interval_normalization(laws),
        2 => marginal_identity(laws),
        3 => beam_walk_survival(laws),
        4 => decomposition(laws),
        5 => interval_mc(laws, profile),
        6 => cot_identities(),
        7 => script_a_check(),
        8 => comb_below(profile),
        9 => circle_normalization(laws),
        10 => circle_mc(laws, profile),
        11 => hoop_walk_survival(profile),
        12 => density_argmax(laws),
        13 => oracle_equivalence(profile),
        14 => scratch_report(profile),
        15 => robustness(laws, profile),
        other => return Err(Error::InvalidInput(format!("no criterion {other}; criteria are numbered 1 to 15"))),
    })
}

/// Runs every criterion in order, handing each outcome to `report` as it
/// completes.
pub fn run_all(laws: &LawSet, profile: Profile, mut report: impl FnMut(&Outcome)) -> Vec<Outcome> {
    (1..=15)
        .map(|id| {
            let outcome = run_criterion(id, laws, profile).expect("criterion ids are in range");
            report(&outcome);
            outcome
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle::density_pt_at;
    use crate::interval::density_p_at;

    #[test]
    fn reference_laws_match_the_library() {
        let laws = LawSet::default();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let (a1, a2) = (-rng.random::<f64>(), rng.random::<f64>());
            assert!((laws.density_interval(a1, a2) - density_p_at(a1, a2).unwrap()).abs() < 1e-15);
            let (t1, t2) = (rng.random_range(0.0..PI), rng.random_range(0.0..PI));
            assert!((laws.density_circle(t1, t2) - density_pt_at(t1, t2)).abs() < 1e-12);
        }
    }

    #[test]
    fn analytic_criteria_pass() {
        let laws = LawSet::default();
        for id in [1, 2, 3, 4, 6, 7, 9, 12] {
            let o = run_criterion(id, &laws, Profile::Fast).unwrap();
            assert!(o.passed, "{o}");
        }
    }

    #[test]
    fn tampered_constant_is_caught() {
        let laws = LawSet { interval_constant: 0.2, ..LawSet::default() };
        for id in [1, 3, 4] {
            assert!(run_criterion(id, &laws, Profile::Fast).unwrap().is_failure());
        }
        let laws = LawSet { circle_constant: 0.2, ..LawSet::default() };
        assert!(run_criterion(9, &laws, Profile::Fast).unwrap().is_failure());
    }

    #[test]
    fn unknown_criterion() {
        assert!(run_criterion(16, &LawSet::default(), Profile::Fast).is_err());
    }

    #[test]
    fn informational_never_fails() {
        let o = Outcome {
            id: 14,
            name: "x".into(),
            expected: String::new(),
            observed: String::new(),
            tolerance: String::new(),
            passed: false,
            informational: true,
            elapsed_seconds: 0.0,
        };
        assert!(!o.is_failure());
        assert!(o.to_string().starts_with("[INFO]"));
    }
}
