//! Binned empirical densities and their comparison against analytic laws.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{integrate_2d, LinearBound, QuadratureSpec, Region2};
use crate::scalar::Real;

/// Which nominal domain a histogram covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DomainTag {
    /// `[-1, 0] x [0, 1]`, the support pairs `(a1, a2)`.
    IntervalRect,
    /// `[0, pi]^2` clipped to `theta1 + theta2 > pi`, the gap pairs
    /// `(theta1, theta2)`.
    ThetaTriangle,
}

/// Two-dimensional histogram with integer counts.
///
/// Each recorded sample may deposit several points (the circle experiment
/// deposits all three cyclic images of a gap triple), so `samples` counts
/// samples and `total` counts deposits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram2D<T> {
    x_edges: Vec<T>,
    y_edges: Vec<T>,
    /// Row-major, `counts[ix * ny + iy]`.
    counts: Vec<u64>,
    total: u64,
    samples: u64,
    domain: DomainTag,
}

fn check_edges<T: Real>(edges: &[T], axis: &str) -> Result<()> {
    if edges.len() < 2 {
        return Err(Error::InvalidInput(format!("{axis} edges need at least two boundaries")));
    }
    if edges.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidInput(format!("{axis} edges must be strictly increasing")));
    }
    Ok(())
}

fn uniform_edges<T: Real>(lo: T, hi: T, bins: usize) -> Vec<T> {
    let n = T::from_usize(bins).expect("bin count fits");
    (0..=bins)
        .map(|i| if i == bins { hi } else { lo + (hi - lo) * T::from_usize(i).expect("index fits") / n })
        .collect()
}

fn locate<T: Real>(edges: &[T], v: T) -> Option<usize> {
    let last = edges.len() - 1;
    if v < edges[0] || v > edges[last] || v.is_nan() {
        return None;
    }
    // partition_point gives the first edge strictly greater than v
    let idx = edges.partition_point(|e| *e <= v);
    Some(idx.saturating_sub(1).min(last - 1))
}

impl<T: Real> Histogram2D<T> {
    pub fn new(x_edges: Vec<T>, y_edges: Vec<T>, domain: DomainTag) -> Result<Self> {
        check_edges(&x_edges, "x")?;
        check_edges(&y_edges, "y")?;
        let counts = vec![0; (x_edges.len() - 1) * (y_edges.len() - 1)];
        Ok(Self { x_edges, y_edges, counts, total: 0, samples: 0, domain })
    }

    /// Uniform bins over the nominal domain of `domain`.
    pub fn for_domain(domain: DomainTag, bins_x: usize, bins_y: usize) -> Result<Self> {
        if bins_x < 2 || bins_y < 2 {
            return Err(Error::InvalidInput(format!("need at least 2 bins per axis, got {bins_x}x{bins_y}")));
        }
        let (x, y) = match domain {
            DomainTag::IntervalRect => ((-T::one(), T::zero()), (T::zero(), T::one())),
            DomainTag::ThetaTriangle => ((T::zero(), T::PI()), (T::zero(), T::PI())),
        };
        Self::new(uniform_edges(x.0, x.1, bins_x), uniform_edges(y.0, y.1, bins_y), domain)
    }

    pub fn x_edges(&self) -> &[T] {
        &self.x_edges
    }

    pub fn y_edges(&self) -> &[T] {
        &self.y_edges
    }

    pub fn domain(&self) -> DomainTag {
        self.domain
    }

    pub fn nx(&self) -> usize {
        self.x_edges.len() - 1
    }

    pub fn ny(&self) -> usize {
        self.y_edges.len() - 1
    }

    pub fn n_bins(&self) -> usize {
        self.counts.len()
    }

    pub fn count(&self, ix: usize, iy: usize) -> u64 {
        self.counts[ix * self.ny() + iy]
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn samples(&self) -> u64 {
        self.samples
    }

    pub fn bin_of(&self, x: T, y: T) -> Option<(usize, usize)> {
        Some((locate(&self.x_edges, x)?, locate(&self.y_edges, y)?))
    }

    /// Records one sample that deposits each of `points` with unit weight.
    /// Nothing is recorded if any point falls outside the edges.
    pub fn deposit(&mut self, points: &[(T, T)]) -> Result<()> {
        let mut bins = Vec::with_capacity(points.len());
        for &(x, y) in points {
            let (ix, iy) = self
                .bin_of(x, y)
                .ok_or_else(|| Error::InvalidInput(format!("point ({x}, {y}) lies outside the histogram")))?;
            bins.push(ix * self.ny() + iy);
        }
        for b in bins {
            self.counts[b] += 1;
        }
        self.total += points.len() as u64;
        self.samples += 1;
        Ok(())
    }

    /// Adds the counts of a histogram with identical edges.
    pub fn merge(&mut self, other: &Self) -> Result<()> {
        if self.x_edges != other.x_edges || self.y_edges != other.y_edges || self.domain != other.domain {
            return Err(Error::InvalidInput("cannot merge histograms with different binning".into()));
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.total += other.total;
        self.samples += other.samples;
        Ok(())
    }

    /// Empirical probability of each bin (counts over total deposits).
    pub fn fractions(&self) -> Vec<f64> {
        let total = self.total.max(1) as f64;
        self.counts.iter().map(|&c| c as f64 / total).collect()
    }

    /// Pieces of bin `(ix, iy)` that lie inside the domain.
    pub fn bin_regions(&self, ix: usize, iy: usize) -> Vec<Region2<T>> {
        let (x0, x1) = (self.x_edges[ix], self.x_edges[ix + 1]);
        let (y0, y1) = (self.y_edges[iy], self.y_edges[iy + 1]);
        match self.domain {
            DomainTag::IntervalRect => vec![Region2::rect(x0, x1, y0, y1)],
            DomainTag::ThetaTriangle => clip_above_antidiagonal(x0, x1, y0, y1, T::PI()),
        }
    }

    /// Area of bin `(ix, iy)` inside the domain.
    pub fn bin_area(&self, ix: usize, iy: usize) -> T {
        self.bin_regions(ix, iy)
            .iter()
            .map(|r| match *r {
                Region2::Rect { x, y } => (x.1 - x.0) * (y.1 - y.0),
                Region2::Between { x, lower, upper } => {
                    let mid = (x.0 + x.1) / T::lit(2.0);
                    (upper.at(mid) - lower.at(mid)) * (x.1 - x.0)
                }
            })
            .fold(T::zero(), |a, b| a + b)
    }
}

/// `[x0,x1] x [y0,y1]` intersected with `x + y >= c`, as at most two pieces
/// with linear inner bounds.
fn clip_above_antidiagonal<T: Real>(x0: T, x1: T, y0: T, y1: T, c: T) -> Vec<Region2<T>> {
    if x1 + y1 <= c {
        return Vec::new();
    }
    if x0 + y0 >= c {
        return vec![Region2::rect(x0, x1, y0, y1)];
    }
    let mut pieces = Vec::with_capacity(2);
    let knee = c - y0;
    let slanted = (x0.max(c - y1), x1.min(knee));
    if slanted.0 < slanted.1 {
        pieces.push(Region2::Between {
            x: slanted,
            lower: LinearBound { intercept: c, slope: -T::one() },
            upper: LinearBound::constant(y1),
        });
    }
    let flat = (x0.max(knee), x1);
    if flat.0 < flat.1 {
        pieces.push(Region2::rect(flat.0, flat.1, y0, y1));
    }
    pieces
}

/// Goodness-of-fit summary of a histogram against a density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub tv_distance: f64,
    pub chi_square: f64,
    pub dof: usize,
    pub n_effective_bins: usize,
}

impl FitReport {
    pub fn chi_square_per_dof(&self) -> f64 {
        if self.dof == 0 {
            f64::NAN
        } else {
            self.chi_square / self.dof as f64
        }
    }
}

/// Minimum expected count for a bin to enter the chi-square sum on its own.
pub const CHI_SQUARE_POOL_THRESHOLD: f64 = 5.0;

/// Expected probability of each bin under `density / density_norm`.
pub fn expected_fractions<T, F>(
    hist: &Histogram2D<T>,
    density: F,
    density_norm: T,
    spec: &QuadratureSpec,
) -> Result<Vec<f64>>
where
    T: Real,
    F: Fn(T, T) -> T,
{
    let mut out = Vec::with_capacity(hist.n_bins());
    for ix in 0..hist.nx() {
        for iy in 0..hist.ny() {
            let mut mass = T::zero();
            for region in hist.bin_regions(ix, iy) {
                mass = mass + integrate_2d(&density, &region, spec)?;
            }
            out.push((mass / density_norm).to_f64_lossy());
        }
    }
    Ok(out)
}

/// Total variation and pooled chi-square of a histogram against expected
/// bin probabilities (in the same row-major order as the counts).
pub fn fit_against<T: Real>(hist: &Histogram2D<T>, expected: &[f64]) -> Result<FitReport> {
    if hist.total() == 0 || hist.samples() == 0 {
        return Err(Error::InvalidInput("histogram is empty".into()));
    }
    if expected.len() != hist.n_bins() {
        return Err(Error::InvalidInput(format!(
            "expected {} bin probabilities, got {}",
            hist.n_bins(),
            expected.len()
        )));
    }
    let empirical = hist.fractions();
    let tv = 0.5 * empirical.iter().zip(expected).map(|(p, q)| (p - q).abs()).sum::<f64>();

    // chi-square in units of samples, so multi-deposit histograms are not
    // over-counted
    let samples = hist.samples() as f64;
    let per_sample = hist.total() as f64 / samples;
    let mut chi_square = 0.0;
    let mut kept = 0usize;
    let (mut pool_obs, mut pool_exp) = (0.0, 0.0);
    for (&count, &q) in hist.counts().iter().zip(expected) {
        let observed = count as f64 / per_sample;
        let exp = q * samples;
        if exp >= CHI_SQUARE_POOL_THRESHOLD {
            chi_square += (observed - exp).powi(2) / exp;
            kept += 1;
        } else {
            pool_obs += observed;
            pool_exp += exp;
        }
    }
    if kept == 0 {
        return Err(Error::InsufficientExpected);
    }
    let mut n_effective_bins = kept;
    if pool_exp > 0.0 {
        chi_square += (pool_obs - pool_exp).powi(2) / pool_exp;
        n_effective_bins += 1;
    }
    Ok(FitReport { tv_distance: tv.clamp(0.0, 1.0), chi_square, dof: n_effective_bins - 1, n_effective_bins })
}

/// Compares a histogram with `density`, whose integral over the domain is
/// `density_norm`, using the Monte-Carlo quadrature tolerance.
pub fn compare_histogram<T, F>(hist: &Histogram2D<T>, density: F, density_norm: T) -> Result<FitReport>
where
    T: Real,
    F: Fn(T, T) -> T,
{
    let expected = expected_fractions(hist, density, density_norm, &QuadratureSpec::monte_carlo())?;
    fit_against(hist, &expected)
}

/// Total variation distance between the empirical laws of two histograms
/// with identical binning.
pub fn tv_between<T: Real>(a: &Histogram2D<T>, b: &Histogram2D<T>) -> Result<f64> {
    if a.x_edges() != b.x_edges() || a.y_edges() != b.y_edges() {
        return Err(Error::InvalidInput("histograms have different binning".into()));
    }
    let (pa, pb) = (a.fractions(), b.fractions());
    Ok(0.5 * pa.iter().zip(&pb).map(|(x, y)| (x - y).abs()).sum::<f64>())
}
