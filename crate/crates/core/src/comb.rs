//! Random combs and the support configurations of a rigid body resting on
//! them.
//!
//! A line comb carries teeth at abscissae in `(-1, 1)`; the rigid interval
//! `[-1, 1]` dropped onto it rests on the upper-convex-hull edge of the tooth
//! tips that spans `x = 0`. A circular comb carries teeth on the unit
//! circle; the rigid hoop rests on the upper-hull facet of the tips whose
//! projection contains the origin, found here by pivoting a supporting plane.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution, Triangular};
use serde::{Deserialize, Serialize};

use crate::error::{Degeneracy, Error, Result};
use crate::scalar::Real;

/// Default cap on teeth for [`brute_force_support_pair`].
pub const PAIR_ORACLE_CAP: usize = 200;
/// Default cap on teeth for [`brute_force_support_triple`].
pub const TRIPLE_ORACLE_CAP: usize = 60;

/// Law of the tooth heights, always supported on `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HeightDistribution {
    #[default]
    Uniform01,
    Beta {
        alpha: f64,
        beta: f64,
    },
    Triangular {
        mode: f64,
    },
}

impl HeightDistribution {
    pub fn validate(&self) -> Result<()> {
        match *self {
            HeightDistribution::Uniform01 => Ok(()),
            HeightDistribution::Beta { alpha, beta } if alpha > 0.0 && beta > 0.0 => Ok(()),
            HeightDistribution::Triangular { mode } if (0.0..=1.0).contains(&mode) => Ok(()),
            other => Err(Error::InvalidInput(format!("invalid height distribution {other:?}"))),
        }
    }

    pub fn sampler(&self) -> Result<HeightSampler> {
        self.validate()?;
        Ok(match *self {
            HeightDistribution::Uniform01 => HeightSampler::Uniform,
            HeightDistribution::Beta { alpha, beta } => HeightSampler::Beta(
                Beta::new(alpha, beta).map_err(|e| Error::InvalidInput(format!("beta distribution: {e}")))?,
            ),
            HeightDistribution::Triangular { mode } => HeightSampler::Triangular(
                Triangular::new(0.0, 1.0, mode)
                    .map_err(|e| Error::InvalidInput(format!("triangular distribution: {e}")))?,
            ),
        })
    }
}

/// Validated, ready-to-draw form of a [`HeightDistribution`].
#[derive(Debug, Clone, Copy)]
pub enum HeightSampler {
    Uniform,
    Beta(Beta<f64>),
    Triangular(Triangular<f64>),
}

impl HeightSampler {
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            HeightSampler::Uniform => rng.random::<f64>(),
            HeightSampler::Beta(d) => d.sample(rng),
            HeightSampler::Triangular(d) => d.sample(rng),
        }
    }
}

/// Where the teeth stand on the base.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Placement {
    /// `x_j = -1 + 2j/N`; puts a tooth at `x = 0` for even `N`.
    PaperGrid,
    /// `x_j = -1 + (2j - 1)/N`; never puts a tooth at `x = 0`.
    #[default]
    MidpointGrid,
    /// Independent uniform positions, sorted.
    UniformRandom,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LineComb<T> {
    positions: Vec<T>,
    heights: Vec<T>,
}

impl<T: Real> LineComb<T> {
    /// Positions must be strictly increasing in `[-1, 1]` with teeth on both
    /// sides of the center. A tooth exactly at `x = 0` is accepted
    /// ([`Placement::PaperGrid`] with even `N` produces one) but makes any
    /// settle that lands on it degenerate.
    pub fn new(positions: Vec<T>, heights: Vec<T>) -> Result<Self> {
        if positions.len() != heights.len() {
            return Err(Error::InvalidInput(format!("{} positions but {} heights", positions.len(), heights.len())));
        }
        if positions.len() < 2 {
            return Err(Error::InvalidInput("a line comb needs at least 2 teeth".into()));
        }
        if positions.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidInput("tooth positions must be strictly increasing".into()));
        }
        if positions.iter().any(|&x| x < -T::one() || x > T::one()) {
            return Err(Error::InvalidInput("tooth positions must lie in [-1, 1]".into()));
        }
        if !(positions[0] < T::zero() && positions[positions.len() - 1] > T::zero()) {
            return Err(Error::InvalidInput("need at least one tooth on each side of x = 0".into()));
        }
        if heights.iter().any(|h| !h.is_finite()) {
            return Err(Error::InvalidInput("tooth heights must be finite".into()));
        }
        Ok(Self { positions, heights })
    }

    pub fn positions(&self) -> &[T] {
        &self.positions
    }

    pub fn heights(&self) -> &[T] {
        &self.heights
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Multiplies every height by `factor > 0`.
    pub fn scaled(&self, factor: T) -> Self {
        Self { positions: self.positions.clone(), heights: self.heights.iter().map(|&h| h * factor).collect() }
    }

    /// Debug dump, `index,position_or_angle,height`.
    pub fn write_debug_csv<W: Write>(&self, out: W) -> Result<()> {
        write_dump(out, &self.positions, &self.heights)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CircularComb<T> {
    angles: Vec<T>,
    heights: Vec<T>,
}

impl<T: Real> CircularComb<T> {
    pub fn new(angles: Vec<T>, heights: Vec<T>) -> Result<Self> {
        if angles.len() != heights.len() {
            return Err(Error::InvalidInput(format!("{} angles but {} heights", angles.len(), heights.len())));
        }
        if angles.len() < 3 {
            return Err(Error::InvalidInput("a circular comb needs at least 3 teeth".into()));
        }
        if angles.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidInput("tooth angles must be strictly increasing".into()));
        }
        if angles[0] < T::zero() || angles[angles.len() - 1] >= T::TAU() {
            return Err(Error::InvalidInput("tooth angles must lie in [0, 2pi)".into()));
        }
        if heights.iter().any(|h| !h.is_finite()) {
            return Err(Error::InvalidInput("tooth heights must be finite".into()));
        }
        Ok(Self { angles, heights })
    }

    pub fn angles(&self) -> &[T] {
        &self.angles
    }

    pub fn heights(&self) -> &[T] {
        &self.heights
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    pub fn scaled(&self, factor: T) -> Self {
        Self { angles: self.angles.clone(), heights: self.heights.iter().map(|&h| h * factor).collect() }
    }

    pub fn write_debug_csv<W: Write>(&self, out: W) -> Result<()> {
        write_dump(out, &self.angles, &self.heights)
    }
}

fn write_dump<T: Real, W: Write>(out: W, coords: &[T], heights: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["index", "position_or_angle", "height"])?;
    for (i, (c, h)) in coords.iter().zip(heights).enumerate() {
        w.write_record([i.to_string(), c.to_string(), h.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Tooth abscissae for a placement; random placements redraw until both
/// halves are occupied.
pub fn line_positions<R: Rng + ?Sized>(n_teeth: usize, placement: Placement, rng: &mut R) -> Vec<f64> {
    let n = n_teeth as f64;
    match placement {
        Placement::PaperGrid => (1..=n_teeth).map(|j| -1.0 + 2.0 * j as f64 / n).collect(),
        Placement::MidpointGrid => (1..=n_teeth).map(|j| -1.0 + (2 * j - 1) as f64 / n).collect(),
        Placement::UniformRandom => loop {
            let mut xs: Vec<f64> = (0..n_teeth).map(|_| rng.random_range(-1.0..1.0)).collect();
            xs.sort_by(f64::total_cmp);
            xs.dedup();
            if xs.len() == n_teeth && xs[0] < 0.0 && xs[n_teeth - 1] > 0.0 {
                break xs;
            }
        },
    }
}

/// Tooth angles in `[0, 2pi)`, sorted. Both grid placements use
/// `alpha_j = 2 pi j / N` reduced modulo `2 pi`.
pub fn circle_angles<R: Rng + ?Sized>(n_teeth: usize, placement: Placement, rng: &mut R) -> Vec<f64> {
    let tau = std::f64::consts::TAU;
    match placement {
        Placement::PaperGrid | Placement::MidpointGrid => {
            (0..n_teeth).map(|j| tau * j as f64 / n_teeth as f64).collect()
        }
        Placement::UniformRandom => loop {
            let mut xs: Vec<f64> = (0..n_teeth).map(|_| rng.random_range(0.0..tau)).collect();
            xs.sort_by(f64::total_cmp);
            xs.dedup();
            if xs.len() == n_teeth {
                break xs;
            }
        },
    }
}

/// Draws a line comb with the given placement from an existing generator.
pub fn sample_line_comb_with<T: Real, R: Rng + ?Sized>(
    n_teeth: usize,
    heights: &HeightSampler,
    placement: Placement,
    rng: &mut R,
) -> Result<LineComb<T>> {
    if n_teeth < 2 {
        return Err(Error::InvalidInput(format!("a line comb needs at least 2 teeth, got {n_teeth}")));
    }
    let positions = line_positions(n_teeth, placement, rng);
    let hs = (0..n_teeth).map(|_| T::lit(heights.draw(rng))).collect();
    LineComb::new(positions.into_iter().map(T::lit).collect(), hs)
}

/// Draws a circular comb with the given placement from an existing generator.
pub fn sample_circular_comb_with<T: Real, R: Rng + ?Sized>(
    n_teeth: usize,
    heights: &HeightSampler,
    placement: Placement,
    rng: &mut R,
) -> Result<CircularComb<T>> {
    if n_teeth < 3 {
        return Err(Error::InvalidInput(format!("a circular comb needs at least 3 teeth, got {n_teeth}")));
    }
    let angles = circle_angles(n_teeth, placement, rng);
    let hs = (0..n_teeth).map(|_| T::lit(heights.draw(rng))).collect();
    CircularComb::new(angles.into_iter().map(T::lit).collect(), hs)
}

/// Line comb on the midpoint grid with i.i.d. heights, seeded.
pub fn sample_line_comb<T: Real>(n_teeth: usize, dist: HeightDistribution, rng_seed: u64) -> Result<LineComb<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    sample_line_comb_with(n_teeth, &dist.sampler()?, Placement::MidpointGrid, &mut rng)
}

/// Circular comb on the grid `2 pi j / N` with i.i.d. heights, seeded.
pub fn sample_circular_comb<T: Real>(
    n_teeth: usize,
    dist: HeightDistribution,
    rng_seed: u64,
) -> Result<CircularComb<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    sample_circular_comb_with(n_teeth, &dist.sampler()?, Placement::PaperGrid, &mut rng)
}

/// The two teeth an interval rests on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SupportPair<T> {
    pub left_index: usize,
    pub right_index: usize,
    pub a1: T,
    pub a2: T,
}

/// The three teeth a hoop rests on, in increasing angle (positive cyclic)
/// order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupportTriple<T> {
    pub indices: [usize; 3],
    pub phi: [T; 3],
}

#[inline]
fn cross<T: Real>(o: (T, T), a: (T, T), b: (T, T)) -> T {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Settles an interval with a caller-owned hull buffer.
pub fn support_pair_with<T: Real>(comb: &LineComb<T>, hull: &mut Vec<usize>) -> Result<SupportPair<T>> {
    let xs = &comb.positions;
    let hs = &comb.heights;
    let tip = |i: usize| (xs[i], hs[i]);

    // monotone chain, upper hull, input already sorted by x
    hull.clear();
    for i in 0..xs.len() {
        while hull.len() >= 2 && cross(tip(hull[hull.len() - 2]), tip(hull[hull.len() - 1]), tip(i)) >= T::zero() {
            hull.pop();
        }
        hull.push(i);
    }
    let k = hull.iter().position(|&i| xs[i] >= T::zero()).expect("a tooth right of center exists");
    if xs[hull[k]] == T::zero() {
        return Err(Error::Degenerate(Degeneracy::CenterOnBoundary));
    }
    let (l, r) = (hull[k - 1], hull[k]);
    check_chord_gaps(comb, l, r)?;
    Ok(SupportPair { left_index: l, right_index: r, a1: xs[l], a2: xs[r] })
}

/// Height of the chord through tips `l` and `r` minus each other tip; fails
/// on any gap within tolerance.
fn check_chord_gaps<T: Real>(comb: &LineComb<T>, l: usize, r: usize) -> Result<()> {
    let (xs, hs) = (&comb.positions, &comb.heights);
    let slope = (hs[r] - hs[l]) / (xs[r] - xs[l]);
    let tol = T::geometric_tol();
    for j in 0..xs.len() {
        if j == l || j == r {
            continue;
        }
        if hs[l] + slope * (xs[j] - xs[l]) - hs[j] <= tol {
            return Err(Error::Degenerate(Degeneracy::TiedTip));
        }
    }
    Ok(())
}

/// The pair of teeth whose tip chord dominates every tip and straddles the
/// center: the upper-hull edge over `x = 0`.
pub fn support_pair<T: Real>(comb: &LineComb<T>) -> Result<SupportPair<T>> {
    support_pair_with(comb, &mut Vec::with_capacity(64))
}

/// Exhaustive O(N^3) oracle for [`support_pair`].
pub fn brute_force_support_pair<T: Real>(comb: &LineComb<T>, cap: usize) -> Result<SupportPair<T>> {
    let n = comb.len();
    if n > cap {
        return Err(Error::CapExceeded { n, cap });
    }
    let (xs, hs) = (&comb.positions, &comb.heights);
    let tol = T::geometric_tol();
    let mut found = Vec::new();
    let mut tied = false;
    for l in (0..n).filter(|&i| xs[i] < T::zero()) {
        for r in (0..n).filter(|&i| xs[i] > T::zero()) {
            let slope = (hs[r] - hs[l]) / (xs[r] - xs[l]);
            let mut admissible = true;
            let mut touches = false;
            for j in (0..n).filter(|&j| j != l && j != r) {
                let gap = hs[l] + slope * (xs[j] - xs[l]) - hs[j];
                if gap < -tol {
                    admissible = false;
                    break;
                }
                touches |= gap <= tol;
            }
            if admissible {
                found.push((l, r));
                tied |= touches;
            }
        }
    }
    match found.as_slice() {
        [] if xs.iter().any(|&x| x == T::zero()) => Err(Error::Degenerate(Degeneracy::CenterOnBoundary)),
        [(l, r)] if !tied => Ok(SupportPair { left_index: *l, right_index: *r, a1: xs[*l], a2: xs[*r] }),
        [_] => Err(Error::Degenerate(Degeneracy::TiedTip)),
        many => Err(Error::NonUnique(many.len())),
    }
}

/// `z = c0 + cx x + cy y`.
#[derive(Debug, Clone, Copy)]
struct Plane<T> {
    c0: T,
    cx: T,
    cy: T,
}

impl<T: Real> Plane<T> {
    fn at(&self, p: (T, T)) -> T {
        self.c0 + self.cx * p.0 + self.cy * p.1
    }

    fn through(p: [(T, T); 3], h: [T; 3]) -> Option<Self> {
        let det = cross(p[0], p[1], p[2]);
        if det.abs() <= T::geometric_tol() {
            return None;
        }
        // Cramer on [x y 1] [cx cy c0]^T = h
        let d_cx = h[0] * (p[1].1 - p[2].1) - p[0].1 * (h[1] - h[2]) + (h[1] * p[2].1 - h[2] * p[1].1);
        let d_cy = p[0].0 * (h[1] - h[2]) - h[0] * (p[1].0 - p[2].0) + (p[1].0 * h[2] - p[2].0 * h[1]);
        let d_c0 = p[0].0 * (p[1].1 * h[2] - p[2].1 * h[1]) - p[0].1 * (p[1].0 * h[2] - p[2].0 * h[1])
            + h[0] * (p[1].0 * p[2].1 - p[2].0 * p[1].1);
        Some(Self { c0: d_c0 / det, cx: d_cx / det, cy: d_cy / det })
    }
}

/// Barycentric coordinates of the origin in triangle `p`.
fn origin_barycentric<T: Real>(p: [(T, T); 3]) -> [T; 3] {
    let area = cross(p[0], p[1], p[2]);
    let o = (T::zero(), T::zero());
    [cross(o, p[1], p[2]) / area, cross(p[0], o, p[2]) / area, cross(p[0], p[1], o) / area]
}

struct Tips<'a, T> {
    xy: Vec<(T, T)>,
    h: &'a [T],
}

impl<'a, T: Real> Tips<'a, T> {
    fn new(comb: &'a CircularComb<T>) -> Self {
        Self { xy: comb.angles.iter().map(|a| (a.cos(), a.sin())).collect(), h: &comb.heights }
    }

    /// Lowers `plane` along `plane - t * tilt` until the first tip outside
    /// `contacts` is hit; `tilt` is positive on the side being lowered.
    fn pivot(&self, plane: &Plane<T>, tilt: impl Fn((T, T)) -> T, contacts: &[usize]) -> Result<(usize, T)> {
        let tol = T::geometric_tol();
        let mut best: Option<(usize, T)> = None;
        let mut runner_up = T::infinity();
        for (j, &p) in self.xy.iter().enumerate() {
            if contacts.contains(&j) {
                continue;
            }
            let s = tilt(p);
            if s <= T::zero() {
                continue;
            }
            let t = (plane.at(p) - self.h[j]) / s;
            match best {
                Some((_, tb)) if t >= tb => runner_up = runner_up.min(t),
                Some((_, tb)) => {
                    runner_up = tb;
                    best = Some((j, t));
                }
                None => best = Some((j, t)),
            }
        }
        let (j, t) = best.ok_or(Error::Degenerate(Degeneracy::CenterOnBoundary))?;
        if t <= tol {
            return Err(Error::Degenerate(Degeneracy::TiedTip));
        }
        if runner_up - t <= tol {
            return Err(Error::Degenerate(Degeneracy::TiedPivot));
        }
        Ok((j, t))
    }
}

/// The three teeth whose tip plane dominates every tip and whose projected
/// triangle strictly contains the origin.
///
/// Starts from the horizontal plane on the highest tip, tilts it toward the
/// origin until a second tip is touched, then repeatedly rotates it about
/// the current contact edge, lowering it over the origin, until a third
/// contact closes a triangle around the origin. When the origin falls
/// outside, the contact opposite the most violated edge is released. Every
/// rotation strictly lowers the plane over the origin.
pub fn support_triple<T: Real>(comb: &CircularComb<T>) -> Result<SupportTriple<T>> {
    let tips = Tips::new(comb);
    let n = comb.len();
    let tol = T::geometric_tol();

    let top = (0..n)
        .max_by(|&a, &b| comb.heights[a].partial_cmp(&comb.heights[b]).expect("finite heights"))
        .expect("non-empty comb");
    let apex = tips.xy[top];
    let flat = Plane { c0: comb.heights[top], cx: T::zero(), cy: T::zero() };
    let tilt_to_center = |p: (T, T)| T::one() - (apex.0 * p.0 + apex.1 * p.1);
    let (second, t) = tips.pivot(&flat, tilt_to_center, &[top])?;
    let mut plane = Plane { c0: flat.c0 - t, cx: apex.0 * t, cy: apex.1 * t };
    let mut edge = [top, second];

    for _ in 0..4 * n {
        let (pa, pb) = (tips.xy[edge[0]], tips.xy[edge[1]]);
        let len = ((pb.0 - pa.0).powi(2) + (pb.1 - pa.1).powi(2)).sqrt();
        let origin_side = cross(pa, pb, (T::zero(), T::zero())) / len;
        if origin_side.abs() <= tol {
            return Err(Error::Degenerate(Degeneracy::CenterOnBoundary));
        }
        let sign = origin_side.signum();
        let tilt = |p: (T, T)| sign * cross(pa, pb, p) / len;
        let (third, _) = tips.pivot(&plane, tilt, &edge)?;
        let tri = [edge[0], edge[1], third];
        let pts = [tips.xy[tri[0]], tips.xy[tri[1]], tips.xy[tri[2]]];
        plane = Plane::through(pts, [tips.h[tri[0]], tips.h[tri[1]], tips.h[tri[2]]])
            .ok_or(Error::Degenerate(Degeneracy::TiedPivot))?;
        let bary = origin_barycentric(pts);
        let (worst, &lowest) = bary
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.partial_cmp(b.1).expect("finite barycentrics"))
            .expect("three coordinates");
        if lowest.abs() <= tol {
            return Err(Error::Degenerate(Degeneracy::CenterOnBoundary));
        }
        if lowest > T::zero() {
            for (j, &p) in tips.xy.iter().enumerate() {
                if !tri.contains(&j) && plane.at(p) - tips.h[j] <= tol {
                    return Err(Error::Degenerate(Degeneracy::TiedTip));
                }
            }
            let mut indices = tri;
            indices.sort_unstable();
            return Ok(SupportTriple { indices, phi: indices.map(|i| comb.angles[i]) });
        }
        edge = match worst {
            0 => [tri[1], tri[2]],
            1 => [tri[0], tri[2]],
            _ => [tri[0], tri[1]],
        };
    }
    Err(Error::Degenerate(Degeneracy::PivotCap))
}

/// Exhaustive O(N^4) oracle for [`support_triple`].
pub fn brute_force_support_triple<T: Real>(comb: &CircularComb<T>, cap: usize) -> Result<SupportTriple<T>> {
    let n = comb.len();
    if n > cap {
        return Err(Error::CapExceeded { n, cap });
    }
    let tips = Tips::new(comb);
    let tol = T::geometric_tol();
    let mut found = Vec::new();
    let mut tied: Option<Degeneracy> = None;
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let pts = [tips.xy[i], tips.xy[j], tips.xy[k]];
                let bary = origin_barycentric(pts);
                if bary.iter().any(|&b| b < -tol) {
                    continue;
                }
                let on_edge = bary.iter().any(|&b| b <= tol);
                let Some(plane) = Plane::through(pts, [tips.h[i], tips.h[j], tips.h[k]]) else {
                    continue;
                };
                let mut admissible = true;
                let mut touches = false;
                for (m, &p) in tips.xy.iter().enumerate() {
                    if m == i || m == j || m == k {
                        continue;
                    }
                    let gap = plane.at(p) - tips.h[m];
                    if gap < -tol {
                        admissible = false;
                        break;
                    }
                    touches |= gap <= tol;
                }
                if admissible {
                    found.push([i, j, k]);
                    if touches {
                        tied = Some(Degeneracy::TiedTip);
                    } else if on_edge {
                        tied = tied.or(Some(Degeneracy::CenterOnBoundary));
                    }
                }
            }
        }
    }
    match found.as_slice() {
        [tri] => match tied {
            None => Ok(SupportTriple { indices: *tri, phi: tri.map(|i| comb.angles[i]) }),
            Some(kind) => Err(Error::Degenerate(kind)),
        },
        many => Err(Error::NonUnique(many.len())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn line(pos: &[f64], h: &[f64]) -> LineComb<f64> {
        LineComb::new(pos.to_vec(), h.to_vec()).unwrap()
    }

    #[test]
    fn midpoint_grid_positions() {
        let c = sample_line_comb::<f64>(2, HeightDistribution::Uniform01, 5).unwrap();
        assert_eq!(c.positions(), &[-0.5, 0.5]);
        assert!(c.heights().iter().all(|h| (0.0..=1.0).contains(h)));
        let c = sample_line_comb::<f64>(4, HeightDistribution::Uniform01, 5).unwrap();
        assert_eq!(c.positions(), &[-0.75, -0.25, 0.25, 0.75]);
    }

    #[test]
    fn heights_average_one_half() {
        let c = sample_line_comb::<f64>(1000, HeightDistribution::Uniform01, 42).unwrap();
        let mean = c.heights().iter().sum::<f64>() / 1000.0;
        assert!((mean - 0.5).abs() < 0.05, "{mean}");
    }

    #[test]
    fn circle_grid_angles() {
        let c = sample_circular_comb::<f64>(3, HeightDistribution::Uniform01, 1).unwrap();
        let want = [0.0, 2.0 * PI / 3.0, 4.0 * PI / 3.0];
        for (a, w) in c.angles().iter().zip(want) {
            assert!((a - w).abs() < 1e-15);
        }
        let c = sample_circular_comb::<f64>(4, HeightDistribution::Uniform01, 1).unwrap();
        assert_eq!(c.angles(), &[0.0, PI / 2.0, PI, 3.0 * PI / 2.0]);
        let c = sample_circular_comb::<f64>(500, HeightDistribution::Uniform01, 7).unwrap();
        assert_eq!(c.len(), 500);
        assert!(c.heights().iter().all(|h| (0.0..=1.0).contains(h)));
    }

    #[test]
    fn invalid_tooth_counts() {
        assert!(sample_line_comb::<f64>(1, HeightDistribution::Uniform01, 0).is_err());
        assert!(sample_circular_comb::<f64>(2, HeightDistribution::Uniform01, 0).is_err());
        assert!(sample_line_comb::<f64>(10, HeightDistribution::Beta { alpha: 0.0, beta: 1.0 }, 0).is_err());
        assert!(sample_line_comb::<f64>(10, HeightDistribution::Triangular { mode: 1.5 }, 0).is_err());
    }

    #[test]
    fn constructor_rejects_bad_layouts() {
        assert!(LineComb::new(vec![-0.5, -0.5, 0.5], vec![0.0; 3]).is_err());
        assert!(LineComb::new(vec![-0.5, -0.25], vec![0.0; 2]).is_err());
        assert!(LineComb::new(vec![-1.5, 0.5], vec![0.0; 2]).is_err());
        assert!(LineComb::new(vec![-0.5, 0.5], vec![0.0; 3]).is_err());
        assert!(CircularComb::new(vec![0.0, 1.0, 7.0], vec![0.0; 3]).is_err());
    }

    #[test]
    fn determinism() {
        for dist in [
            HeightDistribution::Uniform01,
            HeightDistribution::Beta { alpha: 2.0, beta: 2.0 },
            HeightDistribution::Triangular { mode: 0.3 },
        ] {
            let a = sample_line_comb::<f64>(50, dist, 9).unwrap();
            let b = sample_line_comb::<f64>(50, dist, 9).unwrap();
            assert_eq!(a, b);
            let a = sample_circular_comb::<f64>(50, dist, 9).unwrap();
            let b = sample_circular_comb::<f64>(50, dist, 9).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn four_tooth_pair() {
        let c = line(&[-0.75, -0.25, 0.25, 0.75], &[0.2, 0.9, 0.1, 0.8]);
        let p = support_pair(&c).unwrap();
        assert_eq!((p.left_index, p.right_index), (1, 3));
        assert_eq!((p.a1, p.a2), (-0.25, 0.75));
        assert_eq!(brute_force_support_pair(&c, PAIR_ORACLE_CAP).unwrap(), p);
    }

    #[test]
    fn two_tooth_pair() {
        for h in [(0.1, 0.9), (0.7, 0.2), (0.5, 0.5)] {
            let c = line(&[-0.5, 0.5], &[h.0, h.1]);
            let p = support_pair(&c).unwrap();
            assert_eq!((p.left_index, p.right_index), (0, 1));
            assert_eq!(brute_force_support_pair(&c, PAIR_ORACLE_CAP).unwrap(), p);
        }
    }

    #[test]
    fn collinear_tips_are_not_unique() {
        let c = line(&[-0.5, 0.25, 0.5], &[1.0, 1.0, 1.0]);
        assert!(matches!(brute_force_support_pair(&c, PAIR_ORACLE_CAP), Err(Error::NonUnique(2))));
        assert!(support_pair(&c).unwrap_err().is_degenerate());
    }

    #[test]
    fn tooth_at_center_is_degenerate() {
        let c = line(&[-0.5, 0.0, 0.5], &[0.1, 0.9, 0.2]);
        assert!(matches!(support_pair(&c), Err(Error::Degenerate(Degeneracy::CenterOnBoundary))));
        assert!(brute_force_support_pair(&c, PAIR_ORACLE_CAP).unwrap_err().is_degenerate());
        // a low tooth at the center is harmless
        let c = line(&[-0.5, 0.0, 0.5], &[0.9, 0.1, 0.8]);
        assert_eq!(support_pair(&c).unwrap().left_index, 0);
    }

    #[test]
    fn oracle_cap() {
        let c = sample_line_comb::<f64>(30, HeightDistribution::Uniform01, 1).unwrap();
        assert!(matches!(brute_force_support_pair(&c, 20), Err(Error::CapExceeded { n: 30, cap: 20 })));
        let c = sample_circular_comb::<f64>(30, HeightDistribution::Uniform01, 1).unwrap();
        assert!(matches!(brute_force_support_triple(&c, 20), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn three_tooth_hoop() {
        let c = CircularComb::new(vec![0.0, 2.0 * PI / 3.0, 4.0 * PI / 3.0], vec![0.3, 0.9, 0.1]).unwrap();
        assert_eq!(support_triple(&c).unwrap().indices, [0, 1, 2]);
        assert_eq!(brute_force_support_triple(&c, TRIPLE_ORACLE_CAP).unwrap().indices, [0, 1, 2]);
    }

    #[test]
    fn square_comb_rests_on_a_diagonal() {
        // the upper hull edge over the origin is the diagonal 0-2, so the
        // hoop touches only two teeth: both algorithms must flag it
        let c = CircularComb::new(vec![0.0, PI / 2.0, PI, 1.5 * PI], vec![0.9, 0.5, 0.5, 0.1]).unwrap();
        assert!(support_triple(&c).unwrap_err().is_degenerate());
        assert!(brute_force_support_triple(&c, TRIPLE_ORACLE_CAP).unwrap_err().is_degenerate());
    }

    #[test]
    fn equal_heights_are_degenerate() {
        let c = CircularComb::new((0..7).map(|j| j as f64 * 0.8).collect(), vec![0.5; 7]).unwrap();
        assert!(brute_force_support_triple(&c, TRIPLE_ORACLE_CAP).unwrap_err().is_degenerate());
        assert!(support_triple(&c).unwrap_err().is_degenerate());
    }

    #[test]
    fn triple_contains_origin_and_dominates() {
        // odd tooth count: no diametral chords, so no antipodal support pair
        for seed in 0..200 {
            let c = sample_circular_comb::<f64>(41, HeightDistribution::Uniform01, seed).unwrap();
            let t = support_triple(&c).unwrap();
            let pts = t.phi.map(|a| (a.cos(), a.sin()));
            assert!(origin_barycentric(pts).iter().all(|&b| b > 0.0));
            let plane = Plane::through(pts, t.indices.map(|i| c.heights()[i])).unwrap();
            for (j, a) in c.angles().iter().enumerate() {
                assert!(plane.at((a.cos(), a.sin())) >= c.heights()[j] - 1e-12);
            }
        }
    }

    #[test]
    fn pair_chord_dominates() {
        for seed in 0..200 {
            let c = sample_line_comb::<f64>(60, HeightDistribution::Uniform01, seed).unwrap();
            let p = support_pair(&c).unwrap();
            assert!(p.a1 < 0.0 && 0.0 < p.a2);
            let slope = (c.heights()[p.right_index] - c.heights()[p.left_index]) / (p.a2 - p.a1);
            for (x, h) in c.positions().iter().zip(c.heights()) {
                assert!(c.heights()[p.left_index] + slope * (x - p.a1) >= h - 1e-12);
            }
        }
    }

    #[test]
    fn f32_settles_agree_with_f64() {
        for seed in 0..50 {
            let c64 = sample_line_comb::<f64>(40, HeightDistribution::Uniform01, seed).unwrap();
            let c32 = sample_line_comb::<f32>(40, HeightDistribution::Uniform01, seed).unwrap();
            if let (Ok(a), Ok(b)) = (support_pair(&c64), support_pair(&c32)) {
                assert_eq!((a.left_index, a.right_index), (b.left_index, b.right_index));
            }
        }
    }

    #[test]
    fn debug_dump_format() {
        let c = line(&[-0.5, 0.5], &[0.25, 1.0]);
        let mut buf = Vec::new();
        c.write_debug_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "index,position_or_angle,height\n0,-0.5,0.25\n1,0.5,1\n");
    }
}
