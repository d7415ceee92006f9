//! Limit law of the support triangle of a rigid hoop resting on a circular
//! random comb.
//!
//! A support triple is described by the angular gaps `theta = (t1, t2, t3)`
//! between consecutive contact teeth. Equilibrium requires every gap in
//! `(0, pi)`, so the gaps live on the open triangle
//! `{t1, t2 in (0, pi), t1 + t2 > pi}` with `t3 = 2 pi - t1 - t2`. On that
//! triangle the density is
//!
//! ```text
//! p_T(theta) = 2 pi * prod sin(t_i / 2) * (1 / pi^2 + sum f(t_i))
//! f(xi) = int_0^{xi/2} (xi - 2 phi) sin phi / ((pi - phi) cos phi + sin phi)^3 dphi
//! ```
//!
//! It is invariant under cyclic relabelling and has total mass 3, one unit
//! per relabelling.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::quadrature::{integrate_1d, integrate_2d, LinearBound, QuadratureSpec, Region2};
use crate::scalar::Real;

fn two_pi<T: Real>() -> T {
    T::PI() + T::PI()
}

/// Gaps between consecutive contact teeth, in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaTriple<T> {
    theta: [T; 3],
}

impl<T: Real> ThetaTriple<T> {
    pub fn new(theta: [T; 3]) -> Result<Self> {
        for &t in &theta {
            if !(t > T::zero() && t < T::PI()) {
                return Err(Error::domain("theta_i", t.to_f64_lossy(), "(0, pi)"));
            }
        }
        let sum = theta[0] + theta[1] + theta[2];
        if (sum - two_pi::<T>()).abs() > T::geometric_tol() {
            return Err(Error::domain("theta_1 + theta_2 + theta_3", sum.to_f64_lossy(), "{2 pi}"));
        }
        Ok(Self { theta })
    }

    /// Triple with `t3 = 2 pi - t1 - t2`.
    pub fn from_pair(t1: T, t2: T) -> Result<Self> {
        Self::new([t1, t2, two_pi::<T>() - t1 - t2])
    }

    pub fn theta(&self) -> [T; 3] {
        self.theta
    }

    /// Cyclic shift by `k` places: `rotate(1)` of `(a, b, c)` is `(b, c, a)`.
    pub fn rotate(&self, k: usize) -> Self {
        let t = self.theta;
        Self { theta: [t[k % 3], t[(k + 1) % 3], t[(k + 2) % 3]] }
    }

    /// `c_i = cot(t_i / 2)`.
    pub fn cot_halves(&self) -> [T; 3] {
        self.theta.map(|t| T::one() / (t / T::lit(2.0)).tan())
    }
}

/// Angular positions of three contact teeth in positive cyclic order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiTriple<T> {
    phi: [T; 3],
}

impl<T: Real> PhiTriple<T> {
    /// Accepts angles in `[0, 2 pi)` that wind once around the circle in
    /// the order given. Whether the gaps form an equilibrium is checked by
    /// [`theta_from_phi`].
    pub fn new(phi: [T; 3]) -> Result<Self> {
        for &p in &phi {
            if !(p >= T::zero() && p < two_pi::<T>()) {
                return Err(Error::domain("phi_i", p.to_f64_lossy(), "[0, 2 pi)"));
            }
        }
        let wraps = (0..3).filter(|&i| phi[(i + 1) % 3] <= phi[i]).count();
        if wraps != 1 {
            return Err(Error::InvalidInput(format!("angles {phi:?} are not in positive cyclic order")));
        }
        Ok(Self { phi })
    }

    pub fn phi(&self) -> [T; 3] {
        self.phi
    }

    /// Consecutive gaps `phi_{i+1} - phi_i` taken mod `2 pi`.
    fn gaps(&self) -> [T; 3] {
        let tau = two_pi::<T>();
        let p = self.phi;
        [0, 1, 2].map(|i| {
            let g = p[(i + 1) % 3] - p[i];
            if g < T::zero() {
                g + tau
            } else {
                g
            }
        })
    }
}

/// Gaps of a contact triple; fails unless each lies in `(0, pi)`, i.e. the
/// center lies strictly inside the contact triangle.
pub fn theta_from_phi<T: Real>(phi: &PhiTriple<T>) -> Result<ThetaTriple<T>> {
    let gaps = phi.gaps();
    if let Some(g) = gaps.iter().find(|&&g| !(g > T::zero() && g < T::PI())) {
        return Err(Error::NotEquilibrium(format!("gap {g} of {:?} is outside (0, pi)", phi.phi)));
    }
    // re-close the sum exactly; the mod-2pi wrap can leave an ulp behind
    let [a, b, _] = gaps;
    ThetaTriple::new([a, b, two_pi::<T>() - a - b])
}

/// Lexicographically smallest cyclic rotation.
pub fn canonicalize<T: Real>(theta: &ThetaTriple<T>) -> ThetaTriple<T> {
    (0..3)
        .map(|k| theta.rotate(k))
        .min_by(|x, y| x.theta.partial_cmp(&y.theta).unwrap_or(std::cmp::Ordering::Equal))
        .expect("three rotations")
}

fn kernel_denominator<T: Real>(phi: T) -> T {
    let d = (T::PI() - phi) * phi.cos() + phi.sin();
    d * d * d
}

/// `f(xi)` by adaptive quadrature of its defining integral.
pub fn f_kernel<T: Real>(xi: T, spec: &QuadratureSpec) -> Result<T> {
    if !(xi >= T::zero() && xi <= T::PI()) {
        return Err(Error::domain("xi", xi.to_f64_lossy(), "[0, pi]"));
    }
    let two = T::lit(2.0);
    integrate_1d(|phi| (xi - two * phi) * phi.sin() / kernel_denominator(phi), T::zero(), xi / two, spec)
}

/// `f'(xi) = int_0^{xi/2} sin phi / D(phi)^3 dphi`.
pub fn f_kernel_derivative<T: Real>(xi: T, spec: &QuadratureSpec) -> Result<T> {
    if !(xi >= T::zero() && xi <= T::PI()) {
        return Err(Error::domain("xi", xi.to_f64_lossy(), "[0, pi]"));
    }
    integrate_1d(|phi| phi.sin() / kernel_denominator(phi), T::zero(), xi / T::lit(2.0), spec)
}

/// Tolerance used to build the interpolation table.
pub const KERNEL_TABLE_SPEC: QuadratureSpec = QuadratureSpec { abs_tol: 1e-14, rel_tol: 1e-13, max_depth: 50 };

/// `f` tabulated on a uniform grid over `[0, pi]` with values and slopes,
/// evaluated by cubic Hermite interpolation.
#[derive(Debug, Clone)]
pub struct FKernelTable {
    step: f64,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl FKernelTable {
    pub const DEFAULT_NODES: usize = 1025;

    pub fn build(nodes: usize, spec: &QuadratureSpec) -> Result<Self> {
        if nodes < 2 {
            return Err(Error::InvalidInput(format!("kernel table needs at least 2 nodes, got {nodes}")));
        }
        let step = PI / (nodes - 1) as f64;
        let xs: Vec<f64> = (0..nodes).map(|i| (i as f64 * step).min(PI)).collect();
        let values = xs.iter().map(|&x| f_kernel(x, spec)).collect::<Result<_>>()?;
        let slopes = xs.iter().map(|&x| f_kernel_derivative(x, spec)).collect::<Result<_>>()?;
        Ok(Self { step, values, slopes })
    }

    /// Process-wide table, built on first use.
    pub fn shared() -> &'static FKernelTable {
        static TABLE: OnceLock<FKernelTable> = OnceLock::new();
        TABLE.get_or_init(|| {
            Self::build(Self::DEFAULT_NODES, &KERNEL_TABLE_SPEC).expect("kernel integrand is smooth on [0, pi]")
        })
    }

    pub fn nodes(&self) -> usize {
        self.values.len()
    }

    /// Interpolated `f(xi)`; `xi` is clamped to `[0, pi]`.
    pub fn eval(&self, xi: f64) -> f64 {
        let xi = xi.clamp(0.0, PI);
        let last = self.values.len() - 2;
        let i = ((xi / self.step) as usize).min(last);
        let h = self.step;
        let t = (xi - i as f64 * h) / h;
        let (t2, t3) = (t * t, t * t * t);
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.values[i] + h10 * h * self.slopes[i] + h01 * self.values[i + 1] + h11 * h * self.slopes[i + 1]
    }
}

fn kernel<T: Real>(xi: T) -> T {
    T::lit(FKernelTable::shared().eval(xi.to_f64_lossy()))
}

// Evaluated on the canonical rotation so that all rotations agree bitwise.
fn density_from<T: Real>(theta: &ThetaTriple<T>, f: impl Fn(T) -> Result<T>) -> Result<T> {
    let theta = canonicalize(theta).theta;
    let half = T::lit(0.5);
    let sines = theta.iter().fold(T::one(), |acc, &t| acc * (t * half).sin());
    let mut kernels = T::one() / (T::PI() * T::PI());
    for &t in &theta {
        kernels = kernels + f(t)?;
    }
    Ok(two_pi::<T>() * sines * kernels)
}

/// Density of the gap triple, using the shared interpolation table for `f`.
pub fn density_pt<T: Real>(theta: &ThetaTriple<T>) -> T {
    density_from(theta, |t| Ok(kernel(t))).expect("table lookup is infallible")
}

/// [`density_pt`] with `f` evaluated by direct quadrature.
pub fn density_pt_direct<T: Real>(theta: &ThetaTriple<T>, spec: &QuadratureSpec) -> Result<T> {
    density_from(theta, |t| f_kernel(t, spec))
}

/// Density at `(t1, t2)` with `t3` implied; zero outside the triangle.
pub fn density_pt_at<T: Real>(t1: T, t2: T) -> T {
    match ThetaTriple::from_pair(t1, t2) {
        Ok(theta) => density_pt(&theta),
        Err(_) => T::zero(),
    }
}

fn triangle<T: Real>() -> Region2<T> {
    Region2::Between {
        x: (T::zero(), T::PI()),
        lower: LinearBound { intercept: T::PI(), slope: -T::one() },
        upper: LinearBound::constant(T::PI()),
    }
}

/// Integral of [`density_pt`] over the whole gap triangle; 3 in the limit.
pub fn total_mass_by_quadrature<T: Real>(spec: &QuadratureSpec) -> Result<T> {
    integrate_2d(density_pt_at, &triangle(), spec)
}

/// Probability that a hoop with friction coefficient `mu` keeps its
/// contact triple when pushed around: the mass of gap triples with every
/// gap below `2 acos(mu)`.
pub fn p_star_hoop<T: Real>(mu: T, spec: &QuadratureSpec) -> Result<T> {
    if !(mu >= T::zero() && mu <= T::one()) {
        return Err(Error::domain("mu", mu.to_f64_lossy(), "[0, 1]"));
    }
    if mu >= T::lit(0.5) {
        return Ok(T::zero());
    }
    let alpha = mu.acos();
    let two_alpha = alpha + alpha;
    let region = Region2::Between {
        x: (two_pi::<T>() - T::lit(4.0) * alpha, two_alpha),
        lower: LinearBound { intercept: two_pi::<T>() - two_alpha, slope: -T::one() },
        upper: LinearBound::constant(two_alpha),
    };
    let mass: T = integrate_2d(density_pt_at, &region, spec)?;
    Ok(mass / T::lit(3.0))
}

/// Cell-center argmax of [`density_pt`] on an `n x n` grid over
/// `(0, pi)^2`, restricted to the triangle.
pub fn density_argmax_grid<T: Real>(n: usize) -> Result<(ThetaTriple<T>, T)> {
    if n < 2 {
        return Err(Error::InvalidInput(format!("grid needs at least 2 cells per side, got {n}")));
    }
    let h = T::PI() / T::lit(n as f64);
    let mut best: Option<(ThetaTriple<T>, T)> = None;
    for i in 0..n {
        for j in 0..n {
            let t1 = h * (T::lit(i as f64) + T::lit(0.5));
            let t2 = h * (T::lit(j as f64) + T::lit(0.5));
            let Ok(theta) = ThetaTriple::from_pair(t1, t2) else { continue };
            let v = density_pt(&theta);
            if best.as_ref().is_none_or(|(_, b)| v > *b) {
                best = Some((theta, v));
            }
        }
    }
    best.ok_or_else(|| Error::InvalidInput("grid has no cell inside the triangle".into()))
}

/// A supporting plane through three teeth at angles `phi`, whose tips sit
/// `A_i / N` below the ceiling `z = 1`. The plane is
/// `z = 1 - (sigma0 + sigma_x x + sigma_y y) / N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanePlacement<T> {
    sigma0: T,
    sigma_x: T,
    sigma_y: T,
    delta: T,
    a: [T; 3],
    phi: PhiTriple<T>,
}

impl<T: Real> PlanePlacement<T> {
    /// Placement with the given coefficients over the contact triple `phi`;
    /// the tip gaps `A_i` are read off the plane.
    pub fn from_sigma(phi: &PhiTriple<T>, sigma0: T, sigma_x: T, sigma_y: T) -> Result<Self> {
        let theta = theta_from_phi(phi)?.theta();
        let a = phi.phi.map(|p| sigma0 + sigma_x * p.cos() + sigma_y * p.sin());
        if let Some(v) = a.iter().find(|&&v| v < T::zero()) {
            return Err(Error::domain("A_i", v.to_f64_lossy(), "[0, inf)"));
        }
        let delta = theta.iter().fold(T::zero(), |acc, t| acc + t.sin());
        Ok(Self { sigma0, sigma_x, sigma_y, delta, a, phi: *phi })
    }

    pub fn sigma0(&self) -> T {
        self.sigma0
    }

    pub fn sigma_x(&self) -> T {
        self.sigma_x
    }

    pub fn sigma_y(&self) -> T {
        self.sigma_y
    }

    /// `sqrt(sigma_x^2 + sigma_y^2)`.
    pub fn sigma_star(&self) -> T {
        self.sigma_x.hypot(self.sigma_y)
    }

    /// `det[1, cos phi_i, sin phi_i] = sin t1 + sin t2 + sin t3`.
    pub fn delta(&self) -> T {
        self.delta
    }

    pub fn a(&self) -> [T; 3] {
        self.a
    }

    pub fn phi(&self) -> &PhiTriple<T> {
        &self.phi
    }

    /// Tilt `sigma_star / sigma0`, when `sigma0 > 0`.
    pub fn w(&self) -> Option<T> {
        (self.sigma0 > T::zero()).then(|| self.sigma_star() / self.sigma0)
    }

    /// `N (1 - z)` above the rim point at angle `phi`.
    pub fn depth_at(&self, phi: T) -> T {
        self.sigma0 + self.sigma_x * phi.cos() + self.sigma_y * phi.sin()
    }

    /// Case 1: the plane stays below the ceiling over the whole rim.
    pub fn is_case_one(&self) -> bool {
        self.sigma_star() < self.sigma0
    }
}

/// Solves `sigma0 + sigma_x cos phi_i + sigma_y sin phi_i = A_i` by
/// Cramer's rule.
pub fn plane_coeffs<T: Real>(phi: &PhiTriple<T>, a: [T; 3]) -> Result<PlanePlacement<T>> {
    if let Some(v) = a.iter().find(|&&v| !(v >= T::zero() && v.is_finite())) {
        return Err(Error::domain("A_i", v.to_f64_lossy(), "[0, inf)"));
    }
    theta_from_phi(phi)?;
    let p = phi.phi;
    let (c, s) = (p.map(T::cos), p.map(T::sin));
    let det3 = |m: [[T; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let rows = |col: [[T; 3]; 3]| [0, 1, 2].map(|i| [col[0][i], col[1][i], col[2][i]]);
    let one = [T::one(); 3];
    let delta = det3(rows([one, c, s]));
    if delta <= T::geometric_tol() {
        return Err(Error::InvalidInput(format!("contact triangle is degenerate (delta = {delta})")));
    }
    Ok(PlanePlacement {
        sigma0: det3(rows([a, c, s])) / delta,
        sigma_x: det3(rows([one, a, s])) / delta,
        sigma_y: det3(rows([one, c, a])) / delta,
        delta,
        a,
        phi: *phi,
    })
}

/// `sigma0 * A`: the rim-averaged positive part of the depth, times `2`.
/// Well defined at `sigma0 = 0`.
fn sigma0_script_a<T: Real>(placement: &PlanePlacement<T>) -> T {
    let (s0, s_star) = (placement.sigma0, placement.sigma_star());
    if placement.is_case_one() {
        return s0;
    }
    if s_star == T::zero() {
        return T::zero();
    }
    let phi_sigma = (-s0 / s_star).max(-T::one()).min(T::one()).acos();
    (s0 * phi_sigma + s_star * phi_sigma.sin()) / T::PI()
}

/// `A = (phi_s - tan phi_s) / pi` with `phi_s = acos(-sigma0 / sigma_star)`,
/// defined when the plane crosses the ceiling (`sigma_star >= sigma0 > 0`).
pub fn script_a<T: Real>(placement: &PlanePlacement<T>) -> Result<T> {
    let (s0, s_star) = (placement.sigma0, placement.sigma_star());
    if !(s0 > T::zero()) {
        return Err(Error::domain("sigma0", s0.to_f64_lossy(), "(0, inf)"));
    }
    if s_star < s0 {
        return Err(Error::InvalidInput(format!(
            "plane does not cross the ceiling (sigma_star {s_star} < sigma0 {s0})"
        )));
    }
    let phi_sigma = (-s0 / s_star).max(-T::one()).acos();
    Ok((phi_sigma - phi_sigma.tan()) / T::PI())
}

/// `A` from its definition `1 / (2 pi sigma0) int max(0, depth) dphi`.
pub fn script_a_by_quadrature<T: Real>(placement: &PlanePlacement<T>, spec: &QuadratureSpec) -> Result<T> {
    let s0 = placement.sigma0;
    if !(s0 > T::zero()) {
        return Err(Error::domain("sigma0", s0.to_f64_lossy(), "(0, inf)"));
    }
    // split at the sign changes of the depth so every piece is smooth; the
    // lowest rim point is sampled too, so a shallow dip is never stepped over
    const PANELS: usize = 256;
    let tau = two_pi::<T>();
    let depth = |phi: T| placement.depth_at(phi);
    let mut lowest = (-placement.sigma_y).atan2(-placement.sigma_x);
    if lowest < T::zero() {
        lowest = lowest + tau;
    }
    let mut samples: Vec<T> = (0..=PANELS).map(|k| tau * T::lit(k as f64 / PANELS as f64)).collect();
    samples.push(lowest.min(tau));
    samples.sort_by(|a, b| a.partial_cmp(b).expect("finite angles"));
    let mut breaks = vec![T::zero()];
    for w in samples.windows(2) {
        let (mut lo, mut hi) = (w[0], w[1]);
        let positive_at_lo = depth(lo) > T::zero();
        if positive_at_lo == (depth(hi) > T::zero()) {
            continue;
        }
        for _ in 0..200 {
            let mid = (lo + hi) / T::lit(2.0);
            if mid <= lo || mid >= hi {
                break;
            }
            if (depth(mid) > T::zero()) == positive_at_lo {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        breaks.push(lo);
    }
    breaks.push(two_pi::<T>());
    let mut integral = T::zero();
    for w in breaks.windows(2) {
        integral = integral + integrate_1d(|phi| depth(phi).max(T::zero()), w[0], w[1], spec)?;
    }
    Ok(integral / (two_pi::<T>() * s0))
}

/// Limit probability that every tooth of a uniform circular comb lies below
/// the supporting plane: `exp(-sigma0)` in case 1, `exp(-sigma0 A)` otherwise.
pub fn prob_comb_below_plane<T: Real>(placement: &PlanePlacement<T>) -> T {
    (-sigma0_script_a(placement)).exp()
}

/// Residuals of
/// `c1 c2 + c2 c3 + c3 c1 = 1`,
/// `sum sin t_i / prod sin(t_i / 2) = 4` and
/// `1 / prod sin(t_i / 2) = c1 + c2 + c3 - c1 c2 c3`.
pub fn cot_identity_residuals<T: Real>(theta: &ThetaTriple<T>) -> [T; 3] {
    let [c1, c2, c3] = theta.cot_halves();
    let half = T::lit(0.5);
    let sin_half = theta.theta.iter().fold(T::one(), |acc, &t| acc * (t * half).sin());
    let sin_sum = theta.theta.iter().fold(T::zero(), |acc, &t| acc + t.sin());
    [
        c1 * c2 + c2 * c3 + c3 * c1 - T::one(),
        sin_sum / sin_half - T::lit(4.0),
        T::one() / sin_half - (c1 + c2 + c3 - c1 * c2 * c3),
    ]
}
