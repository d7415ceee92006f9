//! Globally adaptive Gauss–Kronrod (7/15) quadrature in one dimension and
//! iterated quadrature over rectangles and regions with linear inner bounds.
//!
//! Integrands may be called from several threads at once by callers that
//! parallelise over independent integrals, so they are taken as `Fn`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Accuracy contract for a single integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Maximum bisection depth of any subinterval.
    pub max_depth: u32,
}

impl QuadratureSpec {
    pub fn new(abs_tol: f64, rel_tol: f64, max_depth: u32) -> Result<Self> {
        let spec = Self { abs_tol, rel_tol, max_depth };
        spec.validate()?;
        Ok(spec)
    }

    /// Tolerance used for analytic cross-checks.
    pub const fn analytic() -> Self {
        Self { abs_tol: 1e-10, rel_tol: 1e-10, max_depth: 50 }
    }

    /// Looser tolerance used inside Monte-Carlo comparison loops.
    pub const fn monte_carlo() -> Self {
        Self { abs_tol: 1e-6, rel_tol: 1e-6, max_depth: 40 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(Error::InvalidInput(format!(
                "quadrature tolerances must be positive (abs {}, rel {})",
                self.abs_tol, self.rel_tol
            )));
        }
        if self.max_depth < 10 {
            return Err(Error::InvalidInput(format!(
                "quadrature max_depth must be at least 10, got {}",
                self.max_depth
            )));
        }
        Ok(())
    }

    /// Spec for the inner integrals of an iterated 2D quadrature.
    pub fn inner(&self) -> Self {
        Self { abs_tol: self.abs_tol / 10.0, rel_tol: self.rel_tol / 10.0, ..*self }
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self::analytic()
    }
}

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
struct Segment<T> {
    lo: T,
    hi: T,
    value: T,
    error: T,
    depth: u32,
}

/// One Kronrod-15 panel with the QUADPACK error heuristic.
fn gk15<T, F>(f: &F, lo: T, hi: T, depth: u32) -> Result<Segment<T>>
where
    T: Real,
    F: Fn(T) -> Result<T>,
{
    let two = T::lit(2.0);
    let center = (lo + hi) / two;
    let half = (hi - lo) / two;
    let f_center = f(center)?;
    let mut kronrod = f_center * T::lit(WGK[7]);
    let mut gauss = f_center * T::lit(WG[3]);
    let mut abs_sum = kronrod.abs();
    let mut samples = [T::zero(); 15];
    samples[7] = f_center;
    for k in 0..7 {
        let dx = half * T::lit(XGK[k]);
        let left = f(center - dx)?;
        let right = f(center + dx)?;
        samples[k] = left;
        samples[14 - k] = right;
        let w = T::lit(WGK[k]);
        kronrod = kronrod + w * (left + right);
        abs_sum = abs_sum + w * (left.abs() + right.abs());
        if k % 2 == 1 {
            gauss = gauss + T::lit(WG[k / 2]) * (left + right);
        }
    }
    let mean = kronrod * T::lit(0.5);
    let mut asc = T::lit(WGK[7]) * (f_center - mean).abs();
    for k in 0..7 {
        asc = asc + T::lit(WGK[k]) * ((samples[k] - mean).abs() + (samples[14 - k] - mean).abs());
    }
    let value = kronrod * half;
    let abs_sum = abs_sum * half.abs();
    let asc = asc * half.abs();
    let mut error = ((kronrod - gauss) * half).abs();
    if asc != T::zero() && error != T::zero() {
        let scaled = (T::lit(200.0) * error / asc).powf(T::lit(1.5));
        error = asc * scaled.min(T::one());
    }
    let roundoff = T::lit(50.0) * T::epsilon() * abs_sum;
    if abs_sum > T::min_positive_value() / (T::lit(50.0) * T::epsilon()) {
        error = error.max(roundoff);
    }
    if !value.is_finite() {
        return Err(Error::InvalidInput("integrand is not finite on the interval".into()));
    }
    Ok(Segment { lo, hi, value, error, depth })
}

const MAX_SEGMENTS: usize = 200_000;

/// Integrates a fallible integrand; errors from the integrand propagate.
pub fn try_integrate_1d<T, F>(f: F, lo: T, hi: T, spec: &QuadratureSpec) -> Result<T>
where
    T: Real,
    F: Fn(T) -> Result<T>,
{
    spec.validate()?;
    if lo > hi {
        return Err(Error::InvalidInput(format!("integration bounds reversed: {lo} > {hi}")));
    }
    if lo == hi {
        return Ok(T::zero());
    }
    let abs_tol = T::lit(spec.abs_tol);
    let rel_tol = T::lit(spec.rel_tol);

    let mut segments = vec![gk15(&f, lo, hi, 0)?];
    loop {
        let (total, error) = segments.iter().fold((T::zero(), T::zero()), |(v, e), s| (v + s.value, e + s.error));
        if error <= abs_tol.max(rel_tol * total.abs()) {
            return Ok(total);
        }
        let (worst, _) = segments
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.error.partial_cmp(&b.1.error).unwrap_or(std::cmp::Ordering::Equal))
            .expect("at least one segment");
        let seg = segments.swap_remove(worst);
        if seg.depth >= spec.max_depth || segments.len() >= MAX_SEGMENTS {
            return Err(Error::NoConvergence {
                estimate: total.to_f64_lossy(),
                error: error.to_f64_lossy(),
                depth: seg.depth,
            });
        }
        let mid = (seg.lo + seg.hi) / T::lit(2.0);
        segments.push(gk15(&f, seg.lo, mid, seg.depth + 1)?);
        segments.push(gk15(&f, mid, seg.hi, seg.depth + 1)?);
    }
}

/// Adaptive integral of `f` over `[lo, hi]`.
///
/// Meets `|result - exact| <= max(abs_tol, rel_tol * |result|)` for smooth
/// integrands; fails with [`Error::NoConvergence`] once a subinterval would
/// need to be bisected past `max_depth`.
pub fn integrate_1d<T, F>(f: F, lo: T, hi: T, spec: &QuadratureSpec) -> Result<T>
where
    T: Real,
    F: Fn(T) -> T,
{
    try_integrate_1d(|x| Ok(f(x)), lo, hi, spec)
}

/// `y = intercept + slope * x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearBound<T> {
    pub intercept: T,
    pub slope: T,
}

impl<T: Real> LinearBound<T> {
    pub fn constant(y: T) -> Self {
        Self { intercept: y, slope: T::zero() }
    }

    pub fn at(&self, x: T) -> T {
        self.intercept + self.slope * x
    }
}

/// Integration region for [`integrate_2d`]; the outer variable is `x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Region2<T> {
    Rect {
        x: (T, T),
        y: (T, T),
    },
    /// `x0 <= x <= x1`, `lower(x) <= y <= upper(x)`; empty where
    /// `upper(x) < lower(x)`.
    Between {
        x: (T, T),
        lower: LinearBound<T>,
        upper: LinearBound<T>,
    },
}

impl<T: Real> Region2<T> {
    pub fn rect(x0: T, x1: T, y0: T, y1: T) -> Self {
        Region2::Rect { x: (x0, x1), y: (y0, y1) }
    }

    fn outer(&self) -> (T, T) {
        match self {
            Region2::Rect { x, .. } | Region2::Between { x, .. } => *x,
        }
    }

    fn inner(&self, x: T) -> (T, T) {
        match self {
            Region2::Rect { y, .. } => *y,
            Region2::Between { lower, upper, .. } => (lower.at(x), upper.at(x)),
        }
    }
}

/// Iterated adaptive integral over a [`Region2`]. Inner integrals run at a
/// tenth of the outer tolerance.
pub fn integrate_2d<T, F>(f: F, region: &Region2<T>, spec: &QuadratureSpec) -> Result<T>
where
    T: Real,
    F: Fn(T, T) -> T,
{
    let inner_spec = spec.inner();
    let (x0, x1) = region.outer();
    try_integrate_1d(
        |x| {
            let (y0, y1) = region.inner(x);
            if y1 <= y0 {
                return Ok(T::zero());
            }
            integrate_1d(|y| f(x, y), y0, y1, &inner_spec)
        },
        x0,
        x1,
        spec,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    const SPEC: QuadratureSpec = QuadratureSpec::analytic();

    #[test]
    fn constant_on_unit_interval() {
        let v: f64 = integrate_1d(|_| 1.0, 0.0, 1.0, &SPEC).unwrap();
        assert!((v - 1.0).abs() < 1e-14);
    }

    #[test]
    fn sine_over_half_period() {
        let v = integrate_1d(f64::sin, 0.0, PI, &SPEC).unwrap();
        assert!((v - 2.0).abs() < 1e-10);
    }

    #[test]
    fn rational_integrand_matches_antiderivative() {
        // F(u) = -1/u + 1/(2u^2), u = 1 + x
        let anti = |x: f64| {
            let u = 1.0 + x;
            -1.0 / u + 1.0 / (2.0 * u * u)
        };
        let exact = anti(1.0) - anti(0.0);
        assert!((exact - 0.125).abs() < 1e-15);
        let v = integrate_1d(|x: f64| x / (1.0 + x).powi(3), 0.0, 1.0, &SPEC).unwrap();
        assert!((v - 0.125).abs() < 1e-10);
    }

    #[test]
    fn f32_instantiation() {
        let spec = QuadratureSpec::new(1e-5, 1e-5, 20).unwrap();
        let v = integrate_1d(|x: f32| x.sin(), 0.0, std::f32::consts::PI, &spec).unwrap();
        assert!((v - 2.0).abs() < 1e-4);
    }

    #[test]
    fn kinked_integrand_converges() {
        let v = integrate_1d(|x: f64| (x - 0.3).abs(), 0.0, 1.0, &SPEC).unwrap();
        assert!((v - (0.045 + 0.245)).abs() < 1e-10);
    }

    #[test]
    fn non_convergence_is_reported() {
        let spec = QuadratureSpec::new(1e-14, 1e-14, 10).unwrap();
        let err = integrate_1d(|x: f64| if x < 1.0 / 3.0 { 0.0 } else { 1.0 }, 0.0, 1.0, &spec).unwrap_err();
        assert!(matches!(err, Error::NoConvergence { .. }));
    }

    #[test]
    fn invalid_specs_rejected() {
        assert!(QuadratureSpec::new(0.0, 1e-6, 20).is_err());
        assert!(QuadratureSpec::new(1e-6, 1e-6, 5).is_err());
        assert!(integrate_1d(|x: f64| x, 1.0, 0.0, &SPEC).is_err());
    }

    #[test]
    fn area_of_upper_triangle() {
        let region = Region2::Between {
            x: (0.0, PI),
            lower: LinearBound { intercept: PI, slope: -1.0 },
            upper: LinearBound::constant(PI),
        };
        let v = integrate_2d(|_, _| 1.0, &region, &SPEC).unwrap();
        assert!((v - PI * PI / 2.0).abs() < 1e-8);
    }

    #[test]
    fn unit_square_rectangles() {
        let v: f64 = integrate_2d(|_, _| 1.0, &Region2::rect(-1.0, 0.0, 0.0, 1.0), &SPEC).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
        let v: f64 = integrate_2d(|x, y| x * y, &Region2::rect(0.0, 1.0, 0.0, 1.0), &SPEC).unwrap();
        assert!((v - 0.25).abs() < 1e-10);
    }

    #[test]
    fn partition_additivity() {
        let f = |x: f64, y: f64| (x * y).cos() + x * x;
        let whole = integrate_2d(f, &Region2::rect(0.0, 2.0, 0.0, 1.0), &SPEC).unwrap();
        let below = Region2::Between {
            x: (0.0, 2.0),
            lower: LinearBound::constant(0.0),
            upper: LinearBound { intercept: 0.0, slope: 0.5 },
        };
        let above = Region2::Between {
            x: (0.0, 2.0),
            lower: LinearBound { intercept: 0.0, slope: 0.5 },
            upper: LinearBound::constant(1.0),
        };
        let parts = integrate_2d(f, &below, &SPEC).unwrap() + integrate_2d(f, &above, &SPEC).unwrap();
        assert!((whole - parts).abs() < 1e-9, "{whole} vs {parts}");
    }

    proptest! {
        #[test]
        fn linearity(a in -3.0f64..3.0, b in -3.0f64..3.0, w1 in 0.1f64..5.0, w2 in 0.1f64..5.0, hi in 0.5f64..4.0) {
            let f = |x: f64| (w1 * x).sin();
            let g = |x: f64| (-w2 * x).exp();
            let lhs = integrate_1d(|x| a * f(x) + b * g(x), 0.0, hi, &SPEC).unwrap();
            let rhs = a * integrate_1d(f, 0.0, hi, &SPEC).unwrap() + b * integrate_1d(g, 0.0, hi, &SPEC).unwrap();
            let tol = 10.0 * SPEC.abs_tol.max(SPEC.rel_tol * lhs.abs()) * (1.0 + a.abs() + b.abs());
            prop_assert!((lhs - rhs).abs() <= tol, "{} vs {}", lhs, rhs);
        }
    }
}
