//! Scalar abstractions.
//!
//! Closed-form laws that only need field arithmetic are written against
//! [`Field`], so they can be evaluated exactly over rationals as well as in
//! floating point. Everything that needs transcendental functions or
//! quadrature is written against [`Real`] (`f32` or `f64`).

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, Num, ToPrimitive};

/// Ordered field arithmetic: `f32`, `f64`, `BigRational`, ...
pub trait Field: Clone + PartialOrd + Num + std::ops::Neg<Output = Self> + FromPrimitive + ToPrimitive + Debug {
    /// Small integer constant.
    fn int(n: i32) -> Self {
        Self::from_i32(n).expect("small integer is representable")
    }

    /// Ratio of two small integers.
    fn ratio(num: i32, den: i32) -> Self {
        Self::int(num) / Self::int(den)
    }

    /// Lossy conversion to `f64`, used for reporting.
    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl<T> Field for T where T: Clone + PartialOrd + Num + std::ops::Neg<Output = T> + FromPrimitive + ToPrimitive + Debug {}

/// Floating-point scalar used by quadrature, geometry and the analytic laws.
pub trait Real: Field + Float + FloatConst + Display + Send + Sync + 'static {
    /// Absolute tolerance on dominance / containment predicates when
    /// detecting degenerate support configurations.
    fn geometric_tol() -> Self;

    /// Converts an `f64` literal.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal is representable")
    }
}

impl Real for f32 {
    fn geometric_tol() -> Self {
        1e-5
    }
}

impl Real for f64 {
    fn geometric_tol() -> Self {
        1e-12
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    #[test]
    fn ratio_is_exact_over_rationals() {
        let third = BigRational::ratio(1, 3);
        assert_eq!(third.clone() + third.clone() + third, BigRational::int(1));
    }

    #[test]
    fn geometric_tolerance_per_width() {
        assert_eq!(<f64 as Real>::geometric_tol(), 1e-12);
        assert!(<f32 as Real>::geometric_tol() > f32::EPSILON);
    }
}
