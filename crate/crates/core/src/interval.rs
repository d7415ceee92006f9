//! Limit law of the support points of a rigid interval on a random comb.
//!
//! The density of the support pair `(a1, a2)` on `[-1, 0] x [0, 1]` is
//!
//! ```text
//! p(a) = (a2 - a1) * (4 / (3 (1 + a2)^3) + 4 / (3 (1 - a1)^3) + 1/6)
//! ```
//!
//! Every closed form here is a rational function, so it is generic over
//! [`Field`] and can be evaluated exactly over `BigRational`. Quantities that
//! are defined by integrals are evaluated with [`crate::quadrature`].

use crate::error::{Error, Result};
use crate::quadrature::{integrate_1d, integrate_2d, QuadratureSpec, Region2};
use crate::scalar::{Field, Real};

fn cube<T: Field>(x: T) -> T {
    x.clone() * x.clone() * x
}

/// A support pair in `I- x I+ = [-1, 0] x [0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportPoint2<T> {
    a1: T,
    a2: T,
}

impl<T: Field> SupportPoint2<T> {
    pub fn new(a1: T, a2: T) -> Result<Self> {
        if !(a1 >= -T::one() && a1 <= T::zero()) {
            return Err(Error::domain("a1", a1.to_f64_lossy(), "[-1, 0]"));
        }
        if !(a2 >= T::zero() && a2 <= T::one()) {
            return Err(Error::domain("a2", a2.to_f64_lossy(), "[0, 1]"));
        }
        Ok(Self { a1, a2 })
    }

    pub fn a1(&self) -> &T {
        &self.a1
    }

    pub fn a2(&self) -> &T {
        &self.a2
    }

    /// Distance between the two support points.
    pub fn span(&self) -> T {
        self.a2.clone() - self.a1.clone()
    }
}

/// Density of the support pair.
pub fn density_p<T: Field>(a: &SupportPoint2<T>) -> T {
    let four_thirds = T::ratio(4, 3);
    let right = four_thirds.clone() / cube(T::one() + a.a2.clone());
    let left = four_thirds / cube(T::one() - a.a1.clone());
    a.span() * (right + left + T::ratio(1, 6))
}

/// [`density_p`] with the domain check folded in.
pub fn density_p_at<T: Field>(a1: T, a2: T) -> Result<T> {
    Ok(density_p(&SupportPoint2::new(a1, a2)?))
}

fn check_unit<T: Field>(what: &'static str, v: &T) -> Result<()> {
    if *v >= T::zero() && *v <= T::one() {
        Ok(())
    } else {
        Err(Error::domain(what, v.to_f64_lossy(), "[0, 1]"))
    }
}

/// Marginal density of the right support point,
/// `4/(3(1+a2)^2) - 2/(3(1+a2)^3) + 2 a2/3 + 1/4`.
pub fn marginal_right<T: Field>(a2: T) -> Result<T> {
    check_unit("a2", &a2)?;
    let u = T::one() + a2.clone();
    Ok(T::ratio(4, 3) / (u.clone() * u.clone()) - T::ratio(2, 3) / cube(u) + T::ratio(2, 3) * a2 + T::ratio(1, 4))
}

/// `integral over a1 in [-1, 0] of p(a1, a2)`, by quadrature.
pub fn marginal_right_by_quadrature<T: Real>(a2: T, spec: &QuadratureSpec) -> Result<T> {
    check_unit("a2", &a2)?;
    integrate_1d(|a1| density_p(&SupportPoint2 { a1, a2 }), -T::one(), T::zero(), spec)
}

/// Shares of the weight carried by the left and right tooth.
pub fn load_fractions<T: Field>(a: &SupportPoint2<T>) -> Result<(T, T)> {
    let span = a.span();
    if span == T::zero() {
        return Err(Error::InvalidInput("load fractions are undefined for coincident support points".into()));
    }
    Ok((a.a2.clone() / span.clone(), -a.a1.clone() / span))
}

/// Load-weighted support rate at a left point,
/// `integral over a2 in [0, 1] of l1(a) p(a)`, by quadrature.
pub fn scratch_rate_left<T: Real>(a1: T, spec: &QuadratureSpec) -> Result<T> {
    SupportPoint2::new(a1, T::zero())?;
    integrate_1d(
        |a2| {
            let a = SupportPoint2 { a1, a2 };
            // l1 = a2 / (a2 - a1) is 0/0 only at a1 = a2 = 0, an endpoint
            // never sampled by the Gauss-Kronrod nodes
            load_fractions(&a).map(|(l1, _)| l1 * density_p(&a)).unwrap_or(T::zero())
        },
        T::zero(),
        T::one(),
        spec,
    )
}

/// Mirror of [`scratch_rate_left`] for the right point.
pub fn scratch_rate_right<T: Real>(a2: T, spec: &QuadratureSpec) -> Result<T> {
    SupportPoint2::new(T::zero(), a2)?;
    integrate_1d(
        |a1| {
            let a = SupportPoint2 { a1, a2 };
            load_fractions(&a).map(|(_, l2)| l2 * density_p(&a)).unwrap_or(T::zero())
        },
        -T::one(),
        T::zero(),
        spec,
    )
}

/// The closed form printed for the left scratch rate,
/// `2/(3(1-a1)^3) + 1/2`. Its additive constant disagrees with direct
/// integration of the defining integral (which gives `1/4`); it is kept as
/// a reference expression for reporting only.
pub fn scratch_rate_left_reference<T: Field>(a1: T) -> Result<T> {
    SupportPoint2::new(a1.clone(), T::zero())?;
    Ok(T::ratio(2, 3) / cube(T::one() - a1) + T::ratio(1, 2))
}

/// Printed closed form for the right scratch rate, `2/(3(1+a2)^3) + 1/2`.
pub fn scratch_rate_right_reference<T: Field>(a2: T) -> Result<T> {
    check_unit("a2", &a2)?;
    Ok(T::ratio(2, 3) / cube(T::one() + a2) + T::ratio(1, 2))
}

/// Probability that a beam loaded by a walker of mass fraction `mu` never
/// tips, `((1-mu)^2/6) (6 + mu - (2mu/(1+mu))^2)`.
pub fn p_star_beam<T: Field>(mu: T) -> Result<T> {
    check_unit("mu", &mu)?;
    let one_minus = T::one() - mu.clone();
    let ratio = T::int(2) * mu.clone() / (T::one() + mu.clone());
    Ok(one_minus.clone() * one_minus / T::int(6) * (T::int(6) + mu - ratio.clone() * ratio))
}

/// `P(-a1 > mu, a2 > mu)` by 2D quadrature of [`density_p`].
pub fn p_star_beam_by_quadrature<T: Real>(mu: T, spec: &QuadratureSpec) -> Result<T> {
    check_unit("mu", &mu)?;
    integrate_2d(|a1, a2| density_p(&SupportPoint2 { a1, a2 }), &Region2::rect(-T::one(), -mu, mu, T::one()), spec)
}

/// Total mass of [`density_p`] over the whole domain, by quadrature.
pub fn total_mass_by_quadrature<T: Real>(spec: &QuadratureSpec) -> Result<T> {
    integrate_2d(
        |a1, a2| density_p(&SupportPoint2 { a1, a2 }),
        &Region2::rect(-T::one(), T::zero(), T::zero(), T::one()),
        spec,
    )
}

/// The density split by where the supporting line meets the ceiling
/// `z = 1`: entirely below it (`q1`), or crossing it on the right
/// (`q2_plus`) or left (`q2_minus`).
#[derive(Debug, Clone, PartialEq)]
pub struct QDecomposition<T> {
    pub q1: T,
    pub q2_plus: T,
    pub q2_minus: T,
}

impl<T: Field> QDecomposition<T> {
    pub fn sum(&self) -> T {
        self.q1.clone() + self.q2_plus.clone() + self.q2_minus.clone()
    }
}

pub fn q_decomposition<T: Field>(a: &SupportPoint2<T>) -> QDecomposition<T> {
    let span = a.span();
    let eighth = T::ratio(1, 8);
    let scale = T::ratio(4, 3) * span.clone();
    QDecomposition {
        q1: span / T::int(2),
        q2_plus: scale.clone() * (T::one() / cube(T::one() + a.a2.clone()) - eighth.clone()),
        q2_minus: scale * (T::one() / cube(T::one() - a.a1.clone()) - eighth),
    }
}

/// A supporting line through two teeth at `a`, whose tips sit `A_i / N`
/// below the ceiling `z = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinePlacement<T> {
    gap_left: T,
    gap_right: T,
    a: SupportPoint2<T>,
    x_star: Option<T>,
}

impl<T: Real> LinePlacement<T> {
    pub fn new(gap_left: T, gap_right: T, a: SupportPoint2<T>) -> Result<Self> {
        if !(gap_left >= T::zero() && gap_right >= T::zero()) {
            return Err(Error::InvalidInput(format!(
                "scaled tip gaps must be non-negative, got ({gap_left}, {gap_right})"
            )));
        }
        if a.span() <= T::zero() {
            return Err(Error::InvalidInput("support points must differ".into()));
        }
        let offset = gap_left * a.a2 - gap_right * a.a1;
        let diff = gap_left - gap_right;
        let x_star = (diff != T::zero() && diff.abs() >= offset).then(|| offset / diff);
        Ok(Self { gap_left, gap_right, a, x_star })
    }

    pub fn gaps(&self) -> (T, T) {
        (self.gap_left, self.gap_right)
    }

    pub fn support(&self) -> &SupportPoint2<T> {
        &self.a
    }

    /// Abscissa where the line crosses the ceiling, when it does.
    pub fn x_star(&self) -> Option<T> {
        self.x_star
    }

    /// `N (1 - z(x))`: how far the line sits below the ceiling at `x`, in
    /// units of `1/N`.
    pub fn depth_at(&self, x: T) -> T {
        let span = self.a.span();
        (self.gap_left * self.a.a2 - self.gap_right * self.a.a1) / span + (self.gap_right - self.gap_left) / span * x
    }
}

/// Limit probability that every tooth of a uniform comb lies below the
/// supporting line.
pub fn prob_comb_below_line<T: Real>(placement: &LinePlacement<T>) -> T {
    let (g1, g2) = placement.gaps();
    let (a1, a2) = (placement.a.a1, placement.a.a2);
    let span = a2 - a1;
    let offset = g1 * a2 - g2 * a1;
    if offset == T::zero() {
        return T::one();
    }
    let exponent = if (g1 - g2).abs() < offset {
        offset / span
    } else if g1 > g2 {
        let num = g1 * (a2 + T::one()) - g2 * (a1 + T::one());
        num * num / (T::lit(4.0) * span * (g1 - g2))
    } else {
        let num = g2 * (T::one() - a1) - g1 * (T::one() - a2);
        num * num / (T::lit(4.0) * span * (g2 - g1))
    };
    (-exponent).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use proptest::prelude::*;

    type Q = BigRational;

    fn q(n: i32, d: i32) -> Q {
        Q::ratio(n, d)
    }

    fn pt(a1: f64, a2: f64) -> SupportPoint2<f64> {
        SupportPoint2::new(a1, a2).unwrap()
    }

    #[test]
    fn density_corner_values_exact() {
        assert_eq!(density_p(&SupportPoint2::new(q(0, 1), q(0, 1)).unwrap()), q(0, 1));
        assert_eq!(density_p(&SupportPoint2::new(q(-1, 1), q(1, 1)).unwrap()), q(1, 1));
        assert_eq!(density_p(&SupportPoint2::new(q(0, 1), q(1, 1)).unwrap()), q(5, 3));
        assert_eq!(density_p(&SupportPoint2::new(q(-1, 1), q(0, 1)).unwrap()), q(5, 3));
    }

    #[test]
    fn density_rejects_out_of_domain() {
        assert!(density_p_at(0.1, 0.5).is_err());
        assert!(density_p_at(-0.5, 1.5).is_err());
        assert!(density_p_at(f64::NAN, 0.5).is_err());
    }

    #[test]
    fn marginal_values_exact() {
        assert_eq!(marginal_right(q(0, 1)).unwrap(), q(11, 12));
        assert_eq!(marginal_right(q(1, 1)).unwrap(), q(7, 6));
        assert_eq!(marginal_right(q(1, 1)).unwrap() / marginal_right(q(0, 1)).unwrap(), q(14, 11));
        assert!(marginal_right(1.5).is_err());
    }

    #[test]
    fn marginal_matches_quadrature() {
        let spec = QuadratureSpec::analytic();
        for i in 0..50 {
            let a2 = i as f64 / 49.0;
            let closed = marginal_right(a2).unwrap();
            let quad = marginal_right_by_quadrature(a2, &spec).unwrap();
            assert!((closed - quad).abs() < 1e-8, "a2={a2}: {closed} vs {quad}");
        }
    }

    #[test]
    fn normalization() {
        let mass: f64 = total_mass_by_quadrature(&QuadratureSpec::analytic()).unwrap();
        assert!((mass - 1.0).abs() < 1e-8);
        let marginal_mass =
            integrate_1d(|a2: f64| marginal_right(a2).unwrap(), 0.0, 1.0, &QuadratureSpec::analytic()).unwrap();
        assert!((marginal_mass - 1.0).abs() < 1e-8);
    }

    #[test]
    fn load_fraction_examples() {
        assert_eq!(load_fractions(&SupportPoint2::new(q(-1, 1), q(1, 1)).unwrap()).unwrap(), (q(1, 2), q(1, 2)));
        assert_eq!(load_fractions(&SupportPoint2::new(q(-1, 2), q(1, 1)).unwrap()).unwrap(), (q(2, 3), q(1, 3)));
        assert_eq!(load_fractions(&SupportPoint2::new(q(0, 1), q(1, 1)).unwrap()).unwrap(), (q(1, 1), q(0, 1)));
        assert!(load_fractions(&pt(0.0, 0.0)).is_err());
    }

    #[test]
    fn p_star_beam_exact_values() {
        assert_eq!(p_star_beam(q(0, 1)).unwrap(), q(1, 1));
        assert_eq!(p_star_beam(q(1, 1)).unwrap(), q(0, 1));
        assert_eq!(p_star_beam(q(1, 2)).unwrap(), q(109, 432));
        assert!((p_star_beam(0.5f64).unwrap() - 0.252_314_814_814_814_8).abs() < 1e-15);
        assert!(p_star_beam(-0.1).is_err());
    }

    #[test]
    fn p_star_beam_matches_quadrature_and_decreases() {
        let spec = QuadratureSpec::analytic();
        let mut prev = f64::INFINITY;
        for i in 0..20 {
            let mu = i as f64 / 19.0;
            let closed = p_star_beam(mu).unwrap();
            let quad = p_star_beam_by_quadrature(mu, &spec).unwrap();
            assert!((closed - quad).abs() < 1e-8, "mu={mu}: {closed} vs {quad}");
            assert!(closed <= prev);
            prev = closed;
        }
    }

    #[test]
    fn decomposition_examples() {
        let d = q_decomposition(&SupportPoint2::new(q(-1, 1), q(1, 1)).unwrap());
        assert_eq!(d, QDecomposition { q1: q(1, 1), q2_plus: q(0, 1), q2_minus: q(0, 1) });
        let d = q_decomposition(&SupportPoint2::new(q(0, 1), q(1, 1)).unwrap());
        assert_eq!(d.q1, q(1, 2));
    }

    #[test]
    fn scratch_rate_constant_offset() {
        let spec = QuadratureSpec::analytic();
        for i in 0..10 {
            let a1 = -(i as f64) / 9.0;
            let rate = scratch_rate_left(a1, &spec).unwrap();
            let offset = rate - 2.0 / (3.0 * (1.0 - a1).powi(3));
            assert!((offset - 0.25).abs() < 1e-8, "a1={a1}: offset {offset}");
            let mirrored = scratch_rate_right(-a1, &spec).unwrap();
            assert!((rate - mirrored).abs() < 1e-9);
        }
        let middle: f64 = scratch_rate_right(0.0, &spec).unwrap();
        let end = scratch_rate_right(1.0, &spec).unwrap();
        assert!(middle > end);
        assert!((middle / end - 11.0 / 4.0).abs() < 1e-8);
        assert_eq!(
            scratch_rate_right_reference(q(0, 1)).unwrap() / scratch_rate_right_reference(q(1, 1)).unwrap(),
            q(2, 1)
        );
    }

    #[test]
    fn comb_below_line_examples() {
        let flat = LinePlacement::new(0.0, 0.0, pt(-1.0, 1.0)).unwrap();
        assert_eq!(prob_comb_below_line(&flat), 1.0);
        let c = 1.7;
        let level = LinePlacement::new(c, c, pt(-1.0, 1.0)).unwrap();
        assert!(level.x_star().is_none());
        assert!((prob_comb_below_line(&level) - (-c).exp()).abs() < 1e-15);
    }

    #[test]
    fn crossing_abscissa() {
        let p = LinePlacement::new(3.0, 0.0, pt(-0.5, 0.5)).unwrap();
        // offset = 1.5, diff = 3 -> case 2, x* = 0.5
        assert_eq!(p.x_star(), Some(0.5));
        assert!(p.depth_at(0.5).abs() < 1e-15);
        assert!(LinePlacement::new(-1.0, 0.0, pt(-0.5, 0.5)).is_err());
    }

    /// Case 2 of the line law integrates the depth over the part of the base
    /// below the ceiling; check it against that integral directly.
    #[test]
    fn crossing_case_matches_depth_integral() {
        let spec = QuadratureSpec::analytic();
        for &(g1, g2, a1, a2) in &[(3.0, 0.2, -0.4, 0.7), (0.1, 2.5, -0.9, 0.3), (5.0, 1.0, -0.2, 0.2)] {
            let p = LinePlacement::new(g1, g2, pt(a1, a2)).unwrap();
            let x_star = p.x_star().expect("crossing case");
            let (lo, hi) = if g1 > g2 { (-1.0, x_star) } else { (x_star, 1.0) };
            let half_integral = 0.5 * integrate_1d(|x| p.depth_at(x), lo, hi, &spec).unwrap();
            assert!((prob_comb_below_line(&p) - (-half_integral).exp()).abs() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn decomposition_sums_to_density(a1 in -1.0f64..=0.0, a2 in 0.0f64..=1.0) {
            let a = pt(a1, a2);
            prop_assert!((q_decomposition(&a).sum() - density_p(&a)).abs() < 1e-12);
        }

        #[test]
        fn reflection_symmetry(a1 in -1.0f64..=0.0, a2 in 0.0f64..=1.0) {
            let lhs = density_p(&pt(a1, a2));
            let rhs = density_p(&pt(-a2, -a1));
            prop_assert!((lhs - rhs).abs() < 1e-13);
        }

        #[test]
        fn torque_balance(a1 in -1.0f64..-1e-6, a2 in 1e-6f64..=1.0) {
            let (l1, l2) = load_fractions(&pt(a1, a2)).unwrap();
            prop_assert!((l1 + l2 - 1.0).abs() < 1e-12);
            prop_assert!((a1 * l1 + a2 * l2).abs() < 1e-12);
            prop_assert!((0.0..=1.0).contains(&l1) && (0.0..=1.0).contains(&l2));
        }

        #[test]
        fn exact_decomposition(n1 in 0i32..=60, n2 in 0i32..=60) {
            let a = SupportPoint2::new(q(-n1, 60), q(n2, 60)).unwrap();
            prop_assert_eq!(q_decomposition(&a).sum(), density_p(&a));
        }
    }
}
