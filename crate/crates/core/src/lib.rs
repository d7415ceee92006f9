//! Equilibrium supports of rough bodies resting on random combs.
//!
//! A rigid body (a beam on a line comb, a hoop on a circular comb) touches
//! the comb at the teeth that support it in equilibrium. In the limit of
//! many teeth with i.i.d. heights the support points have an explicit law.
//! This crate evaluates those laws and the probabilities derived from them,
//! and checks them against Monte-Carlo simulation of finite combs.
//!
//! The analytic code is generic over the scalar: closed forms over
//! [`scalar::Field`] (floats or exact rationals), everything else over
//! [`scalar::Real`]. The aliases below fix the common choices.

// `!(x > 0)` style guards are deliberate: they also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod circle;
pub mod comb;
pub mod error;
pub mod interval;
pub mod montecarlo;
pub mod quadrature;
pub mod report;
pub mod scalar;
pub mod stats;
pub mod verify;

pub use error::{Error, Result};
pub use quadrature::QuadratureSpec;
pub use scalar::{Field, Real};

/// Exact rational scalar for the closed-form interval laws.
pub type Exact = num_rational::BigRational;

pub type SupportPoint2F64 = interval::SupportPoint2<f64>;
pub type SupportPoint2F32 = interval::SupportPoint2<f32>;
pub type SupportPoint2Exact = interval::SupportPoint2<Exact>;
pub type LinePlacementF64 = interval::LinePlacement<f64>;
pub type ThetaTripleF64 = circle::ThetaTriple<f64>;
pub type ThetaTripleF32 = circle::ThetaTriple<f32>;
pub type PhiTripleF64 = circle::PhiTriple<f64>;
pub type PlanePlacementF64 = circle::PlanePlacement<f64>;
pub type LineCombF64 = comb::LineComb<f64>;
pub type CircularCombF64 = comb::CircularComb<f64>;
pub type Histogram2DF64 = stats::Histogram2D<f64>;
