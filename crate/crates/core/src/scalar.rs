//! Scalar abstractions shared by every numeric routine in the crate.
//!
//! Model evaluation, QUBO compilation and Pauli algebra only need field
//! arithmetic, so they are generic over [`Scalar`], which is implemented for
//! `f32`, `f64` and the exact rational type [`Rational64`]. State-vector
//! simulation and annealing need transcendental functions and are generic
//! over [`Real`] (`f32`/`f64`).

use std::fmt::{Debug, Display};

use num_rational::Rational64;
use num_traits::{Float, FloatConst, FromPrimitive, Num, Signed, ToPrimitive};

pub trait Scalar:
    Num
    + Signed
    + Copy
    + PartialOrd
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// True when a coefficient of this magnitude should be dropped from a
    /// sparse representation.
    fn is_negligible(&self) -> bool;

    fn from_int(v: i64) -> Self {
        Self::from_i64(v).expect("integer representable in scalar type")
    }

    /// `num / den` computed in this scalar type.
    fn ratio(num: i64, den: i64) -> Self {
        Self::from_int(num) / Self::from_int(den)
    }

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn from_f64_lossy(v: f64) -> Self {
        Self::from_f64(v).expect("finite value representable in scalar type")
    }
}

impl Scalar for f64 {
    fn is_negligible(&self) -> bool {
        self.abs() < 1e-14
    }
}

impl Scalar for f32 {
    fn is_negligible(&self) -> bool {
        self.abs() < 1e-6
    }
}

impl Scalar for Rational64 {
    fn is_negligible(&self) -> bool {
        num_traits::Zero::is_zero(self)
    }
}

/// Floating-point scalars usable for simulation.
pub trait Real: Scalar + Float + FloatConst {}

impl Real for f32 {}
impl Real for f64 {}

/// Converts between scalar types, going through `f64` unless both are equal.
pub fn convert<A: Scalar, B: Scalar>(a: A) -> B {
    B::from_f64_lossy(a.to_f64_lossy())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_ratio_is_exact() {
        let third: Rational64 = Scalar::ratio(1, 3);
        assert_eq!(third * Rational64::from_int(3), Rational64::from_int(1));
    }

    #[test]
    fn negligible_thresholds() {
        assert!(1e-15_f64.is_negligible());
        assert!(!1e-13_f64.is_negligible());
        assert!(Rational64::from_int(0).is_negligible());
        assert!(!Rational64::ratio(1, 1_000_000_000).is_negligible());
    }
}
