//! Payoff scalar abstraction.
//!
//! Everything in this crate hinges on exact comparisons: agreements,
//! dominance ties and argmax sets must be decided without rounding. The
//! [`Scalar`] trait therefore requires a total order (`Ord`), which admits
//! exact rational types and rules out IEEE floats.

use std::fmt::{Debug, Display};

use num_traits::{FromPrimitive, Num, Signed};

/// Exact ordered scalar usable as a payoff value.
///
/// Implemented by any type with exact arithmetic and a total order, in
/// particular `num_rational::Ratio` over `i64` or `BigInt`.
pub trait Scalar:
    Clone + Ord + Num + Signed + FromPrimitive + Debug + Display + Send + Sync + 'static
{
}

impl<T> Scalar for T where
    T: Clone + Ord + Num + Signed + FromPrimitive + Debug + Display + Send + Sync + 'static
{
}

/// Default payoff scalar: arbitrary-precision rational.
pub type Rational = num_rational::BigRational;

/// Fixed-width rational, for callers that prefer speed over headroom.
pub type Rational64 = num_rational::Rational64;

/// Shorthand for an exact integer-valued scalar.
pub fn int<T: Scalar>(value: i64) -> T {
    T::from_i64(value).expect("integer must be representable")
}

/// Shorthand for an exact ratio `numer/denom`.
pub fn ratio<T: Scalar>(numer: i64, denom: i64) -> T {
    assert!(denom != 0, "zero denominator");
    int::<T>(numer) / int::<T>(denom)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_alias_is_exact() {
        let third: Rational = ratio(1, 3);
        assert_eq!(third.clone() + third.clone() + third, int(1));
    }

    #[test]
    fn fixed_width_alias_satisfies_scalar() {
        fn sum<T: Scalar>(values: &[T]) -> T {
            values.iter().cloned().fold(T::zero(), |acc, v| acc + v)
        }
        let values: Vec<Rational64> = vec![ratio(1, 2), ratio(1, 2)];
        assert_eq!(sum(&values), int(1));
    }
}
