//! Exact scalar arithmetic over the rationals.
//!
//! `Rational` is an arbitrary-precision fraction kept in lowest terms with a
//! positive denominator. Helpers here cover the combinatorial coefficients
//! that show up in expansion formulas (falling factorials allow a negative
//! upper index).

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};

pub type Rational = BigRational;

/// `n/d` as an exact rational. Panics on a zero denominator.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Integer `n` as an exact rational.
pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn is_zero(r: &Rational) -> bool {
    r.is_zero()
}

/// `n!` as a rational.
pub fn factorial(n: u32) -> Rational {
    let mut acc = BigInt::one();
    for k in 2..=n as u64 {
        acc *= BigInt::from(k);
    }
    Rational::from_integer(acc)
}

/// Binomial coefficient with integer (possibly negative) upper index:
/// `C(m, k) = m (m-1) ... (m-k+1) / k!`.
pub fn binomial(m: i64, k: u32) -> Rational {
    let mut num = BigInt::one();
    for j in 0..k as i64 {
        num *= BigInt::from(m - j);
    }
    Rational::from_integer(num) / factorial(k)
}

/// True when `r` is a (signed) integer.
pub fn is_integer(r: &Rational) -> bool {
    r.denom().is_one() || r.denom().abs().is_one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_matches_pascal_for_nonnegative_index() {
        assert_eq!(binomial(4, 2), rat_int(6));
        assert_eq!(binomial(5, 0), rat_int(1));
        assert_eq!(binomial(3, 5), rat_int(0));
    }

    #[test]
    fn binomial_handles_negative_upper_index() {
        // C(-2, 3) = (-2)(-3)(-4)/6 = -4
        assert_eq!(binomial(-2, 3), rat_int(-4));
        // C(-1, k) = (-1)^k
        assert_eq!(binomial(-1, 4), rat_int(1));
        assert_eq!(binomial(-1, 5), rat_int(-1));
    }

    #[test]
    fn factorial_small_values() {
        assert_eq!(factorial(0), rat_int(1));
        assert_eq!(factorial(5), rat_int(120));
    }
}
