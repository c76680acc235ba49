//! p-adic valuations of integers, rationals and factorials, plus the closed
//! slope formulas for weight 0 at p = 2 and the p = 11 prediction.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// A p-adic valuation: a finite integer, or `Infinite` for zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn is_finite(self) -> bool {
        matches!(self, Valuation::Finite(_))
    }

    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }
}

impl PartialOrd for Valuation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Valuation {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Valuation::Finite(a), Valuation::Finite(b)) => a.cmp(b),
            (Valuation::Finite(_), Valuation::Infinite) => Ordering::Less,
            (Valuation::Infinite, Valuation::Finite(_)) => Ordering::Greater,
            (Valuation::Infinite, Valuation::Infinite) => Ordering::Equal,
        }
    }
}

impl Add for Valuation {
    type Output = Valuation;

    fn add(self, rhs: Valuation) -> Valuation {
        match (self, rhs) {
            (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a + b),
            _ => Valuation::Infinite,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Valuation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Valuation::Finite(v) => s.serialize_i64(*v),
            Valuation::Infinite => s.serialize_str("inf"),
        }
    }
}

pub(crate) fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn check_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::NotPrime(p))
    }
}

/// Exponent of `p` in a nonzero integer.
fn vp_biguint(x: &BigUint, p: u64) -> i64 {
    debug_assert!(!x.is_zero());
    if p == 2 {
        return x.trailing_zeros().unwrap_or(0) as i64;
    }
    let p_big = BigUint::from(p);
    let mut x = x.clone();
    let mut v = 0;
    loop {
        let (q, r) = num_integer::Integer::div_rem(&x, &p_big);
        if !r.is_zero() {
            return v;
        }
        x = q;
        v += 1;
    }
}

/// Valuation of an integer; zero maps to [`Valuation::Infinite`].
pub fn vp_int(x: &BigInt, p: u64) -> Result<Valuation> {
    check_prime(p)?;
    if x.is_zero() {
        return Ok(Valuation::Infinite);
    }
    Ok(Valuation::Finite(vp_biguint(x.magnitude(), p)))
}

/// Valuation of a rational: numerator exponent minus denominator exponent.
pub fn vp(x: &BigRational, p: u64) -> Result<Valuation> {
    check_prime(p)?;
    if x.is_zero() {
        return Ok(Valuation::Infinite);
    }
    let num = vp_biguint(x.numer().magnitude(), p);
    let den = vp_biguint(x.denom().magnitude(), p);
    Ok(Valuation::Finite(num - den))
}

/// Legendre's formula: sum over i >= 1 of floor(n / p^i).
pub fn vp_factorial(n: u64, p: u64) -> Result<u64> {
    check_prime(p)?;
    Ok(legendre(n, p))
}

pub(crate) fn legendre(n: u64, p: u64) -> u64 {
    let mut total = 0;
    let mut m = n;
    while m > 0 {
        m /= p;
        total += m;
    }
    total
}

/// n! as a big integer. Negative arguments are rejected.
pub fn factorial(n: i64) -> Result<BigInt> {
    if n < 0 {
        return Err(Error::NegativeFactorial(n));
    }
    let mut acc = BigUint::one();
    for i in 2..=n as u64 {
        acc *= i;
    }
    Ok(BigInt::from(acc))
}

/// Predicted (and, by the weight-0 theorem, proven) slope of the n-th
/// eigenvalue of U on cuspidal overconvergent forms of weight 0 at p = 2:
/// `1 + 2 * v2((3n)! / n!)`.
pub fn slope_weight0(n: i64) -> Result<u64> {
    if n <= 0 {
        return Err(Error::InvalidArgument(format!("slope index must be >= 1, got {n}")));
    }
    let n = n as u64;
    Ok(1 + 2 * (legendre(3 * n, 2) - legendre(n, 2)))
}

/// Conjectural 11-adic slope of the n-th eigenvalue of U in weight 0.
pub fn slope_p11(n: i64) -> Result<u64> {
    if n <= 0 {
        return Err(Error::InvalidArgument(format!("slope index must be >= 1, got {n}")));
    }
    let n = n as u64;
    let a = (6 * n + 1) / 5;
    let b = (6 * n).div_ceil(5);
    let c = n / 5;
    // numerator factorials always dominate: a, b >= c
    let v = legendre(a, 11) + legendre(b, 11) - 2 * legendre(c, 11);
    let floors: u64 = (1..=4).map(|k| (n + k) / 5).sum();
    Ok(v + floors)
}

/// Convenience: finite valuation of a nonzero rational as `i64`.
pub(crate) fn v2_finite(x: &BigRational) -> Option<i64> {
    vp(x, 2).ok().and_then(Valuation::finite)
}
