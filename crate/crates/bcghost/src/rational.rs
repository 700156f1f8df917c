//! Exact rational helpers.

use alloc::string::{String, ToString};
use core::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

pub type Q = num_rational::BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn zero() -> Q {
    Q::zero()
}

pub fn one() -> Q {
    Q::one()
}

/// `(-1)^e` as a rational.
pub fn sign(e: i64) -> Q {
    if e.rem_euclid(2) == 0 {
        one()
    } else {
        -one()
    }
}

pub fn abs(x: &Q) -> Q {
    x.abs()
}

/// `x^e` for an integer exponent; `x` must be nonzero when `e < 0`.
pub fn pow(x: &Q, e: i64) -> Q {
    let mut base = if e < 0 { x.recip() } else { x.clone() };
    let mut n = e.unsigned_abs();
    let mut acc = one();
    while n > 0 {
        if n & 1 == 1 {
            acc *= &base;
        }
        base = &base * &base;
        n >>= 1;
    }
    acc
}

/// Formats as `"num/den"`, or `"num"` for integers.
pub fn to_string(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        alloc::format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses `"num"`, `"num/den"` or a terminating decimal such as `"-0.25"`.
pub fn parse(s: &str) -> Option<Q> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).ok()?;
        let d = BigInt::from_str(d.trim()).ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Q::new(n, d));
    }
    if let Some((int, fracpart)) = s.split_once('.') {
        let neg = int.starts_with('-');
        let digits = alloc::format!("{}{}", int.trim_start_matches(['-', '+']), fracpart);
        let n = BigInt::from_str(&digits).ok()?;
        let d = num_traits::pow(BigInt::from(10), fracpart.len());
        let v = Q::new(n, d);
        return Some(if neg { -v } else { v });
    }
    BigInt::from_str(s).ok().map(Q::from_integer)
}
