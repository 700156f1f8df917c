//! Polynomials and rational functions in one variable `t` over the rationals,
//! with Laurent expansions at finite points and at infinity.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Zero};

use crate::laurent::LaurentSeries;
use crate::rational::{q, Q};
use crate::Result;

/// A point of the projective line.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Point {
    Finite(Q),
    Infinity,
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Finite(a) => write!(f, "{a}"),
            Point::Infinity => write!(f, "inf"),
        }
    }
}

/// Dense polynomial, `coeffs[k]` multiplies `t^k`. No trailing zeros.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Poly {
    coeffs: Vec<Q>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Q>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn constant(c: Q) -> Self {
        Poly::new(vec![c])
    }

    /// `t - a`.
    pub fn linear(a: &Q) -> Self {
        Poly::new(vec![-a.clone(), Q::one()])
    }

    pub fn monomial(c: Q, k: usize) -> Self {
        let mut v = vec![Q::zero(); k + 1];
        v[k] = c;
        Poly::new(v)
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `-1` for the zero polynomial.
    pub fn degree(&self) -> i64 {
        self.coeffs.len() as i64 - 1
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        let z = Q::zero();
        Poly::new((0..n).map(|i| self.coeffs.get(i).unwrap_or(&z) + o.coeffs.get(i).unwrap_or(&z)).collect())
    }

    pub fn scale(&self, c: &Q) -> Self {
        Poly::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![Q::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        Poly::new(v)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Poly::constant(Q::one());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn eval(&self, x: &Q) -> Q {
        self.coeffs.iter().rev().fold(Q::zero(), |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> Self {
        Poly::new(self.coeffs.iter().enumerate().skip(1).map(|(k, c)| c * q(k as i64)).collect())
    }

    /// Coefficients of `p(a + x)` in `x`.
    pub fn taylor_shift(&self, a: &Q) -> Self {
        // Horner with the linear polynomial a + x
        let lin = Poly::new(vec![a.clone(), Q::one()]);
        let mut acc = Poly::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(&lin).add(&Poly::constant(c.clone()));
        }
        acc
    }

    pub fn to_series(&self) -> LaurentSeries {
        LaurentSeries::new(self.coeffs.iter().enumerate().map(|(k, c)| (k as i64, c.clone())), crate::laurent::EXACT)
    }
}

/// `num(t) / prod_a (t - a)^{k_a}` with the poles kept separate so that sums
/// and products never need a gcd.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct RatFunc {
    num: Poly,
    poles: BTreeMap<Q, u32>,
}

impl RatFunc {
    pub fn zero() -> Self {
        RatFunc::default()
    }

    pub fn poly(p: Poly) -> Self {
        RatFunc { num: p, poles: BTreeMap::new() }
    }

    pub fn constant(c: Q) -> Self {
        RatFunc::poly(Poly::constant(c))
    }

    /// `t^k`.
    pub fn t_pow(k: usize) -> Self {
        RatFunc::poly(Poly::monomial(Q::one(), k))
    }

    /// `(t - a)^{-m}`.
    pub fn pole(a: &Q, m: u32) -> Self {
        let mut poles = BTreeMap::new();
        if m > 0 {
            poles.insert(a.clone(), m);
        }
        RatFunc { num: Poly::constant(Q::one()), poles }
    }

    pub fn new(num: Poly, poles: BTreeMap<Q, u32>) -> Self {
        RatFunc { num, poles }
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn poles(&self) -> &BTreeMap<Q, u32> {
        &self.poles
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    fn with_poles(&self, target: &BTreeMap<Q, u32>) -> Poly {
        let mut n = self.num.clone();
        for (a, k) in target {
            let have = self.poles.get(a).copied().unwrap_or(0);
            n = n.mul(&Poly::linear(a).pow(k - have));
        }
        n
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut target = self.poles.clone();
        for (a, k) in &o.poles {
            let e = target.entry(a.clone()).or_insert(0);
            *e = (*e).max(*k);
        }
        RatFunc { num: self.with_poles(&target).add(&o.with_poles(&target)), poles: target }
    }

    pub fn scale(&self, c: &Q) -> Self {
        RatFunc { num: self.num.scale(c), poles: self.poles.clone() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut poles = self.poles.clone();
        for (a, k) in &o.poles {
            *poles.entry(a.clone()).or_insert(0) += k;
        }
        RatFunc { num: self.num.mul(&o.num), poles }
    }

    pub fn derivative(&self) -> Self {
        // (n / prod (t-a)^k)' = n'/D - n * sum k/(t-a) / D
        let mut out = RatFunc { num: self.num.derivative(), poles: self.poles.clone() };
        for (a, k) in &self.poles {
            let mut poles = self.poles.clone();
            *poles.get_mut(a).unwrap() += 1;
            out = out.add(&RatFunc { num: self.num.scale(&-q(*k as i64)), poles });
        }
        out
    }

    /// Value at a finite point that is not a pole.
    pub fn eval(&self, x: &Q) -> Option<Q> {
        let mut den = Q::one();
        for (a, k) in &self.poles {
            let d = x - a;
            if d.is_zero() {
                return None;
            }
            den *= crate::rational::pow(&d, *k as i64);
        }
        Some(self.num.eval(x) / den)
    }

    /// Value at a point (`None` at a pole); the value at infinity is the limit.
    pub fn value_at(&self, p: &Point) -> Option<Q> {
        let s = self.expand(p, 1).ok()?;
        if s.ord() < 0 {
            return None;
        }
        Some(s.coeff_or_zero(0))
    }

    /// Laurent expansion in `x = t - a` (finite point) or `x = 1/t` (infinity), exact below `order`.
    pub fn expand(&self, p: &Point, order: i64) -> Result<LaurentSeries> {
        match p {
            Point::Finite(b) => {
                let mut acc = self.num.taylor_shift(b).to_series();
                let mut pole_ord = 0i64;
                let mut others = LaurentSeries::constant(Q::one());
                for (a, k) in &self.poles {
                    if a == b {
                        pole_ord += *k as i64;
                    } else {
                        // (x + b - a)^k
                        others = others.mul(&Poly::new(vec![b - a, Q::one()]).pow(*k).to_series());
                    }
                }
                // num / (x^pole_ord * others)
                let inv = others.inverse(order + pole_ord)?;
                acc = acc.mul(&inv).shift(-pole_ord);
                Ok(acc.truncate(order))
            }
            Point::Infinity => {
                // t = 1/x: num(1/x) = x^{-deg} rev(num)(x); (1/x - a)^{-k} = x^k (1 - a x)^{-k}
                let deg = self.num.degree().max(0);
                let rev: Vec<Q> = self.num.coeffs.iter().rev().cloned().collect();
                let mut acc = Poly::new(rev).to_series();
                let mut shift = -deg;
                let mut den = LaurentSeries::constant(Q::one());
                for (a, k) in &self.poles {
                    shift += *k as i64;
                    den = den.mul(&Poly::new(vec![Q::one(), -a.clone()]).pow(*k).to_series());
                }
                let inv = den.inverse(order - shift)?;
                acc = acc.mul(&inv).shift(shift);
                Ok(acc.truncate(order))
            }
        }
    }
}
