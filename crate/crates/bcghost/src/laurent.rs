//! Truncated formal Laurent series over the rationals.
//!
//! A series knows its coefficients exactly for every exponent below `trunc`;
//! nothing at or above `trunc` is stored. Every operation returns the largest
//! `trunc` it can justify. Polynomials and other finite objects use
//! [`EXACT`], which behaves like an infinite truncation order.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::rational::{frac, q, Q};
use crate::{Error, Result};

/// Truncation order of series that are known exactly.
pub const EXACT: i64 = i64::MAX / 8;

fn sat(x: i64) -> i64 {
    x.clamp(-EXACT, EXACT)
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LaurentSeries {
    coeffs: BTreeMap<i64, Q>,
    trunc: i64,
}

impl LaurentSeries {
    pub fn new(coeffs: impl IntoIterator<Item = (i64, Q)>, trunc: i64) -> Self {
        let mut map = BTreeMap::new();
        for (k, c) in coeffs {
            if k < trunc {
                let e = map.entry(k).or_insert_with(Q::zero);
                *e += c;
            }
        }
        map.retain(|_, c: &mut Q| !c.is_zero());
        LaurentSeries { coeffs: map, trunc: sat(trunc) }
    }

    pub fn zero(trunc: i64) -> Self {
        LaurentSeries { coeffs: BTreeMap::new(), trunc: sat(trunc) }
    }

    /// `c * x^k`, exact.
    pub fn monomial(c: Q, k: i64) -> Self {
        LaurentSeries::new([(k, c)], EXACT)
    }

    /// The coordinate itself, `x`.
    pub fn x() -> Self {
        LaurentSeries::monomial(Q::one(), 1)
    }

    pub fn constant(c: Q) -> Self {
        LaurentSeries::monomial(c, 0)
    }

    /// Exact Laurent polynomial from integer-indexed coefficients starting at `low`.
    pub fn poly(low: i64, coeffs: &[Q]) -> Self {
        LaurentSeries::new(coeffs.iter().enumerate().map(|(i, c)| (low + i as i64, c.clone())), EXACT)
    }

    pub fn trunc(&self) -> i64 {
        self.trunc
    }

    pub fn is_exact(&self) -> bool {
        self.trunc >= EXACT
    }

    /// Lowest exponent with a nonzero coefficient, or `trunc` if none is known.
    pub fn ord(&self) -> i64 {
        self.coeffs.keys().next().copied().unwrap_or(self.trunc)
    }

    /// Highest stored exponent.
    pub fn top(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &Q)> {
        self.coeffs.iter().map(|(k, c)| (*k, c))
    }

    pub fn coeff(&self, k: i64) -> Result<Q> {
        if k >= self.trunc {
            return Err(Error::Truncation { have: self.trunc, need: k });
        }
        Ok(self.coeffs.get(&k).cloned().unwrap_or_else(Q::zero))
    }

    /// Coefficient, treating unknown exponents as zero. Only for callers that
    /// have checked the truncation order themselves.
    pub fn coeff_or_zero(&self, k: i64) -> Q {
        self.coeffs.get(&k).cloned().unwrap_or_else(Q::zero)
    }

    pub fn truncate(&self, t: i64) -> Self {
        let t = t.min(self.trunc);
        LaurentSeries { coeffs: self.coeffs.range(..t).map(|(k, c)| (*k, c.clone())).collect(), trunc: t }
    }

    /// The part with exponents `< k` (an exact Laurent polynomial if `k <= trunc`).
    pub fn principal(&self, k: i64) -> Result<Self> {
        if k > self.trunc {
            return Err(Error::Truncation { have: self.trunc, need: k - 1 });
        }
        Ok(LaurentSeries { coeffs: self.coeffs.range(..k).map(|(k, c)| (*k, c.clone())).collect(), trunc: EXACT })
    }

    pub fn residue(&self) -> Result<Q> {
        self.coeff(-1)
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return LaurentSeries::zero(self.trunc);
        }
        LaurentSeries { coeffs: self.coeffs.iter().map(|(k, v)| (*k, v * c)).collect(), trunc: self.trunc }
    }

    /// Multiplication by `x^k`.
    pub fn shift(&self, k: i64) -> Self {
        LaurentSeries { coeffs: self.coeffs.iter().map(|(e, v)| (e + k, v.clone())).collect(), trunc: sat(self.trunc.saturating_add(k)) }
    }

    pub fn add(&self, other: &Self) -> Self {
        let t = self.trunc.min(other.trunc);
        LaurentSeries::new(
            self.coeffs.range(..t).chain(other.coeffs.range(..t)).map(|(k, c)| (*k, c.clone())),
            t,
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        LaurentSeries { coeffs: self.coeffs.iter().map(|(k, c)| (*k, -c)).collect(), trunc: self.trunc }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let t = sat(self.ord().saturating_add(other.trunc)).min(sat(other.ord().saturating_add(self.trunc)));
        let mut out: BTreeMap<i64, Q> = BTreeMap::new();
        for (i, a) in &self.coeffs {
            for (j, b) in &other.coeffs {
                if i + j >= t {
                    break;
                }
                *out.entry(i + j).or_insert_with(Q::zero) += a * b;
            }
        }
        LaurentSeries::new(out, t)
    }

    /// `1/self`, computed below `min(order, provable trunc)`.
    pub fn inverse(&self, order: i64) -> Result<Self> {
        let v = self.ord();
        if v >= self.trunc {
            return Err(Error::NotInvertible);
        }
        let lead = self.coeffs[&v].clone();
        let inv_lead = lead.recip();
        let t = sat(self.trunc.saturating_sub(2 * v)).min(order);
        let n = (t + v).max(0) as usize;
        let mut b: Vec<Q> = Vec::with_capacity(n);
        for k in 0..n {
            if k == 0 {
                b.push(inv_lead.clone());
                continue;
            }
            let mut s = Q::zero();
            for i in 1..=k {
                if let Some(a) = self.coeffs.get(&(v + i as i64)) {
                    s += a * &b[k - i];
                }
            }
            b.push(-(s * &inv_lead));
        }
        Ok(LaurentSeries::new(b.into_iter().enumerate().map(|(k, c)| (k as i64 - v, c)), t))
    }

    pub fn div(&self, other: &Self, order: i64) -> Result<Self> {
        let inv = other.inverse(order.saturating_sub(self.ord()))?;
        Ok(self.mul(&inv).truncate(order))
    }

    /// Integer power (negative powers through [`inverse`](Self::inverse)).
    pub fn pow(&self, e: i64, order: i64) -> Result<Self> {
        let k = e.unsigned_abs() as i64;
        let v = self.ord();
        let base = if e < 0 {
            self.inverse(sat(order.saturating_add((k - 1).max(0).saturating_mul(v))))?
        } else {
            self.clone()
        };
        let slack = (-base.ord()).max(0);
        let mut acc = LaurentSeries::constant(Q::one());
        for i in 0..k {
            let remaining = k - 1 - i;
            acc = acc.mul(&base).truncate(sat(order.saturating_add(remaining.saturating_mul(slack))));
        }
        Ok(acc.truncate(order))
    }

    pub fn derivative(&self) -> Self {
        LaurentSeries::new(
            self.coeffs.iter().filter(|(k, _)| **k != 0).map(|(k, c)| (k - 1, c * q(*k))),
            sat(self.trunc.saturating_sub(1)),
        )
    }

    /// Evaluation of `self` at `h`: `f(h(x))`. `h` must vanish at 0.
    pub fn compose(&self, h: &Self, order: i64) -> Result<Self> {
        let v = h.ord();
        if v < 1 {
            return Err(Error::NonzeroConstant);
        }
        if v >= h.trunc {
            return Err(Error::NotInvertible);
        }
        if self.is_zero() {
            return Ok(LaurentSeries::zero(sat(self.trunc.saturating_mul(v)).min(order)));
        }
        let fo = self.ord();
        let t = order
            .min(sat(self.trunc.saturating_mul(v)))
            .min(sat((v * fo).saturating_add(h.trunc).saturating_sub(v)));
        let mut power = h.pow(fo, t)?;
        let mut acc = LaurentSeries::zero(t);
        let mut k = fo;
        while k < self.trunc && v * k < t {
            if let Some(c) = self.coeffs.get(&k) {
                acc = acc.add(&power.scale(c));
            }
            power = power.mul(h).truncate(t);
            k += 1;
        }
        Ok(acc.truncate(t))
    }

    /// Compositional inverse of `h = a x + ...`, `a != 0`.
    pub fn comp_inverse(&self, order: i64) -> Result<Self> {
        if self.ord() != 1 || self.trunc <= 1 {
            return Err(Error::NotInvertible);
        }
        let a = self.coeffs[&1].clone();
        let t = order.min(self.trunc);
        let mut g = LaurentSeries::new([(1, a.recip())], t);
        for k in 2..t {
            let c = self.compose(&g, k + 1)?.coeff(k)?;
            let mut m = g.coeffs.clone();
            m.insert(k, -c / &a);
            g = LaurentSeries::new(m, t);
        }
        Ok(g)
    }

    /// `exp(l d/dx)` applied to `self`: `sum_k l^k(f)/k!`. `l` must vanish to order 2.
    pub fn exp_derivation(&self, l: &Self, order: i64) -> Result<Self> {
        if l.is_zero() {
            return Ok(self.truncate(order));
        }
        if l.ord() < 2 {
            return Err(Error::NonTerminating);
        }
        let mut term = self.truncate(order);
        let mut acc = term.clone();
        let mut k = 1i64;
        while !term.is_zero() && term.ord() < order {
            term = l.mul(&term.derivative()).scale(&frac(1, k)).truncate(order);
            acc = acc.add(&term);
            k += 1;
        }
        Ok(acc.truncate(order))
    }

    /// The vector field `l d/dx` (`l` vanishing to order 2) with `exp(l d/dx)(x) = self`,
    /// for `self = x + O(x^2)`.
    pub fn log_coordinate(&self, order: i64) -> Result<Self> {
        if self.ord() != 1 || self.coeff(1)? != Q::one() {
            return Err(Error::Invalid("log needs h = x + O(x^2)".into()));
        }
        let t = order.min(self.trunc);
        let mut l = LaurentSeries::zero(t);
        for k in 2..t {
            let e = LaurentSeries::x().exp_derivation(&l, k + 1)?;
            let c = self.coeff(k)? - e.coeff(k)?;
            l = l.add(&LaurentSeries::new([(k, c)], t));
        }
        Ok(l.truncate(t))
    }

    /// `h'''/h' - (3/2)(h''/h')^2`.
    pub fn schwarzian(&self, order: i64) -> Result<Self> {
        let d1 = self.derivative();
        if d1.ord() != 0 {
            return Err(Error::NotInvertible);
        }
        let d2 = d1.derivative();
        let d3 = d2.derivative();
        let inv = d1.inverse(order)?;
        let a = d3.mul(&inv);
        let b = d2.mul(&inv);
        Ok(a.sub(&b.mul(&b).scale(&frac(3, 2))).truncate(order))
    }
}

/// A formal power series in `q` with values in `V`, exact below `trunc`.
#[derive(Clone, Debug, PartialEq)]
pub struct QSeries<V> {
    pub coeffs: Vec<V>,
}

impl<V> QSeries<V> {
    pub fn trunc(&self) -> usize {
        self.coeffs.len()
    }
}

/// Local model of a symmetric bidifferential near the diagonal:
/// `dw dz/(w-z)^2 + sum c_ij w^i z^j dw dz`, with `c_ij` known for `i + j < trunc`.
#[derive(Clone, Debug, PartialEq)]
pub struct BiDiffLocal {
    pub regular: BTreeMap<(i64, i64), Q>,
    pub trunc: i64,
}

impl BiDiffLocal {
    pub fn standard_zero(trunc: i64) -> Self {
        BiDiffLocal { regular: BTreeMap::new(), trunc }
    }

    /// The bidifferential `dt dt'/(t-t')^2` written in a local coordinate `x` with
    /// `t = g(x)`, `g(0) = 0`, `g'(0) != 0`.
    pub fn pullback_standard(g: &LaurentSeries, trunc: i64) -> Result<Self> {
        if g.ord() != 1 {
            return Err(Error::NotInvertible);
        }
        let top = trunc + 2;
        if g.trunc() < top + 2 {
            return Err(Error::Truncation { have: g.trunc(), need: top + 1 });
        }
        let gc = |k: i64| g.coeff_or_zero(k);
        // homogeneous components: comp[k][i] = coefficient of x^i y^(k-i)
        let gg: Vec<Vec<Q>> = (0..top).map(|k| vec![gc(k + 1); (k + 1) as usize]).collect();
        let gp = |i: i64| gc(i + 1) * q(i + 1);
        let p: Vec<Vec<Q>> = (0..top).map(|k| (0..=k).map(|i| gp(i) * gp(k - i)).collect()).collect();
        let g2 = biv_mul(&gg, &gg, top as usize);
        let n: Vec<Vec<Q>> = p.iter().zip(&g2).map(|(a, b)| a.iter().zip(b).map(|(x, y)| x - y).collect()).collect();
        let h = biv_div_diag(&biv_div_diag(&n)?)?;
        let inv = biv_inv(&g2, trunc as usize);
        let f = biv_mul(&h, &inv, trunc as usize);
        let mut regular = BTreeMap::new();
        for (k, comp) in f.iter().enumerate() {
            for (i, c) in comp.iter().enumerate() {
                if !c.is_zero() {
                    regular.insert((i as i64, k as i64 - i as i64), c.clone());
                }
            }
        }
        Ok(BiDiffLocal { regular, trunc })
    }

    /// `S(z) = 6 sum_k (sum_{i+j=k} c_ij) z^k`.
    pub fn projective_connection(&self, order: i64) -> Result<LaurentSeries> {
        if order > self.trunc {
            return Err(Error::Truncation { have: self.trunc, need: order - 1 });
        }
        let mut s: BTreeMap<i64, Q> = BTreeMap::new();
        for ((i, j), c) in &self.regular {
            if i + j < order {
                *s.entry(i + j).or_insert_with(Q::zero) += c * q(6);
            }
        }
        Ok(LaurentSeries::new(s, order))
    }
}

fn biv_mul(a: &[Vec<Q>], b: &[Vec<Q>], top: usize) -> Vec<Vec<Q>> {
    let mut out: Vec<Vec<Q>> = (0..top).map(|k| vec![Q::zero(); k + 1]).collect();
    for (ka, ca) in a.iter().enumerate() {
        for (kb, cb) in b.iter().enumerate() {
            if ka + kb >= top {
                break;
            }
            for (i, x) in ca.iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                for (j, y) in cb.iter().enumerate() {
                    out[ka + kb][i + j] += x * y;
                }
            }
        }
    }
    out
}

/// Exact division by `(x - y)`; component `k` of the input becomes component `k - 1`.
fn biv_div_diag(n: &[Vec<Q>]) -> Result<Vec<Vec<Q>>> {
    let mut out = Vec::new();
    for (k, comp) in n.iter().enumerate() {
        let mut acc = Q::zero();
        let mut qs = Vec::with_capacity(k);
        for c in comp.iter().take(k) {
            acc -= c;
            qs.push(acc.clone());
        }
        if k == 0 {
            if !comp[0].is_zero() {
                return Err(Error::Invalid("not divisible by x - y".into()));
            }
            continue;
        }
        if acc != comp[k] {
            return Err(Error::Invalid("not divisible by x - y".into()));
        }
        out.push(qs);
    }
    Ok(out)
}

fn biv_inv(a: &[Vec<Q>], top: usize) -> Vec<Vec<Q>> {
    let c0 = a[0][0].recip();
    let mut out: Vec<Vec<Q>> = vec![vec![c0.clone()]];
    for k in 1..top {
        let mut acc = vec![Q::zero(); k + 1];
        for ka in 1..=k.min(a.len() - 1) {
            for (i, x) in a[ka].iter().enumerate() {
                for (j, y) in out[k - ka].iter().enumerate() {
                    acc[i + j] += x * y;
                }
            }
        }
        out.push(acc.into_iter().map(|v| -(v * &c0)).collect());
    }
    out
}
