//! Half-integers, Maya diagrams and their gradings.
//!
//! A Maya diagram of charge `p` is a set `S` of half-integers that agrees with
//! `{x < p}` away from finitely many places. It is stored as the pair
//! `(mus, nus)`: `-mus` are the occupied positive slots ("particles") and
//! `nus` are the empty negative slots ("holes"), so that
//! `S = (Z+1/2)_{<0} \ nus  ∪  {-mu : mu in mus}`.
//! The basis vector `|M>` is the semi-infinite wedge of `S` in decreasing order.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::fmt;

use crate::{Error, Result};

/// A half-integer `twice / 2` with `twice` odd.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfInt(i64);

impl HalfInt {
    /// Builds `twice / 2`; `None` unless `twice` is odd.
    pub fn from_twice(twice: i64) -> Option<Self> {
        (twice.rem_euclid(2) == 1).then_some(HalfInt(twice))
    }

    /// `n + 1/2`.
    pub fn plus_half(n: i64) -> Self {
        HalfInt(2 * n + 1)
    }

    /// `n - 1/2`.
    pub fn minus_half(n: i64) -> Self {
        HalfInt(2 * n - 1)
    }

    pub fn twice(self) -> i64 {
        self.0
    }

    /// `self + n` for an integer `n`.
    pub fn add_int(self, n: i64) -> Self {
        HalfInt(self.0 + 2 * n)
    }

    /// `self + 1/2`, an integer.
    pub fn up(self) -> i64 {
        (self.0 + 1) / 2
    }

    /// `self - 1/2`, an integer.
    pub fn down(self) -> i64 {
        (self.0 - 1) / 2
    }

    pub fn is_negative(self) -> bool {
        self.0 < 0
    }
}

impl core::ops::Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> HalfInt {
        HalfInt(-self.0)
    }
}

impl core::ops::Add for HalfInt {
    type Output = i64;
    /// The sum of two half-integers is an integer.
    fn add(self, rhs: HalfInt) -> i64 {
        (self.0 + rhs.0) / 2
    }
}

impl fmt::Debug for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/2", self.0)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/2", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Grading {
    pub charge: i64,
    pub degree: i64,
}

impl Grading {
    /// The `L_0` eigenvalue `d + p(p+1)/2`.
    pub fn weight(self) -> i64 {
        self.degree + self.charge * (self.charge + 1) / 2
    }
}

/// Canonical Maya diagram. The derived order (lexicographic on `(mus, nus)`)
/// is the canonical order used for every basis listing.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct MayaDiagram {
    mus: Vec<HalfInt>,
    nus: Vec<HalfInt>,
}

impl fmt::Debug for MayaDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tw = |v: &[HalfInt]| v.iter().map(|h| h.0).collect::<Vec<_>>();
        write!(f, "M{:?}{:?}", tw(&self.mus), tw(&self.nus))
    }
}

fn strictly_increasing_negative(v: &[HalfInt]) -> bool {
    v.iter().all(|h| h.is_negative()) && v.windows(2).all(|w| w[0] < w[1])
}

impl MayaDiagram {
    pub fn vacuum() -> Self {
        MayaDiagram::default()
    }

    pub fn new(mus: Vec<HalfInt>, nus: Vec<HalfInt>) -> Result<Self> {
        if !strictly_increasing_negative(&mus) || !strictly_increasing_negative(&nus) {
            return Err(Error::Maya("mus and nus must be strictly increasing and negative".into()));
        }
        Ok(MayaDiagram { mus, nus })
    }

    /// Builds from twice-values, as used by the JSON format.
    pub fn from_twice(mus: &[i64], nus: &[i64]) -> Result<Self> {
        let conv = |v: &[i64]| -> Result<Vec<HalfInt>> {
            v.iter()
                .map(|&t| HalfInt::from_twice(t).ok_or_else(|| Error::Maya("even twice-value".into())))
                .collect()
        };
        MayaDiagram::new(conv(mus)?, conv(nus)?)
    }

    /// The charge-`p` vacuum `|p>`.
    pub fn charged_vacuum(p: i64) -> Self {
        if p >= 0 {
            MayaDiagram { mus: (0..p).map(|k| HalfInt::minus_half(-p + k + 1)).collect(), nus: Vec::new() }
        } else {
            MayaDiagram { mus: Vec::new(), nus: (0..-p).map(|k| HalfInt::minus_half(p + k + 1)).collect() }
        }
    }

    pub fn mus(&self) -> &[HalfInt] {
        &self.mus
    }

    pub fn nus(&self) -> &[HalfInt] {
        &self.nus
    }

    pub fn charge(&self) -> i64 {
        self.mus.len() as i64 - self.nus.len() as i64
    }

    pub fn grading(&self) -> Grading {
        let p = self.charge();
        let s: i64 = self.mus.iter().chain(&self.nus).map(|h| h.0).sum();
        Grading { charge: p, degree: (-s - p * p) / 2 }
    }

    pub fn weight(&self) -> i64 {
        self.grading().weight()
    }

    /// Number of modes that differ from the empty sea: particles plus holes.
    pub fn excitations(&self) -> usize {
        self.mus.len() + self.nus.len()
    }

    /// Occupied positive slots, increasing.
    pub fn particles(&self) -> impl DoubleEndedIterator<Item = HalfInt> + '_ {
        self.mus.iter().rev().map(|&m| -m)
    }

    /// Empty negative slots, increasing.
    pub fn holes(&self) -> impl DoubleEndedIterator<Item = HalfInt> + '_ {
        self.nus.iter().copied()
    }

    pub fn is_occupied(&self, x: HalfInt) -> bool {
        if x.is_negative() {
            self.nus.binary_search(&x).is_err()
        } else {
            self.mus.binary_search(&-x).is_ok()
        }
    }

    /// Number of occupied slots strictly above `x`.
    pub fn occupied_above(&self, x: HalfInt) -> i64 {
        let parts = self.particles().filter(|&y| y > x).count() as i64;
        if x.is_negative() {
            // negative slots strictly between x and 0
            let slots = (-x.0 - 1) / 2;
            let holes = self.nus.iter().filter(|&&h| h > x).count() as i64;
            parts + slots - holes
        } else {
            parts
        }
    }

    /// Largest occupied slot.
    pub fn top(&self) -> HalfInt {
        match self.mus.first() {
            Some(&m) => -m,
            None => {
                let mut x = HalfInt(-1);
                while !self.is_occupied(x) {
                    x = x.add_int(-1);
                }
                x
            }
        }
    }

    /// Smallest empty slot.
    pub fn bottom_hole(&self) -> HalfInt {
        match self.nus.first() {
            Some(&h) => h,
            None => {
                let mut x = HalfInt(1);
                while self.is_occupied(x) {
                    x = x.add_int(1);
                }
                x
            }
        }
    }

    /// Marks `x` occupied; the caller ensures it was empty.
    pub(crate) fn insert(&self, x: HalfInt) -> Self {
        let mut m = self.clone();
        if x.is_negative() {
            let i = m.nus.binary_search(&x).expect("slot was not empty");
            m.nus.remove(i);
        } else {
            let i = m.mus.binary_search(&-x).expect_err("slot was not empty");
            m.mus.insert(i, -x);
        }
        m
    }

    /// Marks `x` empty; the caller ensures it was occupied.
    pub(crate) fn remove(&self, x: HalfInt) -> Self {
        let mut m = self.clone();
        if x.is_negative() {
            let i = m.nus.binary_search(&x).expect_err("slot was not occupied");
            m.nus.insert(i, x);
        } else {
            let i = m.mus.binary_search(&-x).expect("slot was not occupied");
            m.mus.remove(i);
        }
        m
    }

    /// Mirror image in 0 with black and white exchanged: swaps `mus` and `nus`.
    pub fn reflect(&self) -> Self {
        MayaDiagram { mus: self.nus.clone(), nus: self.mus.clone() }
    }

    /// `S -> S + 1`.
    pub fn shift(&self) -> Self {
        let mut particles: Vec<HalfInt> = self.particles().map(|x| x.add_int(1)).collect();
        if self.is_occupied(HalfInt(-1)) {
            particles.insert(0, HalfInt(1));
        }
        let nus = self.holes().map(|h| h.add_int(1)).filter(|h| h.is_negative()).collect();
        MayaDiagram { mus: particles.into_iter().rev().map(|x| -x).collect(), nus }
    }

    /// `S -> S - 1`.
    pub fn unshift(&self) -> Self {
        let particles: Vec<HalfInt> =
            self.particles().map(|x| x.add_int(-1)).filter(|x| !x.is_negative()).collect();
        let mut nus: Vec<HalfInt> = self.holes().map(|h| h.add_int(-1)).collect();
        if !self.is_occupied(HalfInt(1)) {
            nus.push(HalfInt(-1));
        }
        MayaDiagram { mus: particles.into_iter().rev().map(|x| -x).collect(), nus }
    }

    /// The creation word: `sign * psibar_{mu_1}...psibar_{mu_r} psi_{nu_s}...psi_{nu_1}|0> = |M>`
    /// with `sign = (-1)^{sum nu + s/2}`.
    pub fn operator_word(&self) -> (Vec<HalfInt>, Vec<HalfInt>, i64) {
        let s = self.nus.len() as i64;
        let e = (self.nus.iter().map(|h| h.0).sum::<i64>() + s) / 2;
        let sign = if e.rem_euclid(2) == 0 { 1 } else { -1 };
        (self.mus.clone(), self.nus.clone(), sign)
    }

    /// Diagram of charge `p` attached to a partition (weakly decreasing parts):
    /// occupied slots `lambda_i - i + p + 1/2`.
    pub fn from_partition(p: i64, parts: &[i64]) -> Self {
        let n = parts.len() as i64;
        let occ: BTreeSet<HalfInt> = (1..=n)
            .map(|i| HalfInt::plus_half(parts[(i - 1) as usize] - i + p))
            .collect();
        // slots p - i + 1/2 for i > n are occupied; below `low` everything is.
        let low = HalfInt::plus_half(p - n);
        Self::from_window(&occ, low)
    }

    /// `occ` lists the occupied slots that are `>= low`; everything below `low` is occupied.
    fn from_window(occ: &BTreeSet<HalfInt>, low: HalfInt) -> Self {
        let occupied = |x: HalfInt| x < low || occ.contains(&x);
        let high = occ.iter().next_back().copied().unwrap_or(low).max(low);
        let mut mus = Vec::new();
        let mut x = high;
        while !x.is_negative() {
            if occupied(x) {
                mus.push(-x);
            }
            x = x.add_int(-1);
        }
        let mut nus = Vec::new();
        let mut x = low.min(HalfInt::minus_half(0));
        while x.is_negative() {
            if !occupied(x) {
                nus.push(x);
            }
            x = x.add_int(1);
        }
        MayaDiagram { mus, nus }
    }

    /// Partition of the diagram (weakly decreasing, no zero parts).
    pub fn partition(&self) -> Vec<i64> {
        let p = self.charge();
        let mut parts = Vec::new();
        let mut x = self.top();
        let mut i = 1;
        loop {
            while !self.is_occupied(x) {
                x = x.add_int(-1);
            }
            let part = x.down() + i - p;
            if part <= 0 {
                break;
            }
            parts.push(part);
            x = x.add_int(-1);
            i += 1;
        }
        parts
    }

    /// From a characteristic function of charge `p` given by its moves
    /// `(nu, mu(nu))`; `mu` is the identity on unlisted `nu < p`.
    pub fn from_moves(p: i64, moves: &[(HalfInt, HalfInt)]) -> Result<Self> {
        let mut image = BTreeSet::new();
        let low = moves
            .iter()
            .flat_map(|&(a, b)| [a, b])
            .chain([HalfInt::minus_half(p), HalfInt(-1)])
            .min()
            .unwrap()
            .add_int(-1);
        let mut nu = low;
        let mut prev: Option<HalfInt> = None;
        while nu < HalfInt::plus_half(p) {
            let img = moves.iter().find(|m| m.0 == nu).map(|m| m.1).unwrap_or(nu);
            if prev.is_some_and(|q| q >= img) {
                return Err(Error::Maya("characteristic function must be strictly increasing".into()));
            }
            prev = Some(img);
            image.insert(img);
            nu = nu.add_int(1);
        }
        if moves.iter().any(|m| m.0 >= HalfInt::plus_half(p)) {
            return Err(Error::Maya("move outside the domain nu < p".into()));
        }
        Ok(Self::from_window(&image, low))
    }

    /// The moves `(nu, mu(nu))` with `mu(nu) != nu`, increasing in `nu`.
    pub fn moves(&self) -> Vec<(HalfInt, HalfInt)> {
        let p = self.charge();
        let low = self.nus.first().copied().unwrap_or(HalfInt(-1)).min(HalfInt::minus_half(p)).add_int(-1);
        let mut occupied = Vec::new();
        let mut x = low;
        while x <= self.top() {
            if self.is_occupied(x) {
                occupied.push(x);
            }
            x = x.add_int(1);
        }
        // the i-th occupied slot from the top is mu(p - i + 1/2)
        let k = occupied.len() as i64;
        occupied
            .iter()
            .enumerate()
            .map(|(idx, &img)| (HalfInt::plus_half(p - (k - idx as i64)), img))
            .filter(|(a, b)| a != b)
            .collect()
    }
}

/// Partitions of `n` as weakly decreasing part lists, in reverse lexicographic order.
pub fn partitions(n: i64) -> Vec<Vec<i64>> {
    fn go(n: i64, max: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if n == 0 {
            out.push(cur.clone());
            return;
        }
        for k in (1..=n.min(max)).rev() {
            cur.push(k);
            go(n - k, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if n >= 0 {
        go(n, n, &mut Vec::new(), &mut out);
    }
    out
}

/// All diagrams of charge `p` and degree `d`, in canonical order.
pub fn enumerate_basis(p: i64, d: i64) -> Vec<MayaDiagram> {
    let mut v: Vec<MayaDiagram> = partitions(d).iter().map(|l| MayaDiagram::from_partition(p, l)).collect();
    v.sort();
    v
}

/// All `(charge, degree)` pairs of weight `w`.
pub fn gradings_of_weight(w: i64) -> Vec<Grading> {
    let mut out = Vec::new();
    if w < 0 {
        return out;
    }
    let mut p = 0i64;
    while p * (p + 1) / 2 <= w {
        out.push(Grading { charge: p, degree: w - p * (p + 1) / 2 });
        if p > 0 {
            out.push(Grading { charge: -p - 1, degree: w - p * (p + 1) / 2 });
        }
        p += 1;
    }
    out.push(Grading { charge: -1, degree: w });
    out.sort();
    out
}

/// All diagrams of `L_0` weight `w`, in canonical order.
pub fn enumerate_weight(w: i64) -> Vec<MayaDiagram> {
    let mut v: Vec<MayaDiagram> =
        gradings_of_weight(w).into_iter().flat_map(|g| enumerate_basis(g.charge, g.degree)).collect();
    v.sort();
    v
}
