//! Fock spaces on the Maya basis and the operators acting on them.
//!
//! Left actions on finite vectors are exact. Dual objects carry an explicit
//! weight cutoff: a [`DualFunctional`] knows its values on every tuple whose
//! total `L_0` weight is at most `cutoff`.

use alloc::collections::btree_map::Entry;
use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::laurent::LaurentSeries;
use crate::maya::{enumerate_weight, HalfInt, MayaDiagram};
use crate::rational::{frac, q, Q};
use crate::{Error, Result};

pub type Tuple = Vec<MayaDiagram>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Fermion {
    /// `psi_nu`: removes the slot `nu`, lowers charge.
    Psi,
    /// `psibar_nu`: fills the slot `-nu`, raises charge.
    PsiBar,
}

/// `psi_nu |M>`, as a sign and a diagram.
pub fn psi(nu: HalfInt, m: &MayaDiagram) -> Option<(bool, MayaDiagram)> {
    if !m.is_occupied(nu) {
        return None;
    }
    Some((m.occupied_above(nu) % 2 == 1, m.remove(nu)))
}

/// `psibar_nu |M>`, as a sign and a diagram.
pub fn psibar(nu: HalfInt, m: &MayaDiagram) -> Option<(bool, MayaDiagram)> {
    let x = -nu;
    if m.is_occupied(x) {
        return None;
    }
    Some((m.occupied_above(x) % 2 == 1, m.insert(x)))
}

/// One fermion mode on a basis vector; the flag is `true` for a minus sign.
pub fn fermion(kind: Fermion, nu: HalfInt, m: &MayaDiagram) -> Option<(bool, MayaDiagram)> {
    match kind {
        Fermion::Psi => psi(nu, m),
        Fermion::PsiBar => psibar(nu, m),
    }
}

/// Dual (right) action `<M| A = sum_N <M|A|N> <N|` of one mode, on a basis covector.
pub fn fermion_dual(kind: Fermion, nu: HalfInt, m: &MayaDiagram) -> Option<(bool, MayaDiagram)> {
    // <M|psi_nu = +-<M + nu|, <M|psibar_nu = +-<M - (-nu)|
    match kind {
        Fermion::Psi => {
            if m.is_occupied(nu) {
                return None;
            }
            Some((m.occupied_above(nu) % 2 == 1, m.insert(nu)))
        }
        Fermion::PsiBar => {
            let x = -nu;
            if !m.is_occupied(x) {
                return None;
            }
            Some((m.occupied_above(x) % 2 == 1, m.remove(x)))
        }
    }
}

/// Change of `L_0` weight under one mode.
pub fn weight_shift(kind: Fermion, nu: HalfInt) -> i64 {
    match kind {
        Fermion::Psi => -nu.up(),
        Fermion::PsiBar => -nu.down(),
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FockVector {
    terms: BTreeMap<MayaDiagram, Q>,
}

impl FockVector {
    pub fn zero() -> Self {
        FockVector::default()
    }

    pub fn basis(m: MayaDiagram) -> Self {
        FockVector { terms: [(m, Q::one())].into_iter().collect() }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (MayaDiagram, Q)>) -> Self {
        let mut v = FockVector::zero();
        for (m, c) in terms {
            v.add_term(m, c);
        }
        v
    }

    pub fn add_term(&mut self, m: MayaDiagram, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MayaDiagram, &Q)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &MayaDiagram) -> Q {
        self.terms.get(m).cloned().unwrap_or_else(Q::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut v = self.clone();
        for (m, c) in &other.terms {
            v.add_term(m.clone(), c.clone());
        }
        v
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-Q::one()))
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return FockVector::zero();
        }
        FockVector { terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect() }
    }

    pub fn max_weight(&self) -> Option<i64> {
        self.terms.keys().map(|m| m.weight()).max()
    }

    /// Left action of one fermion mode.
    pub fn apply_fermion(&self, kind: Fermion, nu: HalfInt) -> Self {
        let mut out = FockVector::zero();
        for (m, c) in &self.terms {
            if let Some((neg, n)) = fermion(kind, nu, m) {
                out.add_term(n, if neg { -c.clone() } else { c.clone() });
            }
        }
        out
    }

    pub fn apply(&self, op: &dyn Operator) -> Result<Self> {
        let mut out = FockVector::zero();
        for (m, c) in &self.terms {
            out = out.add(&op.apply_basis(m)?.scale(c));
        }
        Ok(out)
    }

    /// Charge-homogeneous parts.
    pub fn by_charge(&self) -> BTreeMap<i64, FockVector> {
        let mut out: BTreeMap<i64, FockVector> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(m.charge()).or_default().add_term(m.clone(), c.clone());
        }
        out
    }
}

/// A linear operator on the Fock space with a definite parity.
pub trait Operator {
    fn is_odd(&self) -> bool;
    fn apply_basis(&self, m: &MayaDiagram) -> Result<FockVector>;
}

/// A single mode `psi_nu` or `psibar_nu`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Mode(pub Fermion, pub HalfInt);

impl Operator for Mode {
    fn is_odd(&self) -> bool {
        true
    }
    fn apply_basis(&self, m: &MayaDiagram) -> Result<FockVector> {
        Ok(match fermion(self.0, self.1, m) {
            Some((neg, n)) => FockVector::from_terms([(n, if neg { -Q::one() } else { Q::one() })]),
            None => FockVector::zero(),
        })
    }
}

/// A smeared fermion `sum_nu c_nu psi_nu` (or `psibar`), with coefficients
/// known for `nu < exact_below`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModeOperator {
    pub kind: Fermion,
    pub coeffs: BTreeMap<HalfInt, Q>,
    pub exact_below: HalfInt,
}

impl ModeOperator {
    /// `psi[(sum a_n x^n) dx] = sum a_n psi_{n+1/2}`, `psibar[sum b_m x^m] = sum b_m psibar_{m+1/2}`.
    /// The same mode assignment applies whether the series is read as a form or a function.
    pub fn smear(kind: Fermion, s: &LaurentSeries) -> Self {
        ModeOperator {
            kind,
            coeffs: s.terms().map(|(k, c)| (HalfInt::plus_half(k), c.clone())).collect(),
            exact_below: HalfInt::plus_half(s.trunc().min(i64::MAX / 16)),
        }
    }

    pub fn single(kind: Fermion, nu: HalfInt) -> Self {
        ModeOperator { kind, coeffs: [(nu, Q::one())].into_iter().collect(), exact_below: HalfInt::plus_half(i64::MAX / 16) }
    }

    /// Smallest `exact_below` this operator needs to act exactly on `m`.
    pub fn required_bound(kind: Fermion, m: &MayaDiagram) -> HalfInt {
        match kind {
            Fermion::Psi => m.top().add_int(1),
            Fermion::PsiBar => (-m.bottom_hole()).add_int(1).max(HalfInt::plus_half(0)),
        }
    }

    fn check(&self, m: &MayaDiagram) -> Result<()> {
        let need = Self::required_bound(self.kind, m);
        if self.exact_below < need {
            return Err(Error::Truncation { have: self.exact_below.down(), need: need.down() });
        }
        Ok(())
    }
}

impl Operator for ModeOperator {
    fn is_odd(&self) -> bool {
        true
    }
    fn apply_basis(&self, m: &MayaDiagram) -> Result<FockVector> {
        self.check(m)?;
        let mut out = FockVector::zero();
        for (nu, c) in &self.coeffs {
            if let Some((neg, n)) = fermion(self.kind, *nu, m) {
                out.add_term(n, if neg { -c.clone() } else { c.clone() });
            }
        }
        Ok(out)
    }
}

/// Half-integers `nu` (as twice-values) outside of which a fermion bilinear
/// `:A_{n-nu} B_nu:` cannot act on `m`.
fn bilinear_range(m: &MayaDiagram, n: i64) -> core::ops::RangeInclusive<i64> {
    let b = m.particles().chain(m.holes()).map(|h| h.twice().abs()).max().unwrap_or(1);
    let r = b + 2 * n.abs() + 2;
    -r..=r
}

fn apply_pair(first: (Fermion, HalfInt), second: (Fermion, HalfInt), m: &MayaDiagram) -> Option<(bool, MayaDiagram)> {
    // second acts first
    let (s1, a) = fermion(second.0, second.1, m)?;
    let (s2, b) = fermion(first.0, first.1, &a)?;
    Some((s1 ^ s2, b))
}

/// Current mode `J_n = sum_nu :psibar_{n-nu} psi_nu:`.
#[derive(Clone, Copy, Debug)]
pub struct Current(pub i64);

impl Operator for Current {
    fn is_odd(&self) -> bool {
        false
    }
    fn apply_basis(&self, m: &MayaDiagram) -> Result<FockVector> {
        let n = self.0;
        let mut out = FockVector::zero();
        for t in bilinear_range(m, n).filter(|t| t.rem_euclid(2) == 1) {
            let nu = HalfInt::from_twice(t).unwrap();
            let lam = (-nu).add_int(n);
            // :psibar_lam psi_nu: = -psi_nu psibar_lam when nu < 0 < lam
            let (res, flip) = if nu.is_negative() && !lam.is_negative() {
                (apply_pair((Fermion::Psi, nu), (Fermion::PsiBar, lam), m), true)
            } else {
                (apply_pair((Fermion::PsiBar, lam), (Fermion::Psi, nu), m), false)
            };
            if let Some((neg, d)) = res {
                out.add_term(d, if neg ^ flip { -Q::one() } else { Q::one() });
            }
        }
        Ok(out)
    }
}

/// Virasoro mode `L_n^{(j)}` of `T^{(j)} = :(1-j) psi' psibar - j psi psibar':`.
#[derive(Clone, Debug)]
pub struct Virasoro {
    pub j: Q,
    pub n: i64,
}

impl Virasoro {
    pub fn new(n: i64) -> Self {
        Virasoro { j: Q::zero(), n }
    }

    pub fn with_spin(j: Q, n: i64) -> Self {
        Virasoro { j, n }
    }
}

impl Operator for Virasoro {
    fn is_odd(&self) -> bool {
        false
    }
    fn apply_basis(&self, m: &MayaDiagram) -> Result<FockVector> {
        let n = self.n;
        let one = Q::one();
        let mut out = FockVector::zero();
        for t in bilinear_range(m, n).filter(|t| t.rem_euclid(2) == 1) {
            let mu = HalfInt::from_twice(t).unwrap();
            let lam = (-mu).add_int(n);
            // coefficient (1-j)(-mu-1/2) + j(lam+1/2) of :psi_mu psibar_lam:
            let c = (&one - &self.j) * frac(-t - 1, 2) + &self.j * frac(lam.twice() + 1, 2);
            if c.is_zero() {
                continue;
            }
            let (res, flip) = if lam.is_negative() && !mu.is_negative() {
                (apply_pair((Fermion::PsiBar, lam), (Fermion::Psi, mu), m), true)
            } else {
                (apply_pair((Fermion::Psi, mu), (Fermion::PsiBar, lam), m), false)
            };
            if let Some((neg, d)) = res {
                out.add_term(d, if neg ^ flip { -c } else { c });
            }
        }
        Ok(out)
    }
}

/// `T[l] = Res(T(x) l(x) dx) = sum_n l_{n+1} L_n` for `l = sum l_k x^k d/dx` (spin 0).
#[derive(Clone, Debug)]
pub struct TField {
    pub field: LaurentSeries,
}

impl TField {
    pub fn new(field: LaurentSeries) -> Self {
        TField { field }
    }
}

impl Operator for TField {
    fn is_odd(&self) -> bool {
        false
    }
    fn apply_basis(&self, m: &MayaDiagram) -> Result<FockVector> {
        let w = m.weight();
        // L_n kills m once n > weight
        if self.field.trunc() <= w + 2 {
            return Err(Error::Truncation { have: self.field.trunc(), need: w + 1 });
        }
        let mut out = FockVector::zero();
        for (k, c) in self.field.terms() {
            if k - 1 > w {
                break;
            }
            out = out.add(&Virasoro::new(k - 1).apply_basis(m)?.scale(c));
        }
        Ok(out)
    }
}

/// `a * A + b * B` style finite combinations and products of operators.
pub struct Composite<'a> {
    pub terms: Vec<(Q, Vec<&'a dyn Operator>)>,
    pub odd: bool,
}

impl Operator for Composite<'_> {
    fn is_odd(&self) -> bool {
        self.odd
    }
    fn apply_basis(&self, m: &MayaDiagram) -> Result<FockVector> {
        let mut out = FockVector::zero();
        for (c, ops) in &self.terms {
            let mut v = FockVector::basis(m.clone());
            for op in ops.iter().rev() {
                v = v.apply(*op)?;
            }
            out = out.add(&v.scale(c));
        }
        Ok(out)
    }
}

/// Finite combination of tensor products of basis vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TensorVector {
    arity: usize,
    terms: BTreeMap<Tuple, Q>,
}

impl TensorVector {
    pub fn zero(arity: usize) -> Self {
        TensorVector { arity, terms: BTreeMap::new() }
    }

    pub fn basis(t: Tuple) -> Self {
        TensorVector { arity: t.len(), terms: [(t, Q::one())].into_iter().collect() }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn add_term(&mut self, t: Tuple, c: Q) {
        debug_assert_eq!(t.len(), self.arity);
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(t.clone()).or_insert_with(Q::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&t);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Tuple, &Q)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut v = self.clone();
        for (t, c) in &other.terms {
            v.add_term(t.clone(), c.clone());
        }
        v
    }

    pub fn scale(&self, c: &Q) -> Self {
        let mut v = TensorVector::zero(self.arity);
        for (t, x) in &self.terms {
            v.add_term(t.clone(), x * c);
        }
        v
    }

    pub fn max_weight(&self) -> Option<i64> {
        self.terms.keys().map(|t| tuple_weight(t)).max()
    }

    /// `u_1 (x) ... (x) u_N` for vectors `u_i`.
    pub fn product(factors: &[FockVector]) -> Self {
        let mut acc = TensorVector { arity: 0, terms: [(Vec::new(), Q::one())].into_iter().collect() };
        for f in factors {
            let mut next = TensorVector::zero(acc.arity + 1);
            for (t, c) in &acc.terms {
                for (m, x) in f.terms() {
                    let mut t2 = t.clone();
                    t2.push(m.clone());
                    next.add_term(t2, c * x);
                }
            }
            acc = next;
        }
        acc
    }
}

pub fn tuple_weight(t: &[MayaDiagram]) -> i64 {
    t.iter().map(|m| m.weight()).sum()
}

pub fn tuple_charge(t: &[MayaDiagram]) -> i64 {
    t.iter().map(|m| m.charge()).sum()
}

/// `rho_j(op)` on a single tuple (slot `j` is 0-based). Odd operators pick up
/// the Koszul sign `(-1)^{p_0 + ... + p_{j-1}}`.
pub fn apply_rho_basis(j: usize, op: &dyn Operator, t: &[MayaDiagram]) -> Result<TensorVector> {
    if j >= t.len() {
        return Err(Error::Arity { expected: j + 1, got: t.len() });
    }
    let prefix: i64 = t[..j].iter().map(|m| m.charge()).sum();
    let neg = op.is_odd() && prefix.rem_euclid(2) == 1;
    let v = op.apply_basis(&t[j])?;
    let mut out = TensorVector::zero(t.len());
    for (m, c) in v.terms() {
        let mut t2 = t.to_vec();
        t2[j] = m.clone();
        out.add_term(t2, if neg { -c.clone() } else { c.clone() });
    }
    Ok(out)
}

pub fn apply_rho(j: usize, op: &dyn Operator, v: &TensorVector) -> Result<TensorVector> {
    if j >= v.arity {
        return Err(Error::Arity { expected: j + 1, got: v.arity });
    }
    let mut out = TensorVector::zero(v.arity);
    for (t, c) in v.terms() {
        out = out.add(&apply_rho_basis(j, op, t)?.scale(c));
    }
    Ok(out)
}

/// Anything that can be evaluated on basis tuples.
pub trait Functional {
    fn arity(&self) -> usize;
    fn eval(&self, t: &[MayaDiagram]) -> Result<Q>;

    fn pair(&self, v: &TensorVector) -> Result<Q> {
        if v.arity() != self.arity() {
            return Err(Error::Arity { expected: self.arity(), got: v.arity() });
        }
        let mut acc = Q::zero();
        for (t, c) in v.terms() {
            acc += self.eval(t)? * c;
        }
        Ok(acc)
    }
}

/// Dual vector known on every tuple of total weight `<= cutoff`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualFunctional {
    arity: usize,
    cutoff: i64,
    values: BTreeMap<Tuple, Q>,
}

impl DualFunctional {
    pub fn new(arity: usize, cutoff: i64, values: impl IntoIterator<Item = (Tuple, Q)>) -> Self {
        let values = values
            .into_iter()
            .filter(|(t, c)| !c.is_zero() && tuple_weight(t) <= cutoff)
            .collect();
        DualFunctional { arity, cutoff, values }
    }

    /// `<M|` in a single slot.
    pub fn basis(m: MayaDiagram, cutoff: i64) -> Self {
        DualFunctional::new(1, cutoff, [(alloc::vec![m], Q::one())])
    }

    pub fn cutoff(&self) -> i64 {
        self.cutoff
    }

    pub fn values(&self) -> impl Iterator<Item = (&Tuple, &Q)> {
        self.values.iter()
    }

    pub fn support_len(&self) -> usize {
        self.values.len()
    }

    pub fn scale(&self, c: &Q) -> Self {
        DualFunctional::new(self.arity, self.cutoff, self.values.iter().map(|(t, v)| (t.clone(), v * c)))
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut vals = self.values.clone();
        for (t, v) in &other.values {
            let e = vals.entry(t.clone()).or_insert_with(Q::zero);
            *e -= v;
        }
        DualFunctional::new(self.arity, self.cutoff.min(other.cutoff), vals)
    }

    /// Restricts to a smaller cutoff.
    pub fn restrict(&self, cutoff: i64) -> Self {
        DualFunctional::new(self.arity, cutoff.min(self.cutoff), self.values.clone())
    }

    /// Max of `|value|` over the support.
    pub fn max_abs(&self) -> Q {
        self.values.values().map(|v| v.abs()).max().unwrap_or_else(Q::zero)
    }

    /// Materializes any functional on the window `weight <= cutoff`, optionally
    /// restricted to tuples of total charge `charge`.
    pub fn materialize(f: &dyn Functional, cutoff: i64, charge: Option<i64>) -> Result<Self> {
        let mut vals = Vec::new();
        for t in window(f.arity(), cutoff, charge) {
            let v = f.eval(&t)?;
            vals.push((t, v));
        }
        Ok(DualFunctional::new(f.arity(), cutoff, vals))
    }

    /// Right action `phi . A` of one mode on a one-slot functional; the surviving
    /// cutoff shrinks by the weight the mode can add.
    pub fn apply_fermion_right(&self, kind: Fermion, nu: HalfInt) -> Result<Self> {
        if self.arity != 1 {
            return Err(Error::Arity { expected: 1, got: self.arity });
        }
        let shift = weight_shift(kind, nu);
        let cutoff = self.cutoff - shift.max(0);
        if cutoff < 0 {
            return Err(Error::Cutoff { cutoff: self.cutoff, weight: shift });
        }
        let mut vals = Vec::new();
        for (t, c) in &self.values {
            if let Some((neg, n)) = fermion_dual(kind, nu, &t[0]) {
                vals.push((alloc::vec![n], if neg { -c.clone() } else { c.clone() }));
            }
        }
        Ok(DualFunctional::new(1, cutoff, vals))
    }
}

impl Functional for DualFunctional {
    fn arity(&self) -> usize {
        self.arity
    }
    fn eval(&self, t: &[MayaDiagram]) -> Result<Q> {
        if t.len() != self.arity {
            return Err(Error::Arity { expected: self.arity, got: t.len() });
        }
        let w = tuple_weight(t);
        if w > self.cutoff {
            return Err(Error::Cutoff { cutoff: self.cutoff, weight: w });
        }
        Ok(self.values.get(t).cloned().unwrap_or_else(Q::zero))
    }
}

/// All tuples of `arity` diagrams with total weight `<= max_weight` (and total
/// charge `charge` if given), in canonical tuple order: by total weight, then
/// lexicographically.
pub fn window(arity: usize, max_weight: i64, charge: Option<i64>) -> Vec<Tuple> {
    let by_weight: Vec<Vec<MayaDiagram>> = (0..=max_weight.max(0)).map(enumerate_weight).collect();
    let mut out = Vec::new();
    fn go(
        slot: usize,
        arity: usize,
        left: i64,
        charge_left: Option<i64>,
        by_weight: &[Vec<MayaDiagram>],
        cur: &mut Tuple,
        out: &mut Vec<Tuple>,
    ) {
        if slot == arity {
            if charge_left.is_none_or(|c| c == 0) {
                out.push(cur.clone());
            }
            return;
        }
        for w in 0..=left {
            for m in &by_weight[w as usize] {
                // the remaining slots have weight <= left - w; charge p needs weight >= p(p+1)/2
                if let Some(c) = charge_left {
                    let rest = c - m.charge();
                    let slots = (arity - slot - 1) as i64;
                    if slots == 0 && rest != 0 {
                        continue;
                    }
                    if slots > 0 && min_weight_for_charge(rest, slots) > left - w {
                        continue;
                    }
                }
                cur.push(m.clone());
                go(slot + 1, arity, left - w, charge_left.map(|c| c - m.charge()), by_weight, cur, out);
                cur.pop();
            }
        }
    }
    if max_weight >= 0 {
        go(0, arity, max_weight, charge, &by_weight, &mut Vec::new(), &mut out);
    }
    out.sort_by(|a, b| tuple_weight(a).cmp(&tuple_weight(b)).then_with(|| a.cmp(b)));
    out
}

/// Least total weight of `slots` diagrams with total charge `c`.
fn min_weight_for_charge(c: i64, slots: i64) -> i64 {
    // spread the charge as evenly as possible; weight p(p+1)/2 is convex in p
    let w = |p: i64| p * (p + 1) / 2;
    let base = c.div_euclid(slots);
    let extra = c.rem_euclid(slots);
    extra * w(base + 1) + (slots - extra) * w(base)
}

/// Commutator `[A, B]_{+-}` applied to a basis vector: `AB v - sign * BA v`.
pub fn bracket(a: &dyn Operator, b: &dyn Operator, anti: bool, m: &MayaDiagram) -> Result<FockVector> {
    let v = FockVector::basis(m.clone());
    let ab = v.apply(b)?.apply(a)?;
    let ba = v.apply(a)?.apply(b)?;
    Ok(if anti { ab.add(&ba) } else { ab.sub(&ba) })
}

/// `L_0` eigenvalue helper used by tests and the sewing weights.
pub fn l0_eigenvalue(m: &MayaDiagram) -> Q {
    q(m.weight())
}
