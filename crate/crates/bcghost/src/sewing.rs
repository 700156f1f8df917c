//! Pairings between Fock spaces of opposite charge, their dual bases, and the
//! sewing of a vacuum on the normalization of a one-node curve into a formal
//! `q`-series of functionals on the smoothed family.

use alloc::collections::BTreeMap;
use alloc::rc::Rc;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use core::cell::RefCell;

use num_traits::{Signed, Zero};

use crate::curve::{CurveSpec, GlobalObject, Kind, PointRef};
use crate::fock::{apply_rho_basis, window, DualFunctional, FockVector, Functional, TField, Tuple};
use crate::laurent::QSeries;
use crate::maya::{enumerate_basis, MayaDiagram};
use crate::rational::{q, Q};
use crate::vacua::SlotOperators;
use crate::{Error, Result};

/// The `q^0` coefficient of [`sew`] is `SEWING_SIGN` times the restriction of the
/// vacuum through `|0_{+,-}>`.
pub const SEWING_SIGN: i64 = -1;

/// `1` for `n = 1, 2 (mod 4)`, `-1` for `n = 0, 3 (mod 4)`.
pub fn alpha(n: i64) -> i64 {
    match n.rem_euclid(4) {
        1 | 2 => 1,
        _ => -1,
    }
}

fn map_basis(v: &FockVector, f: impl Fn(&MayaDiagram) -> MayaDiagram) -> FockVector {
    FockVector::from_terms(v.terms().map(|(m, c)| (f(m), c.clone())))
}

/// The linear extension of the mirror map `r`.
pub fn reflect(v: &FockVector) -> FockVector {
    map_basis(v, MayaDiagram::reflect)
}

/// The linear extension of the shift `s`.
pub fn shift(v: &FockVector) -> FockVector {
    map_basis(v, MayaDiagram::shift)
}

pub fn unshift(v: &FockVector) -> FockVector {
    map_basis(v, MayaDiagram::unshift)
}

/// The symmetric pairing `(M|N) = delta_{M,N}`.
pub fn pair_sym(u: &FockVector, v: &FockVector) -> Q {
    u.terms().map(|(m, c)| c * v.coeff(m)).sum()
}

fn homogeneous_charge(v: &FockVector) -> Result<Option<i64>> {
    let charges = v.by_charge();
    match charges.len() {
        0 => Ok(None),
        1 => Ok(charges.keys().next().copied()),
        _ => Err(Error::Charge("vector is not charge homogeneous".to_string())),
    }
}

/// `{u|v} = alpha(p) (u | r(v))` for `u` of charge `p` and `v` of charge `-p`.
pub fn pair_braced(u: &FockVector, v: &FockVector) -> Result<Q> {
    let (Some(p), Some(pv)) = (homogeneous_charge(u)?, homogeneous_charge(v)?) else {
        return Ok(Q::zero());
    };
    if pv != -p {
        return Err(Error::Charge("braced pairing needs charges p and -p".to_string()));
    }
    Ok(pair_sym(u, &reflect(v)) * q(alpha(p)))
}

/// `{u|v}_+ = {u|s(v)}` for `u` of charge `p` and `v` of charge `-p-1`.
pub fn pair_braced_plus(u: &FockVector, v: &FockVector) -> Result<Q> {
    if let (Some(p), Some(pv)) = (homogeneous_charge(u)?, homogeneous_charge(v)?) {
        if pv != -p - 1 {
            return Err(Error::Charge("plus pairing needs charges p and -p-1".to_string()));
        }
    }
    pair_braced(u, &shift(v))
}

/// The Maya basis of charge `p`, degree `d` and its dual basis of charge
/// `-p-1` under `{ | }_+`: `v^i = alpha(p) |s^{-1}(r(M_i))>`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualBasis {
    pub basis: Vec<MayaDiagram>,
    pub dual: Vec<(i64, MayaDiagram)>,
}

pub fn dual_basis_plus(p: i64, d: i64) -> DualBasis {
    let basis = enumerate_basis(p, d);
    let dual = basis.iter().map(|m| (alpha(p), m.reflect().unshift())).collect();
    DualBasis { basis, dual }
}

/// Charges `p` with `p(p+1)/2 <= k`.
fn charges_up_to(k: i64) -> impl Iterator<Item = i64> {
    let mut top = 0;
    while (top + 1) * (top + 2) / 2 <= k {
        top += 1;
    }
    -top - 1..=top
}

/// The coefficient of `q^k` of the sewn functional, evaluated lazily:
/// `u |-> sum_{d + p(p+1)/2 = k} (-1)^{p+d} sum_i <Phi| v_i(d,p) (x) v^i(d,-p-1) (x) u>`.
/// Values are memoized per tuple.
pub struct SewnCoefficient {
    phi: Rc<dyn Functional>,
    k: i64,
    memo: RefCell<BTreeMap<Tuple, Q>>,
}

impl SewnCoefficient {
    pub fn new(phi: Rc<dyn Functional>, k: i64) -> Result<Self> {
        if phi.arity() < 2 {
            return Err(Error::Arity { expected: 2, got: phi.arity() });
        }
        Ok(SewnCoefficient { phi, k, memo: RefCell::new(BTreeMap::new()) })
    }

    pub fn order(&self) -> i64 {
        self.k
    }

    /// The `(p, d)` sectors contributing to this coefficient.
    pub fn sectors(&self) -> Vec<(i64, i64)> {
        charges_up_to(self.k).map(|p| (p, self.k - p * (p + 1) / 2)).collect()
    }
}

impl Functional for SewnCoefficient {
    fn arity(&self) -> usize {
        self.phi.arity() - 2
    }

    fn eval(&self, u: &[MayaDiagram]) -> Result<Q> {
        if u.len() != self.arity() {
            return Err(Error::Arity { expected: self.arity(), got: u.len() });
        }
        if let Some(v) = self.memo.borrow().get(u) {
            return Ok(v.clone());
        }
        let mut acc = Q::zero();
        for (p, d) in self.sectors() {
            let db = dual_basis_plus(p, d);
            let mut part = Q::zero();
            for (m, (a, dual)) in db.basis.iter().zip(&db.dual) {
                let mut t = Vec::with_capacity(u.len() + 2);
                t.push(m.clone());
                t.push(dual.clone());
                t.extend_from_slice(u);
                part += self.phi.eval(&t)? * q(*a);
            }
            if (p + d).rem_euclid(2) == 1 {
                part = -part;
            }
            acc += part;
        }
        self.memo.borrow_mut().insert(u.to_vec(), acc.clone());
        Ok(acc)
    }
}

/// The sewn functional `<Phi~(q)|` as a lazily evaluated `q`-series.
pub struct SewnSeries {
    pub coeffs: Vec<SewnCoefficient>,
}

/// Sews a vacuum whose first two slots are `P+`, `P-`; exact below `q^{q_order}`.
pub fn sew(phi: Rc<dyn Functional>, q_order: usize) -> Result<SewnSeries> {
    let coeffs = (0..q_order as i64).map(|k| SewnCoefficient::new(phi.clone(), k)).collect::<Result<_>>()?;
    Ok(SewnSeries { coeffs })
}

impl SewnSeries {
    pub fn q_order(&self) -> usize {
        self.coeffs.len()
    }

    /// Every coefficient on the window `weight <= cutoff` (and total charge `charge`).
    pub fn materialize(&self, cutoff: i64, charge: Option<i64>) -> Result<QSeries<DualFunctional>> {
        let coeffs = self.coeffs.iter().map(|c| DualFunctional::materialize(c, cutoff, charge)).collect::<Result<_>>()?;
        Ok(QSeries { coeffs })
    }

    /// `sum_k <Phi~_k| v q^k` for a vector `v`.
    pub fn pair(&self, v: &crate::fock::TensorVector) -> Result<Vec<Q>> {
        self.coeffs.iter().map(|c| c.pair(v)).collect()
    }
}

/// Largest absolute value per `q`-order of
/// `sum_n sum_j <Phi~_{k-n}| rho_j(X^(n)_j) u>` over the test window, where
/// `lifts[n]` is the `q^n` coefficient of a family of forms or functions and
/// the slots `outer` are the points `Q_j` of `curve`.
pub fn family_gauge_residual(
    series: &SewnSeries,
    curve: &CurveSpec,
    outer: &[PointRef],
    lifts: &[GlobalObject],
    cutoff: i64,
    charge: i64,
) -> Result<Vec<Q>> {
    let kind = lifts.first().map(|x| x.kind).unwrap_or(Kind::Form);
    let dq = if kind == Kind::Form { 1 } else { -1 };
    let ops: Vec<SlotOperators> = lifts.iter().map(|x| SlotOperators::new(x.clone(), curve, outer)).collect();
    let tests = window(outer.len(), cutoff, Some(charge + dq));
    let mut worst = vec![Q::zero(); series.q_order()];
    for u in &tests {
        let images = ops.iter().map(|o| o.act(u)).collect::<Result<Vec<_>>>()?;
        for (k, w) in worst.iter_mut().enumerate() {
            let mut r = Q::zero();
            for (n, img) in images.iter().enumerate().take(k + 1) {
                r += series.coeffs[k - n].pair(img)?;
            }
            let r = r.abs();
            if r > *w {
                *w = r;
            }
        }
    }
    Ok(worst)
}

/// Residuals of the Fuchsian equation per `q`-order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FuchsianReport {
    /// `max |k F_k(u) + sum_j F_k(rho_j(T[l_j]) u) - kappa b F_k(u)|` for each `k`.
    pub residual: Vec<Q>,
    /// `max |F_k(u)|`, to make sure the check is not vacuous.
    pub size: Vec<Q>,
    /// The non-derivative part has no `q^0` term.
    pub divisible_by_q: bool,
}

/// The central constant `kappa` relating `sum_j T[l_j]` on a vacuum to
/// `sum_j Res(l_j {g_j; xi} dxi)`; it is `c/12` for central charge `c = -2`.
pub fn central_constant() -> Q {
    crate::rational::frac(-1, 6)
}

/// `b(l) = sum_j Res(l_j {g_j; xi_j} dxi_j)` over the given points.
pub fn b_term(curve: &CurveSpec, l: &GlobalObject, points: &[PointRef]) -> Result<Q> {
    let mut b = Q::zero();
    for p in points {
        b += crate::curve::central_pairing(curve, l, *p)?;
    }
    Ok(b)
}

/// Checks `q d/dq F + sum_j F(rho_j(T[l_j]) .) - kappa b F = 0` on the window.
pub fn fuchsian_check(
    series: &SewnSeries,
    curve: &CurveSpec,
    outer: &[PointRef],
    l: &GlobalObject,
    b: &Q,
    cutoff: i64,
    charge: i64,
) -> Result<FuchsianReport> {
    let kb = central_constant() * b;
    let order = cutoff + 4;
    let fields = outer
        .iter()
        .map(|p| Ok(TField::new(l.expand_at(curve, *p, order)?)))
        .collect::<Result<Vec<_>>>()?;
    let mut residual = vec![Q::zero(); series.q_order()];
    let mut size = vec![Q::zero(); series.q_order()];
    let mut divisible = true;
    for u in window(outer.len(), cutoff, Some(charge)) {
        let mut tv = crate::fock::TensorVector::zero(u.len());
        for (j, f) in fields.iter().enumerate() {
            tv = tv.add(&apply_rho_basis(j, f, &u)?);
        }
        for (k, c) in series.coeffs.iter().enumerate() {
            let fk = c.eval(&u)?;
            let rest = c.pair(&tv)? - &kb * &fk;
            if k == 0 && !rest.is_zero() {
                divisible = false;
            }
            let r = (q(k as i64) * &fk + rest).abs();
            if r > residual[k] {
                residual[k] = r;
            }
            if fk.abs() > size[k] {
                size[k] = fk.abs();
            }
        }
    }
    Ok(FuchsianReport { residual, size, divisible_by_q: divisible })
}

/// `k F_k` on the window, i.e. `q d/dq` applied coefficientwise.
pub fn q_derivative(series: &SewnSeries, u: &[MayaDiagram]) -> Result<Vec<Q>> {
    series.coeffs.iter().map(|c| Ok(q(c.order()) * c.eval(u)?)).collect()
}

/// The weighted series `sum_{(p,d)} (d + p(p+1)/2) (-1)^{p+d} sum_i <Phi|...> q^k`,
/// assembled sector by sector; it must agree with [`q_derivative`].
pub fn weighted_series(series: &SewnSeries, u: &[MayaDiagram]) -> Result<Vec<Q>> {
    let mut out = Vec::new();
    for c in &series.coeffs {
        let mut acc = Q::zero();
        for (p, d) in c.sectors() {
            let single = SectorTerm { phi: c.phi.clone(), p, d };
            acc += q(d + p * (p + 1) / 2) * single.eval(u)?;
        }
        out.push(acc);
    }
    Ok(out)
}

struct SectorTerm {
    phi: Rc<dyn Functional>,
    p: i64,
    d: i64,
}

impl SectorTerm {
    fn eval(&self, u: &[MayaDiagram]) -> Result<Q> {
        let db = dual_basis_plus(self.p, self.d);
        let mut acc = Q::zero();
        for (m, (a, dual)) in db.basis.iter().zip(&db.dual) {
            let mut t: Tuple = vec![m.clone(), dual.clone()];
            t.extend_from_slice(u);
            acc += self.phi.eval(&t)? * q(*a);
        }
        Ok(if (self.p + self.d).rem_euclid(2) == 1 { -acc } else { acc })
    }
}

/// A vacuum on the normalization with slots `(P+, P-, outer...)`, ready to sew.
pub struct SewingSetup {
    /// Normalization with the adjusted coordinates at `P+`, `P-`; its outer
    /// points are `(P+, P-, outer...)`.
    pub curve: CurveSpec,
    pub plus: PointRef,
    pub minus: PointRef,
    pub outer: Vec<PointRef>,
    /// The sewing vector field.
    pub field: GlobalObject,
    pub phi: Rc<dyn Functional>,
}

/// Installs the sewing coordinates on a one-node curve and propagates `base`
/// (a vacuum on the normalization with slots `outer`) to `P-` and then `P+`.
pub fn setup(curve: &CurveSpec, base: Rc<dyn Functional>, order: i64) -> Result<SewingSetup> {
    curve.validate()?;
    if curve.glue.len() != 1 {
        return Err(Error::Curve("sewing needs exactly one node".to_string()));
    }
    let (plus, minus) = curve.glue[0];
    let norm = curve.normalization();
    let (field, adjusted) = crate::curve::sewing_vector_field(&norm, plus, minus, &curve.outer, order)?;
    let step = Rc::new(crate::vacua::propagate(base, &adjusted, minus, 0)?);
    let full = crate::vacua::propagate(step.clone(), step.curve(), plus, 0)?;
    let c = full.curve().clone();
    Ok(SewingSetup { curve: c, plus, minus, outer: curve.outer.clone(), field, phi: Rc::new(full) })
}
