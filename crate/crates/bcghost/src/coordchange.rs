//! Formal coordinate changes `h(xi) = a xi + ...`, their lift
//! `G[h] = G[a xi] exp(-T[l])` to the Fock space, and preferred vacua built
//! from normalized expansion data as semi-infinite wedges.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::rc::Rc;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::curve::{CurveSpec, PointRef};
use crate::fock::{
    window, DualFunctional, Fermion, FockVector, Functional, ModeOperator, Operator, TField, Tuple,
};
use crate::laurent::LaurentSeries;
use crate::maya::{HalfInt, MayaDiagram};
use crate::rational::{frac, pow, Q};
use crate::vacua::{propagate, NodeRestriction};
use crate::{Error, Result};

/// An element `h(xi) = a xi + a_1 xi^2 + ...` of the group of formal
/// coordinate changes, factored as `h = h_1 o (a xi)` with `h_1` unipotent,
/// so that `G[h] = G[a xi] G[h_1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoordChange {
    series: LaurentSeries,
    scale: Q,
    unipotent: LaurentSeries,
}

impl CoordChange {
    pub fn new(h: LaurentSeries) -> Result<Self> {
        if h.ord() != 1 || h.trunc() <= 1 {
            return Err(Error::Invalid("a coordinate change is a xi + ... with a != 0".to_string()));
        }
        let scale = h.coeff(1)?;
        let inv = scale.recip();
        let unipotent = LaurentSeries::new(h.terms().map(|(k, c)| (k, c * pow(&inv, k))), h.trunc());
        Ok(CoordChange { series: h, scale, unipotent })
    }

    pub fn identity() -> Self {
        CoordChange::new(LaurentSeries::x()).expect("x is invertible")
    }

    pub fn scaling(a: Q) -> Result<Self> {
        CoordChange::new(LaurentSeries::x().scale(&a))
    }

    pub fn series(&self) -> &LaurentSeries {
        &self.series
    }

    /// The leading coefficient `a`.
    pub fn scale(&self) -> &Q {
        &self.scale
    }

    /// `h_1(xi) = h(xi / a)`.
    pub fn unipotent(&self) -> &LaurentSeries {
        &self.unipotent
    }

    /// `l_1` with `exp(l_1 d/dxi) xi = h_1`, known below `order`.
    pub fn field(&self, order: i64) -> Result<LaurentSeries> {
        self.unipotent.log_coordinate(order)
    }

    /// `self o other`, i.e. `h(g(xi))`, below `order`.
    pub fn compose(&self, other: &CoordChange, order: i64) -> Result<CoordChange> {
        CoordChange::new(self.series.compose(&other.series, order)?)
    }

    pub fn inverse(&self, order: i64) -> Result<CoordChange> {
        CoordChange::new(self.series.comp_inverse(order)?)
    }

    /// `h^*(f dxi) = f(h) h' dxi`.
    pub fn pullback_form(&self, f: &LaurentSeries, order: i64) -> Result<LaurentSeries> {
        Ok(f.compose(&self.series, order)?.mul(&self.series.derivative()).truncate(order))
    }

    /// `h^* g = g(h)`.
    pub fn pullback_function(&self, g: &LaurentSeries, order: i64) -> Result<LaurentSeries> {
        g.compose(&self.series, order)
    }

    /// `ad(h)(l d/dxi) = l(h)/h' d/dxi`.
    pub fn pullback_field(&self, l: &LaurentSeries, order: i64) -> Result<LaurentSeries> {
        let inv = self.series.derivative().inverse(order)?;
        Ok(l.compose(&self.series, order)?.mul(&inv).truncate(order))
    }

    /// `G[h] v`.
    pub fn g_apply(&self, v: &FockVector) -> Result<FockVector> {
        let w = exp_t(&self.unipotent, v, -1)?;
        Ok(scale_by_weight(&w, &self.scale, -1))
    }

    /// `G[h]^{-1} v`.
    pub fn g_inverse_apply(&self, v: &FockVector) -> Result<FockVector> {
        let w = scale_by_weight(v, &self.scale, 1);
        exp_t(&self.unipotent, &w, 1)
    }

    /// The right action `<f| G[h]` on one slot, on the window of weight `<= cutoff`.
    pub fn g_dual(&self, f: &dyn Functional, cutoff: i64, charge: Option<i64>) -> Result<DualFunctional> {
        if f.arity() != 1 {
            return Err(Error::Arity { expected: 1, got: f.arity() });
        }
        let mut values = Vec::new();
        for t in window(1, cutoff, charge) {
            let image = self.g_apply(&FockVector::basis(t[0].clone()))?;
            let mut acc = Q::zero();
            for (m, c) in image.terms() {
                acc += c * f.eval(core::slice::from_ref(m))?;
            }
            if !acc.is_zero() {
                values.push((t, acc));
            }
        }
        Ok(DualFunctional::new(1, cutoff, values))
    }
}

/// `exp(l d/dxi)` as a coordinate change, for `l` vanishing to second order.
/// A linear part would need `exp(a)`, which is not rational.
pub fn exp_field(l: &LaurentSeries, order: i64) -> Result<CoordChange> {
    if !l.is_zero() && l.ord() < 2 {
        return Err(Error::Invalid("only fields in xi^2 C[[xi]] d/dxi exponentiate over Q".to_string()));
    }
    CoordChange::new(LaurentSeries::x().exp_derivation(l, order)?)
}

/// `(a, l_1)` with `h = (a xi) o exp(l_1 d/dxi)`.
pub fn log_change(h: &CoordChange, order: i64) -> Result<(Q, LaurentSeries)> {
    Ok((h.scale.clone(), h.field(order)?))
}

/// `exp(sign T[l_1]) v` with `l_1 = log(h_1)`; it terminates since `T[l_1]` lowers weight.
fn exp_t(h1: &LaurentSeries, v: &FockVector, sign: i64) -> Result<FockVector> {
    let Some(w) = v.max_weight() else {
        return Ok(v.clone());
    };
    let l = h1.log_coordinate(w + 3)?;
    let t = TField::new(l.scale(&Q::from_integer(sign.into())));
    let mut acc = v.clone();
    let mut term = v.clone();
    let mut k = 1;
    while !term.is_zero() {
        term = term.apply(&t)?.scale(&frac(1, k));
        acc = acc.add(&term);
        k += 1;
    }
    Ok(acc)
}

/// Multiplies the weight `w` part by `a^{sign w}`.
fn scale_by_weight(v: &FockVector, a: &Q, sign: i64) -> FockVector {
    FockVector::from_terms(v.terms().map(|(m, c)| (m.clone(), c * pow(a, sign * m.weight()))))
}

/// Largest residuals of the conjugation identities on the window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CovarianceReport {
    /// `G psi[f dxi] G^{-1} - psi[h^*(f dxi)]`.
    pub psi: Q,
    /// `G psibar[g] G^{-1} - psibar[h^* g]`.
    pub psibar: Q,
    /// `G T[l] G^{-1} - T[ad(h) l] - c`.
    pub tfield: Q,
    /// The central summand `c = (1/6) Res({h; xi} l dxi)`.
    pub central: Q,
    /// `G T[l] G^{-1} - T[ad(h) l] - c_ad`.
    pub tfield_adjoint: Q,
    /// `c_ad = (1/6) Res({h; xi} ad(h)(l) dxi) = -(1/6) Res({h^{-1}; xi} l dxi)`.
    /// Equal to `c` when `h` is unipotent and `l` has at most a simple pole.
    pub central_adjoint: Q,
}

fn max_abs(v: &FockVector) -> Q {
    v.terms().map(|(_, c)| c.abs()).fold(Q::zero(), |a, b| if b > a { b } else { a })
}

/// Checks the conjugation identities for `psi[f dxi]`, `psibar[g]` and `T[l]`
/// on every basis vector of weight `<= max_weight`.
pub fn covariance_check(
    h: &CoordChange,
    f: &LaurentSeries,
    g: &LaurentSeries,
    l: &LaurentSeries,
    max_weight: i64,
) -> Result<CovarianceReport> {
    let order = max_weight + 8;
    let psi = ModeOperator::smear(Fermion::Psi, &f.truncate(order));
    let psi_h = ModeOperator::smear(Fermion::Psi, &h.pullback_form(f, order)?);
    let psibar = ModeOperator::smear(Fermion::PsiBar, &g.truncate(order));
    let psibar_h = ModeOperator::smear(Fermion::PsiBar, &h.pullback_function(g, order)?);
    let t = TField::new(l.truncate(order));
    let l_h = h.pullback_field(l, order)?;
    let t_h = TField::new(l_h.clone());
    let schwarzian = h.series.schwarzian(order)?;
    let central = frac(1, 6) * schwarzian.mul(l).residue()?;
    let central_adjoint = frac(1, 6) * schwarzian.mul(&l_h).residue()?;
    let conj = |op: &dyn Operator, v: &FockVector| -> Result<FockVector> { h.g_apply(&h.g_inverse_apply(v)?.apply(op)?) };
    let mut report = CovarianceReport {
        psi: Q::zero(),
        psibar: Q::zero(),
        tfield: Q::zero(),
        central: central.clone(),
        tfield_adjoint: Q::zero(),
        central_adjoint: central_adjoint.clone(),
    };
    for t0 in window(1, max_weight, None) {
        let v = FockVector::basis(t0[0].clone());
        let r = conj(&psi, &v)?.sub(&v.apply(&psi_h)?);
        report.psi = report.psi.clone().max(max_abs(&r));
        let r = conj(&psibar, &v)?.sub(&v.apply(&psibar_h)?);
        report.psibar = report.psibar.clone().max(max_abs(&r));
        let r = conj(&t, &v)?.sub(&v.apply(&t_h)?);
        report.tfield = report.tfield.clone().max(max_abs(&r.sub(&v.scale(&central))));
        report.tfield_adjoint = report.tfield_adjoint.clone().max(max_abs(&r.sub(&v.scale(&central_adjoint))));
    }
    Ok(report)
}

/// Expansion data of a normalized basis at one point: holomorphic forms
/// `omega_i = sum_n I[n,i] xi^{n-1} dxi` (`1 <= i <= genus`) and
/// `omega^(n) = (xi^{-n-1} + sum_m Q[n,m] xi^{m-1}) dxi`, known for indices `<= trunc`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NormalizedExpansionData {
    pub genus: usize,
    pub i: BTreeMap<(i64, usize), Q>,
    pub q: BTreeMap<(i64, i64), Q>,
    pub trunc: i64,
}

impl NormalizedExpansionData {
    pub fn validate(&self) -> Result<()> {
        for &(n, i) in self.i.keys() {
            if n < 1 || i < 1 || i > self.genus {
                return Err(Error::Invalid(format!("I index ({n},{i}) out of range")));
            }
        }
        for &(n, m) in self.q.keys() {
            if n < 1 || m < 1 {
                return Err(Error::Invalid(format!("Q index ({n},{m}) out of range")));
            }
        }
        Ok(())
    }

    /// Data of the line at a point with local coordinate `x = c(xi)`, from
    /// the forms `dx / x^{k+1}` reduced to the normalized shape.
    pub fn genus_zero(c: &LaurentSeries, trunc: i64) -> Result<Self> {
        let dc = c.derivative();
        let mut forms: Vec<LaurentSeries> = Vec::new();
        let mut q = BTreeMap::new();
        for n in 1..=trunc {
            let mut w = c.pow(-(n + 1), trunc)?.mul(&dc).truncate(trunc);
            let lead = w.coeff(-n - 1)?;
            w = w.scale(&lead.recip());
            for k in (1..n).rev() {
                let c_k = w.coeff(-k - 1)?;
                if !c_k.is_zero() {
                    w = w.sub(&forms[(k - 1) as usize].scale(&c_k));
                }
            }
            if !w.coeff(-1)?.is_zero() {
                return Err(Error::Invalid("form with a residue".to_string()));
            }
            for m in 1..=trunc {
                let v = w.coeff(m - 1)?;
                if !v.is_zero() {
                    q.insert((n, m), v);
                }
            }
            forms.push(w);
        }
        Ok(NormalizedExpansionData { genus: 0, i: BTreeMap::new(), q, trunc })
    }

    /// Coefficient of `xi^n dxi` in the frame element `j` (from 1).
    pub fn entry(&self, j: usize, n: i64) -> Result<Q> {
        let g = self.genus;
        if n >= 0 && n + 1 > self.trunc {
            return Err(Error::Truncation { have: self.trunc, need: n + 1 });
        }
        if j <= g {
            return Ok(if n >= 0 { self.i.get(&(n + 1, j)).cloned().unwrap_or_else(Q::zero) } else { Q::zero() });
        }
        let k = (j - g) as i64;
        Ok(if n == -k - 1 {
            Q::one()
        } else if n >= 0 {
            self.q.get(&(k, n + 1)).cloned().unwrap_or_else(Q::zero)
        } else {
            Q::zero()
        })
    }
}

/// A preferred vacuum of charge `genus - 1` at one point.
#[derive(Clone, Debug, PartialEq)]
pub struct PreferredElement {
    pub functional: DualFunctional,
    pub genus: usize,
}

/// Depth `K`: every slot below `-K - 1/2` is occupied.
fn depth(m: &MayaDiagram) -> i64 {
    (-m.bottom_hole().down() - 1).max(0)
}

/// `<omega|M>` as the minor on the occupied slots `>= -K - 1/2` (descending)
/// against the frame `f_1, ..., f_{g+K}`.
pub fn wedge_coefficient(data: &NormalizedExpansionData, m: &MayaDiagram) -> Result<Q> {
    let g = data.genus as i64;
    if m.charge() != g - 1 {
        return Ok(Q::zero());
    }
    let k = depth(m);
    let floor = HalfInt::minus_half(-k);
    let mut rows: Vec<HalfInt> = Vec::new();
    let mut s = m.top();
    while s >= floor {
        if m.is_occupied(s) {
            rows.push(s);
        }
        s = s.add_int(-1);
    }
    if rows.len() as i64 != g + k {
        return Err(Error::Invalid("frame and slot counts differ".to_string()));
    }
    let mut mat = Vec::with_capacity(rows.len());
    for s in &rows {
        let row = (1..=(g + k) as usize).map(|j| data.entry(j, s.down())).collect::<Result<Vec<_>>>()?;
        mat.push(row);
    }
    Ok(crate::linalg::det(mat))
}

/// The preferred element `... e(omega_{g+2}) ^ e(omega_{g+1}) ^ e(omega_g) ^ ... ^ e(omega_1)`
/// on the window of weight `<= cutoff`.
pub fn preferred_element(data: &NormalizedExpansionData, cutoff: i64) -> Result<PreferredElement> {
    data.validate()?;
    let g = data.genus as i64;
    let mut values = Vec::new();
    for t in window(1, cutoff, Some(g - 1)) {
        let c = wedge_coefficient(data, &t[0])?;
        if !c.is_zero() {
            values.push((t, c));
        }
    }
    Ok(PreferredElement { functional: DualFunctional::new(1, cutoff, values), genus: data.genus })
}

/// The preferred element of two lines glued at one node, each carrying one
/// outer point: `iota_{+,-}^*(<Phi_1| (x) <Phi_2|)`, where `Phi_i` is the
/// one-point element `parts[i]` propagated to the branch of the node.
pub struct NodalPreferred {
    inner: NodeRestriction,
}

impl Functional for NodalPreferred {
    fn arity(&self) -> usize {
        self.inner.arity()
    }
    fn eval(&self, t: &[MayaDiagram]) -> Result<Q> {
        self.inner.eval(t)
    }
}

/// `<Phi_1| (x) <Phi_2|` on slots `(P+, P-, Q_1, Q_2)`, reordered from the
/// component order `(Q_1, P+, Q_2, P-)` with the Koszul sign.
struct GluedProduct {
    first: Rc<dyn Functional>,
    second: Rc<dyn Functional>,
}

impl Functional for GluedProduct {
    fn arity(&self) -> usize {
        4
    }
    fn eval(&self, t: &[MayaDiagram]) -> Result<Q> {
        if t.len() != 4 {
            return Err(Error::Arity { expected: 4, got: t.len() });
        }
        let odd = |m: &MayaDiagram| m.charge().rem_euclid(2) == 1;
        // (P+, P-, Q1, Q2) -> (Q1, P+, Q2, P-): P- passes Q1; Q1 passes P+
        let mut flips = 0;
        if odd(&t[1]) && odd(&t[2]) {
            flips += 1;
        }
        if odd(&t[0]) && odd(&t[2]) {
            flips += 1;
        }
        let a = self.first.eval(&[t[2].clone(), t[0].clone()])?;
        if a.is_zero() {
            return Ok(a);
        }
        let b = self.second.eval(&[t[3].clone(), t[1].clone()])?;
        let v = a * b;
        Ok(if flips % 2 == 1 { -v } else { v })
    }
}

/// Builds the nodal preferred element for `curve`: two components, one node
/// `glue[0] = (P+, P-)`, outer points `[Q_1, Q_2]` with `Q_1` on the component of `P+`.
pub fn preferred_nodal(curve: &CurveSpec, parts: &[PreferredElement]) -> Result<NodalPreferred> {
    curve.validate()?;
    if parts.len() != 2 {
        return Err(Error::Invalid(format!("expected two component elements, got {}", parts.len())));
    }
    if curve.components.len() != 2 || curve.glue.len() != 1 || curve.outer.len() != 2 {
        return Err(Error::Curve("expected two lines glued once with one outer point each".to_string()));
    }
    let (plus, minus) = curve.glue[0];
    let (q1, q2) = (curve.outer[0], curve.outer[1]);
    if q1.component != plus.component || q2.component != minus.component || plus.component == minus.component {
        return Err(Error::Curve("node wiring does not match the outer points".to_string()));
    }
    let side = |q: PointRef, p: PointRef, part: &PreferredElement| -> Result<Rc<dyn Functional>> {
        let comp = curve.components[q.component].clone();
        let local = |r: PointRef| PointRef::new(0, r.point);
        let c = CurveSpec { components: vec![comp], glue: vec![], outer: vec![local(q)] };
        Ok(Rc::new(propagate(Rc::new(part.functional.clone()), &c, local(p), 1)?))
    };
    let first = side(q1, plus, &parts[0])?;
    let second = side(q2, minus, &parts[1])?;
    let glued: Rc<dyn Functional> = Rc::new(GluedProduct { first, second });
    Ok(NodalPreferred { inner: NodeRestriction { inner: glued } })
}

/// `<Phi|0 (x) 0 (x) u>` for `Phi` with slots `(P+, P-, u...)`.
pub struct VacuumRestriction {
    pub inner: Rc<dyn Functional>,
}

impl Functional for VacuumRestriction {
    fn arity(&self) -> usize {
        self.inner.arity() - 2
    }
    fn eval(&self, u: &[MayaDiagram]) -> Result<Q> {
        let mut t: Tuple = vec![MayaDiagram::vacuum(), MayaDiagram::vacuum()];
        t.extend_from_slice(u);
        self.inner.eval(&t)
    }
}
