//! Ghost vacua: the gauge conditions as an exact linear system, its solution,
//! propagation of vacua to new points and the isomorphism across a node.

use alloc::collections::BTreeMap;
use alloc::rc::Rc;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;
use core::cell::RefCell;

use num_traits::{One, Signed, Zero};

use crate::curve::{self, Condition, CurveSpec, GlobalObject, Kind, PointRef};
use crate::fock::{
    apply_rho_basis, window, DualFunctional, Fermion, Functional, ModeOperator, TensorVector, Tuple,
};
use crate::linalg::{Echelon, SparseRow};
use crate::maya::MayaDiagram;
use crate::rational::Q;
use crate::{Error, Result};

/// Fermion kind smeared against objects of the given kind.
pub fn fermion_for(kind: Kind) -> Result<Fermion> {
    match kind {
        Kind::Form => Ok(Fermion::Psi),
        Kind::Function => Ok(Fermion::PsiBar),
        Kind::VectorField => Err(Error::Invalid("vector fields do not smear fermions".to_string())),
    }
}

/// A global object together with its smeared operators at a list of slots,
/// expanded lazily to whatever order the tuples at hand need.
#[derive(Debug)]
pub struct SlotOperators {
    obj: GlobalObject,
    curve: CurveSpec,
    slots: Vec<PointRef>,
    cache: RefCell<(i64, Vec<ModeOperator>)>,
}

impl SlotOperators {
    pub fn new(obj: GlobalObject, curve: &CurveSpec, slots: &[PointRef]) -> Self {
        SlotOperators { obj, curve: curve.clone(), slots: slots.to_vec(), cache: RefCell::new((i64::MIN, Vec::new())) }
    }

    pub fn object(&self) -> &GlobalObject {
        &self.obj
    }

    /// Operators exact enough to act on every entry of `t`.
    pub fn operators(&self, t: &[MayaDiagram]) -> Result<Vec<ModeOperator>> {
        let kind = fermion_for(self.obj.kind)?;
        let need = t
            .iter()
            .map(|m| ModeOperator::required_bound(kind, m).up())
            .max()
            .unwrap_or(1);
        {
            let c = self.cache.borrow();
            if c.0 >= need {
                return Ok(c.1.clone());
            }
        }
        let order = need.max(4) + 4;
        let ops = self
            .slots
            .iter()
            .map(|p| Ok(ModeOperator::smear(kind, &self.obj.expand_at(&self.curve, *p, order)?)))
            .collect::<Result<Vec<_>>>()?;
        *self.cache.borrow_mut() = (order, ops.clone());
        Ok(ops)
    }

    /// `sum_j rho_j(op_j) t`.
    pub fn act(&self, t: &[MayaDiagram]) -> Result<TensorVector> {
        let ops = self.operators(t)?;
        let mut v = TensorVector::zero(t.len());
        for (j, op) in ops.iter().enumerate() {
            if op.coeffs.is_empty() {
                continue;
            }
            v = v.add(&apply_rho_basis(j, op, t)?);
        }
        Ok(v)
    }
}

/// Weight by which smearing with this object can raise a tuple: pole order
/// minus one for forms, pole order for functions, maximized over slots.
pub fn weight_shift(obj: &GlobalObject, curve: &CurveSpec, slots: &[PointRef]) -> Result<i64> {
    let mut s = 0;
    for p in slots {
        let k = obj.pole_order(curve, *p)?;
        s = s.max(match obj.kind {
            Kind::Form => k - 1,
            _ => k,
        });
    }
    Ok(s)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GhostVacuum {
    pub functional: DualFunctional,
    pub curve: CurveSpec,
    pub cutoff: i64,
    pub charge_total: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RowLabel {
    pub kind: Kind,
    pub basis_index: usize,
    pub test: Tuple,
}

#[derive(Clone, Debug)]
pub struct ConstraintSystem {
    pub columns: Vec<Tuple>,
    pub rows: Vec<SparseRow>,
    pub labels: Vec<RowLabel>,
    pub curve: CurveSpec,
    pub cutoff: i64,
    pub charge: Option<i64>,
    pub pole_bound: u32,
}

/// Builds the gauge conditions on the window of total weight `<= cutoff`, from
/// forms and functions with poles of order `<= pole_bound` at every outer point.
/// Only complete rows are kept: test tuples whose images stay inside the window.
pub fn assemble(curve: &CurveSpec, cutoff: i64, charge: Option<i64>, pole_bound: u32) -> Result<ConstraintSystem> {
    curve.validate()?;
    let n = curve.arity();
    let columns = window(n, cutoff, charge);
    let index: BTreeMap<&Tuple, usize> = columns.iter().enumerate().map(|(i, t)| (t, i)).collect();
    let bounds = vec![pole_bound; n];
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for kind in [Kind::Form, Kind::Function] {
        let basis = curve::basis(curve, kind, &bounds)?;
        let dq = if kind == Kind::Form { 1 } else { -1 };
        for (bi, obj) in basis.into_iter().enumerate() {
            let shift = weight_shift(&obj, curve, &curve.outer)?.max(0);
            let ops = SlotOperators::new(obj, curve, &curve.outer);
            for t in window(n, cutoff - shift, charge.map(|c| c + dq)) {
                let v = ops.act(&t)?;
                let mut row = SparseRow::new();
                let mut complete = true;
                for (s, c) in v.terms() {
                    match index.get(s) {
                        Some(i) => {
                            row.insert(*i, c.clone());
                        }
                        None => complete = false,
                    }
                }
                if complete && !row.is_empty() {
                    rows.push(row);
                    labels.push(RowLabel { kind, basis_index: bi, test: t });
                }
            }
        }
    }
    Ok(ConstraintSystem { columns, rows, labels, curve: curve.clone(), cutoff, charge, pole_bound })
}

impl ConstraintSystem {
    pub fn kernel(&self) -> Vec<Vec<Q>> {
        let mut e = Echelon::new(self.columns.len());
        for r in &self.rows {
            e.push(r.clone());
        }
        e.kernel()
    }
}

fn normalize(v: &mut [Q]) {
    if let Some(c) = v.iter().find(|c| !c.is_zero()).cloned() {
        for x in v.iter_mut() {
            *x /= &c;
        }
    }
}

/// Kernel of the system as normalized vacua: the first nonzero value in canonical tuple order is 1.
pub fn solve(s: &ConstraintSystem) -> Vec<GhostVacuum> {
    let charge_total = s.charge.unwrap_or_else(|| s.curve.charge_total());
    s.kernel()
        .into_iter()
        .map(|mut v| {
            normalize(&mut v);
            GhostVacuum {
                functional: DualFunctional::new(s.curve.arity(), s.cutoff, s.columns.iter().cloned().zip(v)),
                curve: s.curve.clone(),
                cutoff: s.cutoff,
                charge_total,
            }
        })
        .collect()
}

/// Report of a solve with pole-bound escalation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveReport {
    /// `(pole bound, kernel dimension)` for each attempt.
    pub dims: Vec<(u32, usize)>,
}

/// Solves for the vacuum on the window `<= cutoff` in the sector of total
/// charge `#nodes - #pieces`. Starts from pole bound `cutoff + 2` and raises it
/// by 2 until two consecutive kernel dimensions agree.
pub fn vacuum(curve: &CurveSpec, cutoff: i64) -> Result<(GhostVacuum, SolveReport)> {
    let charge = curve.charge_total();
    let mut dims = Vec::new();
    let mut bound = (cutoff + 2).max(1) as u32;
    let mut last: Option<Vec<GhostVacuum>> = None;
    loop {
        let sols = solve(&assemble(curve, cutoff, Some(charge), bound)?);
        dims.push((bound, sols.len()));
        if let Some(prev) = &last {
            if prev.len() == sols.len() {
                break;
            }
        }
        if dims.len() > 6 {
            return Err(Error::KernelDimension(sols.len()));
        }
        last = Some(sols);
        bound += 2;
    }
    let sols = last.unwrap_or_default();
    if sols.len() != 1 {
        return Err(Error::KernelDimension(sols.len()));
    }
    Ok((sols.into_iter().next().unwrap(), SolveReport { dims }))
}

/// Largest `|<phi| sum_j rho_j(X_j) t>|` over complete test tuples `t`.
pub fn gauge_residual(phi: &dyn Functional, curve: &CurveSpec, x: &GlobalObject, cutoff: i64, charge_total: Option<i64>) -> Result<Q> {
    let shift = weight_shift(x, curve, &curve.outer)?.max(0);
    let dq = if x.kind == Kind::Form { 1 } else { -1 };
    let ops = SlotOperators::new(x.clone(), curve, &curve.outer);
    let mut worst = Q::zero();
    for t in window(curve.arity(), cutoff - shift, charge_total.map(|c| c + dq)) {
        let v = ops.act(&t)?;
        let r = phi.pair(&v)?.abs();
        if r > worst {
            worst = r;
        }
    }
    Ok(worst)
}

/// `<M_1| (x) ... (x) <M_N|` without cutoff.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Covector(pub Tuple);

impl Functional for Covector {
    fn arity(&self) -> usize {
        self.0.len()
    }
    fn eval(&self, t: &[MayaDiagram]) -> Result<Q> {
        if t.len() != self.0.len() {
            return Err(Error::Arity { expected: self.0.len(), got: t.len() });
        }
        Ok(if t == self.0.as_slice() { Q::one() } else { Q::zero() })
    }
}

/// A vacuum propagated to one new point, evaluated lazily and memoized.
///
/// With `M` in the new slot, write `M = +-psibar_{-x} W` for a particle `x > 0`
/// (or `M = +-psi_y W` for a hole `y < 0` when there are no particles) and use
/// the gauge condition for a function (form) with that principal part at the
/// new point; every other term has strictly less weight in the new slot or,
/// for `y = -1/2`, smaller absolute charge.
pub struct Propagated {
    base: Rc<dyn Functional>,
    curve: CurveSpec,
    pos: usize,
    partner: Option<PointRef>,
    forms: RefCell<BTreeMap<i64, Rc<SlotOperators>>>,
    functions: RefCell<BTreeMap<i64, Rc<SlotOperators>>>,
    memo: RefCell<BTreeMap<Tuple, Q>>,
}

impl core::fmt::Debug for Propagated {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("Propagated").field("curve", &self.curve).field("pos", &self.pos).finish()
    }
}

/// Adds the point `new_point` of `curve` as slot `pos` of `base`, whose slots are
/// `curve.outer`. The curve must have no nodes.
pub fn propagate(base: Rc<dyn Functional>, curve: &CurveSpec, new_point: PointRef, pos: usize) -> Result<Propagated> {
    if !curve.glue.is_empty() {
        return Err(Error::Curve("propagation works on the normalization".to_string()));
    }
    if base.arity() != curve.outer.len() {
        return Err(Error::Arity { expected: curve.outer.len(), got: base.arity() });
    }
    curve.point(new_point)?;
    if curve.outer.contains(&new_point) || pos > curve.outer.len() {
        return Err(Error::Curve("new point must be unmarked".to_string()));
    }
    let mut c = curve.clone();
    c.outer.insert(pos, new_point);
    c.validate()?;
    let partner = c.outer.iter().copied().find(|p| *p != new_point && p.component == new_point.component);
    Ok(Propagated {
        base,
        curve: c,
        pos,
        partner,
        forms: RefCell::new(BTreeMap::new()),
        functions: RefCell::new(BTreeMap::new()),
        memo: RefCell::new(BTreeMap::new()),
    })
}

impl Propagated {
    /// The extended curve; its outer points are the slots.
    pub fn curve(&self) -> &CurveSpec {
        &self.curve
    }

    pub fn memo_len(&self) -> usize {
        self.memo.borrow().len()
    }

    fn auxiliary(&self, kind: Kind, k: i64) -> Result<Rc<SlotOperators>> {
        let cache = if kind == Kind::Form { &self.forms } else { &self.functions };
        if let Some(x) = cache.borrow().get(&k) {
            return Ok(x.clone());
        }
        let at = self.curve.outer[self.pos];
        let mut bounds: BTreeMap<PointRef, u32> = [(at, k as u32)].into_iter().collect();
        let top = if kind == Kind::Form {
            if let Some(p) = self.partner {
                bounds.insert(p, 1);
            } else if k == 1 {
                return Err(Error::Curve("no marked point to balance the residue".to_string()));
            }
            -1
        } else {
            0
        };
        let conds: Vec<Condition> = (-k..=top)
            .map(|e| Condition { at, exponent: e, value: if e == -k { Q::one() } else { Q::zero() } })
            .collect();
        let obj = curve::interpolate(&self.curve.normalization(), kind, &bounds, &conds, false)?
            .ok_or(Error::Infeasible(k as usize))?;
        let ops = Rc::new(SlotOperators::new(obj, &self.curve, &self.curve.outer));
        cache.borrow_mut().insert(k, ops.clone());
        Ok(ops)
    }

    fn compute(&self, t: &[MayaDiagram]) -> Result<Q> {
        let m = &t[self.pos];
        if *m == MayaDiagram::vacuum() {
            let mut rest = t.to_vec();
            rest.remove(self.pos);
            return self.base.eval(&rest);
        }
        let (kind, k, w) = if let Some(x) = m.particles().last() {
            (Kind::Function, x.up(), m.remove(x))
        } else {
            let y = m.holes().next().ok_or_else(|| Error::Maya("diagram without excitations".to_string()))?;
            (Kind::Form, -y.down(), m.insert(y))
        };
        let aux = self.auxiliary(kind, k)?;
        let mut tp = t.to_vec();
        tp[self.pos] = w;
        let v = aux.act(&tp)?;
        let mut lead = Q::zero();
        let mut rest = Q::zero();
        for (s, c) in v.terms() {
            if s.as_slice() == t {
                lead = c.clone();
            } else {
                rest += c * self.eval(s)?;
            }
        }
        if lead.is_zero() {
            return Err(Error::Invalid("propagation step lost its leading term".to_string()));
        }
        Ok(-rest / lead)
    }
}

impl Functional for Propagated {
    fn arity(&self) -> usize {
        self.curve.outer.len()
    }
    fn eval(&self, t: &[MayaDiagram]) -> Result<Q> {
        if t.len() != self.arity() {
            return Err(Error::Arity { expected: self.arity(), got: t.len() });
        }
        if let Some(v) = self.memo.borrow().get(t) {
            return Ok(v.clone());
        }
        let v = self.compute(t)?;
        self.memo.borrow_mut().insert(t.to_vec(), v.clone());
        Ok(v)
    }
}

/// `u |-> sum_j <phi| rho_j(X_j) u>` for a fixed global object `X`.
pub struct Smeared {
    base: Rc<dyn Functional>,
    ops: SlotOperators,
}

impl Smeared {
    pub fn new(base: Rc<dyn Functional>, obj: GlobalObject, curve: &CurveSpec, slots: &[PointRef]) -> Self {
        Smeared { base, ops: SlotOperators::new(obj, curve, slots) }
    }
}

impl Functional for Smeared {
    fn arity(&self) -> usize {
        self.base.arity()
    }
    fn eval(&self, t: &[MayaDiagram]) -> Result<Q> {
        self.base.pair(&self.ops.act(t)?)
    }
}

/// `|0_{+,-}> = |0> (x) |-1> - |-1> (x) |0>` in the two node slots.
pub fn node_vector() -> TensorVector {
    let z = MayaDiagram::vacuum();
    let m = MayaDiagram::charged_vacuum(-1);
    let mut v = TensorVector::zero(2);
    v.add_term(vec![z.clone(), m.clone()], Q::one());
    v.add_term(vec![m, z], -Q::one());
    v
}

/// `u |-> <Phi| 0_{+,-} (x) u>` for `Phi` with the node slots first.
pub struct NodeRestriction {
    pub inner: Rc<dyn Functional>,
}

impl Functional for NodeRestriction {
    fn arity(&self) -> usize {
        self.inner.arity() - 2
    }
    fn eval(&self, u: &[MayaDiagram]) -> Result<Q> {
        let mut acc = Q::zero();
        for (pm, c) in node_vector().terms() {
            let mut t = pm.clone();
            t.extend_from_slice(u);
            acc += c * self.inner.eval(&t)?;
        }
        Ok(acc)
    }
}

/// The vacuum on the normalization attached to a vacuum on a curve with one node.
pub struct NodeExtension {
    /// Slots `(P+, P-, outer...)`.
    pub functional: Rc<Propagated>,
    /// The function with value -1 at `P+` and 0 at `P-` used for the base case.
    pub f: GlobalObject,
}

/// Extends a vacuum on a curve with one node (`glue[0] = (P+, P-)`) to the
/// normalization: first `u |-> sum_j <phi| rho_j(psibar[f_j]) u>`, then
/// propagation to `P-` and to `P+`, both inserted in front.
pub fn node_extend(phi: Rc<dyn Functional>, curve: &CurveSpec) -> Result<NodeExtension> {
    curve.validate()?;
    if curve.glue.len() != 1 {
        return Err(Error::Curve("exactly one node expected".to_string()));
    }
    let (plus, minus) = curve.glue[0];
    let norm = curve.normalization();
    let conds = [
        Condition { at: plus, exponent: 0, value: -Q::one() },
        Condition { at: minus, exponent: 0, value: Q::zero() },
    ];
    let f = curve::interpolate_escalating(&norm, Kind::Function, &BTreeMap::new(), &curve.outer, &conds, false, 32)?;
    let hat: Rc<dyn Functional> = Rc::new(Smeared::new(phi, f.clone(), &norm, &curve.outer));
    let minus_step = Rc::new(propagate(hat, &norm, minus, 0)?);
    let plus_step = propagate(minus_step.clone(), minus_step.curve(), plus, 0)?;
    Ok(NodeExtension { functional: Rc::new(plus_step), f })
}
