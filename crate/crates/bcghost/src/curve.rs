//! Marked rational curves and nodal gluings of them.
//!
//! Every component is a copy of the projective line with global coordinate
//! `t`. A marked point carries a local coordinate: the chart `x = t - a` (or
//! `x = 1/t` at infinity) optionally reparametrized as `x = g(xi)`.
//! Global functions, one-forms and vector fields are exact rational objects;
//! everything the Fock side needs is read off their Laurent expansions.

use alloc::collections::BTreeMap;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::laurent::LaurentSeries;
use crate::linalg::{self, SparseRow};
use crate::poly::{Point, RatFunc};
use crate::rational::{q, Q};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Kind {
    /// `f(t)`
    Function,
    /// `f(t) dt`
    Form,
    /// `f(t) d/dt`
    VectorField,
}

/// A marked point with its local coordinate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarkedPoint {
    pub at: Point,
    /// `x = g(xi)` where `x` is the standard chart; `None` means `g(xi) = xi`.
    pub coord: Option<LaurentSeries>,
}

impl MarkedPoint {
    pub fn new(at: Point) -> Self {
        MarkedPoint { at, coord: None }
    }

    pub fn finite(a: Q) -> Self {
        MarkedPoint::new(Point::Finite(a))
    }

    pub fn infinity() -> Self {
        MarkedPoint::new(Point::Infinity)
    }

    pub fn with_coord(mut self, g: LaurentSeries) -> Self {
        self.coord = Some(g);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Component {
    pub points: Vec<MarkedPoint>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PointRef {
    pub component: usize,
    pub point: usize,
}

impl PointRef {
    pub fn new(component: usize, point: usize) -> Self {
        PointRef { component, point }
    }
}

/// A disjoint union of marked lines, some pairs of points glued to nodes.
/// The outer points, in order, are the slots of the Fock tensor product.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveSpec {
    pub components: Vec<Component>,
    pub glue: Vec<(PointRef, PointRef)>,
    pub outer: Vec<PointRef>,
}

/// A rational object living on a single line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalObject {
    pub kind: Kind,
    pub f: RatFunc,
}

/// One rational object per component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GlobalObject {
    pub kind: Kind,
    pub parts: Vec<RatFunc>,
}

impl RationalObject {
    pub fn new(kind: Kind, f: RatFunc) -> Self {
        RationalObject { kind, f }
    }

    /// Expansion in the standard chart at `p`, exact below `order`.
    pub fn expand_chart(&self, p: &Point, order: i64) -> Result<LaurentSeries> {
        match (self.kind, p) {
            (Kind::Function, _) | (_, Point::Finite(_)) => self.f.expand(p, order),
            // dt = -dx/x^2
            (Kind::Form, Point::Infinity) => Ok(self.f.expand(p, order + 2)?.shift(-2).neg().truncate(order)),
            // d/dt = -x^2 d/dx
            (Kind::VectorField, Point::Infinity) => Ok(self.f.expand(p, order - 2)?.shift(2).neg()),
        }
    }

    /// Expansion in the local coordinate of `m`, exact below `order`.
    pub fn expand_at(&self, m: &MarkedPoint, order: i64) -> Result<LaurentSeries> {
        let Some(g) = &m.coord else {
            return self.expand_chart(&m.at, order);
        };
        // x = g(xi); a Laurent expansion of order v in x has order v in xi
        let slack = 4;
        let mut extra = 0;
        loop {
            let base = self.expand_chart(&m.at, order + slack + extra)?;
            let pulled = base.compose(g, order + slack + extra)?;
            let out = match self.kind {
                Kind::Function => pulled,
                Kind::Form => pulled.mul(&g.derivative()),
                Kind::VectorField => pulled.div(&g.derivative(), order + slack + extra)?,
            };
            if out.trunc() >= order {
                return Ok(out.truncate(order));
            }
            extra += order - out.trunc() + 2;
            if extra > 64 + order.abs() {
                return Err(Error::Truncation { have: out.trunc(), need: order });
            }
        }
    }
}

impl GlobalObject {
    pub fn zero(kind: Kind, ncomp: usize) -> Self {
        GlobalObject { kind, parts: vec![RatFunc::zero(); ncomp] }
    }

    pub fn part(&self, c: usize) -> RationalObject {
        RationalObject::new(self.kind, self.parts[c].clone())
    }

    pub fn expand_at(&self, curve: &CurveSpec, p: PointRef, order: i64) -> Result<LaurentSeries> {
        self.part(p.component).expand_at(curve.point(p)?, order)
    }

    pub fn is_zero(&self) -> bool {
        self.parts.iter().all(|f| f.is_zero())
    }

    /// Pole order at `p` (0 when holomorphic, for vector fields the order of
    /// vanishing is not reported).
    pub fn pole_order(&self, curve: &CurveSpec, p: PointRef) -> Result<i64> {
        let s = self.expand_at(curve, p, 1)?;
        let v = if s.is_zero() { 0 } else { s.ord() };
        Ok((-v).max(0))
    }
}

impl CurveSpec {
    /// `(P^1; points)` with every point outer.
    pub fn marked_p1(points: Vec<MarkedPoint>) -> Self {
        let outer = (0..points.len()).map(|i| PointRef::new(0, i)).collect();
        CurveSpec { components: vec![Component { points }], glue: Vec::new(), outer }
    }

    pub fn point(&self, p: PointRef) -> Result<&MarkedPoint> {
        self.components
            .get(p.component)
            .and_then(|c| c.points.get(p.point))
            .ok_or(Error::UnknownPoint(p.point))
    }

    pub fn arity(&self) -> usize {
        self.outer.len()
    }

    /// Checks distinctness, glue/outer disjointness and that every connected
    /// component carries an outer point.
    pub fn validate(&self) -> Result<()> {
        if self.components.is_empty() || self.outer.is_empty() {
            return Err(Error::Curve("empty curve data".to_string()));
        }
        for c in &self.components {
            for (i, a) in c.points.iter().enumerate() {
                if c.points[..i].iter().any(|b| b.at == a.at) {
                    return Err(Error::Curve("repeated point on a component".to_string()));
                }
                if let Some(g) = &a.coord {
                    if g.ord() != 1 {
                        return Err(Error::Curve("local coordinate must vanish to first order".to_string()));
                    }
                }
            }
        }
        let mut used: Vec<PointRef> = Vec::new();
        for p in self.glue.iter().flat_map(|(a, b)| [*a, *b]).chain(self.outer.iter().copied()) {
            self.point(p)?;
            if used.contains(&p) {
                return Err(Error::Curve("a point is glued or marked twice".to_string()));
            }
            used.push(p);
        }
        let roots = self.connected_components();
        for r in roots.iter().copied().collect::<alloc::collections::BTreeSet<_>>() {
            if !self.outer.iter().any(|p| roots[p.component] == r) {
                return Err(Error::Curve("a connected component carries no outer point".to_string()));
            }
        }
        Ok(())
    }

    /// Representative connected component of each irreducible component.
    pub fn connected_components(&self) -> Vec<usize> {
        let mut parent: Vec<usize> = (0..self.components.len()).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            p[x] = r;
            r
        }
        for (a, b) in &self.glue {
            let ra = find(&mut parent, a.component);
            let rb = find(&mut parent, b.component);
            if ra != rb {
                let (lo, hi) = (ra.min(rb), ra.max(rb));
                parent[hi] = lo;
            }
        }
        (0..self.components.len()).map(|i| find(&mut parent, i)).collect()
    }

    /// Sum of arithmetic genus minus one over connected pieces, `#nodes - #lines`.
    pub fn charge_total(&self) -> i64 {
        self.glue.len() as i64 - self.components.len() as i64
    }

    /// The same components with the nodes pulled apart.
    pub fn normalization(&self) -> CurveSpec {
        CurveSpec { components: self.components.clone(), glue: Vec::new(), outer: self.outer.clone() }
    }

    /// Replaces the local coordinate at `p`.
    pub fn with_coord(&self, p: PointRef, g: Option<LaurentSeries>) -> CurveSpec {
        let mut c = self.clone();
        c.components[p.component].points[p.point].coord = g;
        c
    }
}

/// Candidate objects on one line whose poles lie at marked points (with the
/// given bounds) and possibly at infinity; a pole-order check filters them.
fn candidates(comp: &Component, kind: Kind, bounds: &[u32]) -> Vec<RatFunc> {
    let k_inf = comp
        .points
        .iter()
        .zip(bounds)
        .find(|(p, _)| p.at == Point::Infinity)
        .map(|(_, b)| *b as i64)
        .unwrap_or(0);
    // highest power of t allowed by the pole bound at infinity
    let top = match kind {
        Kind::Function => k_inf,
        Kind::Form => k_inf - 2,
        Kind::VectorField => k_inf + 2,
    };
    let mut out: Vec<RatFunc> = (0..=top.max(-1)).filter(|j| *j >= 0).map(|j| RatFunc::t_pow(j as usize)).collect();
    for (p, b) in comp.points.iter().zip(bounds) {
        if let Point::Finite(a) = &p.at {
            for m in 1..=*b {
                out.push(RatFunc::pole(a, m));
            }
        }
    }
    out
}

/// Rows forcing every candidate combination to respect the pole bounds at
/// all marked points and at infinity (the candidates are only a spanning set).
fn pole_rows(comp: &Component, kind: Kind, bounds: &[u32], cands: &[RatFunc], offset: usize) -> Result<Vec<SparseRow>> {
    let mut rows = Vec::new();
    let mut check: Vec<(MarkedPoint, i64)> =
        comp.points.iter().zip(bounds).map(|(p, b)| (MarkedPoint::new(p.at.clone()), *b as i64)).collect();
    if !comp.points.iter().any(|p| p.at == Point::Infinity) {
        check.push((MarkedPoint::infinity(), 0));
    }
    for (p, b) in check {
        let exps: Vec<LaurentSeries> = cands
            .iter()
            .map(|f| RationalObject::new(kind, f.clone()).expand_chart(&p.at, -b))
            .collect::<Result<_>>()?;
        let low = exps.iter().filter(|s| !s.is_zero()).map(|s| s.ord()).min().unwrap_or(0);
        for e in low..-b {
            let row: SparseRow = exps
                .iter()
                .enumerate()
                .filter_map(|(i, s)| {
                    let c = s.coeff_or_zero(e);
                    (!c.is_zero()).then_some((offset + i, c))
                })
                .collect();
            if !row.is_empty() {
                rows.push(row);
            }
        }
    }
    Ok(rows)
}

/// A linear condition on an expansion: the coefficient of `xi^exponent` at `at`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Condition {
    pub at: PointRef,
    pub exponent: i64,
    pub value: Q,
}

/// Glue condition kinds: values agree (functions) or residues cancel (forms).
fn glue_rows(
    curve: &CurveSpec,
    kind: Kind,
    cands: &[Vec<RatFunc>],
    offsets: &[usize],
) -> Result<Vec<SparseRow>> {
    let mut rows = Vec::new();
    for (a, b) in &curve.glue {
        let mut row = SparseRow::new();
        for (side, p) in [(Q::one(), *a), (-Q::one(), *b)] {
            let at = &curve.point(p)?.at;
            for (i, f) in cands[p.component].iter().enumerate() {
                let s = RationalObject::new(kind, f.clone()).expand_chart(at, 1)?;
                let c = match kind {
                    Kind::Function => s.coeff_or_zero(0) * &side,
                    // residues at the two branches must cancel
                    Kind::Form => s.coeff_or_zero(-1),
                    Kind::VectorField => return Err(Error::Invalid("vector fields are not glued".to_string())),
                };
                if !c.is_zero() {
                    *row.entry(offsets[p.component] + i).or_insert_with(Q::zero) += c;
                }
            }
        }
        row.retain(|_, v| !v.is_zero());
        if !row.is_empty() {
            rows.push(row);
        }
    }
    Ok(rows)
}

/// Pole bounds on each component: outer points get `outer_bounds`, glued points
/// 1 for forms (simple poles, the dualizing sheaf) and 0 otherwise, plus any overrides.
fn component_bounds(curve: &CurveSpec, kind: Kind, outer_bounds: &[u32], extra: &BTreeMap<PointRef, u32>) -> Vec<Vec<u32>> {
    let mut b: Vec<Vec<u32>> = curve.components.iter().map(|c| vec![0; c.points.len()]).collect();
    for (p, k) in curve.outer.iter().zip(outer_bounds) {
        b[p.component][p.point] = *k;
    }
    if kind == Kind::Form {
        for (x, y) in &curve.glue {
            b[x.component][x.point] = 1;
            b[y.component][y.point] = 1;
        }
    }
    for (p, k) in extra {
        b[p.component][p.point] = *k;
    }
    b
}

struct Assembled {
    cands: Vec<Vec<RatFunc>>,
    offsets: Vec<usize>,
    ncols: usize,
    rows: Vec<SparseRow>,
}

fn assemble_space(curve: &CurveSpec, kind: Kind, bounds: &[Vec<u32>], glued: bool) -> Result<Assembled> {
    let mut cands = Vec::new();
    let mut offsets = Vec::new();
    let mut rows = Vec::new();
    let mut n = 0;
    for (c, comp) in curve.components.iter().enumerate() {
        let cs = candidates(comp, kind, &bounds[c]);
        rows.extend(pole_rows(comp, kind, &bounds[c], &cs, n)?);
        offsets.push(n);
        n += cs.len();
        cands.push(cs);
    }
    if glued {
        rows.extend(glue_rows(curve, kind, &cands, &offsets)?);
    }
    Ok(Assembled { cands, offsets, ncols: n, rows })
}

fn combine(kind: Kind, a: &Assembled, x: &[Q]) -> GlobalObject {
    let parts = a
        .cands
        .iter()
        .zip(&a.offsets)
        .map(|(cs, off)| {
            cs.iter()
                .enumerate()
                .filter(|(i, _)| !x[off + i].is_zero())
                .fold(RatFunc::zero(), |acc, (i, f)| acc.add(&f.scale(&x[off + i])))
        })
        .collect();
    GlobalObject { kind, parts }
}

/// Basis of global objects of `kind` with poles bounded at the outer points;
/// on nodal curves functions agree at the two branches of every node and
/// forms are sections of the dualizing sheaf.
pub fn basis(curve: &CurveSpec, kind: Kind, pole_orders: &[u32]) -> Result<Vec<GlobalObject>> {
    if pole_orders.len() != curve.outer.len() {
        return Err(Error::Arity { expected: curve.outer.len(), got: pole_orders.len() });
    }
    let bounds = component_bounds(curve, kind, pole_orders, &BTreeMap::new());
    let a = assemble_space(curve, kind, &bounds, true)?;
    Ok(linalg::kernel(a.ncols, a.rows.clone()).iter().map(|x| combine(kind, &a, x)).collect())
}

pub fn function_basis(curve: &CurveSpec, pole_orders: &[u32]) -> Result<Vec<GlobalObject>> {
    basis(curve, Kind::Function, pole_orders)
}

pub fn form_basis(curve: &CurveSpec, pole_orders: &[u32]) -> Result<Vec<GlobalObject>> {
    basis(curve, Kind::Form, pole_orders)
}

/// Finds an object of `kind` with poles bounded by `bounds` (any marked point,
/// outer or not; glued points get the usual node conditions when `glued`)
/// satisfying `conditions`. Free parameters are set to zero.
pub fn interpolate(
    curve: &CurveSpec,
    kind: Kind,
    bounds: &BTreeMap<PointRef, u32>,
    conditions: &[Condition],
    glued: bool,
) -> Result<Option<GlobalObject>> {
    let zero: Vec<u32> = vec![0; curve.outer.len()];
    let b = component_bounds(curve, kind, &zero, bounds);
    let a = assemble_space(curve, kind, &b, glued)?;
    let mut rows: Vec<(SparseRow, Q)> = a.rows.iter().map(|r| (r.clone(), Q::zero())).collect();
    let mut top: BTreeMap<PointRef, i64> = BTreeMap::new();
    for c in conditions {
        let e = top.entry(c.at).or_insert(c.exponent);
        *e = (*e).max(c.exponent);
    }
    let mut expansions: BTreeMap<PointRef, Vec<LaurentSeries>> = BTreeMap::new();
    for (p, e) in &top {
        let mp = curve.point(*p)?;
        let ex = a.cands[p.component]
            .iter()
            .map(|f| RationalObject::new(kind, f.clone()).expand_at(mp, e + 1))
            .collect::<Result<Vec<_>>>()?;
        expansions.insert(*p, ex);
    }
    for c in conditions {
        let mut row = SparseRow::new();
        for (i, s) in expansions[&c.at].iter().enumerate() {
            let v = s.coeff_or_zero(c.exponent);
            if !v.is_zero() {
                row.insert(a.offsets[c.at.component] + i, v);
            }
        }
        rows.push((row, c.value.clone()));
    }
    Ok(linalg::solve_affine(a.ncols, rows).map(|x| combine(kind, &a, &x)))
}

/// Like [`interpolate`] but raises the pole bound at the points `escalate` by one
/// until the conditions become solvable (at most `max_steps` times).
pub fn interpolate_escalating(
    curve: &CurveSpec,
    kind: Kind,
    bounds: &BTreeMap<PointRef, u32>,
    escalate: &[PointRef],
    conditions: &[Condition],
    glued: bool,
    max_steps: u32,
) -> Result<GlobalObject> {
    let mut b = bounds.clone();
    for _ in 0..=max_steps {
        if let Some(x) = interpolate(curve, kind, &b, conditions, glued)? {
            return Ok(x);
        }
        for p in escalate {
            *b.entry(*p).or_insert(0) += 1;
        }
    }
    Err(Error::Infeasible(max_steps as usize))
}

/// Sewing vector field on a line with two distinguished points `plus`, `minus`
/// and outer points `outer`: a rational vector field with poles only at the
/// outer points that reads `x/2 d/dx` at both distinguished points in suitably
/// adjusted coordinates. Returns the field and the curve with the adjusted
/// coordinates installed at `plus` and `minus`, exact below `order`.
pub fn sewing_vector_field(
    curve: &CurveSpec,
    plus: PointRef,
    minus: PointRef,
    outer: &[PointRef],
    order: i64,
) -> Result<(GlobalObject, CurveSpec)> {
    if outer.is_empty() {
        return Err(Error::Curve("the sewing field needs an outer point".to_string()));
    }
    let half = crate::rational::frac(1, 2);
    let conds = [plus, minus]
        .iter()
        .flat_map(|p| {
            [
                Condition { at: *p, exponent: 0, value: Q::zero() },
                Condition { at: *p, exponent: 1, value: half.clone() },
            ]
        })
        .collect::<Vec<_>>();
    let l = interpolate_escalating(curve, Kind::VectorField, &BTreeMap::new(), outer, &conds, false, 16)?;
    let mut adjusted = curve.clone();
    for p in [plus, minus] {
        let v = l.expand_at(curve, p, order + 1)?;
        let z = adjust_coordinate(&v, order + 1)?;
        // new coordinate z = H(xi); the chart sees x = g(H^{-1}(z))
        let hinv = z.comp_inverse(order + 1)?;
        let g = match &curve.point(p)?.coord {
            Some(g) => g.compose(&hinv, order + 1)?,
            None => hinv,
        };
        adjusted = adjusted.with_coord(p, Some(g));
    }
    Ok((l, adjusted))
}

/// `z(xi) = xi + ...` with `l(xi) z'(xi) = z(xi)/2` for `l = xi/2 + O(xi^2)`.
pub fn adjust_coordinate(l: &LaurentSeries, order: i64) -> Result<LaurentSeries> {
    if l.coeff(0)? != Q::zero() || l.coeff(1)? != crate::rational::frac(1, 2) {
        return Err(Error::Invalid("field is not xi/2 d/dxi to first order".to_string()));
    }
    let t = order.min(l.trunc());
    let mut z: Vec<Q> = vec![Q::zero(), Q::one()];
    for k in 2..t {
        // z_k (k-1)/2 = -sum_{i=2}^{k} l_i (k-i+1) z_{k-i+1}
        let mut s = Q::zero();
        for i in 2..=k {
            s += l.coeff(i)? * q(k - i + 1) * &z[(k - i + 1) as usize];
        }
        z.push(-s * q(2) / q(k - 1));
    }
    Ok(LaurentSeries::new(z.into_iter().enumerate().map(|(k, c)| (k as i64, c)), t))
}

/// The forms `tau^(n)`, `n < q_order`, on the normalization whose expansions at
/// `plus` (coordinate z) and `minus` (coordinate w) are
/// `-sum_m a[m,n] z^{m-n-1} dz` and `sum_m a[n,m] w^{m-n-1} dw` below `match_order`,
/// with the remaining poles at `outer`.
pub fn family_form_lift(
    curve: &CurveSpec,
    plus: PointRef,
    minus: PointRef,
    outer: &[PointRef],
    a: &BTreeMap<(i64, i64), Q>,
    q_order: i64,
    match_order: i64,
) -> Result<Vec<GlobalObject>> {
    let get = |i: i64, j: i64| a.get(&(i, j)).cloned().unwrap_or_else(Q::zero);
    let mut out = Vec::new();
    for n in 0..q_order {
        let mut conds = Vec::new();
        for e in -(n + 1)..match_order {
            conds.push(Condition { at: plus, exponent: e, value: -get(e + n + 1, n) });
            conds.push(Condition { at: minus, exponent: e, value: get(n, e + n + 1) });
        }
        let bounds: BTreeMap<PointRef, u32> = [(plus, (n + 1) as u32), (minus, (n + 1) as u32)].into_iter().collect();
        if conds.iter().all(|c| c.value.is_zero()) {
            out.push(GlobalObject::zero(Kind::Form, curve.components.len()));
            continue;
        }
        out.push(interpolate_escalating(curve, Kind::Form, &bounds, outer, &conds, false, 64)?);
    }
    Ok(out)
}

/// The functions `f^(k)`, `k < q_order`, with expansions
/// `sum_n a[n,k] z^{n-k}` at `plus` and `sum_m a[k,m] w^{m-k}` at `minus`.
pub fn family_function_lift(
    curve: &CurveSpec,
    plus: PointRef,
    minus: PointRef,
    outer: &[PointRef],
    a: &BTreeMap<(i64, i64), Q>,
    q_order: i64,
    match_order: i64,
) -> Result<Vec<GlobalObject>> {
    let get = |i: i64, j: i64| a.get(&(i, j)).cloned().unwrap_or_else(Q::zero);
    let mut out = Vec::new();
    for k in 0..q_order {
        let mut conds = Vec::new();
        for e in -k..match_order {
            conds.push(Condition { at: plus, exponent: e, value: get(e + k, k) });
            conds.push(Condition { at: minus, exponent: e, value: get(k, e + k) });
        }
        let bounds: BTreeMap<PointRef, u32> = [(plus, k as u32), (minus, k as u32)].into_iter().collect();
        if conds.iter().all(|c| c.value.is_zero()) {
            out.push(GlobalObject::zero(Kind::Function, curve.components.len()));
            continue;
        }
        out.push(interpolate_escalating(curve, Kind::Function, &bounds, outer, &conds, false, 64)?);
    }
    Ok(out)
}

/// `Res(l S dxi)` where `S = {g; xi}` is the projective connection of the
/// standard bidifferential `dt dt'/(t - t')^2` in the coordinate `x = g(xi)`.
pub fn central_pairing(curve: &CurveSpec, l: &GlobalObject, at: PointRef) -> Result<Q> {
    let mp = curve.point(at)?;
    let Some(g) = &mp.coord else {
        return Ok(Q::zero());
    };
    let lx = l.expand_at(curve, at, 2)?;
    let need = (-lx.ord()).max(0) + 1;
    let lx = l.expand_at(curve, at, need)?;
    let s = g.schwarzian(need + 1)?;
    lx.mul(&s).residue()
}
