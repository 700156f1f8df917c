//! Verification suites. Each suite checks a family of identities exhaustively
//! on a finite window and reports, per identity, the number of cases and the
//! largest absolute residual (exact, so a pass means residual 0).

use std::collections::BTreeMap;
use std::rc::Rc;

use bcghost::coordchange::*;
use bcghost::curve::*;
use bcghost::fock::*;
use bcghost::laurent::LaurentSeries;
use bcghost::maya::{enumerate_basis, HalfInt, MayaDiagram};
use bcghost::rational::{frac, q, Q};
use bcghost::sewing::*;
use bcghost::vacua::*;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::json::rat;
use crate::CliError;

type Res<T> = Result<T, CliError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, clap::ValueEnum)]
pub enum Suite {
    Anticommutators,
    Virasoro,
    L0,
    Pairings,
    Example,
    Kernel,
    Propagation,
    Nodal,
    Sewing,
    Fuchsian,
    Covariance,
    Preferred,
    NodalPreferred,
}

impl Suite {
    pub const ALL: [Suite; 13] = [
        Suite::Anticommutators,
        Suite::Virasoro,
        Suite::L0,
        Suite::Pairings,
        Suite::Example,
        Suite::Kernel,
        Suite::Propagation,
        Suite::Nodal,
        Suite::Sewing,
        Suite::Fuchsian,
        Suite::Covariance,
        Suite::Preferred,
        Suite::NodalPreferred,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Anticommutators => "anticommutators",
            Suite::Virasoro => "virasoro",
            Suite::L0 => "l0",
            Suite::Pairings => "pairings",
            Suite::Example => "example",
            Suite::Kernel => "kernel",
            Suite::Propagation => "propagation",
            Suite::Nodal => "nodal",
            Suite::Sewing => "sewing",
            Suite::Fuchsian => "fuchsian",
            Suite::Covariance => "covariance",
            Suite::Preferred => "preferred",
            Suite::NodalPreferred => "nodal-preferred",
        }
    }

    /// The default window degree.
    pub fn default_degree(self) -> i64 {
        match self {
            Suite::Anticommutators | Suite::Kernel => 6,
            Suite::Virasoro | Suite::L0 | Suite::Example => 8,
            Suite::Pairings | Suite::Preferred => 5,
            Suite::Propagation | Suite::Nodal | Suite::Covariance | Suite::NodalPreferred => 4,
            Suite::Sewing | Suite::Fuchsian => 3,
        }
    }
}

/// One identity checked over `cases` instances.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub identity: String,
    pub cases: u64,
    pub max_residual: String,
    pub pass: bool,
    /// Set on an identity checked in its originally stated form, known to be
    /// wrong; the note names the corrected check. Excluded from `pass`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub known_deviation: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub max_degree: i64,
    pub seed: u64,
    pub checks: Vec<Check>,
    /// Every check without a known deviation passes.
    pub pass: bool,
    /// Every check passes, stated forms included.
    pub pass_as_stated: bool,
}

impl SuiteReport {
    fn new(suite: Suite, max_degree: i64, seed: u64, checks: Vec<Check>) -> Self {
        let pass = checks.iter().filter(|c| c.known_deviation.is_none()).all(|c| c.pass);
        let pass_as_stated = checks.iter().all(|c| c.pass);
        SuiteReport { suite: suite.name().to_string(), max_degree, seed, checks, pass, pass_as_stated }
    }

    pub fn failing(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

struct Tally {
    identity: String,
    cases: u64,
    worst: Q,
    deviation: Option<String>,
}

impl Tally {
    fn new(identity: &str) -> Self {
        Tally { identity: identity.to_string(), cases: 0, worst: Q::zero(), deviation: None }
    }

    fn stated(identity: &str, note: &str) -> Self {
        Tally { deviation: Some(note.to_string()), ..Tally::new(identity) }
    }

    fn record(&mut self, r: Q) {
        self.cases += 1;
        let r = r.abs();
        if r > self.worst {
            self.worst = r;
        }
    }

    fn record_vec(&mut self, a: &FockVector, b: &FockVector) {
        self.record(max_abs(&a.sub(b)));
    }

    fn finish(self) -> Check {
        Check {
            identity: self.identity,
            cases: self.cases,
            pass: self.worst.is_zero() && self.cases > 0,
            max_residual: rat(&self.worst),
            known_deviation: self.deviation,
        }
    }
}

fn max_abs(v: &FockVector) -> Q {
    v.terms().map(|(_, c)| c.abs()).fold(Q::zero(), |a, b| if b > a { b } else { a })
}

fn half(twice: i64) -> HalfInt {
    HalfInt::from_twice(twice).expect("odd")
}

/// Modes `|nu| <= 9/2`.
fn modes() -> Vec<HalfInt> {
    (-9..=9).step_by(2).map(half).collect()
}

fn basis(max_p: i64, max_d: i64) -> Vec<MayaDiagram> {
    let mut v = Vec::new();
    for p in -max_p..=max_p {
        for d in 0..=max_d {
            v.extend(enumerate_basis(p, d));
        }
    }
    v
}

fn basis_upto(p: i64, dmax: i64) -> Vec<FockVector> {
    (0..=dmax).flat_map(|d| enumerate_basis(p, d)).map(FockVector::basis).collect()
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Runs a suite; `max_degree` overrides the suite's default window.
pub fn run(suite: Suite, max_degree: Option<i64>, seed: u64) -> Res<SuiteReport> {
    let d = max_degree.unwrap_or(suite.default_degree());
    if d < 0 {
        return Err(CliError::Input(format!("max degree must be non-negative, got {d}")));
    }
    let checks = match suite {
        Suite::Anticommutators => anticommutators(d)?,
        Suite::Virasoro => virasoro(d)?,
        Suite::L0 => l0(d)?,
        Suite::Pairings => pairings(d)?,
        Suite::Example => example(d)?,
        Suite::Kernel => kernel(d)?,
        Suite::Propagation => propagation(d)?,
        Suite::Nodal => nodal(d)?,
        Suite::Sewing => sewing(d, seed)?,
        Suite::Fuchsian => fuchsian(d)?,
        Suite::Covariance => covariance(d, seed)?,
        Suite::Preferred => preferred(d, seed)?,
        Suite::NodalPreferred => nodal_preferred(d)?,
    };
    Ok(SuiteReport::new(suite, d, seed, checks))
}

fn anticommutators(d: i64) -> Res<Vec<Check>> {
    let pairs = [
        (Fermion::Psi, Fermion::Psi, "{psi_a, psi_b} = 0"),
        (Fermion::PsiBar, Fermion::PsiBar, "{psibar_a, psibar_b} = 0"),
        (Fermion::Psi, Fermion::PsiBar, "{psi_a, psibar_b} = delta_{a+b,0}"),
    ];
    let mut tallies: Vec<Tally> = pairs.iter().map(|p| Tally::new(p.2)).collect();
    for m in basis(3, d) {
        let v = FockVector::basis(m.clone());
        for a in modes() {
            for b in modes() {
                for (i, (ka, kb, _)) in pairs.iter().enumerate() {
                    let r = bracket(&Mode(*ka, a), &Mode(*kb, b), true, &m)?;
                    let want = if ka != kb && a.twice() + b.twice() == 0 { v.clone() } else { FockVector::zero() };
                    tallies[i].record_vec(&r, &want);
                }
            }
        }
    }
    Ok(tallies.into_iter().map(Tally::finish).collect())
}

fn spins() -> [Q; 3] {
    [q(0), frac(1, 2), q(1)]
}

fn virasoro(d: i64) -> Res<Vec<Check>> {
    let mut vir: Vec<Tally> = spins()
        .iter()
        .map(|j| Tally::new(&format!("[L_n, L_m] = (n-m) L_(n+m) - (6j^2-6j+1)(n^3-n)/6 delta, j = {}", rat(j))))
        .collect();
    let mut cur = Tally::new("[J_n, J_m] = n delta_{n+m,0}");
    let mut mixed: Vec<Tally> = spins()
        .iter()
        .map(|j| Tally::new(&format!("[L_n, J_m] = -m J_(n+m) - (2j-1)(n^2+n)/2 delta, j = {}", rat(j))))
        .collect();
    for m in basis(2, d) {
        let v = FockVector::basis(m.clone());
        for a in -3..=3i64 {
            for b in -3..=3i64 {
                let lhs = bracket(&Current(a), &Current(b), false, &m)?;
                let want = if a + b == 0 { v.scale(&q(a)) } else { FockVector::zero() };
                cur.record_vec(&lhs, &want);
                for (i, j) in spins().iter().enumerate() {
                    let la = Virasoro::with_spin(j.clone(), a);
                    let lb = Virasoro::with_spin(j.clone(), b);
                    let lhs = bracket(&la, &lb, false, &m)?;
                    let mut rhs = v.apply(&Virasoro::with_spin(j.clone(), a + b))?.scale(&q(a - b));
                    if a + b == 0 {
                        let c = -frac(1, 6) * (q(6) * j * j - q(6) * j + q(1)) * q(a * a * a - a);
                        rhs = rhs.add(&v.scale(&c));
                    }
                    vir[i].record_vec(&lhs, &rhs);
                    let lhs = bracket(&la, &Current(b), false, &m)?;
                    let mut rhs = v.apply(&Current(a + b))?.scale(&q(-b));
                    if a + b == 0 {
                        rhs = rhs.add(&v.scale(&(-frac(1, 2) * (q(2) * j - q(1)) * q(a * a + a))));
                    }
                    mixed[i].record_vec(&lhs, &rhs);
                }
            }
        }
    }
    let mut out: Vec<Check> = vir.into_iter().map(Tally::finish).collect();
    out.push(cur.finish());
    out.extend(mixed.into_iter().map(Tally::finish));
    Ok(out)
}

fn l0(d: i64) -> Res<Vec<Check>> {
    let mut t = Tally::new("L_0 |M> = (d + p(p+1)/2) |M> for j = 0");
    let l0 = Virasoro::with_spin(q(0), 0);
    for m in basis(3, d) {
        let g = m.grading();
        let v = FockVector::basis(m);
        t.record_vec(&v.apply(&l0)?, &v.scale(&q(g.degree + g.charge * (g.charge + 1) / 2)));
    }
    Ok(vec![t.finish()])
}

/// `(-1)^{-nu-1/2}`
fn mode_sign(nu: HalfInt) -> Q {
    if (-(nu.twice() + 1) / 2).rem_euclid(2) == 0 {
        q(1)
    } else {
        q(-1)
    }
}

const PSIBAR_NOTE: &str = "stated sign (-1)^(-nu-1/2) fails on psibar; the corrected sign (-1)^(-nu+1/2) is the next check";

fn pairings(d: i64) -> Res<Vec<Check>> {
    let mut sym_psi = Tally::new("(psi_nu u, v) = (u, psibar_-nu v)");
    let mut sym_bar = Tally::new("(psibar_nu v, u) = (v, psi_-nu u)");
    let mut br_psi = Tally::new("{psi_nu u | v} = (-1)^(-nu-1/2) {u | psi_-nu v}");
    let mut br_bar_stated = Tally::stated("{psibar_nu u | v} = (-1)^(-nu-1/2) {u | psibar_-nu v}", PSIBAR_NOTE);
    let mut br_bar = Tally::new("{psibar_nu u | v} = (-1)^(-nu+1/2) {u | psibar_-nu v}");
    let mut pl_psi = Tally::new("{psi_nu u | v}+ = (-1)^(-nu-1/2) {u | psi_(-nu-1) v}+");
    let mut pl_bar_stated = Tally::stated("{psibar_nu u | v}+ = (-1)^(-nu-1/2) {u | psibar_(-nu+1) v}+", PSIBAR_NOTE);
    let mut pl_bar = Tally::new("{psibar_nu u | v}+ = (-1)^(-nu+1/2) {u | psibar_(-nu+1) v}+");
    let mut gram = Tally::new("{M_i | v^j}+ = delta_ij for the dual basis");
    for p in -3..=3 {
        let vs = basis_upto(p, d);
        let us = basis_upto(p + 1, d);
        let vs_br = basis_upto(-p, d);
        let vbar = basis_upto(-p - 1, d);
        let vs_pl = basis_upto(-p - 1, d);
        let vbar_pl = basis_upto(-p - 2, d);
        for nu in modes() {
            let s = mode_sign(nu);
            for u in &us {
                for v in &vs {
                    sym_psi.record(pair_sym(&u.apply_fermion(Fermion::Psi, nu), v) - pair_sym(u, &v.apply_fermion(Fermion::PsiBar, -nu)));
                    sym_bar.record(pair_sym(&v.apply_fermion(Fermion::PsiBar, nu), u) - pair_sym(v, &u.apply_fermion(Fermion::Psi, -nu)));
                }
                for v in &vs_br {
                    let lhs = pair_braced(&u.apply_fermion(Fermion::Psi, nu), v)?;
                    br_psi.record(lhs - &s * pair_braced(u, &v.apply_fermion(Fermion::Psi, -nu))?);
                }
                for v in &vs_pl {
                    let lhs = pair_braced_plus(&u.apply_fermion(Fermion::Psi, nu), v)?;
                    pl_psi.record(lhs - &s * pair_braced_plus(u, &v.apply_fermion(Fermion::Psi, (-nu).add_int(-1)))?);
                }
            }
            for u in &vs {
                for v in &vbar {
                    let lhs = pair_braced(&u.apply_fermion(Fermion::PsiBar, nu), v)?;
                    let rhs = pair_braced(u, &v.apply_fermion(Fermion::PsiBar, -nu))?;
                    br_bar_stated.record(&lhs - &s * &rhs);
                    br_bar.record(lhs + &s * rhs);
                }
                for v in &vbar_pl {
                    let lhs = pair_braced_plus(&u.apply_fermion(Fermion::PsiBar, nu), v)?;
                    let rhs = pair_braced_plus(u, &v.apply_fermion(Fermion::PsiBar, (-nu).add_int(1)))?;
                    pl_bar_stated.record(&lhs - &s * &rhs);
                    pl_bar.record(lhs + &s * rhs);
                }
            }
        }
        for dd in 0..=d {
            let db = dual_basis_plus(p, dd);
            if db.basis.len() != db.dual.len() {
                gram.record(q(1));
            }
            for (i, m) in db.basis.iter().enumerate() {
                for (j, (a, n)) in db.dual.iter().enumerate() {
                    let v = FockVector::basis(n.clone()).scale(&q(*a));
                    let want = if i == j { q(1) } else { q(0) };
                    gram.record(pair_braced_plus(&FockVector::basis(m.clone()), &v)? - want);
                }
            }
        }
    }
    Ok([sym_psi, sym_bar, br_psi, br_bar_stated, br_bar, pl_psi, pl_bar_stated, pl_bar, gram].into_iter().map(Tally::finish).collect())
}

fn p1(points: &[i64]) -> CurveSpec {
    CurveSpec::marked_p1(points.iter().map(|a| MarkedPoint::finite(q(*a))).collect())
}

fn two_lines() -> CurveSpec {
    let comp = || Component { points: vec![MarkedPoint::finite(q(0)), MarkedPoint::finite(q(1))] };
    CurveSpec {
        components: vec![comp(), comp()],
        glue: vec![(PointRef::new(0, 0), PointRef::new(1, 0))],
        outer: vec![PointRef::new(0, 1), PointRef::new(1, 1)],
    }
}

/// `P^1` with `P+ = 0`, `P- = inf` glued and one outer point `Q = 1`.
fn nodal_line() -> CurveSpec {
    let comp = Component { points: vec![MarkedPoint::finite(q(0)), MarkedPoint::infinity(), MarkedPoint::finite(q(1))] };
    CurveSpec { components: vec![comp], glue: vec![(PointRef::new(0, 0), PointRef::new(0, 1))], outer: vec![PointRef::new(0, 2)] }
}

fn minus_one() -> MayaDiagram {
    MayaDiagram::charged_vacuum(-1)
}

fn diff_on(a: &dyn Functional, b: &dyn Functional, tuples: &[Tuple], scale: &Q, t: &mut Tally) -> Res<()> {
    for u in tuples {
        t.record(a.eval(u)? - scale * b.eval(u)?);
    }
    Ok(())
}

fn example(d: i64) -> Res<Vec<Check>> {
    let (v, report) = vacuum(&p1(&[0]), d)?;
    let mut dim = Tally::new("kernel dimension on (P^1; 0; z) is 1");
    for (_, k) in &report.dims {
        dim.record(q(*k as i64 - 1));
    }
    let mut val = Tally::new("vacuum = <-1| (1 on |-1>, 0 elsewhere)");
    let want = DualFunctional::basis(minus_one(), d);
    diff_on(&v.functional, &want, &window(1, d, None), &q(1), &mut val)?;
    Ok(vec![dim.finish(), val.finish()])
}

fn kernel(d: i64) -> Res<Vec<Check>> {
    let curves = [
        ("one-pointed P^1", p1(&[0])),
        ("two-pointed P^1", p1(&[0, 1])),
        ("three-pointed P^1", p1(&[0, 1, 3])),
        ("irreducible nodal P^1", nodal_line()),
        ("two glued P^1", two_lines()),
    ];
    let mut out = Vec::new();
    for (name, c) in curves {
        let mut t = Tally::new(&format!("kernel dimension 1, stable under pole-bound escalation: {name}"));
        let (v, report) = vacuum(&c, d)?;
        // the last two pole bounds are the stabilization pair
        for (_, k) in report.dims.iter().rev().take(2) {
            t.record(q(*k as i64 - 1));
        }
        if v.functional.support_len() == 0 {
            t.record(q(1));
        }
        out.push(t.finish());
    }
    Ok(out)
}

fn propagation(d: i64) -> Res<Vec<Check>> {
    let base: Rc<dyn Functional> = Rc::new(DualFunctional::basis(minus_one(), d + 4));
    let c = p1(&[0, 1]);
    let one = CurveSpec { outer: vec![PointRef::new(0, 0)], ..c.clone() };
    let prop = propagate(base, &one, PointRef::new(0, 1), 1)?;
    let (v, _) = vacuum(&c, d)?;
    let t0 = vec![minus_one(), MayaDiagram::vacuum()];
    let r = prop.eval(&t0)? / v.functional.eval(&t0)?;
    let mut same = Tally::new("propagated vacuum = solved two-point vacuum after normalization");
    diff_on(&prop, &v.functional, &window(2, d, Some(-1)), &r, &mut same)?;
    let mut back = Tally::new("restriction to |0> at the new point recovers <-1|");
    for t in window(1, d + 2, None) {
        let want = if t[0] == minus_one() { q(1) } else { q(0) };
        back.record(prop.eval(&[t[0].clone(), MayaDiagram::vacuum()])? - want);
    }
    Ok(vec![same.finish(), back.finish()])
}

fn nodal(d: i64) -> Res<Vec<Check>> {
    let c = nodal_line();
    let (v, _) = vacuum(&c, d + 3)?;
    let phi: Rc<dyn Functional> = Rc::new(v.functional.clone());
    let ext = node_extend(phi, &c)?;
    let back = NodeRestriction { inner: ext.functional.clone() };
    let mut rt = Tally::new("restriction of the node extension = the nodal vacuum");
    diff_on(&back, &v.functional, &window(1, d, Some(0)), &q(1), &mut rt)?;
    let norm = ext.functional.curve().clone();
    let ch = Some(norm.charge_total());
    let mut gauge = Tally::new("node extension satisfies the gauge conditions of the normalization");
    let bounds = [2, 2, 2];
    for x in form_basis(&norm, &bounds)?.iter().chain(&function_basis(&norm, &bounds)?) {
        gauge.record(gauge_residual(ext.functional.as_ref(), &norm, x, d.min(3), ch)?);
    }
    Ok(vec![rt.finish(), gauge.finish()])
}

fn standard_setup() -> Res<SewingSetup> {
    let base: Rc<dyn Functional> = Rc::new(Covector(vec![minus_one()]));
    Ok(setup(&nodal_line(), base, 24)?)
}

/// Random node data `a[n,m]`, `n + m < size`, entries in `[-3, 3] / [1, 3]`.
pub fn random_node_data(rng: &mut impl Rng, size: i64) -> BTreeMap<(i64, i64), Q> {
    let mut a = BTreeMap::new();
    for n in 0..size {
        for m in 0..size - n {
            let x: i64 = rng.gen_range(-3..=3);
            let y: i64 = rng.gen_range(1..=3);
            if x != 0 {
                a.insert((n, m), frac(x, y));
            }
        }
    }
    a
}

/// Number of random coefficient matrices in the sewing suite.
pub const SEWING_SAMPLES: usize = 20;

fn sewing(d: i64, seed: u64) -> Res<Vec<Check>> {
    let s = standard_setup()?;
    let k = 5;
    let series = sew(s.phi.clone(), k)?;
    let mut form = Tally::new("sum_n Phi~_(k-n)(rho(psi[tau^(n)]) u) = 0 through q^4");
    let mut func = Tally::new("sum_n Phi~_(k-n)(rho(psibar[f^(n)]) u) = 0 through q^4");
    let mut rng = rng(seed);
    for _ in 0..SEWING_SAMPLES {
        let a = random_node_data(&mut rng, k as i64);
        let taus = family_form_lift(&s.curve, s.plus, s.minus, &s.outer, &a, k as i64, k as i64 + 2)?;
        for r in family_gauge_residual(&series, &s.curve, &s.outer, &taus, d, 0)? {
            form.record(r);
        }
        let fs = family_function_lift(&s.curve, s.plus, s.minus, &s.outer, &a, k as i64, k as i64 + 2)?;
        for r in family_gauge_residual(&series, &s.curve, &s.outer, &fs, d, 0)? {
            func.record(r);
        }
    }
    let mut q0 = Tally::new(&format!("q^0 coefficient = ({SEWING_SIGN}) x nodal restriction"));
    let res = NodeRestriction { inner: s.phi.clone() };
    let mut nonzero = false;
    for u in window(1, d + 1, Some(0)) {
        let a = series.coeffs[0].eval(&u)?;
        nonzero |= !a.is_zero();
        q0.record(&a - q(SEWING_SIGN) * res.eval(&u)?);
    }
    if !nonzero {
        q0.record(q(1));
    }
    Ok(vec![form.finish(), func.finish(), q0.finish()])
}

fn fuchsian(d: i64) -> Res<Vec<Check>> {
    let coord = LaurentSeries::poly(1, &[q(1), frac(1, 3), frac(-1, 5)]);
    let c = nodal_line().with_coord(PointRef::new(0, 2), Some(coord));
    let (bv, _) = vacuum(&c.normalization(), 12)?;
    let s = setup(&c, Rc::new(bv.functional.clone()), 24)?;
    let series = sew(s.phi.clone(), 4)?;
    let b = b_term(&s.curve, &s.field, &s.outer)?;
    let rep = fuchsian_check(&series, &s.curve, &s.outer, &s.field, &b, d, 0)?;
    let mut res = Tally::new("q dF/dq + sum_j F(rho_j(T[l_j]) u) - kappa b F = 0 through q^3");
    for r in &rep.residual {
        res.record(r.clone());
    }
    let mut div = Tally::new("non-derivative part divisible by q");
    div.record(if rep.divisible_by_q { q(0) } else { q(1) });
    let mut live = Tally::new("every coefficient through q^3 is nonzero on the window");
    for x in &rep.size {
        live.record(if x.is_zero() { q(1) } else { q(0) });
    }
    let mut weighted = Tally::new("q dF/dq = sector-weighted series");
    for u in window(1, d, Some(0)) {
        for (a, b) in q_derivative(&series, &u)?.into_iter().zip(weighted_series(&series, &u)?) {
            weighted.record(a - b);
        }
    }
    Ok(vec![res.finish(), div.finish(), live.finish(), weighted.finish()])
}

/// `xi + sum_{k=2..6} c_k xi^k` with `c_k` in `[-3, 3] / [1, 3]`.
pub fn random_unipotent(rng: &mut impl Rng) -> Res<CoordChange> {
    let mut c = vec![q(1)];
    for _ in 0..5 {
        let n: i64 = rng.gen_range(-3..=3);
        let m: i64 = rng.gen_range(1..=3);
        c.push(frac(n, m));
    }
    Ok(CoordChange::new(LaurentSeries::poly(1, &c))?)
}

/// Number of random coordinate changes in the covariance suite.
pub const COVARIANCE_SAMPLES: usize = 10;

const CENTRAL_NOTE: &str = "stated central term (1/6)Res({h;xi} l dxi) holds only for l with at most a simple pole; the exact term (1/6)Res({h;xi} ad(h)l dxi) is the next check";
const COMPOSITION_NOTE: &str = "stated order G[h1]G[h2] contradicts psi-covariance; the reversed order is the next check";

fn covariance(d: i64, seed: u64) -> Res<Vec<Check>> {
    let mut rng = rng(seed);
    let f = LaurentSeries::poly(-2, &[q(1), q(2), frac(1, 2), q(-1)]);
    let g = LaurentSeries::poly(-3, &[q(1), q(0), q(-1), q(3)]);
    let fields = [LaurentSeries::poly(-1, &[q(1), q(0), q(2), q(-1)]), LaurentSeries::poly(-3, &[q(1), q(0), q(2), q(-1)])];
    let mut psi = Tally::new("G psi[f dxi] G^-1 = psi[h^*(f dxi)]");
    let mut psibar = Tally::new("G psibar[g] G^-1 = psibar[h^* g]");
    let mut t_stated = Tally::stated("G T[l] G^-1 = T[ad(h) l] + (1/6) Res({h; xi} l dxi)", CENTRAL_NOTE);
    let mut t_exact = Tally::new("G T[l] G^-1 = T[ad(h) l] + (1/6) Res({h; xi} ad(h)(l) dxi)");
    let mut comp_stated = Tally::stated("G[h1 o h2] = G[h1] G[h2]", COMPOSITION_NOTE);
    let mut comp = Tally::new("G[h1 o h2] = G[h2] G[h1]");
    let changes = (0..COVARIANCE_SAMPLES).map(|_| random_unipotent(&mut rng)).collect::<Res<Vec<_>>>()?;
    let mut central_seen = false;
    for h in &changes {
        for l in &fields {
            let r = covariance_check(h, &f, &g, l, d)?;
            let n = window(1, d, None).len() as u64;
            for (t, x) in [(&mut psi, &r.psi), (&mut psibar, &r.psibar), (&mut t_stated, &r.tfield), (&mut t_exact, &r.tfield_adjoint)] {
                t.record(x.clone());
                t.cases += n - 1;
            }
            central_seen |= !r.central_adjoint.is_zero();
        }
    }
    if !central_seen {
        t_exact.record(q(1));
    }
    let vectors: Vec<FockVector> = window(1, d, None).into_iter().map(|t| FockVector::basis(t[0].clone())).collect();
    for pair in changes.chunks(2) {
        let (h1, h2) = (&pair[0], &pair[pair.len() - 1]);
        let h12 = h1.compose(h2, d + 8)?;
        for v in &vectors {
            let lhs = h12.g_apply(v)?;
            comp.record_vec(&lhs, &h2.g_apply(&h1.g_apply(v)?)?);
            comp_stated.record_vec(&lhs, &h1.g_apply(&h2.g_apply(v)?)?);
        }
    }
    Ok([psi, psibar, t_stated, t_exact, comp_stated, comp].into_iter().map(Tally::finish).collect())
}

fn preferred(d: i64, seed: u64) -> Res<Vec<Check>> {
    let mut rng = rng(seed);
    let base = preferred_element(&NormalizedExpansionData::genus_zero(&LaurentSeries::x(), d + 4)?, d)?;
    let mut changes = Vec::new();
    for _ in 0..4 {
        changes.push(("unipotent", random_unipotent(&mut rng)?));
    }
    for a in [q(2), q(3), frac(1, 2)] {
        changes.push(("scaling", CoordChange::scaling(a.clone())?));
        let u = random_unipotent(&mut rng)?;
        changes.push(("scaled", CoordChange::scaling(a)?.compose(&u, 30)?));
    }
    let mut tallies: BTreeMap<&str, Tally> = BTreeMap::new();
    for (kind, h) in changes {
        let t = tallies
            .entry(kind)
            .or_insert_with(|| Tally::new(&format!("<-1| G[h] = preferred element of the chart h^-1 ({kind} h)")));
        let lhs = h.g_dual(&base.functional, d, Some(-1))?;
        // eta = h(xi): the chart coordinate is h^{-1}(eta)
        let data = NormalizedExpansionData::genus_zero(h.inverse(2 * d + 14)?.series(), d + 4)?;
        let rhs = preferred_element(&data, d)?;
        diff_on(&lhs, &rhs.functional, &window(1, d, Some(-1)), &q(1), t)?;
    }
    Ok(tallies.into_values().map(Tally::finish).collect())
}

/// The sign convention fixed for the two-line nodal preferred element.
pub const TWO_LINE_VALUE: i64 = -1;

fn nodal_preferred(d: i64) -> Res<Vec<Check>> {
    let c = two_lines();
    let pref = preferred_element(&NormalizedExpansionData::genus_zero(&LaurentSeries::x(), d + 4)?, d + 2)?;
    let nodal = preferred_nodal(&c, &[pref.clone(), pref])?;
    let t0 = [minus_one(), MayaDiagram::vacuum()];
    let value = nodal.eval(&t0)?;
    let mut val = Tally::new(&format!("two glued lines: value on (|-1>, |0>) = {TWO_LINE_VALUE}"));
    val.record(&value - q(TWO_LINE_VALUE));
    let (v, _) = vacuum(&c, d)?;
    let scale = &value / v.functional.eval(&t0)?;
    let mut prop = Tally::new("two glued lines: preferred element is a vacuum");
    diff_on(&nodal, &v.functional, &window(2, d.min(3), Some(-1)), &scale, &mut prop)?;

    // omega_1 = -dt/t at t = 1 + xi: I_n = (-1)^n
    let mut data = NormalizedExpansionData { genus: 1, trunc: d + 6, ..Default::default() };
    for n in 1..=d + 6 {
        data.i.insert((n, 1), if n % 2 == 0 { q(1) } else { q(-1) });
    }
    let c = nodal_line();
    let pref = preferred_element(&data, d + 1)?;
    let (v, _) = vacuum(&c, d + 1)?;
    let gap = [MayaDiagram::from_twice(&[-1], &[-1])?];
    let r = pref.functional.eval(&gap)? / v.functional.eval(&gap)?;
    let mut irr = Tally::new("irreducible nodal P^1: genus-one preferred element is a vacuum");
    diff_on(&pref.functional, &v.functional, &window(1, d + 1, Some(0)), &r, &mut irr)?;
    let ext = node_extend(Rc::new(pref.functional.clone()), &c)?;
    let hat = VacuumRestriction { inner: ext.functional.clone() };
    let mut sign = Tally::new("irreducible nodal P^1: <0 (x) 0 (x) . | extension> = (-1)^g <-1|, g = 1");
    for t in window(1, d, Some(-1)) {
        let want = if t[0] == minus_one() { q(-1) } else { q(0) };
        sign.record(hat.eval(&t)? - want);
    }
    Ok(vec![val.finish(), prop.finish(), irr.finish(), sign.finish()])
}
