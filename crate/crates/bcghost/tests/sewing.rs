use std::collections::BTreeMap;
use std::rc::Rc;

use bcghost::curve::*;
use bcghost::fock::*;
use bcghost::laurent::LaurentSeries;
use bcghost::maya::{enumerate_basis, HalfInt, MayaDiagram};
use bcghost::rational::{frac, q, Q};
use bcghost::sewing::*;
use bcghost::vacua::*;
use num_traits::Zero;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn basis_upto(p: i64, dmax: i64) -> Vec<FockVector> {
    (0..=dmax).flat_map(|d| enumerate_basis(p, d)).map(FockVector::basis).collect()
}

fn modes() -> Vec<HalfInt> {
    (-9..=9).step_by(2).map(|t| HalfInt::from_twice(t).unwrap()).collect()
}

/// `(-1)^{-nu-1/2}`
fn mode_sign(nu: HalfInt) -> Q {
    if (-(nu.twice() + 1) / 2).rem_euclid(2) == 0 { q(1) } else { q(-1) }
}

#[test]
fn alpha_table() {
    assert_eq!((0..8).map(alpha).collect::<Vec<_>>(), vec![-1, 1, 1, -1, -1, 1, 1, -1]);
    for n in -6..6 {
        let s = if (n + 1) % 2 == 0 { 1 } else { -1 };
        assert_eq!(alpha(n + 1), s * alpha(n));
    }
}

#[test]
fn braced_examples() {
    let vac = FockVector::basis(MayaDiagram::vacuum());
    assert_eq!(pair_sym(&vac, &vac), q(1));
    assert_eq!(pair_braced(&vac, &vac).unwrap(), q(-1));
    let one = FockVector::basis(MayaDiagram::charged_vacuum(1));
    assert!(pair_braced(&one, &one).is_err());
    assert!(pair_braced_plus(&vac, &vac).is_err());
}

#[test]
fn symmetric_pairing_adjointness() {
    for p in -3..=3 {
        let us = basis_upto(p + 1, 5);
        let vs = basis_upto(p, 5);
        for nu in modes() {
            for u in &us {
                for v in &vs {
                    let lhs = pair_sym(&u.apply_fermion(Fermion::Psi, nu), v);
                    let rhs = pair_sym(u, &v.apply_fermion(Fermion::PsiBar, -nu));
                    assert_eq!(lhs, rhs);
                    let lhs = pair_sym(&v.apply_fermion(Fermion::PsiBar, nu), u);
                    let rhs = pair_sym(v, &u.apply_fermion(Fermion::Psi, -nu));
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }
}

#[test]
fn braced_pairing_adjointness() {
    for p in -3..=3 {
        let us = basis_upto(p + 1, 5);
        let vs = basis_upto(-p, 5);
        let ubar = basis_upto(p, 5);
        let vbar = basis_upto(-p - 1, 5);
        for nu in modes() {
            let s = mode_sign(nu);
            for u in &us {
                for v in &vs {
                    let lhs = pair_braced(&u.apply_fermion(Fermion::Psi, nu), v).unwrap();
                    let rhs = pair_braced(u, &v.apply_fermion(Fermion::Psi, -nu)).unwrap();
                    assert_eq!(lhs, &s * rhs, "p={p} nu={nu:?}");
                }
            }
            for u in &ubar {
                for v in &vbar {
                    let lhs = pair_braced(&u.apply_fermion(Fermion::PsiBar, nu), v).unwrap();
                    let rhs = pair_braced(u, &v.apply_fermion(Fermion::PsiBar, -nu)).unwrap();
                    assert_eq!(lhs, -&s * rhs, "p={p} nu={nu:?}");
                }
            }
        }
    }
}

#[test]
fn plus_pairing_adjointness() {
    for p in -3..=3 {
        let us = basis_upto(p + 1, 5);
        let vs = basis_upto(-p - 1, 5);
        let ubar = basis_upto(p, 5);
        let vbar = basis_upto(-p - 2, 5);
        for nu in modes() {
            let s = mode_sign(nu);
            for u in &us {
                for v in &vs {
                    let lhs = pair_braced_plus(&u.apply_fermion(Fermion::Psi, nu), v).unwrap();
                    let rhs = pair_braced_plus(u, &v.apply_fermion(Fermion::Psi, (-nu).add_int(-1))).unwrap();
                    assert_eq!(lhs, &s * rhs, "p={p} nu={nu:?}");
                }
            }
            for u in &ubar {
                for v in &vbar {
                    let lhs = pair_braced_plus(&u.apply_fermion(Fermion::PsiBar, nu), v).unwrap();
                    let rhs = pair_braced_plus(u, &v.apply_fermion(Fermion::PsiBar, (-nu).add_int(1))).unwrap();
                    assert_eq!(lhs, -&s * rhs, "p={p} nu={nu:?}");
                }
            }
        }
    }
}

#[test]
fn psibar_adjointness_carries_the_opposite_sign() {
    // u = |0>, v = |-1>, nu = -1/2: {psibar u | v} = alpha(1), {u | psibar v} = alpha(0)
    let nu = HalfInt::from_twice(-1).unwrap();
    let u = FockVector::basis(MayaDiagram::vacuum());
    let v = FockVector::basis(MayaDiagram::charged_vacuum(-1));
    assert_eq!(mode_sign(nu), q(1));
    assert_eq!(pair_braced(&u.apply_fermion(Fermion::PsiBar, nu), &v).unwrap(), q(1));
    assert_eq!(pair_braced(&u, &v.apply_fermion(Fermion::PsiBar, -nu)).unwrap(), q(-1));
}

#[test]
fn dual_basis_gram_is_identity() {
    for p in -3..=3 {
        for d in 0..=5 {
            let db = dual_basis_plus(p, d);
            assert_eq!(db.basis.len(), db.dual.len());
            for (i, m) in db.basis.iter().enumerate() {
                for (j, (a, n)) in db.dual.iter().enumerate() {
                    let v = FockVector::basis(n.clone()).scale(&q(*a));
                    let want = if i == j { q(1) } else { q(0) };
                    assert_eq!(pair_braced_plus(&FockVector::basis(m.clone()), &v).unwrap(), want);
                    assert_eq!(n.grading().charge, -p - 1);
                    assert_eq!(n.grading().degree, d);
                }
            }
            if d == 0 {
                assert_eq!(db.basis, vec![MayaDiagram::charged_vacuum(p)]);
                assert_eq!(db.dual, vec![(alpha(p), MayaDiagram::charged_vacuum(-p - 1))]);
            }
        }
    }
}

#[test]
fn plus_gram_is_a_signed_permutation() {
    for p in -2..=2 {
        for d in 0..=4 {
            let us = enumerate_basis(p, d);
            let vs = enumerate_basis(-p - 1, d);
            for u in &us {
                let row: Vec<Q> = vs
                    .iter()
                    .map(|v| pair_braced_plus(&FockVector::basis(u.clone()), &FockVector::basis(v.clone())).unwrap())
                    .filter(|x| !x.is_zero())
                    .collect();
                assert_eq!(row.len(), 1);
                assert!(row[0] == q(1) || row[0] == q(-1));
            }
        }
    }
}

fn nodal(coord: Option<LaurentSeries>) -> CurveSpec {
    let comp = Component { points: vec![MarkedPoint::finite(q(0)), MarkedPoint::infinity(), MarkedPoint::finite(q(1))] };
    let c = CurveSpec { components: vec![comp], glue: vec![(PointRef::new(0, 0), PointRef::new(0, 1))], outer: vec![PointRef::new(0, 2)] };
    c.with_coord(PointRef::new(0, 2), coord)
}

fn standard_setup() -> SewingSetup {
    let base: Rc<dyn Functional> = Rc::new(Covector(vec![MayaDiagram::charged_vacuum(-1)]));
    setup(&nodal(None), base, 24).unwrap()
}

#[test]
fn zero_vacuum_sews_to_zero() {
    let zero: Rc<dyn Functional> = Rc::new(Vanishing(3));
    let s = sew(zero, 4).unwrap();
    for u in window(1, 3, None) {
        assert!(s.coeffs.iter().all(|c| c.eval(&u).unwrap().is_zero()));
    }
    assert!(sew(Rc::new(Covector(vec![])), 1).is_err());
    assert_eq!(sew(Rc::new(Vanishing(2)), 0).unwrap().q_order(), 0);
}

#[test]
fn sectors_are_finite() {
    let s = standard_setup();
    let series = sew(s.phi.clone(), 7).unwrap();
    for c in &series.coeffs {
        for (p, d) in c.sectors() {
            assert!(d >= 0);
            assert_eq!(d + p * (p + 1) / 2, c.order());
        }
    }
    assert_eq!(series.coeffs[3].sectors(), vec![(-3, 0), (-2, 2), (-1, 3), (0, 3), (1, 2), (2, 0)]);
}

#[test]
fn sewing_field_matches_closed_form() {
    let s = standard_setup();
    // -t(t+1)/(2(t-1)) d/dt at t = 1 + xi
    let l = s.field.expand_at(&s.curve, PointRef::new(0, 2), 3).unwrap();
    assert_eq!(l.coeff(-1).unwrap(), q(-1));
    assert_eq!(l.coeff(0).unwrap(), frac(-3, 2));
    assert_eq!(l.coeff(1).unwrap(), frac(-1, 2));
    assert_eq!(l.coeff(2).unwrap(), q(0));
}

#[test]
fn q0_is_the_nodal_restriction_with_the_recorded_sign() {
    let s = standard_setup();
    let series = sew(s.phi.clone(), 1).unwrap();
    let (nv, _) = vacuum(&nodal(None), 5).unwrap();
    let res = NodeRestriction { inner: s.phi.clone() };
    let mut nonzero = 0;
    for u in window(1, 4, Some(0)) {
        let a = series.coeffs[0].eval(&u).unwrap();
        assert_eq!(a, q(SEWING_SIGN) * res.eval(&u).unwrap());
        assert_eq!(a, q(SEWING_SIGN) * nv.functional.eval(&u).unwrap());
        if !a.is_zero() {
            nonzero += 1;
        }
    }
    assert!(nonzero > 0);
}

#[test]
fn sewn_coefficients_are_not_vacuous() {
    let s = standard_setup();
    let series = sew(s.phi.clone(), 4).unwrap();
    let u = vec![MayaDiagram::from_twice(&[-1], &[-1]).unwrap()];
    let got: Vec<Q> = series.coeffs.iter().map(|c| c.eval(&u).unwrap()).collect();
    assert_eq!(got, vec![q(-1), q(-2), q(-18), q(-204)]);
}

fn random_node_data(rng: &mut StdRng, size: i64) -> BTreeMap<(i64, i64), Q> {
    let mut a = BTreeMap::new();
    for n in 0..size {
        for m in 0..size - n {
            let x: i64 = rng.gen_range(-3..=3);
            if x != 0 {
                a.insert((n, m), frac(x, rng.gen_range(1..=3)));
            }
        }
    }
    a
}

#[test]
fn sewn_series_satisfies_both_family_gauge_conditions() {
    let s = standard_setup();
    let k = 5;
    let series = sew(s.phi.clone(), k).unwrap();
    let mut rng = StdRng::seed_from_u64(7);
    for _ in 0..3 {
        let a = random_node_data(&mut rng, k as i64);
        let taus = family_form_lift(&s.curve, s.plus, s.minus, &s.outer, &a, k as i64, k as i64 + 2).unwrap();
        let r = family_gauge_residual(&series, &s.curve, &s.outer, &taus, 3, 0).unwrap();
        assert!(r.iter().all(Zero::is_zero), "{r:?}");
        let fs = family_function_lift(&s.curve, s.plus, s.minus, &s.outer, &a, k as i64, k as i64 + 2).unwrap();
        let r = family_gauge_residual(&series, &s.curve, &s.outer, &fs, 3, 0).unwrap();
        assert!(r.iter().all(Zero::is_zero), "{r:?}");
    }
}

#[test]
fn perturbed_series_fails_the_gauge_condition() {
    let s = standard_setup();
    let series = sew(s.phi.clone(), 3).unwrap();
    let mut a = BTreeMap::new();
    a.insert((0, 0), q(1));
    a.insert((1, 0), q(2));
    let taus = family_form_lift(&s.curve, s.plus, s.minus, &s.outer, &a, 3, 5).unwrap();
    // the q^1 coefficient replaced by a second copy of the q^0 one
    let bad = SewnSeries {
        coeffs: vec![
            SewnCoefficient::new(s.phi.clone(), 0).unwrap(),
            SewnCoefficient::new(s.phi.clone(), 0).unwrap(),
            SewnCoefficient::new(s.phi.clone(), 2).unwrap(),
        ],
    };
    assert!(family_gauge_residual(&series, &s.curve, &s.outer, &taus, 3, 0).unwrap().iter().all(Zero::is_zero));
    assert!(!family_gauge_residual(&bad, &s.curve, &s.outer, &taus, 3, 0).unwrap().iter().all(Zero::is_zero));
}

struct Vanishing(usize);

impl Functional for Vanishing {
    fn arity(&self) -> usize {
        self.0
    }
    fn eval(&self, _: &[MayaDiagram]) -> bcghost::Result<Q> {
        Ok(Q::zero())
    }
}

fn curved_coordinate() -> LaurentSeries {
    LaurentSeries::poly(1, &[q(1), frac(1, 3), frac(-1, 5)])
}

#[test]
fn ward_identity_fixes_the_central_constant() {
    let comp = Component { points: vec![MarkedPoint::finite(q(0)).with_coord(curved_coordinate())] };
    let c = CurveSpec { components: vec![comp], glue: vec![], outer: vec![PointRef::new(0, 0)] };
    let (v, _) = vacuum(&c, 9).unwrap();
    let fields = [RatFunc::pole(&q(0), 1), RatFunc::constant(q(1)), RatFunc::t_pow(1), RatFunc::t_pow(2)];
    let mut saw_central = false;
    for f in fields {
        let l = GlobalObject { kind: Kind::VectorField, parts: vec![f] };
        let b = b_term(&c, &l, &c.outer).unwrap();
        saw_central |= !b.is_zero();
        let t = TField::new(l.expand_at(&c, c.outer[0], 12).unwrap());
        for u in window(1, 5, Some(-1)) {
            let lhs = v.functional.pair(&apply_rho_basis(0, &t, &u).unwrap()).unwrap();
            let rhs = central_constant() * &b * v.functional.eval(&u).unwrap();
            assert_eq!(lhs, rhs);
        }
    }
    assert!(saw_central);
}

use bcghost::poly::RatFunc;

#[test]
fn fuchsian_residual_vanishes() {
    let c = nodal(Some(curved_coordinate()));
    let (bv, _) = vacuum(&c.normalization(), 12).unwrap();
    let s = setup(&c, Rc::new(bv.functional.clone()), 24).unwrap();
    let series = sew(s.phi.clone(), 4).unwrap();
    let b = b_term(&s.curve, &s.field, &s.outer).unwrap();
    assert_eq!(b, frac(28, 15));
    let rep = fuchsian_check(&series, &s.curve, &s.outer, &s.field, &b, 3, 0).unwrap();
    assert!(rep.residual.iter().all(Zero::is_zero), "{rep:?}");
    assert!(rep.size.iter().all(|x| !x.is_zero()));
    assert!(rep.divisible_by_q);
    for u in window(1, 3, Some(0)) {
        assert_eq!(q_derivative(&series, &u).unwrap(), weighted_series(&series, &u).unwrap());
    }
    let bad = SewnSeries {
        coeffs: vec![SewnCoefficient::new(s.phi.clone(), 0).unwrap(), SewnCoefficient::new(s.phi.clone(), 0).unwrap()],
    };
    let rep = fuchsian_check(&bad, &s.curve, &s.outer, &s.field, &b, 3, 0).unwrap();
    assert!(!rep.residual[1].is_zero());
}
