use std::collections::BTreeMap;

use bcghost::curve::*;
use bcghost::laurent::LaurentSeries;
use bcghost::poly::{Point, Poly, RatFunc};
use bcghost::rational::{frac, q, Q};
use num_traits::Zero;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn p1(points: &[Option<i64>]) -> CurveSpec {
    CurveSpec::marked_p1(
        points
            .iter()
            .map(|p| match p {
                Some(a) => MarkedPoint::finite(q(*a)),
                None => MarkedPoint::infinity(),
            })
            .collect(),
    )
}

fn two_lines() -> CurveSpec {
    let comp = || Component { points: vec![MarkedPoint::finite(q(0)), MarkedPoint::finite(q(1))] };
    CurveSpec {
        components: vec![comp(), comp()],
        glue: vec![(PointRef::new(0, 0), PointRef::new(1, 0))],
        outer: vec![PointRef::new(0, 1), PointRef::new(1, 1)],
    }
}

fn nodal_line() -> CurveSpec {
    let comp = Component { points: vec![MarkedPoint::finite(q(0)), MarkedPoint::infinity(), MarkedPoint::finite(q(1))] };
    CurveSpec { components: vec![comp], glue: vec![(PointRef::new(0, 0), PointRef::new(0, 1))], outer: vec![PointRef::new(0, 2)] }
}

/// Sum of residues over every marked point and infinity.
fn residue_sum(c: &CurveSpec, w: &GlobalObject) -> Q {
    let mut total = Q::zero();
    for (ci, comp) in c.components.iter().enumerate() {
        let mut seen_inf = false;
        for (pi, p) in comp.points.iter().enumerate() {
            seen_inf |= p.at == Point::Infinity;
            total += w.expand_at(c, PointRef::new(ci, pi), 2).unwrap().residue().unwrap();
        }
        if !seen_inf {
            total += w.part(ci).expand_chart(&Point::Infinity, 2).unwrap().residue().unwrap();
        }
    }
    total
}

#[test]
fn functions_on_the_one_pointed_line() {
    let c = p1(&[Some(0)]);
    let b = function_basis(&c, &[3]).unwrap();
    assert_eq!(b.len(), 4);
    for f in &b {
        assert!(f.expand_at(&c, PointRef::new(0, 0), 1).unwrap().ord() >= -3);
        let inf = f.part(0).expand_chart(&Point::Infinity, 1).unwrap();
        assert!(inf.is_zero() || inf.ord() >= 0);
    }
    // every 1/z^m, m <= 3, is in the span: the expansion matrix has full rank 4
    let mut rows: Vec<Vec<Q>> = b.iter().map(|f| { let s = f.expand_at(&c, PointRef::new(0, 0), 1).unwrap(); (-3..=0).map(|k| s.coeff_or_zero(k)).collect() }).collect();
    assert_eq!(rank(&mut rows), 4);
}

fn rank(m: &mut [Vec<Q>]) -> usize {
    let mut r = 0;
    let cols = m.first().map_or(0, |x| x.len());
    for col in 0..cols {
        let Some(piv) = (r..m.len()).find(|&i| !m[i][col].is_zero()) else { continue };
        m.swap(r, piv);
        for i in 0..m.len() {
            if i != r && !m[i][col].is_zero() {
                let f = &m[i][col] / &m[r][col];
                let pivot = m[r].clone();
                for (x, y) in m[i].iter_mut().zip(&pivot) {
                    *x -= &f * y;
                }
            }
        }
        r += 1;
    }
    r
}

#[test]
fn small_bases() {
    assert_eq!(function_basis(&p1(&[Some(0), None]), &[1, 1]).unwrap().len(), 3);
    assert_eq!(function_basis(&two_lines(), &[2, 2]).unwrap().len(), 5);
    assert_eq!(form_basis(&p1(&[Some(0)]), &[4]).unwrap().len(), 3);
    let c = p1(&[Some(0), None]);
    let w = form_basis(&c, &[1, 1]).unwrap();
    assert_eq!(w.len(), 1);
    let r0 = w[0].expand_at(&c, PointRef::new(0, 0), 1).unwrap().residue().unwrap();
    let r1 = w[0].expand_at(&c, PointRef::new(0, 1), 1).unwrap().residue().unwrap();
    assert!(!r0.is_zero());
    assert_eq!(r0, -r1);
}

#[test]
fn dualizing_form_on_the_nodal_line() {
    let c = nodal_line();
    let w = form_basis(&c, &[0]).unwrap();
    assert_eq!(w.len(), 1);
    let s = w[0].expand_at(&c, PointRef::new(0, 0), 3).unwrap();
    let scale = s.coeff(-1).unwrap();
    // a multiple of dt/t
    let dt_t = RationalObject::new(Kind::Form, RatFunc::pole(&q(0), 1));
    for p in [Point::Finite(q(0)), Point::Infinity, Point::Finite(q(1))] {
        let want = dt_t.expand_chart(&p, 6).unwrap().scale(&scale);
        assert_eq!(w[0].part(0).expand_chart(&p, 6).unwrap(), want);
    }
    let r_inf = w[0].expand_at(&c, PointRef::new(0, 1), 1).unwrap().residue().unwrap();
    assert_eq!(r_inf, -scale);
}

#[test]
fn glued_functions_agree_at_the_node() {
    let c = two_lines();
    for f in function_basis(&c, &[3, 2]).unwrap() {
        let a = f.expand_at(&c, PointRef::new(0, 0), 1).unwrap().coeff_or_zero(0);
        let b = f.expand_at(&c, PointRef::new(1, 0), 1).unwrap().coeff_or_zero(0);
        assert_eq!(a, b);
    }
}

#[test]
fn expansion_examples() {
    let c = p1(&[Some(0)]);
    let f = GlobalObject { kind: Kind::Function, parts: vec![RatFunc::pole(&q(0), 1)] };
    assert_eq!(f.expand_at(&c, PointRef::new(0, 0), 6).unwrap(), LaurentSeries::poly(-1, &[q(1)]).truncate(6));
    let dt_t = RationalObject::new(Kind::Form, RatFunc::pole(&q(0), 1));
    assert_eq!(dt_t.expand_chart(&Point::Infinity, 6).unwrap(), LaurentSeries::poly(-1, &[q(-1)]).truncate(6));
    let g = RationalObject::new(Kind::Function, RatFunc::pole(&q(1), 1));
    let s = g.expand_chart(&Point::Finite(q(0)), 8).unwrap();
    for k in 0..8 {
        assert_eq!(s.coeff(k).unwrap(), q(-1));
    }
    // d/dt at infinity is -x^2 d/dx
    let v = RationalObject::new(Kind::VectorField, RatFunc::constant(q(1)));
    assert_eq!(v.expand_chart(&Point::Infinity, 6).unwrap(), LaurentSeries::poly(2, &[q(-1)]).truncate(6));
}

#[test]
fn expansion_in_a_reparametrized_coordinate() {
    // x = g(xi) = xi + xi^2: dx/x^2 = (1 + 2 xi) / (xi + xi^2)^2 dxi
    let g = LaurentSeries::poly(1, &[q(1), q(1)]);
    let m = MarkedPoint::finite(q(0)).with_coord(g.clone());
    let w = RationalObject::new(Kind::Form, RatFunc::pole(&q(0), 2));
    let got = w.expand_at(&m, 6).unwrap();
    let want = LaurentSeries::poly(0, &[q(1), q(2)]).div(&g.mul(&g), 6).unwrap();
    assert_eq!(got, want.truncate(6));
}

#[test]
fn sewing_field_jets() {
    let c = p1(&[Some(0), None, Some(1)]);
    let (plus, minus) = (PointRef::new(0, 0), PointRef::new(0, 1));
    let (l, adjusted) = sewing_vector_field(&c, plus, minus, &[PointRef::new(0, 2)], 12).unwrap();
    for p in [plus, minus] {
        let s = l.expand_at(&adjusted, p, 12).unwrap();
        assert_eq!(s, LaurentSeries::poly(1, &[frac(1, 2)]).truncate(12));
    }
    // the field is -(1/2) t (t + 1)/(t - 1) d/dt up to the normalization at the outer point
    let f = &l.parts[0];
    for t in [q(2), q(3), frac(1, 2)] {
        let want = frac(-1, 2) * &t * (&t + q(1)) / (&t - q(1));
        assert_eq!(f.eval(&t).unwrap(), want);
    }
    assert!(sewing_vector_field(&c, plus, minus, &[], 8).is_err());
}

#[test]
fn form_lifts_match_their_prescribed_jets() {
    let c = p1(&[Some(0), None, Some(1)]);
    let (plus, minus, outer) = (PointRef::new(0, 0), PointRef::new(0, 1), [PointRef::new(0, 2)]);
    let zero = family_form_lift(&c, plus, minus, &outer, &BTreeMap::new(), 3, 5).unwrap();
    assert!(zero.iter().all(|w| w.is_zero()));
    let a: BTreeMap<(i64, i64), Q> = [((0, 0), q(1))].into_iter().collect();
    let w = family_form_lift(&c, plus, minus, &outer, &a, 1, 5).unwrap();
    assert_eq!(w[0].expand_at(&c, plus, 5).unwrap().truncate(5), LaurentSeries::poly(-1, &[q(-1)]).truncate(5));
    assert_eq!(w[0].expand_at(&c, minus, 5).unwrap().truncate(5), LaurentSeries::poly(-1, &[q(1)]).truncate(5));
    let mut rng = StdRng::seed_from_u64(41);
    let mut a = BTreeMap::new();
    for n in 0..4 {
        for m in 0..6 {
            a.insert((n, m), q(rng.gen_range(-3..=3)));
        }
    }
    let lifts = family_form_lift(&c, plus, minus, &outer, &a, 3, 4).unwrap();
    for (n, w) in lifts.iter().enumerate() {
        let n = n as i64;
        let zp = w.expand_at(&c, plus, 4).unwrap();
        let wm = w.expand_at(&c, minus, 4).unwrap();
        for e in -(n + 1)..4 {
            assert_eq!(zp.coeff_or_zero(e), -a.get(&(e + n + 1, n)).cloned().unwrap_or_default());
            assert_eq!(wm.coeff_or_zero(e), a.get(&(n, e + n + 1)).cloned().unwrap_or_default());
        }
    }
    let lifts = family_function_lift(&c, plus, minus, &outer, &a, 3, 4).unwrap();
    for (k, f) in lifts.iter().enumerate() {
        let k = k as i64;
        let zp = f.expand_at(&c, plus, 4).unwrap();
        for e in -k..4 {
            assert_eq!(zp.coeff_or_zero(e), a.get(&(e + k, k)).cloned().unwrap_or_default());
        }
    }
}

#[test]
fn invalid_curves_are_rejected() {
    let mut c = p1(&[Some(0), Some(0)]);
    assert!(c.validate().is_err());
    c = p1(&[Some(0)]);
    c.outer.clear();
    assert!(c.validate().is_err());
    let lonely = CurveSpec {
        components: vec![Component { points: vec![MarkedPoint::finite(q(0))] }, Component { points: vec![MarkedPoint::finite(q(0))] }],
        glue: vec![],
        outer: vec![PointRef::new(0, 0)],
    };
    assert!(lonely.validate().is_err());
    assert!(p1(&[Some(0)]).with_coord(PointRef::new(0, 0), Some(LaurentSeries::poly(2, &[q(1)]))).validate().is_err());
    assert_eq!(nodal_line().charge_total(), 0);
    assert_eq!(two_lines().charge_total(), -1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn riemann_roch_on_the_line(orders in prop::collection::vec(0u32..4, 1..4), inf in any::<bool>()) {
        let pts: Vec<Option<i64>> = (0..orders.len()).map(|i| if inf && i == 0 { None } else { Some(i as i64) }).collect();
        let c = p1(&pts);
        let deg: u32 = orders.iter().sum();
        prop_assert_eq!(function_basis(&c, &orders).unwrap().len() as u32, deg + 1);
        let forms = form_basis(&c, &orders).unwrap();
        prop_assert_eq!(forms.len() as u32, deg.saturating_sub(1));
        for w in &forms {
            prop_assert_eq!(residue_sum(&c, w), Q::zero());
        }
    }

    #[test]
    fn expansion_commutes_with_products(a in prop::collection::vec(-3i64..=3, 1..4), b in prop::collection::vec(-3i64..=3, 1..4), pole in 1u32..3) {
        let f = RatFunc::poly(Poly::new(a.iter().map(|x| q(*x)).collect()));
        let g = RatFunc::poly(Poly::new(b.iter().map(|x| q(*x)).collect())).mul(&RatFunc::pole(&q(2), pole));
        let m = MarkedPoint::finite(q(0)).with_coord(LaurentSeries::poly(1, &[q(1), q(-1)]));
        let fg = RationalObject::new(Kind::Function, f.mul(&g)).expand_at(&m, 6).unwrap();
        let ef = RationalObject::new(Kind::Function, f).expand_at(&m, 6).unwrap();
        let eg = RationalObject::new(Kind::Function, g).expand_at(&m, 6).unwrap();
        prop_assert_eq!(fg, ef.mul(&eg).truncate(6));
    }
}
