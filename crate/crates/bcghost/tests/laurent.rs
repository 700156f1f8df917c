use bcghost::laurent::{BiDiffLocal, LaurentSeries};
use bcghost::rational::{frac, q, Q};
use bcghost::Error;
use num_traits::Zero;
use proptest::prelude::*;

fn series(low: i64, c: &[i64], trunc: i64) -> LaurentSeries {
    LaurentSeries::new(c.iter().enumerate().map(|(i, v)| (low + i as i64, q(*v))), trunc)
}

fn unipotent(tail: &[i64]) -> LaurentSeries {
    let mut c = vec![1];
    c.extend_from_slice(tail);
    series(1, &c, 60)
}

fn catalan(n: u64) -> i64 {
    // C_n = binom(2n, n) / (n + 1)
    let mut b: u128 = 1;
    for k in 0..n as u128 {
        b = b * (2 * n as u128 - k) / (k + 1);
    }
    (b / (n as u128 + 1)) as i64
}

#[test]
fn residues() {
    assert_eq!(LaurentSeries::poly(-1, &[q(1)]).residue().unwrap(), q(1));
    assert_eq!(LaurentSeries::poly(3, &[q(1)]).residue().unwrap(), q(0));
    assert!(matches!(series(0, &[1], -1).residue(), Err(Error::Truncation { .. })));
}

#[test]
fn composition_examples() {
    let f = series(-2, &[1, 3, -1, 2], 7);
    assert_eq!(f.compose(&LaurentSeries::x(), 7).unwrap(), f);
    let sq = LaurentSeries::poly(2, &[q(1)]);
    let h = LaurentSeries::poly(1, &[q(1), q(1)]);
    assert_eq!(sq.compose(&h, 20).unwrap(), LaurentSeries::poly(2, &[q(1), q(2), q(1)]).truncate(20));
}

#[test]
fn compositional_inverse_examples() {
    let a = frac(3, 5);
    let inv = LaurentSeries::x().scale(&a).comp_inverse(10).unwrap();
    assert_eq!(inv, LaurentSeries::x().scale(&a.recip()).truncate(10));
    // (xi + xi^2)^{-1} = sum (-1)^{n-1} C_{n-1} xi^n
    let inv = LaurentSeries::poly(1, &[q(1), q(1)]).comp_inverse(12).unwrap();
    for n in 1..12 {
        let s = if n % 2 == 1 { 1 } else { -1 };
        assert_eq!(inv.coeff(n).unwrap(), q(s * catalan((n - 1) as u64)), "n={n}");
    }
}

#[test]
fn exponential_of_a_derivation() {
    let f = series(0, &[2, -1, 5], 9);
    assert_eq!(f.exp_derivation(&LaurentSeries::zero(9), 9).unwrap(), f);
    let e = LaurentSeries::x().exp_derivation(&LaurentSeries::poly(2, &[q(1)]), 15).unwrap();
    assert_eq!(e.trunc(), 15);
    for k in 1..15 {
        assert_eq!(e.coeff(k).unwrap(), q(1));
    }
    assert!(LaurentSeries::x().exp_derivation(&LaurentSeries::x(), 8).is_err());
}

#[test]
fn log_of_xi_plus_xi_cubed() {
    let h = LaurentSeries::poly(1, &[q(1), q(0), q(1)]);
    let l = h.log_coordinate(6).unwrap();
    assert!(l.ord() >= 2);
    assert_eq!(LaurentSeries::x().exp_derivation(&l, 6).unwrap(), h.truncate(6));
}

#[test]
fn schwarzian_examples() {
    assert!(LaurentSeries::x().scale(&q(7)).schwarzian(10).unwrap().is_zero());
    // -6 / (1 + 2 xi)^2 = -6 sum (n+1)(-2)^n xi^n
    let s = LaurentSeries::poly(1, &[q(1), q(1)]).schwarzian(10).unwrap();
    let mut p = 1i64;
    for n in 0..10 {
        assert_eq!(s.coeff(n).unwrap(), q(-6 * (n + 1) * p));
        p *= -2;
    }
    // Moebius: xi / (1 - 3 xi)
    let m = LaurentSeries::new((1..40).map(|k| (k, q(3i64.pow((k - 1) as u32)))), 40);
    assert!(m.schwarzian(20).unwrap().is_zero());
}

#[test]
fn projective_connection_examples() {
    assert!(BiDiffLocal::standard_zero(6).projective_connection(6).unwrap().is_zero());
    let mut b = BiDiffLocal::standard_zero(6);
    b.regular.insert((0, 0), q(1));
    let s = b.projective_connection(6).unwrap();
    assert_eq!(s.coeff(0).unwrap(), q(6));
    assert!(s.truncate(6).sub(&LaurentSeries::constant(q(6))).truncate(6).is_zero());
    assert!(b.projective_connection(7).is_err());
}

#[test]
fn standard_bidifferential_connection_is_the_schwarzian() {
    for g in [unipotent(&[1, 0, -2]), series(1, &[2, 3, 0, 1, -1], 60)] {
        let b = BiDiffLocal::pullback_standard(&g, 8).unwrap();
        let s = b.projective_connection(8).unwrap();
        assert_eq!(s, g.schwarzian(8).unwrap());
    }
}

#[test]
fn residue_of_a_function_times_form_sums_to_zero_on_the_line() {
    // f = 1/(t (t - 1)) dt: residues -1 at 0 and 1 at 1; at infinity t = 1/x, dt = -dx/x^2
    let at0 = LaurentSeries::new((-1..10).map(|k| (k, q(-1))), 10);
    let at1 = LaurentSeries::new((-1..10).map(|k| (k, if k % 2 == 0 { q(-1) } else { q(1) })), 10);
    let at_inf = LaurentSeries::zero(10);
    let total = at0.residue().unwrap() + at1.residue().unwrap() + at_inf.residue().unwrap();
    assert_eq!(total, q(0));
}

#[test]
fn truncation_is_never_fabricated() {
    let a = series(0, &[1, 1], 3);
    let b = LaurentSeries::poly(-1, &[q(1)]);
    let p = a.mul(&b);
    assert_eq!(p.trunc(), 2);
    assert!(matches!(p.coeff(2), Err(Error::Truncation { .. })));
    let inv = series(1, &[1, 1], 6).inverse(20).unwrap();
    assert_eq!(inv.trunc(), 4);
}

fn arb_series() -> impl Strategy<Value = LaurentSeries> {
    (-3i64..2, prop::collection::vec(-4i64..=4, 1..7)).prop_map(|(low, c)| series(low, &c, 8))
}

fn arb_unipotent() -> impl Strategy<Value = LaurentSeries> {
    prop::collection::vec(-3i64..=3, 0..5).prop_map(|t| unipotent(&t))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ring_laws(a in arb_series(), b in arb_series(), c in arb_series()) {
        let t = 3;
        prop_assert_eq!(a.mul(&b).mul(&c).truncate(t), a.mul(&b.mul(&c)).truncate(t));
        prop_assert_eq!(a.mul(&b.add(&c)).truncate(t), a.mul(&b).add(&a.mul(&c)).truncate(t));
        prop_assert_eq!(a.mul(&b), b.mul(&a));
    }

    #[test]
    fn derivatives_have_no_residue(a in arb_series()) {
        prop_assert_eq!(a.derivative().residue().unwrap(), Q::zero());
    }

    #[test]
    fn composition_is_associative(f in arb_unipotent(), g in arb_unipotent(), h in arb_unipotent()) {
        let n = 10;
        let lhs = f.compose(&g, n).unwrap().compose(&h, n).unwrap();
        let rhs = f.compose(&g.compose(&h, n).unwrap(), n).unwrap();
        prop_assert_eq!(lhs.truncate(n), rhs.truncate(n));
    }

    #[test]
    fn inverse_round_trips(h in arb_unipotent(), a in 1i64..4) {
        let h = h.scale(&q(a));
        let inv = h.comp_inverse(10).unwrap();
        prop_assert_eq!(h.compose(&inv, 10).unwrap(), LaurentSeries::x().truncate(10));
        prop_assert_eq!(inv.compose(&h, 10).unwrap(), LaurentSeries::x().truncate(10));
    }

    #[test]
    fn exponential_is_multiplicative(l in prop::collection::vec(-2i64..=2, 1..4), f in arb_series(), g in arb_series()) {
        let l = series(2, &l, 40);
        let n = 4;
        let lhs = f.mul(&g).exp_derivation(&l, n).unwrap();
        let rhs = f.exp_derivation(&l, n + 6).unwrap().mul(&g.exp_derivation(&l, n + 6).unwrap());
        prop_assert_eq!(lhs.truncate(n), rhs.truncate(n));
    }

    #[test]
    fn exp_log_round_trip(h in arb_unipotent()) {
        let l = h.log_coordinate(9).unwrap();
        prop_assert_eq!(LaurentSeries::x().exp_derivation(&l, 9).unwrap(), h.truncate(9));
    }

    #[test]
    fn schwarzian_cocycle(f in arb_unipotent(), g in arb_unipotent()) {
        let n = 6;
        let lhs = f.compose(&g, n + 4).unwrap().schwarzian(n).unwrap();
        let gp = g.derivative();
        let rhs = f.schwarzian(n + 4).unwrap().compose(&g, n + 4).unwrap().mul(&gp).mul(&gp).add(&g.schwarzian(n).unwrap());
        prop_assert_eq!(lhs.truncate(n), rhs.truncate(n));
    }
}
