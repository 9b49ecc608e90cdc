use super::*;
use proptest::prelude::*;
use std::vec;
use std::vec::Vec;

fn exp(r: f64) -> Exponent {
    Exponent::new(r).unwrap()
}

fn space(r: f64, w: &[f64]) -> LatticeSpace {
    LatticeSpace::new(exp(r), w.to_vec()).unwrap()
}

fn seq(r: f64, w: &[f64], rows: &[&[f64]]) -> VectorSequence {
    let rows: Vec<Vec<f64>> = rows.iter().map(|r| r.to_vec()).collect();
    VectorSequence::new(space(r, w), &rows).unwrap()
}

fn cfg() -> SearchConfig {
    SearchConfig::default()
}

/// Singular values of an `m x 2` array from the eigenvalues of `S^T S`.
fn singular_values_m_by_2(data: &[f64]) -> (f64, f64) {
    let (mut a, mut b, mut c) = (0.0, 0.0, 0.0);
    for row in data.chunks(2) {
        a += row[0] * row[0];
        b += row[0] * row[1];
        c += row[1] * row[1];
    }
    let tr = a + c;
    let det = a * c - b * b;
    let disc = (tr * tr / 4.0 - det).max(0.0).sqrt();
    ((tr / 2.0 + disc).sqrt(), (tr / 2.0 - disc).max(0.0).sqrt())
}

#[test]
fn scalar_sequences() {
    let s = seq(2.0, &[1.0], &[&[1.0], &[-2.0], &[3.0]]);
    let two = exp(2.0);
    assert_eq!(strong_norm(&s, two).value, 14f64.sqrt());
    assert!((weak_norm(&s, two, &cfg()).value - 14f64.sqrt()).abs() < 1e-12);
    assert!((positive_weak_norm(&s, two, &cfg()).value - 14f64.sqrt()).abs() < 1e-12);
    let ones = seq(2.0, &[1.0], &[&[1.0], &[1.0], &[1.0]]);
    let c = cohen_norm(&ones, two, &cfg()).unwrap();
    assert!((c.value - 3f64.sqrt()).abs() < 1e-7, "{}", c.value);
}

#[test]
fn unit_vectors_in_l_inf() {
    let s = seq(f64::INFINITY, &[1.0, 1.0], &[&[1.0, 0.0], &[0.0, 1.0]]);
    let two = exp(2.0);
    let w = weak_norm(&s, two, &cfg());
    assert!(w.exact);
    assert_eq!(w.value, 1.0);
    // sup over the positive l_1 ball of (x1, x2) in l_1 is 1
    let pw = positive_weak_norm(&s, exp(1.0), &cfg());
    assert_eq!(pw.value, 1.0);
    assert_eq!(positive_weak_norm(&s, two, &cfg()).value, 1.0);
    let ps = positive_strong_norm(&s, two, &cfg()).unwrap();
    assert!((ps.value - 2f64.sqrt()).abs() < 1e-7, "{}", ps.value);
    assert!(!ps.exact);
    assert!(ps.certificate.iter().all(|&a| a >= 0.0));
}

#[test]
fn one_collapse_is_exact() {
    let s = seq(2.0, &[1.0, 3.0], &[&[1.0, -1.0], &[0.5, 2.0]]);
    let one = exp(1.0);
    let st = strong_norm(&s, one).value;
    for est in [cohen_norm(&s, one, &cfg()).unwrap(), positive_strong_norm(&s, one, &cfg()).unwrap()] {
        assert!(est.exact);
        assert_eq!(est.method, Method::ClosedForm);
        assert_eq!(est.value, st);
    }
}

#[test]
fn infinite_p_is_rejected() {
    let s = seq(2.0, &[1.0], &[&[1.0]]);
    assert!(matches!(
        cohen_norm(&s, Exponent::INFINITY, &cfg()),
        Err(Error::InvalidParameter { name: "p", .. })
    ));
    assert!(positive_strong_norm(&s, Exponent::INFINITY, &cfg()).is_err());
}

#[test]
fn empty_sequence_has_zero_norms() {
    let s = VectorSequence::new(space(2.0, &[1.0, 1.0]), &[]).unwrap();
    for kind in SeqNormKind::ALL {
        let v = seq_norm(&s, SeqNorm::new(kind, exp(2.0)), &cfg()).unwrap().value;
        assert_eq!(v, 0.0, "{kind}");
    }
}

#[test]
fn tail_profile_of_three_scalars() {
    let s = seq(1.0, &[1.0], &[&[1.0], &[1.0], &[0.0]]);
    let t = tail_profile(&s, SeqNorm::new(SeqNormKind::Strong, exp(1.0)), &cfg()).unwrap();
    assert_eq!(t, vec![2.0, 1.0, 0.0, 0.0]);
    let s = seq(2.0, &[1.0], &[&[0.0], &[0.0], &[1.0]]);
    let t = tail_profile(&s, SeqNorm::new(SeqNormKind::Weak, exp(2.0)), &cfg()).unwrap();
    assert_eq!(t, vec![1.0, 1.0, 1.0, 0.0]);
}

#[test]
fn duality_pairing_checks_spaces() {
    let s = seq(3.0, &[2.0, 1.0], &[&[1.0, 2.0]]);
    let d = VectorSequence::new(s.space().dual(), &[vec![0.5, -1.0]]).unwrap();
    assert_eq!(duality_pairing(&s, &d).unwrap(), -1.5);
    assert_eq!(duality_pairing(&s, &s), Err(Error::SpaceMismatch));
}

#[test]
fn l1_and_l_inf_closed_forms_for_positive_strong() {
    // in l_1(w) the norm splits over columns: sum_j w_j ||S_{., j}||_p
    let s = seq(1.0, &[1.0, 2.0], &[&[1.0, -2.0], &[3.0, 0.5], &[0.0, 1.0]]);
    let p = exp(3.0);
    let want = (1f64 + 27.0).powf(1.0 / 3.0) + 2.0 * (8f64 + 0.125 + 1.0).powf(1.0 / 3.0);
    let got = positive_strong_norm(&s, p, &cfg()).unwrap().value;
    assert!((got - want).abs() < 1e-7 * want, "{got} vs {want}");
    let got = cohen_norm(&s, p, &cfg()).unwrap().value;
    assert!((got - want).abs() < 1e-7 * want, "{got} vs {want}");
    // in unweighted l_inf it is the strong norm
    let s = seq(f64::INFINITY, &[1.0, 1.0, 1.0], &[&[1.0, -2.0, 0.0], &[0.3, 0.5, -0.4]]);
    let want = strong_norm(&s, exp(1.5)).value;
    let got = positive_strong_norm(&s, exp(1.5), &cfg()).unwrap().value;
    assert!((got - want).abs() < 1e-7 * want, "{got} vs {want}");
}

#[test]
fn spectral_and_nuclear_norms_in_l2() {
    let rows: [&[f64]; 3] = [&[1.0, -2.0], &[0.5, 0.3], &[-1.0, 1.5]];
    let s = seq(2.0, &[1.0, 1.0], &rows);
    let (s1, s2) = singular_values_m_by_2(s.data());
    let two = exp(2.0);
    let w = weak_norm(&s, two, &cfg());
    assert!(!w.exact);
    assert!((w.value - s1).abs() < 1e-9, "{} vs {s1}", w.value);
    let c = cohen_norm(&s, two, &cfg()).unwrap();
    assert!(c.value <= s1 + s2 + 1e-9);
    assert!((c.value - (s1 + s2)).abs() < 1e-6, "{} vs {}", c.value, s1 + s2);
    let abs = s.abs();
    let (a1, _) = singular_values_m_by_2(abs.data());
    let pw = positive_weak_norm(&s, two, &cfg());
    assert!((pw.value - a1).abs() < 1e-9, "{} vs {a1}", pw.value);
}

#[test]
fn rank_one_positive_strong_in_l2() {
    // |S| = u v^T gives ||u||_2 ||v||_2
    let u = [1.0, 2.0, 0.5];
    let v = [3.0, 1.0];
    let rows: Vec<Vec<f64>> = u.iter().map(|a| v.iter().map(|b| a * b).collect()).collect();
    let s = VectorSequence::new(space(2.0, &[1.0, 1.0]), &rows).unwrap();
    let want = 5.25f64.sqrt() * 10f64.sqrt();
    let got = positive_strong_norm(&s, exp(2.0), &cfg()).unwrap().value;
    assert!((got - want).abs() < 1e-6 * want, "{got} vs {want}");
}

#[test]
fn certificates_attain_the_values() {
    let s = seq(3.0, &[1.0, 0.5], &[&[1.0, -1.0], &[0.2, 0.7]]);
    let p = exp(2.5);
    let dual = s.space().dual();
    let c = cohen_norm(&s, p, &cfg()).unwrap();
    assert!((dot(&c.certificate, s.data()) - c.value).abs() < 1e-12);
    let a = VectorSequence::from_flat(dual.clone(), 2, c.certificate.clone()).unwrap();
    let big = SearchConfig { starts: 256, ..cfg() };
    assert!(weak_norm(&a, p.conjugate(), &big).value <= 1.0 + 1e-9);
    let ps = positive_strong_norm(&s, p, &cfg()).unwrap();
    let a = VectorSequence::from_flat(dual, 2, ps.certificate.clone()).unwrap();
    assert!(positive_weak_norm(&a, p.conjugate(), &big).value <= 1.0 + 1e-9);
    assert!((dot(&ps.certificate, s.abs().data()) - ps.value).abs() < 1e-12);
}

#[test]
fn sampler_agrees_with_the_direct_estimate() {
    let s = seq(2.0, &[1.0, 1.0], &[&[1.0, -0.5], &[0.3, 2.0], &[-1.0, 1.0]]);
    let p = exp(2.0);
    let a = positive_strong_norm(&s, p, &cfg()).unwrap().value;
    let b = dual_witness_sampler(&s, p, 10_000, &cfg()).unwrap().value;
    assert!(b <= a * (1.0 + 1e-6), "{b} > {a}");
    assert!((a - b).abs() <= 2e-2 * a, "{a} vs {b}");
}

fn any_space() -> impl Strategy<Value = LatticeSpace> {
    (1usize..4, prop_oneof![Just(1.0), Just(2.0), Just(f64::INFINITY), Just(3.0)])
        .prop_flat_map(|(n, r)| proptest::collection::vec(0.5f64..2.0, n).prop_map(move |w| space(r, &w)))
}

fn any_sequence() -> impl Strategy<Value = VectorSequence> {
    (any_space(), 1usize..4).prop_flat_map(|(x, m)| {
        let n = x.dim();
        proptest::collection::vec(-2.0f64..2.0, m * n)
            .prop_map(move |d| VectorSequence::from_flat(x.clone(), m, d).unwrap())
    })
}

fn any_q() -> impl Strategy<Value = Exponent> {
    prop_oneof![Just(1.0), Just(1.5), Just(2.0), Just(3.0)].prop_map(exp)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn norm_chain(s in any_sequence(), q in any_q()) {
        // weak <= pos_weak <= strong and strong <= pos_strong <= cohen
        let scale = strong_norm(&s, q).value.max(1e-12);
        let w = weak_norm(&s, q, &cfg()).value;
        let pw = positive_weak_norm(&s, q, &cfg()).value;
        prop_assert!(w <= pw + 1e-9 * scale);
        prop_assert!(pw <= scale * (1.0 + 1e-9));
        let ps = positive_strong_norm(&s, q, &cfg()).unwrap().value;
        let c = cohen_norm(&s, q, &cfg()).unwrap().value;
        prop_assert!(scale <= ps * (1.0 + 2e-2));
        prop_assert!(ps <= c + 2e-2 * scale);
    }

    #[test]
    fn positive_sequences_collapse(s in any_sequence(), q in any_q()) {
        let s = s.abs();
        let w = weak_norm(&s, q, &cfg());
        let pw = positive_weak_norm(&s, q, &cfg());
        let tol = if w.exact && pw.exact { 1e-12 } else { 1e-6 };
        prop_assert!((w.value - pw.value).abs() <= tol * pw.value.max(1.0));
    }

    #[test]
    fn homogeneity_and_lattice_monotonicity(s in any_sequence(), q in any_q(), t in 0.1f64..3.0) {
        let scaled = VectorSequence::from_flat(
            s.space().clone(), s.len(), s.data().iter().map(|v| -t * v).collect()).unwrap();
        let a = positive_weak_norm(&s, q, &cfg()).value;
        let b = positive_weak_norm(&scaled, q, &cfg()).value;
        prop_assert!((b - t * a).abs() <= 1e-6 * b.max(1e-9));
        // shrinking every entry in modulus cannot raise a lattice norm
        let small = VectorSequence::from_flat(
            s.space().clone(), s.len(), s.data().iter().map(|v| 0.5 * v).collect()).unwrap();
        let ps = positive_strong_norm(&s, q, &cfg()).unwrap().value;
        let ps_small = positive_strong_norm(&small, q, &cfg()).unwrap().value;
        prop_assert!(ps_small <= 0.5 * ps * (1.0 + 2e-2) + 1e-12);
    }

    #[test]
    fn hoelder_between_dual_norms(s in any_sequence(), q in prop_oneof![Just(1.5), Just(2.0), Just(3.0)].prop_map(exp), seed in 0u64..100) {
        let mut r = rng::stream(seed, 0);
        let d: Vec<f64> = (0..s.data().len()).map(|_| rng::unit(&mut r)).collect();
        let d = VectorSequence::from_flat(s.space().dual(), s.len(), d).unwrap();
        let abs = s.abs();
        let lhs = duality_pairing(&abs, &d).unwrap();
        let big = SearchConfig { starts: 128, ..cfg() };
        let rhs = positive_weak_norm(&d, q.conjugate(), &big).value
            * positive_strong_norm(&s, q, &cfg()).unwrap().value;
        prop_assert!(lhs <= rhs * (1.0 + 2e-2) + 1e-12);
    }
}

#[test]
fn positive_strong_can_fall_below_cohen_on_positive_sequences() {
    // S = ((1, 1), (1, 0)) >= 0 in l_2^2 at p = 2. The Cohen norm is the
    // nuclear norm sqrt(5); the best dual array is the polar factor, which
    // has negative entries, and nonnegative arrays reach only 2.
    use crate::oracles::{bruteforce_seq_norm, GridSpec};
    let two = exp(2.0);
    let s = seq(2.0, &[1.0, 1.0], &[&[1.0, 1.0], &[1.0, 0.0]]);
    let sqrt5 = 5f64.sqrt();
    let (s1, s2) = singular_values_m_by_2(s.data());
    assert!((s1 + s2 - sqrt5).abs() < 1e-12);
    assert!((cohen_norm(&s, two, &cfg()).unwrap().value - sqrt5).abs() < 1e-6);

    let ps = positive_strong_norm(&s, two, &cfg()).unwrap().value;
    assert!((ps - 2.0).abs() < 1e-3, "{ps}");
    let grid = GridSpec::new(0.02, 10_000_000).unwrap();
    let o = bruteforce_seq_norm(SeqNorm::new(SeqNormKind::PosStrong, two), &s, &grid).unwrap();
    let (lo, hi) = (o.estimate.value, o.estimate.value + o.gap);
    assert!(lo <= 2.0 + 1e-9 && 2.0 <= hi && hi < sqrt5, "[{lo}, {hi}]");
}
