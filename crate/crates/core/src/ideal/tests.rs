use super::*;
use crate::seq::strong_norm;
use proptest::prelude::*;
use std::vec;
use std::vec::Vec;

fn exp(r: f64) -> Exponent {
    Exponent::new(r).unwrap()
}

fn space(r: f64, n: usize) -> LatticeSpace {
    LatticeSpace::unweighted(n, exp(r)).unwrap()
}

fn op(rows: &[&[f64]], e: LatticeSpace, f: LatticeSpace) -> LinearOperator {
    let rows: Vec<Vec<f64>> = rows.iter().map(|r| r.to_vec()).collect();
    LinearOperator::new(&rows, e, f).unwrap()
}

fn params(p: f64, q: f64) -> NormParams {
    NormParams::new(exp(p), exp(q)).unwrap()
}

fn cfg() -> SearchConfig {
    SearchConfig::default()
}

/// Brute-force operator norm for a domain with polyhedral ball: the maximum
/// over sign vectors (l_inf) or unit vectors (l_1).
fn brute_operator_norm(t: &LinearOperator) -> f64 {
    let n = t.domain().dim();
    let mut best: f64 = 0.0;
    if t.domain().exponent().is_one() {
        for j in 0..n {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            best = best.max(t.codomain().norm(&t.apply(&e)));
        }
    } else {
        for mask in 0..(1u32 << n) {
            let x: Vec<f64> = (0..n).map(|j| if mask >> j & 1 == 1 { -1.0 } else { 1.0 }).collect();
            best = best.max(t.codomain().norm(&t.apply(&x)));
        }
    }
    best
}

/// Lambda_{1,1} of `T` on unweighted `l_inf^n` with `m` witnesses: the best
/// split of the coordinates into `m` signed groups, summing `||T sigma_J||`.
fn brute_lambda_11_on_l_inf(t: &LinearOperator, m: usize) -> f64 {
    let n = t.domain().dim();
    let mut best: f64 = 0.0;
    let groups = (m as u32).pow(n as u32);
    for code in 0..groups {
        for signs in 0..(1u32 << n) {
            let mut xs = vec![vec![0.0; n]; m];
            let mut c = code;
            for j in 0..n {
                let g = (c % m as u32) as usize;
                c /= m as u32;
                xs[g][j] = if signs >> j & 1 == 1 { -1.0 } else { 1.0 };
            }
            let total: f64 = xs.iter().map(|x| t.codomain().norm(&t.apply(x))).sum();
            best = best.max(total);
        }
    }
    best
}

#[test]
fn identity_on_two_dimensional_l_inf() {
    let id = op(&[&[1.0, 0.0], &[0.0, 1.0]], space(f64::INFINITY, 2), space(f64::INFINITY, 2));
    let l = lambda_norm(&id, params(1.0, 1.0), 2, &cfg()).unwrap();
    assert!((l.value - 2.0).abs() < 1e-9, "{}", l.value);
    let cn = cohen_nuclear_norm(&id, CnSide::Both, params(1.0, 1.0), 2, &cfg()).unwrap();
    assert!((cn.value - 2.0).abs() < 1e-9, "{}", cn.value);
}

#[test]
fn scalar_operators() {
    let t = op(&[&[-2.5]], space(2.0, 1), space(2.0, 1));
    for kind in IdealKind::ALL {
        for (p, q) in [(1.0, 1.0), (2.0, 1.5), (3.0, 1.0)] {
            let v = ideal_norm(kind, &t, params(p, q), 3, &cfg()).unwrap().value;
            assert!((v - 2.5).abs() < 1e-6, "{kind} p={p} q={q}: {v}");
        }
    }
}

#[test]
fn lambda_11_on_l_inf_matches_partition_oracle() {
    let t = op(
        &[&[1.0, -0.5, 0.3], &[0.2, 0.8, -1.0]],
        space(f64::INFINITY, 3),
        space(2.0, 2),
    );
    for m in 1..=3 {
        let want = brute_lambda_11_on_l_inf(&t, m);
        let got = lambda_norm(&t, params(1.0, 1.0), m, &cfg()).unwrap().value;
        assert!(got <= want * (1.0 + 1e-9), "m={m}: {got} > {want}");
        assert!(got >= want * (1.0 - 1e-6), "m={m}: {got} < {want}");
    }
}

#[test]
fn dplus_11_is_the_operator_norm() {
    let t = op(&[&[1.0, -2.0], &[0.5, 1.0], &[0.0, 0.7]], space(1.0, 2), space(f64::INFINITY, 3));
    let want = brute_operator_norm(&t);
    for m in 1..=3 {
        let got = dplus_norm(&t, params(1.0, 1.0), m, &cfg()).unwrap().value;
        assert!((got - want).abs() < 1e-6 * want, "m={m}: {got} vs {want}");
    }
    let on = operator_norm(&t, &cfg());
    assert!(on.exact);
    assert_eq!(on.value, want);
    let lam = lambda_norm(&t, params(f64::INFINITY, 2.0), 3, &cfg()).unwrap();
    assert_eq!(lam.value, want);
}

#[test]
fn induced_constant_reuses_the_estimators() {
    let t = op(&[&[1.0, 0.4], &[-0.3, 0.9]], space(2.0, 2), space(1.0, 2));
    let pr = params(2.0, 1.5);
    let (a, b) = IdealKind::Lambda.pair(pr);
    assert_eq!(
        induced_map_constant(&t, a, b, 2, &cfg()).unwrap(),
        lambda_norm(&t, pr, 2, &cfg()).unwrap()
    );
    let (a, b) = IdealKind::DPlus.pair(pr);
    assert_eq!(
        induced_map_constant(&t, a, b, 2, &cfg()).unwrap(),
        dplus_sequence(&t, pr, 2, &cfg()).unwrap()
    );
    let bad = induced_map_constant(&t, SeqNorm::new(SeqNormKind::Cohen, exp(2.0)), b, 2, &cfg());
    assert!(matches!(bad, Err(Error::UnsupportedPair { from: "cohen", .. })));
}

#[test]
fn parameter_checks() {
    assert!(NormParams::new(exp(1.5), exp(2.0)).is_err());
    let t = op(&[&[1.0]], space(2.0, 1), space(2.0, 1));
    assert!(lambda_norm(&t, params(2.0, 1.0), 0, &cfg()).is_err());
    assert!(cohen_nuclear_norm(&t, CnSide::Left, params(f64::INFINITY, 2.0), 2, &cfg()).is_err());
    let bad = [vec![1.0, 2.0]];
    assert!(LinearOperator::new(&bad, space(2.0, 1), space(2.0, 1)).is_err());
}

#[test]
fn adjoint_swaps_and_transposes() {
    let e = LatticeSpace::new(exp(3.0), vec![1.0, 2.0]).unwrap();
    let f = space(1.0, 3);
    let t = op(&[&[1.0, 2.0], &[3.0, 4.0], &[5.0, 6.0]], e.clone(), f.clone());
    let a = t.adjoint();
    assert_eq!(a.matrix(), &[1.0, 3.0, 5.0, 2.0, 4.0, 6.0]);
    assert_eq!(a.domain(), &f.dual());
    assert_eq!(a.codomain(), &e.dual());
    assert_eq!(adjoint(&a), t);
}

#[test]
fn certificates_reproduce_the_values() {
    let t = op(&[&[1.0, -0.5], &[0.7, 0.4]], space(2.0, 2), space(f64::INFINITY, 2));
    let pr = params(2.0, 1.5);
    for kind in [IdealKind::Lambda, IdealKind::DPlus, IdealKind::Cn(CnSide::Right)] {
        let est = ideal_norm(kind, &t, pr, 2, &cfg()).unwrap();
        let (a, b) = kind.pair(pr);
        let w = VectorSequence::from_flat(t.domain().clone(), 2, est.certificate.clone()).unwrap();
        let r = witness_ratio(&t, a, b, &w, &cfg()).unwrap();
        assert!(r >= est.value * (1.0 - 1e-6), "{kind}: witness gives {r}, estimate {}", est.value);
    }
}

#[test]
fn strong_source_is_bounded_by_operator_norm() {
    // strong_q -> strong_p with p >= q is exactly ||T||
    let t = op(&[&[2.0, -1.0], &[0.5, 1.0]], space(f64::INFINITY, 2), space(1.0, 2));
    let s2 = SeqNorm::new(SeqNormKind::Strong, exp(2.0));
    let s1 = SeqNorm::new(SeqNormKind::Strong, exp(1.0));
    let got = induced_map_constant(&t, s1, s2, 3, &cfg()).unwrap().value;
    let want = brute_operator_norm(&t);
    assert!((got - want).abs() < 1e-9 * want, "{got} vs {want}");
    let _ = strong_norm;
}

fn any_space() -> impl Strategy<Value = LatticeSpace> {
    (1usize..4, prop_oneof![Just(1.0), Just(2.0), Just(f64::INFINITY)]).prop_map(|(n, r)| space(r, n))
}

fn any_operator() -> impl Strategy<Value = LinearOperator> {
    (any_space(), any_space()).prop_flat_map(|(e, f)| {
        let (n, k) = (e.dim(), f.dim());
        proptest::collection::vec(-1.0f64..1.0, n * k).prop_map(move |d| {
            let rows: Vec<Vec<f64>> = d.chunks(n).map(|r| r.to_vec()).collect();
            LinearOperator::new(&rows, e.clone(), f.clone()).unwrap()
        })
    })
}

fn any_params() -> impl Strategy<Value = NormParams> {
    prop_oneof![
        Just((1.0, 1.0)),
        Just((2.0, 1.0)),
        Just((2.0, 2.0)),
        Just((3.0, 1.5)),
        Just((1.5, 1.5))
    ]
    .prop_map(|(p, q)| params(p, q))
}

fn fast() -> SearchConfig {
    SearchConfig { starts: 16, ..cfg() }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-12)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn lambda_and_dplus_are_adjoint(t in any_operator(), pr in any_params()) {
        let a = lambda_norm(&t, pr, 2, &fast()).unwrap().value;
        let b = dplus_norm(&t.adjoint(), pr.swapped_conjugates(), 2, &fast()).unwrap().value;
        prop_assert!(rel(a, b) <= 5e-2, "{} vs {}", a, b);
    }

    #[test]
    fn bidual_gives_identical_estimates(t in any_operator(), pr in any_params()) {
        let tt = t.adjoint().adjoint();
        for kind in [IdealKind::Lambda, IdealKind::DPlus, IdealKind::Majorizing] {
            let a = ideal_norm(kind, &t, pr, 2, &fast()).unwrap();
            let b = ideal_norm(kind, &tt, pr, 2, &fast()).unwrap();
            prop_assert_eq!(a.value.to_bits(), b.value.to_bits());
        }
    }

    #[test]
    fn estimates_grow_with_m(t in any_operator(), pr in any_params()) {
        let a = lambda_norm(&t, pr, 1, &fast()).unwrap().value;
        let b = lambda_norm(&t, pr, 3, &fast()).unwrap().value;
        prop_assert!(b >= a * (1.0 - 1e-2));
    }

    #[test]
    fn majorizing_matches_dplus(t in any_operator(), pr in any_params()) {
        let a = majorizing_norm(&t, pr, 2, &fast()).unwrap().value;
        let b = dplus_norm(&t, pr, 2, &fast()).unwrap().value;
        prop_assert!(rel(a, b) <= 5e-2, "{} vs {}", a, b);
    }

    #[test]
    fn ideal_property(t in any_operator(), pr in any_params(), scale in 0.2f64..1.0) {
        // compose with contractions (multiples of the identity) on both sides
        let n = t.domain().dim();
        let rows: Vec<Vec<f64>> = t.matrix().chunks(n).map(|r| r.iter().map(|v| v * scale * 0.9).collect()).collect();
        let st = LinearOperator::new(&rows, t.domain().clone(), t.codomain().clone()).unwrap();
        let a = lambda_norm(&t, pr, 2, &fast()).unwrap().value;
        let b = lambda_norm(&st, pr, 2, &fast()).unwrap().value;
        prop_assert!(b <= a * (1.0 + 5e-2) + 1e-12);
    }
}
