use super::*;
use crate::ideal::{cohen_nuclear_norm, dplus_sequence, lambda_norm, CnSide, NormParams};
use crate::rng;
use crate::seq::{positive_strong_norm, positive_weak_norm};
use proptest::prelude::*;
use std::vec;
use std::vec::Vec;

fn exp(r: f64) -> Exponent {
    Exponent::new(r).unwrap()
}

fn space(r: f64, n: usize) -> LatticeSpace {
    LatticeSpace::unweighted(n, exp(r)).unwrap()
}

fn tensor(p: f64, x: LatticeSpace, rows: &[&[f64]]) -> TensorElement {
    let rows: Vec<Vec<f64>> = rows.iter().map(|r| r.to_vec()).collect();
    TensorElement::new(exp(p), VectorSequence::new(x, &rows).unwrap()).unwrap()
}

fn cfg() -> SearchConfig {
    SearchConfig::default()
}

fn rel_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-12)
}

/// A random weighted lattice, exponent from {1, 1.5, 2, 3, inf}.
fn random_space(r: &mut rand_chacha::ChaCha8Rng, n: usize) -> LatticeSpace {
    let e = [1.0, 1.5, 2.0, 3.0, f64::INFINITY][rng::index(r, 5)];
    let w = (0..n).map(|_| rng::uniform(r, 0.5, 2.0)).collect();
    LatticeSpace::new(exp(e), w).unwrap()
}

fn random_tensor(seed: u64, nonneg: bool) -> TensorElement {
    let mut r = rng::stream(seed, 0);
    let n = 1 + rng::index(&mut r, 3);
    let m = 1 + rng::index(&mut r, 3);
    let x = random_space(&mut r, n);
    let p = [1.0, 1.5, 2.0, 3.0][rng::index(&mut r, 4)];
    let lo = if nonneg { 0.0 } else { -1.0 };
    let data = (0..m * n).map(|_| rng::uniform(&mut r, lo, 1.0)).collect();
    TensorElement::new(exp(p), VectorSequence::from_flat(x, m, data).unwrap()).unwrap()
}

/// Membership in the injective cone straight from its definition, tested
/// on unit vectors and random positive functionals.
fn injective_by_sampling(u: &TensorElement, seed: u64) -> bool {
    let m = u.len();
    let mut r = rng::stream(seed, 1);
    let mut ws: Vec<Vec<f64>> = (0..m)
        .map(|i| {
            let mut e = vec![0.0; m];
            e[i] = 1.0;
            e
        })
        .collect();
    ws.extend((0..200).map(|_| (0..m).map(|_| rng::unit(&mut r)).collect()));
    ws.iter().all(|w| u.apply(w).unwrap().iter().all(|&y| y >= 0.0))
}

#[test]
fn injective_cone_is_the_nonnegative_arrays() {
    for seed in 0..300 {
        let u = random_tensor(seed, seed % 3 == 0);
        assert_eq!(injective_cone_member(&u), injective_by_sampling(&u, seed), "seed {seed}");
    }
    let x = space(2.0, 2);
    assert!(injective_cone_member(&tensor(2.0, x.clone(), &[&[1.0, 0.0], &[0.0, 1.0]])));
    assert!(injective_cone_member(&tensor(2.0, x.clone(), &[&[0.0, 0.0]])));
    let u = tensor(2.0, x, &[&[1.0, 0.0], &[0.0, -1.0]]);
    assert!(!injective_cone_member(&u));
    assert!(u.apply(&[0.0, 1.0]).unwrap()[1] < 0.0);
}

#[test]
fn dominating_tensors_are_the_arrays_above_the_modulus() {
    let mut r = rng::stream(11, 0);
    for seed in 0..300 {
        let u = random_tensor(seed, false);
        let (m, n) = (u.len(), u.space().dim());
        // V near |U| so that both outcomes occur
        let v: Vec<f64> = u.rows().data().iter().map(|a| a.abs() + rng::uniform(&mut r, -0.2, 0.5)).collect();
        let plus: Vec<f64> = v.iter().zip(u.rows().data()).map(|(a, b)| a + b).collect();
        let minus: Vec<f64> = v.iter().zip(u.rows().data()).map(|(a, b)| a - b).collect();
        let wrap = |d: Vec<f64>| {
            TensorElement::new(u.p(), VectorSequence::from_flat(u.space().clone(), m, d).unwrap()).unwrap()
        };
        let sampled = injective_by_sampling(&wrap(plus), seed) && injective_by_sampling(&wrap(minus), seed);
        let dominates = (0..m * n).all(|k| v[k] >= u.rows().data()[k].abs());
        assert_eq!(sampled, dominates, "seed {seed}");
    }
}

#[test]
fn positive_forms_are_the_nonnegative_arrays() {
    let x = space(2.0, 2);
    let mut r = rng::stream(5, 0);
    for _ in 0..300 {
        let data: Vec<f64> = (0..4).map(|_| rng::uniform(&mut r, -0.3, 1.0)).collect();
        let nonneg = data.iter().all(|&v| v >= 0.0);
        let mut positive = true;
        for k in 0..200 {
            let (a, y): (Vec<f64>, Vec<f64>) = if k < 4 {
                let mut a = vec![0.0; 2];
                let mut y = vec![0.0; 2];
                a[k / 2] = 1.0;
                y[k % 2] = 1.0;
                (a, y)
            } else {
                ((0..2).map(|_| rng::unit(&mut r)).collect(), (0..2).map(|_| rng::unit(&mut r)).collect())
            };
            let v: f64 = (0..2).map(|i| a[i] * (data[2 * i] * y[0] + data[2 * i + 1] * y[1])).sum();
            positive &= v >= 0.0;
        }
        assert_eq!(positive, nonneg);
        match PositiveBilinearForm::new(exp(2.0), x.clone(), 2, data) {
            Ok(_) => assert!(nonneg),
            Err(e) => assert!(matches!(e, Error::NegativeEntry { .. })),
        }
    }
}

#[test]
fn wittstock_objective_grows_with_the_dominating_array() {
    let mut r = rng::stream(9, 0);
    for seed in 0..40 {
        let u = random_tensor(seed, false);
        let bigger: Vec<f64> = u.rows().data().iter().map(|a| a.abs() + rng::unit(&mut r)).collect();
        let v = TensorElement::new(u.p(), VectorSequence::from_flat(u.space().clone(), u.len(), bigger).unwrap())
            .unwrap();
        let (a, b) = (wittstock_norm(&u, &cfg()).value, wittstock_norm(&v, &cfg()).value);
        assert!(a <= b * (1.0 + 1e-9), "seed {seed}: {a} > {b}");
    }
}

#[test]
fn identity_examples() {
    let u = tensor(1.0, space(f64::INFINITY, 2), &[&[1.0, 0.0], &[0.0, 1.0]]);
    let w = wittstock_norm(&u, &cfg());
    assert!(w.exact);
    assert!((w.value - 1.0).abs() < 1e-12);
    let f = fremlin_norm(&u, &cfg()).unwrap();
    assert!(f.exact);
    assert!((f.value - 2.0).abs() < 1e-12);

    let u = tensor(2.0, space(2.0, 2), &[&[1.0, 0.0], &[0.0, 1.0]]);
    let g = grothendieck_norms(&u, &cfg()).unwrap();
    assert!((g.eps.value - 1.0).abs() < 1e-9);
    assert!((g.delta.value - 2f64.sqrt()).abs() < 1e-12);
    // the trace norm of the identity
    assert!(g.pi.value <= 2.0 + 1e-9 && g.pi.value > 2.0 * (1.0 - 2e-2));
}

#[test]
fn zero_tensor_has_zero_norms() {
    for p in [1.0, 2.0, 3.0] {
        let u = tensor(p, space(2.0, 2), &[&[0.0, 0.0], &[0.0, 0.0]]);
        assert_eq!(wittstock_norm(&u, &cfg()).value, 0.0);
        assert_eq!(fremlin_norm(&u, &cfg()).unwrap().value, 0.0);
        let g = grothendieck_norms(&u, &cfg()).unwrap();
        assert_eq!((g.eps.value, g.pi.value, g.delta.value), (0.0, 0.0, 0.0));
    }
}

#[test]
fn rank_one_tensors_are_cross_norms() {
    let mut r = rng::stream(21, 0);
    for k in 0..30 {
        let n = 1 + rng::index(&mut r, 3);
        let m = 1 + rng::index(&mut r, 3);
        let x_space = random_space(&mut r, n);
        let p = exp([1.0, 1.5, 2.0, 3.0][rng::index(&mut r, 4)]);
        // positive factors, so that the lattice norms see the same tensor
        let a: Vec<f64> = (0..m).map(|_| rng::unit(&mut r)).collect();
        let x: Vec<f64> = (0..n).map(|_| rng::unit(&mut r)).collect();
        let want = lp(&a, p.value()) * x_space.norm(&x);
        let u = TensorElement::rank_one(p, &a, x_space, &x).unwrap();
        for kind in TensorNormKind::ALL {
            let got = tensor_norm(&u, kind, &cfg()).unwrap().value;
            assert!(rel_gap(got, want) < 2e-2 && got <= want * (1.0 + 1e-9), "case {k}, {kind}: {got} vs {want}");
        }
    }
}

#[test]
fn wittstock_is_the_positive_weak_norm() {
    for seed in 0..60 {
        let u = random_tensor(seed, false);
        let w = wittstock_norm(&u, &cfg());
        let pw = positive_weak_norm(u.rows(), u.p(), &cfg());
        let tol = if w.exact && pw.exact { 1e-6 } else { 2e-2 };
        assert!(rel_gap(w.value, pw.value) <= tol, "seed {seed}: {} vs {}", w.value, pw.value);
    }
}

#[test]
fn fremlin_is_the_positive_strong_norm_on_positive_tensors() {
    for seed in 0..40 {
        let u = random_tensor(1000 + seed, true);
        let f = fremlin_norm(&u, &cfg()).unwrap();
        let ps = positive_strong_norm(u.rows(), u.p(), &cfg()).unwrap();
        let tol = if f.exact && ps.exact { 1e-6 } else { 2e-2 };
        assert!(rel_gap(f.value, ps.value) <= tol, "seed {seed}: {} vs {}", f.value, ps.value);
    }
}

#[test]
fn fremlin_certificate_is_a_unit_positive_form() {
    let u = tensor(2.0, space(3.0, 2), &[&[1.0, 0.5], &[0.2, 1.0], &[0.0, 0.3]]);
    let f = fremlin_norm(&u, &cfg()).unwrap();
    let form = PositiveBilinearForm::new(u.p(), u.space().clone(), 3, f.certificate.clone()).unwrap();
    let nu = form.norm(&SearchConfig { starts: 256, ..cfg() }).value;
    assert!(nu <= 1.0 + 1e-6, "{nu}");
    assert!((form.pair(&u).unwrap() - f.value).abs() < 1e-9);
}

#[test]
fn fremlin_closed_forms_for_signed_tensors() {
    let x = space(1.0, 2);
    let u = tensor(1.0, x.clone(), &[&[1.0, -2.0], &[-1.0, 0.5]]);
    // positive parts: 1 + 0.5, negative parts: 2 + 1
    assert!((fremlin_norm(&u, &cfg()).unwrap().value - 3.0).abs() < 1e-12);
    let u = tensor(f64::INFINITY, x, &[&[1.0, -2.0], &[-1.0, 0.5]]);
    // sup of positive parts (1, 0.5), of negative parts (1, 2)
    assert!((fremlin_norm(&u, &cfg()).unwrap().value - 3.0).abs() < 1e-12);
}

#[test]
fn fremlin_does_not_depend_on_the_left_basis_for_p_2() {
    let x = space(3.0, 2);
    let u = tensor(2.0, x.clone(), &[&[1.0, 0.2], &[0.4, 0.9]]);
    let want = fremlin_norm(&u, &cfg()).unwrap().value;
    let theta: f64 = 0.7;
    let (c, s) = (theta.cos(), theta.sin());
    // u = sum_k f_k (x) y_k with f_k the columns of a rotation Q and
    // y_k the rows of Q^T U; expanding back gives the same array
    let q = [[c, -s], [s, c]];
    let data = u.rows().data();
    let y: Vec<[f64; 2]> = (0..2)
        .map(|k| {
            let mut row = [0.0; 2];
            for (j, v) in row.iter_mut().enumerate() {
                *v = (0..2).map(|i| q[i][k] * data[2 * i + j]).sum();
            }
            row
        })
        .collect();
    let mut back = vec![0.0; 4];
    for k in 0..2 {
        for i in 0..2 {
            for j in 0..2 {
                back[2 * i + j] += q[i][k] * y[k][j];
            }
        }
    }
    let v = TensorElement::new(exp(2.0), VectorSequence::from_flat(x, 2, back).unwrap()).unwrap();
    let got = fremlin_norm(&v, &cfg()).unwrap().value;
    assert!(rel_gap(got, want) < 1e-6, "{got} vs {want}");
}

#[test]
fn wittstock_never_exceeds_fremlin_on_positive_tensors() {
    for seed in 0..30 {
        let u = random_tensor(2000 + seed, true);
        let w = wittstock_norm(&u, &cfg()).value;
        let f = fremlin_norm(&u, &cfg()).unwrap().value;
        assert!(w <= f * (1.0 + 2e-2), "seed {seed}: {w} > {f}");
    }
}

fn random_operator(seed: u64) -> LinearOperator {
    let mut r = rng::stream(seed, 3);
    let (ne, nf) = (1 + rng::index(&mut r, 2), 1 + rng::index(&mut r, 2));
    let e = random_space(&mut r, ne);
    let f = random_space(&mut r, nf);
    let rows: Vec<Vec<f64>> = (0..nf).map(|_| (0..ne).map(|_| rng::uniform(&mut r, -1.0, 1.0)).collect()).collect();
    LinearOperator::new(&rows, e, f).unwrap()
}

#[test]
fn corollaries_match_the_ideal_estimators() {
    use TensorNormKind::*;
    let small = SearchConfig { starts: 16, ..cfg() };
    for seed in 0..3 {
        let t = random_operator(seed);
        let (p, q) = (exp(2.0), exp(1.5));
        let params = NormParams::new(p, q).unwrap();
        let run = |a, b| induced_tensor_constant(&t, TensorNorm::new(a, q), TensorNorm::new(b, p), 2, &small).unwrap();
        let checks = [
            (run(Wittstock, Delta), lambda_norm(&t, params, 2, &small).unwrap()),
            (run(Delta, Fremlin), dplus_sequence(&t, params, 2, &small).unwrap()),
            (run(Wittstock, GrothPi), cohen_nuclear_norm(&t, CnSide::Left, params, 2, &small).unwrap()),
            (run(GrothEps, Fremlin), cohen_nuclear_norm(&t, CnSide::Right, params, 2, &small).unwrap()),
            (run(Wittstock, Fremlin), cohen_nuclear_norm(&t, CnSide::Both, params, 2, &small).unwrap()),
        ];
        for (k, (a, b)) in checks.iter().enumerate() {
            assert!((a.value - b.value).abs() <= 1e-9, "seed {seed}, check {k}: {} vs {}", a.value, b.value);
        }
    }
}

#[test]
fn identity_induces_one() {
    let x = space(2.0, 2);
    let t = LinearOperator::new(&[vec![1.0, 0.0], vec![0.0, 1.0]], x.clone(), x).unwrap();
    for kind in [TensorNormKind::Wittstock, TensorNormKind::GrothEps, TensorNormKind::Delta] {
        let n = TensorNorm::new(kind, exp(2.0));
        let v = induced_tensor_constant(&t, n, n, 2, &cfg()).unwrap().value;
        assert!((v - 1.0).abs() < 1e-6, "{kind}: {v}");
    }
}

#[test]
fn projective_sources_are_rejected() {
    let x = space(2.0, 1);
    let t = LinearOperator::new(&[vec![1.0]], x.clone(), x).unwrap();
    let two = exp(2.0);
    for kind in [TensorNormKind::Fremlin, TensorNormKind::GrothPi] {
        let err = induced_tensor_constant(&t, TensorNorm::new(kind, two), TensorNorm::new(kind, two), 1, &cfg());
        assert!(matches!(err, Err(Error::UnsupportedPair { .. })));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn wittstock_is_a_lattice_norm(seed in 0u64..10_000, t in 0.1f64..3.0) {
        let u = random_tensor(seed, false);
        let w = wittstock_norm(&u, &cfg()).value;
        let scaled: Vec<f64> = u.rows().data().iter().map(|v| -t * v).collect();
        let v = TensorElement::new(u.p(), VectorSequence::from_flat(u.space().clone(), u.len(), scaled).unwrap()).unwrap();
        let wv = wittstock_norm(&v, &cfg()).value;
        prop_assert!(rel_gap(wv, t * w) < 2e-2);
        let abs = TensorElement::new(u.p(), u.rows().abs()).unwrap();
        prop_assert!(rel_gap(wittstock_norm(&abs, &cfg()).value, w) < 1e-12);
    }
}
