//! Verification suites over seeded random instances.
//!
//! Instance `i` of a suite is drawn from its own random stream and searched
//! with its own derived seed, so a row depends only on `(suite, seed, i,
//! config)` and not on the instance count.

use latsum_core::oracles::{bruteforce_ideal_norm, bruteforce_seq_norm, grid_max, GridSpec};
use latsum_core::rng::{self, Rng};
use latsum_core::{
    cohen_norm, cohen_nuclear_norm, dplus_norm, dplus_sequence, dual_witness_sampler, fremlin_norm,
    ideal::ideal_norm, induced_tensor_constant, lambda_norm, majorizing_norm, positive_strong_norm,
    positive_weak_norm, seq::seq_norm, strong_norm, tensor_norm, weak_norm, wittstock_norm, CnSide, Exponent,
    IdealKind, LatticeSpace, LinearOperator, NormEstimate, NormParams, SearchConfig, SeqNorm, SeqNormKind,
    TensorElement, TensorNorm, TensorNormKind, VectorSequence,
};
use serde::Serialize;

use crate::input::{ExpValue, SpaceFile};
use crate::report::{short_hash, Row};
use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, clap::ValueEnum)]
pub enum Suite {
    #[value(name = "i0")]
    I0,
    #[value(name = "i1")]
    I1,
    #[value(name = "ip0")]
    Ip0,
    #[value(name = "ip1")]
    Ip1,
    #[value(name = "dual-norming")]
    DualNorming,
    #[value(name = "majorizing-eq")]
    MajorizingEq,
    #[value(name = "adjoint-lambda-dplus")]
    AdjointLambdaDplus,
    #[value(name = "cn-adjoint")]
    CnAdjoint,
    #[value(name = "tensor-p1")]
    TensorP1,
    #[value(name = "tensor-p2")]
    TensorP2,
    #[value(name = "corollaries")]
    Corollaries,
    #[value(name = "l1-collapse")]
    L1Collapse,
    #[value(name = "oracle-coherence")]
    OracleCoherence,
}

/// Relative tolerance for equalities decided by exact vertex enumeration.
pub const EXACT_TOL: f64 = 1e-6;
/// Relative tolerance for equalities between two search lower bounds.
pub const SEARCH_TOL: f64 = 2e-2;
/// Relative tolerance for the operator ideal dualities.
pub const IDEAL_TOL: f64 = 5e-2;
/// Starts used by the operator ideal suites when the configuration asks for
/// fewer.
pub const IDEAL_MIN_STARTS: usize = 256;
/// Witness length of the operator ideal suites.
pub const IDEAL_M: usize = 3;
/// Dual arrays drawn by the `dual-norming` sampler.
pub const SAMPLER_DRAWS: usize = 10_000;

const PARAMS: [(f64, f64); 5] = [(1.0, 1.0), (2.0, 1.0), (2.0, 2.0), (3.0, 1.5), (1.5, 1.5)];
// the Cohen nuclear norms need p < inf on both sides of the adjoint
const CN_PARAMS: [(f64, f64); 5] = [(2.0, 1.5), (2.0, 2.0), (3.0, 1.5), (1.5, 1.5), (3.0, 2.0)];
const LATTICE_R: [f64; 3] = [1.0, 2.0, f64::INFINITY];
const WIDE_R: [f64; 5] = [1.0, 1.5, 2.0, 3.0, f64::INFINITY];

impl Suite {
    pub const ALL: [Suite; 13] = [
        Suite::I0,
        Suite::I1,
        Suite::Ip0,
        Suite::Ip1,
        Suite::DualNorming,
        Suite::MajorizingEq,
        Suite::AdjointLambdaDplus,
        Suite::CnAdjoint,
        Suite::TensorP1,
        Suite::TensorP2,
        Suite::Corollaries,
        Suite::L1Collapse,
        Suite::OracleCoherence,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::I0 => "i0",
            Suite::I1 => "i1",
            Suite::Ip0 => "ip0",
            Suite::Ip1 => "ip1",
            Suite::DualNorming => "dual-norming",
            Suite::MajorizingEq => "majorizing-eq",
            Suite::AdjointLambdaDplus => "adjoint-lambda-dplus",
            Suite::CnAdjoint => "cn-adjoint",
            Suite::TensorP1 => "tensor-p1",
            Suite::TensorP2 => "tensor-p2",
            Suite::Corollaries => "corollaries",
            Suite::L1Collapse => "l1-collapse",
            Suite::OracleCoherence => "oracle-coherence",
        }
    }

    /// The statement the suite checks.
    pub fn statement(self) -> &'static str {
        match self {
            Suite::I0 => "weak_q(S) <= pos_weak_q(S) for every finite sequence S",
            Suite::I1 => "weak_q(S) = pos_weak_q(S) for sequences of positive vectors",
            Suite::Ip0 => "pos_strong_p(S) <= cohen_p(S) for every finite sequence S",
            Suite::Ip1 => "pos_strong_p(S) = cohen_p(S) for sequences of positive vectors",
            Suite::DualNorming => {
                "pos_strong_p(S) = sup <A, |S|> over dual arrays A >= 0 with pos_weak_p*(A) <= 1"
            }
            Suite::MajorizingEq => "positive (p,q)-majorizing norm = positive strongly (p,q)-summing norm",
            Suite::AdjointLambdaDplus => "Lambda_{p,q}(T) = D+_{q*,p*}(T*), and T** = T",
            Suite::CnAdjoint => {
                "CN-left_{p,q}(T) = CN-right_{q*,p*}(T*), CN-right_{p,q}(T) = CN-left_{q*,p*}(T*), \
                 CN_{p,q}(T) = CN_{q*,p*}(T*)"
            }
            Suite::TensorP1 => "Wittstock norm of sum_i e_i (x) x_i on l_p^m (x) X = pos_weak_p(x_i)",
            Suite::TensorP2 => "Fremlin norm of a positive tensor on l_p^m (x) X = pos_strong_p of its rows",
            Suite::Corollaries => "constants of I (x) T between tensor norms = the matching ideal norms of T",
            Suite::L1Collapse => "strong_1(S) = cohen_1(S) = pos_strong_1(S)",
            Suite::OracleCoherence => {
                "search values are never below brute-force grid values; grids bracket known closed forms"
            }
        }
    }

    /// Instances run when no count is given. For `oracle-coherence` the count
    /// is per norm kind.
    pub fn default_count(self) -> usize {
        match self {
            Suite::I0 | Suite::Ip0 => 500,
            Suite::I1 | Suite::Ip1 | Suite::TensorP1 | Suite::TensorP2 => 200,
            Suite::L1Collapse => 100,
            Suite::DualNorming | Suite::MajorizingEq | Suite::AdjointLambdaDplus | Suite::CnAdjoint => 50,
            Suite::Corollaries => 20,
            Suite::OracleCoherence => 25,
        }
    }

    /// The configuration the suite actually searches with.
    pub fn config(self, base: &SearchConfig) -> SearchConfig {
        match self {
            Suite::MajorizingEq | Suite::AdjointLambdaDplus | Suite::CnAdjoint => SearchConfig {
                starts: base.starts.max(IDEAL_MIN_STARTS),
                ..base.clone()
            },
            _ => base.clone(),
        }
    }

    fn tag(self) -> u64 {
        0x5u64 << 32 | Suite::ALL.iter().position(|s| *s == self).unwrap() as u64
    }
}

/// Rows of a finished suite run.
pub struct SuiteRun {
    pub config: SearchConfig,
    pub instances: usize,
    pub rows: Vec<Row>,
}

/// Runs `count` instances of `suite`. With `with_oracle`, sequence and
/// tensor instances also get a row comparing each search value with the
/// brute-force grid value.
pub fn run(suite: Suite, count: usize, seed: u64, with_oracle: bool, base: &SearchConfig) -> Result<SuiteRun, CliError> {
    let config = suite.config(base);
    config.validate().map_err(|e| CliError::core("config", e))?;
    let ctx = Ctx {
        suite,
        seed,
        config: config.clone(),
        with_oracle,
    };
    let err = |e| CliError::core(suite.name(), e);
    let mut rows = Vec::new();
    let instances = if suite == Suite::OracleCoherence {
        coherence(&ctx, count, &mut rows).map_err(err)?
    } else {
        for i in 0..count {
            ctx.instance(i, &mut rows).map_err(err)?;
        }
        count
    };
    Ok(SuiteRun {
        config,
        instances,
        rows,
    })
}

type CoreResult<T> = latsum_core::Result<T>;

struct Ctx {
    suite: Suite,
    seed: u64,
    config: SearchConfig,
    with_oracle: bool,
}

fn exp(v: f64) -> Exponent {
    Exponent::new(v).expect("suite exponents are valid")
}

fn pick<T: Copy>(r: &mut Rng, xs: &[T]) -> T {
    xs[rng::index(r, xs.len())]
}

fn random_space(r: &mut Rng, n: usize, exps: &[f64]) -> LatticeSpace {
    let e = pick(r, exps);
    let w = (0..n).map(|_| rng::uniform(r, 0.5, 2.0)).collect();
    LatticeSpace::new(exp(e), w).expect("weights are positive")
}

/// Entries in `[-1, 1)` (or `[0, 1)`), about one in seven set to zero so
/// that faces of the cone get hit.
fn random_entries(r: &mut Rng, len: usize, nonneg: bool) -> Vec<f64> {
    let lo = if nonneg { 0.0 } else { -1.0 };
    (0..len)
        .map(|_| if rng::unit(r) < 0.15 { 0.0 } else { rng::uniform(r, lo, 1.0) })
        .collect()
}

fn random_sequence(r: &mut Rng, max_n: usize, max_m: usize, exps: &[f64], nonneg: bool) -> VectorSequence {
    let n = 1 + rng::index(r, max_n);
    let m = 1 + rng::index(r, max_m);
    let x = random_space(r, n, exps);
    let data = random_entries(r, m * n, nonneg);
    VectorSequence::from_flat(x, m, data).expect("shape matches")
}

fn random_operator(r: &mut Rng, max_dim: usize, exps: &[f64], weighted: bool) -> LinearOperator {
    let (ne, nf) = (1 + rng::index(r, max_dim), 1 + rng::index(r, max_dim));
    let mut space = |n: usize| {
        let x = random_space(r, n, exps);
        if weighted {
            x
        } else {
            LatticeSpace::unweighted(n, x.exponent()).expect("n >= 1")
        }
    };
    let (e, f) = (space(ne), space(nf));
    let rows: Vec<Vec<f64>> = (0..nf).map(|_| (0..ne).map(|_| rng::uniform(r, -1.0, 1.0)).collect()).collect();
    LinearOperator::new(&rows, e, f).expect("shape matches")
}

fn params(pq: (f64, f64)) -> NormParams {
    NormParams::new(exp(pq.0), exp(pq.1)).expect("q <= p")
}

#[derive(Serialize)]
struct SeqInstance<'a> {
    suite: &'static str,
    exponent: ExpValue,
    space: SpaceFile,
    vectors: &'a [f64],
}

#[derive(Serialize)]
struct OpInstance<'a> {
    suite: &'static str,
    p: ExpValue,
    q: ExpValue,
    m: usize,
    domain: SpaceFile,
    codomain: SpaceFile,
    matrix: &'a [f64],
}

fn seq_hash(suite: Suite, e: Exponent, s: &VectorSequence) -> String {
    short_hash(&SeqInstance {
        suite: suite.name(),
        exponent: e.into(),
        space: SpaceFile::of(s.space()),
        vectors: s.data(),
    })
}

fn op_hash(suite: Suite, pq: NormParams, m: usize, t: &LinearOperator) -> String {
    short_hash(&OpInstance {
        suite: suite.name(),
        p: pq.p.into(),
        q: pq.q.into(),
        m,
        domain: SpaceFile::of(t.domain()),
        codomain: SpaceFile::of(t.codomain()),
        matrix: t.matrix(),
    })
}

pub fn rel_gap(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// A row for `lhs = rhs` within relative `tol`.
fn equality(index: usize, hash: &str, label: String, lhs: f64, rhs: f64, tol: f64) -> Row {
    let gap = rel_gap(lhs, rhs);
    Row {
        index,
        instance_hash: hash.to_string(),
        label,
        lhs,
        rhs,
        gap,
        tol,
        pass: gap <= tol,
    }
}

/// A row for `lhs <= rhs + tol * scale`; the gap is the scaled violation.
fn inequality(index: usize, hash: &str, label: String, lhs: f64, rhs: f64, scale: f64, tol: f64) -> Row {
    let excess = (lhs - rhs).max(0.0);
    let gap = if scale > 0.0 { excess / scale } else { excess };
    Row {
        index,
        instance_hash: hash.to_string(),
        label,
        lhs,
        rhs,
        gap,
        tol,
        pass: gap <= tol,
    }
}

/// Exact-path tolerance when both estimates are exact, search tolerance
/// otherwise.
fn split_tol(a: &NormEstimate, b: &NormEstimate) -> (f64, &'static str) {
    if a.exact && b.exact {
        (EXACT_TOL, "exact")
    } else {
        (SEARCH_TOL, "search")
    }
}

/// Step and point cap of the `--with-oracle` grids.
const ORACLE_STEP: f64 = 0.1;
const ORACLE_POINTS: usize = 200_000;

impl Ctx {
    fn stream(&self, i: usize) -> Rng {
        rng::stream(rng::derive(self.seed, self.suite.tag()), i as u64)
    }

    fn search(&self, i: usize) -> SearchConfig {
        self.config.with_seed(rng::derive(self.seed ^ self.suite.tag(), 1 + i as u64))
    }

    /// `search >= grid - 1e-9` for one sequence norm, when the grid fits.
    fn oracle_row(&self, i: usize, hash: &str, s: &VectorSequence, norm: SeqNorm, search: f64, rows: &mut Vec<Row>) {
        if !self.with_oracle {
            return;
        }
        let g = GridSpec::new(ORACLE_STEP, ORACLE_POINTS).expect("valid grid");
        if let Ok(o) = bruteforce_seq_norm(norm, s, &g) {
            let grid = o.estimate.value;
            rows.push(inequality(
                i,
                hash,
                format!("oracle {} {}", norm.kind, ExpValue::from(norm.exponent)),
                grid,
                search,
                1.0,
                1e-9,
            ));
        }
    }

    fn instance(&self, i: usize, rows: &mut Vec<Row>) -> CoreResult<()> {
        let mut r = self.stream(i);
        let cfg = self.search(i);
        let suite = self.suite;
        match suite {
            Suite::I0 | Suite::I1 => {
                let positive = suite == Suite::I1;
                let s = random_sequence(&mut r, 3, 4, &LATTICE_R, positive);
                let q = exp(pick(&mut r, &[1.0, 1.5, 2.0]));
                let h = seq_hash(suite, q, &s);
                let w = weak_norm(&s, q, &cfg);
                let pw = positive_weak_norm(&s, q, &cfg);
                if positive {
                    let (tol, path) = split_tol(&w, &pw);
                    rows.push(equality(i, &h, format!("weak = pos_weak ({path})"), w.value, pw.value, tol));
                } else {
                    let scale = strong_norm(&s, q).value;
                    rows.push(inequality(i, &h, "weak <= pos_weak".into(), w.value, pw.value, scale, 1e-9));
                }
                self.oracle_row(i, &h, &s, SeqNorm::new(SeqNormKind::Weak, q), w.value, rows);
                self.oracle_row(i, &h, &s, SeqNorm::new(SeqNormKind::PosWeak, q), pw.value, rows);
            }
            Suite::Ip0 | Suite::Ip1 => {
                let positive = suite == Suite::Ip1;
                let s = random_sequence(&mut r, 3, 4, &LATTICE_R, positive);
                let p = exp(pick(&mut r, &[1.0, 1.5, 2.0]));
                let h = seq_hash(suite, p, &s);
                let ps = positive_strong_norm(&s, p, &cfg)?;
                let c = cohen_norm(&s, p, &cfg)?;
                if positive {
                    let (tol, path) = split_tol(&ps, &c);
                    rows.push(equality(i, &h, format!("pos_strong = cohen ({path})"), ps.value, c.value, tol));
                } else {
                    let scale = strong_norm(&s, p).value;
                    rows.push(inequality(i, &h, "pos_strong <= cohen".into(), ps.value, c.value, scale, SEARCH_TOL));
                }
                self.oracle_row(i, &h, &s, SeqNorm::new(SeqNormKind::PosStrong, p), ps.value, rows);
                self.oracle_row(i, &h, &s, SeqNorm::new(SeqNormKind::Cohen, p), c.value, rows);
            }
            Suite::L1Collapse => {
                let s = random_sequence(&mut r, 3, 4, &WIDE_R, false);
                let one = Exponent::ONE;
                let h = seq_hash(suite, one, &s);
                let st = strong_norm(&s, one).value;
                let c = cohen_norm(&s, one, &cfg)?.value;
                let ps = positive_strong_norm(&s, one, &cfg)?.value;
                rows.push(equality(i, &h, "strong_1 = cohen_1".into(), st, c, 1e-9));
                rows.push(equality(i, &h, "strong_1 = pos_strong_1".into(), st, ps, 1e-9));
            }
            Suite::DualNorming => {
                let s = random_sequence(&mut r, 3, 3, &LATTICE_R, false);
                let p = exp(pick(&mut r, &[1.5, 2.0, 3.0]));
                let h = seq_hash(suite, p, &s);
                let ps = positive_strong_norm(&s, p, &cfg)?.value;
                let sampled = dual_witness_sampler(&s, p, SAMPLER_DRAWS, &cfg)?.value;
                rows.push(equality(i, &h, "pos_strong = sampled dual sup".into(), ps, sampled, SEARCH_TOL));
                self.oracle_row(i, &h, &s, SeqNorm::new(SeqNormKind::PosStrong, p), ps, rows);
            }
            Suite::MajorizingEq => {
                let t = random_operator(&mut r, 3, &LATTICE_R, true);
                let pq = params(pick(&mut r, &PARAMS));
                let h = op_hash(suite, pq, IDEAL_M, &t);
                let u = majorizing_norm(&t, pq, IDEAL_M, &cfg)?.value;
                let d = dplus_norm(&t, pq, IDEAL_M, &cfg)?.value;
                rows.push(equality(i, &h, "majorizing = dplus".into(), u, d, IDEAL_TOL));
            }
            Suite::AdjointLambdaDplus => {
                let t = random_operator(&mut r, 3, &LATTICE_R, true);
                let pq = params(pick(&mut r, &PARAMS));
                let h = op_hash(suite, pq, IDEAL_M, &t);
                let l = lambda_norm(&t, pq, IDEAL_M, &cfg)?.value;
                let d = dplus_norm(&t.adjoint(), pq.swapped_conjugates(), IDEAL_M, &cfg)?.value;
                rows.push(equality(i, &h, "lambda(T) = dplus(T*)".into(), l, d, IDEAL_TOL));
                let tt = t.adjoint().adjoint();
                let shape = bidual_difference(&t, &tt);
                let l2 = lambda_norm(&tt, pq, IDEAL_M, &cfg)?.value;
                let mut row = equality(i, &h, "lambda(T) = lambda(T**)".into(), l, l2, 1e-12);
                row.gap = row.gap.max(shape);
                row.pass = row.gap <= row.tol;
                rows.push(row);
            }
            Suite::CnAdjoint => {
                let t = random_operator(&mut r, 3, &LATTICE_R, true);
                let pq = params(pick(&mut r, &CN_PARAMS));
                let h = op_hash(suite, pq, IDEAL_M, &t);
                let ta = t.adjoint();
                let sw = pq.swapped_conjugates();
                let cn = |op: &LinearOperator, side, pq| cohen_nuclear_norm(op, side, pq, IDEAL_M, &cfg).map(|e| e.value);
                for (a, b, label) in [
                    (CnSide::Left, CnSide::Right, "cn-left(T) = cn-right(T*)"),
                    (CnSide::Right, CnSide::Left, "cn-right(T) = cn-left(T*)"),
                    (CnSide::Both, CnSide::Both, "cn-both(T) = cn-both(T*)"),
                ] {
                    rows.push(equality(i, &h, label.into(), cn(&t, a, pq)?, cn(&ta, b, sw)?, IDEAL_TOL));
                }
            }
            Suite::TensorP1 | Suite::TensorP2 => {
                let positive = suite == Suite::TensorP2;
                let s = random_sequence(&mut r, 3, 4, &WIDE_R, positive);
                let ps: &[f64] = if positive { &[1.0, 1.5, 2.0, 3.0] } else { &WIDE_R };
                let p = exp(pick(&mut r, ps));
                let h = seq_hash(suite, p, &s);
                let u = TensorElement::new(p, s.clone())?;
                let (t, sq, kind, label) = if positive {
                    let f = fremlin_norm(&u, &cfg)?;
                    (f, positive_strong_norm(&s, p, &cfg)?, SeqNormKind::PosStrong, "fremlin = pos_strong")
                } else {
                    let w = wittstock_norm(&u, &cfg);
                    (w, positive_weak_norm(&s, p, &cfg), SeqNormKind::PosWeak, "wittstock = pos_weak")
                };
                let (tol, path) = split_tol(&t, &sq);
                rows.push(equality(i, &h, format!("{label} ({path})"), t.value, sq.value, tol));
                self.oracle_row(i, &h, &s, SeqNorm::new(kind, p), t.value, rows);
            }
            Suite::Corollaries => {
                use TensorNormKind::*;
                let t = random_operator(&mut r, 2, &WIDE_R, true);
                let pq = params(pick(&mut r, &CN_PARAMS));
                let m = 2;
                let h = op_hash(suite, pq, m, &t);
                let (p, q) = (pq.p, pq.q);
                let induced = |a, b| induced_tensor_constant(&t, TensorNorm::new(a, q), TensorNorm::new(b, p), m, &cfg);
                let checks = [
                    ("wittstock -> delta = lambda", induced(Wittstock, Delta)?, lambda_norm(&t, pq, m, &cfg)?),
                    ("delta -> fremlin = dplus", induced(Delta, Fremlin)?, dplus_sequence(&t, pq, m, &cfg)?),
                    (
                        "wittstock -> groth-pi = cn-left",
                        induced(Wittstock, GrothPi)?,
                        cohen_nuclear_norm(&t, CnSide::Left, pq, m, &cfg)?,
                    ),
                    (
                        "groth-eps -> fremlin = cn-right",
                        induced(GrothEps, Fremlin)?,
                        cohen_nuclear_norm(&t, CnSide::Right, pq, m, &cfg)?,
                    ),
                    (
                        "wittstock -> fremlin = cn-both",
                        induced(Wittstock, Fremlin)?,
                        cohen_nuclear_norm(&t, CnSide::Both, pq, m, &cfg)?,
                    ),
                ];
                for (label, a, b) in checks {
                    let diff = (a.value - b.value).abs();
                    rows.push(Row {
                        index: i,
                        instance_hash: h.clone(),
                        label: label.into(),
                        lhs: a.value,
                        rhs: b.value,
                        gap: diff,
                        tol: 1e-9,
                        pass: diff <= 1e-9,
                    });
                }
            }
            Suite::OracleCoherence => unreachable!("handled by coherence"),
        }
        Ok(())
    }
}

/// Largest entry or weight difference between `T` and `T**`, plus one if the
/// exponents differ.
fn bidual_difference(t: &LinearOperator, tt: &LinearOperator) -> f64 {
    let mut d: f64 = 0.0;
    for (a, b) in [(t.domain(), tt.domain()), (t.codomain(), tt.codomain())] {
        if a.exponent().value() != b.exponent().value() || a.dim() != b.dim() {
            return 1.0;
        }
        for (x, y) in a.weights().iter().zip(b.weights()) {
            d = d.max((x - y).abs());
        }
    }
    for (x, y) in t.matrix().iter().zip(tt.matrix()) {
        d = d.max((x - y).abs());
    }
    d
}

/// Grid step for the closed-form brackets.
const BRACKET_STEP: f64 = 0.02;
/// Grid steps for the random coherence instances.
const SEQ_STEP: f64 = 0.05;
const IDEAL_STEP: f64 = 0.125;

/// Closed-form rows followed by `count` random instances per norm kind:
/// five sequence norms, five tensor norms and six ideal norms.
fn coherence(ctx: &Ctx, count: usize, rows: &mut Vec<Row>) -> CoreResult<usize> {
    let mut index = closed_forms(rows)?;
    let seq_grid = GridSpec::new(SEQ_STEP, 2_000_000)?;
    let ideal_grid = GridSpec::new(IDEAL_STEP, 2_000_000)?;
    for kind in SeqNormKind::ALL {
        for k in 0..count {
            let mut r = ctx.stream(index);
            let cfg = ctx.search(index);
            let s = random_sequence(&mut r, 2, 2, &WIDE_R, false);
            let norm = SeqNorm::new(kind, exp(pick(&mut r, &[1.0, 1.5, 2.0, 3.0])));
            let o = bruteforce_seq_norm(norm, &s, &seq_grid)?;
            let v = seq_norm(&s, norm, &cfg)?.value;
            let label = format!("{kind} {} #{k}", ExpValue::from(norm.exponent));
            rows.push(bracketed(index, &seq_hash(Suite::OracleCoherence, norm.exponent, &s), label, v, &o));
            index += 1;
        }
    }
    for kind in TensorNormKind::ALL {
        for k in 0..count {
            let mut r = ctx.stream(index);
            let cfg = ctx.search(index);
            // the projective identification holds on positive tensors
            let s = random_sequence(&mut r, 2, 2, &WIDE_R, kind == TensorNormKind::Fremlin);
            let p = exp(pick(&mut r, &[1.0, 1.5, 2.0, 3.0]));
            let u = TensorElement::new(p, s.clone())?;
            let o = bruteforce_seq_norm(TensorNorm::new(kind, p).sequence_norm(), &s, &seq_grid)?;
            let v = tensor_norm(&u, kind, &cfg)?.value;
            let label = format!("{kind} {} #{k}", ExpValue::from(p));
            rows.push(bracketed(index, &seq_hash(Suite::OracleCoherence, p, &s), label, v, &o));
            index += 1;
        }
    }
    for kind in IdealKind::ALL {
        for k in 0..count {
            let mut r = ctx.stream(index);
            let cfg = ctx.search(index);
            let t = random_operator(&mut r, 2, &LATTICE_R, false);
            let pq = params(pick(&mut r, &CN_PARAMS));
            let m = 2;
            let grid = bruteforce_ideal_norm(kind, &t, pq, m, &ideal_grid)?.value;
            let v = ideal_norm(kind, &t, pq, m, &cfg)?.value;
            let h = op_hash(Suite::OracleCoherence, pq, m, &t);
            let label = format!("{} #{k}", kind.as_str());
            rows.push(inequality(index, &h, label, grid, v, 1.0, 1e-9));
            index += 1;
        }
    }
    Ok(index)
}

/// `grid - 1e-9 <= search <= grid + gap + 1e-9`; the reported gap is how far
/// the search value falls outside the certified bracket.
fn bracketed(index: usize, hash: &str, label: String, search: f64, o: &latsum_core::oracles::OracleEstimate) -> Row {
    let lo = o.estimate.value;
    let hi = lo + o.gap;
    let gap = (lo - search).max(search - hi).max(0.0);
    Row {
        index,
        instance_hash: hash.to_string(),
        label,
        lhs: search,
        rhs: lo,
        gap,
        tol: 1e-9,
        pass: gap <= 1e-9,
    }
}

/// Grid values against known closed forms at step 0.02; each row passes when
/// the grid value is at most the closed form and within its stated gap.
fn closed_forms(rows: &mut Vec<Row>) -> CoreResult<usize> {
    let g = GridSpec::new(BRACKET_STEP, 10_000_000)?;
    let two = exp(2.0);
    let sqrt2 = 2f64.sqrt();
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let seq = |r: f64, n: usize, data: &[f64]| {
        let x = LatticeSpace::unweighted(n, exp(r)).expect("n >= 1");
        VectorSequence::from_flat(x, data.len() / n, data.to_vec()).expect("shape matches")
    };
    let mut cases: Vec<(String, f64, f64, f64)> = Vec::new();
    let mut seq_case = |label: &str, kind: SeqNormKind, s: &VectorSequence, exact: f64| -> CoreResult<()> {
        let o = bruteforce_seq_norm(SeqNorm::new(kind, two), s, &g)?;
        cases.push((format!("{label} {kind}"), o.estimate.value, exact, o.gap));
        Ok(())
    };
    let scalars = seq(2.0, 1, &[1.0, -2.0, 3.0]);
    for kind in [SeqNormKind::Strong, SeqNormKind::Weak, SeqNormKind::PosWeak] {
        seq_case("sqrt(14): (1, -2, 3) in R,", kind, &scalars, 14f64.sqrt())?;
    }
    seq_case("sqrt(3): (1, 1, 1) in R,", SeqNormKind::Cohen, &seq(2.0, 1, &[1.0, 1.0, 1.0]), 3f64.sqrt())?;
    let basis = seq(f64::INFINITY, 2, &[1.0, 0.0, 0.0, 1.0]);
    seq_case("sqrt(2): (e1, e2) in l_inf^2,", SeqNormKind::PosStrong, &basis, sqrt2)?;
    seq_case("sqrt(2): (e1, e2) in l_inf^2,", SeqNormKind::Cohen, &basis, sqrt2)?;
    let rows2 = seq(2.0, 2, &[1.0, 0.0, 1.0, 1.0]);
    for kind in [SeqNormKind::Weak, SeqNormKind::PosWeak] {
        seq_case("phi: ((1, 0), (1, 1)) in l_2^2,", kind, &rows2, phi)?;
    }
    let l2 = LatticeSpace::unweighted(2, two)?;
    let lin = grid_max(&|w: &[f64]| w[0] + w[1], &l2, &g)?;
    cases.push(("sqrt(2): w1 + w2 on the positive l_2 ball".into(), lin.estimate.value, sqrt2, lin.gap(sqrt2)));
    let quad = grid_max(&|w: &[f64]| w[0] * w[0] + 2.0 * w[0] * w[1], &l2, &g)?;
    // the gradient 2 A w has Euclidean norm at most 2 phi on the ball
    cases.push(("phi: w1^2 + 2 w1 w2 on the positive l_2 ball".into(), quad.estimate.value, phi, quad.gap(2.0 * phi)));
    let linf = LatticeSpace::unweighted(2, Exponent::INFINITY)?;
    let id = LinearOperator::new(&[vec![1.0, 0.0], vec![0.0, 1.0]], linf.clone(), linf)?;
    let lambda = bruteforce_ideal_norm(IdealKind::Lambda, &id, params((1.0, 1.0)), 2, &g)?;
    cases.push(("2: lambda_{1,1} of the identity on l_inf^2".into(), lambda.value, 2.0, 3.0 * BRACKET_STEP));

    let n = cases.len();
    for (index, (label, grid, exact, tol)) in cases.into_iter().enumerate() {
        let gap = (exact - grid).abs();
        rows.push(Row {
            index,
            instance_hash: short_hash(&label),
            label: format!("closed form {label}"),
            lhs: grid,
            rhs: exact,
            gap,
            tol,
            pass: grid <= exact + 1e-12 && gap <= tol + 1e-12,
        });
    }
    Ok(n)
}
