//! Operator ideal norms defined through sequence norms.
//!
//! For `T: E -> F` and sequence norms `alpha` on `E` and `tau` on `F`, the
//! induced constant is `sup_S tau(T S) / alpha(S)` over `m`-term sequences.
//! Writing `tau` through its polar ball turns this into the supremum of the
//! bilinear form `<V, T S>` over `S` in the `alpha` ball and `V` in the polar
//! ball of `tau`. Every estimator below works on that form:
//!
//! 1. a cheap multistart ratio ascent over whichever variables keep all
//!    norms cheap (strong, weak, positive weak);
//! 2. alternating exact maximization over `S` and `V` from the best end
//!    points; each half step is a linear maximization over a sequence-norm
//!    ball, so the bilinear value never decreases.
//!
//! The reported value is the bilinear value of the final pair and the
//! certificate is the witness sequence `S` (row-major, `m x dim E`).

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::lattice::{Exponent, LatticeSpace, VectorSequence};
use crate::math::{dot, lp_grad};
use crate::ratio::{self, Block, RatioProblem};
use crate::rng::{self, Rng};
use crate::search::{maximize_convex_over_ball, ConvexObjective, Method, NormEstimate, SearchConfig};
use crate::seq::{SeqBall, SeqNorm, SeqNormKind};
use crate::{Error, Result};

/// A linear map between two lattices, stored as a `dim F x dim E` row-major
/// matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearOperator {
    matrix: Vec<f64>,
    domain: LatticeSpace,
    codomain: LatticeSpace,
}

impl LinearOperator {
    pub fn new(rows: &[Vec<f64>], domain: LatticeSpace, codomain: LatticeSpace) -> Result<Self> {
        if rows.len() != codomain.dim() {
            return Err(Error::LengthMismatch {
                expected: codomain.dim(),
                actual: rows.len(),
            });
        }
        let mut matrix = Vec::with_capacity(rows.len() * domain.dim());
        for row in rows {
            domain.check_len(row)?;
            matrix.extend_from_slice(row);
        }
        if let Some(index) = matrix.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(LinearOperator {
            matrix,
            domain,
            codomain,
        })
    }

    pub fn domain(&self) -> &LatticeSpace {
        &self.domain
    }

    pub fn codomain(&self) -> &LatticeSpace {
        &self.codomain
    }

    /// Row-major entries.
    pub fn matrix(&self) -> &[f64] {
        &self.matrix
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.matrix.chunks(self.domain.dim()).map(|row| dot(row, x)).collect()
    }

    /// `T` applied to every row of an array of domain vectors.
    pub(crate) fn apply_rows(&self, s: &[f64], out: &mut [f64]) {
        let (n, k) = (self.domain.dim(), self.codomain.dim());
        for (x, y) in s.chunks(n).zip(out.chunks_mut(k)) {
            for (i, row) in self.matrix.chunks(n).enumerate() {
                y[i] = dot(row, x);
            }
        }
    }

    /// `T*` applied to every row of an array of codomain functionals.
    pub(crate) fn adjoint_rows(&self, v: &[f64], out: &mut [f64]) {
        let (n, k) = (self.domain.dim(), self.codomain.dim());
        for (g, x) in v.chunks(k).zip(out.chunks_mut(n)) {
            x.iter_mut().for_each(|t| *t = 0.0);
            for (i, row) in self.matrix.chunks(n).enumerate() {
                for j in 0..n {
                    x[j] += g[i] * row[j];
                }
            }
        }
    }

    /// The adjoint `T*: F* -> E*`; taking it twice returns the operator.
    pub fn adjoint(&self) -> LinearOperator {
        let (n, k) = (self.domain.dim(), self.codomain.dim());
        let mut matrix = vec![0.0; n * k];
        for i in 0..k {
            for j in 0..n {
                matrix[j * k + i] = self.matrix[i * n + j];
            }
        }
        LinearOperator {
            matrix,
            domain: self.codomain.dual(),
            codomain: self.domain.dual(),
        }
    }
}

pub fn adjoint(t: &LinearOperator) -> LinearOperator {
    t.adjoint()
}

/// Exponents `1 <= q <= p <= inf`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormParams {
    pub p: Exponent,
    pub q: Exponent,
}

impl NormParams {
    pub fn new(p: Exponent, q: Exponent) -> Result<Self> {
        if q.value() > p.value() {
            return Err(Error::InvalidParameter {
                name: "q",
                value: q.value(),
                reason: "need q <= p",
            });
        }
        Ok(NormParams { p, q })
    }

    /// The exponents `(q*, p*)` of the adjoint statement.
    pub fn swapped_conjugates(self) -> NormParams {
        NormParams {
            p: self.q.conjugate(),
            q: self.p.conjugate(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CnSide {
    Left,
    Right,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum IdealKind {
    Lambda,
    DPlus,
    Majorizing,
    Cn(CnSide),
}

impl IdealKind {
    pub const ALL: [IdealKind; 6] = [
        IdealKind::Lambda,
        IdealKind::DPlus,
        IdealKind::Majorizing,
        IdealKind::Cn(CnSide::Left),
        IdealKind::Cn(CnSide::Right),
        IdealKind::Cn(CnSide::Both),
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            IdealKind::Lambda => "lambda",
            IdealKind::DPlus => "dplus",
            IdealKind::Majorizing => "majorizing",
            IdealKind::Cn(CnSide::Left) => "cn-left",
            IdealKind::Cn(CnSide::Right) => "cn-right",
            IdealKind::Cn(CnSide::Both) => "cn-both",
        }
    }

    /// The `(source, target)` sequence norms whose induced constant this
    /// norm is.
    pub fn pair(self, params: NormParams) -> (SeqNorm, SeqNorm) {
        let (p, q) = (params.p, params.q);
        let n = SeqNorm::new;
        match self {
            IdealKind::Lambda => (n(SeqNormKind::PosWeak, q), n(SeqNormKind::Strong, p)),
            IdealKind::DPlus | IdealKind::Majorizing => (n(SeqNormKind::Strong, q), n(SeqNormKind::PosStrong, p)),
            IdealKind::Cn(CnSide::Left) => (n(SeqNormKind::PosWeak, q), n(SeqNormKind::Cohen, p)),
            IdealKind::Cn(CnSide::Right) => (n(SeqNormKind::Weak, q), n(SeqNormKind::PosStrong, p)),
            IdealKind::Cn(CnSide::Both) => (n(SeqNormKind::PosWeak, q), n(SeqNormKind::PosStrong, p)),
        }
    }
}

impl fmt::Display for IdealKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

fn check_m(m: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::InvalidParameter {
            name: "m",
            value: 0.0,
            reason: "need at least one witness vector",
        });
    }
    Ok(())
}

fn is_cheap(kind: SeqNormKind) -> bool {
    matches!(kind, SeqNormKind::Strong | SeqNormKind::Weak | SeqNormKind::PosWeak)
}

/// How many ascent end points get the exact alternating treatment.
const POLISH: usize = 3;
/// Cap on alternating rounds per polished point.
const ROUNDS: usize = 12;

/// `sup_S tau(T S) / alpha(S)` over sequences of the given length `m`.
pub(crate) fn induced(
    t: &LinearOperator,
    alpha: SeqNorm,
    tau: SeqNorm,
    m: usize,
    cfg: &SearchConfig,
) -> Result<NormEstimate> {
    let dual_f = t.codomain.dual();
    let src = SeqBall::new(alpha, &t.domain, cfg);
    let polar = SeqBall::new(tau.dual(), &dual_f, cfg);
    let n = t.domain.dim();
    // the ascent only has to land near the right basins; the alternation
    // below does the fine work
    let phase = SearchConfig {
        seed: rng::derive(cfg.seed, 0xa),
        tol: cfg.tol.max(1e-7),
        ..cfg.clone()
    };

    // phase one: cheap ascent, mapped back to witness sequences S
    let (starts, iterations, count) = if is_cheap(tau.kind) {
        let target = SeqBall::new(tau, &t.codomain, cfg);
        let p = Direct::new(t, m, &src, &target);
        let (top, it, c) = ratio::multistart_top(&p, &phase, &[], POLISH);
        (top.into_iter().map(|(_, s)| s).collect::<Vec<_>>(), it, c)
    } else if alpha.kind == SeqNormKind::Strong {
        let adj = t.adjoint();
        let dual_e = t.domain.dual();
        let eliminated = SeqBall::new(alpha.dual(), &dual_e, cfg);
        let p = Direct::new(&adj, m, &polar, &eliminated);
        let (top, it, c) = ratio::multistart_top(&p, &phase, &[], POLISH);
        let mut out = Vec::new();
        for (_, v) in top {
            let mut c_rows = vec![0.0; m * n];
            t.adjoint_rows(&v, &mut c_rows);
            let mut s = vec![0.0; m * n];
            src.lmo(&c_rows, &mut s)?;
            out.push(s);
        }
        (out, it, c)
    } else {
        let p = Joint::new(t, m, &src, &polar);
        let (top, it, c) = ratio::multistart_top(&p, &phase, &[], POLISH);
        (top.into_iter().map(|(_, x)| x[..m * n].to_vec()).collect(), it, c)
    };

    let mut best = NormEstimate {
        value: 0.0,
        certificate: vec![0.0; m * n],
        exact: false,
        method: Method::MultistartAscent,
        starts_used: count,
        iterations,
        seed: cfg.seed,
    };
    for s in starts.into_iter().chain([norm_witness(t, m, cfg)]) {
        let (value, s, rounds) = alternate(t, m, &src, &polar, s, cfg)?;
        best.iterations += rounds;
        if value > best.value {
            best.value = value;
            best.certificate = s;
        }
    }
    Ok(best)
}

/// The norming vector of `T` followed by zeros. Every sequence norm of a
/// single vector is the norm of that vector, so every induced constant is at
/// least the ratio at this witness, the operator norm.
fn norm_witness(t: &LinearOperator, m: usize, cfg: &SearchConfig) -> Vec<f64> {
    let x = operator_norm(t, cfg).certificate;
    let mut s = vec![0.0; m * t.domain.dim()];
    s[..x.len()].copy_from_slice(&x);
    s
}

/// Alternating exact maximization of `<V, T S>` from the witness `s`,
/// followed by support rounding: entries that are small against the largest
/// one are zeroed and the alternation rerun. The alternation only creeps up
/// on optima with zero entries; the rounded witness often sits on them.
/// Returns the best bilinear value, its witness and the number of rounds.
fn alternate(
    t: &LinearOperator,
    m: usize,
    src: &SeqBall,
    polar: &SeqBall,
    s: Vec<f64>,
    cfg: &SearchConfig,
) -> Result<(f64, Vec<f64>, usize)> {
    let (mut best, mut best_s, mut rounds) = alternate_from(t, m, src, polar, s, cfg)?;
    for cut in [1e-1, 1e-2, 1e-3] {
        let top = best_s.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let rounded: Vec<f64> = best_s.iter().map(|&v| if v.abs() < cut * top { 0.0 } else { v }).collect();
        if rounded == best_s {
            continue;
        }
        let (value, s, r) = alternate_from(t, m, src, polar, rounded, cfg)?;
        rounds += r;
        if value > best {
            best = value;
            best_s = s;
        }
    }
    Ok((best, best_s, rounds))
}

fn alternate_from(
    t: &LinearOperator,
    m: usize,
    src: &SeqBall,
    polar: &SeqBall,
    mut s: Vec<f64>,
    cfg: &SearchConfig,
) -> Result<(f64, Vec<f64>, usize)> {
    let (n, k) = (t.domain.dim(), t.codomain.dim());
    let mut scratch = vec![0.0; m * n];
    let a = src.value(&s, &mut scratch);
    if !(a > 0.0) {
        return Ok((0.0, s, 0));
    }
    s.iter_mut().for_each(|v| *v /= a);
    let mut ts = vec![0.0; m * k];
    let mut v = vec![0.0; m * k];
    let mut tv = vec![0.0; m * n];
    t.apply_rows(&s, &mut ts);
    let mut best = polar.lmo(&ts, &mut v)?.value;
    let mut best_s = s.clone();
    let mut rounds = 0;
    while rounds < ROUNDS {
        rounds += 1;
        t.adjoint_rows(&v, &mut tv);
        src.lmo(&tv, &mut s)?;
        t.apply_rows(&s, &mut ts);
        let val = polar.lmo(&ts, &mut v)?.value;
        if val > best {
            let gain = val - best;
            best = val;
            best_s.copy_from_slice(&s);
            if gain <= 1e-6 * best.max(cfg.tol) {
                break;
            }
        } else {
            break;
        }
    }
    Ok((best, best_s, rounds))
}

/// `tau(T S) / alpha(S)` over `S`.
struct Direct<'a> {
    t: &'a LinearOperator,
    src: &'a SeqBall<'a>,
    target: &'a SeqBall<'a>,
    blocks: [Block; 1],
}

impl<'a> Direct<'a> {
    fn new(t: &'a LinearOperator, m: usize, src: &'a SeqBall<'a>, target: &'a SeqBall<'a>) -> Self {
        Direct {
            t,
            src,
            target,
            blocks: [Block {
                len: m * t.domain.dim(),
                nonneg: false,
            }],
        }
    }
}

fn identity_like(k: usize, rng: &mut Rng, x: &mut [f64], n: usize) {
    if k == 0 {
        for (i, row) in x.chunks_mut(n).enumerate() {
            row.iter_mut().for_each(|v| *v = 0.0);
            row[i % n] = 1.0;
        }
    } else {
        x.iter_mut().for_each(|v| *v = rng::uniform(rng, -1.0, 1.0));
    }
}

impl RatioProblem for Direct<'_> {
    fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    fn numerator(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        let m = x.len() / self.t.domain.dim();
        let mut y = vec![0.0; m * self.t.codomain.dim()];
        self.t.apply_rows(x, &mut y);
        let mut gy = vec![0.0; y.len()];
        let v = self.target.value(&y, &mut gy);
        self.t.adjoint_rows(&gy, grad);
        v
    }

    fn block_norm(&self, _b: usize, xb: &[f64], grad: &mut [f64]) -> f64 {
        self.src.value(xb, grad)
    }

    fn start(&self, k: usize, rng: &mut Rng, x: &mut [f64]) {
        identity_like(k, rng, x, self.t.domain.dim());
    }
}

/// `<V, T S> / (alpha(S) beta(V))` over pairs.
struct Joint<'a> {
    t: &'a LinearOperator,
    src: &'a SeqBall<'a>,
    polar: &'a SeqBall<'a>,
    split: usize,
    blocks: [Block; 2],
}

impl<'a> Joint<'a> {
    fn new(t: &'a LinearOperator, m: usize, src: &'a SeqBall<'a>, polar: &'a SeqBall<'a>) -> Self {
        let split = m * t.domain.dim();
        Joint {
            t,
            src,
            polar,
            split,
            blocks: [
                Block {
                    len: split,
                    nonneg: false,
                },
                Block {
                    len: m * t.codomain.dim(),
                    nonneg: false,
                },
            ],
        }
    }
}

impl RatioProblem for Joint<'_> {
    fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    fn numerator(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        let (s, v) = x.split_at(self.split);
        let (gs, gv) = grad.split_at_mut(self.split);
        self.t.apply_rows(s, gv);
        self.t.adjoint_rows(v, gs);
        dot(v, gv)
    }

    fn block_norm(&self, b: usize, xb: &[f64], grad: &mut [f64]) -> f64 {
        if b == 0 {
            self.src.value(xb, grad)
        } else {
            self.polar.value(xb, grad)
        }
    }

    fn start(&self, k: usize, rng: &mut Rng, x: &mut [f64]) {
        let (s, v) = x.split_at_mut(self.split);
        identity_like(k, rng, s, self.t.domain.dim());
        v.iter_mut().for_each(|t| *t = rng::uniform(rng, -1.0, 1.0));
    }
}

struct OperatorObjective<'a> {
    t: &'a LinearOperator,
}

impl ConvexObjective for OperatorObjective<'_> {
    fn value(&self, w: &[f64]) -> f64 {
        self.t.codomain.norm(&self.t.apply(w))
    }

    fn gradient(&self, w: &[f64], g: &mut [f64]) -> f64 {
        let y = self.t.apply(w);
        let mut phi = vec![0.0; y.len()];
        let v = self.t.codomain.norming_functional(&y, &mut phi);
        self.t.adjoint_rows(&phi, g);
        v
    }
}

/// `sup_{||x|| <= 1} ||T x||`; exact when the domain ball is polyhedral. The
/// certificate is the maximizing `x`.
pub fn operator_norm(t: &LinearOperator, cfg: &SearchConfig) -> NormEstimate {
    maximize_convex_over_ball(&OperatorObjective { t }, &t.domain, cfg)
}

/// Induced constant `sup_S target(T S) / source(S)` over `m`-term sequences.
/// Sources must be strong, weak or positive weak.
pub fn induced_map_constant(
    t: &LinearOperator,
    source: SeqNorm,
    target: SeqNorm,
    m: usize,
    cfg: &SearchConfig,
) -> Result<NormEstimate> {
    cfg.validate()?;
    check_m(m)?;
    if !is_cheap(source.kind) {
        return Err(Error::UnsupportedPair {
            from: source.kind.as_str(),
            to: target.kind.as_str(),
        });
    }
    induced(t, source, target, m, cfg)
}

/// `sup ||(T x_i)||_{l_p(F)} / pos_weak_q(x_i)`; the operator norm for
/// `p = inf`.
pub fn lambda_norm(t: &LinearOperator, params: NormParams, m: usize, cfg: &SearchConfig) -> Result<NormEstimate> {
    cfg.validate()?;
    check_m(m)?;
    if params.p.is_infinite() {
        return Ok(operator_norm(t, cfg));
    }
    let (a, b) = IdealKind::Lambda.pair(params);
    induced(t, a, b, m, cfg)
}

/// The sequence form of the positive strong majorant norm:
/// `sup pos_strong_p(T x_i) / strong_q(x_i)`.
pub fn dplus_sequence(t: &LinearOperator, params: NormParams, m: usize, cfg: &SearchConfig) -> Result<NormEstimate> {
    cfg.validate()?;
    check_m(m)?;
    let (a, b) = IdealKind::DPlus.pair(params);
    induced(t, a, b, m, cfg)
}

/// The bilinear form of the same norm:
/// `sup sum_i <y*_i, |T x_i|>` over `strong_q(x) <= 1` and `y* >= 0` with
/// `pos_weak_{p*}(y*) <= 1`, by alternating the exact `y*`-step (a positive
/// strong norm evaluation) with the closed-form `x`-step, from random
/// witnesses. Each chain solves a full inner problem per step, so it runs
/// `cfg.starts / 32` chains (at least two) and one more from the norming
/// vector of `T`.
pub fn dplus_bilinear(t: &LinearOperator, params: NormParams, m: usize, cfg: &SearchConfig) -> Result<NormEstimate> {
    cfg.validate()?;
    check_m(m)?;
    let (alpha, tau) = IdealKind::DPlus.pair(params);
    let dual_f = t.codomain.dual();
    let src = SeqBall::new(alpha, &t.domain, cfg);
    let polar = SeqBall::new(tau.dual(), &dual_f, cfg);
    let n = t.domain.dim();
    let chains = (cfg.starts / 32).max(2);
    let seed = rng::derive(cfg.seed, 0xb);
    let mut best = NormEstimate {
        value: 0.0,
        certificate: vec![0.0; m * n],
        exact: false,
        method: Method::MultistartAscent,
        starts_used: chains + 1,
        iterations: 0,
        seed: cfg.seed,
    };
    for c in 0..=chains {
        let s = if c == chains {
            norm_witness(t, m, cfg)
        } else {
            let mut r = rng::stream(seed, c as u64);
            let mut s = vec![0.0; m * n];
            identity_like(c, &mut r, &mut s, n);
            s
        };
        let (value, s, rounds) = alternate(t, m, &src, &polar, s, cfg)?;
        best.iterations += rounds;
        if value > best.value {
            best.value = value;
            best.certificate = s;
        }
    }
    Ok(best)
}

/// The larger of [`dplus_bilinear`] and [`dplus_sequence`].
pub fn dplus_norm(t: &LinearOperator, params: NormParams, m: usize, cfg: &SearchConfig) -> Result<NormEstimate> {
    let a = dplus_bilinear(t, params, m, cfg)?;
    let b = dplus_sequence(t, params, m, cfg)?;
    let mut out = if b.value > a.value { b.clone() } else { a.clone() };
    out.starts_used = a.starts_used + b.starts_used;
    out.iterations = a.iterations + b.iterations;
    Ok(out)
}

/// `sup (sum_i |<T z_i, g_i>|^{q*})^{1/q*} / pos_weak_{p*}(g)` over `z_i` in
/// the unit ball of `E` and functionals `g_i` on `F`.
///
/// Each start alternates the closed-form `z`-step with a ratio ascent over
/// `g` for fixed `z`; the best end points are then refined by the same exact
/// alternation as the other estimators. The certificate is the witness
/// sequence `x_i = lambda_i z_i`.
pub fn majorizing_norm(t: &LinearOperator, params: NormParams, m: usize, cfg: &SearchConfig) -> Result<NormEstimate> {
    cfg.validate()?;
    check_m(m)?;
    let (alpha, tau) = IdealKind::Majorizing.pair(params);
    let dual_f = t.codomain.dual();
    let polar = SeqBall::new(tau.dual(), &dual_f, cfg);
    let src = SeqBall::new(alpha, &t.domain, cfg);
    let (n, k) = (t.domain.dim(), t.codomain.dim());
    let qs = params.q.conjugate().value();
    let seed = rng::derive(cfg.seed, 0xc);
    let inner = SearchConfig {
        starts: 0,
        max_iters: (cfg.max_iters / 10).max(5),
        seed,
        ..cfg.clone()
    };
    let screen = SearchConfig {
        max_iters: 10,
        ..inner.clone()
    };
    let mut iterations = 0;
    let mut z = vec![0.0; m * n];
    let mut tz = vec![0.0; m * k];
    let mut tg = vec![0.0; m * n];
    // alternate the closed-form z-step with a ratio ascent over g
    let mut run = |g: &mut Vec<f64>, rounds: usize, cfg: &SearchConfig, stream: u64| {
        let mut value = f64::NEG_INFINITY;
        for _ in 0..rounds {
            t.adjoint_rows(g, &mut tg);
            for (gi, zi) in tg.chunks(n).zip(z.chunks_mut(n)) {
                t.domain.ball_argmax(gi, zi);
            }
            t.apply_rows(&z, &mut tz);
            let p = FixedZ {
                tz: &tz,
                k,
                qs,
                polar: &polar,
                blocks: [Block {
                    len: m * k,
                    nonneg: false,
                }],
            };
            let (v, it) = ratio::ascend(&p, g, cfg, stream);
            iterations += it;
            if !(v > value * (1.0 + 1e-9)) {
                value = value.max(v);
                break;
            }
            value = v;
        }
        value
    };
    // every start gets one short round; the best few are run to convergence
    const SCREEN_KEEP: usize = 8;
    const ROUNDS_Z: usize = 4;
    let mut short: Vec<(f64, Vec<f64>)> = Vec::new();
    for start in 0..cfg.starts {
        let mut r = rng::stream(seed, start as u64);
        let mut g: Vec<f64> = (0..m * k).map(|_| rng::uniform(&mut r, -1.0, 1.0)).collect();
        let value = run(&mut g, 1, &screen, start as u64);
        keep_top(&mut short, value, g, SCREEN_KEEP);
    }
    let mut top: Vec<(f64, Vec<f64>)> = Vec::new();
    for (i, (_, mut g)) in short.into_iter().enumerate() {
        let value = run(&mut g, ROUNDS_Z, &inner, (cfg.starts + i) as u64);
        keep_top(&mut top, value, g, POLISH);
    }
    let mut best = NormEstimate {
        value: 0.0,
        certificate: vec![0.0; m * n],
        exact: false,
        method: Method::MultistartAscent,
        starts_used: cfg.starts,
        iterations,
        seed: cfg.seed,
    };
    let mut witnesses = vec![norm_witness(t, m, cfg)];
    for (_, g) in top {
        t.adjoint_rows(&g, &mut tg);
        let mut s = vec![0.0; m * n];
        src.lmo(&tg, &mut s)?;
        witnesses.push(s);
    }
    for s in witnesses {
        let (value, s, rounds) = alternate(t, m, &src, &polar, s, cfg)?;
        best.iterations += rounds;
        if value > best.value {
            best.value = value;
            best.certificate = s;
        }
    }
    Ok(best)
}

/// `g -> ||(<T z_i, g_i>)_i||_{q*}` over `pos_weak_{p*}(g)`, for fixed `z`.
fn keep_top(top: &mut Vec<(f64, Vec<f64>)>, value: f64, x: Vec<f64>, keep: usize) {
    if value.is_finite() && (top.len() < keep || value > top[top.len() - 1].0) {
        let at = top.iter().position(|t| value > t.0).unwrap_or(top.len());
        top.insert(at, (value, x));
        top.truncate(keep);
    }
}

struct FixedZ<'a> {
    tz: &'a [f64],
    k: usize,
    qs: f64,
    polar: &'a SeqBall<'a>,
    blocks: [Block; 1],
}

impl RatioProblem for FixedZ<'_> {
    fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    fn numerator(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        let pair: Vec<f64> = x.chunks(self.k).zip(self.tz.chunks(self.k)).map(|(g, y)| dot(g, y)).collect();
        let mut psi = vec![0.0; pair.len()];
        let v = lp_grad(&pair, self.qs, &mut psi);
        for (i, (gr, y)) in grad.chunks_mut(self.k).zip(self.tz.chunks(self.k)).enumerate() {
            for j in 0..self.k {
                gr[j] = psi[i] * y[j];
            }
        }
        v
    }

    fn block_norm(&self, _b: usize, xb: &[f64], grad: &mut [f64]) -> f64 {
        self.polar.value(xb, grad)
    }
}

/// The Cohen nuclear norms: left `pos_weak_q -> cohen_p`, right
/// `weak_q -> pos_strong_p`, both `pos_weak_q -> pos_strong_p`; `p < inf`.
pub fn cohen_nuclear_norm(
    t: &LinearOperator,
    side: CnSide,
    params: NormParams,
    m: usize,
    cfg: &SearchConfig,
) -> Result<NormEstimate> {
    cfg.validate()?;
    check_m(m)?;
    if params.p.is_infinite() {
        return Err(Error::InvalidParameter {
            name: "p",
            value: f64::INFINITY,
            reason: "Cohen nuclear norms need p < inf",
        });
    }
    let (a, b) = IdealKind::Cn(side).pair(params);
    induced(t, a, b, m, cfg)
}

/// Any ideal norm by kind.
pub fn ideal_norm(
    kind: IdealKind,
    t: &LinearOperator,
    params: NormParams,
    m: usize,
    cfg: &SearchConfig,
) -> Result<NormEstimate> {
    match kind {
        IdealKind::Lambda => lambda_norm(t, params, m, cfg),
        IdealKind::DPlus => dplus_norm(t, params, m, cfg),
        IdealKind::Majorizing => majorizing_norm(t, params, m, cfg),
        IdealKind::Cn(side) => cohen_nuclear_norm(t, side, params, m, cfg),
    }
}

/// Value of `target(T S) / source(S)` at a given witness, for checking
/// certificates.
pub fn witness_ratio(
    t: &LinearOperator,
    source: SeqNorm,
    target: SeqNorm,
    witness: &VectorSequence,
    cfg: &SearchConfig,
) -> Result<f64> {
    let mut y = vec![0.0; witness.len() * t.codomain.dim()];
    t.apply_rows(witness.data(), &mut y);
    let ty = VectorSequence::from_flat(t.codomain.clone(), witness.len(), y)?;
    let num = crate::seq::seq_norm(&ty, target, cfg)?.value;
    let den = crate::seq::seq_norm(witness, source, cfg)?.value;
    Ok(if den > 0.0 { num / den } else { 0.0 })
}

#[cfg(test)]
mod tests;
