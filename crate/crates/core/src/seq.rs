//! Norms of finite sequences `(x_1, ..., x_m)` in a lattice `X`.
//!
//! * strong `q`: `(sum_i ||x_i||^q)^(1/q)`;
//! * weak `q`: `sup_{x* in B_X*} (sum_i |<x_i, x*>|^q)^(1/q)`;
//! * positive weak `q`: the same supremum over `x* >= 0` paired with `|x_i|`;
//! * Cohen `p`: `sup <A, S>` over dual sequences `A` of weak `p*` norm one;
//! * positive strong `p`: `sup <A, |S|>` over `A >= 0` of positive weak `p*`
//!   norm one.
//!
//! Sequences are stored as `m x n` arrays; the pairing of a sequence with a
//! dual sequence is the entrywise dot product.

use alloc::vec;
use alloc::vec::Vec;
use core::cell::RefCell;
use core::fmt;

use crate::lattice::{Exponent, LatticeSpace, VectorSequence};
use crate::math::{dot, lp, lp_grad, lp_grad_in_place, sign, Buf};
use crate::rng;
use crate::search::{
    maximize_linear_over_norm_body, maximize_over,
    ConvexObjective, Method, NormEstimate, NormOracle, SearchConfig,
};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SeqNormKind {
    Strong,
    Weak,
    PosWeak,
    Cohen,
    PosStrong,
}

impl SeqNormKind {
    pub const ALL: [SeqNormKind; 5] = [
        SeqNormKind::Strong,
        SeqNormKind::Weak,
        SeqNormKind::PosWeak,
        SeqNormKind::Cohen,
        SeqNormKind::PosStrong,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SeqNormKind::Strong => "strong",
            SeqNormKind::Weak => "weak",
            SeqNormKind::PosWeak => "pos-weak",
            SeqNormKind::Cohen => "cohen",
            SeqNormKind::PosStrong => "pos-strong",
        }
    }

    /// The kind whose unit ball (with the conjugate exponent, on the dual
    /// lattice) is the polar of this kind's unit ball.
    pub fn dual(self) -> SeqNormKind {
        match self {
            SeqNormKind::Strong => SeqNormKind::Strong,
            SeqNormKind::Weak => SeqNormKind::Cohen,
            SeqNormKind::PosWeak => SeqNormKind::PosStrong,
            SeqNormKind::Cohen => SeqNormKind::Weak,
            SeqNormKind::PosStrong => SeqNormKind::PosWeak,
        }
    }
}

impl fmt::Display for SeqNormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A sequence norm together with its exponent.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeqNorm {
    pub kind: SeqNormKind,
    pub exponent: Exponent,
}

impl SeqNorm {
    pub fn new(kind: SeqNormKind, exponent: Exponent) -> Self {
        SeqNorm { kind, exponent }
    }

    pub fn dual(self) -> SeqNorm {
        SeqNorm {
            kind: self.kind.dual(),
            exponent: self.exponent.conjugate(),
        }
    }
}

impl fmt::Display for SeqNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}_{}", self.kind, self.exponent)
    }
}

/// Budget for the inner weak-norm searches nested inside other searches.
pub(crate) fn inner_config(cfg: &SearchConfig, n: usize) -> SearchConfig {
    SearchConfig {
        starts: n + 1,
        max_iters: 50,
        step_shrink: cfg.step_shrink,
        tol: 1e-10,
        seed: rng::derive(cfg.seed, 0x1),
    }
}

/// Budget for re-evaluating an inner weak norm when certifying a result.
pub(crate) fn certify_config(cfg: &SearchConfig, n: usize) -> SearchConfig {
    SearchConfig {
        starts: cfg.starts.max(n + 16),
        max_iters: cfg.max_iters.max(200),
        step_shrink: cfg.step_shrink,
        tol: 1e-13,
        seed: rng::derive(cfg.seed, 0x2),
    }
}

/// Strong `q` norm of an `m x n` array of rows in `space`; the gradient (a
/// norming dual array) is written into `grad` when given.
pub(crate) fn strong_value(space: &LatticeSpace, data: &[f64], q: Exponent, grad: Option<&mut [f64]>) -> f64 {
    let n = space.dim();
    let m = data.len() / n;
    if m == 0 {
        return 0.0;
    }
    let mut t = vec![0.0; m];
    match grad {
        None => {
            for (i, row) in data.chunks(n).enumerate() {
                t[i] = space.norm(row);
            }
            lp(&t, q.value())
        }
        Some(g) => {
            for (i, row) in data.chunks(n).enumerate() {
                t[i] = space.norming_functional(row, &mut g[i * n..(i + 1) * n]);
            }
            let mut c = vec![0.0; m];
            let v = lp_grad(&t, q.value(), &mut c);
            for i in 0..m {
                g[i * n..(i + 1) * n].iter_mut().for_each(|x| *x *= c[i]);
            }
            v
        }
    }
}

/// `x* -> ||(<r_i, x*>)_i||_q` with `r_i = x_i`, or `|x_i|` when `positive`.
struct WeakObjective<'a> {
    data: &'a [f64],
    n: usize,
    q: f64,
    positive: bool,
}

impl WeakObjective<'_> {
    fn pairings(&self, w: &[f64]) -> Buf {
        let mut out = Buf::zeros(self.data.len() / self.n);
        for (o, row) in out.iter_mut().zip(self.data.chunks(self.n)) {
            *o = if self.positive {
                row.iter().zip(w).map(|(a, b)| a.abs() * b).sum()
            } else {
                dot(row, w)
            };
        }
        out
    }
}

impl ConvexObjective for WeakObjective<'_> {
    fn value(&self, w: &[f64]) -> f64 {
        lp(&self.pairings(w), self.q)
    }

    fn gradient(&self, w: &[f64], g: &mut [f64]) -> f64 {
        let mut psi = self.pairings(w);
        let val = lp_grad_in_place(&mut psi, self.q);
        g.iter_mut().for_each(|x| *x = 0.0);
        for (row, p) in self.data.chunks(self.n).zip(psi.iter()) {
            for (gj, a) in g.iter_mut().zip(row) {
                *gj += p * if self.positive { a.abs() } else { *a };
            }
        }
        val
    }
}

/// Weak (or positive weak) `q` norm of an array of rows, maximized over the
/// unit ball of `ball`, the dual of the row lattice. The certificate is the
/// maximizing functional `x*`. When `grad` is given it receives a subgradient
/// with respect to the array.
pub(crate) fn weak_value(
    ball: &LatticeSpace,
    data: &[f64],
    q: Exponent,
    positive: bool,
    cfg: &SearchConfig,
    grad: Option<&mut [f64]>,
) -> NormEstimate {
    weak_value_warm(ball, data, q, positive, cfg, grad, None)
}

/// [`weak_value`] that also starts from the two best maximizers of earlier
/// calls sharing `pool`. Cutting-plane methods revisit arrays whose norm is
/// attained at several functionals, and a fixed start set keeps missing
/// some of them.
pub(crate) fn weak_value_warm(
    ball: &LatticeSpace,
    data: &[f64],
    q: Exponent,
    positive: bool,
    cfg: &SearchConfig,
    grad: Option<&mut [f64]>,
    pool: Option<&RefCell<Vec<Vec<f64>>>>,
) -> NormEstimate {
    let n = ball.dim();
    let f = WeakObjective {
        data,
        n,
        q: q.value(),
        positive,
    };
    let est = match pool {
        Some(cell) => {
            let mut scored: Vec<(f64, &[f64])> = Vec::new();
            let members = cell.borrow();
            for w in members.iter() {
                scored.push((f.value(w), w));
            }
            scored.sort_by(|a, b| b.0.total_cmp(&a.0));
            let hints: Vec<&[f64]> = scored.iter().take(2).map(|t| t.1).collect();
            let est = maximize_over(&f, ball, positive, cfg, &hints);
            drop(members);
            remember(&mut cell.borrow_mut(), &est.certificate);
            est
        }
        None => maximize_over(&f, ball, positive, cfg, &[]),
    };
    if let Some(g) = grad {
        let w = &est.certificate;
        let mut psi = f.pairings(w);
        lp_grad_in_place(&mut psi, q.value());
        for (i, row) in data.chunks(n).enumerate() {
            for j in 0..n {
                let s = if positive { sign(row[j]) } else { 1.0 };
                g[i * n + j] = psi[i] * s * w[j];
            }
        }
    }
    est
}

const POOL: usize = 16;

fn remember(pool: &mut Vec<Vec<f64>>, w: &[f64]) {
    let seen = pool
        .iter()
        .any(|p| p.iter().zip(w).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() < 1e-12);
    if !seen && w.iter().any(|&v| v != 0.0) {
        if pool.len() == POOL {
            pool.remove(0);
        }
        pool.push(w.to_vec());
    }
}

/// Weak or positive weak norm of an array, as a constraint oracle for the
/// linear-over-norm-body solver.
pub(crate) struct WeakNu {
    ball: LatticeSpace,
    pool: RefCell<Vec<Vec<f64>>>,
    q: Exponent,
    positive: bool,
    fast: SearchConfig,
    medium: SearchConfig,
    precise: SearchConfig,
}

impl WeakNu {
    pub fn new(space: &LatticeSpace, q: Exponent, positive: bool, cfg: &SearchConfig) -> WeakNu {
        let n = space.dim();
        WeakNu {
            ball: space.dual(),
            pool: RefCell::new(Vec::new()),
            q,
            positive,
            fast: inner_config(cfg, n),
            medium: SearchConfig {
                starts: 2 * n + 8,
                ..certify_config(cfg, n)
            },
            precise: certify_config(cfg, n),
        }
    }
}

impl NormOracle for WeakNu {
    fn eval(&self, u: &[f64], g: &mut [f64]) -> f64 {
        weak_value_warm(&self.ball, u, self.q, self.positive, &self.fast, Some(g), Some(&self.pool)).value
    }

    fn value(&self, u: &[f64]) -> f64 {
        weak_value_warm(&self.ball, u, self.q, self.positive, &self.fast, None, Some(&self.pool)).value
    }

    fn certify(&self, u: &[f64]) -> f64 {
        weak_value(&self.ball, u, self.q, self.positive, &self.precise, None).value
    }

    fn confirm(&self, u: &[f64]) -> f64 {
        weak_value(&self.ball, u, self.q, self.positive, &self.medium, None).value
    }
}

/// The unit ball of a sequence norm on `m`-term sequences in `space`.
pub(crate) struct SeqBall<'a> {
    pub norm: SeqNorm,
    pub space: &'a LatticeSpace,
    pub cfg: &'a SearchConfig,
    dual: LatticeSpace,
}

impl<'a> SeqBall<'a> {
    pub fn new(norm: SeqNorm, space: &'a LatticeSpace, cfg: &'a SearchConfig) -> SeqBall<'a> {
        SeqBall {
            norm,
            space,
            cfg,
            dual: space.dual(),
        }
    }

    /// Norm of `x` with a subgradient written into `grad`. Cheap for strong,
    /// weak and positive weak norms; the others go through [`Self::lmo`] of
    /// the polar ball and leave `grad` zero.
    pub fn value(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        let q = self.norm.exponent;
        let inner = inner_config(self.cfg, self.space.dim());
        match self.norm.kind {
            SeqNormKind::Strong => strong_value(self.space, x, q, Some(grad)),
            SeqNormKind::Weak | SeqNormKind::PosWeak => {
                let positive = self.norm.kind == SeqNormKind::PosWeak;
                weak_value(&self.dual, x, q, positive, &inner, Some(grad)).value
            }
            SeqNormKind::Cohen | SeqNormKind::PosStrong => {
                grad.iter_mut().for_each(|g| *g = 0.0);
                let polar = SeqBall::new(self.norm.dual(), &self.dual, self.cfg);
                let mut out = vec![0.0; x.len()];
                polar.lmo(x, &mut out).map(|e| e.value).unwrap_or(0.0)
            }
        }
    }

    /// `sup <c, x>` over the ball, for `c` an array of rows in the dual
    /// lattice; the maximizer is written into `out`. The supremum equals the
    /// polar norm of `c`.
    pub fn lmo(&self, c: &[f64], out: &mut [f64]) -> Result<NormEstimate> {
        let n = self.space.dim();
        let m = c.len() / n;
        let q = self.norm.exponent;
        let dual = &self.dual;
        out.iter_mut().for_each(|v| *v = 0.0);
        if m == 0 {
            return Ok(NormEstimate::exact(0.0, Vec::new(), Method::ClosedForm));
        }
        match self.norm.kind {
            SeqNormKind::Strong => {
                let v = strong_value(dual, c, q.conjugate(), Some(out));
                let mut est = NormEstimate::exact(v, out.to_vec(), Method::ClosedForm);
                est.seed = self.cfg.seed;
                Ok(est)
            }
            SeqNormKind::Cohen | SeqNormKind::PosStrong => {
                let positive = self.norm.kind == SeqNormKind::PosStrong;
                let precise = certify_config(self.cfg, n);
                let est = weak_value(self.space, c, q.conjugate(), positive, &precise, None);
                let w = &est.certificate;
                let f = WeakObjective {
                    data: c,
                    n,
                    q: q.conjugate().value(),
                    positive,
                };
                let mut lam = f.pairings(w);
                lp_grad_in_place(&mut lam, q.conjugate().value());
                for i in 0..m {
                    for j in 0..n {
                        let s = if positive { sign(c[i * n + j]) } else { 1.0 };
                        out[i * n + j] = lam[i] * s * w[j];
                    }
                }
                Ok(NormEstimate {
                    certificate: out.to_vec(),
                    ..est
                })
            }
            SeqNormKind::Weak | SeqNormKind::PosWeak => {
                let positive = self.norm.kind == SeqNormKind::PosWeak;
                let nu = WeakNu::new(self.space, q, positive, self.cfg);
                let target: Vec<f64> = if positive {
                    c.iter().map(|v| v.abs()).collect()
                } else {
                    c.to_vec()
                };
                let est = maximize_linear_over_norm_body(&target, &nu, (m, n), positive, self.cfg)?;
                for k in 0..c.len() {
                    out[k] = if positive {
                        sign(c[k]) * est.certificate[k]
                    } else {
                        est.certificate[k]
                    };
                }
                Ok(est)
            }
        }
    }
}

fn check_finite_exponent(p: Exponent, what: &'static str) -> Result<()> {
    if p.is_infinite() {
        return Err(Error::InvalidParameter {
            name: "p",
            value: f64::INFINITY,
            reason: what,
        });
    }
    Ok(())
}

fn closed_strong(s: &VectorSequence, q: Exponent, cfg: &SearchConfig) -> NormEstimate {
    let mut g = vec![0.0; s.data().len()];
    let v = strong_value(s.space(), s.data(), q, Some(&mut g));
    let mut est = NormEstimate::exact(v, g, Method::ClosedForm);
    est.seed = cfg.seed;
    est
}

/// Strong `q` norm, exact. The certificate is a norming dual array.
pub fn strong_norm(s: &VectorSequence, q: Exponent) -> NormEstimate {
    closed_strong(s, q, &SearchConfig::default())
}

/// Weak `q` norm. Exact when the dual ball is polyhedral; the certificate is
/// the maximizing `x*` in the dual lattice.
pub fn weak_norm(s: &VectorSequence, q: Exponent, cfg: &SearchConfig) -> NormEstimate {
    weak_value(&s.space().dual(), s.data(), q, false, cfg, None)
}

/// Positive weak `q` norm; the certificate is the maximizing `x* >= 0`.
pub fn positive_weak_norm(s: &VectorSequence, q: Exponent, cfg: &SearchConfig) -> NormEstimate {
    weak_value(&s.space().dual(), s.data(), q, true, cfg, None)
}

/// Cohen `p` norm for `p < inf`. At `p = 1` it is the strong 1 norm.
/// Otherwise the certificate is a dual array `A` with weak `p*` norm one and
/// `<A, S> = value`.
pub fn cohen_norm(s: &VectorSequence, p: Exponent, cfg: &SearchConfig) -> Result<NormEstimate> {
    check_finite_exponent(p, "the Cohen norm needs p < inf")?;
    dual_lmo(s, SeqNorm::new(SeqNormKind::Weak, p.conjugate()), cfg)
}

/// Positive strong `p` norm for `p < inf`. At `p = 1` it is the strong 1
/// norm. Otherwise the certificate is a dual array `A >= 0` with positive
/// weak `p*` norm one and `<A, |S|> = value`.
pub fn positive_strong_norm(s: &VectorSequence, p: Exponent, cfg: &SearchConfig) -> Result<NormEstimate> {
    check_finite_exponent(p, "the positive strong norm needs p < inf")?;
    let mut est = dual_lmo(s, SeqNorm::new(SeqNormKind::PosWeak, p.conjugate()), cfg)?;
    est.certificate.iter_mut().for_each(|v| *v = v.abs());
    Ok(est)
}

fn dual_lmo(s: &VectorSequence, polar: SeqNorm, cfg: &SearchConfig) -> Result<NormEstimate> {
    cfg.validate()?;
    if polar.exponent.is_infinite() {
        return Ok(closed_strong(s, Exponent::ONE, cfg));
    }
    let dual = s.space().dual();
    let ball = SeqBall::new(polar, &dual, cfg);
    let mut out = vec![0.0; s.data().len()];
    ball.lmo(s.data(), &mut out)
}

/// Any of the five norms by kind.
pub fn seq_norm(s: &VectorSequence, norm: SeqNorm, cfg: &SearchConfig) -> Result<NormEstimate> {
    match norm.kind {
        SeqNormKind::Strong => Ok(closed_strong(s, norm.exponent, cfg)),
        SeqNormKind::Weak => Ok(weak_norm(s, norm.exponent, cfg)),
        SeqNormKind::PosWeak => Ok(positive_weak_norm(s, norm.exponent, cfg)),
        SeqNormKind::Cohen => cohen_norm(s, norm.exponent, cfg),
        SeqNormKind::PosStrong => positive_strong_norm(s, norm.exponent, cfg),
    }
}

/// Norms of the tails `(x_{k+1}, ..., x_m)` for `k = 0, ..., m`; the last
/// entry is zero.
pub fn tail_profile(s: &VectorSequence, norm: SeqNorm, cfg: &SearchConfig) -> Result<Vec<f64>> {
    (0..=s.len())
        .map(|k| seq_norm(&s.suffix(k), norm, cfg).map(|e| e.value))
        .collect()
}

/// `sum_i <x_i, d_i>` for a sequence and a dual sequence of equal length.
pub fn duality_pairing(s: &VectorSequence, d: &VectorSequence) -> Result<f64> {
    if s.len() != d.len() {
        return Err(Error::LengthMismatch {
            expected: s.len(),
            actual: d.len(),
        });
    }
    if !d.space().approx_eq(&s.space().dual()) {
        return Err(Error::SpaceMismatch);
    }
    Ok(dot(s.data(), d.data()))
}

/// Independent estimate of the positive strong `p` norm from the dual side:
/// `samples` random nonnegative dual arrays are scored by
/// `<A, |S|> / pos_weak_{p*}(A)` and the best few are improved by ratio
/// ascent. Used to cross-check [`positive_strong_norm`].
pub fn dual_witness_sampler(
    s: &VectorSequence,
    p: Exponent,
    samples: usize,
    cfg: &SearchConfig,
) -> Result<NormEstimate> {
    use crate::ratio::{multistart, Block, RatioProblem};

    check_finite_exponent(p, "the positive strong norm needs p < inf")?;
    cfg.validate()?;
    let dual = s.space().dual();
    let d = s.data().len();
    let abs: Vec<f64> = s.data().iter().map(|v| v.abs()).collect();
    if d == 0 || abs.iter().all(|&v| v == 0.0) {
        return Ok(NormEstimate::exact(0.0, vec![0.0; d], Method::ClosedForm));
    }

    struct Problem<'a> {
        abs: &'a [f64],
        ball: SeqBall<'a>,
        blocks: [Block; 1],
    }
    impl RatioProblem for Problem<'_> {
        fn blocks(&self) -> &[Block] {
            &self.blocks
        }
        fn numerator(&self, x: &[f64], grad: &mut [f64]) -> f64 {
            grad.copy_from_slice(self.abs);
            dot(self.abs, x)
        }
        fn block_norm(&self, _b: usize, xb: &[f64], grad: &mut [f64]) -> f64 {
            self.ball.value(xb, grad)
        }
    }
    let problem = Problem {
        abs: &abs,
        ball: SeqBall::new(SeqNorm::new(SeqNormKind::PosWeak, p.conjugate()), &dual, cfg),
        blocks: [Block { len: d, nonneg: true }],
    };

    const KEEP: usize = 8;
    let mut top: Vec<(f64, Vec<f64>)> = Vec::new();
    let mut a = vec![0.0; d];
    let sample_seed = rng::derive(cfg.seed, 0x5a);
    for k in 0..samples {
        let mut r = rng::stream(sample_seed, k as u64);
        for v in a.iter_mut() {
            // some entries are switched off so that faces get sampled too
            *v = if rng::unit(&mut r) < 0.3 { 0.0 } else { rng::unit(&mut r) };
        }
        let score = crate::ratio::ratio(&problem, &a);
        if score.is_finite() && (top.len() < KEEP || score > top[top.len() - 1].0) {
            let at = top.iter().position(|t| score > t.0).unwrap_or(top.len());
            top.insert(at, (score, a.clone()));
            top.truncate(KEEP);
        }
    }
    let seeds: Vec<Vec<f64>> = top.into_iter().map(|t| t.1).collect();
    let ascent_cfg = SearchConfig { starts: 0, ..cfg.clone() };
    let best = multistart(&problem, &ascent_cfg, &seeds);
    let nu = WeakNu::new(&dual, p.conjugate(), true, cfg);
    let den = nu.certify(&best.point);
    let mut cert = best.point;
    cert.iter_mut().for_each(|v| *v /= den);
    Ok(NormEstimate {
        value: dot(&abs, &cert),
        certificate: cert,
        exact: false,
        method: Method::MultistartAscent,
        starts_used: samples,
        iterations: best.iterations,
        seed: cfg.seed,
    })
}

#[cfg(test)]
mod tests;
