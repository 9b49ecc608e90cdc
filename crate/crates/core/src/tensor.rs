//! Lattice tensor norms on `l_p^m (x) X`.
//!
//! A tensor `u = sum_i e_i (x) x_i` is stored as the `m x n` array `U` whose
//! row `i` is `x_i`. Its associated operator `T_u` sends `w` in the dual of
//! `l_p^m` to `U^T w` in `X`.
//!
//! On coordinate lattices three facts turn the cone definitions into
//! computable sets, each checked by brute force in the tests:
//!
//! * `u` lies in the injective cone iff `U >= 0` entrywise;
//! * `v +- u` both lie in it iff `V >= |U|`;
//! * a bilinear form `(a, x) -> a^T B x` is positive iff `B >= 0`.
//!
//! Since the sup defining the Wittstock norm grows with `V`, its infimum
//! over dominating `v` is attained at `V = |U|`.

use alloc::vec;
use alloc::vec::Vec;
use core::cell::RefCell;
use core::fmt;

use crate::ideal::{induced_map_constant, LinearOperator};
use crate::lattice::{Exponent, LatticeSpace, VectorSequence};
use crate::math::{dot, lp, lp_grad, sign};
use crate::search::{
    maximize_convex_over_positive_ball, maximize_linear_over_norm_body, maximize_over, ConvexObjective, Method,
    NormEstimate, NormOracle, SearchConfig,
};
use crate::seq::{certify_config, cohen_norm, inner_config, strong_norm, weak_norm, SeqNorm, SeqNormKind};
use crate::{Error, Result};

/// `u = sum_i e_i (x) x_i` in `l_p^m (x) X`.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorElement {
    p: Exponent,
    rows: VectorSequence,
}

impl TensorElement {
    pub fn new(p: Exponent, rows: VectorSequence) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::ZeroDimension);
        }
        Ok(TensorElement { p, rows })
    }

    /// The rank-one tensor `a (x) x`.
    pub fn rank_one(p: Exponent, a: &[f64], space: LatticeSpace, x: &[f64]) -> Result<Self> {
        space.check_len(x)?;
        let data = a.iter().flat_map(|&ai| x.iter().map(move |&xj| ai * xj)).collect();
        TensorElement::new(p, VectorSequence::from_flat(space, a.len(), data)?)
    }

    pub fn p(&self) -> Exponent {
        self.p
    }

    pub fn rows(&self) -> &VectorSequence {
        &self.rows
    }

    pub fn space(&self) -> &LatticeSpace {
        self.rows.space()
    }

    /// Number of rows `m`.
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// `T_u(w) = U^T w`.
    pub fn apply(&self, w: &[f64]) -> Result<Vec<f64>> {
        if w.len() != self.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                actual: w.len(),
            });
        }
        let mut out = vec![0.0; self.rows.dim()];
        for (wi, row) in w.iter().zip(self.rows.rows()) {
            for (o, x) in out.iter_mut().zip(row) {
                *o += wi * x;
            }
        }
        Ok(out)
    }
}

/// A positive bilinear form `(a, x) -> a^T B x` on `l_p^m x X`.
#[derive(Clone, Debug, PartialEq)]
pub struct PositiveBilinearForm {
    p: Exponent,
    space: LatticeSpace,
    rows: usize,
    data: Vec<f64>,
}

impl PositiveBilinearForm {
    /// `data` is `B` row-major, `m x dim X`.
    pub fn new(p: Exponent, space: LatticeSpace, rows: usize, data: Vec<f64>) -> Result<Self> {
        let n = space.dim();
        if data.len() != rows * n {
            return Err(Error::LengthMismatch {
                expected: rows * n,
                actual: data.len(),
            });
        }
        if let Some(index) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        if let Some(k) = data.iter().position(|&v| v < 0.0) {
            return Err(Error::NegativeEntry { row: k / n, col: k % n });
        }
        Ok(PositiveBilinearForm { p, space, rows, data })
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn evaluate(&self, a: &[f64], x: &[f64]) -> f64 {
        let n = self.space.dim();
        (0..self.rows).map(|i| a[i] * dot(&self.data[i * n..(i + 1) * n], x)).sum()
    }

    /// `sup |a^T B x|` over both unit balls, i.e. `sup_{x in B_X+} ||B x||_{p*}`.
    pub fn norm(&self, cfg: &SearchConfig) -> NormEstimate {
        let f = FormObjective {
            b: &self.data,
            rows: self.rows,
            q: self.p.conjugate().value(),
        };
        maximize_convex_over_positive_ball(&f, &self.space, cfg)
    }

    /// Value of the form on a tensor: `sum_i phi(e_i, x_i) = <B, U>`.
    pub fn pair(&self, u: &TensorElement) -> Result<f64> {
        if u.rows.data().len() != self.data.len() {
            return Err(Error::LengthMismatch {
                expected: self.data.len(),
                actual: u.rows.data().len(),
            });
        }
        Ok(dot(&self.data, u.rows.data()))
    }
}

/// `x -> || |B| x ||_q` for an `rows x n` array `B`.
struct FormObjective<'a> {
    b: &'a [f64],
    rows: usize,
    q: f64,
}

impl FormObjective<'_> {
    fn image(&self, x: &[f64]) -> Vec<f64> {
        let n = x.len();
        (0..self.rows)
            .map(|i| self.b[i * n..(i + 1) * n].iter().zip(x).map(|(b, x)| b.abs() * x).sum())
            .collect()
    }
}

impl ConvexObjective for FormObjective<'_> {
    fn value(&self, x: &[f64]) -> f64 {
        lp(&self.image(x), self.q)
    }

    fn gradient(&self, x: &[f64], g: &mut [f64]) -> f64 {
        let n = x.len();
        let y = self.image(x);
        let mut psi = vec![0.0; self.rows];
        let v = lp_grad(&y, self.q, &mut psi);
        g.iter_mut().for_each(|t| *t = 0.0);
        for i in 0..self.rows {
            for j in 0..n {
                g[j] += psi[i] * self.b[i * n + j].abs();
            }
        }
        v
    }
}

/// The bilinear-form norm as a constraint oracle on arrays `B`, evaluated
/// on `|B|` so that it stays a norm off the positive cone.
struct FormNorm {
    space: LatticeSpace,
    rows: usize,
    q: f64,
    hint: RefCell<Vec<f64>>,
    fast: SearchConfig,
    medium: SearchConfig,
    precise: SearchConfig,
}

impl FormNorm {
    fn new(space: &LatticeSpace, rows: usize, p: Exponent, cfg: &SearchConfig) -> FormNorm {
        let n = space.dim();
        FormNorm {
            space: space.clone(),
            rows,
            q: p.conjugate().value(),
            hint: RefCell::new(Vec::new()),
            fast: inner_config(cfg, n),
            medium: SearchConfig {
                starts: 2 * n + 8,
                ..certify_config(cfg, n)
            },
            precise: certify_config(cfg, n),
        }
    }

    fn solve(&self, b: &[f64], cfg: &SearchConfig) -> NormEstimate {
        let f = FormObjective {
            b,
            rows: self.rows,
            q: self.q,
        };
        let hint = self.hint.borrow().clone();
        let hints: Vec<&[f64]> = if hint.len() == self.space.dim() {
            vec![&hint]
        } else {
            Vec::new()
        };
        let est = maximize_over(&f, &self.space, true, cfg, &hints);
        *self.hint.borrow_mut() = est.certificate.clone();
        est
    }
}

impl NormOracle for FormNorm {
    fn eval(&self, b: &[f64], g: &mut [f64]) -> f64 {
        let n = self.space.dim();
        let est = self.solve(b, &self.fast);
        let x = &est.certificate;
        let f = FormObjective {
            b,
            rows: self.rows,
            q: self.q,
        };
        let mut psi = vec![0.0; self.rows];
        lp_grad(&f.image(x), self.q, &mut psi);
        for i in 0..self.rows {
            for j in 0..n {
                g[i * n + j] = sign(b[i * n + j]) * psi[i] * x[j];
            }
        }
        est.value
    }

    fn value(&self, b: &[f64]) -> f64 {
        self.solve(b, &self.fast).value
    }

    fn certify(&self, b: &[f64]) -> f64 {
        self.solve(b, &self.precise).value
    }

    fn confirm(&self, b: &[f64]) -> f64 {
        self.solve(b, &self.medium).value
    }
}

/// True iff `T_u` maps positive functionals to positive vectors, which on
/// coordinate lattices means `U >= 0`.
pub fn injective_cone_member(u: &TensorElement) -> bool {
    u.rows.is_nonneg()
}

/// `w -> || |U|^T w ||_X`.
struct WittstockObjective<'a> {
    abs: Vec<f64>,
    space: &'a LatticeSpace,
}

impl WittstockObjective<'_> {
    fn image(&self, w: &[f64]) -> Vec<f64> {
        let n = self.space.dim();
        let mut y = vec![0.0; n];
        for (wi, row) in w.iter().zip(self.abs.chunks(n)) {
            for (o, x) in y.iter_mut().zip(row) {
                *o += wi * x;
            }
        }
        y
    }
}

impl ConvexObjective for WittstockObjective<'_> {
    fn value(&self, w: &[f64]) -> f64 {
        self.space.norm(&self.image(w))
    }

    fn gradient(&self, w: &[f64], g: &mut [f64]) -> f64 {
        let n = self.space.dim();
        let y = self.image(w);
        let mut phi = vec![0.0; n];
        let v = self.space.norming_functional(&y, &mut phi);
        for (gi, row) in g.iter_mut().zip(self.abs.chunks(n)) {
            *gi = dot(row, &phi);
        }
        v
    }
}

/// Positive injective norm: `sup || |U|^T w ||_X` over `w >= 0` in the unit
/// ball of `l_{p*}^m`. Exact for `p` in {1, inf}; the certificate is `w`.
pub fn wittstock_norm(u: &TensorElement, cfg: &SearchConfig) -> NormEstimate {
    let f = WittstockObjective {
        abs: u.rows.data().iter().map(|v| v.abs()).collect(),
        space: u.space(),
    };
    let left = LatticeSpace::new(u.p.conjugate(), vec![1.0; u.len()]).expect("unit weights are valid");
    maximize_convex_over_positive_ball(&f, &left, cfg)
}

/// Positive projective norm: `sup |<B, U>|` over arrays `B >= 0` whose
/// bilinear form has norm at most one. The certificate is the maximizing `B`
/// (negated when `-U` wins).
///
/// For `p = 1` this is `max(sum_i ||x_i+||, sum_i ||x_i-||)` and for
/// `p = inf` it is `max(||sup_i x_i+||, ||sup_i x_i-||)`, both exact.
pub fn fremlin_norm(u: &TensorElement, cfg: &SearchConfig) -> Result<NormEstimate> {
    cfg.validate()?;
    let space = u.space();
    let (m, n) = (u.len(), space.dim());
    let data = u.rows.data();
    let parts = [
        data.iter().map(|v| v.max(0.0)).collect::<Vec<f64>>(),
        data.iter().map(|v| (-v).max(0.0)).collect::<Vec<f64>>(),
    ];
    if u.p.is_polyhedral() {
        let mut best = NormEstimate::exact(0.0, vec![0.0; m * n], Method::ClosedForm);
        best.seed = cfg.seed;
        for (k, part) in parts.iter().enumerate() {
            let s = if k == 0 { 1.0 } else { -1.0 };
            let mut cert = vec![0.0; m * n];
            let value = if u.p.is_one() {
                let mut total = 0.0;
                for (row, out) in part.chunks(n).zip(cert.chunks_mut(n)) {
                    total += space.norming_functional(row, out);
                }
                total
            } else {
                let sup: Vec<f64> = (0..n)
                    .map(|j| (0..m).map(|i| part[i * n + j]).fold(0.0, f64::max))
                    .collect();
                let mut phi = vec![0.0; n];
                let v = space.norming_functional(&sup, &mut phi);
                // all the mass of each column goes to a row attaining the sup
                for j in 0..n {
                    let i = (0..m).find(|&i| part[i * n + j] == sup[j]).unwrap_or(0);
                    cert[i * n + j] = phi[j];
                }
                v
            };
            if value > best.value {
                cert.iter_mut().for_each(|c| *c *= s);
                best.value = value;
                best.certificate = cert;
            }
        }
        return Ok(best);
    }
    let oracle = FormNorm::new(space, m, u.p, cfg);
    let mut best: Option<NormEstimate> = None;
    for (k, part) in parts.iter().enumerate() {
        if part.iter().all(|&v| v == 0.0) {
            continue;
        }
        let mut est = maximize_linear_over_norm_body(part, &oracle, (m, n), true, cfg)?;
        if k == 1 {
            est.certificate.iter_mut().for_each(|c| *c = -*c);
        }
        best = Some(match best {
            Some(b) if b.value >= est.value => b,
            _ => est,
        });
    }
    Ok(best.unwrap_or_else(|| {
        let mut zero = NormEstimate::exact(0.0, vec![0.0; m * n], Method::ClosedForm);
        zero.seed = cfg.seed;
        zero
    }))
}

/// The classical norms on `l_p^m (x) X` for `p < inf`.
#[derive(Clone, Debug, PartialEq)]
pub struct GrothendieckNorms {
    /// Injective norm, the weak `p` norm of the rows.
    pub eps: NormEstimate,
    /// Projective norm, the Cohen `p` norm of the rows.
    pub pi: NormEstimate,
    /// `(sum_i ||x_i||^p)^(1/p)`.
    pub delta: NormEstimate,
}

pub fn grothendieck_norms(u: &TensorElement, cfg: &SearchConfig) -> Result<GrothendieckNorms> {
    Ok(GrothendieckNorms {
        eps: weak_norm(&u.rows, u.p, cfg),
        pi: cohen_norm(&u.rows, u.p, cfg)?,
        delta: strong_norm(&u.rows, u.p),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TensorNormKind {
    Wittstock,
    Fremlin,
    GrothEps,
    GrothPi,
    Delta,
}

impl TensorNormKind {
    pub const ALL: [TensorNormKind; 5] = [
        TensorNormKind::Wittstock,
        TensorNormKind::Fremlin,
        TensorNormKind::GrothEps,
        TensorNormKind::GrothPi,
        TensorNormKind::Delta,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TensorNormKind::Wittstock => "wittstock",
            TensorNormKind::Fremlin => "fremlin",
            TensorNormKind::GrothEps => "groth-eps",
            TensorNormKind::GrothPi => "groth-pi",
            TensorNormKind::Delta => "delta",
        }
    }

    /// The sequence norm this tensor norm is identified with.
    pub fn sequence_kind(self) -> SeqNormKind {
        match self {
            TensorNormKind::Wittstock => SeqNormKind::PosWeak,
            TensorNormKind::Fremlin => SeqNormKind::PosStrong,
            TensorNormKind::GrothEps => SeqNormKind::Weak,
            TensorNormKind::GrothPi => SeqNormKind::Cohen,
            TensorNormKind::Delta => SeqNormKind::Strong,
        }
    }
}

impl fmt::Display for TensorNormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A tensor norm on `l_p^m (x) X` for a given `p`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TensorNorm {
    pub kind: TensorNormKind,
    pub p: Exponent,
}

impl TensorNorm {
    pub fn new(kind: TensorNormKind, p: Exponent) -> Self {
        TensorNorm { kind, p }
    }

    pub fn sequence_norm(self) -> SeqNorm {
        SeqNorm::new(self.kind.sequence_kind(), self.p)
    }
}

/// Any tensor norm by kind; the left exponent is the tensor's own `p`.
pub fn tensor_norm(u: &TensorElement, kind: TensorNormKind, cfg: &SearchConfig) -> Result<NormEstimate> {
    match kind {
        TensorNormKind::Wittstock => Ok(wittstock_norm(u, cfg)),
        TensorNormKind::Fremlin => fremlin_norm(u, cfg),
        TensorNormKind::GrothEps => Ok(weak_norm(&u.rows, u.p, cfg)),
        TensorNormKind::GrothPi => cohen_norm(&u.rows, u.p, cfg),
        TensorNormKind::Delta => Ok(strong_norm(&u.rows, u.p)),
    }
}

/// `sup target((I (x) T) u) / source(u)` over tensors with `m` rows, where
/// `(I (x) T) u` has rows `T x_i`. Through the identification of each tensor
/// norm with a sequence norm this is [`induced_map_constant`] of the
/// matching pair, which is what gets computed. Sources must be Wittstock,
/// injective or `Delta`; projective targets need `p < inf`.
pub fn induced_tensor_constant(
    t: &LinearOperator,
    source: TensorNorm,
    target: TensorNorm,
    m: usize,
    cfg: &SearchConfig,
) -> Result<NormEstimate> {
    let unsupported = Error::UnsupportedPair {
        from: source.kind.as_str(),
        to: target.kind.as_str(),
    };
    if matches!(source.kind, TensorNormKind::Fremlin | TensorNormKind::GrothPi) {
        return Err(unsupported);
    }
    if target.p.is_infinite() && matches!(target.kind, TensorNormKind::Fremlin | TensorNormKind::GrothPi) {
        return Err(Error::InvalidParameter {
            name: "p",
            value: f64::INFINITY,
            reason: "projective targets need p < inf",
        });
    }
    induced_map_constant(t, source.sequence_norm(), target.sequence_norm(), m, cfg)
}

#[cfg(test)]
mod tests;
