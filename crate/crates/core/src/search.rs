//! Maximization of convex functions over lattice balls and of linear
//! functionals over the unit body of a norm.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::lattice::LatticeSpace;
use crate::math::{dot, euclid, sqrt};
use crate::rng;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct SearchConfig {
    pub starts: usize,
    pub max_iters: usize,
    pub step_shrink: f64,
    pub tol: f64,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            starts: 64,
            max_iters: 500,
            step_shrink: 0.5,
            tol: 1e-9,
            seed: 0,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.starts == 0 {
            return Err(invalid("starts", 0.0, "need at least one start"));
        }
        if self.max_iters == 0 {
            return Err(invalid("max_iters", 0.0, "need at least one iteration"));
        }
        if !(self.step_shrink > 0.0 && self.step_shrink < 1.0) {
            return Err(invalid("step_shrink", self.step_shrink, "must lie in (0, 1)"));
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(invalid("tol", self.tol, "must lie in (0, 1)"));
        }
        Ok(())
    }

    pub fn with_seed(&self, seed: u64) -> SearchConfig {
        SearchConfig {
            seed,
            ..self.clone()
        }
    }
}

fn invalid(name: &'static str, value: f64, reason: &'static str) -> Error {
    Error::InvalidParameter {
        name,
        value,
        reason,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    ClosedForm,
    VertexEnum,
    MultistartAscent,
    NormalizeAscend,
    GridOracle,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::ClosedForm => "closed_form",
            Method::VertexEnum => "vertex_enum",
            Method::MultistartAscent => "multistart_ascent",
            Method::NormalizeAscend => "normalize_ascend",
            Method::GridOracle => "grid_oracle",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A value together with the point that attains it.
///
/// Unless `exact` is set the value is a lower bound attained by
/// `certificate`; what the certificate contains is documented by each
/// estimator.
#[derive(Clone, Debug, PartialEq)]
pub struct NormEstimate {
    pub value: f64,
    pub certificate: Vec<f64>,
    pub exact: bool,
    pub method: Method,
    pub starts_used: usize,
    pub iterations: usize,
    pub seed: u64,
}

impl NormEstimate {
    pub(crate) fn exact(value: f64, certificate: Vec<f64>, method: Method) -> Self {
        NormEstimate {
            value,
            certificate,
            exact: true,
            method,
            starts_used: 0,
            iterations: 0,
            seed: 0,
        }
    }
}

/// A convex function on `R^n` with a (sub)gradient oracle.
pub trait ConvexObjective {
    fn value(&self, w: &[f64]) -> f64;
    /// Writes a subgradient at `w` into `g` and returns the value.
    fn gradient(&self, w: &[f64], g: &mut [f64]) -> f64;
}

/// A convex objective given by a closure; gradients are central differences.
pub struct FnObjective<F>(pub F);

impl<F: Fn(&[f64]) -> f64> ConvexObjective for FnObjective<F> {
    fn value(&self, w: &[f64]) -> f64 {
        (self.0)(w)
    }

    fn gradient(&self, w: &[f64], g: &mut [f64]) -> f64 {
        central_difference(&self.0, w, g)
    }
}

fn central_difference(f: &dyn Fn(&[f64]) -> f64, w: &[f64], g: &mut [f64]) -> f64 {
    let h = 1e-7 * (1.0 + euclid(w));
    let mut p = w.to_vec();
    for j in 0..w.len() {
        p[j] = w[j] + h;
        let up = f(&p);
        p[j] = w[j] - h;
        let down = f(&p);
        p[j] = w[j];
        g[j] = (up - down) / (2.0 * h);
    }
    f(w)
}

fn improves(new: f64, old: f64, tol: f64) -> bool {
    new > old + tol * old.abs().max(1.0)
}

/// Maximum of a convex `f` over the positive part of the unit ball of `ball`.
///
/// For `r` in {1, inf} the maximum is taken over the extreme points (and the
/// origin) and is exact. Otherwise each start runs linear-maximization steps
/// `w <- argmax_{B+} <grad f(w), .>`, which never decrease a convex `f`, and
/// falls back to shrinking projected gradient steps when those stall.
pub fn maximize_convex_over_positive_ball(
    f: &dyn ConvexObjective,
    ball: &LatticeSpace,
    cfg: &SearchConfig,
) -> NormEstimate {
    maximize_over(f, ball, true, cfg, &[])
}

/// Maximum of a convex `f` over the full unit ball of `ball`; same strategy as
/// [`maximize_convex_over_positive_ball`] with sign patterns included.
pub fn maximize_convex_over_ball(
    f: &dyn ConvexObjective,
    ball: &LatticeSpace,
    cfg: &SearchConfig,
) -> NormEstimate {
    maximize_over(f, ball, false, cfg, &[])
}

/// The multistart runs from the points of `hints` first.
pub(crate) fn maximize_over(
    f: &dyn ConvexObjective,
    ball: &LatticeSpace,
    positive: bool,
    cfg: &SearchConfig,
    hints: &[&[f64]],
) -> NormEstimate {
    let n = ball.dim();
    if ball.exponent().is_polyhedral() {
        let mut points = if positive {
            ball.positive_ball_extreme_points()
        } else {
            ball.ball_extreme_points_mod_sign().map(|mut pts| {
                let neg: Vec<Vec<f64>> = pts
                    .iter()
                    .map(|p| p.iter().map(|v| -v).collect())
                    .collect();
                pts.extend(neg);
                pts
            })
        }
        .expect("polyhedral ball with enumerable vertices");
        points.push(vec![0.0; n]);
        let mut best = f64::NEG_INFINITY;
        let mut arg = 0;
        for (k, p) in points.iter().enumerate() {
            let v = f.value(p);
            if v > best {
                best = v;
                arg = k;
            }
        }
        let count = points.len();
        let mut est = NormEstimate::exact(best, points.swap_remove(arg), Method::VertexEnum);
        est.starts_used = count;
        est.seed = cfg.seed;
        return est;
    }

    let structured = n + 1;
    let mut best = f64::NEG_INFINITY;
    let mut arg = vec![0.0; n];
    let mut iterations = 0;
    let mut g = vec![0.0; n];
    let mut cand = vec![0.0; n];
    let mut w = vec![0.0; n];
    let h = hints.len();
    for k in 0..cfg.starts + h {
        w.iter_mut().for_each(|v| *v = 0.0);
        if k < h {
            w.copy_from_slice(hints[k]);
        } else if k == h {
            w.iter_mut().for_each(|v| *v = 1.0);
        } else if k < h + structured {
            w[k - h - 1] = 1.0;
        } else {
            let mut r = rng::stream(cfg.seed, (k - h) as u64);
            let lo = if positive { 0.0 } else { -1.0 };
            w.iter_mut().for_each(|v| *v = rng::uniform(&mut r, lo, 1.0));
        }
        if !retract(ball, positive, &mut w) {
            continue;
        }
        let mut v = f.value(&w);
        for _ in 0..cfg.max_iters {
            iterations += 1;
            f.gradient(&w, &mut g);
            let lmo = if positive {
                ball.positive_ball_argmax(&g, &mut cand)
            } else {
                ball.ball_argmax(&g, &mut cand)
            };
            if lmo > 0.0 {
                let fc = f.value(&cand);
                if improves(fc, v, cfg.tol) {
                    w.copy_from_slice(&cand);
                    v = fc;
                    continue;
                }
            }
            let gn = euclid(&g);
            if gn == 0.0 {
                break;
            }
            let scale = euclid(&w) / gn;
            let mut eta = 1.0;
            let mut moved = false;
            while eta > cfg.tol {
                for j in 0..n {
                    cand[j] = w[j] + eta * scale * g[j];
                }
                if retract(ball, positive, &mut cand) {
                    let fc = f.value(&cand);
                    if improves(fc, v, cfg.tol) {
                        w.copy_from_slice(&cand);
                        v = fc;
                        moved = true;
                        break;
                    }
                }
                eta *= cfg.step_shrink;
            }
            if !moved {
                break;
            }
        }
        if v > best {
            best = v;
            arg.copy_from_slice(&w);
        }
    }
    NormEstimate {
        value: best,
        certificate: arg,
        exact: false,
        method: Method::MultistartAscent,
        starts_used: cfg.starts,
        iterations,
        seed: cfg.seed,
    }
}

/// Moves `w` back to the unit sphere (clipping negatives first when
/// `positive`). Returns false if nothing is left to normalize.
fn retract(ball: &LatticeSpace, positive: bool, w: &mut [f64]) -> bool {
    if positive {
        w.iter_mut().for_each(|v| *v = v.max(0.0));
    }
    let n = ball.norm(w);
    if !(n > 0.0 && n.is_finite()) {
        return false;
    }
    w.iter_mut().for_each(|v| *v /= n);
    true
}

/// A norm (or seminorm) on `R^d` with a subgradient oracle.
pub trait NormOracle {
    /// Writes a subgradient at `u` into `g` and returns the value.
    fn eval(&self, u: &[f64], g: &mut [f64]) -> f64;

    fn value(&self, u: &[f64]) -> f64 {
        let mut g = vec![0.0; u.len()];
        self.eval(u, &mut g)
    }

    /// The evaluation used to certify a returned optimum. Oracles that are
    /// themselves searches use a larger budget here.
    fn certify(&self, u: &[f64]) -> f64 {
        self.value(u)
    }

    /// Re-evaluation of a candidate optimum during the search; sits between
    /// [`NormOracle::value`] and [`NormOracle::certify`] in cost.
    fn confirm(&self, u: &[f64]) -> f64 {
        self.certify(u)
    }
}

/// A norm oracle given by a closure; subgradients are central differences.
pub struct FnOracle<F>(pub F);

impl<F: Fn(&[f64]) -> f64> NormOracle for FnOracle<F> {
    fn eval(&self, u: &[f64], g: &mut [f64]) -> f64 {
        central_difference(&self.0, u, g)
    }

    fn value(&self, u: &[f64]) -> f64 {
        (self.0)(u)
    }
}

/// `sup { <c, U> : nu(U) <= 1 }` over `rows x cols` arrays `U`, restricted to
/// `U >= 0` when `nonneg`.
///
/// Phase one samples `c` (or `c+`), signed unit arrays and `cfg.starts` seeded
/// random arrays. Phase two runs a deep-cut ellipsoid method on the convex
/// program `min nu(U)` subject to `<c, U> >= 1` (and `U >= 0`), started at the
/// best sample. The returned certificate is normalized to `nu = 1` with the
/// final `nu` taken from [`NormOracle::certify`], so
/// `value = <c, certificate>` is attained and is a lower bound.
pub fn maximize_linear_over_norm_body(
    c: &[f64],
    oracle: &dyn NormOracle,
    shape: (usize, usize),
    nonneg: bool,
    cfg: &SearchConfig,
) -> Result<NormEstimate> {
    let d = shape.0 * shape.1;
    if c.len() != d {
        return Err(Error::LengthMismatch {
            expected: d,
            actual: c.len(),
        });
    }
    let mut est = NormEstimate {
        value: 0.0,
        certificate: vec![0.0; d],
        exact: false,
        method: Method::NormalizeAscend,
        starts_used: 0,
        iterations: 0,
        seed: cfg.seed,
    };
    if d == 0 {
        return Ok(est);
    }

    let mut g = vec![0.0; d];
    let mut best_ratio = 0.0;
    let mut best = vec![0.0; d];
    let mut any_positive_norm = false;
    let mut consider = |u: &[f64], best_ratio: &mut f64, best: &mut Vec<f64>, any: &mut bool| {
        let nu = oracle.eval(u, &mut g);
        if nu > 0.0 && nu.is_finite() {
            *any = true;
            if dot(c, u) / nu > *best_ratio {
                let ratio = dot(c, u) / oracle.confirm(u).max(nu);
                if ratio > *best_ratio {
                    *best_ratio = ratio;
                    best.copy_from_slice(u);
                }
            }
        }
    };

    let mut unit_norms = vec![0.0; d];
    let mut u = vec![0.0; d];
    for k in 0..d {
        u.iter_mut().for_each(|v| *v = 0.0);
        u[k] = 1.0;
        unit_norms[k] = oracle.value(&u);
        if unit_norms[k] > 0.0 {
            any_positive_norm = true;
        }
        let s = if c[k] < 0.0 && !nonneg { -1.0 } else { 1.0 };
        u[k] = s;
        consider(&u, &mut best_ratio, &mut best, &mut any_positive_norm);
    }
    let lead: Vec<f64> = if nonneg {
        c.iter().map(|v| v.max(0.0)).collect()
    } else {
        c.to_vec()
    };
    if lead.iter().any(|&v| v != 0.0) {
        consider(&lead, &mut best_ratio, &mut best, &mut any_positive_norm);
    }
    for k in 0..cfg.starts {
        let mut r = rng::stream(cfg.seed, k as u64);
        let lo = if nonneg { 0.0 } else { -1.0 };
        u.iter_mut().for_each(|v| *v = rng::uniform(&mut r, lo, 1.0));
        if !nonneg && dot(c, &u) < 0.0 {
            u.iter_mut().for_each(|v| *v = -*v);
        }
        consider(&u, &mut best_ratio, &mut best, &mut any_positive_norm);
    }
    est.starts_used = d + 1 + cfg.starts;
    if !any_positive_norm {
        return Err(Error::DegenerateConstraint);
    }
    if best_ratio <= 0.0 {
        return Ok(est);
    }

    if d > 1 {
        est.iterations = ellipsoid(c, oracle, nonneg, &unit_norms, &mut best, &mut best_ratio, cfg);
    }

    let nu = oracle.certify(&best);
    if nu > 0.0 {
        best.iter_mut().for_each(|v| *v /= nu);
        est.value = dot(c, &best);
        est.certificate = best;
    }
    Ok(est)
}

/// Deep-cut ellipsoid method for `min nu(x)` on `{<c, x> >= 1, x >= 0 if
/// nonneg}`. Improves `best`/`best_ratio` in place and returns the iteration
/// count.
fn ellipsoid(
    c: &[f64],
    oracle: &dyn NormOracle,
    nonneg: bool,
    unit_norms: &[f64],
    best: &mut [f64],
    best_ratio: &mut f64,
    cfg: &SearchConfig,
) -> usize {
    let d = c.len();
    let df = d as f64;
    let s = dot(c, best);
    let mut x: Vec<f64> = best.iter().map(|v| v / s).collect();
    let kappa = unit_norms
        .iter()
        .copied()
        .filter(|&v| v > 0.0)
        .fold(f64::INFINITY, f64::min);
    let radius = euclid(&x) + sqrt(df) / (*best_ratio * kappa);
    let mut p = vec![0.0; d * d];
    for k in 0..d {
        p[k * d + k] = radius * radius;
    }
    let mut lower = 0.0f64;
    let mut g = vec![0.0; d];
    let mut pg = vec![0.0; d];
    let budget = cfg.max_iters * d;
    let mut it = 0;
    let mut confirmed = true;
    let mut rechecks = 3;
    while it < budget {
        it += 1;
        // pick a cut: positivity, then the half-space, then the objective
        let h;
        g.iter_mut().for_each(|v| *v = 0.0);
        let mut worst = None;
        if nonneg {
            let mut most = 0.0;
            for k in 0..d {
                if x[k] < 0.0 {
                    let viol = -x[k] / sqrt(p[k * d + k]);
                    if viol > most {
                        most = viol;
                        worst = Some(k);
                    }
                }
            }
        }
        if let Some(k) = worst {
            g[k] = -1.0;
            h = -x[k];
        } else {
            let cx = dot(c, &x);
            if cx < 1.0 {
                g.copy_from_slice(c);
                g.iter_mut().for_each(|v| *v = -*v);
                h = 1.0 - cx;
            } else {
                let nu = oracle.eval(&x, &mut g);
                if !(nu.is_finite()) {
                    break;
                }
                // the incumbent drives the cuts; a large jump in its ratio is
                // re-evaluated with a bigger inner budget before it is taken
                if nu > 0.0 && cx / nu > *best_ratio {
                    let mut ratio = cx / nu;
                    confirmed = ratio <= *best_ratio * (1.0 + 1e-3);
                    if !confirmed {
                        ratio = cx / oracle.confirm(&x).max(nu);
                        confirmed = true;
                    }
                    if ratio > *best_ratio {
                        *best_ratio = ratio;
                        best.copy_from_slice(&x);
                    }
                }
                let target = 1.0 / *best_ratio;
                h = nu - target;
                let gpg = quad(&p, &g, &mut pg);
                if !(gpg > 0.0) {
                    break;
                }
                lower = lower.max(nu - sqrt(gpg));
                if target - lower <= cfg.tol * target {
                    if confirmed || rechecks == 0 {
                        break;
                    }
                    // the gap closed on an unconfirmed incumbent
                    rechecks -= 1;
                    confirmed = true;
                    let ratio = dot(c, best) / oracle.confirm(best);
                    if ratio >= *best_ratio * (1.0 - cfg.tol) {
                        break;
                    }
                    *best_ratio = ratio;
                    lower = 0.0;
                    continue;
                }
            }
        }
        let gpg = quad(&p, &g, &mut pg);
        if !(gpg > 0.0 && gpg.is_finite()) {
            break;
        }
        let root = sqrt(gpg);
        let alpha = (h / root).max(0.0);
        if alpha >= 1.0 {
            break;
        }
        let step = (1.0 + df * alpha) / (df + 1.0);
        for k in 0..d {
            x[k] -= step * pg[k] / root;
        }
        let shrink = df * df * (1.0 - alpha * alpha) / (df * df - 1.0);
        let beta = 2.0 * (1.0 + df * alpha) / ((df + 1.0) * (1.0 + alpha));
        for i in 0..d {
            for j in 0..d {
                p[i * d + j] = shrink * (p[i * d + j] - beta * pg[i] * pg[j] / gpg);
            }
        }
        for i in 0..d {
            for j in 0..i {
                let m = 0.5 * (p[i * d + j] + p[j * d + i]);
                p[i * d + j] = m;
                p[j * d + i] = m;
            }
        }
    }
    it
}

fn quad(p: &[f64], g: &[f64], pg: &mut [f64]) -> f64 {
    let d = g.len();
    for i in 0..d {
        pg[i] = dot(&p[i * d..(i + 1) * d], g);
    }
    dot(g, pg)
}
