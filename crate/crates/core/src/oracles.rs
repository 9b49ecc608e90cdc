//! Brute-force reference values for small instances, written without the
//! search machinery: sups over unit balls are taken over explicit vertex
//! lists when the ball is a polytope and over grids otherwise.
//!
//! Grids live on the faces `{z in [0,1]^n : max_j z_j = 1}` of the cube with
//! spacing `h = 1 / ceil(1/step)`, normalized onto the unit sphere. For a
//! lattice norm with `mu = min_j ||e_j||` and `c = ||(1,...,1)||`, every
//! point of the positive unit sphere lies within Euclidean distance
//! `(h/2) (sqrt(n)/mu) (1 + c/mu)` of a normalized grid point, so for an
//! `L`-Lipschitz objective the grid maximum is within `L` times that radius
//! of the supremum.

use alloc::vec;
use alloc::vec::Vec;

use crate::ideal::{IdealKind, LinearOperator, NormParams};
use crate::lattice::{Exponent, LatticeSpace, VectorSequence};
use crate::search::{Method, NormEstimate};
use crate::seq::{SeqNorm, SeqNormKind};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub step: f64,
    pub max_points: usize,
}

impl GridSpec {
    pub fn new(step: f64, max_points: usize) -> Result<Self> {
        if !(step > 0.0 && step <= 0.25) {
            return Err(Error::InvalidParameter {
                name: "step",
                value: step,
                reason: "grid step must lie in (0, 0.25]",
            });
        }
        if max_points == 0 {
            return Err(Error::InvalidParameter {
                name: "max_points",
                value: 0.0,
                reason: "need at least one grid point",
            });
        }
        Ok(GridSpec { step, max_points })
    }

    fn intervals(&self) -> usize {
        libm::ceil(1.0 / self.step - 1e-9) as usize
    }
}

/// A grid maximum with the Euclidean mesh radius of its grid.
#[derive(Clone, Debug, PartialEq)]
pub struct GridMax {
    pub estimate: NormEstimate,
    pub radius: f64,
}

impl GridMax {
    /// Bound on `sup - value` for an `lipschitz`-Lipschitz objective.
    pub fn gap(&self, lipschitz: f64) -> f64 {
        lipschitz * self.radius
    }
}

/// A certified bracket: `estimate.value <= true value <= estimate.value + gap`.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleEstimate {
    pub estimate: NormEstimate,
    pub gap: f64,
}

const GRID_DIM_CAP: usize = 4;
const SEQ_DIM_CAP: usize = 3;
const SEQ_LEN_CAP: usize = 4;
const IDEAL_DIM_CAP: usize = 2;
const IDEAL_LEN_CAP: usize = 2;

/// Maximum of `f` over the normalized grid on the positive unit sphere.
pub fn grid_max(f: &dyn Fn(&[f64]) -> f64, space: &LatticeSpace, g: &GridSpec) -> Result<GridMax> {
    grid_max_signed(f, space, g, false)
}

/// Maximum of `f` over the normalized grid on the whole unit sphere.
pub fn grid_max_full(f: &dyn Fn(&[f64]) -> f64, space: &LatticeSpace, g: &GridSpec) -> Result<GridMax> {
    grid_max_signed(f, space, g, true)
}

fn grid_max_signed(f: &dyn Fn(&[f64]) -> f64, space: &LatticeSpace, g: &GridSpec, signed: bool) -> Result<GridMax> {
    let n = space.dim();
    if n > GRID_DIM_CAP {
        return Err(Error::DimensionTooLarge { dim: n, cap: GRID_DIM_CAP });
    }
    let points = sphere_grid(space, g, signed)?;
    let (value, arg) = best_of(f, &points);
    Ok(GridMax {
        estimate: grid_estimate(value, arg, points.len()),
        radius: mesh_radius(space, g),
    })
}

fn grid_estimate(value: f64, certificate: Vec<f64>, points: usize) -> NormEstimate {
    NormEstimate {
        value,
        certificate,
        exact: false,
        method: Method::GridOracle,
        starts_used: points,
        iterations: 0,
        seed: 0,
    }
}

fn best_of(f: &dyn Fn(&[f64]) -> f64, points: &[Vec<f64>]) -> (f64, Vec<f64>) {
    let mut best = (f64::NEG_INFINITY, Vec::new());
    for x in points {
        let v = f(x);
        if v > best.0 {
            best = (v, x.clone());
        }
    }
    best
}

/// Norm of `x` in `l_r^n(w)`, computed from the weights directly.
fn norm_of(space: &LatticeSpace, x: &[f64]) -> f64 {
    let r = space.exponent().value();
    let w = space.weights();
    if r == f64::INFINITY {
        x.iter().zip(w).map(|(a, w)| w * a.abs()).fold(0.0, f64::max)
    } else {
        let s: f64 = x.iter().zip(w).map(|(a, w)| w * libm::pow(a.abs(), r)).sum();
        libm::pow(s, 1.0 / r)
    }
}

/// `sqrt(n)/mu * (1 + c/mu) * h/2`; zero in dimension one, where the
/// normalized grid is the whole sphere.
fn mesh_radius(space: &LatticeSpace, g: &GridSpec) -> f64 {
    let n = space.dim();
    if n == 1 {
        return 0.0;
    }
    let h = 1.0 / g.intervals() as f64;
    let mu = (0..n).map(|j| norm_of(space, &unit(n, j))).fold(f64::INFINITY, f64::min);
    let c = norm_of(space, &vec![1.0; n]);
    h / 2.0 * libm::sqrt(n as f64) / mu * (1.0 + c / mu)
}

fn unit(n: usize, j: usize) -> Vec<f64> {
    let mut e = vec![0.0; n];
    e[j] = 1.0;
    e
}

fn count_face(dim: usize, k: usize, signed: bool) -> f64 {
    let d = dim as i32;
    if signed {
        libm::pow((2 * k + 1) as f64, d as f64) - libm::pow((2 * k - 1) as f64, d as f64)
    } else {
        libm::pow((k + 1) as f64, d as f64) - libm::pow(k as f64, d as f64)
    }
}

fn check_count(dim: usize, g: &GridSpec, signed: bool) -> Result<usize> {
    let count = count_face(dim, g.intervals(), signed);
    if count > g.max_points as f64 {
        return Err(Error::InvalidParameter {
            name: "max_points",
            value: count,
            reason: "the grid would exceed max_points",
        });
    }
    Ok(count as usize)
}

/// Calls `visit` on the points `t / k` with integer `t_j` in `[-k, k]` (or
/// `[0, k]`) and `max_j |t_j| = k`. With `row > 0` a signed grid is cut
/// into rows of that length and only points whose rows each start (at their
/// first nonzero entry) with a positive entry are visited.
fn for_each_face(dim: usize, g: &GridSpec, signed: bool, row: usize, visit: &mut dyn FnMut(&[f64])) -> Result<()> {
    check_count(dim, g, signed)?;
    let k = g.intervals() as i64;
    let lo = if signed { -k } else { 0 };
    let mut t = vec![lo; dim];
    let mut x = vec![0.0; dim];
    let canonical = |t: &[i64]| row == 0 || t.chunks(row).all(|r| r.iter().find(|&&v| v != 0).is_none_or(|&v| v > 0));
    loop {
        if t.iter().any(|v| v.abs() == k) && canonical(&t) {
            for (xj, &tj) in x.iter_mut().zip(&t) {
                *xj = tj as f64 / k as f64;
            }
            visit(&x);
        }
        let mut j = 0;
        loop {
            if j == dim {
                return Ok(());
            }
            if t[j] < k {
                t[j] += 1;
                break;
            }
            t[j] = lo;
            j += 1;
        }
    }
}

fn face_grid(dim: usize, g: &GridSpec, signed: bool) -> Result<Vec<Vec<f64>>> {
    let mut out = Vec::with_capacity(check_count(dim, g, signed)?);
    for_each_face(dim, g, signed, 0, &mut |x| out.push(x.to_vec()))?;
    Ok(out)
}

fn sphere_grid(space: &LatticeSpace, g: &GridSpec, signed: bool) -> Result<Vec<Vec<f64>>> {
    let mut points = face_grid(space.dim(), g, signed)?;
    for x in points.iter_mut() {
        let nx = norm_of(space, x);
        x.iter_mut().for_each(|v| *v /= nx);
    }
    Ok(points)
}

/// Vertices of the unit ball (or its positive part) for `r` in {1, inf}.
fn vertices(space: &LatticeSpace, signed: bool) -> Vec<Vec<f64>> {
    let n = space.dim();
    let w = space.weights();
    let mut out = Vec::new();
    if space.exponent().is_one() {
        for j in 0..n {
            let mut e = unit(n, j);
            e[j] /= w[j];
            if signed {
                out.push(e.iter().map(|v| -v).collect());
            }
            out.push(e);
        }
    } else {
        // sign (or indicator) patterns scaled by 1/w
        let base: usize = if signed { 3 } else { 2 };
        let total = base.pow(n as u32);
        for code in 1..total {
            let mut c = code;
            let mut x = vec![0.0; n];
            let mut full = true;
            for j in 0..n {
                let d = c % base;
                c /= base;
                x[j] = match d {
                    0 => 0.0,
                    1 => 1.0 / w[j],
                    _ => -1.0 / w[j],
                };
                full &= d != 0;
            }
            // for the full ball only the all-nonzero patterns are vertices
            if !signed || full {
                out.push(x);
            }
        }
    }
    out
}

/// Points at which a convex function is maximized over the unit ball (or
/// its positive part): the vertices when the ball is a polytope (radius
/// zero), the sphere grid otherwise.
struct Ball {
    points: Vec<Vec<f64>>,
    radius: f64,
}

impl Ball {
    fn new(space: &LatticeSpace, g: &GridSpec, signed: bool) -> Result<Ball> {
        if space.exponent().is_polyhedral() {
            return Ok(Ball {
                points: vertices(space, signed),
                radius: 0.0,
            });
        }
        Ok(Ball {
            points: sphere_grid(space, g, signed)?,
            radius: mesh_radius(space, g),
        })
    }

    fn sup(&self, f: &dyn Fn(&[f64]) -> f64) -> (f64, Vec<f64>) {
        best_of(f, &self.points)
    }
}

fn lq(v: impl Iterator<Item = f64>, q: f64) -> f64 {
    if q == f64::INFINITY {
        v.fold(0.0, |m, a| m.max(a.abs()))
    } else {
        libm::pow(v.map(|a| libm::pow(a.abs(), q)).sum::<f64>(), 1.0 / q)
    }
}

fn euclid(v: &[f64]) -> f64 {
    libm::sqrt(v.iter().map(|a| a * a).sum())
}

fn pairings<'a>(rows: &'a [f64], n: usize, x: &'a [f64], abs: bool) -> impl Iterator<Item = f64> + 'a {
    rows.chunks(n).map(move |row| {
        row.iter()
            .zip(x)
            .map(|(a, b)| if abs { a.abs() * b } else { a * b })
            .sum::<f64>()
    })
}

/// `sup_{x in B} (sum_i |<a_i, x>|^q)^(1/q)` over `ball` (pairing `|a_i|`
/// when `positive`) as `(value, gap, argmax)`.
fn weak_bracket(rows: &[f64], ball: &Ball, q: f64, positive: bool) -> (f64, f64, Vec<f64>) {
    let n = ball.points[0].len();
    let f = |x: &[f64]| lq(pairings(rows, n, x, positive), q);
    let (v, x) = ball.sup(&f);
    let lipschitz = lq(rows.chunks(n).map(euclid), q);
    (v.max(0.0), lipschitz * ball.radius, x)
}

fn check_seq_caps(s: &VectorSequence) -> Result<()> {
    if s.dim() > SEQ_DIM_CAP {
        return Err(Error::DimensionTooLarge { dim: s.dim(), cap: SEQ_DIM_CAP });
    }
    if s.len() > SEQ_LEN_CAP {
        return Err(Error::DimensionTooLarge { dim: s.len(), cap: SEQ_LEN_CAP });
    }
    Ok(())
}

/// Any sequence norm by exhaustive search over its defining supremum. The
/// Cohen and positive strong norms take the sup of `sum_i |<a_i, x_i>|`
/// (resp. `<A, |S|>`) over a grid of dual arrays `A`, each divided by an
/// upper bound of its weak (resp. positive weak) `p*` norm; `p = 1` reduces
/// to the strong 1 norm and `p = inf` is rejected.
pub fn bruteforce_seq_norm(norm: SeqNorm, s: &VectorSequence, g: &GridSpec) -> Result<OracleEstimate> {
    check_seq_caps(s)?;
    let q = norm.exponent.value();
    let m = s.len();
    let space = s.space();
    let exact = |value: f64, certificate: Vec<f64>| OracleEstimate {
        estimate: grid_estimate(value, certificate, 0),
        gap: 0.0,
    };
    if m == 0 {
        return Ok(exact(0.0, Vec::new()));
    }
    match norm.kind {
        SeqNormKind::Strong => Ok(exact(lq(s.rows().map(|x| norm_of(space, x)), q), Vec::new())),
        SeqNormKind::Weak | SeqNormKind::PosWeak => {
            let positive = norm.kind == SeqNormKind::PosWeak;
            let ball = Ball::new(&space.dual(), g, !positive)?;
            let (v, gap, x) = weak_bracket(s.data(), &ball, q, positive);
            Ok(OracleEstimate {
                estimate: grid_estimate(v, x, ball.points.len()),
                gap,
            })
        }
        SeqNormKind::Cohen | SeqNormKind::PosStrong => {
            let positive = norm.kind == SeqNormKind::PosStrong;
            if norm.exponent.is_infinite() {
                return Err(Error::InvalidParameter {
                    name: "p",
                    value: q,
                    reason: "the brute-force oracle needs p < inf",
                });
            }
            if norm.exponent.is_one() {
                return Ok(exact(s.rows().map(|x| norm_of(space, x)).sum(), Vec::new()));
            }
            let target: Vec<f64> = if positive {
                s.data().iter().map(|v| v.abs()).collect()
            } else {
                s.data().to_vec()
            };
            let duals = DualGrid::new(space, m, norm.exponent.conjugate(), positive, g)?;
            let (value, cert) = duals.best(&target)?;
            let strong1: f64 = s.rows().map(|x| norm_of(space, x)).sum();
            Ok(OracleEstimate {
                estimate: grid_estimate(value, cert, duals.upper.len()),
                gap: duals.gap(euclid(&target), strong1),
            })
        }
    }
}

/// Grid of dual arrays `A` (`m x n`, entries in `[-1, 1]` or `[0, 1]`, some
/// entry of modulus one) with upper bounds of their weak `p*` norms taken
/// over the ball of `space`. Signed arrays are kept up to row signs, which
/// the weak norm ignores; they are scored by `sum_i |<a_i, s_i>|`.
struct DualGrid {
    dim: usize,
    n: usize,
    positive: bool,
    grid: GridSpec,
    upper: Vec<f64>,
    /// Largest inner slack `L * radius` over the grid.
    slack: f64,
    /// Lower bound of the weak norm on the grid's face set.
    floor: f64,
    /// Euclidean Lipschitz bound of the weak norm.
    lipschitz: f64,
    radius: f64,
}

impl DualGrid {
    fn new(space: &LatticeSpace, m: usize, conj: Exponent, positive: bool, g: &GridSpec) -> Result<DualGrid> {
        let n = space.dim();
        let ball = Ball::new(space, g, !positive)?;
        let mut upper = Vec::new();
        let mut slack: f64 = 0.0;
        for_each_face(m * n, g, !positive, n, &mut |a| {
            let (v, gap, _) = weak_bracket(a, &ball, conj.value(), positive);
            slack = slack.max(gap);
            upper.push(v + gap);
        })?;
        let dual = space.dual();
        let dual_units: Vec<f64> = (0..n).map(|j| norm_of(&dual, &unit(n, j))).collect();
        Ok(DualGrid {
            dim: m * n,
            n,
            positive,
            grid: *g,
            upper,
            slack,
            floor: dual_units.iter().copied().fold(f64::INFINITY, f64::min),
            lipschitz: dual_units.iter().copied().fold(0.0, f64::max) * libm::sqrt((m * n) as f64),
            radius: 0.5 / g.intervals() as f64 * libm::sqrt((m * n) as f64),
        })
    }

    /// Best ratio for `target` (already `|S|` in the positive case) with the
    /// maximizing array, row signs resolved.
    fn best(&self, target: &[f64]) -> Result<(f64, Vec<f64>)> {
        let mut best = (0.0, vec![0.0; self.dim]);
        let mut k = 0;
        for_each_face(self.dim, &self.grid, !self.positive, self.n, &mut |a| {
            let score: f64 = a
                .chunks(self.n)
                .zip(target.chunks(self.n))
                .map(|(ai, si)| ai.iter().zip(si).map(|(x, y)| x * y).sum::<f64>().abs())
                .sum();
            let v = score / self.upper[k];
            if v > best.0 {
                best.0 = v;
                best.1.clear();
                for (ai, si) in a.chunks(self.n).zip(target.chunks(self.n)) {
                    let sg = if ai.iter().zip(si).map(|(x, y)| x * y).sum::<f64>() < 0.0 { -1.0 } else { 1.0 };
                    best.1.extend(ai.iter().map(|x| sg * x / self.upper[k]));
                }
            }
            k += 1;
        })?;
        Ok(best)
    }

    /// `A -> <A, S> / nu(A)` varies by at most
    /// `|A - A'| (|S| + R nu_lip) / nu_min` on the face set, with `R` bounded
    /// by the strong 1 norm; the inner slack costs at most `R slack / nu_min`.
    fn gap(&self, target_norm: f64, strong1: f64) -> f64 {
        (self.radius * (target_norm + strong1 * self.lipschitz) + strong1 * self.slack) / self.floor
    }
}

/// Lower bound for an ideal norm by grids over witness sequences `S`
/// (`m x dim E`, the face grid in `[-1, 1]` up to row signs), with the
/// source norm replaced by an upper bound and the target norm by a lower
/// bound. The majorizing norm is evaluated from its own definition: grids
/// over the functional arrays `g`, with each `z_i` chosen from the ball of
/// `E`.
pub fn bruteforce_ideal_norm(
    kind: IdealKind,
    t: &LinearOperator,
    params: NormParams,
    m: usize,
    g: &GridSpec,
) -> Result<NormEstimate> {
    let (ne, nf) = (t.domain().dim(), t.codomain().dim());
    for dim in [ne, nf] {
        if dim > IDEAL_DIM_CAP {
            return Err(Error::DimensionTooLarge { dim, cap: IDEAL_DIM_CAP });
        }
    }
    if m > IDEAL_LEN_CAP || m == 0 {
        return Err(Error::DimensionTooLarge { dim: m, cap: IDEAL_LEN_CAP });
    }
    if kind == IdealKind::Majorizing {
        return majorizing_grid(t, params, m, g);
    }
    let (alpha, tau) = kind.pair(params);
    if tau.kind != SeqNormKind::Strong && tau.exponent.is_infinite() {
        return Err(Error::InvalidParameter {
            name: "p",
            value: f64::INFINITY,
            reason: "the brute-force oracle needs p < inf",
        });
    }
    let domain = t.domain();
    let codomain = t.codomain();
    let duals = match tau.kind {
        SeqNormKind::Cohen | SeqNormKind::PosStrong if !tau.exponent.is_one() => Some(DualGrid::new(
            codomain,
            m,
            tau.exponent.conjugate(),
            tau.kind == SeqNormKind::PosStrong,
            g,
        )?),
        _ => None,
    };
    let source_ball = match alpha.kind {
        SeqNormKind::Weak | SeqNormKind::PosWeak => Some(Ball::new(&domain.dual(), g, alpha.kind == SeqNormKind::Weak)?),
        _ => None,
    };
    let mut best = grid_estimate(0.0, vec![0.0; m * ne], 0);
    let mut image = vec![0.0; m * nf];
    let mut failure = None;
    for_each_face(m * ne, g, true, ne, &mut |s| {
        best.starts_used += 1;
        let den = match &source_ball {
            Some(ball) => {
                let (v, gap, _) = weak_bracket(s, ball, alpha.exponent.value(), alpha.kind == SeqNormKind::PosWeak);
                v + gap
            }
            None => lq(s.chunks(ne).map(|x| norm_of(domain, x)), alpha.exponent.value()),
        };
        if !(den > 0.0) {
            return;
        }
        for (x, y) in s.chunks(ne).zip(image.chunks_mut(nf)) {
            y.copy_from_slice(&t.apply(x));
        }
        let num = match &duals {
            Some(d) => {
                if d.positive {
                    image.iter_mut().for_each(|v| *v = v.abs());
                }
                match d.best(&image) {
                    Ok(b) => b.0,
                    Err(e) => {
                        failure = Some(e);
                        0.0
                    }
                }
            }
            // strong, or p = 1 where every target is the strong 1 norm
            None => lq(image.chunks(nf).map(|y| norm_of(codomain, y)), tau.exponent.value()),
        };
        if num / den > best.value {
            best.value = num / den;
            best.certificate = s.to_vec();
        }
    })?;
    match failure {
        Some(e) => Err(e),
        None => Ok(best),
    }
}

/// `sup (sum_i sup_{z in B_E} |<T z, g_i>|^{q*})^{1/q*} / pos_weak_{p*}(g)`
/// over a grid of functional arrays `g` on `F`.
fn majorizing_grid(t: &LinearOperator, params: NormParams, m: usize, g: &GridSpec) -> Result<NormEstimate> {
    let (ne, nf) = (t.domain().dim(), t.codomain().dim());
    let qs = params.q.conjugate().value();
    let ps = params.p.conjugate().value();
    let range = Ball::new(t.codomain(), g, false)?;
    let domain = Ball::new(t.domain(), g, true)?;
    let mut best = grid_estimate(0.0, vec![0.0; m * ne], 0);
    for_each_face(m * nf, g, true, nf, &mut |gs| {
        best.starts_used += 1;
        let (den, gap, _) = weak_bracket(gs, &range, ps, true);
        let den = den + gap;
        if !(den > 0.0) {
            return;
        }
        let mut zs = Vec::with_capacity(m * ne);
        let mut pairs = Vec::with_capacity(m);
        for gi in gs.chunks(nf) {
            let f = |z: &[f64]| t.apply(z).iter().zip(gi).map(|(a, b)| a * b).sum::<f64>().abs();
            let (v, z) = domain.sup(&f);
            pairs.push(v);
            zs.extend_from_slice(&z);
        }
        let num = lq(pairs.into_iter(), qs);
        if num / den > best.value {
            best.value = num / den;
            best.certificate = zs;
        }
    })?;
    Ok(best)
}
