//! Multistart ascent for ratios `N(x) / prod_b D_b(x_b)`, where `x` is split
//! into blocks, each `D_b` is a norm on its block and `N` is positively
//! homogeneous of degree one in every block. Each block is kept on the unit
//! sphere of its norm, so the ratio equals `N`.

use alloc::vec;
use alloc::vec::Vec;

use crate::math::euclid;
use crate::rng::{self, Rng};
use crate::search::SearchConfig;

#[derive(Clone, Copy, Debug)]
pub(crate) struct Block {
    pub len: usize,
    pub nonneg: bool,
}

pub(crate) trait RatioProblem {
    fn blocks(&self) -> &[Block];

    /// Numerator with its gradient written into `grad`.
    fn numerator(&self, x: &[f64], grad: &mut [f64]) -> f64;

    /// Norm of block `b` with a subgradient written into `grad`.
    fn block_norm(&self, b: usize, xb: &[f64], grad: &mut [f64]) -> f64;

    /// Start number `k`; the default draws every entry uniformly.
    fn start(&self, _k: usize, rng: &mut Rng, x: &mut [f64]) {
        let mut off = 0;
        for b in self.blocks() {
            let lo = if b.nonneg { 0.0 } else { -1.0 };
            for v in &mut x[off..off + b.len] {
                *v = rng::uniform(rng, lo, 1.0);
            }
            off += b.len;
        }
    }
}

pub(crate) struct Ascent {
    pub point: Vec<f64>,
    pub iterations: usize,
}

fn total(p: &dyn RatioProblem) -> usize {
    p.blocks().iter().map(|b| b.len).sum()
}

/// Rescales every block to norm one (clipping nonnegative blocks first).
pub(crate) fn normalize(p: &dyn RatioProblem, x: &mut [f64]) -> bool {
    let mut off = 0;
    let mut scratch = vec![0.0; x.len()];
    for (b, blk) in p.blocks().iter().enumerate() {
        let xb = &mut x[off..off + blk.len];
        if blk.nonneg {
            xb.iter_mut().for_each(|v| *v = v.max(0.0));
        }
        let n = p.block_norm(b, xb, &mut scratch[..blk.len]);
        if !(n > 0.0 && n.is_finite()) {
            return false;
        }
        xb.iter_mut().for_each(|v| *v /= n);
        off += blk.len;
    }
    true
}

/// Ratio at `x` (not assumed normalized).
pub(crate) fn ratio(p: &dyn RatioProblem, x: &[f64]) -> f64 {
    let mut g = vec![0.0; x.len()];
    let mut den = 1.0;
    let mut off = 0;
    for (b, blk) in p.blocks().iter().enumerate() {
        den *= p.block_norm(b, &x[off..off + blk.len], &mut g[..blk.len]);
        off += blk.len;
    }
    if !(den > 0.0) {
        return f64::NEG_INFINITY;
    }
    p.numerator(x, &mut g) / den
}

/// Normalizes `x` and ascends from it. Returns the final ratio and the
/// iteration count; `x` holds the final point.
pub(crate) fn ascend(p: &dyn RatioProblem, x: &mut [f64], cfg: &SearchConfig, stream: u64) -> (f64, usize) {
    let n = x.len();
    if !normalize(p, x) {
        return (f64::NEG_INFINITY, 0);
    }
    let mut gn = vec![0.0; n];
    let mut gd = vec![0.0; n];
    let mut dir = vec![0.0; n];
    let mut cand = vec![0.0; n];
    let mut v = p.numerator(x, &mut gn);
    if v < 0.0 {
        let len0 = p.blocks()[0].len;
        if !p.blocks()[0].nonneg {
            x[..len0].iter_mut().for_each(|t| *t = -*t);
            v = p.numerator(x, &mut gn);
        }
    }
    let mut perturb = rng::stream(rng::derive(cfg.seed, 0x5eed), stream);
    let mut eta: f64 = 0.5;
    let mut it = 0;
    let mut slow = 0;
    while it < cfg.max_iters {
        it += 1;
        if v > 0.0 {
            let mut off = 0;
            for (b, blk) in p.blocks().iter().enumerate() {
                p.block_norm(b, &x[off..off + blk.len], &mut gd[off..off + blk.len]);
                off += blk.len;
            }
            for k in 0..n {
                dir[k] = gn[k] / v - gd[k];
            }
        } else {
            dir.copy_from_slice(&gn);
        }
        scale_blocks(p, x, &mut dir);
        let mut moved = false;
        while eta > 1e-10 {
            for k in 0..n {
                cand[k] = x[k] + eta * dir[k];
            }
            let r = if normalize(p, &mut cand) {
                p.numerator(&cand, &mut gd)
            } else {
                f64::NEG_INFINITY
            };
            if r > v {
                let gain = r - v;
                x.copy_from_slice(&cand);
                v = p.numerator(x, &mut gn);
                eta = (eta * 2.0).min(1.0);
                moved = true;
                slow = if gain <= cfg.tol * v.abs() { slow + 1 } else { 0 };
                break;
            }
            eta *= cfg.step_shrink;
        }
        if moved && slow < 5 {
            continue;
        }
        // stalled: probe random directions at a few radii
        let mut found = false;
        'probe: for radius in [0.1, 0.01, 1e-3, 1e-4] {
            for _ in 0..n {
                let mut off = 0;
                for blk in p.blocks() {
                    let xb = &x[off..off + blk.len];
                    let size = euclid(xb);
                    let mut u: Vec<f64> = (0..blk.len).map(|_| rng::uniform(&mut perturb, -1.0, 1.0)).collect();
                    let un = euclid(&u).max(1e-300);
                    u.iter_mut().for_each(|t| *t *= radius * size / un);
                    for k in 0..blk.len {
                        cand[off + k] = xb[k] + u[k];
                    }
                    off += blk.len;
                }
                if normalize(p, &mut cand) {
                    let r = p.numerator(&cand, &mut gd);
                    if r > v + cfg.tol * v.abs() {
                        x.copy_from_slice(&cand);
                        v = p.numerator(x, &mut gn);
                        found = true;
                        break 'probe;
                    }
                }
            }
        }
        if !found {
            break;
        }
        eta = 0.5;
        slow = 0;
    }
    (v, it)
}

fn scale_blocks(p: &dyn RatioProblem, x: &[f64], dir: &mut [f64]) {
    let mut off = 0;
    for blk in p.blocks() {
        let xs = euclid(&x[off..off + blk.len]);
        let db = &mut dir[off..off + blk.len];
        let ds = euclid(db);
        if ds > 0.0 {
            db.iter_mut().for_each(|t| *t *= xs / ds);
        }
        off += blk.len;
    }
}

/// Ascends from every point of `seeds` and from `cfg.starts` generated starts,
/// keeping the first point that attains the largest ratio.
pub(crate) fn multistart(p: &dyn RatioProblem, cfg: &SearchConfig, seeds: &[Vec<f64>]) -> Ascent {
    let (mut top, iterations, _) = multistart_top(p, cfg, seeds, 1);
    let point = top.pop().map_or_else(|| vec![0.0; total(p)], |t| t.1);
    Ascent { point, iterations }
}

/// Like [`multistart`] but keeps the `keep` best end points, best first.
/// Returns them with the total iteration and start counts.
///
/// Every start first gets a short ascent of `SCREEN_ITERS` steps; only the
/// best `max(keep, SCREEN_KEEP)` of those are run to convergence.
pub(crate) fn multistart_top(
    p: &dyn RatioProblem,
    cfg: &SearchConfig,
    seeds: &[Vec<f64>],
    keep: usize,
) -> (Vec<(f64, Vec<f64>)>, usize, usize) {
    let n = total(p);
    let count = seeds.len() + cfg.starts;
    let screen = SearchConfig {
        max_iters: cfg.max_iters.min(SCREEN_ITERS),
        ..cfg.clone()
    };
    let mut short = Vec::new();
    let mut x = vec![0.0; n];
    let mut iterations = 0;
    for k in 0..count {
        if k < seeds.len() {
            x.copy_from_slice(&seeds[k]);
        } else {
            let j = k - seeds.len();
            let mut r = rng::stream(cfg.seed, j as u64);
            p.start(j, &mut r, &mut x);
        }
        let (v, it) = ascend(p, &mut x, &screen, k as u64);
        iterations += it;
        insert_top(&mut short, v, &x, keep.max(SCREEN_KEEP));
    }
    let mut top = Vec::new();
    for (i, (_, mut x)) in short.into_iter().enumerate() {
        let (v, it) = ascend(p, &mut x, cfg, (count + i) as u64);
        iterations += it;
        insert_top(&mut top, v, &x, keep);
    }
    (top, iterations, count)
}

const SCREEN_ITERS: usize = 25;
const SCREEN_KEEP: usize = 8;

fn insert_top(top: &mut Vec<(f64, Vec<f64>)>, v: f64, x: &[f64], keep: usize) {
    if !v.is_finite() {
        return;
    }
    if top.len() < keep || v > top[top.len() - 1].0 {
        let at = top.iter().position(|t| v > t.0).unwrap_or(top.len());
        top.insert(at, (v, x.to_vec()));
        top.truncate(keep);
    }
}
