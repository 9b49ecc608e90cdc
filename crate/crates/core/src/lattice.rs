//! Weighted `l_r^n` lattices, their vectors and finite sequences of vectors.
//!
//! The norm of `x` in `l_r^n(w)` is `(sum_j w_j |x_j|^r)^(1/r)`, or
//! `max_j w_j |x_j|` for `r = inf`. Internally every norm is evaluated as the
//! unweighted `l_r` norm of `scale * x` with `scale_j = w_j^(1/r)` (`w_j` when
//! `r` is 1 or inf); the dual lattice then has `scale* = 1 / scale`, which is
//! what makes the pairing the plain dot product.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::math::{lp, lp_grad_in_place, pow, Buf};
use crate::rng;
use crate::{Error, Result};

/// An exponent in `[1, inf]` stored together with its conjugate, so that
/// conjugating twice returns the original value bit for bit.
#[derive(Clone, Copy, Debug)]
pub struct Exponent {
    value: f64,
    conj: f64,
}

impl Exponent {
    pub const ONE: Exponent = Exponent {
        value: 1.0,
        conj: f64::INFINITY,
    };
    pub const INFINITY: Exponent = Exponent {
        value: f64::INFINITY,
        conj: 1.0,
    };

    pub fn new(value: f64) -> Result<Self> {
        if value.is_nan() || value < 1.0 {
            return Err(Error::InvalidExponent(value));
        }
        if value == 1.0 {
            return Ok(Self::ONE);
        }
        if value == f64::INFINITY {
            return Ok(Self::INFINITY);
        }
        Ok(Exponent {
            value,
            conj: value / (value - 1.0),
        })
    }

    pub fn value(self) -> f64 {
        self.value
    }

    pub fn conjugate(self) -> Exponent {
        Exponent {
            value: self.conj,
            conj: self.value,
        }
    }

    pub fn is_one(self) -> bool {
        self.value == 1.0
    }

    pub fn is_infinite(self) -> bool {
        self.value == f64::INFINITY
    }

    /// The unit ball of `l_r^n` is a polytope exactly for `r` in {1, inf}.
    pub fn is_polyhedral(self) -> bool {
        self.is_one() || self.is_infinite()
    }
}

impl PartialEq for Exponent {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            f.write_str("inf")
        } else {
            write!(f, "{}", self.value)
        }
    }
}

/// The lattice `l_r^n(w)` with the coordinatewise order.
#[derive(Clone, Debug)]
pub struct LatticeSpace {
    exponent: Exponent,
    weights: Vec<f64>,
    dual_weights: Vec<f64>,
    scale: Vec<f64>,
    dual_scale: Vec<f64>,
}

impl PartialEq for LatticeSpace {
    fn eq(&self, other: &Self) -> bool {
        self.exponent == other.exponent && self.weights == other.weights
    }
}

impl LatticeSpace {
    pub fn new(exponent: Exponent, weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::ZeroDimension);
        }
        for (index, &value) in weights.iter().enumerate() {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidWeight { index, value });
            }
        }
        let r = exponent.value();
        let scale: Vec<f64> = if exponent.is_polyhedral() {
            weights.clone()
        } else {
            weights.iter().map(|&w| pow(w, 1.0 / r)).collect()
        };
        let dual_weights = if exponent.is_polyhedral() {
            weights.iter().map(|&w| 1.0 / w).collect()
        } else {
            weights.iter().map(|&w| pow(w, -1.0 / (r - 1.0))).collect()
        };
        let dual_scale = scale.iter().map(|&s| 1.0 / s).collect();
        Ok(LatticeSpace {
            exponent,
            weights,
            dual_weights,
            scale,
            dual_scale,
        })
    }

    /// `l_r^n` with unit weights.
    pub fn unweighted(dim: usize, exponent: Exponent) -> Result<Self> {
        Self::new(exponent, vec![1.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn exponent(&self) -> Exponent {
        self.exponent
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// The dual lattice, paired with this one by the dot product.
    pub fn dual(&self) -> LatticeSpace {
        LatticeSpace {
            exponent: self.exponent.conjugate(),
            weights: self.dual_weights.clone(),
            dual_weights: self.weights.clone(),
            scale: self.dual_scale.clone(),
            dual_scale: self.scale.clone(),
        }
    }

    /// Equality up to relative rounding in the exponent and weights; used to
    /// accept a dual lattice that was written out by hand.
    pub fn approx_eq(&self, other: &LatticeSpace) -> bool {
        let close = |a: f64, b: f64| a == b || (a - b).abs() <= 1e-12 * a.abs().max(b.abs());
        self.dim() == other.dim()
            && close(self.exponent.value(), other.exponent.value())
            && self
                .weights
                .iter()
                .zip(&other.weights)
                .all(|(&a, &b)| close(a, b))
    }

    pub(crate) fn check_len(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::LengthMismatch {
                expected: self.dim(),
                actual: x.len(),
            });
        }
        Ok(())
    }

    /// Norm of a coordinate slice of length `dim`.
    pub fn norm(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim());
        let r = self.exponent.value();
        if r == 1.0 {
            return x.iter().zip(&self.scale).map(|(a, s)| a.abs() * s).sum();
        }
        if r == f64::INFINITY {
            return x
                .iter()
                .zip(&self.scale)
                .fold(0.0, |m, (a, s)| m.max(a.abs() * s));
        }
        let mut t = Buf::zeros(x.len());
        for (j, (a, s)) in x.iter().zip(&self.scale).enumerate() {
            t[j] = a * s;
        }
        lp(&t, r)
    }

    /// Norm of `g` in the dual lattice, without building it.
    pub fn dual_norm(&self, g: &[f64]) -> f64 {
        let mut t = Buf::zeros(g.len());
        for (j, (a, s)) in g.iter().zip(&self.dual_scale).enumerate() {
            t[j] = a * s;
        }
        lp(&t, self.exponent.conjugate().value())
    }

    /// Writes into `out` a functional of dual norm one that attains the norm of
    /// `x`, and returns that norm. It is the gradient of the norm wherever the
    /// norm is differentiable, and a subgradient otherwise. For `x = 0` the
    /// output is zero.
    pub fn norming_functional(&self, x: &[f64], out: &mut [f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim());
        align(x, &self.scale, self.exponent.value(), false, out)
    }

    /// Maximizer of `<g, x>` over the positive part of the unit ball, for `g`
    /// in the dual lattice. Returns the maximum, which is the dual norm of `g+`.
    pub fn positive_ball_argmax(&self, g: &[f64], out: &mut [f64]) -> f64 {
        align(g, &self.dual_scale, self.exponent.conjugate().value(), true, out)
    }

    /// Maximizer of `<g, x>` over the unit ball; returns the dual norm of `g`.
    pub fn ball_argmax(&self, g: &[f64], out: &mut [f64]) -> f64 {
        align(g, &self.dual_scale, self.exponent.conjugate().value(), false, out)
    }

    /// Extreme points of the positive part of the unit ball: `e_j / w_j` for
    /// `r = 1`, and the nonzero indicator vectors divided by `w` for `r = inf`.
    pub fn positive_ball_extreme_points(&self) -> Result<Vec<Vec<f64>>> {
        let n = self.dim();
        if self.exponent.is_one() {
            Ok((0..n)
                .map(|j| {
                    let mut e = vec![0.0; n];
                    e[j] = 1.0 / self.scale[j];
                    e
                })
                .collect())
        } else if self.exponent.is_infinite() {
            check_enumerable(n)?;
            Ok((1u64..(1u64 << n))
                .map(|mask| {
                    (0..n)
                        .map(|j| {
                            if mask >> j & 1 == 1 {
                                1.0 / self.scale[j]
                            } else {
                                0.0
                            }
                        })
                        .collect()
                })
                .collect())
        } else {
            Err(Error::UnsupportedExponent(self.exponent.value()))
        }
    }

    /// Extreme points of the full unit ball, one from each antipodal pair.
    pub fn ball_extreme_points_mod_sign(&self) -> Result<Vec<Vec<f64>>> {
        let n = self.dim();
        if self.exponent.is_one() {
            self.positive_ball_extreme_points()
        } else if self.exponent.is_infinite() {
            check_enumerable(n)?;
            Ok((0u64..(1u64 << (n - 1)))
                .map(|mask| {
                    (0..n)
                        .map(|j| {
                            let s = if j > 0 && mask >> (j - 1) & 1 == 1 {
                                -1.0
                            } else {
                                1.0
                            };
                            s / self.scale[j]
                        })
                        .collect()
                })
                .collect())
        } else {
            Err(Error::UnsupportedExponent(self.exponent.value()))
        }
    }

    /// `count` points of the positive unit sphere drawn from seeded streams.
    pub fn sample_positive_sphere(&self, count: usize, seed: u64) -> Vec<LatticeVector> {
        (0..count)
            .map(|k| {
                let mut g = rng::stream(seed, k as u64);
                let mut coords: Vec<f64> = (0..self.dim())
                    .map(|_| rng::uniform(&mut g, 1e-3, 1.0))
                    .collect();
                let n = self.norm(&coords);
                coords.iter_mut().for_each(|c| *c /= n);
                LatticeVector {
                    space: self.clone(),
                    coords,
                }
            })
            .collect()
    }
}

/// Gradient of `x -> ||scale * x||_r` at `x` (or at `x+` when `positive`).
fn align(x: &[f64], scale: &[f64], r: f64, positive: bool, out: &mut [f64]) -> f64 {
    for j in 0..x.len() {
        let v = if positive { x[j].max(0.0) } else { x[j] };
        out[j] = v * scale[j];
    }
    let n = lp_grad_in_place(out, r);
    for (o, s) in out.iter_mut().zip(scale) {
        *o *= s;
    }
    n
}

fn check_enumerable(n: usize) -> Result<()> {
    const CAP: usize = 20;
    if n > CAP {
        return Err(Error::DimensionTooLarge { dim: n, cap: CAP });
    }
    Ok(())
}

/// A vector of a lattice, carrying its lattice.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeVector {
    space: LatticeSpace,
    coords: Vec<f64>,
}

impl LatticeVector {
    pub fn new(space: LatticeSpace, coords: Vec<f64>) -> Result<Self> {
        space.check_len(&coords)?;
        if let Some(index) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(LatticeVector { space, coords })
    }

    pub fn space(&self) -> &LatticeSpace {
        &self.space
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn norm(&self) -> f64 {
        self.space.norm(&self.coords)
    }

    fn map(&self, f: impl Fn(f64) -> f64) -> LatticeVector {
        LatticeVector {
            space: self.space.clone(),
            coords: self.coords.iter().map(|&c| f(c)).collect(),
        }
    }

    fn zip(&self, other: &LatticeVector, f: impl Fn(f64, f64) -> f64) -> Result<LatticeVector> {
        if self.space != other.space {
            return Err(Error::SpaceMismatch);
        }
        Ok(LatticeVector {
            space: self.space.clone(),
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn abs(&self) -> LatticeVector {
        self.map(f64::abs)
    }

    pub fn pos_part(&self) -> LatticeVector {
        self.map(|c| c.max(0.0))
    }

    pub fn neg_part(&self) -> LatticeVector {
        self.map(|c| (-c).max(0.0))
    }

    pub fn sup(&self, other: &LatticeVector) -> Result<LatticeVector> {
        self.zip(other, f64::max)
    }

    pub fn inf(&self, other: &LatticeVector) -> Result<LatticeVector> {
        self.zip(other, f64::min)
    }

    pub fn is_nonneg(&self) -> bool {
        self.coords.iter().all(|&c| c >= 0.0)
    }
}

/// A finite sequence `(x_1, ..., x_m)` in one lattice, stored as an `m x n`
/// row-major array.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorSequence {
    space: LatticeSpace,
    len: usize,
    data: Vec<f64>,
}

impl VectorSequence {
    pub fn new(space: LatticeSpace, rows: &[Vec<f64>]) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * space.dim());
        for row in rows {
            space.check_len(row)?;
            data.extend_from_slice(row);
        }
        Self::from_flat(space, rows.len(), data)
    }

    pub fn from_flat(space: LatticeSpace, len: usize, data: Vec<f64>) -> Result<Self> {
        let expected = len * space.dim();
        if data.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                actual: data.len(),
            });
        }
        if let Some(index) = data.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(VectorSequence { space, len, data })
    }

    pub fn from_vectors(vectors: &[LatticeVector]) -> Result<Self> {
        let Some(first) = vectors.first() else {
            return Err(Error::ZeroDimension);
        };
        let mut data = Vec::new();
        for v in vectors {
            if v.space != first.space {
                return Err(Error::SpaceMismatch);
            }
            data.extend_from_slice(&v.coords);
        }
        Self::from_flat(first.space.clone(), vectors.len(), data)
    }

    pub fn space(&self) -> &LatticeSpace {
        &self.space
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.dim();
        &self.data[i * n..(i + 1) * n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks(self.dim())
    }

    pub fn vector(&self, i: usize) -> LatticeVector {
        LatticeVector {
            space: self.space.clone(),
            coords: self.row(i).to_vec(),
        }
    }

    pub fn abs(&self) -> VectorSequence {
        VectorSequence {
            space: self.space.clone(),
            len: self.len,
            data: self.data.iter().map(|c| c.abs()).collect(),
        }
    }

    pub fn is_nonneg(&self) -> bool {
        self.data.iter().all(|&c| c >= 0.0)
    }

    /// The tail `(x_{k+1}, ..., x_m)`.
    pub fn suffix(&self, k: usize) -> VectorSequence {
        let k = k.min(self.len);
        VectorSequence {
            space: self.space.clone(),
            len: self.len - k,
            data: self.data[k * self.dim()..].to_vec(),
        }
    }
}
