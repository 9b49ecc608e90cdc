//! Small numeric helpers shared by the norm modules.

/// `x^e` for `x >= 0`, with shortcuts for the exponents that occur most.
pub(crate) fn pow(x: f64, e: f64) -> f64 {
    if e == 1.0 {
        x
    } else if e == 2.0 {
        x * x
    } else if e == 0.5 {
        sqrt(x)
    } else if e == 1.5 {
        x * sqrt(x)
    } else if e == 3.0 {
        x * x * x
    } else if e == 2.5 {
        x * x * sqrt(x)
    } else {
        libm::pow(x, e)
    }
}

pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn euclid(a: &[f64]) -> f64 {
    sqrt(dot(a, a))
}

pub(crate) fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Unweighted `l_s` norm of a plain vector; `s = inf` gives the max norm.
pub(crate) fn lp(v: &[f64], s: f64) -> f64 {
    if s == f64::INFINITY {
        v.iter().fold(0.0, |m, x| m.max(x.abs()))
    } else if s == 1.0 {
        v.iter().map(|x| x.abs()).sum()
    } else if s == 2.0 {
        euclid(v)
    } else {
        let big = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if big == 0.0 {
            return 0.0;
        }
        let sum: f64 = v.iter().map(|x| pow(x.abs() / big, s)).sum();
        big * root(sum, s)
    }
}

/// `x^(1/s)` for `x >= 0`.
fn root(x: f64, s: f64) -> f64 {
    if s == 3.0 {
        libm::cbrt(x)
    } else if s == 1.5 {
        libm::cbrt(x * x)
    } else if s == 4.0 {
        sqrt(sqrt(x))
    } else {
        libm::pow(x, 1.0 / s)
    }
}

/// Gradient (a norming functional in `l_{s*}`) of the unweighted `l_s` norm at
/// `v`, written into `out`. Returns the norm.
pub(crate) fn lp_grad(v: &[f64], s: f64, out: &mut [f64]) -> f64 {
    let n = lp(v, s);
    out.iter_mut().for_each(|o| *o = 0.0);
    if n == 0.0 {
        return 0.0;
    }
    if s == f64::INFINITY {
        let mut k = 0;
        for (j, x) in v.iter().enumerate() {
            if x.abs() > v[k].abs() {
                k = j;
            }
        }
        out[k] = sign(v[k]);
    } else if s == 1.0 {
        for (o, x) in out.iter_mut().zip(v) {
            *o = sign(*x);
        }
    } else {
        let e = s - 1.0;
        for (o, x) in out.iter_mut().zip(v) {
            *o = sign(*x) * pow(x.abs() / n, e);
        }
    }
    n
}

/// Replaces `v` by the gradient of the unweighted `l_s` norm at `v` (zero at
/// the origin) and returns the norm.
pub(crate) fn lp_grad_in_place(v: &mut [f64], s: f64) -> f64 {
    let n = lp(v, s);
    if n == 0.0 {
        v.iter_mut().for_each(|x| *x = 0.0);
        return 0.0;
    }
    if s == f64::INFINITY {
        let mut k = 0;
        for j in 0..v.len() {
            if v[j].abs() > v[k].abs() {
                k = j;
            }
        }
        let sk = sign(v[k]);
        v.iter_mut().for_each(|x| *x = 0.0);
        v[k] = sk;
    } else if s == 1.0 {
        v.iter_mut().for_each(|x| *x = sign(*x));
    } else {
        let e = s - 1.0;
        v.iter_mut().for_each(|x| *x = sign(*x) * pow(x.abs() / n, e));
    }
    n
}

/// A scratch buffer that lives on the stack when short.
pub(crate) enum Buf {
    Stack([f64; 24], usize),
    Heap(alloc::vec::Vec<f64>),
}

impl Buf {
    pub(crate) fn zeros(len: usize) -> Buf {
        if len <= 24 {
            Buf::Stack([0.0; 24], len)
        } else {
            Buf::Heap(alloc::vec![0.0; len])
        }
    }
}

impl core::ops::Deref for Buf {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        match self {
            Buf::Stack(a, n) => &a[..*n],
            Buf::Heap(v) => v,
        }
    }
}

impl core::ops::DerefMut for Buf {
    fn deref_mut(&mut self) -> &mut [f64] {
        match self {
            Buf::Stack(a, n) => &mut a[..*n],
            Buf::Heap(v) => v,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lp_matches_definitions() {
        let v = [3.0, -4.0];
        assert_eq!(lp(&v, 1.0), 7.0);
        assert_eq!(lp(&v, 2.0), 5.0);
        assert_eq!(lp(&v, f64::INFINITY), 4.0);
        assert!((lp(&v, 3.0) - pow(91.0, 1.0 / 3.0)).abs() < 1e-12);
    }

    #[test]
    fn lp_grad_is_norming() {
        let v = [0.5, -2.0, 1.5];
        for s in [1.0, 1.5, 2.0, 4.0, f64::INFINITY] {
            let mut g = [0.0; 3];
            let n = lp_grad(&v, s, &mut g);
            let sc = if s == 1.0 {
                f64::INFINITY
            } else if s == f64::INFINITY {
                1.0
            } else {
                s / (s - 1.0)
            };
            assert!((dot(&g, &v) - n).abs() < 1e-12);
            assert!((lp(&g, sc) - 1.0).abs() < 1e-12);
        }
    }
}
