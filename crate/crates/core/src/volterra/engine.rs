//! Successive approximation for f = s ± ∫ G q f with a separable kernel
//! G(x, y) = u(x)v(y) − u(y)v(x).

use super::mesh::{rule, Mesh, ORDER};
use crate::error::{Error, Result};
use num_complex::Complex64;
use std::ops::{Add, AddAssign, Mul, Sub};

pub(crate) trait Scalar:
    Copy
    + Send
    + Sync
    + Default
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<f64, Output = Self>
    + AddAssign
    + 'static
{
    fn norm(self) -> f64;
}

impl Scalar for f64 {
    #[inline]
    fn norm(self) -> f64 {
        self.abs()
    }
}

impl Scalar for Complex64 {
    #[inline]
    fn norm(self) -> f64 {
        Complex64::norm(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Direction {
    /// Integrals over (0, x): the regular solution.
    Forward,
    /// Integrals over (x, X): the Jost and zero-energy solutions.
    Backward,
}

/// Node data of one Volterra problem.
pub(crate) struct Kernel<'a> {
    pub mesh: &'a Mesh,
    pub u: &'a [f64],
    pub v: &'a [f64],
    pub q: &'a [f64],
}

/// Converged solution with the running integrals ∫u q f and ∫v q f
/// (prefix for Forward, suffix for Backward) at nodes and cell ends.
#[derive(Debug, Clone)]
pub(crate) struct Sweep<T> {
    pub f: Vec<T>,
    pub iu: Vec<T>,
    pub iv: Vec<T>,
    pub iu_end: Vec<T>,
    pub iv_end: Vec<T>,
    pub iterations: usize,
    pub increment: f64,
}

/// Running integral of node samples g, at nodes and at cell ends.
pub(crate) fn running_integral<T: Scalar>(mesh: &Mesh, g: &[T], dir: Direction) -> (Vec<T>, Vec<T>) {
    let r = rule();
    let nc = mesh.cells();
    let mut at_nodes = vec![T::default(); g.len()];
    let mut at_ends = vec![T::default(); nc + 1];
    let mut cell_total = vec![T::default(); nc];
    for c in 0..nc {
        let h = mesh.half_width(c);
        let gc = &g[c * ORDER..(c + 1) * ORDER];
        let mut tot = T::default();
        for m in 0..ORDER {
            tot += gc[m] * r.weights[m];
        }
        cell_total[c] = tot * h;
        for j in 0..ORDER {
            let mut s = T::default();
            for m in 0..ORDER {
                s += gc[m] * r.integ[j][m];
            }
            at_nodes[c * ORDER + j] = s * h;
        }
    }
    match dir {
        Direction::Forward => {
            for c in 0..nc {
                at_ends[c + 1] = at_ends[c] + cell_total[c];
                for j in 0..ORDER {
                    let i = c * ORDER + j;
                    at_nodes[i] = at_ends[c] + at_nodes[i];
                }
            }
        }
        Direction::Backward => {
            for c in (0..nc).rev() {
                at_ends[c] = at_ends[c + 1] + cell_total[c];
                for j in 0..ORDER {
                    let i = c * ORDER + j;
                    at_nodes[i] = at_ends[c] - at_nodes[i];
                }
            }
        }
    }
    (at_nodes, at_ends)
}

fn integrals<T: Scalar>(k: &Kernel, f: &[T], dir: Direction) -> (Vec<T>, Vec<T>, Vec<T>, Vec<T>) {
    let n = f.len();
    let mut gu = Vec::with_capacity(n);
    let mut gv = Vec::with_capacity(n);
    for i in 0..n {
        let qf = f[i] * k.q[i];
        gu.push(qf * k.u[i]);
        gv.push(qf * k.v[i]);
    }
    let (iu, iu_end) = running_integral(k.mesh, &gu, dir);
    let (iv, iv_end) = running_integral(k.mesh, &gv, dir);
    (iu, iv, iu_end, iv_end)
}

/// Picard iteration until the sup of |f_{n+1} − f_n|/env falls below tol.
pub(crate) fn solve<T: Scalar>(
    k: &Kernel,
    seed: &[T],
    env: &[f64],
    dir: Direction,
    tol: f64,
    max_iter: usize,
    certificate: usize,
) -> Result<Sweep<T>> {
    let sign = match dir {
        Direction::Forward => 1.0,
        Direction::Backward => -1.0,
    };
    let mut f = seed.to_vec();
    let mut increment = f64::INFINITY;
    let mut it = 0;
    while it < max_iter {
        it += 1;
        let (iu, iv, _, _) = integrals(k, &f, dir);
        increment = 0.0;
        for i in 0..f.len() {
            let nf = seed[i] + (iv[i] * k.u[i] - iu[i] * k.v[i]) * sign;
            increment = increment.max((nf - f[i]).norm() / env[i]);
            f[i] = nf;
        }
        if !increment.is_finite() {
            break;
        }
        if increment < tol {
            let (iu, iv, iu_end, iv_end) = integrals(k, &f, dir);
            return Ok(Sweep {
                f,
                iu,
                iv,
                iu_end,
                iv_end,
                iterations: it,
                increment,
            });
        }
    }
    Err(Error::Iteration {
        iterations: it,
        increment,
        certificate,
    })
}

/// Smallest n with (c·m)ⁿ/n! < tol.
pub(crate) fn factorial_certificate(cm: f64, tol: f64) -> usize {
    let mut term = 1.0f64;
    let mut n = 0usize;
    while term >= tol && n < 10_000 {
        n += 1;
        term *= cm / n as f64;
    }
    n
}
