//! Pfaffians of dense skew-symmetric matrices.
//!
//! Skew-symmetric Gaussian elimination to tridiagonal form (Parlett-Reid),
//! pivoting on the largest entry of the active column with symmetric
//! row/column swaps. Works for real and complex entries alike.

use num_complex::ComplexFloat;

use crate::error::{Error, Result};

/// Relative skewness tolerance `max|A + Aᵀ| ≤ SKEW_TOLERANCE · max|A|`.
pub const SKEW_TOLERANCE: f64 = 1e-12;

/// Even-dimensional skew-symmetric matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SkewMatrix<T> {
    dim: usize,
    data: Vec<T>,
}

impl<T: ComplexFloat<Real = f64>> SkewMatrix<T> {
    pub fn new(dim: usize, data: Vec<T>) -> Result<Self> {
        if dim == 0 || !dim.is_multiple_of(2) {
            return Err(Error::OddDimension(dim));
        }
        if data.len() != dim * dim {
            return Err(Error::InvalidParams(format!(
                "{} entries for a {dim}x{dim} matrix",
                data.len()
            )));
        }
        let scale = data.iter().map(|x| x.abs()).fold(0.0, f64::max);
        let mut asym: f64 = 0.0;
        for i in 0..dim {
            for j in i..dim {
                asym = asym.max((data[i * dim + j] + data[j * dim + i]).abs());
            }
        }
        if asym.is_nan() || asym > SKEW_TOLERANCE * scale {
            return Err(Error::NotSkew { asymmetry: asym });
        }
        Ok(Self { dim, data })
    }

    /// Builds the matrix from its strict upper triangle, `f(p, q)` for `p < q`.
    pub fn from_upper(dim: usize, mut f: impl FnMut(usize, usize) -> T) -> Result<Self> {
        if dim == 0 || !dim.is_multiple_of(2) {
            return Err(Error::OddDimension(dim));
        }
        let mut data = vec![T::zero(); dim * dim];
        for p in 0..dim {
            for q in p + 1..dim {
                let v = f(p, q);
                data[p * dim + q] = v;
                data[q * dim + p] = -v;
            }
        }
        Ok(Self { dim, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.dim + j]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }
}

/// `Pf(A) = phase · exp(log_abs)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PfaffianLog<T> {
    pub log_abs: f64,
    pub phase: T,
}

impl<T: ComplexFloat<Real = f64>> PfaffianLog<T> {
    pub fn value(&self) -> T {
        self.phase * T::from(self.log_abs.exp()).expect("real scalar converts")
    }
}

/// Runs the elimination, calling `pivot` with each diagonal block entry and
/// the accumulated swap sign. Returns false when the matrix is singular.
fn eliminate<T: ComplexFloat<Real = f64>>(a: &SkewMatrix<T>, mut pivot: impl FnMut(T)) -> bool {
    let n = a.dim;
    let mut m = a.data.clone();
    let at = |i: usize, j: usize| i * n + j;
    let mut k = 0;
    while k + 1 < n {
        let mut kp = k + 1;
        let mut best = m[at(k + 1, k)].abs();
        for i in k + 2..n {
            let v = m[at(i, k)].abs();
            if v > best {
                best = v;
                kp = i;
            }
        }
        if kp != k + 1 {
            for j in 0..n {
                m.swap(at(k + 1, j), at(kp, j));
            }
            for i in 0..n {
                m.swap(at(i, k + 1), at(i, kp));
            }
            pivot(-T::one());
        }
        if best == 0.0 {
            return false;
        }
        let head = m[at(k, k + 1)];
        pivot(head);
        if k + 2 < n {
            let inv = T::one() / head;
            let tau: Vec<T> = (k + 2..n).map(|j| m[at(k, j)] * inv).collect();
            let col: Vec<T> = (k + 2..n).map(|i| m[at(i, k + 1)]).collect();
            for (ii, i) in (k + 2..n).enumerate() {
                for (jj, j) in (k + 2..n).enumerate() {
                    m[at(i, j)] = m[at(i, j)] + tau[ii] * col[jj] - col[ii] * tau[jj];
                }
            }
        }
        k += 2;
    }
    true
}

pub fn pfaffian<T: ComplexFloat<Real = f64>>(a: &SkewMatrix<T>) -> T {
    let mut pf = T::one();
    if eliminate(a, |p| pf = pf * p) {
        pf
    } else {
        T::zero()
    }
}

/// Pfaffian as log-magnitude and unit phase, for sizes where the plain
/// product under- or overflows. A singular matrix gives `log_abs = -∞`.
pub fn pfaffian_log<T: ComplexFloat<Real = f64>>(a: &SkewMatrix<T>) -> PfaffianLog<T> {
    let mut log_abs = 0.0;
    let mut phase = T::one();
    let regular = eliminate(a, |p| {
        let r = p.abs();
        log_abs += r.ln();
        phase = phase * (p / T::from(r).expect("real scalar converts"));
    });
    if regular {
        PfaffianLog { log_abs, phase }
    } else {
        PfaffianLog {
            log_abs: f64::NEG_INFINITY,
            phase: T::one(),
        }
    }
}
