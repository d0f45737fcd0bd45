//! Float algorithms backed by nalgebra's symmetric eigen and SVD solvers.

use nalgebra::{DMatrix, RealField};
use num_traits::Float;

use crate::matrix::{Dense, SymMatrix};
use crate::scalar::Scalar;

fn to_na<T: Scalar + RealField + Copy>(rows: usize, cols: usize, get: impl Fn(usize, usize) -> T) -> DMatrix<T> {
    DMatrix::from_fn(rows, cols, get)
}

/// Eigenvalues of a symmetric matrix in ascending order.
pub fn eigenvalues<T: Scalar + RealField + Float + Copy>(m: &SymMatrix<T>) -> Vec<T> {
    let a = to_na(m.n(), m.n(), |i, j| *m.get(i, j));
    let mut ev: Vec<T> = a.symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
    ev
}

fn count_above<T: Float>(sigmas: &[T], n: usize, rtol: f64) -> usize {
    let smax = sigmas.iter().fold(T::zero(), |m, &s| m.max(s));
    let tau = T::from(n as f64 * rtol).unwrap_or(T::zero()) * smax;
    sigmas.iter().filter(|&&s| s > tau).count()
}

pub fn sym_rank<T: Scalar + RealField + Float + Copy>(m: &SymMatrix<T>, rtol: f64) -> usize {
    let sigmas: Vec<T> = eigenvalues(m).into_iter().map(Float::abs).collect();
    count_above(&sigmas, m.n(), rtol)
}

pub fn dense_rank<T: Scalar + RealField + Float + Copy>(m: &Dense<T>, rtol: f64) -> usize {
    if m.rows() == 0 || m.cols() == 0 {
        return 0;
    }
    let a = to_na(m.rows(), m.cols(), |i, j| *m.get(i, j));
    let sigmas: Vec<T> = a.singular_values().iter().copied().collect();
    count_above(&sigmas, m.rows().max(m.cols()), rtol)
}

pub fn det<T: Scalar + RealField + Float + Copy>(m: &Dense<T>) -> T {
    to_na(m.rows(), m.cols(), |i, j| *m.get(i, j)).determinant()
}

pub fn is_psd<T: Scalar + RealField + Float + Copy>(m: &SymMatrix<T>, atol: f64) -> bool {
    let ev = eigenvalues(m);
    let lo = Scalar::to_f64(&ev[0]);
    let hi = Scalar::to_f64(&ev[ev.len() - 1]);
    lo >= -atol * hi.max(1.0)
}
