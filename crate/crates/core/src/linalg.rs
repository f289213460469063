//! Small dense helpers on plain slices. Vectors in this crate are `Vec<f64>`
//! or `Vec<Complex64>`; nalgebra is used only where a factorization is needed.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{DunklError, Result};

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Bilinear (not Hermitian) pairing of a real and a complex vector.
pub fn dot_rc(a: &[f64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| y * *x).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn norm_c(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

pub fn axpy(alpha: f64, x: &[f64], y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(a, b)| alpha * a + b).collect()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Matrix whose columns are the given vectors.
pub fn from_columns(cols: &[Vec<f64>]) -> DMatrix<f64> {
    let n = cols.first().map_or(0, Vec::len);
    DMatrix::from_fn(n, cols.len(), |i, j| cols[j][i])
}

pub fn mat_vec(m: &DMatrix<f64>, v: &[f64]) -> Vec<f64> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)] * v[j]).sum())
        .collect()
}

pub fn mat_vec_c(m: &DMatrix<f64>, v: &[Complex64]) -> Vec<Complex64> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| v[j] * m[(i, j)]).sum())
        .collect()
}

/// Inverse of a square matrix, rejecting near-singular input.
pub fn checked_inverse(m: &DMatrix<f64>, det_floor: f64) -> Result<DMatrix<f64>> {
    let det = m.determinant();
    if !det.is_finite() || det.abs() <= det_floor {
        return Err(DunklError::SingularBasis { det });
    }
    m.clone()
        .try_inverse()
        .ok_or(DunklError::SingularBasis { det })
}

pub fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(DunklError::DimensionMismatch { expected, got })
    }
}
