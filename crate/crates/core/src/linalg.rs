//! Small dense helpers on top of nalgebra shared by every module.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type RMat = DMatrix<f64>;
pub type RVec = DVector<f64>;
pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Largest absolute entry.
pub fn max_abs(m: &RMat) -> f64 {
    m.iter().fold(0.0, |acc, v| acc.max(v.abs()))
}

pub fn max_abs_c(m: &CMat) -> f64 {
    m.iter().fold(0.0, |acc, v| acc.max(v.norm()))
}

pub fn asymmetry(m: &RMat) -> f64 {
    max_abs(&(m - m.transpose()))
}

pub fn symmetrize(m: &RMat) -> RMat {
    (m + m.transpose()) * 0.5
}

pub fn symmetrize_c(m: &CMat) -> CMat {
    (m + m.transpose()) * Complex64::new(0.5, 0.0)
}

pub fn to_complex(m: &RMat) -> CMat {
    m.map(|v| Complex64::new(v, 0.0))
}

pub fn to_complex_vec(v: &RVec) -> CVec {
    v.map(|x| Complex64::new(x, 0.0))
}

pub fn re(m: &CMat) -> RMat {
    m.map(|v| v.re)
}

pub fn im(m: &CMat) -> RMat {
    m.map(|v| v.im)
}

pub fn inverse(m: &RMat, what: &str) -> Result<RMat> {
    m.clone()
        .try_inverse()
        .ok_or_else(|| Error::InvalidParameter(format!("{what} is singular")))
}

pub fn inverse_c(m: &CMat, what: &str) -> Result<CMat> {
    m.clone()
        .try_inverse()
        .ok_or_else(|| Error::InvalidParameter(format!("{what} is singular")))
}

/// Relative distance `|a−b| / max(|a|,|b|,floor)`.
pub fn rel_diff(a: f64, b: f64, floor: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(floor)
}

/// Eigenvalues of a real symmetric matrix in ascending order.
pub fn sym_eigenvalues(m: &RMat) -> Vec<f64> {
    let mut ev: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

/// Block matrix `[[a, b], [c, d]]` from four equally sized square blocks.
pub fn blocks(a: &RMat, b: &RMat, c: &RMat, d: &RMat) -> RMat {
    let n = a.nrows();
    let mut m = RMat::zeros(2 * n, 2 * n);
    m.view_mut((0, 0), (n, n)).copy_from(a);
    m.view_mut((0, n), (n, n)).copy_from(b);
    m.view_mut((n, 0), (n, n)).copy_from(c);
    m.view_mut((n, n), (n, n)).copy_from(d);
    m
}
