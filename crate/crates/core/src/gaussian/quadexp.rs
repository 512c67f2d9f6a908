//! Quadratic exponentials `exp(½vᵀAv + bᵀv + c)` with complex symmetric `A`
//! and their (partial) integrals.
//!
//! Integrals are taken over directions where `Re A ⪯ 0`. Directions with
//! `Re A = 0` are oscillatory and are understood as limits of Gaussian
//! regularizations, which is how the generalized Fresnel formula is obtained.
//! The square root of `det(−A)` is fixed by continuing `det((1−s)I − sA)`
//! from `s = 0` to `s = 1` and tracking its argument; for real `A = iM` this
//! reproduces the `exp(iπ sgn(M)/4)` phase.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{inverse, inverse_c, max_abs_c, re, sym_eigenvalues, symmetrize, symmetrize_c, CMat, CVec, RMat, RVec, I};
use crate::symplectic::{inertia_of, DET_TOL, INERTIA_ZERO_TOL};

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Relative slack when deciding that `Re A` has a positive eigenvalue.
const DECAY_TOL: f64 = 1e-10;

/// Smallest accepted `σ_min/max(σ_max, 1)` of a form being integrated out.
const SINGULAR_RATIO: f64 = 1e-12;

/// `exp(½vᵀAv + bᵀv + c)` on `R^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadExp {
    pub a: CMat,
    pub b: CVec,
    pub c: Complex64,
}

impl QuadExp {
    pub fn new(a: CMat, b: CVec, c: Complex64) -> Self {
        debug_assert_eq!(a.nrows(), b.len());
        Self { a: symmetrize_c(&a), b, c }
    }

    /// The constant function `exp(c)` on `R^d`.
    pub fn constant(d: usize, c: Complex64) -> Self {
        Self { a: CMat::zeros(d, d), b: CVec::zeros(d), c }
    }

    /// `exp(½i vᵀMv)` for real symmetric `M`.
    pub fn phase(m: &RMat) -> Self {
        let d = m.nrows();
        Self { a: m.map(|v| I * v), b: CVec::zeros(d), c: Complex64::new(0.0, 0.0) }
    }

    pub fn dim(&self) -> usize {
        self.b.len()
    }

    pub fn log_eval(&self, v: &RVec) -> Complex64 {
        let vc = v.map(|x| Complex64::new(x, 0.0));
        (vc.transpose() * &self.a * &vc)[0] * 0.5 + (self.b.transpose() * &vc)[0] + self.c
    }

    pub fn eval(&self, v: &RVec) -> Complex64 {
        self.log_eval(v).exp()
    }

    pub fn mul(&self, other: &QuadExp) -> QuadExp {
        assert_eq!(self.dim(), other.dim(), "QuadExp dimension mismatch");
        QuadExp { a: &self.a + &other.a, b: &self.b + &other.b, c: self.c + other.c }
    }

    /// Complex conjugate function.
    pub fn conj(&self) -> QuadExp {
        QuadExp { a: self.a.map(|v| v.conj()), b: self.b.map(|v| v.conj()), c: self.c.conj() }
    }

    /// Multiply by a nonzero constant.
    pub fn scaled(&self, factor: Complex64) -> QuadExp {
        QuadExp { c: self.c + factor.ln(), ..self.clone() }
    }

    /// Substitution `v = T u + t`; the result is a function of `u`.
    pub fn pullback(&self, t: &RMat, shift: &RVec) -> QuadExp {
        let tc = t.map(|v| Complex64::new(v, 0.0));
        let sc = shift.map(|v| Complex64::new(v, 0.0));
        let a_shift = &self.a * &sc;
        QuadExp {
            a: symmetrize_c(&(tc.transpose() * &self.a * &tc)),
            b: tc.transpose() * (&a_shift + &self.b),
            c: self.c + (sc.transpose() * &a_shift)[0] * 0.5 + (self.b.transpose() * &sc)[0],
        }
    }

    /// Integrate over the coordinates listed in `vars`, keeping the remaining
    /// ones in their original order.
    pub fn integrate_out(&self, vars: &[usize]) -> Result<QuadExp> {
        let d = self.dim();
        let mut is_int = vec![false; d];
        for &v in vars {
            if v >= d || is_int[v] {
                return Err(Error::Dimension(format!("bad integration index {v} for dimension {d}")));
            }
            is_int[v] = true;
        }
        let int: Vec<usize> = (0..d).filter(|&i| is_int[i]).collect();
        let keep: Vec<usize> = (0..d).filter(|&i| !is_int[i]).collect();
        let sub = |rows: &[usize], cols: &[usize]| CMat::from_fn(rows.len(), cols.len(), |i, j| self.a[(rows[i], cols[j])]);
        let a_ii = sub(&int, &int);
        let a_ik = sub(&int, &keep);
        let a_kk = sub(&keep, &keep);
        let b_i = CVec::from_fn(int.len(), |i, _| self.b[int[i]]);
        let b_k = CVec::from_fn(keep.len(), |i, _| self.b[keep[i]]);

        check_decay(&a_ii)?;
        let neg = -&a_ii;
        if !int.is_empty() {
            let sv = neg.clone().singular_values();
            let (lo, hi) = (sv.min(), sv.max());
            if !(lo > SINGULAR_RATIO * hi.max(1.0)) {
                return Err(Error::InvalidParameter(format!(
                    "singular quadratic form, σ_min={lo:e}, σ_max={hi:e}"
                )));
            }
        }
        let inv = inverse_c(&a_ii, "quadratic form")?;
        let log_sqrt_det = continuous_log_det(&neg)? * 0.5;
        let k = int.len() as f64;

        let a_ki = a_ik.transpose();
        let a_new = symmetrize_c(&(a_kk - &a_ki * &inv * &a_ik));
        let b_new = b_k - &a_ki * &inv * &b_i;
        let c_new = self.c - (b_i.transpose() * &inv * &b_i)[0] * 0.5 + Complex64::new(0.5 * k * TWO_PI.ln(), 0.0)
            - log_sqrt_det;
        Ok(QuadExp { a: a_new, b: b_new, c: c_new })
    }

    /// Integral over all of `R^d`.
    pub fn integrate_all(&self) -> Result<Complex64> {
        let all: Vec<usize> = (0..self.dim()).collect();
        Ok(self.integrate_out(&all)?.c.exp())
    }

    /// Log of the integral; avoids underflow for tiny results.
    pub fn log_integral(&self) -> Result<Complex64> {
        let all: Vec<usize> = (0..self.dim()).collect();
        Ok(self.integrate_out(&all)?.c)
    }
}

fn check_decay(a: &CMat) -> Result<()> {
    if a.nrows() == 0 {
        return Ok(());
    }
    let ra = symmetrize(&re(a));
    let top = sym_eigenvalues(&ra).last().copied().unwrap_or(0.0);
    if top > DECAY_TOL * max_abs_c(a).max(1.0) {
        return Err(Error::DivergentIntegral(format!("Re A has a growing direction (eigenvalue {top:e})")));
    }
    Ok(())
}

/// `ln det(m)` continued along `s ↦ (1−s)I + s·m` from `s = 0`.
///
/// Requires the Hermitian part of `m` to be positive semidefinite, which keeps
/// every intermediate matrix nonsingular for `s < 1`.
pub fn continuous_log_det(m: &CMat) -> Result<Complex64> {
    let d = m.nrows();
    if d == 0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let id = CMat::identity(d, d);
    let at = |s: f64| (&id * Complex64::new(1.0 - s, 0.0) + m * Complex64::new(s, 0.0)).determinant();
    let mut s = 0.0_f64;
    let mut step = 1.0_f64 / 32.0;
    let mut prev = Complex64::new(1.0, 0.0);
    let mut arg = 0.0;
    while s < 1.0 {
        let next_s = (s + step).min(1.0);
        let next = at(next_s);
        if next.norm() == 0.0 {
            return Err(Error::InvalidParameter("determinant vanishes along the continuation path".into()));
        }
        let dtheta = (next / prev).arg();
        if dtheta.abs() > 0.25 && step > 1e-9 {
            step *= 0.5;
            continue;
        }
        arg += dtheta;
        prev = next;
        s = next_s;
        step = (step * 1.5).min(1.0 / 8.0);
    }
    Ok(Complex64::new(prev.norm().ln(), arg))
}

/// `∫ exp(½i⟨Mz,z⟩ + i⟨b,z⟩) dz` for complex symmetric `M` with `Im M ⪰ 0`.
pub fn complex_gaussian_integral(m: &CMat, b: &CVec) -> Result<Complex64> {
    if m.nrows() != m.ncols() || m.nrows() != b.len() {
        return Err(Error::Dimension("M must be square and match b".into()));
    }
    QuadExp::new(m.map(|v| I * v), b.map(|v| I * v), Complex64::new(0.0, 0.0)).integrate_all()
}

/// Closed-form data of the generalized Fresnel integral
/// `(2π)^{−n/2} ∫ e^{−i⟨p,x⟩} e^{½i⟨Mx,x⟩} dx = |det M|^{−1/2} e^{iπ sgn(M)/4} e^{−½i⟨M⁻¹p,p⟩}`.
#[derive(Debug, Clone, PartialEq)]
pub struct FresnelResult {
    pub modulus_factor: f64,
    pub phase_index: f64,
    pub inverse_matrix: RMat,
}

impl FresnelResult {
    pub fn value(&self, p: &RVec) -> Complex64 {
        let q = (&self.inverse_matrix * p).dot(p);
        Complex64::from_polar(self.modulus_factor, std::f64::consts::FRAC_PI_4 * self.phase_index - 0.5 * q)
    }
}

pub fn fresnel_closed_form(m: &RMat) -> Result<FresnelResult> {
    let det = m.determinant();
    if !(det.abs() > DET_TOL) {
        return Err(Error::InvalidParameter(format!("Fresnel matrix is singular, det M={det:e}")));
    }
    let inertia = inertia_of(m, INERTIA_ZERO_TOL)?;
    Ok(FresnelResult {
        modulus_factor: det.abs().powf(-0.5),
        phase_index: inertia.sgn() as f64,
        inverse_matrix: symmetrize(&inverse(m, "M")?),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::to_complex;
    use std::f64::consts::{FRAC_PI_4, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn real_gaussian() {
        let v = complex_gaussian_integral(&CMat::from_element(1, 1, I), &CVec::zeros(1)).unwrap();
        assert!((v - c((2.0 * PI).sqrt(), 0.0)).norm() < 1e-14);
    }

    #[test]
    fn fresnel_one_dimensional_phase() {
        let v = complex_gaussian_integral(&CMat::from_element(1, 1, c(1.0, 0.0)), &CVec::zeros(1)).unwrap();
        let expected = Complex64::from_polar((2.0 * PI).sqrt(), FRAC_PI_4);
        assert!((v - expected).norm() < 1e-13);
        let v = complex_gaussian_integral(&CMat::from_element(1, 1, c(-1.0, 0.0)), &CVec::zeros(1)).unwrap();
        assert!((v - expected.conj()).norm() < 1e-13);
    }

    #[test]
    fn fresnel_closed_form_examples() {
        let f = fresnel_closed_form(&RMat::from_element(1, 1, 1.0)).unwrap();
        assert!((f.value(&RVec::zeros(1)) - Complex64::from_polar(1.0, FRAC_PI_4)).norm() < 1e-15);
        let f = fresnel_closed_form(&RMat::from_diagonal(&RVec::from_vec(vec![1.0, -1.0]))).unwrap();
        assert_eq!((f.modulus_factor, f.phase_index), (1.0, 0.0));
        assert!(fresnel_closed_form(&RMat::zeros(2, 2)).is_err());
    }

    #[test]
    fn real_matrices_reproduce_fresnel() {
        let m = RMat::from_row_slice(3, 3, &[1.0, 0.3, -0.2, 0.3, -2.0, 0.5, -0.2, 0.5, 0.7]);
        let p = RVec::from_vec(vec![0.4, -1.1, 0.25]);
        let closed = fresnel_closed_form(&m).unwrap().value(&p) * (2.0 * PI).powf(1.5);
        let via = complex_gaussian_integral(&to_complex(&m), &p.map(|v| c(-v, 0.0))).unwrap();
        assert!((closed - via).norm() < 1e-10 * closed.norm());
    }

    #[test]
    fn growing_direction_is_divergent() {
        let m = CMat::from_element(1, 1, c(1.0, -0.5));
        assert!(matches!(complex_gaussian_integral(&m, &CVec::zeros(1)), Err(Error::DivergentIntegral(_))));
    }

    #[test]
    fn continuation_matches_principal_branch_per_eigenvalue() {
        // diagonal case: the continued log is the sum of principal logs
        let d = CMat::from_diagonal(&CVec::from_vec(vec![c(0.0, 3.0), c(0.0, -2.0), c(1.0, 5.0), c(0.1, -7.0)]));
        let lg = continuous_log_det(&d).unwrap();
        let expected: Complex64 = d.diagonal().iter().map(|v| v.ln()).sum();
        assert!((lg - expected).norm() < 1e-12);
    }

    #[test]
    fn partial_integration_matches_full() {
        // integrating in two stages equals integrating at once
        let a = CMat::from_row_slice(
            3,
            3,
            &[c(-1.0, 0.3), c(0.2, 0.1), c(0.0, 0.4), c(0.2, 0.1), c(-0.8, -1.0), c(0.1, 0.0), c(0.0, 0.4), c(0.1, 0.0), c(-0.5, 2.0)],
        );
        let q = QuadExp::new(a, CVec::from_vec(vec![c(0.1, 0.2), c(-0.3, 0.5), c(0.0, -1.0)]), c(0.2, -0.1));
        let full = q.integrate_all().unwrap();
        let staged = q.integrate_out(&[1]).unwrap().integrate_all().unwrap();
        assert!((full - staged).norm() < 1e-12 * full.norm());
    }

    #[test]
    fn pullback_evaluates_consistently() {
        let q = QuadExp::new(
            CMat::from_row_slice(2, 2, &[c(-1.0, 0.5), c(0.3, 0.0), c(0.3, 0.0), c(-0.2, 1.0)]),
            CVec::from_vec(vec![c(0.1, 0.0), c(0.0, 0.7)]),
            c(0.3, 0.2),
        );
        let t = RMat::from_row_slice(2, 3, &[1.0, -1.0, 0.5, 0.0, 2.0, 1.0]);
        let s = RVec::from_vec(vec![0.25, -0.5]);
        let pb = q.pullback(&t, &s);
        let u = RVec::from_vec(vec![0.3, -0.2, 1.1]);
        assert!((pb.eval(&u) - q.eval(&(&t * &u + &s))).norm() < 1e-14);
    }
}
