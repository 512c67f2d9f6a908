//! Tensor Gauss–Hermite quadrature for oscillatory Gaussian integrands
//! `exp(½vᵀAv + bᵀv + c)` with `Re A ≺ 0`.
//!
//! The linear term is removed first by moving the contour to the complex
//! stationary point `μ = −A⁻¹b`, which is allowed because the integrand is
//! entire and decays in every real direction. Coordinates are then chosen so
//! that `Re A` and `Im A` are simultaneously diagonal: with `−Re A = RRᵀ` and
//! `R⁻¹(Im A)R⁻ᵀ = Q diag(κ) Qᵀ`, the map `v = √2 R⁻ᵀQ s` turns the
//! integrand into `Π_j exp((iκ_j − 1)s_j²)`. Against the Hermite weight
//! `exp(−s²)` each axis leaves the bounded chirp `exp(iκ_j s²)`, which the
//! rule resolves once the node count is a fixed multiple of `1 + κ_j²`. The tensor rule on a
//! diagonal form is a product of one-dimensional sums.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::{Cholesky, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gaussian::QuadExp;
use crate::linalg::{im, inverse_c, re, symmetrize, CVec, RMat, RVec};

/// Number of eigenvalues of the Hermite Jacobi matrix below `x`
/// (Sturm count of the `LDLᵀ` pivots).
fn sturm_count(n: usize, x: f64) -> usize {
    let mut count = 0;
    let mut d = -x;
    for k in 0..n {
        if k > 0 {
            let b2 = k as f64 / 2.0;
            d = -x - b2 / if d == 0.0 { f64::MIN_POSITIVE } else { d };
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

/// Orthonormal Hermite recursion at `z`: returns `(p_n, p_{n−1}, log scale)`,
/// with both values divided by `exp(scale)`.
fn hermite_pair(n: usize, z: f64) -> (f64, f64, f64) {
    const PIM4: f64 = 0.751_125_544_464_942_5;
    let mut p1 = PIM4;
    let mut p2 = 0.0;
    let mut scale = 0.0;
    for j in 0..n {
        let p3 = p2;
        p2 = p1;
        let jf = j as f64;
        p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
        if p1.abs() > 1e100 {
            p1 *= 1e-100;
            p2 *= 1e-100;
            scale += 100.0 * std::f64::consts::LN_10;
        }
    }
    (p1, p2, scale)
}

/// Nodes and weights of the `n`-point Gauss–Hermite rule for the weight
/// `exp(−x²)`, nodes in decreasing order. Nodes are bracketed by bisection on
/// the Jacobi matrix and polished by Newton steps.
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    let upper = (2.0 * nf + 1.0).sqrt() + 1.0;
    for i in 0..n.div_ceil(2) {
        // the (n − i)-th smallest eigenvalue, i.e. the i-th largest
        let target = n - i;
        let (mut lo, mut hi) = (0.0, if i == 0 { upper } else { x[i - 1] });
        while hi - lo > 1e-5 {
            let mid = 0.5 * (lo + hi);
            if sturm_count(n, mid) >= target {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let mut z = 0.5 * (lo + hi);
        if n % 2 == 1 && i == n / 2 {
            z = 0.0;
        }
        let mut pp = 1.0;
        let mut scale = 0.0;
        for step in 0..6 {
            let (p1, p2, s) = hermite_pair(n, z);
            pp = (2.0 * nf).sqrt() * p2;
            scale = s;
            if step == 5 || pp == 0.0 {
                break;
            }
            let dz = p1 / pp;
            if dz.abs() < 1e-5 {
                z -= dz;
            }
            if dz.abs() <= 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = (2.0_f64.ln() - 2.0 * (pp.abs().ln() + scale)).exp();
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

type Rule = Arc<(Vec<f64>, Vec<f64>)>;

fn cached_rule(n: usize) -> Rule {
    static RULES: OnceLock<Mutex<HashMap<usize, Rule>>> = OnceLock::new();
    let map = RULES.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(r) = map.lock().expect("rule cache").get(&n) {
        return r.clone();
    }
    let rule = Arc::new(gauss_hermite(n));
    map.lock().expect("rule cache").entry(n).or_insert(rule).clone()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOptions {
    /// Nodes on an axis without oscillation.
    pub min_nodes: usize,
    /// Cap on the nodes of any axis.
    pub max_nodes: usize,
    /// Largest accepted difference between the rule and its coarser
    /// refinement partner.
    pub refine_tol: f64,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self { min_nodes: 80, max_nodes: 2048, refine_tol: 1e-5 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureResult {
    pub value: Complex64,
    /// `|fine − coarse|`.
    pub refinement_difference: f64,
    pub nodes: Vec<usize>,
    /// Oscillation ratios `κ_j` of the whitened axes.
    pub kappa: Vec<f64>,
}

/// Nodes per unit of `1 + κ²`. The error of the rule on `exp(iκs²)` is
/// governed by `n/κ²` and reaches rounding level near 20.
const NODES_PER_CHIRP: f64 = 20.0;

fn round16(v: f64, lo: usize, hi: usize) -> usize {
    let v = if v.is_finite() { v.min(1e9) } else { 1e9 };
    (((v / 16.0).ceil() as usize) * 16).clamp(lo, hi.max(lo))
}

fn node_counts(kappa: &[f64], opts: &QuadratureOptions) -> (Vec<usize>, Vec<usize>) {
    let fine: Vec<usize> = kappa
        .iter()
        .map(|k| round16(NODES_PER_CHIRP * (1.0 + k * k), opts.min_nodes, opts.max_nodes))
        .collect();
    let coarse = fine.iter().map(|&n| (3 * n / 8 * 2).max(8)).collect();
    (fine, coarse)
}

/// `Σ_k w_k exp(a s_k²)`.
fn axis_sum(a: Complex64, rule: &(Vec<f64>, Vec<f64>)) -> Complex64 {
    let (nodes, weights) = rule;
    nodes.iter().zip(weights).filter(|(_, w)| **w > 0.0).map(|(&t, &w)| (a * t * t).exp() * w).sum()
}

/// Integral of `q` over `R^d` by the whitened Gauss–Hermite rule, checked
/// against a coarser rule.
pub fn gh_integrate(q: &QuadExp, opts: &QuadratureOptions) -> Result<QuadratureResult> {
    let d = q.dim();
    if d == 0 {
        return Ok(QuadratureResult { value: q.c.exp(), refinement_difference: 0.0, nodes: vec![], kappa: vec![] });
    }
    let h = -symmetrize(&re(&q.a));
    let chol = Cholesky::new(h.clone()).ok_or_else(|| {
        Error::DivergentIntegral("Gauss–Hermite quadrature needs Re A negative definite".into())
    })?;
    let r_inv = chol
        .l()
        .try_inverse()
        .ok_or_else(|| Error::DivergentIntegral("Re A is numerically singular".into()))?;
    let k_tilde = symmetrize(&(&r_inv * im(&q.a) * r_inv.transpose()));
    let eig = SymmetricEigen::new(k_tilde);
    let kappa: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    let t = r_inv.transpose() * &eig.eigenvectors * std::f64::consts::SQRT_2;

    let a_inv_b = inverse_c(&q.a, "A")? * &q.b;
    let centred = QuadExp::new(q.a.clone(), CVec::zeros(d), q.c - q.b.dot(&a_inv_b) * 0.5);
    let local = centred.pullback(&t, &RVec::zeros(d));
    let jac = t.determinant().abs();

    let (fine, coarse) = node_counts(&kappa, opts);
    let rule_value = |counts: &[usize]| -> Complex64 {
        // the weight exp(−s²) is part of the rule, so add 1 back on the diagonal
        let prod: Complex64 = (0..d).map(|j| axis_sum(local.a[(j, j)] * 0.5 + 1.0, &cached_rule(counts[j]))).product();
        prod * local.c.exp() * jac
    };
    let value = rule_value(&fine);
    let check = rule_value(&coarse);
    let difference = (value - check).norm();
    if !(difference <= opts.refine_tol) {
        return Err(Error::QuadratureNonconvergence { difference });
    }
    Ok(QuadratureResult { value, refinement_difference: difference, nodes: fine, kappa })
}

/// `(2π)^{−n/2} ∫ exp(½i⟨Mx,x⟩ − i⟨p,x⟩) dx` for real symmetric nonsingular
/// `M`, by direct quadrature of the regularized integral.
///
/// In the eigenbasis of `M` the integral splits into one-dimensional chirps
/// `∫ exp(½iλy² − iqy) W(y/R) dy` with the smooth cutoff
/// `W(t) = exp(−t⁸)`. `R` keeps the stationary point deep inside the
/// plateau and the phase velocity `|λ|R` at the cutoff large, so the cutoff
/// only touches a rapidly oscillating tail; the trapezoid step resolves the
/// largest local frequency four times over.
pub fn fresnel_quadrature(m: &RMat, p: &RVec) -> Result<Complex64> {
    let n = m.nrows();
    if m.ncols() != n || p.len() != n {
        return Err(Error::Dimension("M must be square and match p".into()));
    }
    let eig = SymmetricEigen::new(symmetrize(m));
    let q = eig.eigenvectors.transpose() * p;
    let mut total = Complex64::new((2.0 * std::f64::consts::PI).powf(-0.5 * n as f64), 0.0);
    for (j, &lambda) in eig.eigenvalues.iter().enumerate() {
        if !(lambda.abs() > 1e-6) {
            return Err(Error::InvalidParameter(format!("M is singular (eigenvalue {lambda:e})")));
        }
        let stationary = (q[j] / lambda).abs();
        let r = 20.0_f64.max(40.0 / lambda.abs()).max(8.0 * stationary);
        let extent = 1.6 * r;
        let top_freq = lambda.abs() * extent + q[j].abs();
        let h0 = 0.25 * std::f64::consts::PI / top_freq;
        let half = (extent / h0).ceil() as i64;
        let h = extent / half as f64;
        let mut sum = Complex64::new(0.0, 0.0);
        for k in -half..=half {
            let y = k as f64 * h;
            let w = (-(y / r).powi(8)).exp();
            sum += Complex64::from_polar(w, 0.5 * lambda * y * y - q[j] * y);
        }
        total *= sum * h;
    }
    Ok(total)
}
