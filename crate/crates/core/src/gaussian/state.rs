use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::engine::MWDescriptor;
use crate::error::{Error, Result};
use crate::gaussian::quadexp::QuadExp;
use crate::linalg::{asymmetry, im, inverse, max_abs, max_abs_c, re, sym_eigenvalues, symmetrize_c, CMat, CVec, RMat, RVec, I};
use crate::symplectic::{FreeGenerator, PhaseSpacePoint};

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// `ψ(x) = amp · exp(½i⟨Γ(x−c),(x−c)⟩ + i⟨k, x−c⟩)` with `Im Γ ≻ 0`,
/// where `c` is `center` and `k` is `momentum`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    pub gamma: CMat,
    pub center: RVec,
    pub momentum: RVec,
    pub amp: Complex64,
}

impl GaussianState {
    pub fn new(gamma: CMat, center: RVec, momentum: RVec, amp: Complex64) -> Result<Self> {
        let n = gamma.nrows();
        if n == 0 || gamma.ncols() != n || center.len() != n || momentum.len() != n {
            return Err(Error::Dimension("Gaussian state parts have inconsistent sizes".into()));
        }
        let scale = max_abs_c(&gamma).max(1.0);
        let asym = max_abs_c(&(&gamma - gamma.transpose()));
        if asym > 1e-12 * scale {
            return Err(Error::InvalidParameter(format!("Γ is not symmetric (asymmetry {asym:e})")));
        }
        let gamma = symmetrize_c(&gamma);
        let low = sym_eigenvalues(&im(&gamma))[0];
        if !(low > 0.0) {
            return Err(Error::InvalidParameter(format!("Im Γ is not positive definite (eigenvalue {low:e})")));
        }
        Ok(Self { gamma, center, momentum, amp })
    }

    /// `π^{−n/4} exp(−|x|²/2)`, normalized.
    pub fn standard(n: usize) -> Self {
        Self {
            gamma: CMat::identity(n, n) * I,
            center: RVec::zeros(n),
            momentum: RVec::zeros(n),
            amp: Complex64::new(std::f64::consts::PI.powf(-(n as f64) / 4.0), 0.0),
        }
    }

    pub fn n(&self) -> usize {
        self.center.len()
    }

    pub fn eval(&self, x: &RVec) -> Complex64 {
        self.to_quadexp().eval(x)
    }

    /// The same function written as `exp(½xᵀAx + bᵀx + c)`.
    pub fn to_quadexp(&self) -> QuadExp {
        let cc = self.center.map(|v| Complex64::new(v, 0.0));
        let kc = self.momentum.map(|v| Complex64::new(v, 0.0));
        let gc = &self.gamma * &cc;
        let a = &self.gamma * I;
        let b = (&kc - &gc) * I;
        let c = self.amp.ln() + I * ((cc.transpose() * &gc)[0] * 0.5 - (kc.transpose() * &cc)[0]);
        QuadExp { a, b, c }
    }

    /// Inverse of [`GaussianState::to_quadexp`]; fails when the quadratic
    /// part is not normalizable.
    pub fn from_quadexp(q: &QuadExp) -> Result<Self> {
        let gamma = symmetrize_c(&(&q.a * -I));
        let im_g = im(&gamma);
        let low = sym_eigenvalues(&im_g)[0];
        if !(low > 0.0) {
            return Err(Error::InvalidParameter(format!("result is not normalizable (Im Γ eigenvalue {low:e})")));
        }
        // b = i(k − Γc) with real c and k
        let beta: CVec = &q.b * -I;
        let center = -(inverse(&im_g, "Im Γ")? * beta.map(|v| v.im));
        let momentum = beta.map(|v| v.re) + re(&gamma) * &center;
        let cc = center.map(|v| Complex64::new(v, 0.0));
        let kc = momentum.map(|v| Complex64::new(v, 0.0));
        let quad = (cc.transpose() * &gamma * &cc)[0] * 0.5 - (kc.transpose() * &cc)[0];
        let amp = (q.c - I * quad).exp();
        Ok(Self { gamma, center, momentum, amp })
    }

    /// Largest parameter difference, including the amplitude (global phase).
    pub fn max_param_diff(&self, other: &GaussianState) -> f64 {
        max_abs_c(&(&self.gamma - &other.gamma))
            .max(max_abs(&RMat::from_columns(&[&self.center - &other.center])))
            .max(max_abs(&RMat::from_columns(&[&self.momentum - &other.momentum])))
            .max((self.amp - other.amp).norm())
    }
}

/// `√⟨g, g⟩`.
pub fn gauss_norm(g: &GaussianState) -> Result<f64> {
    Ok(gauss_inner(g, g)?.re.max(0.0).sqrt())
}

/// `⟨g1, g2⟩ = ∫ conj(g1) g2`.
pub fn gauss_inner(g1: &GaussianState, g2: &GaussianState) -> Result<Complex64> {
    if g1.n() != g2.n() {
        return Err(Error::Dimension(format!("inner product of n={} and n={} states", g1.n(), g2.n())));
    }
    g1.to_quadexp().conj().mul(&g2.to_quadexp()).integrate_all()
}

/// Heisenberg–Weyl operator
/// `T(z₀)f(x) = exp(i(⟨p₀,x⟩ − ½⟨p₀,x₀⟩)) f(x − x₀)` in closed form.
pub fn gauss_hw(z0: &PhaseSpacePoint, g: &GaussianState) -> GaussianState {
    let phase = z0.p.dot(&g.center) + 0.5 * z0.p.dot(&z0.x);
    GaussianState {
        gamma: g.gamma.clone(),
        center: &g.center + &z0.x,
        momentum: &g.momentum + &z0.p,
        amp: g.amp * Complex64::from_polar(1.0, phase),
    }
}

/// Prefactor `(2πi)^{−n/2} i^m √|det L|` of `Ŝ_{W,m}`.
pub fn quad_fourier_prefactor(gen: &FreeGenerator) -> Complex64 {
    let n = gen.n() as f64;
    let phase = std::f64::consts::FRAC_PI_2 * (gen.m() as f64 - 0.5 * n);
    Complex64::from_polar(TWO_PI.powf(-0.5 * n) * gen.det_l().abs().sqrt(), phase)
}

/// Kernel `prefactor · exp(iW(x, x'))` as a quadratic exponential in `(x, x')`.
pub fn quad_fourier_kernel(gen: &FreeGenerator) -> QuadExp {
    let n = gen.n();
    let mut w = RMat::zeros(2 * n, 2 * n);
    w.view_mut((0, 0), (n, n)).copy_from(gen.p());
    w.view_mut((0, n), (n, n)).copy_from(&(-gen.l().transpose()));
    w.view_mut((n, 0), (n, n)).copy_from(&(-gen.l()));
    w.view_mut((n, n), (n, n)).copy_from(gen.q());
    QuadExp::phase(&w).scaled(quad_fourier_prefactor(gen))
}

/// `Ŝ_{W,m}g` in closed form.
pub fn gauss_quad_fourier(gen: &FreeGenerator, g: &GaussianState) -> Result<GaussianState> {
    let n = gen.n();
    if g.n() != n {
        return Err(Error::Dimension(format!("generator n={n}, state n={}", g.n())));
    }
    let mut pick = RMat::zeros(n, 2 * n);
    pick.view_mut((0, n), (n, n)).fill_with_identity();
    let input = g.to_quadexp().pullback(&pick, &RVec::zeros(n));
    let joint = quad_fourier_kernel(gen).mul(&input);
    let vars: Vec<usize> = (n..2 * n).collect();
    GaussianState::from_quadexp(&joint.integrate_out(&vars)?)
}

/// `(T(z₀)ψ)(x)` as a quadratic exponential in `(x, x₀, p₀)`.
pub fn translated_family(g: &GaussianState) -> QuadExp {
    let n = g.n();
    let mut shift = RMat::zeros(n, 3 * n);
    shift.view_mut((0, 0), (n, n)).fill_with_identity();
    shift.view_mut((0, n), (n, n)).copy_from(&(-RMat::identity(n, n)));
    let shifted = g.to_quadexp().pullback(&shift, &RVec::zeros(n));
    // i⟨p₀, x⟩ − ½i⟨p₀, x₀⟩
    let mut ph = RMat::zeros(3 * n, 3 * n);
    for k in 0..n {
        ph[(k, 2 * n + k)] = 1.0;
        ph[(2 * n + k, k)] = 1.0;
        ph[(n + k, 2 * n + k)] = -0.5;
        ph[(2 * n + k, n + k)] = -0.5;
    }
    shifted.mul(&QuadExp::phase(&ph))
}

/// `R(S)g` for the Weyl operator described by `desc`, by integrating the
/// Gaussian family `z₀ ↦ exp(½i⟨M_S z₀,z₀⟩)(T(z₀)g)(x)` over `z₀` in closed
/// form.
pub fn mw_apply_gaussian(desc: &MWDescriptor, g: &GaussianState) -> Result<GaussianState> {
    let n = desc.n();
    if g.n() != n {
        return Err(Error::Dimension(format!("descriptor n={n}, state n={}", g.n())));
    }
    let mut embed = RMat::zeros(2 * n, 3 * n);
    embed.view_mut((0, n), (2 * n, 2 * n)).fill_with_identity();
    let symbol = QuadExp::phase(desc.ms()).pullback(&embed, &RVec::zeros(2 * n));
    let joint = translated_family(g).mul(&symbol);
    let vars: Vec<usize> = (n..3 * n).collect();
    let out = joint.integrate_out(&vars).map_err(|e| match e {
        Error::InvalidParameter(msg) => Error::EigenvalueOne(format!("z₀-integral degenerate: {msg}")),
        other => other,
    })?;
    GaussianState::from_quadexp(&out.scaled(desc.prefactor()))
}

/// JSON shape of a [`GaussianState`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GaussianStateJson {
    pub n: usize,
    pub gamma_re: Vec<Vec<f64>>,
    pub gamma_im: Vec<Vec<f64>>,
    pub center: Vec<f64>,
    pub momentum: Vec<f64>,
    pub amp_re: f64,
    pub amp_im: f64,
}

impl From<&GaussianState> for GaussianStateJson {
    fn from(g: &GaussianState) -> Self {
        let rows = |m: &RMat| (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect();
        Self {
            n: g.n(),
            gamma_re: rows(&re(&g.gamma)),
            gamma_im: rows(&im(&g.gamma)),
            center: g.center.iter().copied().collect(),
            momentum: g.momentum.iter().copied().collect(),
            amp_re: g.amp.re,
            amp_im: g.amp.im,
        }
    }
}

impl TryFrom<GaussianStateJson> for GaussianState {
    type Error = Error;

    fn try_from(j: GaussianStateJson) -> Result<Self> {
        let gr = crate::io::rows_to_matrix(j.n, j.n, &j.gamma_re)?;
        let gi = crate::io::rows_to_matrix(j.n, j.n, &j.gamma_im)?;
        if j.center.len() != j.n || j.momentum.len() != j.n {
            return Err(Error::Malformed("center/momentum length must equal n".into()));
        }
        let gamma = CMat::from_fn(j.n, j.n, |r, c| Complex64::new(gr[(r, c)], gi[(r, c)]));
        if asymmetry(&gr) > 1e-12 || asymmetry(&gi) > 1e-12 {
            return Err(Error::Malformed("Γ must be symmetric".into()));
        }
        GaussianState::new(gamma, RVec::from_vec(j.center), RVec::from_vec(j.momentum), Complex64::new(j.amp_re, j.amp_im))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maslov::{inverse_generator, mw_index};
    use crate::symplectic::{sigma, SymplecticMatrix};
    use std::f64::consts::FRAC_PI_4;

    fn gen1(p: f64, l: f64, q: f64, m: i64) -> FreeGenerator {
        let e = |v| RMat::from_element(1, 1, v);
        FreeGenerator::new(e(p), e(l), e(q), m).unwrap()
    }

    fn probes(n: usize) -> Vec<RVec> {
        (0..10)
            .map(|k| RVec::from_fn(n, |i, _| ((k * 7 + i * 3) % 11) as f64 * 0.37 - 1.8))
            .collect()
    }

    fn pointwise_diff(a: &GaussianState, b: &GaussianState) -> f64 {
        probes(a.n()).iter().map(|x| (a.eval(x) - b.eval(x)).norm()).fold(0.0, f64::max)
    }

    fn squeezed() -> GaussianState {
        let gamma = CMat::from_row_slice(
            2,
            2,
            &[Complex64::new(0.3, 1.2), Complex64::new(-0.2, 0.1), Complex64::new(-0.2, 0.1), Complex64::new(0.5, 0.7)],
        );
        GaussianState::new(gamma, RVec::from_vec(vec![0.4, -0.3]), RVec::from_vec(vec![-0.6, 0.2]), Complex64::new(0.7, -0.2))
            .unwrap()
    }

    #[test]
    fn quadexp_round_trip() {
        let g = squeezed();
        let back = GaussianState::from_quadexp(&g.to_quadexp()).unwrap();
        assert!(g.max_param_diff(&back) < 1e-13);
        let x = RVec::from_vec(vec![0.9, -0.4]);
        let d = &x - &g.center;
        let direct = g.amp
            * (I * ((d.map(|v| Complex64::new(v, 0.0)).transpose() * &g.gamma * d.map(|v| Complex64::new(v, 0.0)))[0] * 0.5
                + g.momentum.dot(&d)))
            .exp();
        assert!((g.eval(&x) - direct).norm() < 1e-14);
    }

    #[test]
    fn standard_state_is_normalized() {
        for n in 1..=3 {
            assert!((gauss_norm(&GaussianState::standard(n)).unwrap() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn coherent_overlap_modulus() {
        let g0 = GaussianState::standard(1);
        let z = PhaseSpacePoint::new(RVec::from_element(1, 1.3), RVec::from_element(1, -0.7));
        let ov = gauss_inner(&g0, &gauss_hw(&z, &g0)).unwrap();
        assert!((ov.norm() - (-(1.3f64.powi(2) + 0.7f64.powi(2)) / 4.0).exp()).abs() < 1e-14);
    }

    #[test]
    fn inner_product_is_conjugate_symmetric() {
        let a = squeezed();
        let b = gauss_hw(&PhaseSpacePoint::new(RVec::from_vec(vec![0.2, 0.1]), RVec::from_vec(vec![-0.3, 0.5])), &GaussianState::standard(2));
        let ab = gauss_inner(&a, &b).unwrap();
        let ba = gauss_inner(&b, &a).unwrap();
        assert!((ab - ba.conj()).norm() < 1e-14);
        assert!(gauss_inner(&a, &GaussianState::standard(1)).is_err());
    }

    #[test]
    fn hw_matches_defining_formula() {
        let g = squeezed();
        let z = PhaseSpacePoint::new(RVec::from_vec(vec![0.7, -1.2]), RVec::from_vec(vec![0.3, 0.9]));
        let t = gauss_hw(&z, &g);
        for x in probes(2) {
            let direct = Complex64::from_polar(1.0, z.p.dot(&x) - 0.5 * z.p.dot(&z.x)) * g.eval(&(&x - &z.x));
            assert!((t.eval(&x) - direct).norm() < 1e-12);
        }
        let zero = PhaseSpacePoint::zero(2);
        assert!(gauss_hw(&zero, &g).max_param_diff(&g) == 0.0);
    }

    #[test]
    fn hw_composition_relations() {
        let g = GaussianState::standard(1);
        let z0 = PhaseSpacePoint::new(RVec::from_element(1, 1.0), RVec::from_element(1, 0.0));
        let z1 = PhaseSpacePoint::new(RVec::from_element(1, 0.0), RVec::from_element(1, 1.0));
        // T(2z) = T(z)T(z)
        let twice = gauss_hw(&z0.scaled(2.0), &g);
        assert!(pointwise_diff(&twice, &gauss_hw(&z0, &gauss_hw(&z0, &g))) < 1e-14);
        // T(z0)T(z1) = e^{iσ(z0,z1)} T(z1)T(z0), σ(z0,z1) = −1
        let s = sigma(&z0.to_z(), &z1.to_z());
        assert_eq!(s, -1.0);
        let lhs = gauss_hw(&z0, &gauss_hw(&z1, &g));
        let rhs = gauss_hw(&z1, &gauss_hw(&z0, &g));
        for x in probes(1) {
            assert!((lhs.eval(&x) - Complex64::from_polar(1.0, s) * rhs.eval(&x)).norm() < 1e-14);
        }
    }

    #[test]
    fn fourier_generator_on_standard_state() {
        let g0 = GaussianState::standard(1);
        let out = gauss_quad_fourier(&gen1(0.0, 1.0, 0.0, 0), &g0).unwrap();
        let expected = GaussianState { amp: g0.amp * Complex64::from_polar(1.0, -FRAC_PI_4), ..g0.clone() };
        assert!(out.max_param_diff(&expected) < 1e-14);
    }

    #[test]
    fn quad_fourier_matches_direct_quadrature() {
        let gen = gen1(1.0, 1.0, 1.0, 0);
        let g0 = GaussianState::standard(1);
        let out = gauss_quad_fourier(&gen, &g0).unwrap();
        assert!((gauss_norm(&out).unwrap() - 1.0).abs() < 1e-12);
        // trapezoid on [-12, 12) converges spectrally for this integrand
        let h = 24.0 / 1024.0;
        for x in [-1.3, 0.0, 0.4, 2.2] {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..1024 {
                let xp = -12.0 + k as f64 * h;
                let w = 0.5 * x * x - x * xp + 0.5 * xp * xp;
                acc += (I * w).exp() * g0.eval(&RVec::from_element(1, xp)) * h;
            }
            let direct = acc * quad_fourier_prefactor(&gen);
            assert!((direct - out.eval(&RVec::from_element(1, x))).norm() < 1e-12);
        }
    }

    #[test]
    fn inverse_generator_undoes_transform() {
        let g = squeezed();
        let p = RMat::from_row_slice(2, 2, &[0.5, 0.2, 0.2, -1.0]);
        let l = RMat::from_row_slice(2, 2, &[1.0, 0.3, -0.4, -0.8]);
        let q = RMat::from_row_slice(2, 2, &[0.1, 0.0, 0.0, 0.6]);
        let gen = FreeGenerator::new(p, l, q, 1).unwrap();
        let back = gauss_quad_fourier(&inverse_generator(&gen), &gauss_quad_fourier(&gen, &g).unwrap()).unwrap();
        assert!(back.max_param_diff(&g) < 1e-12);
    }

    #[test]
    fn mw_of_minus_identity_is_parity() {
        let g = GaussianState::new(
            CMat::from_element(1, 1, Complex64::new(0.4, 0.8)),
            RVec::from_element(1, 0.6),
            RVec::from_element(1, -0.3),
            Complex64::new(0.5, 0.1),
        )
        .unwrap();
        let minus = SymplecticMatrix::new(-RMat::identity(2, 2)).unwrap();
        for nu in 0..4u8 {
            let desc = MWDescriptor::new(&minus, nu).unwrap();
            let out = mw_apply_gaussian(&desc, &g).unwrap();
            let phase = I.powu(nu as u32);
            for x in probes(1) {
                assert!((out.eval(&x) - phase * g.eval(&(-&x))).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn mw_of_j_with_maslov_index() {
        let gen = gen1(0.0, 1.0, 0.0, 0);
        let nu = mw_index(&gen).unwrap().nu;
        assert_eq!(nu, 3);
        let desc = MWDescriptor::new(&gen.free_matrix(), nu).unwrap();
        let g0 = GaussianState::standard(1);
        let out = mw_apply_gaussian(&desc, &g0).unwrap();
        assert!(out.max_param_diff(&gauss_quad_fourier(&gen, &g0).unwrap()) < 1e-12);
        assert!((gauss_norm(&out).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn translated_family_is_hw() {
        let g = squeezed();
        let fam = translated_family(&g);
        let z = PhaseSpacePoint::new(RVec::from_vec(vec![0.3, -0.8]), RVec::from_vec(vec![1.1, 0.2]));
        let t = gauss_hw(&z, &g);
        for x in probes(2) {
            let v = RVec::from_iterator(6, x.iter().chain(z.x.iter()).chain(z.p.iter()).copied());
            assert!((fam.eval(&v) - t.eval(&x)).norm() < 1e-13);
        }
    }
}
