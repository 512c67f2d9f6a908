//! Matrix elements `⟨bra, R(S) ket⟩` by direct `2n`-dimensional quadrature
//! over phase space.
//!
//! The operator integral `∫ a_σ(z₀) T(z₀) dz₀` does not converge when applied
//! pointwise to a state, but `z₀ ↦ ⟨bra, T(z₀) ket⟩` decays like a Gaussian,
//! so the sandwiched integrand is absolutely integrable.

use num_complex::Complex64;

use super::descriptor::MWDescriptor;
use super::quadrature::{gh_integrate, QuadratureOptions};
use crate::error::{Error, Result};
use crate::gaussian::{translated_family, GaussianState, QuadExp};
use crate::linalg::{symmetrize, RMat, RVec, I};
use crate::symplectic::standard_j;

fn check_dims(desc: &MWDescriptor, bra: &GaussianState, ket: &GaussianState) -> Result<usize> {
    let n = desc.n();
    if bra.n() != n || ket.n() != n {
        return Err(Error::Dimension(format!("descriptor n={n}, bra n={}, ket n={}", bra.n(), ket.n())));
    }
    Ok(n)
}

/// `conj(bra)(x)` as a function on `R^{n + extra}` depending on the first
/// `n` coordinates.
fn bra_on(bra: &GaussianState, total: usize) -> QuadExp {
    let n = bra.n();
    let mut pick = RMat::zeros(n, total);
    pick.view_mut((0, 0), (n, n)).fill_with_identity();
    bra.to_quadexp().conj().pullback(&pick, &RVec::zeros(n))
}

/// `z₀ ↦ ⟨bra, T(z₀) ket⟩` in closed form, as a function of `z₀ = (x₀, p₀)`.
pub fn overlap_family(bra: &GaussianState, ket: &GaussianState) -> Result<QuadExp> {
    let n = ket.n();
    let joint = translated_family(ket).mul(&bra_on(bra, 3 * n));
    let xs: Vec<usize> = (0..n).collect();
    joint.integrate_out(&xs)
}

/// `(2π)^{−n} i^ν |det(S−I)|^{+1/2}`, the prefactor of the two forms
/// integrated over `w` with `z₀ = (S−I)w`.
fn substituted_prefactor(desc: &MWDescriptor) -> Complex64 {
    let n = desc.n() as f64;
    I.powu(desc.nu() as u32) * (2.0 * std::f64::consts::PI).powf(-n) * desc.det_s_minus_i().abs().sqrt()
}

fn integrate(q: &QuadExp, opts: &QuadratureOptions) -> Result<Complex64> {
    Ok(gh_integrate(q, opts)?.value)
}

/// `⟨bra, R(S) ket⟩ = (2π)^{−n} i^ν |det(S−I)|^{−1/2} ∫ exp(½i⟨M_S z₀,z₀⟩)⟨bra, T(z₀)ket⟩ dz₀`
/// by tensor Gauss–Hermite quadrature.
pub fn mw_matrix_element(desc: &MWDescriptor, bra: &GaussianState, ket: &GaussianState) -> Result<Complex64> {
    mw_matrix_element_with(desc, bra, ket, &QuadratureOptions::default())
}

pub fn mw_matrix_element_with(
    desc: &MWDescriptor,
    bra: &GaussianState,
    ket: &GaussianState,
    opts: &QuadratureOptions,
) -> Result<Complex64> {
    check_dims(desc, bra, ket)?;
    let integrand = QuadExp::phase(desc.ms()).mul(&overlap_family(bra, ket)?);
    Ok(desc.prefactor() * integrate(&integrand, opts)?)
}

/// Integrand over `w` of `∫ exp(−½iσ(Sw,w)) ⟨bra, T((S−I)w) ket⟩ dw`.
fn chord_integrand(desc: &MWDescriptor, bra: &GaussianState, ket: &GaussianState) -> Result<QuadExp> {
    let n = desc.n();
    let s = desc.s().matrix();
    let js = standard_j(n) * s;
    let s_minus_i = s - RMat::identity(2 * n, 2 * n);
    let overlap = overlap_family(bra, ket)?.pullback(&s_minus_i, &RVec::zeros(2 * n));
    Ok(QuadExp::phase(&(-symmetrize(&js))).mul(&overlap))
}

/// Integrand over `w` of `∫ ⟨bra, T(Sw)T(−w) ket⟩ dw`, built by applying the
/// two translations one after the other rather than by composing them.
fn product_integrand(desc: &MWDescriptor, bra: &GaussianState, ket: &GaussianState) -> Result<QuadExp> {
    let n = desc.n();
    let s = desc.s().matrix();
    let sx = s.rows(0, n).into_owned();
    let sp = s.rows(n, n).into_owned();

    // (T(−w)ket)(x) over (x, w)
    let mut flip = -RMat::identity(3 * n, 3 * n);
    flip.view_mut((0, 0), (n, n)).fill_with_identity();
    let inner = translated_family(ket).pullback(&flip, &RVec::zeros(3 * n));

    // T(Sw): evaluate the inner function at x − S_x w ...
    let mut shear = RMat::identity(3 * n, 3 * n);
    shear.view_mut((0, n), (n, 2 * n)).copy_from(&(-&sx));
    let shifted = inner.pullback(&shear, &RVec::zeros(3 * n));

    // ... and multiply by exp(i⟨S_p w, x⟩ − ½i⟨S_p w, S_x w⟩)
    let mut phase = RMat::zeros(3 * n, 3 * n);
    phase.view_mut((0, n), (n, 2 * n)).copy_from(&sp);
    phase.view_mut((n, 0), (2 * n, n)).copy_from(&sp.transpose());
    let ww = -(sp.transpose() * &sx + sx.transpose() * &sp) * 0.5;
    phase.view_mut((n, n), (2 * n, 2 * n)).copy_from(&ww);

    let joint = shifted.mul(&QuadExp::phase(&phase)).mul(&bra_on(bra, 3 * n));
    let xs: Vec<usize> = (0..n).collect();
    joint.integrate_out(&xs)
}

/// The same matrix element through the three integral representations: over
/// `z₀` with the twisted symbol, over `w` with `T((S−I)w)` and the phase
/// `exp(−½iσ(Sw,w))`, and over `w` with `T(Sw)T(−w)`.
pub fn alt_form_check(desc: &MWDescriptor, ket: &GaussianState, bra: &GaussianState) -> Result<[Complex64; 3]> {
    alt_form_check_with(desc, ket, bra, &QuadratureOptions::default())
}

pub fn alt_form_check_with(
    desc: &MWDescriptor,
    ket: &GaussianState,
    bra: &GaussianState,
    opts: &QuadratureOptions,
) -> Result<[Complex64; 3]> {
    check_dims(desc, bra, ket)?;
    let first = mw_matrix_element_with(desc, bra, ket, opts)?;
    let pre = substituted_prefactor(desc);
    let second = pre * integrate(&chord_integrand(desc, bra, ket)?, opts)?;
    let third = pre * integrate(&product_integrand(desc, bra, ket)?, opts)?;
    Ok([first, second, third])
}
