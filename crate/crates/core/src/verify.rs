//! Seeded property suites and the machine-readable verification report.
//!
//! Each suite draws its instances from its own random stream
//! (`random::stream(seed, property_id)`), so a suite produces the same
//! numbers whether it runs alone or inside the full report. A suite records
//! the largest error over its instances; an instance that raises an error
//! counts as `f64::MAX`.

use std::f64::consts::{FRAC_PI_4, PI};

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::decomposition::{cocycle_sign, factor_free_pair, factor_free_pair_unshifted, lambda_shift, FreePair, NONDEGENERATE_TOL};
use crate::engine::{
    alt_form_check, factored_apply, fresnel_quadrature, hw_apply, kernel_to_symbol, mw_matrix_element, quad_fourier_grid,
    symbol_bridge_residual, symplectic_fourier, GridFunction, GridSpec, MWDescriptor,
};
use crate::error::{Error, Result};
use crate::gaussian::{
    complex_gaussian_integral, fresnel_closed_form, gauss_hw, gauss_inner, gauss_norm, gauss_quad_fourier, mw_apply_gaussian,
    GaussianState,
};
use crate::linalg::{asymmetry, inverse, max_abs, rel_diff, to_complex, to_complex_vec, RMat, RVec};
use crate::maslov::{inverse_generator, m_choices, mw_index, nu_choices, verify_restricted_quadratic};
use crate::random::{
    free_generator, gaussian_state, nondegenerate_generator, nondegenerate_symplectic, stream, symplectic_matrix,
    tame_generator, uniform_matrix, uniform_symmetric, InstanceRng,
};
use crate::symplectic::{
    cayley_inverse, cayley_ms, det_s_minus_i_factored, generator_from_free, sigma, standard_j, symplectic_residual,
    FreeGenerator, GeneratingForm, PhaseSpacePoint, SymplecticMatrix,
};

pub const SUITE_VERSION: &str = "1.0";

/// Environment variable scaling every tolerance (default 1).
pub const TOL_SCALE_ENV: &str = "MWKIT_TOL_SCALE";

/// One row of the report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyCase {
    pub property_id: String,
    pub instances: usize,
    pub max_error: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl PropertyCase {
    pub fn new(property_id: &str, instances: usize, max_error: f64, tolerance: f64) -> Self {
        let max_error = if max_error.is_nan() || max_error > f64::MAX { f64::MAX } else { max_error };
        Self { property_id: property_id.to_string(), instances, max_error, tolerance, passed: max_error <= tolerance }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite_version: String,
    pub seed: u64,
    pub cases: Vec<PropertyCase>,
    pub overall: bool,
}

impl VerificationReport {
    /// Sorts the cases by `property_id` and sets `overall`.
    pub fn from_cases(seed: u64, mut cases: Vec<PropertyCase>) -> Self {
        cases.sort_by(|a, b| a.property_id.cmp(&b.property_id));
        let overall = cases.iter().all(|c| c.passed);
        Self { suite_version: SUITE_VERSION.to_string(), seed, cases, overall }
    }

    pub fn case(&self, property_id: &str) -> Option<&PropertyCase> {
        self.cases.iter().find(|c| c.property_id == property_id)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyConfig {
    pub seed: u64,
    pub dims: Vec<usize>,
    pub tol_scale: f64,
}

impl VerifyConfig {
    pub fn new(seed: u64, dims: &[usize]) -> Result<Self> {
        if dims.is_empty() || dims.iter().any(|d| !(1..=3).contains(d)) {
            return Err(Error::InvalidParameter(format!("dims must be a nonempty subset of {{1,2,3}}, got {dims:?}")));
        }
        let mut dims = dims.to_vec();
        dims.sort_unstable();
        dims.dedup();
        Ok(Self { seed, dims, tol_scale: 1.0 })
    }

    pub fn with_tol_scale(mut self, scale: f64) -> Result<Self> {
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::InvalidParameter(format!("tolerance scale must be positive, got {scale}")));
        }
        self.tol_scale = scale;
        Ok(self)
    }

    pub fn tol(&self, base: f64) -> f64 {
        base * self.tol_scale
    }

    fn dims_in(&self, allowed: &[usize]) -> Vec<usize> {
        self.dims.iter().copied().filter(|d| allowed.contains(d)).collect()
    }

    fn rng(&self, id: &str) -> InstanceRng {
        stream(self.seed, id)
    }
}

/// Reads [`TOL_SCALE_ENV`]; unset means 1.
pub fn tol_scale_from_env() -> Result<f64> {
    match std::env::var(TOL_SCALE_ENV) {
        Err(_) => Ok(1.0),
        Ok(text) => {
            let v: f64 = text
                .trim()
                .parse()
                .map_err(|_| Error::Malformed(format!("{TOL_SCALE_ENV}={text:?} is not a number")))?;
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Malformed(format!("{TOL_SCALE_ENV} must be positive, got {v}")));
            }
            Ok(v)
        }
    }
}

/// Running maximum of per-instance errors.
#[derive(Debug, Default)]
struct Worst {
    max: f64,
    count: usize,
}

impl Worst {
    fn add(&mut self, e: f64) {
        self.count += 1;
        self.max = if e.is_nan() { f64::MAX } else { self.max.max(e) };
    }

    fn add_result(&mut self, r: Result<f64>) {
        self.add(r.unwrap_or(f64::MAX));
    }

    fn case(&self, id: &str, tol: f64) -> PropertyCase {
        PropertyCase::new(id, self.count, self.max, tol)
    }
}

fn rel_mat(a: &RMat, b: &RMat) -> f64 {
    max_abs(&(a - b)) / max_abs(b).max(1.0)
}

fn gen1(p: f64, l: f64, q: f64, m: i64) -> FreeGenerator {
    let e = |v| RMat::from_element(1, 1, v);
    FreeGenerator::new(e(p), e(l), e(q), m).expect("fixture generator")
}

fn probes(n: usize) -> Vec<RVec> {
    (0..10).map(|k| RVec::from_fn(n, |i, _| ((k * 7 + i * 3) % 11) as f64 * 0.37 - 1.8)).collect()
}

/// Pointwise difference on the probe set, relative to `max(1, max|b|)`.
fn probe_diff(a: &GaussianState, b: &GaussianState) -> f64 {
    let pts = probes(a.n());
    let scale = pts.iter().map(|x| b.eval(x).norm()).fold(1.0, f64::max);
    pts.iter().map(|x| (a.eval(x) - b.eval(x)).norm()).fold(0.0, f64::max) / scale
}

fn random_point(rng: &mut InstanceRng, n: usize, w: f64) -> PhaseSpacePoint {
    PhaseSpacePoint::new(
        RVec::from_fn(n, |_, _| rng.random_range(-w..=w)),
        RVec::from_fn(n, |_, _| rng.random_range(-w..=w)),
    )
}

fn split_dims(dims: &[usize], count: usize) -> impl Iterator<Item = usize> + '_ {
    (0..count).map(move |k| dims[k % dims.len()])
}

// --- symplectic structure -------------------------------------------------

pub fn free_structure(cfg: &VerifyConfig, per_dim: usize) -> PropertyCase {
    let mut rng = cfg.rng("symplectic.free_structure");
    let mut w = Worst::default();
    for &n in &cfg.dims {
        for _ in 0..per_dim {
            let s = free_generator(&mut rng, n, 3.0).free_matrix();
            w.add_result(symplectic_residual(s.matrix()));
        }
    }
    w.case("symplectic.free_structure", cfg.tol(1e-10))
}

/// `generator_from_free ∘ free_from_generator` on `(P, L, Q)` and the
/// reverse round trip on the matrix, relative to the entry size.
pub fn generator_round_trip(cfg: &VerifyConfig, per_dim: usize) -> PropertyCase {
    let mut rng = cfg.rng("symplectic.generator_round_trip");
    let mut w = Worst::default();
    for &n in &cfg.dims {
        for _ in 0..per_dim {
            let g = free_generator(&mut rng, n, 3.0);
            let s = g.free_matrix();
            w.add_result(generator_from_free(&s).map(|f| {
                let scale = max_abs(g.p()).max(max_abs(g.l())).max(max_abs(g.q())).max(1.0);
                let d = max_abs(&(&f.p - g.p())).max(max_abs(&(&f.l - g.l()))).max(max_abs(&(&f.q - g.q())));
                (d / scale).max(rel_mat(f.free_matrix().matrix(), s.matrix()))
            }));
        }
    }
    w.case("symplectic.generator_round_trip", cfg.tol(1e-9))
}

/// Smallest singular value of `2M − J` accepted for the inverse direction.
const CAYLEY_MIN_SINGULAR: f64 = 1e-2;

/// `S → M_S → S` on nondegenerate free matrices and `M → S → M` on random
/// symmetric `M` with `2M − J` well conditioned.
pub fn cayley_round_trip(cfg: &VerifyConfig, per_dim: usize) -> PropertyCase {
    let mut rng = cfg.rng("symplectic.cayley_round_trip");
    let mut w = Worst::default();
    for &n in &cfg.dims {
        for _ in 0..per_dim {
            w.add_result(nondegenerate_generator(&mut rng, n, 3.0, 1e-6).and_then(|g| {
                let s = g.free_matrix();
                let back = cayley_inverse(&cayley_ms(&s)?)?;
                Ok(rel_mat(back.matrix(), s.matrix()))
            }));
            let m = loop {
                let m = uniform_symmetric(&mut rng, 2 * n, 3.0);
                let sv = (&m * 2.0 - standard_j(n)).singular_values();
                if sv.min() >= CAYLEY_MIN_SINGULAR {
                    break m;
                }
            };
            w.add_result(cayley_inverse(&m).and_then(|s| Ok(rel_mat(&cayley_ms(&s)?, &m))));
        }
    }
    w.case("symplectic.cayley_round_trip", cfg.tol(1e-9))
}

/// Asymmetry of the unsymmetrized `½J(S+I)(S−I)⁻¹`, and its agreement with
/// `½J + J(S−I)⁻¹`.
pub fn cayley_symmetry(cfg: &VerifyConfig, per_dim: usize) -> PropertyCase {
    let mut rng = cfg.rng("symplectic.cayley_symmetry");
    let mut w = Worst::default();
    for &n in &cfg.dims {
        let j = standard_j(n);
        let id = RMat::identity(2 * n, 2 * n);
        for _ in 0..per_dim {
            w.add_result(nondegenerate_generator(&mut rng, n, 3.0, 1e-6).and_then(|g| {
                let s = g.free_matrix().into_matrix();
                let inv = inverse(&(&s - &id), "S−I")?;
                let raw = &j * (&s + &id) * &inv * 0.5;
                let alt = &j * 0.5 + &j * &inv;
                let scale = max_abs(&raw).max(1.0);
                Ok((asymmetry(&raw) / scale).max(rel_mat(&alt, &raw)))
            }));
        }
    }
    w.case("symplectic.cayley_symmetry", cfg.tol(1e-9))
}

/// `det(S_W−I) = (−1)ⁿ det(L⁻¹) det(P+Q−L−Lᵀ)` on random generators plus
/// the hand cases `(0,1,0) → 2`, `(1,1,1) → 0`, `(0,2,0) → 2`.
pub fn det_factorization_signed(cfg: &VerifyConfig, per_dim: usize) -> PropertyCase {
    let mut rng = cfg.rng("symplectic.det_factorization_signed");
    let mut w = Worst::default();
    for &n in &cfg.dims {
        for _ in 0..per_dim {
            w.add_result(nondegenerate_generator(&mut rng, n, 3.0, 1e-6).map(|g| {
                let direct = g.free_matrix().det_minus_identity();
                rel_diff(direct, det_s_minus_i_factored(g.form()), 1e-300)
            }));
        }
    }
    if cfg.dims.contains(&1) {
        for (g, expect) in [(gen1(0.0, 1.0, 0.0, 0), 2.0), (gen1(1.0, 1.0, 1.0, 0), 0.0), (gen1(0.0, 2.0, 0.0, 0), 2.0)] {
            let direct = g.free_matrix().det_minus_identity();
            let factored = det_s_minus_i_factored(g.form());
            w.add((direct - expect).abs().max((factored - expect).abs()));
        }
    }
    w.case("symplectic.det_factorization_signed", cfg.tol(1e-8))
}

/// `|det(S_W−I)| = |det L⁻¹ det(P+Q−L−Lᵀ)|`, the form consumed downstream.
pub fn det_factorization_modulus(cfg: &VerifyConfig, per_dim: usize) -> PropertyCase {
    let mut rng = cfg.rng("symplectic.det_factorization_modulus");
    let mut w = Worst::default();
    for &n in &cfg.dims {
        for _ in 0..per_dim {
            w.add_result(nondegenerate_generator(&mut rng, n, 3.0, 1e-6).map(|g| {
                let direct = g.free_matrix().det_minus_identity().abs();
                rel_diff(direct, det_s_minus_i_factored(g.form()).abs(), 1e-300)
            }));
        }
    }
    w.case("symplectic.det_factorization_modulus", cfg.tol(1e-10))
}

/// `C − DB⁻¹A = −(Bᵀ)⁻¹` for free `S`.
pub fn inverse_block_identity(cfg: &VerifyConfig, per_dim: usize) -> PropertyCase {
    let mut rng = cfg.rng("symplectic.inverse_block_identity");
    let mut w = Worst::default();
    for &n in &cfg.dims {
        for _ in 0..per_dim {
            let s = free_generator(&mut rng, n, 3.0).free_matrix();
            w.add_result(inverse(&s.b(), "B").map(|bi| {
                let lhs = s.c() - s.d() * &bi * s.a();
                rel_mat(&lhs, &(-bi.transpose()))
            }));
        }
    }
    w.case("symplectic.inverse_block_identity", cfg.tol(1e-9))
}

// --- Maslov index -----------------------------------------------------------

/// Number of violations of `(−1)^ν = (−1)ⁿ sign det(S_W−I)`, plus the
/// fixtures `(0,1,0,0) → 3`, `(0,1,0,2) → 1`, `(1,1,1,0) → error`.
pub fn sign_relation(cfg: &VerifyConfig, per_dim: usize) -> PropertyCase {
    let mut rng = cfg.rng("maslov.sign_relation");
    let mut w = Worst::default();
    for &n in &cfg.dims {
        for _ in 0..per_dim {
            w.add_result(nondegenerate_generator(&mut rng, n, 3.0, 1e-6).and_then(|g| {
                let nu = mw_index(&g)?.nu;
                let lhs = if nu % 2 == 0 { 1.0 } else { -1.0 };
                let rhs = if n % 2 == 0 { 1.0 } else { -1.0 } * g.free_matrix().det_minus_identity().signum();
                Ok(if lhs == rhs { 0.0 } else { 1.0 })
            }));
        }
    }
    if cfg.dims.contains(&1) {
        let nu = |g: &FreeGenerator| mw_index(g).map(|d| d.nu);
        w.add(if nu(&gen1(0.0, 1.0, 0.0, 0)).ok() == Some(3) { 0.0 } else { 1.0 });
        w.add(if nu(&gen1(0.0, 1.0, 0.0, 2)).ok() == Some(1) { 0.0 } else { 1.0 });
        w.add(if matches!(nu(&gen1(1.0, 1.0, 1.0, 0)), Err(Error::EigenvalueOne(_))) { 0.0 } else { 1.0 });
    }
    w.case("maslov.sign_relation", cfg.tol(0.0))
}

/// `m → m+2` shifts `ν` by 2.
pub fn m_shift(cfg: &VerifyConfig, per_dim: usize) -> PropertyCase {
    let mut rng = cfg.rng("maslov.m_shift");
    let mut w = Worst::default();
    for &n in &cfg.dims {
        for _ in 0..per_dim {
            w.add_result(nondegenerate_generator(&mut rng, n, 3.0, 1e-6).and_then(|g| {
                let flipped = FreeGenerator::from_form(g.form().clone(), g.m() as i64 + 2)?;
                let (a, b) = (mw_index(&g)?.nu, mw_index(&flipped)?.nu);
                Ok(if (a + 2) % 4 == b { 0.0 } else { 1.0 })
            }));
        }
    }
    w.case("maslov.m_shift", cfg.tol(0.0))
}

/// Both sides of `⟨M_S(0,p₀),(0,p₀)⟩ = −⟨(P+Q−L−Lᵀ)⁻¹p₀,p₀⟩`.
pub fn restricted_quadratic(cfg: &VerifyConfig, count: usize) -> Option<PropertyCase> {
    let dims = cfg.dims_in(&[1, 2]);
    if dims.is_empty() {
        return None;
    }
    let mut rng = cfg.rng("maslov.restricted_quadratic");
    let mut w = Worst::default();
    for n in split_dims(&dims, count) {
        w.add_result(nondegenerate_generator(&mut rng, n, 3.0, 1e-3).and_then(|g| {
            let p0 = RVec::from_fn(n, |_, _| rng.random_range(-2.0..=2.0));
            let (lhs, rhs) = verify_restricted_quadratic(g.form(), &p0)?;
            Ok(rel_diff(lhs, rhs, 1e-12))
        }));
    }
    if dims.contains(&1) {
        w.add_result(verify_restricted_quadratic(gen1(0.0, 1.0, 0.0, 0).form(), &RVec::from_element(1, 1.0))
            .map(|(l, r)| (l - 0.5).abs().max((r - 0.5).abs())));
    }
    Some(w.case("maslov.restricted_quadratic", cfg.tol(1e-8)))
}

/// `S_{W*} = S_W⁻¹`, `m* = (n − m) mod 4`, and the double inverse.
pub fn inverse_rule(cfg: &VerifyConfig, per_dim: usize) -> PropertyCase {
    let mut rng = cfg.rng("maslov.inverse_rule");
    let mut w = Worst::default();
    for &n in &cfg.dims {
        for _ in 0..per_dim {
            let g = free_generator(&mut rng, n, 3.0);
            let gi = inverse_generator(&g);
            let mut e = rel_mat(gi.free_matrix().matrix(), g.free_matrix().inverse().matrix());
            if gi.m() as usize != (4 + n - g.m() as usize) % 4 || inverse_generator(&gi) != g {
                e = f64::MAX;
            }
            w.add(e);
        }
    }
    w.case("maslov.inverse_rule", cfg.tol(1e-9))
}

// --- Gaussian oracle --------------------------------------------------------

/// Norm preservation by `Ŝ_{W,m}` and `R(S)`.
pub fn unitarity(cfg: &VerifyConfig, count: usize) -> Option<PropertyCase> {
    let dims = cfg.dims_in(&[1, 2]);
    if dims.is_empty() {
        return None;
    }
    let mut rng = cfg.rng("gaussian.unitarity");
    let mut w = Worst::default();
    for n in split_dims(&dims, count) {
        let g = gaussian_state(&mut rng, n);
        w.add_result(nondegenerate_generator(&mut rng, n, 3.0, 1e-3).and_then(|gen| {
            let before = gauss_norm(&g)?;
            let a = gauss_norm(&gauss_quad_fourier(&gen, &g)?)?;
            let b = gauss_norm(&mw_apply_gaussian(&MWDescriptor::from_generator(&gen)?, &g)?)?;
            Ok(rel_diff(a, before, 1e-300).max(rel_diff(b, before, 1e-300)))
        }));
    }
    Some(w.case("gaussian.unitarity", cfg.tol(1e-9)))
}

/// `Ŝ_{W,m}T(z) = T(S_W z)Ŝ_{W,m}` on Gaussian states.
pub fn gaussian_covariance(cfg: &VerifyConfig, count: usize) -> PropertyCase {
    let mut rng = cfg.rng("gaussian.covariance");
    let mut w = Worst::default();
    for n in split_dims(&cfg.dims, count) {
        let gen = free_generator(&mut rng, n, 2.0);
        let g = gaussian_state(&mut rng, n);
        let z = random_point(&mut rng, n, 1.0);
        let sz = PhaseSpacePoint::from_z(&gen.free_matrix().apply(&z.to_z()));
        w.add_result((|| {
            let lhs = gauss_quad_fourier(&gen, &gauss_hw(&z, &g))?;
            let rhs = gauss_hw(&sz, &gauss_quad_fourier(&gen, &g)?);
            Ok(probe_diff(&lhs, &rhs))
        })());
    }
    w.case("gaussian.covariance", cfg.tol(1e-9))
}

/// `T(z₀)T(z₁) = e^{iσ(z₀,z₁)}T(z₁)T(z₀)` and
/// `T(z₀+z₁) = e^{−iσ(z₀,z₁)/2}T(z₀)T(z₁)` on Gaussian states.
pub fn gaussian_commutation(cfg: &VerifyConfig, count: usize) -> PropertyCase {
    let mut rng = cfg.rng("gaussian.commutation");
    let mut w = Worst::default();
    let mut check = |z0: &PhaseSpacePoint, z1: &PhaseSpacePoint, g: &GaussianState| {
        let s = sigma(&z0.to_z(), &z1.to_z());
        let ab = gauss_hw(z0, &gauss_hw(z1, g));
        let ba = gauss_hw(z1, &gauss_hw(z0, g));
        let mut ba_phase = ba.clone();
        ba_phase.amp *= Complex64::from_polar(1.0, s);
        let sum = gauss_hw(&PhaseSpacePoint::from_z(&(z0.to_z() + z1.to_z())), g);
        let mut ab_phase = ab.clone();
        ab_phase.amp *= Complex64::from_polar(1.0, -0.5 * s);
        w.add(probe_diff(&ab, &ba_phase).max(probe_diff(&sum, &ab_phase)));
    };
    for n in split_dims(&cfg.dims, count) {
        let g = gaussian_state(&mut rng, n);
        let (z0, z1) = (random_point(&mut rng, n, 1.5), random_point(&mut rng, n, 1.5));
        check(&z0, &z1, &g);
    }
    if cfg.dims.contains(&1) {
        let e = |x: f64, p: f64| PhaseSpacePoint::new(RVec::from_element(1, x), RVec::from_element(1, p));
        check(&e(1.0, 0.0), &e(0.0, 1.0), &GaussianState::standard(1));
    }
    w.case("gaussian.commutation", cfg.tol(1e-9))
}

/// `R(S_W)` with `ν` from the index formula equals `Ŝ_{W,m}`, global phase
/// included, on Gaussian states.
pub fn central_identity(cfg: &VerifyConfig, count: usize) -> Option<PropertyCase> {
    let dims = cfg.dims_in(&[1, 2]);
    if dims.is_empty() {
        return None;
    }
    let mut rng = cfg.rng("gaussian.central_identity");
    let mut w = Worst::default();
    for n in split_dims(&dims, count) {
        let g = gaussian_state(&mut rng, n);
        w.add_result(nondegenerate_generator(&mut rng, n, 3.0, 1e-3).and_then(|gen| {
            let desc = MWDescriptor::from_generator(&gen)?;
            Ok(probe_diff(&mw_apply_gaussian(&desc, &g)?, &gauss_quad_fourier(&gen, &g)?))
        }));
    }
    if dims.contains(&1) {
        let g0 = GaussianState::standard(1);
        w.add_result((|| {
            let desc = MWDescriptor::new(&SymplecticMatrix::j(1), 3)?;
            let mut expect = g0.clone();
            expect.amp *= Complex64::from_polar(1.0, -FRAC_PI_4);
            Ok(probe_diff(&mw_apply_gaussian(&desc, &g0)?, &expect))
        })());
    }
    Some(w.case("gaussian.central_identity", cfg.tol(1e-8)))
}

/// Closed-form complex Gaussian integral at real `M` against the Fresnel
/// formula.
pub fn fresnel_consistency(cfg: &VerifyConfig, count: usize) -> PropertyCase {
    let mut rng = cfg.rng("gaussian.fresnel_consistency");
    let mut w = Worst::default();
    for n in split_dims(&cfg.dims, count) {
        let m = loop {
            let m = uniform_symmetric(&mut rng, n, 2.0);
            if m.determinant().abs() >= 0.1 {
                break m;
            }
        };
        let p = RVec::from_fn(n, |_, _| rng.random_range(-1.0..=1.0));
        w.add_result((|| {
            let direct = complex_gaussian_integral(&to_complex(&m), &to_complex_vec(&(-&p)))?;
            let expect = fresnel_closed_form(&m)?.value(&p) * (2.0 * PI).powf(0.5 * n as f64);
            Ok((direct - expect).norm() / expect.norm())
        })());
    }
    w.case("gaussian.fresnel_consistency", cfg.tol(1e-10))
}

// --- quadrature engine ------------------------------------------------------

/// Generators for the phase-space quadrature suites.
fn quadrature_generator(rng: &mut InstanceRng, n: usize) -> Result<FreeGenerator> {
    tame_generator(rng, n, 1.5, 0.1, 2.5)
}

/// `mw_matrix_element` (quadrature over `z₀`) against
/// `⟨bra, Ŝ_{W,m} ket⟩` from the closed form.
pub fn matrix_element_quadrature(cfg: &VerifyConfig, count: usize) -> Option<PropertyCase> {
    let dims = cfg.dims_in(&[1, 2]);
    if dims.is_empty() {
        return None;
    }
    let mut rng = cfg.rng("engine.matrix_element_quadrature");
    let mut w = Worst::default();
    for n in split_dims(&dims, count) {
        let (bra, ket) = (gaussian_state(&mut rng, n), gaussian_state(&mut rng, n));
        w.add_result(quadrature_generator(&mut rng, n).and_then(|gen| {
            let desc = MWDescriptor::from_generator(&gen)?;
            let exact = gauss_inner(&bra, &gauss_quad_fourier(&gen, &ket)?)?;
            Ok((mw_matrix_element(&desc, &bra, &ket)? - exact).norm())
        }));
    }
    Some(w.case("engine.matrix_element_quadrature", cfg.tol(1e-6)))
}

fn spread(v: &[Complex64; 3]) -> f64 {
    (v[0] - v[1]).norm().max((v[0] - v[2]).norm()).max((v[1] - v[2]).norm())
}

/// The three integral forms of one matrix element agree; includes `S = J`
/// (value `e^{−iπ/4}`) and `S = −I` with the standard Gaussian.
pub fn alt_forms(cfg: &VerifyConfig, count: usize) -> Option<PropertyCase> {
    let dims = cfg.dims_in(&[1, 2]);
    if dims.is_empty() {
        return None;
    }
    let mut rng = cfg.rng("engine.alt_forms");
    let mut w = Worst::default();
    for n in split_dims(&dims, count) {
        let (bra, ket) = (gaussian_state(&mut rng, n), gaussian_state(&mut rng, n));
        w.add_result(quadrature_generator(&mut rng, n).and_then(|gen| {
            let desc = MWDescriptor::from_generator(&gen)?;
            Ok(spread(&alt_form_check(&desc, &ket, &bra)?))
        }));
    }
    if dims.contains(&1) {
        let g0 = GaussianState::standard(1);
        w.add_result((|| {
            let forms = alt_form_check(&MWDescriptor::new(&SymplecticMatrix::j(1), 3)?, &g0, &g0)?;
            let expect = Complex64::from_polar(1.0, -FRAC_PI_4);
            Ok(forms.iter().map(|v| (v - expect).norm()).fold(0.0, f64::max))
        })());
        w.add_result((|| {
            let minus = SymplecticMatrix::new(-RMat::identity(2, 2))?;
            Ok(spread(&alt_form_check(&MWDescriptor::new(&minus, 0)?, &g0, &g0)?))
        })());
    }
    Some(w.case("engine.alt_forms", cfg.tol(1e-6)))
}

fn grid_generator(rng: &mut InstanceRng, n: usize) -> FreeGenerator {
    loop {
        let l = RMat::identity(n, n) + uniform_matrix(rng, n, n, 0.4);
        if l.determinant().abs() < 0.5 {
            continue;
        }
        let p = uniform_symmetric(rng, n, 0.8);
        let q = uniform_symmetric(rng, n, 0.8);
        let m = m_choices(&l).expect("det L checked")[rng.random_range(0..2)];
        return FreeGenerator::new(p, l, q, m as i64).expect("valid by construction");
    }
}

fn grid_state(rng: &mut InstanceRng, n: usize) -> GaussianState {
    let mut g = gaussian_state(rng, n);
    g.amp /= g.amp.norm();
    g
}

fn spec1() -> GridSpec {
    GridSpec::default_for(1).expect("default grid")
}

/// Metaplectic covariance on the `N = 256`, `X = 12` grid with
/// lattice-aligned position shifts.
pub fn grid_covariance(cfg: &VerifyConfig, count: usize) -> Option<PropertyCase> {
    if !cfg.dims.contains(&1) {
        return None;
    }
    let mut rng = cfg.rng("engine.grid_covariance");
    let spec = spec1();
    let h = spec.spacing();
    let mut w = Worst::default();
    for _ in 0..count {
        let gen = grid_generator(&mut rng, 1);
        let f = GridFunction::from_gaussian(spec, &grid_state(&mut rng, 1)).expect("n matches");
        let z = PhaseSpacePoint::new(
            RVec::from_element(1, rng.random_range(-8..=8) as f64 * h),
            RVec::from_element(1, rng.random_range(-1.0..=1.0)),
        );
        let sz = PhaseSpacePoint::from_z(&gen.free_matrix().apply(&z.to_z()));
        w.add_result((|| {
            let lhs = quad_fourier_grid(&gen, &hw_apply(&z, &f)?)?;
            let rhs = hw_apply(&sz, &quad_fourier_grid(&gen, &f)?)?;
            lhs.max_abs_diff(&rhs)
        })());
    }
    Some(w.case("engine.grid_covariance", cfg.tol(1e-5)))
}

/// Commutation and composition phases of `T(z)` on the grid.
pub fn grid_commutation(cfg: &VerifyConfig, count: usize) -> Option<PropertyCase> {
    if !cfg.dims.contains(&1) {
        return None;
    }
    let mut rng = cfg.rng("engine.grid_commutation");
    let spec = spec1();
    let h = spec.spacing();
    let mut w = Worst::default();
    let e = |x: f64, p: f64| PhaseSpacePoint::new(RVec::from_element(1, x), RVec::from_element(1, p));
    let check = |z0: &PhaseSpacePoint, z1: &PhaseSpacePoint, f: &GridFunction| -> Result<f64> {
        let s = sigma(&z0.to_z(), &z1.to_z());
        let ab = hw_apply(z0, &hw_apply(z1, f)?)?;
        let ba = hw_apply(z1, &hw_apply(z0, f)?)?.scaled(Complex64::from_polar(1.0, s));
        let sum = hw_apply(&PhaseSpacePoint::from_z(&(z0.to_z() + z1.to_z())), f)?;
        let ab_half = ab.scaled(Complex64::from_polar(1.0, -0.5 * s));
        Ok(ab.max_abs_diff(&ba)?.max(sum.max_abs_diff(&ab_half)?))
    };
    for _ in 0..count {
        let f = GridFunction::from_gaussian(spec, &grid_state(&mut rng, 1)).expect("n matches");
        let z0 = e(rng.random_range(-10..=10) as f64 * h, rng.random_range(-1.5..=1.5));
        let z1 = e(rng.random_range(-10..=10) as f64 * h, rng.random_range(-1.5..=1.5));
        w.add_result(check(&z0, &z1, &f));
    }
    let g0 = GridFunction::from_gaussian(spec, &GaussianState::standard(1)).expect("n matches");
    w.add_result(check(&e(1.0, 0.0), &e(0.0, 1.0), &g0));
    Some(w.case("engine.grid_commutation", cfg.tol(1e-8)))
}

/// Grid operators against the Gaussian oracle on the default grids:
/// `quad_fourier_grid`, `factored_apply` and `hw_apply`.
pub fn cross_engine(cfg: &VerifyConfig, per_dim: usize) -> Option<PropertyCase> {
    let dims = cfg.dims_in(&[1, 2]);
    if dims.is_empty() {
        return None;
    }
    let mut rng = cfg.rng("engine.cross_engine");
    let mut w = Worst::default();
    for &n in &dims {
        let spec = GridSpec::default_for(n).expect("default grid");
        for k in 0..per_dim {
            let mut gen = grid_generator(&mut rng, n);
            if n == 2 {
                // factored_apply takes diagonal L at n = 2
                let l = RMat::from_diagonal(&gen.l().diagonal());
                let m = m_choices(&l).expect("diagonal near I")[k % 2];
                gen = FreeGenerator::new(gen.p().clone(), l, gen.q().clone(), m as i64).expect("valid");
            }
            let g = grid_state(&mut rng, n);
            let z = random_point(&mut rng, n, 1.0);
            w.add_result((|| {
                let f = GridFunction::from_gaussian(spec, &g)?;
                let oracle = GridFunction::from_gaussian(spec, &gauss_quad_fourier(&gen, &g)?)?;
                let direct = quad_fourier_grid(&gen, &f)?.max_abs_diff(&oracle)?;
                let chained = factored_apply(&gen, &f)?.max_abs_diff(&oracle)?;
                let shifted = hw_apply(&z, &f)?.max_abs_diff(&GridFunction::from_gaussian(spec, &gauss_hw(&z, &g))?)?;
                Ok(direct.max(chained).max(shifted))
            })());
        }
    }
    Some(w.case("engine.cross_engine", cfg.tol(1e-6)))
}

/// Error against the oracle must drop at least fourfold from `N = 64` to
/// `N = 128` (`X = 12`); the recorded error is the largest ratio.
pub fn grid_convergence(cfg: &VerifyConfig) -> Option<PropertyCase> {
    if !cfg.dims.contains(&1) {
        return None;
    }
    let mut w = Worst::default();
    let g0 = GaussianState::standard(1);
    let error_at = |gen: &FreeGenerator, points: usize| -> Result<f64> {
        let spec = GridSpec::new(1, 12.0, points)?;
        let out = quad_fourier_grid(gen, &GridFunction::from_gaussian(spec, &g0)?)?;
        out.max_abs_diff(&GridFunction::from_gaussian(spec, &gauss_quad_fourier(gen, &g0)?)?)
    };
    for gen in [gen1(0.0, 1.0, 0.0, 0), gen1(0.5, 1.2, -0.3, 0), gen1(-0.4, -0.9, 0.2, 1)] {
        w.add_result((|| Ok(error_at(&gen, 128)? / error_at(&gen, 64)?))());
    }
    Some(w.case("engine.grid_convergence", cfg.tol(0.25)))
}

/// Regularized quadrature of the Fresnel integral against the closed form,
/// relative error; includes `M = [1]` and `M = diag(1, −1)` at `p = 0`.
pub fn fresnel(cfg: &VerifyConfig, count: usize) -> PropertyCase {
    let mut rng = cfg.rng("engine.fresnel");
    let mut w = Worst::default();
    let rel = |m: &RMat, p: &RVec| -> Result<f64> {
        let expect = fresnel_closed_form(m)?.value(p);
        Ok((fresnel_quadrature(m, p)? - expect).norm() / expect.norm())
    };
    for n in split_dims(&cfg.dims, count) {
        let m = loop {
            let m = uniform_symmetric(&mut rng, n, 2.0);
            if m.determinant().abs() >= 0.1 {
                break m;
            }
        };
        let p = RVec::from_fn(n, |_, _| rng.random_range(-1.0..=1.0));
        w.add_result(rel(&m, &p));
    }
    if cfg.dims.contains(&1) {
        let one = RMat::from_element(1, 1, 1.0);
        w.add_result(fresnel_quadrature(&one, &RVec::zeros(1)).map(|v| (v - Complex64::from_polar(1.0, FRAC_PI_4)).norm()));
    }
    if cfg.dims.contains(&2) {
        let d = RMat::from_diagonal(&RVec::from_row_slice(&[1.0, -1.0]));
        w.add_result(fresnel_quadrature(&d, &RVec::zeros(2)).map(|v| (v - 1.0).norm()));
    }
    w.case("engine.fresnel", cfg.tol(1e-6))
}

fn phase_space_spec() -> GridSpec {
    GridSpec::new(2, 12.0, 256).expect("phase-space grid")
}

/// `F_σ(F_σ a) = a` on phase-space Gaussians with linear and cross terms.
pub fn symplectic_fourier_involution(cfg: &VerifyConfig, count: usize) -> Option<PropertyCase> {
    if !cfg.dims.contains(&1) {
        return None;
    }
    let mut rng = cfg.rng("engine.symplectic_fourier_involution");
    let spec = phase_space_spec();
    let mut w = Worst::default();
    for _ in 0..count {
        let (a, b, c) = (rng.random_range(0.3..1.0), rng.random_range(0.3..1.0), rng.random_range(-0.5..0.5));
        let (x0, p0, k) = (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let f = GridFunction::from_fn(spec, |z| {
            let (x, p) = (z[0] - x0, z[1] - p0);
            Complex64::new(-0.5 * a * x * x - 0.5 * b * p * p, c * x * p + k * z[1]).exp()
        });
        w.add_result(symplectic_fourier(&f).and_then(|once| symplectic_fourier(&once)?.max_abs_diff(&f)));
    }
    Some(w.case("engine.symplectic_fourier_involution", cfg.tol(1e-8)))
}

/// `F_σ e^{−|z|²/2} = e^{−|z|²/2}`.
pub fn symplectic_fourier_gaussian(cfg: &VerifyConfig) -> Option<PropertyCase> {
    if !cfg.dims.contains(&1) {
        return None;
    }
    let a = GridFunction::from_fn(phase_space_spec(), |z| Complex64::new((-0.5 * z.norm_squared()).exp(), 0.0));
    let e = symplectic_fourier(&a).and_then(|f| f.max_abs_diff(&a)).unwrap_or(f64::MAX);
    Some(PropertyCase::new("engine.symplectic_fourier_gaussian", 1, e, cfg.tol(1e-7)))
}

/// Fixtures of the kernel/twisted-symbol bridge.
pub fn bridge_fixtures() -> [FreeGenerator; 3] {
    [gen1(0.0, 1.0, 0.0, 0), gen1(0.4, 2.0, -1.0, 0), gen1(0.3, -1.5, 0.2, 1)]
}

/// Window width used by the bridge on both sides.
pub const BRIDGE_WINDOW: f64 = 0.25;

pub fn symbol_bridge(cfg: &VerifyConfig) -> Option<PropertyCase> {
    if !cfg.dims.contains(&1) {
        return None;
    }
    let mut w = Worst::default();
    for g in bridge_fixtures() {
        w.add_result(symbol_bridge_residual(&g, phase_space_spec(), BRIDGE_WINDOW));
    }
    Some(w.case("engine.symbol_bridge", cfg.tol(1e-3)))
}

/// Kernel `g₀(x)g₀(x')*` has symbol `2e^{−(x²+p²)}`.
pub fn kernel_symbol_projector(cfg: &VerifyConfig) -> Option<PropertyCase> {
    if !cfg.dims.contains(&1) {
        return None;
    }
    let spec = phase_space_spec();
    let g = GaussianState::standard(1);
    let k = GridFunction::from_fn(spec, |v| g.eval(&RVec::from_element(1, v[0])) * g.eval(&RVec::from_element(1, v[1])).conj());
    let expect = GridFunction::from_fn(spec, |z| Complex64::new(2.0 * (-z.norm_squared()).exp(), 0.0));
    let e = kernel_to_symbol(&k).and_then(|a| a.max_abs_diff(&expect)).unwrap_or(f64::MAX);
    Some(PropertyCase::new("engine.kernel_symbol_projector", 1, e, cfg.tol(1e-5)))
}

// --- decomposition ----------------------------------------------------------

fn pair_error(pair: &FreePair, s: &SymplecticMatrix) -> f64 {
    let free = pair.first.free_matrix().b().determinant().abs() > NONDEGENERATE_TOL
        && pair.second.free_matrix().b().determinant().abs() > NONDEGENERATE_TOL;
    if !free || pair.min_det_minus_identity() <= NONDEGENERATE_TOL {
        return f64::MAX;
    }
    pair.reconstruction_residual(s)
}

/// `S = S₁S₂` with both factors free and off eigenvalue one, for random
/// `S` and the fixtures `S = I` and the shear `[[1,1],[0,1]]`.
pub fn factorization(cfg: &VerifyConfig, per_dim: usize) -> PropertyCase {
    let mut rng = cfg.rng("decomposition.factorization");
    let mut w = Worst::default();
    for &n in &cfg.dims {
        for _ in 0..per_dim {
            let s = symplectic_matrix(&mut rng, n);
            w.add_result(factor_free_pair(&s, cfg.seed).map(|p| pair_error(&p, &s)));
        }
        let id = SymplecticMatrix::identity(n);
        w.add_result(factor_free_pair(&id, cfg.seed).map(|p| pair_error(&p, &id)));
    }
    if cfg.dims.contains(&1) {
        let shear = SymplecticMatrix::new(RMat::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0])).expect("shear");
        w.add_result(factor_free_pair(&shear, cfg.seed).map(|p| pair_error(&p, &shear)));
    }
    w.case("decomposition.factorization", cfg.tol(1e-8))
}

/// Product drift caused by the `λ` shift in [`factor_free_pair`].
pub fn shift_preserves_product(cfg: &VerifyConfig, per_dim: usize) -> PropertyCase {
    let mut rng = cfg.rng("decomposition.factorization");
    let mut w = Worst::default();
    for &n in &cfg.dims {
        for _ in 0..per_dim {
            let s = symplectic_matrix(&mut rng, n);
            w.add_result(factor_free_pair_unshifted(&s, cfg.seed).map(|p| {
                let shifted = lambda_shift(&p);
                max_abs(&(shifted.product().into_matrix() - p.product().into_matrix()))
            }));
        }
    }
    w.case("decomposition.shift_preserves_product", cfg.tol(1e-10))
}

/// A pair whose first factor has `P+Q−L−Lᵀ` singular.
fn degenerate_pair(rng: &mut InstanceRng, n: usize) -> FreePair {
    loop {
        let l = uniform_matrix(rng, n, n, 2.0);
        if l.determinant().abs() < 0.1 {
            continue;
        }
        let p = uniform_symmetric(rng, n, 2.0);
        let v = RVec::from_fn(n, |_, _| rng.random_range(-1.0..=1.0));
        // rank ≤ 1 < n for n ≥ 2, zero for n = 1
        let k = if n == 1 { RMat::zeros(1, 1) } else { &v * v.transpose() };
        let q = &l + l.transpose() - &p + k;
        let Ok(form) = GeneratingForm::new(p, l.clone(), q) else { continue };
        let first = FreeGenerator::from_form(form, m_choices(&l).expect("det L checked")[0] as i64).expect("parity");
        let second = free_generator(rng, n, 2.0);
        return FreePair { first, second, lambda_shift: 0.0 };
    }
}

/// `lambda_shift` on degenerate-by-construction pairs: product kept, both
/// factors moved off eigenvalue one.
pub fn lambda_shift_suite(cfg: &VerifyConfig, count: usize) -> PropertyCase {
    let mut rng = cfg.rng("decomposition.lambda_shift");
    let mut w = Worst::default();
    for n in split_dims(&cfg.dims, count) {
        let pair = degenerate_pair(&mut rng, n);
        let before = pair.product();
        let out = lambda_shift(&pair);
        w.add(if out.min_det_minus_identity() > NONDEGENERATE_TOL { out.reconstruction_residual(&before) } else { f64::MAX });
    }
    if cfg.dims.contains(&1) {
        let pair = FreePair { first: gen1(1.0, 1.0, 1.0, 0), second: gen1(0.0, 1.0, 0.0, 0), lambda_shift: 0.0 };
        let out = lambda_shift(&pair);
        let ok = out.lambda_shift == 0.5 && out.min_det_minus_identity() > NONDEGENERATE_TOL;
        w.add(if ok { out.reconstruction_residual(&pair.product()) } else { f64::MAX });
    }
    w.case("decomposition.lambda_shift", cfg.tol(1e-10))
}

/// `⟨g₀,R(S₁)R(S₂)g₀⟩ / ⟨g₀,R(S₁S₂)g₀⟩ ∈ {±1}` for random nondegenerate
/// triples, each `ν` one of the two metaplectic choices; the error is the
/// distance from the returned sign.
pub fn cocycle(cfg: &VerifyConfig, count: usize) -> PropertyCase {
    let mut rng = cfg.rng("decomposition.cocycle");
    let mut w = Worst::default();
    for n in split_dims(&cfg.dims, count) {
        w.add_result((|| {
            let (s1, s2) = loop {
                let s1 = nondegenerate_symplectic(&mut rng, n, 1e-2)?;
                let s2 = nondegenerate_symplectic(&mut rng, n, 1e-2)?;
                if s1.compose(&s2).det_minus_identity().abs() >= 1e-2 {
                    break (s1, s2);
                }
            };
            let pick = |s: &SymplecticMatrix, rng: &mut InstanceRng| -> Result<u8> { Ok(nu_choices(s)?[rng.random_range(0..2)]) };
            let (nu1, nu2, nu12) = (pick(&s1, &mut rng)?, pick(&s2, &mut rng)?, pick(&s1.compose(&s2), &mut rng)?);
            let r = cocycle_sign(&s1, &s2, nu1, nu2, nu12)?;
            Ok((r.ratio - r.sign as f64).norm())
        })());
    }
    w.case("decomposition.cocycle", cfg.tol(1e-4))
}

/// Every suite at its standard size.
pub fn run_suite(cfg: &VerifyConfig) -> VerificationReport {
    let mut cases = vec![
        free_structure(cfg, 500),
        generator_round_trip(cfg, 500),
        cayley_round_trip(cfg, 500),
        cayley_symmetry(cfg, 500),
        det_factorization_signed(cfg, 500),
        det_factorization_modulus(cfg, 500),
        inverse_block_identity(cfg, 500),
        sign_relation(cfg, 200),
        m_shift(cfg, 200),
        inverse_rule(cfg, 200),
        gaussian_covariance(cfg, 100),
        gaussian_commutation(cfg, 100),
        fresnel_consistency(cfg, 50),
        fresnel(cfg, 20),
        factorization(cfg, 500),
        shift_preserves_product(cfg, 500),
        lambda_shift_suite(cfg, 200),
        cocycle(cfg, 100),
    ];
    cases.extend(
        [
            restricted_quadratic(cfg, 200),
            unitarity(cfg, 200),
            central_identity(cfg, 100),
            matrix_element_quadrature(cfg, 100),
            alt_forms(cfg, 50),
            grid_covariance(cfg, 10),
            grid_commutation(cfg, 10),
            cross_engine(cfg, 4),
            grid_convergence(cfg),
            symplectic_fourier_involution(cfg, 3),
            symplectic_fourier_gaussian(cfg),
            symbol_bridge(cfg),
            kernel_symbol_projector(cfg),
        ]
        .into_iter()
        .flatten(),
    );
    VerificationReport::from_cases(cfg.seed, cases)
}
