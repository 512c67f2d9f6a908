//! Writing a symplectic matrix as a product of two free factors on which the
//! Weyl representation `R` is defined, and the sign in
//! `R(S₁S₂) = ±R(S₁)R(S₂)`.
//!
//! The right factor is `S₂ = S_W(0, I, Q')`, i.e. `[[Q', I], [−I, 0]]`. Then
//! `S₁ = S·S₂⁻¹ = [[B, BQ' − A], [D, DQ' − C]]` is free as soon as
//! `det(BQ' − A) ≠ 0`. Both factors are then moved off eigenvalue one by
//! trading `λI` between the adjacent quadratic forms: `Q₁ ↦ Q₁ − λI` and
//! `P₂ ↦ P₂ + λI` leaves the product `V_{−Q₁}V_{−P₂}` unchanged.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::engine::MWDescriptor;
use crate::error::{Error, Result};
use crate::gaussian::{gauss_inner, mw_apply_gaussian, GaussianState};
use crate::io::FreeGeneratorJson;
use crate::linalg::{max_abs, sym_eigenvalues, RMat};
use crate::maslov::m_choices;
use crate::random::{stream, uniform_symmetric};
use crate::symplectic::{generator_from_free, FreeGenerator, GeneratingForm, SymplecticMatrix};

/// Two free generators whose matrices multiply to a target, and the total
/// `λ` traded between them.
#[derive(Debug, Clone, PartialEq)]
pub struct FreePair {
    pub first: FreeGenerator,
    pub second: FreeGenerator,
    pub lambda_shift: f64,
}

/// Smallest accepted `|det(Sᵢ − I)|` and `|det(BQ' − A)|` (the latter
/// relative to the size of `S`).
pub const NONDEGENERATE_TOL: f64 = 1e-8;

/// Required distance of `λ` from the eigenvalues it must avoid.
pub const LAMBDA_MARGIN: f64 = 1e-3;

const RANDOM_Q_DRAWS: usize = 16;

impl FreePair {
    /// `S₁S₂`.
    pub fn product(&self) -> SymplecticMatrix {
        self.first.free_matrix().compose(&self.second.free_matrix())
    }

    pub fn reconstruction_residual(&self, s: &SymplecticMatrix) -> f64 {
        max_abs(&(self.product().into_matrix() - s.matrix()))
    }

    /// `min |det(Sᵢ − I)|` over both factors.
    pub fn min_det_minus_identity(&self) -> f64 {
        self.first
            .free_matrix()
            .det_minus_identity()
            .abs()
            .min(self.second.free_matrix().det_minus_identity().abs())
    }

    pub fn to_json(&self) -> FreePairJson {
        FreePairJson {
            first: FreeGeneratorJson::from(&self.first),
            second: FreeGeneratorJson::from(&self.second),
            lambda: self.lambda_shift,
        }
    }
}

/// `{"first", "second", "lambda"}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FreePairJson {
    pub first: FreeGeneratorJson,
    pub second: FreeGeneratorJson,
    pub lambda: f64,
}

fn with_smallest_m(form: GeneratingForm) -> Result<FreeGenerator> {
    let m = m_choices(&form.l)?[0];
    FreeGenerator::from_form(form, m as i64)
}

fn candidate_q(n: usize, seed: u64) -> impl Iterator<Item = RMat> {
    let fixed = [0.0, 1.0, -1.0, 2.0, -2.0, 3.0, -3.0].into_iter().map(move |c| RMat::identity(n, n) * c);
    let mut rng = stream(seed, "decomposition.q");
    let random = (0..RANDOM_Q_DRAWS).map(move |_| uniform_symmetric(&mut rng, n, 2.0));
    fixed.chain(random)
}

/// Free factors `S = S₁S₂` without the `λ` adjustment.
pub fn factor_free_pair_unshifted(s: &SymplecticMatrix, seed: u64) -> Result<FreePair> {
    let n = s.n();
    let (a, b) = (s.a(), s.b());
    let scale = (1.0 + max_abs(s.matrix())).powi(n as i32);
    for q in candidate_q(n, seed) {
        let upper = &b * &q - &a;
        if upper.determinant().abs() <= NONDEGENERATE_TOL * scale {
            continue;
        }
        let second = FreeGenerator::new(RMat::zeros(n, n), RMat::identity(n, n), q, 0)?;
        let s1 = s.compose(&second.free_matrix().inverse());
        let first = match generator_from_free(&s1) {
            Ok(form) => with_smallest_m(form)?,
            Err(_) => continue,
        };
        return Ok(FreePair { first, second, lambda_shift: 0.0 });
    }
    Err(Error::ExhaustedSearch(format!(
        "no Q' with det(BQ'−A) ≠ 0 among {} candidates",
        7 + RANDOM_Q_DRAWS
    )))
}

/// Free factors `S = S₁S₂` with `det(Sᵢ − I) ≠ 0` for both.
///
/// `seed` drives the random fallback for `Q'`; the result is a
/// deterministic function of `(S, seed)`.
pub fn factor_free_pair(s: &SymplecticMatrix, seed: u64) -> Result<FreePair> {
    Ok(lambda_shift(&factor_free_pair_unshifted(s, seed)?))
}

/// `0, ½, −½, 1, −1, …`
fn lambda_schedule() -> impl Iterator<Item = f64> {
    std::iter::once(0.0).chain((1..=400).flat_map(|k| {
        let v = 0.5 * k as f64;
        [v, -v]
    }))
}

fn shifted(pair: &FreePair, lambda: f64) -> Result<FreePair> {
    let n = pair.first.n();
    let id = RMat::identity(n, n) * lambda;
    let f = pair.first.form();
    let s = pair.second.form();
    let first = FreeGenerator::from_form(GeneratingForm::new(f.p.clone(), f.l.clone(), &f.q - &id)?, pair.first.m() as i64)?;
    let second = FreeGenerator::from_form(GeneratingForm::new(&s.p + &id, s.l.clone(), s.q.clone())?, pair.second.m() as i64)?;
    Ok(FreePair { first, second, lambda_shift: pair.lambda_shift + lambda })
}

/// Trades `λI` from `Q₁` to `P₂`, taking the first `λ` of the schedule that
/// keeps `LAMBDA_MARGIN` away from the eigenvalues of `P₁+Q₁−L₁−L₁ᵀ` and
/// from minus those of `P₂+Q₂−L₂−L₂ᵀ`, and leaves both `|det(Sᵢ−I)|` above
/// `NONDEGENERATE_TOL`.
pub fn lambda_shift(pair: &FreePair) -> FreePair {
    let e1 = sym_eigenvalues(&pair.first.fixed_point_matrix());
    let e2 = sym_eigenvalues(&pair.second.fixed_point_matrix());
    let mut best: Option<(f64, FreePair)> = None;
    for lambda in lambda_schedule() {
        let clear = e1.iter().all(|e| (lambda - e).abs() >= LAMBDA_MARGIN)
            && e2.iter().all(|e| (lambda + e).abs() >= LAMBDA_MARGIN);
        if !clear {
            continue;
        }
        let Ok(candidate) = shifted(pair, lambda) else { continue };
        let quality = candidate.min_det_minus_identity();
        if quality > NONDEGENERATE_TOL {
            return candidate;
        }
        if best.as_ref().is_none_or(|(q, _)| quality > *q) {
            best = Some((quality, candidate));
        }
    }
    best.map(|(_, p)| p).unwrap_or_else(|| pair.clone())
}

/// Sign in `R(S₁S₂) = ±R(S₁)R(S₂)` together with the measured ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CocycleResult {
    pub sign: i8,
    pub ratio: Complex64,
}

/// `{"sign", "ratio_re", "ratio_im"}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CocycleJson {
    pub sign: i8,
    pub ratio_re: f64,
    pub ratio_im: f64,
}

impl From<&CocycleResult> for CocycleJson {
    fn from(c: &CocycleResult) -> Self {
        Self { sign: c.sign, ratio_re: c.ratio.re, ratio_im: c.ratio.im }
    }
}

pub const COCYCLE_TOL: f64 = 1e-4;

/// `r = ⟨g₀, R(S₁)R(S₂)g₀⟩ / ⟨g₀, R(S₁S₂)g₀⟩` from the closed-form action on
/// the standard Gaussian; `r` must be `±1`.
pub fn cocycle_sign(s1: &SymplecticMatrix, s2: &SymplecticMatrix, nu1: u8, nu2: u8, nu12: u8) -> Result<CocycleResult> {
    if s1.n() != s2.n() {
        return Err(Error::Dimension(format!("n={} and n={}", s1.n(), s2.n())));
    }
    let d1 = MWDescriptor::new(s1, nu1)?;
    let d2 = MWDescriptor::new(s2, nu2)?;
    let d12 = MWDescriptor::new(&s1.compose(s2), nu12)?;
    let g0 = GaussianState::standard(s1.n());
    let chained = gauss_inner(&g0, &mw_apply_gaussian(&d1, &mw_apply_gaussian(&d2, &g0)?)?)?;
    let direct = gauss_inner(&g0, &mw_apply_gaussian(&d12, &g0)?)?;
    let ratio = chained / direct;
    let inconsistent = Error::InconsistentIndex { re: ratio.re, im: ratio.im };
    if (ratio.norm() - 1.0).abs() > COCYCLE_TOL {
        return Err(inconsistent);
    }
    let sign: i8 = if ratio.re >= 0.0 { 1 } else { -1 };
    if (ratio - sign as f64).norm() > COCYCLE_TOL {
        return Err(inconsistent);
    }
    Ok(CocycleResult { sign, ratio })
}
