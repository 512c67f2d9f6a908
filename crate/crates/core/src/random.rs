//! Seeded instance generators shared by the property suites.
//!
//! Every stream is a ChaCha8 generator keyed by the user seed and a stream
//! label, so suites draw the same instances no matter which other suites run.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gaussian::GaussianState;
use crate::linalg::{blocks, CMat, RMat, RVec};
use crate::maslov::m_choices;
use crate::symplectic::{cayley_ms, FreeGenerator, SymplecticMatrix};

pub type InstanceRng = ChaCha8Rng;

/// Generator for `(seed, label)`; the label is folded in with FNV-1a.
pub fn stream(seed: u64, label: &str) -> InstanceRng {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    ChaCha8Rng::seed_from_u64(seed ^ h)
}

pub fn uniform_matrix(rng: &mut InstanceRng, rows: usize, cols: usize, half_width: f64) -> RMat {
    RMat::from_fn(rows, cols, |_, _| rng.random_range(-half_width..=half_width))
}

pub fn uniform_symmetric(rng: &mut InstanceRng, n: usize, half_width: f64) -> RMat {
    let mut m = RMat::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = rng.random_range(-half_width..=half_width);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    m
}

const MAX_DRAWS: usize = 100_000;

/// `P`, `Q` symmetric and `L` with entries uniform in `[−w, w]`,
/// `|det L| ≥ 0.1`, and one of the two admissible `m` picked at random.
pub fn free_generator(rng: &mut InstanceRng, n: usize, half_width: f64) -> FreeGenerator {
    loop {
        let l = uniform_matrix(rng, n, n, half_width);
        if l.determinant().abs() < 0.1 {
            continue;
        }
        let p = uniform_symmetric(rng, n, half_width);
        let q = uniform_symmetric(rng, n, half_width);
        let m = m_choices(&l).expect("det L checked")[rng.random_range(0..2)];
        return FreeGenerator::new(p, l, q, m as i64).expect("valid by construction");
    }
}

/// Like [`free_generator`], rejecting `|det(S_W − I)| < min_det`.
pub fn nondegenerate_generator(rng: &mut InstanceRng, n: usize, half_width: f64, min_det: f64) -> Result<FreeGenerator> {
    for _ in 0..MAX_DRAWS {
        let g = free_generator(rng, n, half_width);
        if g.free_matrix().det_minus_identity().abs() >= min_det {
            return Ok(g);
        }
    }
    Err(Error::ExhaustedSearch(format!("no generator with |det(S−I)| ≥ {min_det}")))
}

/// Nondegenerate generator whose `M_S` has Frobenius norm at most `ms_bound`,
/// which keeps the phase-space integrands within reach of Gauss–Hermite
/// quadrature.
pub fn tame_generator(rng: &mut InstanceRng, n: usize, half_width: f64, min_det: f64, ms_bound: f64) -> Result<FreeGenerator> {
    for _ in 0..MAX_DRAWS {
        let g = nondegenerate_generator(rng, n, half_width, min_det)?;
        let ms = cayley_ms(&g.free_matrix())?;
        if ms.norm() <= ms_bound {
            return Ok(g);
        }
    }
    Err(Error::ExhaustedSearch(format!("no generator with ‖M_S‖ ≤ {ms_bound}")))
}

/// A random element of `Sp(n)` as a product of a dilation
/// `diag(A, A⁻ᵀ)`, a lower shear and an upper shear. One draw in four
/// drops the upper shear, which leaves `B = 0` (a matrix that is not free).
pub fn symplectic_matrix(rng: &mut InstanceRng, n: usize) -> SymplecticMatrix {
    let a = loop {
        let a = RMat::identity(n, n) + uniform_matrix(rng, n, n, 0.6);
        if a.determinant().abs() > 0.2 {
            break a;
        }
    };
    let a_inv_t = a.clone().try_inverse().expect("det checked").transpose();
    let z = RMat::zeros(n, n);
    let id = RMat::identity(n, n);
    let dil = blocks(&a, &z, &z, &a_inv_t);
    let lower = blocks(&id, &z, &uniform_symmetric(rng, n, 1.5), &id);
    let upper = if rng.random_range(0..4) == 0 { RMat::identity(2 * n, 2 * n) } else { blocks(&id, &uniform_symmetric(rng, n, 1.5), &z, &id) };
    SymplecticMatrix::new(dil * lower * upper).expect("product of symplectic factors")
}

/// Random symplectic matrix with `|det(S−I)| ≥ min_det`.
pub fn nondegenerate_symplectic(rng: &mut InstanceRng, n: usize, min_det: f64) -> Result<SymplecticMatrix> {
    for _ in 0..MAX_DRAWS {
        let s = symplectic_matrix(rng, n);
        if s.det_minus_identity().abs() >= min_det {
            return Ok(s);
        }
    }
    Err(Error::ExhaustedSearch(format!("no symplectic matrix with |det(S−I)| ≥ {min_det}")))
}

/// Gaussian with `Γ = R + i(I + E)`, `R` and `E` small symmetric,
/// center and momentum in `[−1, 1]ⁿ`.
pub fn gaussian_state(rng: &mut InstanceRng, n: usize) -> GaussianState {
    let r = uniform_symmetric(rng, n, 0.4);
    let e = uniform_symmetric(rng, n, 0.25 / n as f64);
    let gamma = CMat::from_fn(n, n, |i, j| Complex64::new(r[(i, j)], e[(i, j)] + if i == j { 1.0 } else { 0.0 }));
    let center = RVec::from_fn(n, |_, _| rng.random_range(-1.0..=1.0));
    let momentum = RVec::from_fn(n, |_, _| rng.random_range(-1.0..=1.0));
    let amp = Complex64::from_polar(rng.random_range(0.5..=1.5), rng.random_range(-3.0..=3.0));
    GaussianState::new(gamma, center, momentum, amp).expect("Im Γ positive by construction")
}
