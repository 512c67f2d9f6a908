use num_complex::Complex64;

use crate::error::Result;
use crate::linalg::{RMat, RVec, I};
use crate::maslov::mw_index;
use crate::symplectic::{cayley_ms, FreeGenerator, SymplecticMatrix};

/// Data of the twisted Weyl symbol
/// `a_σ(z) = (2π)^{−n} i^ν |det(S−I)|^{−1/2} exp(½i⟨M_S z, z⟩)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MWDescriptor {
    s: SymplecticMatrix,
    ms: RMat,
    nu: u8,
    det_s_minus_i: f64,
    norm_factor: f64,
}

impl MWDescriptor {
    /// Fails with an eigenvalue-one error when `det(S−I) = 0`.
    pub fn new(s: &SymplecticMatrix, nu: u8) -> Result<Self> {
        let ms = cayley_ms(s)?;
        let det = s.det_minus_identity();
        let n = s.n() as f64;
        Ok(Self {
            s: s.clone(),
            ms,
            nu: nu % 4,
            det_s_minus_i: det,
            norm_factor: (2.0 * std::f64::consts::PI).powf(-n) / det.abs().sqrt(),
        })
    }

    /// Descriptor of `S_W` with `ν` taken from the index formula, so that
    /// `R(S_W) = Ŝ_{W,m}`.
    pub fn from_generator(g: &FreeGenerator) -> Result<Self> {
        let nu = mw_index(g)?.nu;
        Self::new(&g.free_matrix(), nu)
    }

    pub fn n(&self) -> usize {
        self.s.n()
    }

    pub fn s(&self) -> &SymplecticMatrix {
        &self.s
    }

    pub fn ms(&self) -> &RMat {
        &self.ms
    }

    pub fn nu(&self) -> u8 {
        self.nu
    }

    pub fn det_s_minus_i(&self) -> f64 {
        self.det_s_minus_i
    }

    /// `(2π)^{−n} |det(S−I)|^{−1/2}`.
    pub fn norm_factor(&self) -> f64 {
        self.norm_factor
    }

    /// `norm_factor · i^ν`.
    pub fn prefactor(&self) -> Complex64 {
        I.powu(self.nu as u32) * self.norm_factor
    }

    pub fn with_nu(&self, nu: u8) -> Self {
        Self { nu: nu % 4, ..self.clone() }
    }

    pub fn twisted_symbol(&self, z: &RVec) -> Complex64 {
        self.prefactor() * Complex64::from_polar(1.0, 0.5 * (&self.ms * z).dot(z))
    }
}
