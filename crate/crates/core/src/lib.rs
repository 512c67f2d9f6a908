//! Numerical toolkit for the Weyl representation of metaplectic operators.
//!
//! The crate implements the Cayley-type parametrization `M_S = ½J(S+I)(S−I)⁻¹`
//! of symplectic matrices without eigenvalue one, the quadratic Fourier
//! transforms `Ŝ_{W,m}` attached to free symplectic matrices, the mod-4 index
//! `ν` that makes the Weyl operator
//!
//! ```text
//! R(S) = (2π)^{−n} i^ν |det(S−I)|^{−1/2} ∫ exp(½i⟨M_S z, z⟩) T(z) dz
//! ```
//!
//! coincide with `Ŝ_{W,m}`, and a factorization of arbitrary symplectic
//! matrices into two free factors on which `R` is defined.
//!
//! Two independent engines check every operator identity: exact Gaussian
//! algebra ([`gaussian`]) and grid/quadrature evaluation ([`engine`]).

// NaN has to fail every tolerance check, hence `!(x <= tol)`.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod decomposition;
pub mod engine;
pub mod error;
pub mod gaussian;
pub mod io;
pub mod linalg;
pub mod maslov;
pub mod random;
pub mod symplectic;
pub mod verify;

pub use error::{Error, Result};
