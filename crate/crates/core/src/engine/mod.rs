//! Grid and quadrature engine, independent of the closed-form Gaussian
//! algebra: sampled wavefunctions, trapezoid and FFT versions of the
//! operators, phase-space transforms, and matrix elements of `R(S)` by
//! Gauss–Hermite quadrature.

mod descriptor;
mod fourier;
mod grid;
mod matrix_element;
mod operators;
mod phase_space;
mod quadrature;

pub use descriptor::MWDescriptor;
pub use grid::{GridFlags, GridFunction, GridFunctionJson, GridSpec, GridSpecJson, BOUNDARY_DECAY};
pub use matrix_element::{alt_form_check, alt_form_check_with, mw_matrix_element, mw_matrix_element_with, overlap_family};
pub use operators::{factored_apply, hw_apply, quad_fourier_grid};
pub use phase_space::{kernel_to_symbol, symbol_bridge_residual, symplectic_fourier, weyl_from_twisted, windowed_kernel, windowed_twisted_symbol};
pub use quadrature::{fresnel_quadrature, gauss_hermite, gh_integrate, QuadratureOptions, QuadratureResult};
