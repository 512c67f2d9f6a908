//! Closed-form Gaussian oracle: complex Gaussian wavefunctions and the exact
//! action of Heisenberg–Weyl operators, quadratic Fourier transforms and
//! Weyl operators `R(S)` on them.

mod quadexp;
mod state;

pub use quadexp::{complex_gaussian_integral, continuous_log_det, fresnel_closed_form, FresnelResult, QuadExp};
pub use state::{
    gauss_hw, gauss_inner, gauss_norm, gauss_quad_fourier, mw_apply_gaussian, quad_fourier_kernel,
    quad_fourier_prefactor, translated_family, GaussianState, GaussianStateJson,
};
