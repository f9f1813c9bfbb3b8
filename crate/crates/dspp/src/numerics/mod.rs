//! Numerical kernels: adaptive quadrature, Lévy-measure integrals, the real
//! gamma function, and contour differentiation of analytic functions.

mod cauchy;
mod gamma;
mod levy;
mod quadrature;

pub use cauchy::{cauchy_derivatives, CauchySettings, ContourDerivatives};
pub use gamma::gamma_fn;
pub use levy::{integrate_levy, integrate_levy_complex};
pub use quadrature::{
    integrate_1d, integrate_1d_complex, QuadResult, QuadratureSettings,
};
