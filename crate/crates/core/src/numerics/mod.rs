//! Quadrature, fitting and small statistical helpers.

pub mod fit;
pub mod quad;

pub use fit::{fit_power_law, linear_fit, LinearFit};
pub use quad::{gauss_legendre, integrate, integrate_semi_infinite, Integral, Tolerance};
