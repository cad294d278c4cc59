//! Isotropic alpha-stable transition density, its gradient, the two-sided
//! bound kernel and exact samplers.

pub mod bound;
pub mod law;
pub mod profile;
pub mod sampler;
pub mod table;

pub use bound::{aronson_fit, bound_constant, bound_kernel_moment, convolve_bound_kernels, AronsonFit};
pub use law::StableLaw;
pub use sampler::{sample_increments, IncrementSampler};

use crate::error::{domain, Result};
use crate::numerics::{integrate, integrate_semi_infinite, Tolerance};

pub fn evaluate_density(law: &StableLaw, t: f64, z: &[f64]) -> Result<f64> {
    law.density(t, z)
}

pub fn evaluate_gradient(law: &StableLaw, t: f64, z: &[f64]) -> Result<Vec<f64>> {
    law.gradient(t, z)
}

pub fn bound_kernel(law: &StableLaw, t: f64, z: &[f64]) -> Result<f64> {
    law.bound_kernel(t, z)
}

pub fn sample_increment(sampler: &mut IncrementSampler, t: f64) -> Vec<f64> {
    sampler.next_increment(t)
}

/// Distribution function of one coordinate-free d = 1 increment `Z_t`.
pub fn cdf_1d(law: &StableLaw, t: f64, x: f64) -> Result<f64> {
    if law.dim() != 1 {
        return domain("cdf_1d needs a one-dimensional law");
    }
    if !(t > 0.0) {
        return domain(format!("time must be positive, got {t}"));
    }
    let tol = Tolerance::new(1e-14, 1e-11);
    let f = |s: f64| law.pdf_radial(t, s);
    let ax = x.abs();
    let half = if ax < 50.0 * t.powf(1.0 / law.alpha()) {
        0.5 - integrate(f, 0.0, ax, tol)?.value
    } else {
        integrate_semi_infinite(f, ax, tol)?.value
    };
    Ok(if x >= 0.0 { 1.0 - half } else { half })
}
