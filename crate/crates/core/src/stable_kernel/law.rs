use std::f64::consts::PI;
use std::path::Path;
use std::sync::Arc;

use super::profile::gaussian_profile;
use super::table::{cache_dir_from_env, law_tables, LawTables};
use crate::error::{domain, invalid, Result};

/// Isotropic alpha-stable law on R^d with characteristic function `exp(-t |xi|^alpha)`.
#[derive(Debug, Clone)]
pub struct StableLaw {
    alpha: f64,
    dim: usize,
    tables: Option<Arc<LawTables>>,
}

impl StableLaw {
    /// Build the law, tabulating its radial profiles (cached per process and,
    /// when `SBE_CACHE_DIR` is set, on disk).
    pub fn new(alpha: f64, dim: usize) -> Result<Self> {
        let dir = cache_dir_from_env();
        Self::with_cache_dir(alpha, dim, dir.as_deref())
    }

    pub fn with_cache_dir(alpha: f64, dim: usize, cache: Option<&Path>) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 2.0) {
            return domain(format!("alpha must lie in (0, 2], got {alpha}"));
        }
        if !(1..=3).contains(&dim) {
            return domain(format!("dimension must be 1, 2 or 3, got {dim}"));
        }
        let tables = if alpha == 2.0 {
            None
        } else {
            Some(law_tables(alpha, dim, cache)?)
        };
        Ok(StableLaw { alpha, dim, tables })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Unit-time radial profile `phi_d(r)`.
    #[inline]
    pub fn profile(&self, r: f64) -> f64 {
        match &self.tables {
            Some(t) => t.density.eval(r),
            None => gaussian_profile(self.dim, r),
        }
    }

    /// `phi_{d+2}(r)`, so that `phi_d'(r) = -2 pi r phi_{d+2}(r)`.
    #[inline]
    pub fn gradient_profile(&self, r: f64) -> f64 {
        match &self.tables {
            Some(t) => t.gradient.eval(r),
            None => gaussian_profile(self.dim + 2, r),
        }
    }

    /// Density `p(t, z)`, validated.
    pub fn density(&self, t: f64, z: &[f64]) -> Result<f64> {
        self.check(t, z)?;
        Ok(self.pdf(t, z))
    }

    /// Gradient of `z -> p(t, z)`, validated.
    pub fn gradient(&self, t: f64, z: &[f64]) -> Result<Vec<f64>> {
        self.check(t, z)?;
        let mut out = vec![0.0; self.dim];
        self.grad_pdf(t, z, &mut out);
        Ok(out)
    }

    fn check(&self, t: f64, z: &[f64]) -> Result<()> {
        if !(t > 0.0 && t.is_finite()) {
            return domain(format!("time must be positive and finite, got {t}"));
        }
        if z.len() != self.dim {
            return invalid(format!("point has dimension {}, law has {}", z.len(), self.dim));
        }
        if z.iter().any(|v| !v.is_finite()) {
            return invalid("point has non-finite coordinates");
        }
        Ok(())
    }

    /// Unchecked density for hot loops.
    #[inline]
    pub fn pdf(&self, t: f64, z: &[f64]) -> f64 {
        let r = z.iter().map(|v| v * v).sum::<f64>().sqrt();
        self.pdf_radial(t, r)
    }

    /// Density as a function of `|z|`.
    #[inline]
    pub fn pdf_radial(&self, t: f64, r: f64) -> f64 {
        let s = t.powf(-1.0 / self.alpha);
        s.powi(self.dim as i32) * self.profile(r * s)
    }

    /// Unchecked gradient for hot loops.
    #[inline]
    pub fn grad_pdf(&self, t: f64, z: &[f64], out: &mut [f64]) {
        let r = z.iter().map(|v| v * v).sum::<f64>().sqrt();
        let s = t.powf(-1.0 / self.alpha);
        let f = -2.0 * PI * s.powi(self.dim as i32 + 2) * self.gradient_profile(r * s);
        for (o, v) in out.iter_mut().zip(z) {
            *o = f * v;
        }
    }

    /// One-dimensional density and derivative in a single call.
    #[inline]
    pub fn pdf_and_derivative_1d(&self, t: f64, x: f64) -> (f64, f64) {
        let s = t.powf(-1.0 / self.alpha);
        let r = x.abs() * s;
        (s * self.profile(r), -2.0 * PI * s * s * s * x * self.gradient_profile(r))
    }

    /// Characteristic exponent `|xi|^alpha`.
    #[inline]
    pub fn symbol(&self, xi_norm: f64) -> f64 {
        xi_norm.powf(self.alpha)
    }
}
