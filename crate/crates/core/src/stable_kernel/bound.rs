//! The explicit two-sided bound kernel `pbar(t, z) = C t^(-d/alpha) (1 + |z| t^(-1/alpha))^(-(d+alpha))`.

use std::f64::consts::PI;

use statrs::distribution::{Beta, ContinuousCDF};
use statrs::function::beta::beta;
use statrs::function::gamma::gamma;

use super::law::StableLaw;
use crate::error::{domain, invalid, Error, Result};
use crate::numerics::{integrate, integrate_semi_infinite, Tolerance};

/// Surface area of the unit sphere in R^d.
pub fn sphere_area(dim: usize) -> f64 {
    let h = dim as f64 / 2.0;
    2.0 * PI.powf(h) / gamma(h)
}

/// Normalizing constant of the bound kernel. Using `w = r/(1+r)`, the radial
/// integral `int r^(d-1) (1+r)^(-d-alpha) dr` is the Beta function `B(d, alpha)`.
pub fn bound_constant(alpha: f64, dim: usize) -> f64 {
    1.0 / (sphere_area(dim) * beta(dim as f64, alpha))
}

impl StableLaw {
    pub fn bound_constant(&self) -> f64 {
        bound_constant(self.alpha(), self.dim())
    }

    /// `pbar(t, z)` as a function of `|z|`, unchecked.
    #[inline]
    pub fn bound_radial(&self, t: f64, r: f64) -> f64 {
        let d = self.dim() as f64;
        let s = t.powf(-1.0 / self.alpha());
        self.bound_constant() * s.powf(d) * (1.0 + r * s).powf(-(d + self.alpha()))
    }

    /// `pbar(t, z)`, validated.
    pub fn bound_kernel(&self, t: f64, z: &[f64]) -> Result<f64> {
        if !(t > 0.0 && t.is_finite()) {
            return domain(format!("time must be positive and finite, got {t}"));
        }
        if z.len() != self.dim() || z.iter().any(|v| !v.is_finite()) {
            return invalid("point must be finite with the law's dimension");
        }
        Ok(self.bound_radial(t, norm(z)))
    }
}

#[inline]
pub(crate) fn norm(z: &[f64]) -> f64 {
    z.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Two-sided comparison constants between `p` and `pbar`.
#[derive(Debug, Clone, Copy)]
pub struct AronsonFit {
    /// `max p / pbar` over the grid.
    pub upper: f64,
    /// `max pbar / p` over the grid.
    pub lower: f64,
}

impl AronsonFit {
    pub fn constant(&self) -> f64 {
        self.upper.max(self.lower)
    }
}

/// Fit the sandwich constant over scaled radii `|z| t^(-1/alpha)` in `[0, rho_max]`.
pub fn aronson_fit(law: &StableLaw, times: &[f64], rho_max: f64, points: usize) -> Result<AronsonFit> {
    if law.alpha() >= 2.0 {
        return domain("the Gaussian kernel admits no polynomial lower bound");
    }
    if times.is_empty() || points < 2 {
        return invalid("need at least one time and two radii");
    }
    let mut fit = AronsonFit { upper: 0.0, lower: 0.0 };
    for &t in times {
        let scale = t.powf(1.0 / law.alpha());
        for j in 0..points {
            let rho = rho_max * j as f64 / (points - 1) as f64;
            let r = rho * scale;
            let p = law.pdf_radial(t, r);
            let pb = law.bound_radial(t, r);
            fit.upper = fit.upper.max(p / pb);
            fit.lower = fit.lower.max(pb / p);
        }
    }
    Ok(fit)
}

/// `int |z|^delta pbar(v, z) dz` by radial quadrature.
pub fn bound_kernel_moment(law: &StableLaw, v: f64, delta: f64) -> Result<f64> {
    if !(delta >= 0.0 && delta < law.alpha()) {
        return domain(format!("moment order must lie in [0, alpha), got {delta}"));
    }
    let d = law.dim() as f64;
    let area = sphere_area(law.dim());
    let f = |r: f64| area * r.powf(d - 1.0 + delta) * law.bound_radial(v, r);
    let scale = v.powf(1.0 / law.alpha());
    let tol = Tolerance::new(0.0, 1e-12);
    let head = integrate(f, 0.0, scale, tol)?.value;
    // slowly decaying tail: integrate in log-radius
    let g = |x: f64| {
        let r = x.exp();
        f(r) * r
    };
    let tail = integrate_semi_infinite(g, scale.ln(), tol)?.value;
    Ok(head + tail)
}

/// `int pbar(u, z - x) pbar(v, y - z) dz`: adaptive quadrature for d = 1, 2,
/// quasi-Monte-Carlo importance sampling for d = 3.
pub fn convolve_bound_kernels(law: &StableLaw, u: f64, v: f64, x: &[f64], y: &[f64]) -> Result<f64> {
    if !(u > 0.0 && v > 0.0) {
        return domain("convolution times must be positive");
    }
    let d = law.dim();
    if x.len() != d || y.len() != d {
        return invalid("points must have the law's dimension");
    }
    let tol = Tolerance {
        abs: 0.0,
        rel: 1e-9,
        max_intervals: 4000,
    };
    let wrap = |e: Error| Error::Numeric {
        what: "bound-kernel convolution".into(),
        diagnostics: format!("u={u} v={v} x={x:?} y={y:?}: {e}"),
    };
    match d {
        1 => line_integral(
            |z| law.bound_radial(u, (z - x[0]).abs()) * law.bound_radial(v, (y[0] - z).abs()),
            x[0],
            y[0],
            tol,
        )
        .map_err(wrap),
        2 => {
            let inner = |z1: f64| {
                let g = |z2: f64| {
                    let a = ((z1 - x[0]).powi(2) + (z2 - x[1]).powi(2)).sqrt();
                    let b = ((z1 - y[0]).powi(2) + (z2 - y[1]).powi(2)).sqrt();
                    law.bound_radial(u, a) * law.bound_radial(v, b)
                };
                line_integral(g, x[1], y[1], Tolerance { rel: 1e-10, ..tol }).map_or(f64::NAN, |v| v)
            };
            line_integral(inner, x[0], y[0], tol).map_err(wrap)
        }
        _ => Ok(qmc_convolution(law, u, v, x, y, 1 << 16)),
    }
}

/// Integral over R of a function with kinks at `p` and `q`.
fn line_integral<F: Fn(f64) -> f64>(f: F, p: f64, q: f64, tol: Tolerance) -> Result<f64> {
    let (lo, hi) = if p <= q { (p, q) } else { (q, p) };
    let mid = if hi > lo { integrate(&f, lo, hi, tol)?.value } else { 0.0 };
    let right = integrate_semi_infinite(&f, hi, tol)?.value;
    let left = integrate_semi_infinite(|s| f(lo - s), 0.0, tol)?.value;
    Ok(left + mid + right)
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

fn qmc_convolution(law: &StableLaw, u: f64, v: f64, x: &[f64], y: &[f64], n: usize) -> f64 {
    // radius of pbar(1, .) is W/(1-W) with W ~ Beta(d, alpha)
    let radial = Beta::new(law.dim() as f64, law.alpha()).expect("valid beta parameters");
    let scale = u.powf(1.0 / law.alpha());
    let mut acc = 0.0;
    for i in 1..=n as u64 {
        let w = radial.inverse_cdf(radical_inverse(i, 2));
        let r = scale * w / (1.0 - w);
        let cz = 2.0 * radical_inverse(i, 3) - 1.0;
        let ph = 2.0 * PI * radical_inverse(i, 5);
        let sz = (1.0 - cz * cz).sqrt();
        let dir = [sz * ph.cos(), sz * ph.sin(), cz];
        let dist = ((x[0] + r * dir[0] - y[0]).powi(2)
            + (x[1] + r * dir[1] - y[1]).powi(2)
            + (x[2] + r * dir[2] - y[2]).powi(2))
        .sqrt();
        acc += law.bound_radial(v, dist);
    }
    acc / n as f64
}
