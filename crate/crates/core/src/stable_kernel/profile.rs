//! Radial profile of the isotropic stable density with unit scale.
//!
//! `phi_d(r)` is the density of a d-dimensional isotropic stable vector with
//! characteristic function `exp(-|xi|^alpha)`, evaluated at `|z| = r`. It is
//! computed from the Gaussian scale mixture `Z = sqrt(2 S) N`, where `S` has
//! Laplace transform `exp(-lambda^(alpha/2))` and is drawn through Kanter's
//! representation `S = (A(U) / E)^kappa`, `kappa = (2 - alpha) / alpha`.
//! Averaging the Gaussian density over `E` in closed form leaves a smooth,
//! non-oscillatory double integral.

use std::f64::consts::PI;

use rayon::prelude::*;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::numerics::{integrate, integrate_semi_infinite, Tolerance};

/// Kanter's function for the positive stable law of index `a` in (0, 1), in log form.
pub fn ln_kanter(a: f64, theta: f64) -> f64 {
    if theta <= 1e-7 {
        // limit as theta -> 0, plus the first-order correction being O(theta^2)
        return (a * a.ln() + (1.0 - a) * (1.0 - a).ln()) / (1.0 - a);
    }
    let num = a * (a * theta).sin().ln() + (1.0 - a) * ((1.0 - a) * theta).sin().ln();
    (num - theta.sin().ln()) / (1.0 - a)
}

/// Mixture quadrature for `phi_dim(r)`; `alpha` in (0, 2), any `dim >= 1`.
pub fn mixture_profile(alpha: f64, dim: usize, r: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 2.0) {
        return Err(Error::Domain(format!("mixture profile needs alpha in (0,2), got {alpha}")));
    }
    if !(r >= 0.0 && r.is_finite()) {
        return Err(Error::InvalidArgument(format!("radius must be finite and >= 0, got {r}")));
    }
    let a = alpha / 2.0;
    let kappa = (2.0 - alpha) / alpha;
    let half_d = dim as f64 / 2.0;
    let tol = Tolerance {
        abs: 0.0,
        rel: 1e-11,
        max_intervals: 4000,
    };
    let outer = |theta: f64| -> f64 {
        let ln_a = ln_kanter(a, theta);
        let c = 0.25 * r * r * (-kappa * ln_a).exp();
        match mixture_inner(kappa, half_d, c) {
            Ok(v) => (-kappa * half_d * ln_a).exp() * v,
            Err(_) => f64::NAN,
        }
    };
    let integral = integrate(outer, 0.0, PI, tol)
        .map_err(|e| Error::Numeric {
            what: "stable radial profile".into(),
            diagnostics: format!("alpha={alpha} d={dim} r={r}: {e}"),
        })?
        .value;
    Ok((4.0 * PI).powf(-half_d) * integral / PI)
}

/// `I(c) = int_0^inf exp(-e) e^(kappa d/2) exp(-c e^kappa) de`.
pub fn mixture_inner(kappa: f64, half_d: f64, c: f64) -> Result<f64> {
    let m = kappa * half_d;
    if c == 0.0 {
        return Ok(ln_gamma(1.0 + m).exp());
    }
    let tol = Tolerance {
        abs: 0.0,
        rel: 1e-12,
        max_intervals: 2000,
    };
    if c <= 1.0 {
        // split where exp(-e) starts to dominate so the semi-infinite map sees a tame tail
        let split = (m + 1.0).max(1.0);
        let f = |e: f64| {
            if e <= 0.0 {
                return 0.0;
            }
            (-e + m * e.ln() - c * e.powf(kappa)).exp()
        };
        let head = integrate(f, 0.0, split, tol)?.value;
        let tail = integrate_semi_infinite(f, split, tol)?.value;
        Ok(head + tail)
    } else {
        let p = half_d + 1.0 / kappa;
        let ik = 1.0 / kappa;
        let f = |w: f64| {
            if w <= 0.0 {
                return 0.0;
            }
            ((p - 1.0) * w.ln() - w - (w / c).powf(ik)).exp()
        };
        let split = p.max(1.0);
        let head = integrate(f, 0.0, split, tol)?.value;
        let tail = integrate_semi_infinite(f, split, tol)?.value;
        Ok(ik * c.powf(-p) * (head + tail))
    }
}

/// Tabulated inner integral `I(c)` for fixed `kappa` and `m = kappa d / 2`, on a
/// uniform grid in `ln c`. Since `dI/dc` is `-I` with `m` raised by `kappa`,
/// the companion table supplies exact Hermite slopes.
#[derive(Debug, Clone)]
pub struct InnerTable {
    kappa: f64,
    m: f64,
    values: Vec<f64>,
    slopes: Vec<f64>,
    gamma0: f64,
    gamma1: f64,
}

const LNC_MIN: f64 = -30.0;
const LNC_MAX: f64 = 30.0;
const LNC_STEP: f64 = 0.01;

fn inner_nodes(kappa: f64, half_d: f64) -> Result<Vec<f64>> {
    let n = ((LNC_MAX - LNC_MIN) / LNC_STEP).round() as usize + 1;
    (0..n)
        .into_par_iter()
        .map(|j| mixture_inner(kappa, half_d, (LNC_MIN + j as f64 * LNC_STEP).exp()))
        .collect()
}

impl InnerTable {
    fn new(kappa: f64, m: f64, values: Vec<f64>, upper: &[f64]) -> Self {
        // slope in u = ln c is c dI/dc = -c I_upper(c)
        let slopes = upper
            .iter()
            .enumerate()
            .map(|(j, v)| -(LNC_MIN + j as f64 * LNC_STEP).exp() * v)
            .collect();
        InnerTable {
            kappa,
            m,
            values,
            slopes,
            gamma0: ln_gamma(1.0 + m).exp(),
            gamma1: ln_gamma(1.0 + m + kappa).exp(),
        }
    }

    #[inline]
    pub fn eval(&self, c: f64) -> f64 {
        if c <= 0.0 {
            return self.gamma0;
        }
        let u = c.ln();
        if u < LNC_MIN {
            return self.gamma0 - c * self.gamma1;
        }
        if u >= LNC_MAX {
            let ik = 1.0 / self.kappa;
            let p = self.m / self.kappa + ik;
            return ik * c.powf(-p) * (ln_gamma(p).exp() - c.powf(-ik) * ln_gamma(p + ik).exp());
        }
        let x = (u - LNC_MIN) / LNC_STEP;
        let j = (x as usize).min(self.values.len() - 2);
        let t = x - j as f64;
        let t2 = t * t;
        let t3 = t2 * t;
        (2.0 * t3 - 3.0 * t2 + 1.0) * self.values[j]
            + (t3 - 2.0 * t2 + t) * LNC_STEP * self.slopes[j]
            + (-2.0 * t3 + 3.0 * t2) * self.values[j + 1]
            + (t3 - t2) * LNC_STEP * self.slopes[j + 1]
    }
}

/// Evaluator of `phi_d` for the dimensions `dim0, dim0 + 2, ..., dim0 + 2 (count - 1)`.
#[derive(Debug, Clone)]
pub struct MixtureProfiles {
    alpha: f64,
    dim0: usize,
    inner: Vec<InnerTable>,
}

impl MixtureProfiles {
    pub fn new(alpha: f64, dim0: usize, count: usize) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 2.0) {
            return Err(Error::Domain(format!("mixture profile needs alpha in (0,2), got {alpha}")));
        }
        let kappa = (2.0 - alpha) / alpha;
        let nodes: Vec<Vec<f64>> = (0..=count)
            .map(|i| inner_nodes(kappa, (dim0 + 2 * i) as f64 / 2.0))
            .collect::<Result<_>>()?;
        let inner = (0..count)
            .map(|i| InnerTable::new(kappa, kappa * (dim0 + 2 * i) as f64 / 2.0, nodes[i].clone(), &nodes[i + 1]))
            .collect();
        Ok(MixtureProfiles { alpha, dim0, inner })
    }

    /// `phi_dim(r)` for `dim = dim0 + 2 i`.
    pub fn profile(&self, dim: usize, r: f64) -> Result<f64> {
        if dim < self.dim0 || (dim - self.dim0) % 2 != 0 || (dim - self.dim0) / 2 >= self.inner.len() {
            return Err(Error::InvalidArgument(format!("dimension {dim} not covered by this evaluator")));
        }
        let inner = &self.inner[(dim - self.dim0) / 2];
        let a = self.alpha / 2.0;
        let kappa = inner.kappa;
        let half_d = dim as f64 / 2.0;
        let tol = Tolerance {
            abs: 0.0,
            rel: 1e-11,
            max_intervals: 4000,
        };
        let f = |theta: f64| {
            let ln_a = ln_kanter(a, theta);
            let c = 0.25 * r * r * (-kappa * ln_a).exp();
            (-kappa * half_d * ln_a).exp() * inner.eval(c)
        };
        let integral = integrate(f, 0.0, PI, tol)
            .map_err(|e| Error::Numeric {
                what: "stable radial profile".into(),
                diagnostics: format!("alpha={} d={dim} r={r}: {e}", self.alpha),
            })?
            .value;
        Ok((4.0 * PI).powf(-half_d) * integral / PI)
    }
}

/// Gaussian case `alpha = 2`: `(4 pi)^(-d/2) exp(-r^2 / 4)`.
pub fn gaussian_profile(dim: usize, r: f64) -> f64 {
    (4.0 * PI).powf(-(dim as f64) / 2.0) * (-0.25 * r * r).exp()
}
