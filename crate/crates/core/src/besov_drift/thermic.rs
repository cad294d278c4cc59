//! Thermic characterization of Besov norms on the torus, computed with
//! spectral multipliers of the stable semigroup.

use num_complex::Complex64;

use super::fourier::{lebesgue_norm, TorusGrid};
use crate::error::{invalid, Error, Result};

/// Log-spaced quadrature over `v in [V_MIN, 1]`.
pub const V_MIN: f64 = 1e-8;
pub const V_PER_DECADE: usize = 24;

/// Both parts of the norm, kept apart for diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermicParts {
    /// `|| F^-1(phi F f) ||_{L^ell}`.
    pub low: f64,
    /// `T^theta_{ell,m}(f)`.
    pub thermic: f64,
    /// Derivative order `n`.
    pub order: u32,
}

impl ThermicParts {
    pub fn total(&self) -> f64 {
        self.low + self.thermic
    }
}

/// Smallest integer strictly above `theta / alpha` (0 for negative theta).
pub fn derivative_order(theta: f64, alpha: f64) -> u32 {
    let x = theta / alpha;
    if x < 0.0 {
        0
    } else {
        x.floor() as u32 + 1
    }
}

fn psi(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp()
    } else {
        0.0
    }
}

/// Smooth bump: 1 on `|xi| <= 1`, 0 on `|xi| >= 2`.
pub fn low_pass(xi: f64) -> f64 {
    let a = psi(2.0 - xi);
    let b = psi(xi - 1.0);
    a / (a + b)
}

/// Thermic norm of grid values.
pub fn thermic_norm(grid: &TorusGrid, values: &[f64], theta: f64, ell: f64, m: f64, alpha: f64) -> Result<f64> {
    if values.len() != grid.len() {
        return invalid(format!("expected {} grid values, got {}", grid.len(), values.len()));
    }
    Ok(thermic_parts(grid, &grid.forward(values), theta, ell, m, alpha)?.total())
}

/// Thermic norm from Fourier coefficients (as returned by [`TorusGrid::forward`]).
pub fn thermic_parts(grid: &TorusGrid, coeffs: &[Complex64], theta: f64, ell: f64, m: f64, alpha: f64) -> Result<ThermicParts> {
    if coeffs.len() != grid.len() {
        return invalid("coefficient count does not match the grid");
    }
    if !(ell >= 1.0) || !(m >= 1.0) {
        return invalid(format!("need ell, m in [1, inf], got ell={ell}, m={m}"));
    }
    if !(alpha > 0.0 && alpha <= 2.0) || !theta.is_finite() {
        return invalid("need alpha in (0, 2] and finite theta");
    }
    let n = derivative_order(theta, alpha);
    let nf = n as f64;
    if theta / alpha >= nf {
        return Err(Error::Numeric {
            what: "thermic norm".into(),
            diagnostics: "derivative order below theta/alpha".into(),
        });
    }
    let lam: Vec<f64> = (0..grid.len()).map(|i| grid.xi_norm(i).powf(alpha)).collect();

    let low_coeffs: Vec<Complex64> = coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| c * low_pass(grid.xi_norm(i)))
        .collect();
    let low = lebesgue_norm(grid, &grid.inverse(&low_coeffs), ell);

    let decades = -V_MIN.log10();
    let nodes = (decades * V_PER_DECADE as f64).round() as usize + 1;
    let dx = -V_MIN.ln() / (nodes - 1) as f64;
    let expo = nf - theta / alpha;
    let mut acc = 0.0f64;
    let mut buf = vec![Complex64::new(0.0, 0.0); grid.len()];
    for j in 0..nodes {
        let v = (V_MIN.ln() + j as f64 * dx).exp();
        for ((b, c), l) in buf.iter_mut().zip(coeffs).zip(&lam) {
            let sign = if n % 2 == 1 { -1.0 } else { 1.0 };
            *b = c * (sign * l.powi(n as i32) * (-v * l).exp());
        }
        let norm = lebesgue_norm(grid, &grid.inverse(&buf), ell);
        if m.is_infinite() {
            acc = acc.max(v.powf(expo) * norm);
        } else {
            let w = if j == 0 || j == nodes - 1 { 0.5 } else { 1.0 };
            acc += w * dx * v.powf(expo * m) * norm.powf(m);
        }
    }
    let thermic = if m.is_infinite() { acc } else { acc.powf(1.0 / m) };
    Ok(ThermicParts { low, thermic, order: n })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_and_orders() {
        let g = TorusGrid::new(1, 64, 8.0).unwrap();
        assert_eq!(thermic_norm(&g, &vec![0.0; 64], 0.3, 2.0, 1.0, 1.5).unwrap(), 0.0);
        assert_eq!(derivative_order(-0.1, 1.5), 0);
        assert_eq!(derivative_order(0.0, 1.5), 1);
        assert_eq!(derivative_order(1.5, 1.5), 2);
        assert_eq!(low_pass(0.5), 1.0);
        assert_eq!(low_pass(2.5), 0.0);
        assert!((low_pass(1.5) - 0.5).abs() < 1e-15);
    }
}
