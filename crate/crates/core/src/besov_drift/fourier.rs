//! Periodic grids on the torus `[0, L)^d` (d = 1, 2) and their discrete Fourier transforms.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorusGrid {
    pub dim: usize,
    /// Points per axis.
    pub n: usize,
    pub length: f64,
}

impl TorusGrid {
    pub fn new(dim: usize, n: usize, length: f64) -> Result<Self> {
        if !(dim == 1 || dim == 2) {
            return invalid(format!("torus grids support d = 1, 2, got {dim}"));
        }
        if n < 2 || !(length > 0.0 && length.is_finite()) {
            return invalid("torus grid needs n >= 2 and a positive length");
        }
        Ok(TorusGrid { dim, n, length })
    }

    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.n as f64
    }

    /// Cell volume `dx^d`.
    pub fn cell(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// Signed frequency index along one axis.
    #[inline]
    pub fn signed(&self, i: usize) -> i64 {
        if i <= self.n / 2 {
            i as i64
        } else {
            i as i64 - self.n as i64
        }
    }

    /// Frequency vector `2 pi k / L` of flat index `idx`.
    pub fn xi(&self, idx: usize) -> [f64; 2] {
        let w = 2.0 * std::f64::consts::PI / self.length;
        if self.dim == 1 {
            [w * self.signed(idx) as f64, 0.0]
        } else {
            [w * self.signed(idx / self.n) as f64, w * self.signed(idx % self.n) as f64]
        }
    }

    pub fn xi_norm(&self, idx: usize) -> f64 {
        let x = self.xi(idx);
        (x[0] * x[0] + x[1] * x[1]).sqrt()
    }

    /// Coordinates of grid point `idx`.
    pub fn point(&self, idx: usize) -> [f64; 2] {
        let h = self.spacing();
        if self.dim == 1 {
            [h * idx as f64, 0.0]
        } else {
            [h * (idx / self.n) as f64, h * (idx % self.n) as f64]
        }
    }

    fn transform(&self, data: &mut [Complex64], inverse: bool) {
        let mut planner = FftPlanner::new();
        let fft = if inverse {
            planner.plan_fft_inverse(self.n)
        } else {
            planner.plan_fft_forward(self.n)
        };
        if self.dim == 1 {
            fft.process(data);
            return;
        }
        for row in data.chunks_mut(self.n) {
            fft.process(row);
        }
        let mut col = vec![Complex64::new(0.0, 0.0); self.n];
        for j in 0..self.n {
            for i in 0..self.n {
                col[i] = data[i * self.n + j];
            }
            fft.process(&mut col);
            for i in 0..self.n {
                data[i * self.n + j] = col[i];
            }
        }
    }

    /// Fourier coefficients `f_k = N^-d sum_j f(x_j) exp(-i xi_k . x_j)`.
    pub fn forward(&self, values: &[f64]) -> Vec<Complex64> {
        assert_eq!(values.len(), self.len());
        let mut data: Vec<Complex64> = values.iter().map(|v| Complex64::new(*v, 0.0)).collect();
        self.transform(&mut data, false);
        let s = 1.0 / self.len() as f64;
        data.iter_mut().for_each(|c| *c *= s);
        data
    }

    /// Real part of `sum_k c_k exp(i xi_k . x_j)`.
    pub fn inverse(&self, coeffs: &[Complex64]) -> Vec<f64> {
        assert_eq!(coeffs.len(), self.len());
        let mut data = coeffs.to_vec();
        self.transform(&mut data, true);
        data.iter().map(|c| c.re).collect()
    }
}

/// `L^ell` norm of grid values on the torus (`ell = inf` is the grid maximum).
pub fn lebesgue_norm(grid: &TorusGrid, values: &[f64], ell: f64) -> f64 {
    if ell.is_infinite() {
        return values.iter().fold(0.0, |m, v| m.max(v.abs()));
    }
    let s: f64 = values.iter().map(|v| v.abs().powf(ell)).sum();
    (s * grid.cell()).powf(1.0 / ell)
}
