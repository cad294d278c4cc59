//! Periodic d = 1 lookup table for a fixed semigroup-weighted drift, used by
//! the large Monte-Carlo runs in place of the mode sum.

use num_complex::Complex64;

use super::field::{DriftField, ModeWeights};
use super::fourier::TorusGrid;
use crate::error::{invalid, Result};

pub const DEFAULT_TABLE_POINTS: usize = 1 << 15;

/// Cubic Hermite interpolant of `z -> sum_k c_k m_k e_k(z)` with spectrally exact node slopes.
#[derive(Debug, Clone)]
pub struct DriftTable {
    length: f64,
    inv_dx: f64,
    /// Interleaved `(value, dx * slope)` pairs, one cache line per lookup.
    nodes: Vec<[f64; 2]>,
}

impl DriftTable {
    pub fn new(field: &DriftField, weights: &ModeWeights, points: usize) -> Result<Self> {
        if field.dim() != 1 {
            return invalid("drift tables are one-dimensional");
        }
        let grid = TorusGrid::new(1, points, field.torus_length())?;
        let coeffs = field.grid_coefficients(&grid, weights, 0)?;
        let deriv: Vec<Complex64> = coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c * Complex64::new(0.0, grid.xi(i)[0]))
            .collect();
        let dx = grid.spacing();
        let value = grid.inverse(&coeffs);
        let slope = grid.inverse(&deriv);
        Ok(DriftTable {
            length: grid.length,
            inv_dx: 1.0 / dx,
            nodes: value.iter().zip(&slope).map(|(v, s)| [*v, dx * s]).collect(),
        })
    }

    pub fn points(&self) -> usize {
        self.nodes.len()
    }

    #[inline]
    pub fn eval(&self, z: f64) -> f64 {
        let n = self.nodes.len();
        let u = z * self.inv_dx;
        let fl = u.floor();
        let t = u - fl;
        let i = (fl as i64).rem_euclid(n as i64) as usize;
        let j = if i + 1 == n { 0 } else { i + 1 };
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        let (a, b) = (self.nodes[i], self.nodes[j]);
        h00 * a[0] + h10 * a[1] + h01 * b[0] + h11 * b[1]
    }

    pub fn length(&self) -> f64 {
        self.length
    }
}
