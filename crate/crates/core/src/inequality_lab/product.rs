use crate::besov_drift::{thermic_norm, BesovParams, TorusGrid};
use crate::error::{invalid, Error, Result};
use crate::stable_kernel::StableLaw;

/// Largest coefficient in the top half of the spectrum relative to the largest one.
pub const DAMPING_LIMIT: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductCheck {
    /// Thermic `B^-beta_{p',q'}` norm of `pbar(s, x - .) grad^k p(t - s, y - .)`.
    pub lhs: f64,
    /// Right side of the estimate with constant 1.
    pub rhs: f64,
    pub ratio: f64,
    /// Damping measure of the grid spectrum, at most [`DAMPING_LIMIT`].
    pub top_mode: f64,
}

/// Grid used by [`product_norm_spot_check`]: period and points per axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductGrid {
    /// Period in units of `t^(1/alpha)`; widened further when `|x - y|` is large.
    pub periods: f64,
    pub points: usize,
}

impl ProductGrid {
    pub fn standard(dim: usize) -> Self {
        if dim == 1 {
            ProductGrid { periods: 32.0, points: 1 << 15 }
        } else {
            ProductGrid { periods: 32.0, points: 512 }
        }
    }
}

/// `B^-beta_{p',q'}` norm of the product of the bound kernel at time `s` and the
/// `k`-th derivative of the stable density at time `t - s`, against its bound.
/// For `k = 1` the largest component norm is used.
#[allow(clippy::too_many_arguments)]
pub fn product_norm_spot_check(
    law: &StableLaw,
    besov: &BesovParams,
    s: f64,
    t: f64,
    x: &[f64],
    y: &[f64],
    k: usize,
    zeta: f64,
    grid: ProductGrid,
) -> Result<ProductCheck> {
    let dim = law.dim();
    let alpha = law.alpha();
    let beta = besov.beta;
    if !(0.0 < s && s < t) {
        return invalid(format!("need 0 < s < t, got s = {s}, t = {t}"));
    }
    if !(zeta > -beta && zeta <= 1.0) {
        return invalid(format!("zeta = {zeta} outside (-beta, 1] = ({}, 1]", -beta));
    }
    if k > 1 {
        return invalid(format!("derivative order k must be 0 or 1, got {k}"));
    }
    if x.len() != dim || y.len() != dim {
        return invalid("x and y must match the law dimension");
    }
    if !(beta < 0.0) {
        return invalid("the estimate is stated for beta < 0");
    }
    let scale = t.powf(1.0 / alpha);
    let sep: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    let length = (grid.periods * scale).max(4.0 * sep + grid.periods / 2.0 * scale);
    let g = TorusGrid::new(dim, grid.points, length)?;
    let center: Vec<f64> = x.iter().zip(y).map(|(a, b)| (a + b) / 2.0 - length / 2.0).collect();
    let mut components: Vec<Vec<f64>> = vec![Vec::with_capacity(g.len()); if k == 0 { 1 } else { dim }];
    let mut grad = vec![0.0; dim];
    let mut zx = vec![0.0; dim];
    let mut zy = vec![0.0; dim];
    for idx in 0..g.len() {
        let pt = g.point(idx);
        for c in 0..dim {
            let z = pt[c] + center[c];
            zx[c] = x[c] - z;
            zy[c] = y[c] - z;
        }
        let r = zx.iter().map(|v| v * v).sum::<f64>().sqrt();
        let pbar = law.bound_radial(s, r);
        if k == 0 {
            components[0].push(pbar * law.pdf(t - s, &zy));
        } else {
            law.grad_pdf(t - s, &zy, &mut grad);
            for c in 0..dim {
                components[c].push(pbar * grad[c]);
            }
        }
    }
    let mut lhs = 0.0f64;
    let mut top_mode = 0.0f64;
    for vals in &components {
        let coeffs = g.forward(vals);
        let peak = coeffs.iter().map(|c| c.norm()).fold(0.0f64, f64::max);
        if peak == 0.0 {
            continue;
        }
        let high = coeffs
            .iter()
            .enumerate()
            .filter(|(i, _)| {
                let axis = |j: usize| g.signed(j).unsigned_abs() as usize > g.n / 4;
                if dim == 1 {
                    axis(*i)
                } else {
                    axis(i / g.n) || axis(i % g.n)
                }
            })
            .map(|(_, c)| c.norm())
            .fold(0.0f64, f64::max);
        top_mode = top_mode.max(high / peak);
        lhs = lhs.max(thermic_norm(&g, vals, -beta, besov.p_conj(), besov.q_conj(), alpha)?);
    }
    if top_mode > DAMPING_LIMIT {
        return Err(Error::Configuration(format!(
            "grid of {} points per axis on a period {length:.3} underresolves the product: top-half spectrum at {top_mode:.2e} of the peak (limit {DAMPING_LIMIT:e})",
            grid.points
        )));
    }
    let d = dim as f64;
    let ip = if besov.p.is_infinite() { 0.0 } else { 1.0 / besov.p };
    let e = d * ip / alpha;
    let u = t - s;
    let rhs = law.bound_radial(t, sep) / u.powf(k as f64 / alpha)
        * t.powf(beta / alpha)
        * (s.powf(-e) + u.powf(-e))
        * ((t / s).powf(zeta / alpha) + (t / u).powf(zeta / alpha));
    Ok(ProductCheck {
        lhs,
        rhs,
        ratio: lhs / rhs,
        top_mode,
    })
}
