use super::field::DriftField;
use super::params::recip;
use crate::error::{domain, invalid, Result};
use crate::stable_kernel::StableLaw;

/// Pairs `(z, z + delta e_j)` over base points, log-spaced separations and the axis directions.
#[derive(Debug, Clone)]
pub struct PairGrid {
    pub base: Vec<Vec<f64>>,
    pub separations: Vec<f64>,
    /// Polish the best pair by golden-section search in (midpoint, separation).
    pub refine: bool,
}

impl PairGrid {
    /// `n_base` points spread over one torus period and `n_sep` separations in `[min_sep, max_sep]`.
    pub fn standard(dim: usize, torus_length: f64, n_base: usize, n_sep: usize, min_sep: f64, max_sep: f64) -> Self {
        let base = (0..n_base)
            .map(|i| {
                // Weyl sequence so that d = 2, 3 bases fill the torus
                (0..dim)
                    .map(|j| {
                        let g = [0.0, 0.754877666246693, 0.569840290998053][j];
                        let u = if j == 0 { i as f64 / n_base as f64 } else { (i as f64 * g).fract() };
                        u * torus_length
                    })
                    .collect()
            })
            .collect();
        let separations = if n_sep == 1 {
            vec![min_sep]
        } else {
            (0..n_sep)
                .map(|k| min_sep * (max_sep / min_sep).powf(k as f64 / (n_sep - 1) as f64))
                .collect()
        };
        PairGrid {
            base,
            separations,
            refine: true,
        }
    }
}

/// Supremum over the pair grid of `|F(z) - F(z')| / |z - z'|^zeta`, where
/// `F = int_tau^s frak b_h(u, .) du` with `tau` the frozen grid time.
pub fn holder_modulus_integrated(drift: &DriftField, law: &StableLaw, tau: f64, s: f64, zeta: f64, pairs: &PairGrid) -> Result<f64> {
    drift.check_law(law)?;
    let b = drift.besov();
    let d = drift.dim() as f64;
    let hi = law.alpha() - 1.0 + b.beta - d * recip(b.p) - law.alpha() * recip(b.r);
    if !(zeta >= -b.beta && zeta < hi) {
        return domain(format!("Hölder exponent must lie in [{}, {hi}), got {zeta}", -b.beta));
    }
    if pairs.base.is_empty() || pairs.separations.is_empty() {
        return invalid("empty pair grid");
    }
    if pairs.base.iter().any(|z| z.len() != drift.dim()) || pairs.separations.iter().any(|h| !(*h > 0.0)) {
        return invalid("pair grid points must match the drift dimension and separations must be positive");
    }
    let w = drift.step_weights(tau, s - tau)?;
    let dim = drift.dim();
    let mut fa = vec![0.0; dim];
    let mut fb = vec![0.0; dim];
    let mut zb = vec![0.0; dim];
    let mut quotient = |z: &[f64], axis: usize, delta: f64| -> f64 {
        drift.eval_weights(&w, z, &mut fa);
        zb.copy_from_slice(z);
        zb[axis] += delta;
        drift.eval_weights(&w, &zb, &mut fb);
        let diff: f64 = fa.iter().zip(&fb).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        diff / delta.powf(zeta)
    };
    let mut best = (0.0, 0usize, 0usize, 0.0);
    for (bi, z) in pairs.base.iter().enumerate() {
        for axis in 0..dim {
            for &delta in &pairs.separations {
                let q = quotient(z, axis, delta);
                if q > best.0 {
                    best = (q, bi, axis, delta);
                }
            }
        }
    }
    if !pairs.refine || best.0 == 0.0 {
        return Ok(best.0);
    }
    // refine in (midpoint, separation) coordinates, which decouple for smooth fields
    let (mut value, bi, axis, mut delta) = best;
    let mut mid = pairs.base[bi].clone();
    mid[axis] += delta / 2.0;
    let span = if pairs.base.len() > 1 {
        drift.torus_length() / pairs.base.len() as f64
    } else {
        drift.torus_length() / 8.0
    };
    let ratio = if pairs.separations.len() > 1 {
        (pairs.separations[1] / pairs.separations[0]).max(1.0 + 1e-6)
    } else {
        2.0
    };
    let mut at = |m: &[f64], d: f64| {
        let mut p = m.to_vec();
        p[axis] -= d / 2.0;
        quotient(&p, axis, d)
    };
    for _ in 0..6 {
        let m0 = mid[axis];
        let (mx, vm) = golden_max(
            |x| {
                let mut p = mid.clone();
                p[axis] = x;
                at(&p, delta)
            },
            m0 - span,
            m0 + span,
        );
        if vm > value {
            value = vm;
            mid[axis] = mx;
        }
        let (lx, vd) = golden_max(|x| at(&mid, x.exp()), (delta / ratio).ln(), (delta * ratio).ln());
        if vd > value {
            value = vd;
            delta = lx.exp();
        }
    }
    Ok(value)
}

/// Golden-section maximization; returns the best point seen.
pub(crate) fn golden_max<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..80 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
        if (b - a).abs() < 1e-14 * (1.0 + a.abs()) {
            break;
        }
    }
    if fc > fd {
        (c, fc)
    } else {
        (d, fd)
    }
}
