use rayon::prelude::*;

use super::conditional::grid_index;
use super::estimate::{estimate_density, BandwidthRule, Estimator, Window};
use crate::besov_drift::{to_manifest, DriftField};
use crate::error::{invalid, Result};
use crate::euler_sim::{DriftCache, PathEnsemble};
use crate::numerics::gauss_legendre;
use crate::stable_kernel::StableLaw;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DuhamelOptions {
    /// Gauss-Legendre nodes per scheme step (at least 8).
    pub nodes: usize,
    pub window: Window,
    pub bandwidth: BandwidthRule,
}

impl Default for DuhamelOptions {
    fn default() -> Self {
        DuhamelOptions {
            nodes: 8,
            window: Window::new(8.0, 65),
            bandwidth: BandwidthRule::default(),
        }
    }
}

/// Right side of the scheme's Duhamel representation against a KDE of the left side.
#[derive(Debug, Clone)]
pub struct DuhamelResidual {
    pub points: Vec<Vec<f64>>,
    /// KDE of `G^h(0, x, t, .)`.
    pub lhs: Vec<f64>,
    /// `p(t, y - x) - int_0^t E[frak b_h(r, X_tau) . grad p(t - r, y - X_r)] dr`.
    pub rhs: Vec<f64>,
    /// `(rhs - lhs) / p(t, 0)`.
    pub residual: Vec<f64>,
    pub sup: f64,
    /// Root mean square of the normalized residual over the nodes.
    pub l2: f64,
    /// Normalization `sup_y p(t, y - x) = p(t, 0)`.
    pub scale: f64,
    /// Largest KDE standard deviation over the nodes, normalized the same way.
    pub kde_noise: f64,
}

/// Per-node quadrature data of one scheme step.
struct Node {
    weight: f64,
    /// Evaluator of `frak b_h(s, .)`.
    drift: usize,
    /// Evaluator of `frak b(t_i, ., s - t_i)`.
    shift: usize,
}

/// Evaluate the Duhamel identity of the scheme at time `t` on the window nodes.
/// Conditioning on `X_{t_i}` replaces `grad p(t - r, y - X_r)` by
/// `grad p(t - t_i, y - X_{t_i} - frak b(t_i, X_{t_i}, r - t_i))`, so only grid positions are needed.
pub fn duhamel_residual(
    ensemble: &PathEnsemble,
    field: &DriftField,
    law: &StableLaw,
    t: f64,
    opts: DuhamelOptions,
) -> Result<DuhamelResidual> {
    let cfg = &ensemble.provenance.config;
    if ensemble.trajectories.is_none() {
        return invalid("the Duhamel residual needs an ensemble with retained trajectories");
    }
    if ensemble.provenance.drift_manifest != to_manifest(field.spec()) {
        return invalid("the ensemble was simulated with a different drift");
    }
    if opts.nodes < 8 {
        return invalid(format!("need at least 8 quadrature nodes per step, got {}", opts.nodes));
    }
    let k = grid_index(cfg, t)?;
    let x = &cfg.start;
    let d = x.len();
    let lhs_est = estimate_density(ensemble, law, x, t, opts.window, Estimator::Kde, opts.bandwidth)?;
    let points: Vec<Vec<f64>> = (0..lhs_est.len()).map(|i| lhs_est.point(i)).collect();
    let ny = points.len();
    let h = cfg.step();
    let (gx, gw) = gauss_legendre(opts.nodes);
    let mut cache = DriftCache::default();
    let mut steps: Vec<Vec<Node>> = Vec::with_capacity(k);
    if !field.is_zero() {
        for i in 0..k {
            let ti = i as f64 * h;
            let mut nodes = Vec::with_capacity(opts.nodes);
            for (u, w) in gx.iter().zip(&gw) {
                let r = (u + 1.0) / 2.0;
                let s = ti + r * h;
                nodes.push(Node {
                    weight: w * h / 2.0,
                    drift: cache.intern(field, field.mollified_weights(s, ti)?, cfg.drift_eval)?,
                    shift: cache.intern(field, field.step_weights(ti, s - ti)?, cfg.drift_eval)?,
                });
            }
            steps.push(nodes);
        }
    }
    let chunk = 4096;
    let partial: Vec<Vec<f64>> = (0..ensemble.paths.div_ceil(chunk))
        .into_par_iter()
        .map(|c| {
            let mut acc = vec![0.0; ny];
            let mut b = vec![0.0; d];
            let mut sh = vec![0.0; d];
            let mut z = vec![0.0; d];
            let mut g = vec![0.0; d];
            for path in c * chunk..((c + 1) * chunk).min(ensemble.paths) {
                for (i, nodes) in steps.iter().enumerate() {
                    let xi = ensemble.grid_position(path, i).expect("trajectories present");
                    let lag = t - i as f64 * h;
                    for nd in nodes {
                        cache.get(nd.drift).eval_into(field, xi, &mut b);
                        cache.get(nd.shift).eval_into(field, xi, &mut sh);
                        for (y, a) in points.iter().zip(acc.iter_mut()) {
                            for c in 0..d {
                                z[c] = y[c] - xi[c] - sh[c];
                            }
                            let dot = if d == 1 {
                                law.pdf_and_derivative_1d(lag, z[0]).1 * b[0]
                            } else {
                                law.grad_pdf(lag, &z, &mut g);
                                g.iter().zip(&b).map(|(u, v)| u * v).sum()
                            };
                            *a += nd.weight * dot;
                        }
                    }
                }
            }
            acc
        })
        .collect();
    let m = ensemble.paths as f64;
    let mut integral = vec![0.0; ny];
    for p in &partial {
        for (s, v) in integral.iter_mut().zip(p) {
            *s += v;
        }
    }
    let mut rel = vec![0.0; d];
    let rhs: Vec<f64> = points
        .iter()
        .zip(&integral)
        .map(|(y, int)| {
            for c in 0..d {
                rel[c] = y[c] - x[c];
            }
            law.pdf(t, &rel) - int / m
        })
        .collect();
    let scale = law.pdf(t, &vec![0.0; d]);
    let residual: Vec<f64> = rhs.iter().zip(&lhs_est.values).map(|(r, l)| (r - l) / scale).collect();
    let sup = residual.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let l2 = (residual.iter().map(|v| v * v).sum::<f64>() / ny as f64).sqrt();
    let b = lhs_est.bandwidth;
    let roughness = (2.0 * std::f64::consts::PI.sqrt() * b).powi(d as i32);
    let kde_noise = lhs_est
        .values
        .iter()
        .map(|v| (v.max(0.0) / (m * roughness)).sqrt() / scale)
        .fold(0.0f64, f64::max);
    Ok(DuhamelResidual {
        points,
        lhs: lhs_est.values,
        rhs,
        residual,
        sup,
        l2,
        scale,
        kde_noise,
    })
}
