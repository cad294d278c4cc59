use super::estimate::{DensityEstimate, Estimator, Window};
use crate::besov_drift::DriftField;
use crate::error::{invalid, Result};
use crate::euler_sim::{run_levels, SchemeConfig, WeightedDrift};
use crate::stable_kernel::StableLaw;

/// Paths per accumulator block in the streaming estimators.
pub(crate) const STREAM_BLOCK: usize = 1024;

/// Grid index of `t` in `cfg`, which must be a positive grid time.
pub(crate) fn grid_index(cfg: &SchemeConfig, t: f64) -> Result<usize> {
    let u = t / cfg.step();
    let k = u.round();
    if !(t > 0.0 && t <= cfg.horizon * (1.0 + 1e-12)) || (u - k).abs() > 1e-9 * u.max(1.0) || k < 1.0 {
        return invalid(format!("time {t} is not a positive grid time of the step {}", cfg.step()));
    }
    Ok(k as usize)
}

/// Conditional estimate of the scheme density together with per-node standard errors.
#[derive(Debug, Clone)]
pub struct ConditionalDensity {
    pub estimate: DensityEstimate,
    pub stderr: Vec<f64>,
}

/// `G^h(0, x, t, y) = E[p(h, y - X_{t-h} - frak b(t-h, X_{t-h}, h))]` on the window nodes.
/// Given the last grid position the final step is a stable increment plus a
/// deterministic shift, so this estimator has no bandwidth bias.
pub fn conditional_density(field: &DriftField, law: &StableLaw, cfg: &SchemeConfig, t: f64, window: Window) -> Result<ConditionalDensity> {
    let k = grid_index(cfg, t)?;
    let mut est = DensityEstimate::empty(law, &cfg.start, t, window, Estimator::Conditional, cfg.paths)?;
    let h = cfg.step();
    let tk = (k - 1) as f64 * h;
    let shift = WeightedDrift::new(field, field.step_weights(tk, h)?, cfg.drift_eval)?;
    let nodes: Vec<Vec<f64>> = (0..est.len()).map(|i| est.point(i)).collect();
    let d = cfg.dim();
    let ny = nodes.len();
    let blocks = run_levels(
        field,
        law,
        cfg,
        &[cfg.steps],
        STREAM_BLOCK,
        || vec![0.0; 2 * ny],
        |acc, _, paths| {
            let x = paths.at(0, k - 1);
            let mut b = vec![0.0; d];
            shift.eval_into(field, x, &mut b);
            let mut z = vec![0.0; d];
            for (i, y) in nodes.iter().enumerate() {
                for c in 0..d {
                    z[c] = y[c] - x[c] - b[c];
                }
                let v = law.pdf(h, &z);
                acc[i] += v;
                acc[ny + i] += v * v;
            }
        },
    )?;
    let m = cfg.paths as f64;
    let mut sums = vec![0.0; 2 * ny];
    for b in &blocks.blocks {
        for (s, v) in sums.iter_mut().zip(b) {
            *s += v;
        }
    }
    let mut stderr = vec![0.0; ny];
    for i in 0..ny {
        let mean = sums[i] / m;
        est.values[i] = mean;
        let var = (sums[ny + i] / m - mean * mean).max(0.0);
        stderr[i] = (var / (m - 1.0).max(1.0)).sqrt();
    }
    est.outside_mass = (1.0 - est.window_mass()).max(0.0);
    Ok(ConditionalDensity { estimate: est, stderr })
}
