use serde::{Deserialize, Serialize};

use crate::besov_drift::{validate_parameters, BesovParams};
use crate::error::{invalid, Error, Result};
use crate::euler_sim::{PathEnsemble, OVERFLOW_LIMIT};
use crate::stable_kernel::StableLaw;

/// Default window radius in units of `t^(1/alpha)`.
pub const DEFAULT_RADIUS: f64 = 8.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Estimator {
    Histogram,
    Kde,
    /// `E[p(h, y - X_{t-h} - frak b(t-h, X_{t-h}, h))]`, exact given the last grid position.
    Conditional,
}

impl Estimator {
    pub fn tag(&self) -> &'static str {
        match self {
            Estimator::Histogram => "histogram",
            Estimator::Kde => "kde",
            Estimator::Conditional => "conditional",
        }
    }
}

/// Square window `|y - x|_inf <= radius t^(1/alpha)` sampled at `points` nodes per axis (odd, so that `x` is a node).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub radius: f64,
    pub points: usize,
}

impl Window {
    pub fn new(radius: f64, points: usize) -> Self {
        Window { radius, points }
    }

    /// 161 nodes in d = 1, 81 per axis in d = 2.
    pub fn standard(dim: usize) -> Self {
        Window {
            radius: DEFAULT_RADIUS,
            points: if dim == 1 { 161 } else { 81 },
        }
    }
}

/// KDE bandwidth `b = c_b t^(1/alpha) M^(-1/(d+4))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BandwidthRule {
    Scaled { c_b: f64 },
    Fixed(f64),
}

impl Default for BandwidthRule {
    fn default() -> Self {
        BandwidthRule::Scaled { c_b: 1.0 }
    }
}

impl BandwidthRule {
    pub fn bandwidth(&self, alpha: f64, dim: usize, t: f64, paths: usize) -> f64 {
        match *self {
            BandwidthRule::Scaled { c_b } => c_b * t.powf(1.0 / alpha) * (paths as f64).powf(-1.0 / (dim as f64 + 4.0)),
            BandwidthRule::Fixed(b) => b,
        }
    }
}

/// Density of `X^h_t` (or of the reference) on a tensor grid around the start point.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityEstimate {
    pub center: Vec<f64>,
    pub time: f64,
    /// Node coordinates, identical on every axis up to the center shift.
    pub offsets: Vec<f64>,
    /// Row-major values, axis 0 slowest.
    pub values: Vec<f64>,
    /// Zero for histograms and conditional estimates.
    pub bandwidth: f64,
    pub paths: usize,
    pub estimator: Estimator,
    /// Fraction of paths outside the window (or overflowed).
    pub outside_mass: f64,
}

impl DensityEstimate {
    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn spacing(&self) -> f64 {
        self.offsets[1] - self.offsets[0]
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim() as i32)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Coordinates of node `i`.
    pub fn point(&self, i: usize) -> Vec<f64> {
        let n = self.offsets.len();
        match self.dim() {
            1 => vec![self.center[0] + self.offsets[i]],
            _ => vec![self.center[0] + self.offsets[i / n], self.center[1] + self.offsets[i % n]],
        }
    }

    /// Offset `y - x` of node `i`.
    pub fn displacement(&self, i: usize) -> Vec<f64> {
        let p = self.point(i);
        p.iter().zip(&self.center).map(|(a, b)| a - b).collect()
    }

    /// Riemann sum of the values over the window.
    pub fn window_mass(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.cell_volume()
    }

    /// Same center, time and nodes.
    pub fn same_grid(&self, other: &DensityEstimate) -> bool {
        self.center == other.center && (self.time - other.time).abs() <= 1e-12 * self.time.max(1.0) && self.offsets == other.offsets
    }

    /// A zero estimate on the grid of `window`, for estimators that fill values themselves.
    pub fn empty(law: &StableLaw, center: &[f64], t: f64, window: Window, estimator: Estimator, paths: usize) -> Result<Self> {
        let d = check_window(law, center, t, window)?;
        let offsets = offsets(law, t, window);
        Ok(DensityEstimate {
            center: center.to_vec(),
            time: t,
            values: vec![0.0; window.points.pow(d as u32)],
            offsets,
            bandwidth: 0.0,
            paths,
            estimator,
            outside_mass: 0.0,
        })
    }
}

fn check_window(law: &StableLaw, center: &[f64], t: f64, window: Window) -> Result<usize> {
    let d = center.len();
    if d != law.dim() {
        return invalid(format!("center has dimension {d}, law has {}", law.dim()));
    }
    if d >= 3 {
        return Err(Error::Unsupported(format!(
            "density estimates are restricted to d <= 2 (got d = {d}); use test-function errors instead"
        )));
    }
    if !(t > 0.0 && t.is_finite()) {
        return invalid(format!("time must be positive, got {t}"));
    }
    if !(window.radius > 0.0) || window.points < 3 || window.points % 2 == 0 {
        return invalid("window needs a positive radius and an odd number (>= 3) of nodes per axis");
    }
    Ok(d)
}

fn offsets(law: &StableLaw, t: f64, window: Window) -> Vec<f64> {
    let half = window.radius * t.powf(1.0 / law.alpha());
    let n = window.points;
    let dy = 2.0 * half / (n - 1) as f64;
    (0..n).map(|i| -half + i as f64 * dy).collect()
}

/// Positions at time `t` of an ensemble, flattened.
fn positions_at_time(ensemble: &PathEnsemble, t: f64) -> Result<Vec<f64>> {
    match ensemble.time_index(t) {
        Some(q) => Ok(ensemble.positions_at(q)),
        None => invalid(format!("ensemble has no positions at time {t} (query times {:?})", ensemble.times)),
    }
}

/// Histogram or Gaussian KDE of the ensemble positions at time `t`.
pub fn estimate_density(
    ensemble: &PathEnsemble,
    law: &StableLaw,
    center: &[f64],
    t: f64,
    window: Window,
    estimator: Estimator,
    rule: BandwidthRule,
) -> Result<DensityEstimate> {
    if ensemble.dim != law.dim() {
        return invalid("ensemble and law dimensions differ");
    }
    let xs = positions_at_time(ensemble, t)?;
    density_from_samples(&xs, law, center, t, window, estimator, rule)
}

/// Same as [`estimate_density`] from a flat sample array.
pub fn density_from_samples(
    xs: &[f64],
    law: &StableLaw,
    center: &[f64],
    t: f64,
    window: Window,
    estimator: Estimator,
    rule: BandwidthRule,
) -> Result<DensityEstimate> {
    let d = check_window(law, center, t, window)?;
    let m = xs.len() / d;
    if m == 0 || xs.len() % d != 0 {
        return invalid("sample array is empty or ragged");
    }
    let mut est = DensityEstimate::empty(law, center, t, window, estimator, m)?;
    let n = window.points;
    let dy = est.spacing();
    let lo = est.offsets[0] - dy / 2.0;
    let hi = est.offsets[n - 1] + dy / 2.0;
    let rel = |p: &[f64]| -> Option<Vec<f64>> {
        if p.iter().any(|v| !(v.abs() <= OVERFLOW_LIMIT)) {
            return None;
        }
        Some(p.iter().zip(center).map(|(a, b)| a - b).collect())
    };
    let inside = |u: &[f64]| u.iter().all(|v| *v >= lo && *v < hi);
    let outside = xs.chunks(d).filter(|p| rel(p).map(|u| !inside(&u)).unwrap_or(true)).count();
    est.outside_mass = outside as f64 / m as f64;
    match estimator {
        Estimator::Histogram => {
            let w = 1.0 / (m as f64 * est.cell_volume());
            for p in xs.chunks(d) {
                if let Some(u) = rel(p) {
                    if !inside(&u) {
                        continue;
                    }
                    let idx: Vec<usize> = u.iter().map(|v| (((v - lo) / dy) as usize).min(n - 1)).collect();
                    let i = if d == 1 { idx[0] } else { idx[0] * n + idx[1] };
                    est.values[i] += w;
                }
            }
        }
        Estimator::Kde => {
            let b = rule.bandwidth(law.alpha(), d, t, m);
            if !(b > 0.0) {
                return invalid("bandwidth must be positive");
            }
            est.bandwidth = b;
            kde(xs, &mut est, b);
        }
        Estimator::Conditional => {
            return invalid("conditional estimates are built from the scheme, not from samples; use conditional_density");
        }
    }
    Ok(est)
}

/// Binned Gaussian KDE: linear binning onto a grid of spacing at most `min(b/4, dy)`, then a
/// direct truncated convolution at the output nodes.
fn kde(xs: &[f64], est: &mut DensityEstimate, b: f64) {
    let d = est.dim();
    let m = est.paths as f64;
    // bin spacing divides the node spacing so that every node sits on a bin
    let dy = est.spacing();
    let delta = dy / (dy / (b / 4.0)).ceil().max(1.0);
    let pad = (5.0 * b / delta).ceil();
    let reach = pad * delta;
    let lo = est.offsets[0] - reach;
    let span = est.offsets[est.offsets.len() - 1] + reach - lo;
    let nb = (span / delta).round() as usize + 2;
    let mut bins = vec![0.0; nb.pow(d as u32)];
    for p in xs.chunks(d) {
        if p.iter().any(|v| !(v.abs() <= OVERFLOW_LIMIT)) {
            continue;
        }
        let mut cell = [0usize; 2];
        let mut frac = [0.0; 2];
        let mut ok = true;
        for c in 0..d {
            let u = (p[c] - est.center[c] - lo) / delta;
            if !(u >= 0.0 && u < (nb - 1) as f64) {
                ok = false;
                break;
            }
            cell[c] = u as usize;
            frac[c] = u - cell[c] as f64;
        }
        if !ok {
            continue;
        }
        if d == 1 {
            bins[cell[0]] += 1.0 - frac[0];
            bins[cell[0] + 1] += frac[0];
        } else {
            for (di, wi) in [(0, 1.0 - frac[0]), (1, frac[0])] {
                for (dj, wj) in [(0, 1.0 - frac[1]), (1, frac[1])] {
                    bins[(cell[0] + di) * nb + cell[1] + dj] += wi * wj;
                }
            }
        }
    }
    let k = (reach / delta).ceil() as isize;
    let weights: Vec<f64> = (-k..=k)
        .map(|j| {
            let z = j as f64 * delta / b;
            (-0.5 * z * z).exp() / (b * (2.0 * std::f64::consts::PI).sqrt())
        })
        .collect();
    let n = est.offsets.len();
    let node = |o: f64| ((o - lo) / delta).round() as isize;
    let get = |i: isize| -> Option<usize> { (i >= 0 && (i as usize) < nb).then_some(i as usize) };
    if d == 1 {
        for (i, o) in est.offsets.iter().enumerate() {
            let c = node(*o);
            let mut acc = 0.0;
            for (w, j) in weights.iter().zip(-k..=k) {
                if let Some(bi) = get(c + j) {
                    acc += w * bins[bi];
                }
            }
            est.values[i] = acc / m;
        }
    } else {
        // separable: convolve along axis 1 at the node columns, then along axis 0
        let cols: Vec<isize> = est.offsets.iter().map(|o| node(*o)).collect();
        let mut partial = vec![0.0; nb * n];
        for r in 0..nb {
            for (ci, c) in cols.iter().enumerate() {
                let mut acc = 0.0;
                for (w, j) in weights.iter().zip(-k..=k) {
                    if let Some(bj) = get(c + j) {
                        acc += w * bins[r * nb + bj];
                    }
                }
                partial[r * n + ci] = acc;
            }
        }
        for (ri, r) in cols.iter().enumerate() {
            for ci in 0..n {
                let mut acc = 0.0;
                for (w, j) in weights.iter().zip(-k..=k) {
                    if let Some(bi) = get(r + j) {
                        acc += w * partial[bi * n + ci];
                    }
                }
                est.values[ri * n + ci] = acc / m;
            }
        }
    }
}

/// `max_y |G_h(y) - G_ref(y)| / p_alpha(t, y - x)` over the common grid.
pub fn normalized_sup_error(est_h: &DensityEstimate, est_ref: &DensityEstimate, law: &StableLaw) -> Result<f64> {
    if !est_h.same_grid(est_ref) || est_h.len() != est_ref.len() {
        return invalid("density estimates live on different grids");
    }
    let mut worst = 0.0f64;
    for i in 0..est_h.len() {
        let p = law.pdf(est_h.time, &est_h.displacement(i));
        worst = worst.max((est_h.values[i] - est_ref.values[i]).abs() / p);
    }
    Ok(worst)
}

/// Sup and Hölder parts of the normalized quotient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolderQuotient {
    /// `sup_y |G(y)| / pbar(t, y - x)`.
    pub sup_term: f64,
    /// `t^(rho/alpha) sup |G/pbar (y) - G/pbar (y')| / |y - y'|^rho` over pairs with `|y - y'| <= t^(1/alpha)`.
    pub holder_part: f64,
}

impl HolderQuotient {
    pub fn total(&self) -> f64 {
        self.sup_term + self.holder_part
    }
}

/// Normalized Hölder quotient of an estimate relative to the bound kernel.
pub fn holder_quotient(est: &DensityEstimate, law: &StableLaw, rho: f64, besov: &BesovParams) -> Result<HolderQuotient> {
    let gamma = validate_parameters(law.alpha(), law.dim(), besov).gamma;
    let (lo, hi) = (-besov.beta, gamma - besov.beta);
    if !(rho > lo && rho < hi) {
        return invalid(format!("Hölder exponent rho = {rho} outside the admissible interval ({lo}, {hi})"));
    }
    let t = est.time;
    let ratio: Vec<f64> = (0..est.len())
        .map(|i| {
            let u = est.displacement(i);
            est.values[i] / law.bound_radial(t, u.iter().map(|v| v * v).sum::<f64>().sqrt())
        })
        .collect();
    let sup_term = ratio.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let scale = t.powf(1.0 / law.alpha());
    let dy = est.spacing();
    let reach = ((scale / dy).floor() as isize).max(1);
    let n = est.offsets.len() as isize;
    let norm = t.powf(rho / law.alpha());
    let mut holder = 0.0f64;
    let d = est.dim();
    for i in 0..est.len() {
        let (ri, ci) = if d == 1 { (0, i as isize) } else { (i as isize / n, i as isize % n) };
        let rows = if d == 1 { 0..=0 } else { 0..=reach };
        for dr in rows {
            for dc in -reach..=reach {
                if (dr == 0 && dc <= 0) || (dr * dr + dc * dc) as f64 * dy * dy > scale * scale * (1.0 + 1e-12) {
                    continue;
                }
                let (r2, c2) = (ri + dr, ci + dc);
                if r2 >= n || c2 < 0 || c2 >= n {
                    continue;
                }
                let j = if d == 1 { c2 as usize } else { (r2 * n + c2) as usize };
                let dist = ((dr * dr + dc * dc) as f64).sqrt() * dy;
                holder = holder.max(norm * (ratio[i] - ratio[j]).abs() / dist.powf(rho));
            }
        }
    }
    Ok(HolderQuotient {
        sup_term,
        holder_part: holder,
    })
}
