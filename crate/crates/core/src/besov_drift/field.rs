//! Drifts on the torus `[0, L)^d` as finite Fourier series with a piecewise
//! constant time profile, and the exact action of the stable semigroup on them.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::fourier::TorusGrid;
use super::params::BesovParams;
use crate::error::{domain, invalid, Error, Result};
use crate::stable_kernel::StableLaw;

/// How the Fourier coefficients are produced.
#[derive(Debug, Clone, PartialEq)]
pub enum Construction {
    /// `c_k = sigma |k|^-(beta + d/2) (xi + i eta)/sqrt 2` per component, seeded.
    RandomFourier { sigma: f64 },
    /// `b(z) = amplitude cos(2 pi k . z / L)`.
    DeterministicSingleMode { wave: Vec<i64>, amplitude: Vec<f64> },
    /// `b = value`.
    Constant { value: Vec<f64> },
    /// Three low modes along the first axis with `k^-3` decay.
    LipschitzSmooth { amplitude: f64 },
}

impl Construction {
    pub fn tag(&self) -> &'static str {
        match self {
            Construction::RandomFourier { .. } => "random-fourier",
            Construction::DeterministicSingleMode { .. } => "deterministic-single-mode",
            Construction::Constant { .. } => "constant",
            Construction::LipschitzSmooth { .. } => "lipschitz-smooth",
        }
    }

    /// Whether the field is a genuine distribution-type fixture (subject to the cutoff rule).
    pub fn is_distributional(&self) -> bool {
        matches!(self, Construction::RandomFourier { .. })
    }
}

/// Everything needed to regenerate a [`DriftField`].
#[derive(Debug, Clone, PartialEq)]
pub struct DriftSpec {
    pub alpha: f64,
    pub dim: usize,
    pub torus_length: f64,
    pub cutoff: usize,
    pub besov: BesovParams,
    pub seed: u64,
    pub horizon: f64,
    pub time_cells: usize,
    /// Depth `m` of the time profile `1 + m cos(2 pi (j + 1/2) / cells)`; 0 means time-homogeneous.
    pub modulation: f64,
    pub construction: Construction,
}

impl DriftSpec {
    /// Time-homogeneous spec with the given construction and defaults for the rest.
    pub fn new(alpha: f64, dim: usize, torus_length: f64, besov: BesovParams, construction: Construction) -> Self {
        DriftSpec {
            alpha,
            dim,
            torus_length,
            cutoff: if dim == 1 { 256 } else { 64 },
            besov,
            seed: 0,
            horizon: 1.0,
            time_cells: 64,
            modulation: 0.0,
            construction,
        }
    }

    pub fn zero(alpha: f64, dim: usize) -> Self {
        Self::new(
            alpha,
            dim,
            2.0 * PI,
            BesovParams::sup_norm(-0.1),
            Construction::Constant { value: vec![0.0; dim] },
        )
    }
}

/// Real per-mode multipliers applied to the coefficients: `b = c_0 m_0 + 2 Re sum c_k m_k e_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeWeights {
    pub mean: f64,
    pub modes: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct DriftField {
    spec: DriftSpec,
    waves: Vec<[i64; 3]>,
    lambda: Vec<f64>,
    /// Mode-major complex coefficients, `dim` per mode.
    coeff: Vec<Complex64>,
    mean: Vec<f64>,
    cell_weight: Vec<f64>,
    max_index: i64,
}

fn half_space(k: &[i64]) -> bool {
    for v in k {
        if *v != 0 {
            return *v > 0;
        }
    }
    false
}

fn enumerate_modes(dim: usize, cutoff: usize) -> Vec<[i64; 3]> {
    let k = cutoff as i64;
    let k2 = k * k;
    let mut out = Vec::new();
    let r = |d: usize| if d < dim { -k..=k } else { 0..=0 };
    for a in r(0) {
        for b in r(1) {
            for c in r(2) {
                let w = [a, b, c];
                if a * a + b * b + c * c <= k2 && half_space(&w[..dim]) {
                    out.push(w);
                }
            }
        }
    }
    out
}

impl DriftField {
    pub fn new(spec: DriftSpec) -> Result<Self> {
        let d = spec.dim;
        if !(1..=3).contains(&d) {
            return invalid(format!("drift dimension must be 1, 2 or 3, got {d}"));
        }
        if !(spec.torus_length > 0.0 && spec.torus_length.is_finite()) {
            return invalid("torus length must be positive and finite");
        }
        if !(spec.horizon > 0.0 && spec.horizon.is_finite()) {
            return invalid("horizon must be positive");
        }
        if spec.time_cells == 0 {
            return invalid("need at least one time cell");
        }
        if !(spec.modulation.abs() < 1.0) {
            return invalid("time modulation depth must lie in (-1, 1)");
        }
        if !(spec.alpha > 0.0 && spec.alpha <= 2.0) {
            return invalid(format!("alpha must lie in (0, 2], got {}", spec.alpha));
        }
        let mut waves = Vec::new();
        let mut coeff = Vec::new();
        let mut mean = vec![0.0; d];
        match &spec.construction {
            Construction::RandomFourier { sigma } => {
                if spec.cutoff == 0 {
                    return invalid("random-fourier drift needs a positive cutoff");
                }
                let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
                let expo = spec.besov.beta + d as f64 / 2.0;
                for w in enumerate_modes(d, spec.cutoff) {
                    let norm = ((w[0] * w[0] + w[1] * w[1] + w[2] * w[2]) as f64).sqrt();
                    let amp = sigma * norm.powf(-expo) / std::f64::consts::SQRT_2;
                    for _ in 0..d {
                        let re: f64 = StandardNormal.sample(&mut rng);
                        let im: f64 = StandardNormal.sample(&mut rng);
                        coeff.push(Complex64::new(amp * re, amp * im));
                    }
                    waves.push(w);
                }
            }
            Construction::DeterministicSingleMode { wave, amplitude } => {
                if wave.len() != d || amplitude.len() != d {
                    return invalid("single-mode wave and amplitude must have the drift dimension");
                }
                let mut w = [0i64; 3];
                w[..d].copy_from_slice(wave);
                let sign = if half_space(&w[..d]) {
                    1
                } else if w.iter().all(|v| *v == 0) {
                    0
                } else {
                    -1
                };
                if sign == 0 {
                    mean.copy_from_slice(amplitude);
                } else {
                    // cos is even, so the mirrored wave carries the same coefficient
                    for v in w.iter_mut() {
                        *v *= sign;
                    }
                    waves.push(w);
                    coeff.extend(amplitude.iter().map(|a| Complex64::new(a / 2.0, 0.0)));
                }
            }
            Construction::Constant { value } => {
                if value.len() != d {
                    return invalid("constant drift must have the drift dimension");
                }
                mean.copy_from_slice(value);
            }
            Construction::LipschitzSmooth { amplitude } => {
                for k in 1..=3i64 {
                    waves.push([k, 0, 0]);
                    let c = Complex64::from_polar(amplitude / (2.0 * (k * k * k) as f64), PI * k as f64 / 4.0);
                    for _ in 0..d {
                        coeff.push(c / (d as f64).sqrt());
                    }
                }
            }
        }
        let base = 2.0 * PI / spec.torus_length;
        let lambda = waves
            .iter()
            .map(|w| (base * ((w[0] * w[0] + w[1] * w[1] + w[2] * w[2]) as f64).sqrt()).powf(spec.alpha))
            .collect();
        let cells = spec.time_cells;
        let cell_weight = (0..cells)
            .map(|j| 1.0 + spec.modulation * (2.0 * PI * (j as f64 + 0.5) / cells as f64).cos())
            .collect();
        let max_index = waves.iter().flat_map(|w| w.iter().map(|v| v.abs())).max().unwrap_or(0);
        Ok(DriftField {
            spec,
            waves,
            lambda,
            coeff,
            mean,
            cell_weight,
            max_index,
        })
    }

    pub fn spec(&self) -> &DriftSpec {
        &self.spec
    }
    pub fn dim(&self) -> usize {
        self.spec.dim
    }
    pub fn horizon(&self) -> f64 {
        self.spec.horizon
    }
    pub fn torus_length(&self) -> f64 {
        self.spec.torus_length
    }
    pub fn besov(&self) -> &BesovParams {
        &self.spec.besov
    }
    pub fn mode_count(&self) -> usize {
        self.waves.len()
    }
    pub fn waves(&self) -> &[[i64; 3]] {
        &self.waves
    }
    /// Semigroup exponents `|2 pi k / L|^alpha` of the stored modes.
    pub fn lambdas(&self) -> &[f64] {
        &self.lambda
    }
    pub fn is_zero(&self) -> bool {
        self.mean.iter().all(|v| *v == 0.0) && self.coeff.iter().all(|c| c.norm_sqr() == 0.0)
    }
    pub fn is_constant(&self) -> bool {
        self.waves.is_empty()
    }
    pub fn is_time_homogeneous(&self) -> bool {
        self.spec.modulation == 0.0 || self.spec.time_cells == 1
    }

    /// Coefficient vector of wave `k` in time cell `cell`; `c_{-k} = conj(c_k)`.
    pub fn coefficient(&self, k: &[i64], cell: usize) -> Option<Vec<Complex64>> {
        let d = self.dim();
        if k.len() != d || cell >= self.spec.time_cells {
            return None;
        }
        let w = self.cell_weight[cell];
        if k.iter().all(|v| *v == 0) {
            return Some(self.mean.iter().map(|m| Complex64::new(m * w, 0.0)).collect());
        }
        let conj = !half_space(k);
        let mut key = [0i64; 3];
        for (i, v) in k.iter().enumerate() {
            key[i] = if conj { -v } else { *v };
        }
        let pos = self.waves.iter().position(|x| *x == key)?;
        Some(
            self.coeff[pos * d..(pos + 1) * d]
                .iter()
                .map(|c| if conj { c.conj() * w } else { c * w })
                .collect(),
        )
    }

    /// Time cell containing `s` (right-continuous; `s = T` belongs to the last cell).
    pub fn cell_index(&self, s: f64) -> usize {
        let cells = self.spec.time_cells;
        let j = (s / self.spec.horizon * cells as f64).floor();
        if j < 0.0 {
            0
        } else {
            (j as usize).min(cells - 1)
        }
    }

    fn cell_start(&self, j: usize) -> f64 {
        self.spec.horizon * j as f64 / self.spec.time_cells as f64
    }

    pub fn check_law(&self, law: &StableLaw) -> Result<()> {
        if law.alpha() != self.spec.alpha || law.dim() != self.spec.dim {
            return invalid(format!(
                "drift was built for (alpha={}, d={}) but the law has (alpha={}, d={})",
                self.spec.alpha,
                self.spec.dim,
                law.alpha(),
                law.dim()
            ));
        }
        Ok(())
    }

    /// Multipliers of `P_{s - tau} b(s, .)`.
    pub fn mollified_weights(&self, s: f64, tau: f64) -> Result<ModeWeights> {
        let t = self.spec.horizon;
        if !(tau >= 0.0 && s <= t * (1.0 + 1e-12) && s >= tau) {
            return domain(format!("need 0 <= tau <= s <= T, got tau={tau}, s={s}, T={t}"));
        }
        if s == tau && self.spec.besov.beta < 0.0 && !self.is_constant() {
            return domain("drift undefined pointwise at zero mollification");
        }
        let w = self.cell_weight[self.cell_index(s)];
        let u = s - tau;
        Ok(ModeWeights {
            mean: w,
            modes: self.lambda.iter().map(|l| w * (-u * l).exp()).collect(),
        })
    }

    /// Multipliers of the integrated step drift `int_{t}^{t+h} P_{u-t} b(u, .) du`.
    pub fn step_weights(&self, t_start: f64, h: f64) -> Result<ModeWeights> {
        let t = self.spec.horizon;
        if !(h >= 0.0 && t_start >= 0.0 && t_start + h <= t * (1.0 + 1e-12)) {
            return domain(format!(
                "integration range [{t_start}, {}] outside [0, {t}]",
                t_start + h
            ));
        }
        let mut out = ModeWeights {
            mean: 0.0,
            modes: vec![0.0; self.lambda.len()],
        };
        if h == 0.0 {
            return Ok(out);
        }
        let first = self.cell_index(t_start);
        let last = self.cell_index(t_start + h);
        let single = self.is_time_homogeneous() || first == last || (last == first + 1 && self.cell_start(last) >= t_start + h);
        let pieces: Vec<(f64, f64, f64)> = if single {
            vec![(0.0, h, self.cell_weight[first])]
        } else {
            let mut v = Vec::new();
            for j in first..=last {
                let a = (self.cell_start(j) - t_start).max(0.0);
                let b = if j == last { h } else { (self.cell_start(j + 1) - t_start).min(h) };
                if b > a {
                    v.push((a, b, self.cell_weight[j]));
                }
            }
            v
        };
        for (a, b, w) in pieces {
            out.mean += w * (b - a);
            for (m, l) in out.modes.iter_mut().zip(&self.lambda) {
                // (e^{-l a} - e^{-l b}) / l, stable for small l (b - a)
                *m += w * (-l * a).exp() * (-(-l * (b - a)).exp_m1()) / l;
            }
        }
        Ok(out)
    }

    /// Evaluate `c_0 m_0 + 2 Re sum_k c_k m_k exp(i omega_k . z)` into `out`.
    pub fn eval_weights(&self, w: &ModeWeights, z: &[f64], out: &mut [f64]) {
        let d = self.dim();
        for (o, m) in out.iter_mut().zip(&self.mean) {
            *o = m * w.mean;
        }
        if self.waves.is_empty() {
            return;
        }
        let mut acc = [Complex64::new(0.0, 0.0); 3];
        if d == 1 {
            let base = 2.0 * PI / self.spec.torus_length;
            let step = Complex64::from_polar(1.0, base * z[0]);
            let mut phase = Complex64::new(1.0, 0.0);
            let mut k_prev = 0i64;
            for (i, wv) in self.waves.iter().enumerate() {
                let k = wv[0];
                if k == k_prev + 1 {
                    phase *= step;
                } else {
                    phase = Complex64::from_polar(1.0, base * k as f64 * z[0]);
                }
                k_prev = k;
                acc[0] += self.coeff[i] * (w.modes[i] * phase);
            }
        } else {
            let base = 2.0 * PI / self.spec.torus_length;
            let kmax = self.max_index as usize;
            let mut powers = vec![Complex64::new(1.0, 0.0); d * (kmax + 1)];
            for j in 0..d {
                let step = Complex64::from_polar(1.0, base * z[j]);
                for m in 1..=kmax {
                    powers[j * (kmax + 1) + m] = powers[j * (kmax + 1) + m - 1] * step;
                }
            }
            for (i, wv) in self.waves.iter().enumerate() {
                let mut phase = Complex64::new(w.modes[i], 0.0);
                for j in 0..d {
                    let k = wv[j];
                    let p = powers[j * (kmax + 1) + k.unsigned_abs() as usize];
                    phase *= if k >= 0 { p } else { p.conj() };
                }
                for c in 0..d {
                    acc[c] += self.coeff[i * d + c] * phase;
                }
            }
        }
        for c in 0..d {
            out[c] += 2.0 * acc[c].re;
        }
    }

    /// `frak b_h(s, z) = P_{s - tau} b(s, .)(z)`.
    pub fn mollified_drift(&self, law: &StableLaw, s: f64, tau: f64, z: &[f64]) -> Result<Vec<f64>> {
        self.check_law(law)?;
        self.check_point(z)?;
        let w = self.mollified_weights(s, tau)?;
        let mut out = vec![0.0; self.dim()];
        self.eval_weights(&w, z, &mut out);
        Ok(out)
    }

    /// `frak b(t, z, h) = int_t^{t+h} P_{u - t} b(u, .)(z) du`.
    pub fn integrated_step_drift(&self, law: &StableLaw, t_start: f64, h: f64, z: &[f64]) -> Result<Vec<f64>> {
        self.check_law(law)?;
        self.check_point(z)?;
        let w = self.step_weights(t_start, h)?;
        let mut out = vec![0.0; self.dim()];
        self.eval_weights(&w, z, &mut out);
        Ok(out)
    }

    fn check_point(&self, z: &[f64]) -> Result<()> {
        if z.len() != self.dim() {
            return invalid(format!("point has dimension {}, drift has {}", z.len(), self.dim()));
        }
        if z.iter().any(|v| !v.is_finite()) {
            return invalid("point has non-finite coordinates");
        }
        Ok(())
    }

    /// Smallest step for which the cutoff rule `K > h^(-1/alpha) L / (2 pi)` holds.
    pub fn min_admissible_step(&self) -> f64 {
        if !self.spec.construction.is_distributional() {
            return 0.0;
        }
        let k = self.spec.cutoff as f64;
        (2.0 * PI * k / self.spec.torus_length).powf(-self.spec.alpha)
    }

    /// Configuration-time check of the cutoff rule for the smallest step in use.
    pub fn check_cutoff(&self, h_min: f64) -> Result<()> {
        if self.spec.construction.is_distributional() {
            let need = h_min.powf(-1.0 / self.spec.alpha) * self.spec.torus_length / (2.0 * PI);
            if !(self.spec.cutoff as f64 > need) {
                return Err(Error::Configuration(format!(
                    "frequency cutoff K = {} must exceed h_min^(-1/alpha) L / (2 pi) = {need:.1} for h_min = {h_min:e}",
                    self.spec.cutoff
                )));
            }
        }
        Ok(())
    }

    /// Fourier coefficients of component `c` of `weights`-multiplied field on a torus grid.
    /// The grid must have the drift's length and resolve every mode.
    pub fn grid_coefficients(&self, grid: &TorusGrid, weights: &ModeWeights, c: usize) -> Result<Vec<Complex64>> {
        let d = self.dim();
        if grid.dim != d || (grid.length - self.spec.torus_length).abs() > 1e-12 * grid.length {
            return invalid("grid must match the drift's dimension and torus length");
        }
        if 2 * self.max_index as usize >= grid.n {
            return invalid(format!(
                "grid with {} points per axis cannot resolve wave index {}",
                grid.n, self.max_index
            ));
        }
        let n = grid.n as i64;
        let idx = |w: &[i64]| -> usize {
            let wrap = |k: i64| k.rem_euclid(n) as usize;
            if d == 1 {
                wrap(w[0])
            } else {
                wrap(w[0]) * grid.n + wrap(w[1])
            }
        };
        let mut out = vec![Complex64::new(0.0, 0.0); grid.len()];
        out[0] = Complex64::new(self.mean[c] * weights.mean, 0.0);
        for (i, w) in self.waves.iter().enumerate() {
            let v = self.coeff[i * d + c] * weights.modes[i];
            let neg: Vec<i64> = w[..d].iter().map(|k| -k).collect();
            out[idx(&w[..d])] += v;
            out[idx(&neg)] += v.conj();
        }
        Ok(out)
    }

    /// Samples of component `c` on the grid.
    pub fn grid_values(&self, grid: &TorusGrid, weights: &ModeWeights, c: usize) -> Result<Vec<f64>> {
        Ok(grid.inverse(&self.grid_coefficients(grid, weights, c)?))
    }

    /// Raw time-`s` section `b(s, .)` multipliers (only meaningful through a semigroup factor).
    pub fn section_weights(&self, s: f64, smoothing: f64) -> Result<ModeWeights> {
        if !(smoothing >= 0.0) {
            return domain("smoothing time must be nonnegative");
        }
        let w = self.cell_weight[self.cell_index(s)];
        Ok(ModeWeights {
            mean: w,
            modes: self.lambda.iter().map(|l| w * (-smoothing * l).exp()).collect(),
        })
    }
}
