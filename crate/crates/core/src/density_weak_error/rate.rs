use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::plot::loglog_svg;
use crate::besov_drift::{validate_parameters, DriftField};
use crate::error::{invalid, Result};
use crate::euler_sim::{run_levels, SchemeConfig};
use crate::numerics::fit_power_law;
use crate::stable_kernel::StableLaw;

/// Bounded test functions for weak errors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum TestFunction {
    /// Indicator of the closed ball.
    Ball { center: Vec<f64>, radius: f64 },
    /// `cos <lambda, y>`.
    Cosine { lambda: Vec<f64> },
    /// `clamp((<u, y> - lo) / (hi - lo), 0, 1)`.
    Ramp { direction: Vec<f64>, lo: f64, hi: f64 },
}

impl TestFunction {
    #[inline]
    pub fn eval(&self, y: &[f64]) -> f64 {
        match self {
            TestFunction::Ball { center, radius } => {
                let r2: f64 = y.iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum();
                if r2 <= radius * radius {
                    1.0
                } else {
                    0.0
                }
            }
            TestFunction::Cosine { lambda } => y.iter().zip(lambda).map(|(a, b)| a * b).sum::<f64>().cos(),
            TestFunction::Ramp { direction, lo, hi } => {
                let u: f64 = y.iter().zip(direction).map(|(a, b)| a * b).sum();
                ((u - lo) / (hi - lo)).clamp(0.0, 1.0)
            }
        }
    }

    pub fn name(&self) -> String {
        match self {
            TestFunction::Ball { radius, .. } => format!("ball(r={radius})"),
            TestFunction::Cosine { lambda } => format!("cos(lambda={lambda:?})"),
            TestFunction::Ramp { lo, hi, .. } => format!("ramp[{lo},{hi}]"),
        }
    }

    fn dim(&self) -> usize {
        match self {
            TestFunction::Ball { center, .. } => center.len(),
            TestFunction::Cosine { lambda } => lambda.len(),
            TestFunction::Ramp { direction, .. } => direction.len(),
        }
    }

    /// Ball around `x` of radius `T^(1/alpha)/2`, a unit-frequency cosine and a ramp over `[x_1 - 1, x_1 + 1]`, all along axis 1.
    pub fn standard_set(x: &[f64], alpha: f64, horizon: f64) -> Vec<TestFunction> {
        let mut e1 = vec![0.0; x.len()];
        e1[0] = 1.0;
        vec![
            TestFunction::Ball {
                center: x.to_vec(),
                radius: 0.5 * horizon.powf(1.0 / alpha),
            },
            TestFunction::Cosine { lambda: e1.clone() },
            TestFunction::Ramp {
                direction: e1,
                lo: x[0] - 1.0,
                hi: x[0] + 1.0,
            },
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateOptions {
    /// Absolute `epsilon` in the target `(gamma - epsilon) / alpha`; `None` means `0.05 gamma`.
    pub epsilon: Option<f64>,
    pub bootstrap: usize,
    /// Number of path blocks used for accumulation and bootstrap resampling.
    pub blocks: usize,
}

impl Default for RateOptions {
    fn default() -> Self {
        RateOptions {
            epsilon: None,
            bootstrap: 1000,
            blocks: 200,
        }
    }
}

/// Level differences `D_k = max_F |E F(X^{h_k}) - E F(X^{h_k/2})|` and their fitted slope in `h`.
#[derive(Debug, Clone, PartialEq)]
pub struct RateReport {
    pub steps: Vec<usize>,
    /// `h_k`, strictly decreasing.
    pub levels: Vec<f64>,
    pub metric: Vec<f64>,
    pub stderr: Vec<f64>,
    /// `diffs[k][j]`: signed mean difference for test function `j`.
    pub diffs: Vec<Vec<f64>>,
    pub tests: Vec<String>,
    /// `None` when fewer than two levels have a nonzero difference.
    pub slope: Option<f64>,
    pub intercept: Option<f64>,
    /// Sum of squared residuals of the log-log fit.
    pub residual: Option<f64>,
    /// 95% percentile interval of the slope over path-block resamples.
    pub ci: Option<(f64, f64)>,
    pub gamma: f64,
    pub epsilon: f64,
    pub target: f64,
    pub paths: usize,
}

impl RateReport {
    /// All differences vanish identically.
    pub fn exact(&self) -> bool {
        self.metric.iter().all(|m| *m == 0.0)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("level,h,metric,stderr\n");
        for k in 0..self.levels.len() {
            let _ = writeln!(s, "{},{:?},{:?},{:?}", k, self.levels[k], self.metric[k], self.stderr[k]);
        }
        s
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "paths per level: {}", self.paths);
        let _ = writeln!(s, "test functions: {}", self.tests.join(", "));
        match (self.slope, self.ci) {
            _ if self.exact() => {
                let _ = writeln!(s, "slope: exact (all level differences vanish)");
            }
            (Some(sl), ci) => {
                let _ = writeln!(s, "slope: {sl:.4}");
                if let Some((lo, hi)) = ci {
                    let _ = writeln!(s, "95% bootstrap CI: [{lo:.4}, {hi:.4}]");
                }
                if let Some(r) = self.residual {
                    let _ = writeln!(s, "least-squares residual: {r:.4e}");
                }
            }
            (None, _) => {
                let _ = writeln!(s, "slope: undefined (fewer than two nonzero levels)");
            }
        }
        let _ = writeln!(
            s,
            "target (gamma - eps)/alpha: {:.4} (gamma = {:.4}, eps = {:.4})",
            self.target, self.gamma, self.epsilon
        );
        s
    }

    pub fn to_svg(&self) -> String {
        let fit = self.slope.zip(self.intercept);
        loglog_svg("level differences", "h", "D", &self.levels, &self.metric, fit)
    }
}

/// Per-block sums for every level and test function: `[sum, sum of squares]`.
type BlockSums = Vec<f64>;

fn fit(levels: &[f64], metric: &[f64]) -> Option<(f64, f64, f64)> {
    let f = fit_power_law(levels, metric)?;
    let res = levels
        .iter()
        .zip(metric)
        .filter(|(h, m)| **h > 0.0 && **m > 0.0)
        .map(|(h, m)| {
            let e = m.ln() - f.intercept - f.slope * h.ln();
            e * e
        })
        .sum();
    Some((f.slope, f.intercept, res))
}

/// Common-random-number level differences for `h_k = T / n_k` against `h_k / 2`.
pub fn weak_error_levels(
    field: &DriftField,
    law: &StableLaw,
    cfg: &SchemeConfig,
    tests: &[TestFunction],
    level_steps: &[usize],
    opts: RateOptions,
) -> Result<RateReport> {
    if level_steps.len() < 4 {
        return invalid(format!("need at least 4 levels, got {}", level_steps.len()));
    }
    if level_steps.windows(2).any(|w| w[1] <= w[0]) || level_steps[0] == 0 {
        return invalid("level step counts must be positive and strictly increasing");
    }
    if tests.is_empty() || tests.iter().any(|f| f.dim() != cfg.dim()) {
        return invalid("need at least one test function of the scheme's dimension");
    }
    let mut all: Vec<usize> = level_steps.iter().flat_map(|n| [*n, 2 * n]).collect();
    all.sort_unstable();
    all.dedup();
    let pos = |n: usize| all.iter().position(|m| *m == n).expect("level present");
    let pairs: Vec<(usize, usize)> = level_steps.iter().map(|n| (pos(*n), pos(2 * n))).collect();
    let nk = pairs.len();
    let nt = tests.len();
    let block = cfg.paths.div_ceil(opts.blocks.max(1)).max(1);
    let out = run_levels(
        field,
        law,
        cfg,
        &all,
        block,
        || vec![0.0; 2 * nk * nt],
        |acc: &mut BlockSums, _, paths| {
            for (k, (a, b)) in pairs.iter().enumerate() {
                let (xa, xb) = (paths.terminal(*a), paths.terminal(*b));
                for (j, f) in tests.iter().enumerate() {
                    let v = f.eval(xa) - f.eval(xb);
                    acc[2 * (k * nt + j)] += v;
                    acc[2 * (k * nt + j) + 1] += v * v;
                }
            }
        },
    )?;
    let counts: Vec<f64> = (0..out.blocks.len())
        .map(|b| (cfg.paths.min((b + 1) * block) - b * block) as f64)
        .collect();
    let levels: Vec<f64> = level_steps.iter().map(|n| cfg.horizon / *n as f64).collect();
    let reduce = |weights: &[f64]| -> (Vec<f64>, Vec<Vec<f64>>, Vec<f64>) {
        let m: f64 = weights.iter().zip(&counts).map(|(w, c)| w * c).sum();
        let mut metric = vec![0.0; nk];
        let mut stderr = vec![0.0; nk];
        let mut diffs = vec![vec![0.0; nt]; nk];
        for k in 0..nk {
            for j in 0..nt {
                let i = 2 * (k * nt + j);
                let (mut s, mut s2) = (0.0, 0.0);
                for (bl, w) in out.blocks.iter().zip(weights) {
                    s += w * bl[i];
                    s2 += w * bl[i + 1];
                }
                let mean = s / m;
                diffs[k][j] = mean;
                if mean.abs() > metric[k] || j == 0 {
                    metric[k] = mean.abs();
                    let var = (s2 / m - mean * mean).max(0.0);
                    stderr[k] = (var / (m - 1.0).max(1.0)).sqrt();
                }
            }
        }
        (metric, diffs, stderr)
    };
    let ones = vec![1.0; out.blocks.len()];
    let (metric, diffs, stderr) = reduce(&ones);
    let fitted = fit(&levels, &metric);
    let ci = if fitted.is_some() && opts.bootstrap > 0 && out.blocks.len() > 1 {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5eed_b007);
        let nb = out.blocks.len();
        let mut slopes = Vec::with_capacity(opts.bootstrap);
        for _ in 0..opts.bootstrap {
            let mut w = vec![0.0; nb];
            for _ in 0..nb {
                w[rng.random_range(0..nb)] += 1.0;
            }
            if let Some((s, _, _)) = fit(&levels, &reduce(&w).0) {
                slopes.push(s);
            }
        }
        slopes.sort_by(|a, b| a.partial_cmp(b).expect("finite slopes"));
        (slopes.len() >= 20).then(|| {
            let q = |p: f64| slopes[((p * (slopes.len() - 1) as f64).round() as usize).min(slopes.len() - 1)];
            (q(0.025), q(0.975))
        })
    } else {
        None
    };
    let gamma = validate_parameters(law.alpha(), law.dim(), field.besov()).gamma;
    let epsilon = opts.epsilon.unwrap_or(0.05 * gamma);
    Ok(RateReport {
        steps: level_steps.to_vec(),
        levels,
        metric,
        stderr,
        diffs,
        tests: tests.iter().map(|f| f.name()).collect(),
        slope: fitted.map(|f| f.0),
        intercept: fitted.map(|f| f.1),
        residual: fitted.map(|f| f.2),
        ci,
        gamma,
        epsilon,
        target: (gamma - epsilon) / law.alpha(),
        paths: cfg.paths,
    })
}
