use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How the integrated step drift is evaluated along paths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DriftEval {
    /// Mode sum at every step.
    Exact,
    /// Periodic cubic lookup table with this many points (d = 1 only).
    Tabulated { points: usize },
    /// Tables for d = 1 fields with more than 16 modes, mode sums otherwise.
    Auto,
}

/// Scheme parameters: `h = T / n`, grid times `t_k = k h`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeConfig {
    pub horizon: f64,
    pub steps: usize,
    pub start: Vec<f64>,
    pub paths: usize,
    pub seed: u64,
    /// Extra query times in `(0, T]`; the terminal time is always reported.
    #[serde(default)]
    pub off_grid_times: Vec<f64>,
    /// Requested noise resolution (number of elementary increments on `[0, T]`).
    /// The effective resolution is the smallest multiple of this, of `steps`
    /// and of whatever the query times need.
    #[serde(default)]
    pub noise_steps: Option<u64>,
    #[serde(default)]
    pub keep_trajectories: bool,
    /// Run even when the drift parameters fail the well-posedness check.
    #[serde(default)]
    pub allow_invalid: bool,
    #[serde(default = "default_eval")]
    pub drift_eval: DriftEval,
}

fn default_eval() -> DriftEval {
    DriftEval::Auto
}

/// Largest noise refinement searched when placing off-grid query times.
const MAX_REFINEMENT: u64 = 4096;

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

impl SchemeConfig {
    pub fn new(horizon: f64, steps: usize, start: Vec<f64>, paths: usize, seed: u64) -> Self {
        SchemeConfig {
            horizon,
            steps,
            start,
            paths,
            seed,
            off_grid_times: Vec::new(),
            noise_steps: None,
            keep_trajectories: false,
            allow_invalid: false,
            drift_eval: DriftEval::Auto,
        }
    }

    pub fn step(&self) -> f64 {
        self.horizon / self.steps as f64
    }

    pub fn dim(&self) -> usize {
        self.start.len()
    }

    /// Grid time `t_k`.
    pub fn grid_time(&self, k: usize) -> f64 {
        if k == self.steps {
            self.horizon
        } else {
            k as f64 * self.step()
        }
    }

    /// `tau_s^h = h floor(s / h)` as a grid index.
    pub fn grid_index_below(&self, s: f64) -> usize {
        let k = (s / self.step() + 1e-9).floor() as usize;
        k.min(self.steps)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Configuration(m));
        if !(self.horizon > 0.0 && self.horizon <= 1.0) {
            return bad(format!("horizon must lie in (0, 1], got {}", self.horizon));
        }
        if self.steps == 0 {
            return bad("need at least one step".into());
        }
        if self.start.is_empty() || self.start.len() > 3 || self.start.iter().any(|v| !v.is_finite()) {
            return bad("start point must be finite with 1 to 3 coordinates".into());
        }
        if self.paths == 0 {
            return bad("need at least one path".into());
        }
        for t in &self.off_grid_times {
            if !(*t > 0.0 && *t <= self.horizon) {
                return bad(format!("query time {t} outside (0, T]"));
            }
        }
        if let Some(0) = self.noise_steps {
            return bad("noise resolution must be positive".into());
        }
        if let DriftEval::Tabulated { points } = self.drift_eval {
            if points < 16 {
                return bad("lookup tables need at least 16 points".into());
            }
        }
        self.noise_resolution().map(|_| ())
    }

    /// Number of elementary noise increments on `[0, T]`.
    pub fn noise_resolution(&self) -> Result<u64> {
        let mut n = lcm(self.steps as u64, self.noise_steps.unwrap_or(1));
        for &t in &self.off_grid_times {
            let frac = t / self.horizon;
            let mut found = None;
            for m in 1..=MAX_REFINEMENT {
                let x = frac * (n * m) as f64;
                if (x - x.round()).abs() < 1e-9 * x.max(1.0) {
                    found = Some(m);
                    break;
                }
            }
            match found {
                Some(m) => n *= m,
                None => {
                    return Err(Error::Configuration(format!(
                        "query time {t} does not fall on any noise grid finer than T/{n} by at most {MAX_REFINEMENT}"
                    )))
                }
            }
        }
        Ok(n)
    }

    /// Terminal time plus the requested query times, sorted, without duplicates.
    pub fn query_times(&self) -> Vec<f64> {
        let mut t = self.off_grid_times.clone();
        t.push(self.horizon);
        t.sort_by(|a, b| a.partial_cmp(b).expect("finite times"));
        t.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        t
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noise_resolution_places_query_times() {
        let mut c = SchemeConfig::new(1.0, 8, vec![0.0], 1, 0);
        assert_eq!(c.noise_resolution().unwrap(), 8);
        c.off_grid_times = vec![0.3];
        assert_eq!(c.noise_resolution().unwrap(), 40);
        c.noise_steps = Some(16);
        assert_eq!(c.noise_resolution().unwrap(), 80);
        c.off_grid_times = vec![1.0 / std::f64::consts::PI];
        assert!(matches!(c.noise_resolution(), Err(Error::Configuration(_))));
        assert_eq!(c.grid_index_below(0.25), 2);
        assert_eq!(c.grid_index_below(0.2499), 1);
    }
}
