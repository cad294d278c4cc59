use std::collections::HashMap;

use super::config::DriftEval;
use crate::besov_drift::{DriftField, DriftTable, ModeWeights, DEFAULT_TABLE_POINTS};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
enum Evaluator {
    Modes(ModeWeights),
    Table(DriftTable),
}

/// Precomputed integrated step drifts `frak b(t_i, ., h)` of one level.
#[derive(Debug, Clone)]
pub struct StepPlan {
    pub steps: usize,
    pub h: f64,
    /// Elementary noise increments per scheme step.
    pub stride: usize,
    evals: Vec<Evaluator>,
    index: Vec<usize>,
    /// Constant time-homogeneous drifts integrate exactly: `D(t_k) = c t_k`.
    exact_mean: Option<Vec<f64>>,
}

/// Position of one path, with the accumulated drift and the accumulated noise kept
/// apart. Levels that share the noise then agree bitwise whenever their drift parts do
/// (zero drift, and constant drift on dyadic grids).
#[derive(Debug, Clone)]
pub struct SchemeState {
    pub drift: Vec<f64>,
    pub noise: Vec<f64>,
    pub x: Vec<f64>,
}

impl SchemeState {
    pub fn new(start: &[f64]) -> Self {
        SchemeState {
            drift: vec![0.0; start.len()],
            noise: vec![0.0; start.len()],
            x: start.to_vec(),
        }
    }

    pub fn reset(&mut self, start: &[f64]) {
        self.drift.fill(0.0);
        self.noise.fill(0.0);
        self.x.copy_from_slice(start);
    }

    /// `x = (start + drift) + noise`.
    #[inline]
    pub fn sync(&mut self, start: &[f64]) {
        for c in 0..self.x.len() {
            self.x[c] = start[c] + self.drift[c] + self.noise[c];
        }
    }
}

fn use_table(field: &DriftField, eval: DriftEval) -> Option<usize> {
    match eval {
        DriftEval::Exact => None,
        DriftEval::Tabulated { points } => Some(points),
        DriftEval::Auto => {
            if field.dim() == 1 && field.mode_count() > 16 {
                Some(DEFAULT_TABLE_POINTS)
            } else {
                None
            }
        }
    }
}

/// A drift with frozen weights, evaluated by mode sum or by lookup table.
#[derive(Debug, Clone)]
pub struct WeightedDrift(Evaluator);

impl WeightedDrift {
    pub fn new(field: &DriftField, weights: ModeWeights, eval: DriftEval) -> Result<Self> {
        match use_table(field, eval) {
            Some(points) if field.dim() == 1 => Ok(WeightedDrift(Evaluator::Table(DriftTable::new(field, &weights, points)?))),
            Some(_) => Err(Error::Configuration("drift lookup tables are available in d = 1 only".into())),
            None => Ok(WeightedDrift(Evaluator::Modes(weights))),
        }
    }

    #[inline]
    pub fn eval_into(&self, field: &DriftField, x: &[f64], out: &mut [f64]) {
        match &self.0 {
            Evaluator::Modes(w) => field.eval_weights(w, x, out),
            Evaluator::Table(t) => out[0] = t.eval(x[0]),
        }
    }
}

/// Deduplicating store of [`WeightedDrift`]s keyed by the bit pattern of their weights.
#[derive(Debug, Default)]
pub struct DriftCache {
    seen: HashMap<Vec<u64>, usize>,
    items: Vec<WeightedDrift>,
}

impl DriftCache {
    /// Index of the evaluator for `weights`, building it on first use.
    pub fn intern(&mut self, field: &DriftField, weights: ModeWeights, eval: DriftEval) -> Result<usize> {
        let mut key: Vec<u64> = weights.modes.iter().map(|x| x.to_bits()).collect();
        key.push(weights.mean.to_bits());
        if let Some(id) = self.seen.get(&key) {
            return Ok(*id);
        }
        self.items.push(WeightedDrift::new(field, weights, eval)?);
        self.seen.insert(key, self.items.len() - 1);
        Ok(self.items.len() - 1)
    }

    pub fn get(&self, id: usize) -> &WeightedDrift {
        &self.items[id]
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
}

impl StepPlan {
    pub fn new(field: &DriftField, horizon: f64, steps: usize, noise_resolution: u64, eval: DriftEval) -> Result<Self> {
        if noise_resolution % steps as u64 != 0 {
            return Err(Error::Configuration(format!(
                "noise resolution {noise_resolution} is not a multiple of the step count {steps}"
            )));
        }
        let h = horizon / steps as f64;
        let table = use_table(field, eval);
        if table.is_some() && field.dim() != 1 {
            return Err(Error::Configuration("drift lookup tables are available in d = 1 only".into()));
        }
        let mut seen: HashMap<Vec<u64>, usize> = HashMap::new();
        let mut evals = Vec::new();
        let mut index = Vec::with_capacity(steps);
        for i in 0..steps {
            let t = i as f64 * h;
            let w = field.step_weights(t, h)?;
            let mut key: Vec<u64> = w.modes.iter().map(|x| x.to_bits()).collect();
            key.push(w.mean.to_bits());
            let id = match seen.get(&key) {
                Some(id) => *id,
                None => {
                    let e = match table {
                        Some(points) => Evaluator::Table(DriftTable::new(field, &w, points)?),
                        None => Evaluator::Modes(w),
                    };
                    evals.push(e);
                    seen.insert(key, evals.len() - 1);
                    evals.len() - 1
                }
            };
            index.push(id);
        }
        let exact_mean = if field.is_constant() && field.is_time_homogeneous() {
            let mut c = vec![0.0; field.dim()];
            field.eval_weights(&field.mollified_weights(h / 2.0, 0.0)?, &vec![0.0; field.dim()], &mut c);
            Some(c)
        } else {
            None
        };
        Ok(StepPlan {
            steps,
            h,
            stride: (noise_resolution / steps as u64) as usize,
            evals,
            index,
            exact_mean,
        })
    }

    /// Constant drift value when the plan integrates it exactly.
    pub fn exact_mean(&self) -> Option<&[f64]> {
        self.exact_mean.as_deref()
    }

    /// Distinct drift evaluators (tables or weight vectors) this level needs.
    pub fn distinct(&self) -> usize {
        self.evals.len()
    }

    #[inline]
    pub fn drift_into(&self, field: &DriftField, i: usize, x: &[f64], out: &mut [f64]) {
        match &self.evals[self.index[i]] {
            Evaluator::Modes(w) => field.eval_weights(w, x, out),
            Evaluator::Table(t) => out[0] = t.eval(x[0]),
        }
    }

    /// One scheme step: add the drift, then the step's noise increments one by one.
    #[inline]
    pub fn advance(&self, field: &DriftField, i: usize, start: &[f64], st: &mut SchemeState, noise: &[f64], scratch: &mut [f64]) {
        let d = st.x.len();
        match &self.exact_mean {
            Some(c) => {
                let t = (i + 1) as f64 * self.h;
                for (a, v) in st.drift.iter_mut().zip(c) {
                    *a = v * t;
                }
            }
            None => {
                self.drift_into(field, i, &st.x, scratch);
                for (a, b) in st.drift.iter_mut().zip(scratch.iter()) {
                    *a += *b;
                }
            }
        }
        let base = i * self.stride * d;
        for j in 0..self.stride {
            let inc = &noise[base + j * d..base + (j + 1) * d];
            for (a, b) in st.noise.iter_mut().zip(inc) {
                *a += *b;
            }
        }
        st.sync(start);
    }
}
