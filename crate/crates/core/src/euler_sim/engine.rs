use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{DriftEval, SchemeConfig};
use super::plan::{SchemeState, StepPlan};
use crate::besov_drift::{to_manifest, validate_parameters, DriftField, ModeWeights};
use crate::error::{domain, invalid, Error, Result};
use crate::stable_kernel::{IncrementSampler, StableLaw};

/// Positions beyond this magnitude are flagged (kept in counts, excluded from density windows).
pub const OVERFLOW_LIMIT: f64 = 1e6;

/// Everything needed to regenerate an ensemble bit for bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub drift_manifest: String,
    pub alpha: f64,
    pub dim: usize,
    pub config: SchemeConfig,
    pub noise_resolution: u64,
    pub version: String,
}

#[derive(Debug, Clone)]
pub struct PathEnsemble {
    pub steps: usize,
    pub dim: usize,
    pub paths: usize,
    /// Query times (sorted, terminal time last).
    pub times: Vec<f64>,
    /// `positions[(path * times.len() + q) * dim + c]`.
    pub positions: Vec<f64>,
    /// Grid trajectories `[(path * (steps + 1) + k) * dim + c]` when requested.
    pub trajectories: Option<Vec<f64>>,
    /// Paths with some query position beyond [`OVERFLOW_LIMIT`].
    pub overflow: usize,
    pub provenance: Provenance,
}

impl PathEnsemble {
    /// Index of query time `t`, if present.
    pub fn time_index(&self, t: f64) -> Option<usize> {
        self.times.iter().position(|s| (s - t).abs() <= 1e-12 * t.abs().max(1.0))
    }

    /// Position of `path` at query index `q`.
    pub fn position(&self, path: usize, q: usize) -> &[f64] {
        let o = (path * self.times.len() + q) * self.dim;
        &self.positions[o..o + self.dim]
    }

    /// All positions at query index `q`, flattened path-major.
    pub fn positions_at(&self, q: usize) -> Vec<f64> {
        (0..self.paths).flat_map(|p| self.position(p, q).to_vec()).collect()
    }

    pub fn terminal(&self) -> Vec<f64> {
        self.positions_at(self.times.len() - 1)
    }

    /// Grid position `X^h_{t_k}` of `path`.
    pub fn grid_position(&self, path: usize, k: usize) -> Option<&[f64]> {
        let tr = self.trajectories.as_ref()?;
        let o = (path * (self.steps + 1) + k) * self.dim;
        Some(&tr[o..o + self.dim])
    }

    pub fn horizon(&self) -> f64 {
        self.provenance.config.horizon
    }
}

pub(crate) fn check_inputs(field: &DriftField, law: &StableLaw, cfg: &SchemeConfig) -> Result<()> {
    cfg.validate()?;
    field.check_law(law)?;
    if cfg.dim() != field.dim() {
        return invalid(format!("start point has dimension {}, drift has {}", cfg.dim(), field.dim()));
    }
    if cfg.horizon > field.horizon() * (1.0 + 1e-12) {
        return Err(Error::Configuration(format!(
            "scheme horizon {} exceeds the drift's horizon {}",
            cfg.horizon,
            field.horizon()
        )));
    }
    if field.spec().construction.is_distributional() && !cfg.allow_invalid {
        let check = validate_parameters(law.alpha(), law.dim(), field.besov());
        if !check.valid {
            return Err(Error::Configuration(format!(
                "drift parameters fail the well-posedness condition: {check}; set allow_invalid to run anyway"
            )));
        }
    }
    field.check_cutoff(cfg.step())
}

/// Fill `noise` with the `len` elementary increments of `path` (dt each).
#[inline]
pub(crate) fn draw_noise(sampler: &mut IncrementSampler, dt: f64, noise: &mut [f64], dim: usize) {
    for row in noise.chunks_mut(dim) {
        sampler.next_into(dt, row);
    }
}

pub(crate) fn provenance(field: &DriftField, law: &StableLaw, cfg: &SchemeConfig) -> Result<Provenance> {
    Ok(Provenance {
        drift_manifest: to_manifest(field.spec()),
        alpha: law.alpha(),
        dim: law.dim(),
        config: cfg.clone(),
        noise_resolution: cfg.noise_resolution()?,
        version: env!("CARGO_PKG_VERSION").into(),
    })
}

struct Query {
    time: f64,
    grid_k: usize,
    /// Noise increments between `t_k` and the query time.
    extra: usize,
    weights: Option<ModeWeights>,
}

fn plan_queries(field: &DriftField, cfg: &SchemeConfig, noise_res: u64) -> Result<Vec<Query>> {
    let h = cfg.step();
    let stride = noise_res / cfg.steps as u64;
    cfg.query_times()
        .into_iter()
        .map(|t| {
            let pos = t / cfg.horizon * noise_res as f64;
            let j = pos.round() as u64;
            let k = (j / stride) as usize;
            let extra = (j % stride) as usize;
            let weights = if extra == 0 {
                None
            } else {
                let tk = k as f64 * h;
                Some(field.step_weights(tk, t - tk)?)
            };
            Ok(Query {
                time: t,
                grid_k: k,
                extra,
                weights,
            })
        })
        .collect()
}

const BLOCK: usize = 256;

/// Simulate the grid scheme and its continuous extension at the query times.
pub fn simulate_grid(field: &DriftField, law: &StableLaw, cfg: &SchemeConfig) -> Result<PathEnsemble> {
    check_inputs(field, law, cfg)?;
    let noise_res = cfg.noise_resolution()?;
    let plan = StepPlan::new(field, cfg.horizon, cfg.steps, noise_res, cfg.drift_eval)?;
    let queries = plan_queries(field, cfg, noise_res)?;
    let d = cfg.dim();
    let nq = queries.len();
    let dt = cfg.horizon / noise_res as f64;
    let mut positions = vec![0.0; cfg.paths * nq * d];
    let mut trajectories = if cfg.keep_trajectories {
        Some(vec![0.0; cfg.paths * (cfg.steps + 1) * d])
    } else {
        None
    };
    let traj_len = (cfg.steps + 1) * d;
    let run_block = |b: usize, pos: &mut [f64], traj: Option<&mut [f64]>| {
        let mut noise = vec![0.0; noise_res as usize * d];
        let mut st = SchemeState::new(&cfg.start);
        let mut scratch = vec![0.0; d];
        let mut part = SchemeState::new(&cfg.start);
        let mut traj = traj;
        for (local, out) in pos.chunks_mut(nq * d).enumerate() {
            let path = b * BLOCK + local;
            let mut sampler = IncrementSampler::new(law, cfg.seed, path as u64);
            draw_noise(&mut sampler, dt, &mut noise, d);
            st.reset(&cfg.start);
            let mut tr = traj.as_deref_mut().map(|t| &mut t[local * traj_len..(local + 1) * traj_len]);
            if let Some(t) = tr.as_deref_mut() {
                t[..d].copy_from_slice(&st.x);
            }
            let mut q = 0;
            for k in 0..=cfg.steps {
                while q < nq && queries[q].grid_k == k {
                    let o = &mut out[q * d..(q + 1) * d];
                    match &queries[q].weights {
                        None => o.copy_from_slice(&st.x),
                        Some(w) => {
                            part.drift.copy_from_slice(&st.drift);
                            part.noise.copy_from_slice(&st.noise);
                            match plan.exact_mean() {
                                Some(c) => {
                                    for (a, v) in part.drift.iter_mut().zip(c) {
                                        *a = v * queries[q].time;
                                    }
                                }
                                None => {
                                    field.eval_weights(w, &st.x, &mut scratch);
                                    for (a, b) in part.drift.iter_mut().zip(&scratch) {
                                        *a += *b;
                                    }
                                }
                            }
                            let base = k * plan.stride * d;
                            for j in 0..queries[q].extra {
                                for c in 0..d {
                                    part.noise[c] += noise[base + j * d + c];
                                }
                            }
                            part.sync(&cfg.start);
                            o.copy_from_slice(&part.x);
                        }
                    }
                    q += 1;
                }
                if k == cfg.steps {
                    break;
                }
                plan.advance(field, k, &cfg.start, &mut st, &noise, &mut scratch);
                if let Some(t) = tr.as_deref_mut() {
                    t[(k + 1) * d..(k + 2) * d].copy_from_slice(&st.x);
                }
            }
        }
    };
    match trajectories.as_mut() {
        Some(tr) => positions
            .par_chunks_mut(BLOCK * nq * d)
            .zip(tr.par_chunks_mut(BLOCK * traj_len))
            .enumerate()
            .for_each(|(b, (p, t))| run_block(b, p, Some(t))),
        None => positions
            .par_chunks_mut(BLOCK * nq * d)
            .enumerate()
            .for_each(|(b, p)| run_block(b, p, None)),
    }
    let overflow = positions
        .chunks(nq * d)
        .filter(|p| p.iter().any(|v| !(v.abs() <= OVERFLOW_LIMIT)))
        .count();
    Ok(PathEnsemble {
        steps: cfg.steps,
        dim: d,
        paths: cfg.paths,
        times: cfg.query_times(),
        positions,
        trajectories,
        overflow,
        provenance: provenance(field, law, cfg)?,
    })
}

/// Positions `X^h_t` at an arbitrary `t in (0, T]` on the configuration's noise grid.
pub fn simulate_continuous(field: &DriftField, law: &StableLaw, cfg: &SchemeConfig, t: f64) -> Result<Vec<f64>> {
    if !(t > 0.0 && t <= cfg.horizon) {
        return domain(format!("query time {t} outside (0, {}]", cfg.horizon));
    }
    let noise_res = cfg.noise_resolution()?;
    let pos = t / cfg.horizon * noise_res as f64;
    if (pos - pos.round()).abs() > 1e-9 * pos.max(1.0) {
        return Err(Error::Configuration(format!(
            "time {t} is not on the noise grid T/{noise_res}; list it in off_grid_times"
        )));
    }
    let mut c = cfg.clone();
    c.keep_trajectories = false;
    if !c.off_grid_times.iter().any(|s| (s - t).abs() < 1e-12) {
        c.off_grid_times.push(t);
    }
    // the extra query does not change the noise grid, so grid values are unchanged
    debug_assert_eq!(c.noise_resolution()?, noise_res);
    let e = simulate_grid(field, law, &c)?;
    let q = e.time_index(t).expect("query time present");
    Ok(e.positions_at(q))
}

/// Fine scheme with step `h / rho` on the same noise, as a proxy for the SDE.
pub fn reference_ensemble(field: &DriftField, law: &StableLaw, cfg: &SchemeConfig, rho: usize) -> Result<PathEnsemble> {
    if rho < 4 {
        return invalid(format!("reference refinement must be at least 4, got {rho}"));
    }
    let fine = reference_config(cfg, rho)?;
    simulate_grid(field, law, &fine)
}

/// The fine configuration used by [`reference_ensemble`]; fails unless the coarse noise grid
/// already resolves the fine steps (set `noise_steps` to a multiple of `n rho`).
pub fn reference_config(cfg: &SchemeConfig, rho: usize) -> Result<SchemeConfig> {
    let noise_res = cfg.noise_resolution()?;
    let fine_steps = cfg.steps * rho;
    if noise_res % fine_steps as u64 != 0 {
        return Err(Error::Configuration(format!(
            "noise grid T/{noise_res} does not resolve the reference step T/{fine_steps}; set noise_steps to a multiple of {fine_steps}"
        )));
    }
    let mut fine = cfg.clone();
    fine.steps = fine_steps;
    fine.noise_steps = Some(noise_res);
    Ok(fine)
}

/// Output of [`run_levels`]: one accumulator per block of paths, in block order.
pub struct LevelBlocks<A> {
    pub blocks: Vec<A>,
    pub block_size: usize,
    pub noise_resolution: u64,
}

/// Grid trajectories of one path at every level of a [`run_levels`] call.
pub struct LevelPaths<'a> {
    dim: usize,
    steps: &'a [usize],
    offsets: &'a [usize],
    data: &'a [f64],
}

impl LevelPaths<'_> {
    pub fn levels(&self) -> usize {
        self.steps.len()
    }

    pub fn steps(&self, level: usize) -> usize {
        self.steps[level]
    }

    /// `X^{h_l}_{t_k}` on level `l`.
    #[inline]
    pub fn at(&self, level: usize, k: usize) -> &[f64] {
        let o = self.offsets[level] + k * self.dim;
        &self.data[o..o + self.dim]
    }

    #[inline]
    pub fn terminal(&self, level: usize) -> &[f64] {
        self.at(level, self.steps[level])
    }
}

/// Multi-level common-random-number driver. Every path draws its elementary
/// increments once and every level consumes them aggregated; `visit` receives
/// the grid trajectories of all levels, in the order of `level_steps`.
pub fn run_levels<A, I, V>(
    field: &DriftField,
    law: &StableLaw,
    base: &SchemeConfig,
    level_steps: &[usize],
    block_size: usize,
    init: I,
    visit: V,
) -> Result<LevelBlocks<A>>
where
    A: Send,
    I: Fn() -> A + Sync,
    V: Fn(&mut A, usize, &LevelPaths) + Sync,
{
    if level_steps.is_empty() || block_size == 0 {
        return invalid("need at least one level and a positive block size");
    }
    let mut noise_res = base.noise_resolution()?;
    for &n in level_steps {
        noise_res = super::config::lcm(noise_res, n as u64);
    }
    let mut plans = Vec::with_capacity(level_steps.len());
    for &n in level_steps {
        let mut c = base.clone();
        c.steps = n;
        c.noise_steps = Some(noise_res);
        check_inputs(field, law, &c)?;
        plans.push(StepPlan::new(field, base.horizon, n, noise_res, base.drift_eval)?);
    }
    let d = base.dim();
    let mut offsets = Vec::with_capacity(plans.len());
    let mut total = 0;
    for &n in level_steps {
        offsets.push(total);
        total += (n + 1) * d;
    }
    let dt = base.horizon / noise_res as f64;
    let nb = base.paths.div_ceil(block_size);
    let blocks: Vec<A> = (0..nb)
        .into_par_iter()
        .map(|b| {
            let mut acc = init();
            let mut noise = vec![0.0; noise_res as usize * d];
            let mut st = SchemeState::new(&base.start);
            let mut scratch = vec![0.0; d];
            let mut data = vec![0.0; total];
            let end = ((b + 1) * block_size).min(base.paths);
            for path in b * block_size..end {
                let mut sampler = IncrementSampler::new(law, base.seed, path as u64);
                draw_noise(&mut sampler, dt, &mut noise, d);
                for (l, plan) in plans.iter().enumerate() {
                    let o = offsets[l];
                    st.reset(&base.start);
                    data[o..o + d].copy_from_slice(&st.x);
                    for i in 0..plan.steps {
                        plan.advance(field, i, &base.start, &mut st, &noise, &mut scratch);
                        data[o + (i + 1) * d..o + (i + 2) * d].copy_from_slice(&st.x);
                    }
                }
                let view = LevelPaths {
                    dim: d,
                    steps: level_steps,
                    offsets: &offsets,
                    data: &data,
                };
                visit(&mut acc, path, &view);
            }
            acc
        })
        .collect();
    Ok(LevelBlocks {
        blocks,
        block_size,
        noise_resolution: noise_res,
    })
}

/// Drift evaluation mode actually used for a field (for reports).
pub fn effective_eval(field: &DriftField, eval: DriftEval) -> &'static str {
    match eval {
        DriftEval::Exact => "mode-sum",
        DriftEval::Tabulated { .. } => "table",
        DriftEval::Auto if field.dim() == 1 && field.mode_count() > 16 => "table",
        DriftEval::Auto => "mode-sum",
    }
}
