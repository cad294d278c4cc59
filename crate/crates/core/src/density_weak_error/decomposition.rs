use super::conditional::{grid_index, STREAM_BLOCK};
use crate::besov_drift::DriftField;
use crate::error::{invalid, Error, Result};
use crate::euler_sim::{run_levels, DriftCache, SchemeConfig, WeightedDrift};
use crate::numerics::gauss_legendre;
use crate::stable_kernel::StableLaw;

/// Number of accumulated quantities per probe point: six terms, the two conditional
/// densities, the pathwise gap `sum Delta - (G^h - G_ref)` and the pathwise sum of the terms.
const SLOTS: usize = 10;

/// Monte-Carlo estimate of the six-term error decomposition at one probe point.
#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionPoint {
    pub y: Vec<f64>,
    pub terms: [f64; 6],
    pub stderr: [f64; 6],
    /// `|Delta_i| / pbar(t, y - x)`.
    pub normalized: [f64; 6],
    /// Conditional estimates of the coarse and reference densities at `y`.
    pub gamma_h: f64,
    pub gamma_ref: f64,
    pub gamma_h_stderr: f64,
    pub gamma_ref_stderr: f64,
    /// `sum Delta_i - (G^h - G_ref)`.
    pub gap: f64,
    /// `sqrt(se(sum Delta)^2 + se(G^h)^2 + se(G_ref)^2)`, treating the three estimates as independent.
    pub combined_noise: f64,
    /// Standard error of the pathwise gap (the two sides share their paths).
    pub paired_noise: f64,
}

impl DecompositionPoint {
    pub fn sum(&self) -> f64 {
        self.terms.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub time: f64,
    pub coarse_steps: usize,
    pub reference_steps: usize,
    pub paths: usize,
    pub points: Vec<DecompositionPoint>,
}

impl Decomposition {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("y,delta_1,delta_2,delta_3,delta_4,delta_5,delta_6,sum,gamma_h_minus_ref,combined_noise\n");
        for p in &self.points {
            let y: Vec<String> = p.y.iter().map(|v| format!("{v:?}")).collect();
            s.push_str(&y.join(" "));
            for t in p.terms {
                s.push_str(&format!(",{t:?}"));
            }
            s.push_str(&format!(",{:?},{:?},{:?}\n", p.sum(), p.gamma_h - p.gamma_ref, p.combined_noise));
        }
        s
    }
}

/// Which integral a quadrature node contributes to.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Region {
    First,
    Middle,
    Last,
}

struct Node {
    weight: f64,
    s: f64,
    region: Region,
    /// Fine grid index `tau'_s` and coarse grid index `tau_s`.
    fine_k: usize,
    coarse_k: usize,
    /// Evaluators: fine mollified drift, fine shift, coarse mollified drift, coarse shift.
    fine_drift: usize,
    fine_shift: usize,
    coarse_drift: usize,
    coarse_shift: usize,
}

/// Six-term decomposition of `G^h - G` at time `t` and the probe points `ys`, with the
/// SDE replaced by the scheme of step `T / reference_steps` driven by the same noise.
///
/// Terms that involve `b(s, .)` against the proxy use the proxy's own mollified drift
/// (with its own frozen grid time), and every `grad p(t - s, y - X_s)` is replaced by its
/// conditional expectation given the last grid position.
pub fn error_decomposition(
    field: &DriftField,
    law: &StableLaw,
    cfg: &SchemeConfig,
    reference_steps: usize,
    t: f64,
    ys: &[Vec<f64>],
    nodes_per_step: usize,
) -> Result<Decomposition> {
    if reference_steps % cfg.steps != 0 || reference_steps < 2 * cfg.steps {
        return Err(Error::Configuration(format!(
            "reference step T/{reference_steps} does not refine the step T/{} by an integer factor >= 2",
            cfg.steps
        )));
    }
    if nodes_per_step < 2 {
        return invalid("need at least two quadrature nodes per reference step");
    }
    let d = cfg.dim();
    if ys.is_empty() || ys.iter().any(|y| y.len() != d) {
        return invalid("probe points must be nonempty and match the scheme dimension");
    }
    let k = grid_index(cfg, t)?;
    if k < 2 {
        return invalid("the decomposition needs t >= 2h");
    }
    let rho = reference_steps / cfg.steps;
    let h = cfg.step();
    let hf = h / rho as f64;
    let (gx, gw) = gauss_legendre(nodes_per_step);
    let mut cache = DriftCache::default();
    let mut nodes = Vec::with_capacity(k * rho * nodes_per_step);
    for j in 0..k * rho {
        let tf = j as f64 * hf;
        let i = j / rho;
        let tc = i as f64 * h;
        let region = if i == 0 {
            Region::First
        } else if i + 1 == k {
            Region::Last
        } else {
            Region::Middle
        };
        for (u, w) in gx.iter().zip(&gw) {
            let s = tf + (u + 1.0) / 2.0 * hf;
            nodes.push(Node {
                weight: w * hf / 2.0,
                s,
                region,
                fine_k: j,
                coarse_k: i,
                fine_drift: cache.intern(field, field.mollified_weights(s, tf)?, cfg.drift_eval)?,
                fine_shift: cache.intern(field, field.step_weights(tf, s - tf)?, cfg.drift_eval)?,
                coarse_drift: cache.intern(field, field.mollified_weights(s, tc)?, cfg.drift_eval)?,
                coarse_shift: cache.intern(field, field.step_weights(tc, s - tc)?, cfg.drift_eval)?,
            });
        }
    }
    let last_c = WeightedDrift::new(field, field.step_weights(t - h, h)?, cfg.drift_eval)?;
    let last_f = WeightedDrift::new(field, field.step_weights(t - hf, hf)?, cfg.drift_eval)?;
    let np = ys.len();
    let kf = k * rho;
    let blocks = run_levels(
        field,
        law,
        cfg,
        &[cfg.steps, reference_steps],
        STREAM_BLOCK,
        || vec![0.0; 2 * SLOTS * np],
        |acc, _, paths| {
            let mut v = vec![0.0; SLOTS * np];
            let mut bf = vec![0.0; d];
            let mut shf = vec![0.0; d];
            let mut a1 = vec![0.0; d];
            let mut a2 = vec![0.0; d];
            let mut a3 = vec![0.0; d];
            let mut shc = vec![0.0; d];
            let mut z = vec![0.0; d];
            let mut g = [vec![0.0; d], vec![0.0; d], vec![0.0; d], vec![0.0; d]];
            let dot = |a: &[f64], b: &[f64]| -> f64 { a.iter().zip(b).map(|(u, w)| u * w).sum() };
            for nd in &nodes {
                let xf = paths.at(1, nd.fine_k);
                let xp = paths.at(1, nd.coarse_k * rho);
                let xc = paths.at(0, nd.coarse_k);
                let tf = nd.fine_k as f64 * hf;
                let tc = nd.coarse_k as f64 * h;
                cache.get(nd.fine_drift).eval_into(field, xf, &mut bf);
                cache.get(nd.fine_shift).eval_into(field, xf, &mut shf);
                cache.get(nd.coarse_drift).eval_into(field, xc, &mut a3);
                cache.get(nd.coarse_shift).eval_into(field, xc, &mut shc);
                if nd.region == Region::Middle {
                    // b(s, X_tau) through the proxy keeps the proxy's own mollification lag
                    cache.get(nd.fine_drift).eval_into(field, xp, &mut a1);
                    cache.get(nd.coarse_drift).eval_into(field, xp, &mut a2);
                }
                for (p, y) in ys.iter().enumerate() {
                    let grad = |lag: f64, base: &[f64], shift: Option<&[f64]>, out: &mut Vec<f64>, z: &mut Vec<f64>| {
                        for c in 0..d {
                            z[c] = y[c] - base[c] - shift.map_or(0.0, |s| s[c]);
                        }
                        law.grad_pdf(lag, z, out);
                    };
                    let [g1, g2, g3, g4] = &mut g;
                    grad(t - tf, xf, Some(&shf), g1, &mut z);
                    grad(t - tc, xc, Some(&shc), g4, &mut z);
                    let true_term = dot(&bf, g1);
                    let scheme_term = dot(&a3, g4);
                    let o = p * SLOTS;
                    match nd.region {
                        Region::First => v[o] += nd.weight * (true_term - scheme_term),
                        Region::Last => v[o + 5] += nd.weight * (true_term - scheme_term),
                        Region::Middle => {
                            grad(t - nd.s, xp, None, g2, &mut z);
                            grad(t - nd.s, xc, None, g3, &mut z);
                            v[o + 1] += nd.weight * (true_term - dot(&a1, g2));
                            v[o + 2] += nd.weight * (dot(&a1, g2) - dot(&a2, g2));
                            v[o + 3] += nd.weight * (dot(&a2, g2) - dot(&a3, g3));
                            v[o + 4] += nd.weight * (dot(&a3, g3) - scheme_term);
                        }
                    }
                }
            }
            let xc = paths.at(0, k - 1);
            let xf = paths.at(1, kf - 1);
            last_c.eval_into(field, xc, &mut shc);
            last_f.eval_into(field, xf, &mut shf);
            for (p, y) in ys.iter().enumerate() {
                let o = p * SLOTS;
                for c in 0..d {
                    z[c] = y[c] - xc[c] - shc[c];
                }
                v[o + 6] = law.pdf(h, &z);
                for c in 0..d {
                    z[c] = y[c] - xf[c] - shf[c];
                }
                v[o + 7] = law.pdf(hf, &z);
                v[o + 9] = v[o..o + 6].iter().sum::<f64>();
                v[o + 8] = v[o + 9] - (v[o + 6] - v[o + 7]);
            }
            for (i, val) in v.iter().enumerate() {
                acc[2 * i] += val;
                acc[2 * i + 1] += val * val;
            }
        },
    )?;
    let mut sums = vec![0.0; 2 * SLOTS * np];
    for b in &blocks.blocks {
        for (s, v) in sums.iter_mut().zip(b) {
            *s += v;
        }
    }
    let m = cfg.paths as f64;
    let stat = |i: usize| -> (f64, f64) {
        let mean = sums[2 * i] / m;
        let var = (sums[2 * i + 1] / m - mean * mean).max(0.0);
        (mean, (var / (m - 1.0).max(1.0)).sqrt())
    };
    let points = ys
        .iter()
        .enumerate()
        .map(|(p, y)| {
            let o = p * SLOTS;
            let mut terms = [0.0; 6];
            let mut stderr = [0.0; 6];
            for i in 0..6 {
                (terms[i], stderr[i]) = stat(o + i);
            }
            let rel: Vec<f64> = y.iter().zip(&cfg.start).map(|(a, b)| a - b).collect();
            let pbar = law.bound_radial(t, rel.iter().map(|v| v * v).sum::<f64>().sqrt());
            let (gh, gh_se) = stat(o + 6);
            let (gr, gr_se) = stat(o + 7);
            let (_, gap_se) = stat(o + 8);
            let (_, sum_se) = stat(o + 9);
            let sum: f64 = terms.iter().sum();
            DecompositionPoint {
                y: y.clone(),
                terms,
                stderr,
                normalized: terms.map(|v| v.abs() / pbar),
                gamma_h: gh,
                gamma_ref: gr,
                gamma_h_stderr: gh_se,
                gamma_ref_stderr: gr_se,
                gap: sum - (gh - gr),
                combined_noise: (sum_se * sum_se + gh_se * gh_se + gr_se * gr_se).sqrt(),
                paired_noise: gap_se,
            }
        })
        .collect();
    Ok(Decomposition {
        time: t,
        coarse_steps: cfg.steps,
        reference_steps,
        paths: cfg.paths,
        points,
    })
}
