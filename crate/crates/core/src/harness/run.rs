use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::checks::{self, checks_csv, checks_report, Check};
use super::config::{DriftKind, ExperimentConfig, Mode};
use crate::besov_drift::{to_manifest, validate_parameters, DriftField};
use crate::density_weak_error::{
    conditional_density, duhamel_residual, error_decomposition, estimate_density, weak_error_levels, BandwidthRule,
    DensityEstimate, DuhamelOptions, Estimator, RateOptions, TestFunction, Window,
};
use crate::error::{Error, Result};
use crate::euler_sim::{simulate_grid, write_ensemble_csv, write_provenance, write_trajectories_csv, SchemeConfig};
use crate::inequality_lab::{
    beta_identity, blow_up_guard, gap_and_rate, sample_admissible, sample_violating, singular_sweep, SweepRanges, Variant,
};
use crate::stable_kernel::StableLaw;

/// Result of a completed run. I/O and configuration problems are errors instead.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub mode: Mode,
    /// Whether every assertion of the mode held.
    pub passed: bool,
    pub report: String,
    pub artifacts: Vec<PathBuf>,
}

/// Exit status of the command line tool: 0 success, 1 failed assertion,
/// 2 configuration error, 3 I/O error.
pub fn exit_code(result: &Result<Outcome>) -> i32 {
    match result {
        Ok(o) if o.passed => 0,
        Ok(_) => 1,
        Err(Error::Io(_)) => 3,
        Err(Error::Numeric { .. }) => 1,
        Err(_) => 2,
    }
}

struct Artifacts<'a> {
    dir: &'a Path,
    written: Vec<PathBuf>,
}

impl Artifacts<'_> {
    fn write(&mut self, name: &str, text: &str) -> Result<()> {
        let p = self.dir.join(name);
        std::fs::write(&p, text)?;
        self.written.push(p);
        Ok(())
    }

    fn path(&mut self, name: &str) -> PathBuf {
        let p = self.dir.join(name);
        self.written.push(p.clone());
        p
    }
}

fn scheme(cfg: &ExperimentConfig) -> SchemeConfig {
    let mut s = SchemeConfig::new(cfg.horizon, cfg.steps, cfg.start.clone(), cfg.paths, cfg.seed);
    s.allow_invalid = cfg.allow_invalid;
    s.keep_trajectories = cfg.trajectories;
    s
}

fn check_config(cfg: &ExperimentConfig) -> Result<()> {
    if cfg.start.len() != cfg.dim {
        return Err(Error::Configuration(format!(
            "start has {} coordinates but dim = {}",
            cfg.start.len(),
            cfg.dim
        )));
    }
    let uses_drift = !matches!(cfg.mode, Mode::KernelCheck | Mode::Inequalities);
    if uses_drift && !cfg.allow_invalid {
        let check = validate_parameters(cfg.alpha, cfg.dim, &cfg.besov()?);
        if !check.valid {
            return Err(Error::Configuration(format!(
                "parameters violate the well-posedness condition: {}; set allow_invalid = true to override",
                check.violations.join("; ")
            )));
        }
    }
    Ok(())
}

/// Run one experiment, writing its artifacts into `out` (created if missing).
pub fn run(cfg: &ExperimentConfig, out: &Path) -> Result<Outcome> {
    check_config(cfg)?;
    std::fs::create_dir_all(out)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| Error::Configuration(format!("cannot build a pool of {} threads: {e}", cfg.threads)))?;
    let mut art = Artifacts {
        dir: out,
        written: Vec::new(),
    };
    art.write(
        "manifest.txt",
        &format!("# sbe {}\n{}", env!("CARGO_PKG_VERSION"), cfg.serialize()),
    )?;
    let (passed, report) = pool.install(|| dispatch(cfg, &mut art))?;
    art.write("report.txt", &report)?;
    Ok(Outcome {
        mode: cfg.mode,
        passed,
        report,
        artifacts: art.written,
    })
}

fn dispatch(cfg: &ExperimentConfig, art: &mut Artifacts) -> Result<(bool, String)> {
    match cfg.mode {
        Mode::KernelCheck => kernel_check(cfg, art),
        Mode::DriftCheck => drift_check(cfg, art),
        Mode::Simulate => simulate(cfg, art),
        Mode::Rate => rate(cfg, art),
        Mode::Duhamel => duhamel(cfg, art),
        Mode::Decompose => decompose(cfg, art),
        Mode::Inequalities => inequalities(cfg, art),
    }
}

fn finish(name: &str, list: &[Check], art: &mut Artifacts) -> Result<(bool, String)> {
    art.write(name, &checks_csv(list))?;
    Ok((list.iter().all(|c| c.passed), checks_report(list)))
}

fn kernel_check(cfg: &ExperimentConfig, art: &mut Artifacts) -> Result<(bool, String)> {
    let law = StableLaw::new(cfg.alpha, cfg.dim)?;
    let mut list = vec![checks::closed_form_check(&law)?, checks::normalization_check(&law)?];
    list.extend(checks::aronson_check(&law)?);
    list.extend(checks::sampler_check(&law, cfg.sampler_draws, cfg.seed)?);
    finish("kernel_check.csv", &list, art)
}

fn drift_check(cfg: &ExperimentConfig, art: &mut Artifacts) -> Result<(bool, String)> {
    let law = StableLaw::new(cfg.alpha, cfg.dim)?;
    let spec = cfg.drift_spec()?;
    art.write("drift.manifest", &to_manifest(&spec))?;
    let field = DriftField::new(spec)?;
    let mut list = vec![
        checks::drift_identity_check(&field, &law)?,
        checks::constant_exactness_check(&law)?,
        checks::single_mode_integral_check(&law)?,
    ];
    if cfg.drift == DriftKind::RandomFourier && cfg.dim == 1 {
        list.push(checks::mollified_scaling_check(&field)?);
    }
    for ell in [f64::INFINITY, 2.0] {
        list.push(checks::kernel_norm_scaling_check(cfg.alpha, 0.5, ell)?);
    }
    finish("drift_check.csv", &list, art)
}

fn density_csv(est: &DensityEstimate, stderr: Option<&[f64]>) -> String {
    let mut s = String::from("y,density");
    if stderr.is_some() {
        s.push_str(",stderr");
    }
    s.push('\n');
    for i in 0..est.len() {
        let y: Vec<String> = est.point(i).iter().map(|v| format!("{v:?}")).collect();
        let _ = write!(s, "{},{:?}", y.join(" "), est.values[i]);
        if let Some(se) = stderr {
            let _ = write!(s, ",{:?}", se[i]);
        }
        s.push('\n');
    }
    s
}

fn simulate(cfg: &ExperimentConfig, art: &mut Artifacts) -> Result<(bool, String)> {
    let law = StableLaw::new(cfg.alpha, cfg.dim)?;
    let spec = cfg.drift_spec()?;
    art.write("drift.manifest", &to_manifest(&spec))?;
    let field = DriftField::new(spec)?;
    let mut sc = scheme(cfg);
    let t = cfg.time();
    if t != cfg.horizon {
        sc.off_grid_times = vec![t];
    }
    let window = Window::new(cfg.window_radius, cfg.window_points);
    let (est, se) = if cfg.estimator == Estimator::Conditional {
        let c = conditional_density(&field, &law, &sc, t, window)?;
        (c.estimate, Some(c.stderr))
    } else {
        let e = simulate_grid(&field, &law, &sc)?;
        write_ensemble_csv(&art.path("ensemble.csv"), &e)?;
        write_provenance(&art.path("provenance.json"), &e.provenance)?;
        if sc.keep_trajectories {
            write_trajectories_csv(&art.path("trajectories.csv"), &e)?;
        }
        let rule = BandwidthRule::Scaled { c_b: cfg.bandwidth };
        (estimate_density(&e, &law, &cfg.start, t, window, cfg.estimator, rule)?, None)
    };
    art.write("density.csv", &density_csv(&est, se.as_deref()))?;
    let mut r = String::new();
    let _ = writeln!(r, "paths: {}, steps: {}, time: {t}", cfg.paths, cfg.steps);
    let _ = writeln!(r, "{} estimate, window mass {:.6}", cfg.estimator.tag(), est.window_mass());
    Ok((true, r))
}

fn rate(cfg: &ExperimentConfig, art: &mut Artifacts) -> Result<(bool, String)> {
    let law = StableLaw::new(cfg.alpha, cfg.dim)?;
    let spec = cfg.drift_spec()?;
    art.write("drift.manifest", &to_manifest(&spec))?;
    let field = DriftField::new(spec)?;
    let tests = TestFunction::standard_set(&cfg.start, cfg.alpha, cfg.horizon);
    let opts = RateOptions {
        epsilon: cfg.epsilon,
        bootstrap: cfg.bootstrap,
        ..RateOptions::default()
    };
    let rep = weak_error_levels(&field, &law, &scheme(cfg), &tests, &cfg.levels, opts)?;
    art.write("rate.csv", &rep.to_csv())?;
    if cfg.plot {
        art.write("rate.svg", &rep.to_svg())?;
    }
    let (lo, hi) = cfg.slope_band;
    let passed = rep.exact()
        || match (rep.slope, rep.ci) {
            (Some(s), Some((c0, _))) => s >= lo && s <= hi && c0 > 0.0,
            _ => false,
        };
    let mut r = rep.summary();
    let _ = writeln!(r, "slope band: [{lo}, {hi}]");
    Ok((passed, r))
}

fn duhamel(cfg: &ExperimentConfig, art: &mut Artifacts) -> Result<(bool, String)> {
    let law = StableLaw::new(cfg.alpha, cfg.dim)?;
    let spec = cfg.drift_spec()?;
    art.write("drift.manifest", &to_manifest(&spec))?;
    let field = DriftField::new(spec)?;
    let mut sc = scheme(cfg);
    sc.keep_trajectories = true;
    let e = simulate_grid(&field, &law, &sc)?;
    let opts = DuhamelOptions {
        nodes: cfg.quad_nodes,
        window: Window::new(cfg.window_radius, cfg.window_points),
        bandwidth: BandwidthRule::Scaled { c_b: cfg.bandwidth },
    };
    let res = duhamel_residual(&e, &field, &law, cfg.time(), opts)?;
    let mut csv = String::from("y,lhs,rhs,residual\n");
    for i in 0..res.points.len() {
        let y: Vec<String> = res.points[i].iter().map(|v| format!("{v:?}")).collect();
        let _ = writeln!(csv, "{},{:?},{:?},{:?}", y.join(" "), res.lhs[i], res.rhs[i], res.residual[i]);
    }
    art.write("duhamel.csv", &csv)?;
    let passed = res.sup < cfg.residual_tolerance;
    let r = format!(
        "normalized residual: sup {:.4e}, rms {:.4e}, kde noise {:.4e} (tolerance {})\n",
        res.sup, res.l2, res.kde_noise, cfg.residual_tolerance
    );
    Ok((passed, r))
}

fn decompose(cfg: &ExperimentConfig, art: &mut Artifacts) -> Result<(bool, String)> {
    let law = StableLaw::new(cfg.alpha, cfg.dim)?;
    let spec = cfg.drift_spec()?;
    art.write("drift.manifest", &to_manifest(&spec))?;
    let field = DriftField::new(spec)?;
    let dec = error_decomposition(&field, &law, &scheme(cfg), cfg.reference_steps, cfg.time(), &cfg.probes, cfg.quad_nodes)?;
    art.write("decomposition.csv", &dec.to_csv())?;
    let mut r = String::new();
    let mut passed = true;
    for p in &dec.points {
        let ok = p.gap.abs() <= 3.0 * p.combined_noise;
        passed &= ok;
        let _ = writeln!(
            r,
            "{} y={:?}: sum {:.4e}, G^h - G_ref {:.4e}, gap {:.2e}, noise {:.2e}",
            if ok { "PASS" } else { "FAIL" },
            p.y,
            p.sum(),
            p.gamma_h - p.gamma_ref,
            p.gap,
            p.combined_noise
        );
    }
    Ok((passed, r))
}

fn inequalities(cfg: &ExperimentConfig, art: &mut Artifacts) -> Result<(bool, String)> {
    let mut list = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.sweep_seed);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let a = -1.0 + 1.95 * rng.random::<f64>();
        let b = -1.0 + 1.95 * rng.random::<f64>();
        let u = 2.0 * rng.random::<f64>();
        let t = u + 0.05 + 3.0 * rng.random::<f64>();
        worst = worst.max(beta_identity(a, b, u, t)?.relative_gap());
    }
    list.push(Check {
        name: "beta identity".into(),
        value: worst,
        limit: "1e-10".into(),
        passed: worst < 1e-10,
        detail: "100 random tuples".into(),
    });
    let tuples = sample_admissible(cfg.sweep_tuples, &SweepRanges::default(), cfg.sweep_seed);
    let sweep = singular_sweep(&tuples)?;
    art.write("singular_sweep.csv", &sweep.to_csv())?;
    for v in Variant::ALL {
        let c = sweep.fitted_constant(v);
        list.push(Check {
            name: format!("singular {v} constant"),
            value: c,
            limit: "10".into(),
            passed: c.is_finite() && c < 10.0,
            detail: format!("{} tuples", tuples.len()),
        });
        let bad = sample_violating(20, v, cfg.sweep_seed ^ 0xd1ff);
        let mut flagged = 0;
        for s in &bad {
            if blow_up_guard(s, v)?.diverges {
                flagged += 1;
            }
        }
        list.push(Check {
            name: format!("singular {v} blow-up guard"),
            value: flagged as f64,
            limit: "20".into(),
            passed: flagged == bad.len(),
            detail: "violating tuples detected".into(),
        });
    }
    let g = gap_and_rate(cfg.alpha, cfg.dim, &cfg.besov()?, cfg.epsilon.unwrap_or(0.0));
    list.push(Check {
        name: "gap and rate".into(),
        value: g.rate,
        limit: "informational".into(),
        passed: true,
        detail: format!("gamma {:.4}, valid {}", g.gamma, g.valid),
    });
    finish("inequalities.csv", &list, art)
}
