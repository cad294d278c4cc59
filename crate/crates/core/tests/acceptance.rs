//! Acceptance suite. Prints one PASS/FAIL line per criterion plus diagnostics.
//!
//! A failing criterion does not fail the test run: several are known not to hold
//! for the fixture as specified, and the verdicts are recorded, not tuned. Errors
//! (a criterion that cannot be evaluated at all) do fail the test.

use std::io::Write;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sbe::besov_drift::{distributional_fixture, single_mode_fixture, BesovParams, Construction, DriftField, DriftSpec};
use sbe::density_weak_error::*;
use sbe::euler_sim::{simulate_grid, SchemeConfig};
use sbe::harness::checks::*;
use sbe::inequality_lab::*;
use sbe::stable_kernel::StableLaw;
use sbe::Result;

// Tolerances, all fixed before the runs.
const CLOSED_FORM_REL: f64 = 1e-6;
const NORMALIZATION: f64 = 1e-4;
const ARONSON_MAX: f64 = 100.0;
const SCALING_BAND: f64 = 0.03;
const KERNEL_NORM_BAND: f64 = 0.05;
const BETA_REL: f64 = 1e-10;
const SINGULAR_MAX: f64 = 10.0;
const DUHAMEL_SMOOTH: f64 = 0.05;
const DUHAMEL_SINGLE_MODE: f64 = 0.1;
const BOUND_MAX: f64 = 100.0;
const STABILITY: f64 = 2.0;
const RATE_BAND: (f64, f64) = (0.05, 0.35);
const CONTROL_BAND: (f64, f64) = (0.85, 1.15);
const DECOMP_SIGMAS: f64 = 3.0;

const M_HEADLINE: usize = 1_000_000;
const M_CONTROL: usize = 200_000;
const M_DECOMP: usize = 50_000;

/// Written straight to the process stdout so the lines survive output capture.
fn say(s: &str) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{s}");
    let _ = out.flush();
}

struct Verdict {
    passed: bool,
    summary: String,
    notes: Vec<String>,
}

impl Verdict {
    fn new(passed: bool, summary: impl Into<String>) -> Self {
        Verdict {
            passed,
            summary: summary.into(),
            notes: Vec::new(),
        }
    }

    fn note(mut self, n: impl Into<String>) -> Self {
        self.notes.push(n.into());
        self
    }
}

fn all(list: &[Check]) -> bool {
    list.iter().all(|c| c.passed)
}

fn fixture() -> DriftField {
    DriftField::new(distributional_fixture(1.5, 1, -0.1)).unwrap()
}

fn constant(c: f64) -> DriftField {
    DriftField::new(DriftSpec::new(
        1.5,
        1,
        4.0,
        BesovParams::sup_norm(-0.1),
        Construction::Constant { value: vec![c] },
    ))
    .unwrap()
}

fn kernel_oracles() -> Result<Verdict> {
    let mut list = Vec::new();
    for a in [1.0, 2.0] {
        list.push(closed_form_check(&StableLaw::new(a, 1)?)?);
    }
    let worst_cf = list.iter().map(|c| c.value).fold(0.0, f64::max);
    let mut worst_norm = 0.0f64;
    for a in [1.2, 1.5, 1.8] {
        for d in [1, 2] {
            let c = normalization_check(&StableLaw::new(a, d)?)?;
            worst_norm = worst_norm.max(c.value);
            list.push(c);
        }
    }
    Ok(Verdict::new(
        all(&list) && worst_cf < CLOSED_FORM_REL && worst_norm < NORMALIZATION,
        format!("closed forms rel {worst_cf:.2e} (< {CLOSED_FORM_REL:e}), normalization {worst_norm:.2e} (< {NORMALIZATION:e})"),
    ))
}

fn aronson() -> Result<Verdict> {
    let mut worst = 0.0f64;
    let mut notes = Vec::new();
    for a in [1.2, 1.5, 1.8] {
        for d in [1, 2] {
            let c = aronson_check(&StableLaw::new(a, d)?)?.expect("alpha < 2");
            worst = worst.max(c.value);
            notes.push(format!("alpha {a} d {d}: {:.3} ({})", c.value, c.detail));
        }
    }
    let mut v = Verdict::new(worst < ARONSON_MAX, format!("largest two-sided constant {worst:.3} (< {ARONSON_MAX})"));
    v.notes = notes;
    Ok(v)
}

fn sampler() -> Result<Verdict> {
    let mut list = sampler_check(&StableLaw::new(1.5, 1)?, 100_000, 3)?;
    list.extend(sampler_check(&StableLaw::new(1.5, 2)?, 100_000, 4)?);
    let s: Vec<String> = list.iter().map(|c| format!("{} {:.4} < {}", c.name, c.value, c.limit)).collect();
    Ok(Verdict::new(all(&list), s.join(", ")))
}

fn drift_identities() -> Result<Verdict> {
    let law = StableLaw::new(1.5, 1)?;
    let list = [
        drift_identity_check(&fixture(), &law)?,
        constant_exactness_check(&law)?,
        single_mode_integral_check(&law)?,
    ];
    Ok(Verdict::new(
        all(&list),
        format!(
            "quadrature identity {:.2e}, constant drift bitwise mismatches {}, mode integral {:.2e}",
            list[0].value, list[1].value, list[2].value
        ),
    ))
}

fn mollified_scaling() -> Result<Verdict> {
    let c = mollified_scaling_check(&fixture())?;
    let target = -0.1 / 1.5;
    Ok(Verdict::new(
        (c.value - target).abs() <= SCALING_BAND,
        format!("slope {:.4}, target {target:.4} +- {SCALING_BAND}", c.value),
    )
    .note(format!("L2 norm {} (diagnostic)", c.detail)))
}

fn kernel_norm() -> Result<Verdict> {
    let (alpha, theta) = (1.5, 0.5);
    let mut ok = true;
    let mut parts = Vec::new();
    for (ell, ell_conj) in [(f64::INFINITY, 1.0), (2.0, 2.0)] {
        let c = kernel_norm_scaling_check(alpha, theta, ell)?;
        let target = -theta / alpha - 1.0 / (alpha * ell_conj);
        ok &= (c.value - target).abs() <= KERNEL_NORM_BAND;
        parts.push(format!("ell {ell}: slope {:.4} vs {target:.4}", c.value));
    }
    Ok(Verdict::new(ok, format!("{} (+- {KERNEL_NORM_BAND})", parts.join(", "))))
}

fn singular() -> Result<Verdict> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let a = -1.0 + 1.95 * rng.random::<f64>();
        let b = -1.0 + 1.95 * rng.random::<f64>();
        let u = 2.0 * rng.random::<f64>();
        let t = u + 0.05 + 3.0 * rng.random::<f64>();
        worst = worst.max(beta_identity(a, b, u, t)?.relative_gap());
    }
    let sweep = singular_sweep(&sample_admissible(200, &SweepRanges::default(), 7))?;
    let consts: Vec<(Variant, f64)> = Variant::ALL.iter().map(|v| (*v, sweep.fitted_constant(*v))).collect();
    let ok = worst < BETA_REL && sweep.all_finite() && consts.iter().all(|(_, c)| *c < SINGULAR_MAX);
    let cs: Vec<String> = consts.iter().map(|(v, c)| format!("{v} {c:.2}")).collect();
    Ok(Verdict::new(
        ok,
        format!("beta identity rel {worst:.2e} (< {BETA_REL:e}); fitted constants {} (< {SINGULAR_MAX})", cs.join(", ")),
    )
    .note(format!(
        "full / 4 = {:.2}: with c = d = 0 each bracket of the full integrand equals 2",
        consts[0].1 / 4.0
    )))
}

fn duhamel() -> Result<Verdict> {
    let law = StableLaw::new(1.5, 1)?;
    let mut out = Vec::new();
    for (name, field, steps, m) in [
        ("zero", DriftField::new(DriftSpec::zero(1.5, 1))?, 4, 200_000),
        ("constant", constant(0.6), 4, 200_000),
        ("single-mode", DriftField::new(single_mode_fixture(1.5, 1, 16.0))?, 4, 1_000_000),
    ] {
        let mut cfg = SchemeConfig::new(1.0, steps, vec![0.0], m, 31);
        cfg.keep_trajectories = true;
        let e = simulate_grid(&field, &law, &cfg)?;
        let r = duhamel_residual(&e, &field, &law, 1.0, DuhamelOptions::default())?;
        out.push((name, r.sup, r.kde_noise));
    }
    let ok = out[0].1 < DUHAMEL_SMOOTH && out[1].1 < DUHAMEL_SMOOTH && out[2].1 < DUHAMEL_SINGLE_MODE;
    let s: Vec<String> = out.iter().map(|(n, r, k)| format!("{n} {r:.4} (kde noise {k:.4})")).collect();
    Ok(Verdict::new(ok, format!("normalized residuals {}", s.join(", "))))
}

fn heat_kernel_bound() -> Result<Verdict> {
    let law = StableLaw::new(1.5, 1)?;
    let field = fixture();
    let besov = BesovParams::sup_norm(-0.1);
    let gamma = 0.3;
    let rho = 0.1 + 0.05 * gamma / 2.0;
    let (mut sup, mut hol) = (Vec::new(), Vec::new());
    for n in [8, 16, 32, 64, 128, 256] {
        let cfg = SchemeConfig::new(1.0, n, vec![0.0], M_HEADLINE, 41);
        let c = conditional_density(&field, &law, &cfg, 1.0, Window::standard(1))?;
        let q = holder_quotient(&c.estimate, &law, rho, &besov)?;
        sup.push(q.sup_term);
        hol.push(q.holder_part);
    }
    let spread = |v: &[f64]| v.iter().cloned().fold(0.0, f64::max) / v.iter().cloned().fold(f64::MAX, f64::min);
    let cmax = sup.iter().cloned().fold(0.0, f64::max);
    let ok = cmax < BOUND_MAX && spread(&sup) <= STABILITY && spread(&hol) <= STABILITY;
    let fmt = |v: &[f64]| v.iter().map(|x| format!("{x:.2}")).collect::<Vec<_>>().join(" ");
    Ok(Verdict::new(
        ok,
        format!(
            "constant {cmax:.2} (< {BOUND_MAX}), spread x{:.2} and Hölder spread x{:.2} (<= x{STABILITY})",
            spread(&sup),
            spread(&hol)
        ),
    )
    .note(format!("n = 8..256 constants: {}", fmt(&sup)))
    .note(format!("n = 8..256 Hölder parts: {}", fmt(&hol))))
}

fn rate() -> Result<Verdict> {
    let law = StableLaw::new(1.5, 1)?;
    let levels: Vec<usize> = (3..=10).map(|k| 1 << k).collect();
    let tests = TestFunction::standard_set(&[0.0], 1.5, 1.0);
    let cfg = SchemeConfig::new(1.0, 8, vec![0.0], M_HEADLINE, 1);
    let r = weak_error_levels(&fixture(), &law, &cfg, &tests, &levels, RateOptions::default())?;
    let (s, (lo, hi)) = (r.slope.unwrap_or(f64::NAN), r.ci.unwrap_or((f64::NAN, f64::NAN)));
    let head = s >= RATE_BAND.0 && s <= RATE_BAND.1 && lo > 0.0;

    let control = DriftField::new(single_mode_fixture(1.5, 1, 2.0 * std::f64::consts::PI))?;
    let cc = SchemeConfig::new(1.0, 8, vec![0.0], M_CONTROL, 2);
    let c = weak_error_levels(&control, &law, &cc, &tests, &levels, RateOptions::default())?;
    let cs = c.slope.unwrap_or(f64::NAN);
    let ctrl = cs >= CONTROL_BAND.0 && cs <= CONTROL_BAND.1;

    let half = fit_tail(&r.levels, &r.metric);
    let metric: Vec<String> = r.metric.iter().map(|m| format!("{m:.2e}")).collect();
    Ok(Verdict::new(
        head && ctrl,
        format!(
            "fixture slope {s:.3} CI [{lo:.3}, {hi:.3}] (band [{}, {}], CI > 0); control slope {cs:.3} (band [{}, {}])",
            RATE_BAND.0, RATE_BAND.1, CONTROL_BAND.0, CONTROL_BAND.1
        ),
    )
    .note(format!("fixture level differences: {}", metric.join(" ")))
    .note(format!("fixture slope over the finest four levels {half:.3} (diagnostic)")))
}

fn fit_tail(h: &[f64], m: &[f64]) -> f64 {
    let k = h.len() / 2;
    let (x, y): (Vec<f64>, Vec<f64>) = h[k..].iter().zip(&m[k..]).map(|(a, b)| (a.ln(), b.ln())).unzip();
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

fn decomposition() -> Result<Verdict> {
    let law = StableLaw::new(1.5, 1)?;
    let ys: Vec<Vec<f64>> = [-1.0, -0.5, 0.0, 0.5, 1.0].iter().map(|v| vec![*v]).collect();
    let cfg = SchemeConfig::new(1.0, 8, vec![0.0], M_DECOMP, 51);
    let d = error_decomposition(&fixture(), &law, &cfg, 128, 1.0, &ys, 8)?;
    let worst = d.points.iter().map(|p| p.gap.abs() / p.combined_noise).fold(0.0, f64::max);
    let c = error_decomposition(&constant(0.5), &law, &cfg, 128, 1.0, &ys, 8)?;
    let mut floor = 0.0f64;
    let mut mirror = 0.0f64;
    for p in &c.points {
        for i in 1..5 {
            if p.terms[i] != 0.0 {
                floor = floor.max(p.terms[i].abs() / p.stderr[i]);
            }
        }
        mirror = mirror.max((p.terms[1] + p.terms[4]).abs() / (p.stderr[1] + p.stderr[4]));
    }
    Ok(Verdict::new(
        worst <= DECOMP_SIGMAS && floor <= DECOMP_SIGMAS,
        format!("fixture gap {worst:.2} noise units; constant drift Delta_2..5 up to {floor:.1} standard errors (<= {DECOMP_SIGMAS})"),
    )
    .note(format!("constant drift Delta_2 + Delta_5 {mirror:.2} standard errors (diagnostic)")))
}

#[test]
fn acceptance() {
    type Criterion = (&'static str, fn() -> Result<Verdict>);
    let criteria: [Criterion; 11] = [
        ("kernel oracles", kernel_oracles),
        ("aronson sandwich", aronson),
        ("sampler", sampler),
        ("drift identities", drift_identities),
        ("mollified drift scaling", mollified_scaling),
        ("kernel Besov-norm scaling", kernel_norm),
        ("singular integrals", singular),
        ("duhamel residual", duhamel),
        ("scheme heat-kernel bound", heat_kernel_bound),
        ("headline rate", rate),
        ("error decomposition", decomposition),
    ];
    let mut passed = 0;
    let mut errors = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        match f() {
            Ok(v) => {
                passed += v.passed as usize;
                say(&format!(
                    "{} {:>2} {name}: {} [{:.1}s]",
                    if v.passed { "PASS" } else { "FAIL" },
                    i + 1,
                    v.summary,
                    t0.elapsed().as_secs_f64()
                ));
                for n in v.notes {
                    say(&format!("        {n}"));
                }
            }
            Err(e) => {
                say(&format!("FAIL {:>2} {name}: error {e}", i + 1));
                errors.push(format!("{name}: {e}"));
            }
        }
    }
    say(&format!("acceptance: {passed}/{} criteria pass", criteria.len()));
    assert!(errors.is_empty(), "criteria could not be evaluated: {errors:?}");
}
