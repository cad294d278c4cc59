use std::f64::consts::PI;

use num_complex::Complex64;
use sbe::besov_drift::*;
use sbe::numerics::{fit_power_law, gauss_legendre};
use sbe::stable_kernel::StableLaw;
use sbe::Error;

fn law(alpha: f64, d: usize) -> StableLaw {
    StableLaw::new(alpha, d).unwrap()
}

fn constructions(dim: usize) -> Vec<DriftSpec> {
    let mut out = vec![distributional_fixture(1.5, dim, -0.1), single_mode_fixture(1.5, dim, 2.0 * PI)];
    out.push(DriftSpec::new(
        1.5,
        dim,
        16.0,
        BesovParams::sup_norm(-0.1),
        Construction::Constant { value: vec![0.3; dim] },
    ));
    out.push(DriftSpec::new(
        1.5,
        dim,
        16.0,
        BesovParams::sup_norm(-0.1),
        Construction::LipschitzSmooth { amplitude: 1.0 },
    ));
    if dim == 2 {
        for s in out.iter_mut() {
            s.cutoff = 24;
        }
    }
    out
}

/// Piecewise 64-point Gauss-Legendre over the time cells met by `[t, t + h]`.
fn quadrature_step(f: &DriftField, l: &StableLaw, t: f64, h: f64, z: &[f64]) -> Vec<f64> {
    let (x, w) = gauss_legendre(64);
    let cells = f.spec().time_cells as f64;
    let mut cuts = vec![t];
    let mut j = (t * cells).floor() + 1.0;
    while j / cells < t + h {
        cuts.push(j / cells);
        j += 1.0;
    }
    cuts.push(t + h);
    let mut acc = vec![0.0; f.dim()];
    for p in cuts.windows(2) {
        let (a, b) = (p[0], p[1]);
        for (xi, wi) in x.iter().zip(&w) {
            let u = 0.5 * (a + b) + 0.5 * (b - a) * xi;
            let v = f.mollified_drift(l, u, t, z).unwrap();
            for (c, vc) in acc.iter_mut().zip(v) {
                *c += 0.5 * (b - a) * wi * vc;
            }
        }
    }
    acc
}

#[test]
fn integrated_drift_matches_quadrature_for_every_construction() {
    for dim in [1, 2] {
        let l = law(1.5, dim);
        for mut spec in constructions(dim) {
            for modulation in [0.0, 0.4] {
                spec.modulation = modulation;
                let f = DriftField::new(spec.clone()).unwrap();
                for (t, h) in [(0.0, 0.1), (0.3, 1.0 / 64.0), (0.51, 0.07), (0.875, 0.125)] {
                    for z in [0.0, 0.37, 5.1] {
                        let p = vec![z; dim];
                        let exact = f.integrated_step_drift(&l, t, h, &p).unwrap();
                        let quad = quadrature_step(&f, &l, t, h, &p);
                        for (a, b) in exact.iter().zip(&quad) {
                            assert!(
                                (a - b).abs() < 1e-10 * (1.0 + b.abs()),
                                "{} mod {modulation} t={t} h={h}: {a} vs {b}",
                                spec.construction.tag()
                            );
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn closed_forms_for_constant_and_single_mode() {
    let l = law(1.5, 1);
    let c = DriftField::new(DriftSpec::new(
        1.5,
        1,
        16.0,
        BesovParams::sup_norm(-0.1),
        Construction::Constant { value: vec![0.3] },
    ))
    .unwrap();
    for (s, tau) in [(0.5, 0.25), (1.0, 0.0), (0.3, 0.3)] {
        assert_eq!(c.mollified_drift(&l, s, tau, &[1.7]).unwrap(), vec![0.3]);
    }
    for h in [0.1, 1.0 / 8.0, 1.0 / 1024.0] {
        assert_eq!(c.integrated_step_drift(&l, 0.0, h, &[-2.0]).unwrap(), vec![0.3 * h]);
    }

    let f = DriftField::new(single_mode_fixture(1.5, 1, 2.0 * PI)).unwrap();
    for z in [0.0, 0.5, 2.0, -1.3] {
        let m = f.mollified_drift(&l, 0.35, 0.25, &[z]).unwrap()[0];
        assert!((m - (-0.1f64).exp() * z.cos()).abs() < 1e-14);
        let i = f.integrated_step_drift(&l, 0.2, 0.1, &[z]).unwrap()[0];
        assert!((i - (1.0 - (-0.1f64).exp()) * z.cos()).abs() < 1e-12);
        assert!((i - 0.0951626 * z.cos()).abs() < 1e-7);
    }
}

#[test]
fn domain_errors() {
    let l = law(1.5, 1);
    let f = DriftField::new(distributional_fixture(1.5, 1, -0.1)).unwrap();
    assert!(matches!(f.mollified_drift(&l, 0.25, 0.25, &[0.0]), Err(Error::Domain(_))));
    assert!(matches!(f.integrated_step_drift(&l, 0.95, 0.1, &[0.0]), Err(Error::Domain(_))));
    assert!(matches!(f.mollified_drift(&l, 1.5, 0.25, &[0.0]), Err(Error::Domain(_))));
    let other = law(1.8, 1);
    assert!(f.mollified_drift(&other, 0.5, 0.25, &[0.0]).is_err());
    // cutoff rule: K = 512, L = 16 admits h down to 2^-11 but not 2^-14
    assert!(f.check_cutoff(1.0 / 2048.0).is_ok());
    assert!(matches!(f.check_cutoff(1.0 / 16384.0), Err(Error::Configuration(_))));
}

#[test]
fn hermitian_symmetry_and_realness() {
    let mut spec = distributional_fixture(1.5, 2, -0.1);
    spec.cutoff = 12;
    spec.modulation = 0.3;
    let f = DriftField::new(spec).unwrap();
    for cell in [0, 17, 63] {
        for k in [[1i64, 0], [0, 3], [-2, 5], [7, -7]] {
            let a = f.coefficient(&k, cell).unwrap();
            let b = f.coefficient(&[-k[0], -k[1]], cell).unwrap();
            for (x, y) in a.iter().zip(&b) {
                assert_eq!(*x, y.conj());
            }
        }
        assert!(f.coefficient(&[0, 0], cell).unwrap().iter().all(|c| c.im == 0.0));
    }
    // the direct series and the FFT synthesis agree, so the series is real-valued
    let g = TorusGrid::new(2, 32, 16.0).unwrap();
    let w = f.mollified_weights(0.4, 0.3).unwrap();
    let vals = f.grid_values(&g, &w, 1).unwrap();
    let mut out = [0.0; 2];
    for idx in [0, 5, 77, 1000] {
        let p = g.point(idx);
        f.eval_weights(&w, &p, &mut out);
        assert!((out[1] - vals[idx]).abs() < 1e-11);
    }
}

#[test]
fn random_fourier_coefficients_follow_the_recipe() {
    let spec = distributional_fixture(1.5, 1, -0.1);
    let f = DriftField::new(spec).unwrap();
    // |c_k|^2 |k|^(2 beta + 1) is exponential with mean sigma^2 over the modes
    let n = f.mode_count();
    let mean: f64 = (1..=n as i64)
        .map(|k| f.coefficient(&[k], 0).unwrap()[0].norm_sqr() * (k as f64).powf(2.0 * -0.1 + 1.0))
        .sum::<f64>()
        / n as f64;
    assert!((mean - 1.0).abs() < 4.0 / (n as f64).sqrt(), "mean {mean}");
    // same seed, same field
    let g = DriftField::new(distributional_fixture(1.5, 1, -0.1)).unwrap();
    assert_eq!(f.coefficient(&[17], 0), g.coefficient(&[17], 0));
}

#[test]
fn manifest_regenerates_the_same_field() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("drift.txt");
    let spec = distributional_fixture(1.5, 1, -0.1);
    write_manifest(&path, &spec).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("besovdrift v1\n"));
    let back = read_manifest(&path).unwrap();
    let (a, b) = (DriftField::new(spec).unwrap(), DriftField::new(back).unwrap());
    let l = law(1.5, 1);
    for z in [0.0, 3.3] {
        assert_eq!(
            a.integrated_step_drift(&l, 0.0, 0.01, &[z]).unwrap(),
            b.integrated_step_drift(&l, 0.0, 0.01, &[z]).unwrap()
        );
    }
}

fn sup_on_grid(f: &DriftField, w: &ModeWeights) -> f64 {
    let g = TorusGrid::new(1, 8192, f.torus_length()).unwrap();
    lebesgue_norm(&g, &f.grid_values(&g, w, 0).unwrap(), f64::INFINITY)
}

#[test]
fn time_integrated_pointwise_control() {
    let f = DriftField::new(distributional_fixture(1.5, 1, -0.1)).unwrap();
    let expo = 1.0 + -0.1 / 1.5;
    let mut worst = 0.0f64;
    for i in 0..=12 {
        let dt = 1e-4 * 10f64.powf(i as f64 / 4.0);
        let w = f.step_weights(0.5, dt).unwrap();
        worst = worst.max(sup_on_grid(&f, &w) / dt.powf(expo));
    }
    assert!(worst < 100.0, "fitted constant {worst}");
}

#[test]
fn holder_modulus_of_single_mode_matches_closed_form() {
    let l = law(1.5, 1);
    let f = DriftField::new(single_mode_fixture(1.5, 1, 2.0 * PI)).unwrap();
    let zeta = 0.2;
    let (tau, s) = (0.25, 0.35);
    let amp = 1.0 - (-0.1f64).exp();
    // sup over z, z' of |cos z - cos z'| / |z - z'|^zeta = max_delta 2 sin(delta/2) / delta^zeta
    let (mut a, mut b) = (1e-3, PI);
    let g = |d: f64| 2.0 * (d / 2.0).sin() / d.powf(zeta);
    for _ in 0..200 {
        let (c, d) = (a + (b - a) / 3.0, b - (b - a) / 3.0);
        if g(c) < g(d) {
            a = c
        } else {
            b = d
        }
    }
    let exact = amp * g(0.5 * (a + b));
    let pairs = PairGrid::standard(1, 2.0 * PI, 64, 48, 1e-3, PI);
    let brute = holder_modulus_integrated(&f, &l, tau, s, zeta, &pairs).unwrap();
    assert!((brute - exact).abs() < 1e-8 * exact, "{brute} vs {exact}");

    let c = DriftField::new(DriftSpec::zero(1.5, 1)).unwrap();
    assert_eq!(holder_modulus_integrated(&c, &l, tau, s, zeta, &pairs).unwrap(), 0.0);
    let empty = PairGrid {
        base: vec![],
        separations: vec![0.1],
        refine: false,
    };
    assert!(matches!(
        holder_modulus_integrated(&f, &l, tau, s, zeta, &empty),
        Err(Error::InvalidArgument(_))
    ));
    assert!(matches!(
        holder_modulus_integrated(&f, &l, tau, s, 0.45, &pairs),
        Err(Error::Domain(_))
    ));
}

#[test]
fn holder_modulus_scaling_for_random_fourier() {
    let l = law(1.5, 1);
    let f = DriftField::new(distributional_fixture(1.5, 1, -0.1)).unwrap();
    let zeta = 0.2;
    let pairs = PairGrid::standard(1, 16.0, 256, 40, 1e-4, 8.0);
    let hs: Vec<f64> = (0..7).map(|i| 1e-3 * 10f64.powf(i as f64 / 3.0)).collect();
    let vals: Vec<f64> = hs
        .iter()
        .map(|h| holder_modulus_integrated(&f, &l, 0.5, 0.5 + h, zeta, &pairs).unwrap())
        .collect();
    let slope = fit_power_law(&hs, &vals).unwrap().slope;
    let target = 0.3 / 1.5 + (1.0 + 0.1 - zeta) / 1.5;
    eprintln!("holder slope {slope:.4}, target {target:.4}");
    assert!((slope - target).abs() < 0.1, "slope {slope} target {target}");
}

fn kernel_coeffs(g: &TorusGrid, alpha: f64, t: f64) -> Vec<Complex64> {
    (0..g.len())
        .map(|i| Complex64::new((-t * g.xi_norm(i).powf(alpha)).exp() / g.length, 0.0))
        .collect()
}

#[test]
fn thermic_norm_of_kernel_scales() {
    let g = TorusGrid::new(1, 4096, 8.0).unwrap();
    let alpha = 1.5;
    let ts: Vec<f64> = (0..9).map(|i| 1e-3 * 10f64.powf(i as f64 / 4.0)).collect();
    for ell in [f64::INFINITY, 2.0] {
        let lc = conjugate(ell);
        let target = -0.5 / alpha - 1.0 / (alpha * lc);
        let norms: Vec<f64> = ts
            .iter()
            .map(|t| thermic_parts(&g, &kernel_coeffs(&g, alpha, *t), 0.5, ell, 1.0, alpha).unwrap().total())
            .collect();
        let slope = fit_power_law(&ts, &norms).unwrap().slope;
        assert!((slope - target).abs() < 0.05, "ell={ell}: slope {slope} target {target}");
    }
}

#[test]
fn thermic_norm_contracts_under_the_semigroup() {
    let l = law(1.5, 1);
    let f = DriftField::new(distributional_fixture(1.5, 1, -0.1)).unwrap();
    let g = TorusGrid::new(1, 2048, 16.0).unwrap();
    for (ell, m) in [(f64::INFINITY, f64::INFINITY), (2.0, 2.0), (1.0, 1.0)] {
        let raw = section_thermic_norm(&f, &l, &g, 0.5, 0.0, 0, -0.1, ell, m).unwrap();
        for t in [0.01, 0.1] {
            let smooth = section_thermic_norm(&f, &l, &g, 0.5, t, 0, -0.1, ell, m).unwrap();
            assert!(smooth <= raw, "ell={ell} t={t}: {smooth} > {raw}");
        }
    }
}

/// Random real trigonometric polynomial with modes up to `kmax` on `[0, 2 pi)`.
fn random_trig(g: &TorusGrid, kmax: i64, seed: u64) -> Vec<f64> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let terms: Vec<(i64, f64, f64)> = (0..=kmax)
        .map(|k| (k, rng.random_range(-1.0..1.0), rng.random_range(0.0..2.0 * PI)))
        .collect();
    (0..g.len())
        .map(|i| {
            let x = g.point(i)[0];
            terms.iter().map(|(k, a, ph)| a * (*k as f64 * x + ph).cos()).sum()
        })
        .collect()
}

#[test]
fn duality_product_and_young_slack() {
    let g = TorusGrid::new(1, 256, 2.0 * PI).unwrap();
    let alpha = 1.5;
    let norm = |v: &[f64], th: f64, ell: f64, m: f64| thermic_norm(&g, v, th, ell, m, alpha).unwrap();
    let (mut dual, mut prod, mut young) = (0.0f64, 0.0f64, 0.0f64);
    for seed in 0..20u64 {
        let f = random_trig(&g, 12, 2 * seed);
        let h = random_trig(&g, 12, 2 * seed + 1);
        let pairing: f64 = f.iter().zip(&h).map(|(a, b)| a * b).sum::<f64>() * g.cell();
        dual = dual.max(pairing.abs() / (norm(&f, 0.25, 2.0, 2.0) * norm(&h, -0.25, 2.0, 2.0)));

        let fh: Vec<f64> = f.iter().zip(&h).map(|(a, b)| a * b).collect();
        prod = prod.max(norm(&fh, -0.1, 2.0, 2.0) / (norm(&f, 0.2, f64::INFINITY, f64::INFINITY) * norm(&h, -0.1, 2.0, 2.0)));

        // periodic convolution through the coefficients
        let (cf, ch) = (g.forward(&f), g.forward(&h));
        let cc: Vec<Complex64> = cf.iter().zip(&ch).map(|(a, b)| a * b * g.length).collect();
        let conv = g.inverse(&cc);
        young = young.max(norm(&conv, 0.2, 2.0, 2.0) / (norm(&f, -0.3, 1.0, 2.0) * norm(&h, 0.5, 2.0, 2.0)));
    }
    eprintln!("slack: duality {dual:.3}, product {prod:.3}, young {young:.3}");
    assert!(dual <= 10.0 && prod <= 10.0 && young <= 10.0);
}

#[test]
fn one_step_drift_is_negligible_at_noise_scale() {
    let l = law(1.5, 1);
    let f = DriftField::new(distributional_fixture(1.5, 1, -0.1)).unwrap();
    let h = 1.0 / 32.0;
    let mut worst = 0.0f64;
    for frac in [0.25, 0.5, 1.0] {
        let tau = 0.5;
        let s = tau + frac * h;
        // largest displacement over z'
        let w = f.step_weights(tau, s - tau).unwrap();
        let shift = sup_on_grid(&f, &w);
        for mult in [1.0, 2.0, 10.0] {
            let u = mult * (s - tau);
            let scale = u.powf(1.0 / 1.5);
            for j in -100..=100 {
                let z = 5.0 * scale * j as f64 / 100.0;
                for sgn in [-1.0, 1.0] {
                    let p = l.pdf(u, &[z - sgn * shift]);
                    worst = worst.max(p / l.bound_radial(u, z.abs()));
                }
            }
        }
    }
    assert!(worst < 100.0, "fitted constant {worst}");
}

#[test]
fn parameter_validation_examples() {
    let c = validate_parameters(1.5, 1, &BesovParams::sup_norm(-0.1));
    assert!(c.valid && (c.gamma - 0.3).abs() < 1e-14);
    assert!(!validate_parameters(1.5, 1, &BesovParams::sup_norm(-0.3)).valid);
    let c = validate_parameters(1.8, 1, &BesovParams::sup_norm(-0.35));
    assert!(c.valid && (c.gamma - 0.1).abs() < 1e-14);
}

#[test]
fn lookup_table_matches_mode_sum() {
    let l = law(1.5, 1);
    let f = DriftField::new(distributional_fixture(1.5, 1, -0.1)).unwrap();
    for h in [1.0 / 2048.0, 1.0 / 64.0, 0.125] {
        let w = f.step_weights(0.0, h).unwrap();
        let t = DriftTable::new(&f, &w, DEFAULT_TABLE_POINTS).unwrap();
        let scale = sup_on_grid(&f, &w);
        let mut worst = 0.0f64;
        for j in 0..2000 {
            let z = -20.0 + 40.0 * (j as f64 + 0.123) / 2000.0;
            let exact = f.integrated_step_drift(&l, 0.0, h, &[z]).unwrap()[0];
            worst = worst.max((t.eval(z) - exact).abs());
        }
        assert!(worst < 1e-6 * scale, "h={h}: {worst} vs scale {scale}");
    }
}
