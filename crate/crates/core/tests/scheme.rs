use std::f64::consts::PI;

use sbe::besov_drift::*;
use sbe::euler_sim::*;
use sbe::numerics::gauss_legendre;
use sbe::stable_kernel::{cdf_1d, IncrementSampler, StableLaw};
use sbe::Error;

fn law(alpha: f64, d: usize) -> StableLaw {
    StableLaw::new(alpha, d).unwrap()
}

fn constant(dim: usize, c: f64) -> DriftField {
    DriftField::new(DriftSpec::new(
        1.5,
        dim,
        16.0,
        BesovParams::sup_norm(-0.1),
        Construction::Constant { value: vec![c; dim] },
    ))
    .unwrap()
}

fn noise_stream(l: &StableLaw, seed: u64, path: u64, dt: f64, n: usize) -> Vec<Vec<f64>> {
    let mut s = IncrementSampler::new(l, seed, path);
    (0..n).map(|_| s.next_increment(dt)).collect()
}

#[test]
fn zero_drift_terminal_law_is_the_noise() {
    let l = law(1.5, 1);
    let f = DriftField::new(DriftSpec::zero(1.5, 1)).unwrap();
    let cfg = SchemeConfig::new(1.0, 8, vec![0.5], 100_000, 11);
    let e = simulate_grid(&f, &l, &cfg).unwrap();
    let mut x: Vec<f64> = e.terminal().iter().map(|v| v - 0.5).collect();
    x.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = x.len() as f64;
    let mut ks = 0.0f64;
    for (i, v) in x.iter().enumerate().step_by(7) {
        let c = cdf_1d(&l, 1.0, *v).unwrap();
        ks = ks.max((c - i as f64 / n).abs()).max(((i + 1) as f64 / n - c).abs());
    }
    assert!(ks * n.sqrt() < 1.628, "KS statistic {}", ks * n.sqrt());
}

#[test]
fn constant_drift_is_exact() {
    let l = law(1.5, 1);
    let c = 0.3;
    let f = constant(1, c);
    let mut cfg = SchemeConfig::new(1.0, 16, vec![0.2], 4, 5);
    cfg.keep_trajectories = true;
    let e = simulate_grid(&f, &l, &cfg).unwrap();
    let h = 1.0 / 16.0;
    for p in 0..4 {
        let z = noise_stream(&l, 5, p as u64, h, 16);
        // the exact solution x + c t + Z_t from the same increments: bitwise
        let mut zsum = 0.0;
        for k in 0..16 {
            zsum += z[k][0];
            let exact = 0.2 + c * ((k + 1) as f64 * h) + zsum;
            assert_eq!(e.grid_position(p, k + 1).unwrap()[0], exact);
        }
    }
}

#[test]
fn single_mode_two_steps_by_hand() {
    let l = law(1.5, 1);
    let f = DriftField::new(single_mode_fixture(1.5, 1, 2.0 * PI)).unwrap();
    let cfg = SchemeConfig::new(1.0, 2, vec![0.4], 1, 77);
    let e = simulate_grid(&f, &l, &cfg).unwrap();
    let z = noise_stream(&l, 77, 0, 0.5, 2);
    let m = 1.0 - (-0.5f64).exp();
    let x1 = 0.4 + m * 0.4f64.cos() + z[0][0];
    let x2 = x1 + m * x1.cos() + z[1][0];
    assert!((e.terminal()[0] - x2).abs() < 1e-12);
}

#[test]
fn continuous_extension() {
    let l = law(1.5, 1);
    let f = DriftField::new(distributional_fixture(1.5, 1, -0.1)).unwrap();
    let mut cfg = SchemeConfig::new(1.0, 8, vec![0.0], 64, 3);
    cfg.off_grid_times = vec![0.3];
    cfg.keep_trajectories = true;
    let e = simulate_grid(&f, &l, &cfg).unwrap();
    // grid times: identical values
    let at = simulate_continuous(&f, &l, &cfg, 0.5).unwrap();
    for p in 0..64 {
        assert_eq!(at[p], e.grid_position(p, 4).unwrap()[0]);
    }
    assert!(matches!(simulate_continuous(&f, &l, &cfg, 1.2), Err(Error::Domain(_))));
    assert!(matches!(simulate_continuous(&f, &l, &cfg, 0.0), Err(Error::Domain(_))));
    // mid-step: drift part against Gauss-Legendre quadrature of the mollified drift
    let q = e.time_index(0.3).unwrap();
    let res = cfg.noise_resolution().unwrap() as usize;
    let (xg, wg) = gauss_legendre(64);
    for p in 0..8 {
        let xk = e.grid_position(p, 2).unwrap()[0];
        let z = noise_stream(&l, 3, p as u64, 1.0 / res as f64, res);
        let per = res / 8;
        let noise: f64 = (2 * per..(2 * per + (0.05 * res as f64).round() as usize)).map(|j| z[j][0]).sum();
        let quad: f64 = xg
            .iter()
            .zip(&wg)
            .map(|(x, w)| {
                let u = 0.25 + 0.025 * (1.0 + x);
                0.025 * w * f.mollified_drift(&l, u, 0.25, &[xk]).unwrap()[0]
            })
            .sum();
        let got = e.position(p, q)[0] - xk - noise;
        assert!((got - quad).abs() < 1e-10, "{got} vs {quad}");
    }
    // constant drift: x + c t + Z_t
    let c = constant(1, -0.7);
    let xt = simulate_continuous(&c, &l, &cfg, 0.3).unwrap();
    for p in 0..8 {
        let z = noise_stream(&l, 3, p as u64, 1.0 / res as f64, res);
        let zt: f64 = (0..(0.3 * res as f64).round() as usize).map(|j| z[j][0]).sum();
        assert_eq!(xt[p], -0.7 * 0.3 + zt);
    }
}

#[test]
fn reference_shares_noise() {
    let l = law(1.5, 1);
    let mut cfg = SchemeConfig::new(1.0, 8, vec![0.0], 200, 9);
    cfg.noise_steps = Some(128);
    let zero = DriftField::new(DriftSpec::zero(1.5, 1)).unwrap();
    let coarse = simulate_grid(&zero, &l, &cfg).unwrap();
    let fine = reference_ensemble(&zero, &l, &cfg, 16).unwrap();
    assert_eq!(coarse.terminal(), fine.terminal());

    let c = constant(1, 0.4);
    let coarse = simulate_grid(&c, &l, &cfg).unwrap();
    let fine = reference_ensemble(&c, &l, &cfg, 16).unwrap();
    for (a, b) in coarse.terminal().iter().zip(fine.terminal()) {
        assert!((a - b).abs() < 1e-12 * (1.0 + b.abs()));
    }

    cfg.noise_steps = None;
    assert!(matches!(reference_ensemble(&c, &l, &cfg, 16), Err(Error::Configuration(_))));
    assert!(reference_ensemble(&c, &l, &cfg, 2).is_err());
}

#[test]
fn lipschitz_coarse_fine_gap_shrinks() {
    let l = law(1.5, 1);
    let f = DriftField::new(single_mode_fixture(1.5, 1, 2.0 * PI)).unwrap();
    let mut gaps = Vec::new();
    for n in [2usize, 8, 32] {
        let mut cfg = SchemeConfig::new(1.0, n, vec![0.0], 4000, 21);
        cfg.noise_steps = Some(512);
        let a = simulate_grid(&f, &l, &cfg).unwrap().terminal();
        let b = reference_ensemble(&f, &l, &cfg, 16).unwrap().terminal();
        gaps.push(a.iter().zip(&b).map(|(x, y)| (x - y).abs()).sum::<f64>() / a.len() as f64);
    }
    assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2], "{gaps:?}");
}

#[test]
fn deterministic_across_thread_counts() {
    let l = law(1.5, 1);
    let f = DriftField::new(distributional_fixture(1.5, 1, -0.1)).unwrap();
    let cfg = SchemeConfig::new(1.0, 16, vec![0.0], 3000, 1);
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| simulate_grid(&f, &l, &cfg).unwrap().positions)
    };
    let a = run(1);
    assert_eq!(a, run(3));
    assert_eq!(a, simulate_grid(&f, &l, &cfg).unwrap().positions);
}

#[test]
fn two_dimensional_scheme_runs() {
    let l = law(1.5, 2);
    let mut spec = distributional_fixture(1.5, 2, -0.1);
    spec.cutoff = 16;
    let f = DriftField::new(spec).unwrap();
    let cfg = SchemeConfig::new(1.0, 8, vec![0.0, 1.0], 500, 4);
    let e = simulate_grid(&f, &l, &cfg).unwrap();
    assert_eq!(e.terminal().len(), 1000);
    assert!(e.positions.iter().all(|v| v.is_finite()));
}

#[test]
fn export_and_replay() {
    let dir = tempfile::tempdir().unwrap();
    let l = law(1.5, 1);
    let f = DriftField::new(distributional_fixture(1.5, 1, -0.1)).unwrap();
    let mut cfg = SchemeConfig::new(1.0, 4, vec![0.0], 10, 8);
    cfg.off_grid_times = vec![0.1];
    cfg.keep_trajectories = true;
    let e = simulate_grid(&f, &l, &cfg).unwrap();
    let csv = dir.path().join("ens.csv");
    write_ensemble_csv(&csv, &e).unwrap();
    let rows = read_ensemble_csv(&csv).unwrap();
    assert_eq!(rows.len(), 20);
    assert_eq!(rows[1].2[0], e.position(0, 1)[0]);
    write_trajectories_csv(&dir.path().join("traj.csv"), &e).unwrap();
    let man = dir.path().join("run.json");
    write_provenance(&man, &e.provenance).unwrap();
    let p = read_provenance(&man).unwrap();
    assert_eq!(p, e.provenance);
    assert_eq!(replay(&p).unwrap().positions, e.positions);
}

#[test]
fn configuration_errors() {
    let l = law(1.5, 1);
    let f = DriftField::new(distributional_fixture(1.5, 1, -0.1)).unwrap();
    // step below the cutoff rule
    let cfg = SchemeConfig::new(1.0, 1 << 14, vec![0.0], 1, 0);
    assert!(matches!(simulate_grid(&f, &l, &cfg), Err(Error::Configuration(_))));
    // beta outside the admissible window
    let bad = DriftField::new(distributional_fixture(1.5, 1, -0.3)).unwrap();
    let mut cfg = SchemeConfig::new(1.0, 8, vec![0.0], 1, 0);
    assert!(matches!(simulate_grid(&bad, &l, &cfg), Err(Error::Configuration(_))));
    cfg.allow_invalid = true;
    assert!(simulate_grid(&bad, &l, &cfg).is_ok());
    cfg.horizon = 1.5;
    assert!(matches!(simulate_grid(&f, &l, &cfg), Err(Error::Configuration(_))));
}
