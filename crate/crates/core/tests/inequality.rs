use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sbe::besov_drift::BesovParams;
use sbe::inequality_lab::*;
use sbe::stable_kernel::StableLaw;
use sbe::Error;
use statrs::function::beta::beta;

#[test]
fn beta_identity_examples() {
    let r = beta_identity(0.5, 0.5, 0.0, 1.0).unwrap();
    assert!((r.closed_form - std::f64::consts::PI).abs() < 1e-12);
    assert!((r.quadrature - std::f64::consts::PI).abs() < 1e-10);

    let r = beta_identity(0.0, 0.0, 0.0, 2.0).unwrap();
    assert!((r.closed_form - 2.0).abs() < 1e-14);
    assert!((r.quadrature - 2.0).abs() < 1e-12);

    let r = beta_identity(0.3, 0.6, 0.5, 1.5).unwrap();
    assert!((r.closed_form - beta(0.7, 0.4)).abs() < 1e-13);
    assert!(r.relative_gap() < 1e-10);
}

#[test]
fn beta_identity_on_random_tuples() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let a = -1.0 + 1.95 * rng.random::<f64>();
        let b = -1.0 + 1.95 * rng.random::<f64>();
        let u = 2.0 * rng.random::<f64>();
        let t = u + 0.05 + 3.0 * rng.random::<f64>();
        let r = beta_identity(a, b, u, t).unwrap();
        assert!(r.relative_gap() < 1e-10, "a={a} b={b} u={u} t={t}: {r:?}");
    }
}

#[test]
fn beta_identity_names_the_violated_predicate() {
    for (args, needle) in [((1.0, 0.2, 0.0, 1.0), "a < 1"), ((0.2, 1.3, 0.0, 1.0), "b < 1"), ((0.2, 0.2, 1.0, 1.0), "u < t")] {
        match beta_identity(args.0, args.1, args.2, args.3) {
            Err(Error::Domain(m)) => assert!(m.contains(needle), "{m}"),
            other => panic!("expected a domain error, got {other:?}"),
        }
    }
}

#[test]
fn degenerate_full_variant_carries_the_bracket_factor() {
    // with c = d = 0 both brackets equal 2
    for (a, b, r) in [(0.3, 0.2, 1.0), (0.1, 0.4, 1.7), (-0.2, 0.3, 2.5)] {
        let s = SingularIntegralSpec::new(a, b, 0.0, 0.0, r, 0.4, 1.3);
        let ratio = singular_bound_ratio(&s, Variant::Full).unwrap();
        let expected = 4.0 * beta(1.0 - a * r, 1.0 - b * r).powf(1.0 / r);
        assert!((ratio - expected).abs() < 1e-9 * expected, "{ratio} vs {expected}");
    }
    for r in [1.0, 1.5, 3.0] {
        let s = SingularIntegralSpec::new(0.0, 0.0, 0.0, 0.0, r, 0.4, 1.3);
        assert!((singular_bound_ratio(&s, Variant::Full).unwrap() - 4.0).abs() < 1e-12);
    }
}

#[test]
fn side_variants_match_closed_forms() {
    // b = 0: int_0^v s^{-ar'} 2^{r'} ds = 2^{r'} v^{1-ar'} / (1 - ar')
    let (a, r, v, t) = (0.3, 1.5, 0.4, 1.1);
    let s = SingularIntegralSpec::new(a, 0.0, 0.0, 0.0, r, v, t);
    let exact = (2f64.powf(r) * v.powf(1.0 - a * r) / (1.0 - a * r)).powf(1.0 / r);
    assert!((s.lhs(Variant::Left).unwrap() - exact).abs() < 1e-10 * exact);
    let mirrored = SingularIntegralSpec::new(a, 0.0, 0.0, 0.0, r, t - v, t);
    assert!((mirrored.lhs(Variant::Right).unwrap() - exact).abs() < 1e-10 * exact);
    // the right variant of (v) is the left variant of (t - v) in general
    let s = SingularIntegralSpec::new(0.2, 0.35, 0.0, 0.0, 1.3, 0.3, 1.0);
    let m = SingularIntegralSpec { v: 0.7, ..s };
    assert!((s.lhs(Variant::Left).unwrap() - m.lhs(Variant::Right).unwrap()).abs() < 1e-10);
}

#[test]
fn predicates_are_checked_before_integrating() {
    let s = SingularIntegralSpec::new(0.5, 0.1, 0.3, 0.3, 1.0, 0.5, 1.0);
    match singular_bound_ratio(&s, Variant::Full) {
        Err(Error::Domain(m)) => assert!(m.contains("r'(a+c+d)"), "{m}"),
        other => panic!("expected a domain error, got {other:?}"),
    }
    // negative c: r'(a+c+d) < 1 but the a-side power alone diverges
    let s = SingularIntegralSpec::new(1.1, 0.1, -0.5, 0.0, 1.0, 0.5, 1.0);
    assert!(!s.admissible(Variant::Full));
    assert!(blow_up_guard(&s, Variant::Full).unwrap().diverges);
    let s = SingularIntegralSpec::new(0.6, 0.5, 0.0, 0.0, 1.0, 0.5, 1.0);
    match singular_bound_ratio(&s, Variant::Left) {
        Err(Error::Domain(m)) => assert!(m.contains("r'(a+b)"), "{m}"),
        other => panic!("expected a domain error, got {other:?}"),
    }
}

#[test]
fn blow_up_guard_separates_admissible_and_violating() {
    let good = sample_admissible(200, &SweepRanges::default(), 7);
    for v in Variant::ALL {
        for s in &good {
            assert!(!blow_up_guard(s, v).unwrap().diverges, "{v}: {s:?}");
        }
        for s in sample_violating(20, v, 3) {
            assert!(!s.admissible(v));
            assert!(blow_up_guard(&s, v).unwrap().diverges, "{v}: {s:?}");
        }
    }
}

#[test]
fn sweep_ratios_are_finite() {
    let tuples = sample_admissible(200, &SweepRanges::default(), 7);
    let sweep = singular_sweep(&tuples).unwrap();
    assert_eq!(sweep.rows.len(), 600);
    assert!(sweep.all_finite());
    assert!(sweep.rows.iter().all(|r| r.ratio > 0.0));
    let csv = sweep.to_csv();
    assert!(csv.starts_with("variant,a,b,c,d,r_prime,ratio\n"));
    assert_eq!(csv.lines().count(), 601);
}

#[test]
fn gap_and_rate_examples() {
    let g = gap_and_rate(1.5, 1, &BesovParams::sup_norm(-0.1), 0.015);
    assert!((g.gamma - 0.3).abs() < 1e-12);
    assert!((g.rate - 0.19).abs() < 1e-12);
    assert!(g.valid);
    let g = gap_and_rate(1.8, 1, &BesovParams::sup_norm(-0.35), 0.0);
    assert!((g.gamma - 0.1).abs() < 1e-12);
    assert!((g.rate - 0.1 / 1.8).abs() < 1e-12);
    let g = gap_and_rate(1.5, 1, &BesovParams::sup_norm(-0.4), 0.0);
    assert!(g.gamma <= 0.0);
    assert!(!g.valid);
}

#[test]
fn gap_is_increasing_in_beta() {
    let mut last = f64::NEG_INFINITY;
    for i in 0..50 {
        let beta = -0.49 + 0.01 * i as f64;
        let g = gap_and_rate(1.5, 1, &BesovParams::sup_norm(beta), 0.0);
        assert!(g.gamma > last);
        let up = gap_and_rate(1.5, 1, &BesovParams::sup_norm(beta + 1e-6), 0.0);
        assert!(((up.gamma - g.gamma) / 1e-6 - 2.0).abs() < 1e-6);
        last = g.gamma;
    }
}

#[test]
fn product_norm_examples() {
    let law = StableLaw::new(1.5, 1).unwrap();
    let b = BesovParams::sup_norm(-0.1);
    let grid = ProductGrid::standard(1);
    let r = product_norm_spot_check(&law, &b, 0.5, 1.0, &[0.0], &[0.0], 0, 0.5, grid).unwrap();
    assert!(r.ratio.is_finite() && r.ratio > 0.0 && r.ratio < 100.0, "{r:?}");

    let ratios: Vec<f64> = [0.1, 0.3, 0.5, 0.7, 0.9]
        .iter()
        .map(|s| product_norm_spot_check(&law, &b, *s, 1.0, &[0.0], &[0.0], 0, 0.5, grid).unwrap().ratio)
        .collect();
    let (lo, hi) = ratios.iter().fold((f64::MAX, 0.0f64), |(l, h), v| (l.min(*v), h.max(*v)));
    assert!(hi / lo < 5.0, "{ratios:?}");

    let r = product_norm_spot_check(&law, &b, 0.5, 1.0, &[0.0], &[0.3], 1, 0.5, grid).unwrap();
    assert!(r.ratio.is_finite() && r.ratio > 0.0 && r.ratio < 100.0, "{r:?}");
}

#[test]
fn product_norm_rejects_a_coarse_grid() {
    let law = StableLaw::new(1.5, 1).unwrap();
    let b = BesovParams::sup_norm(-0.1);
    let coarse = ProductGrid { periods: 64.0, points: 1 << 10 };
    assert!(matches!(
        product_norm_spot_check(&law, &b, 0.1, 1.0, &[0.0], &[0.0], 0, 0.5, coarse),
        Err(Error::Configuration(_))
    ));
    assert!(matches!(
        product_norm_spot_check(&law, &b, 0.5, 1.0, &[0.0], &[0.0], 0, 0.05, ProductGrid::standard(1)),
        Err(Error::InvalidArgument(_))
    ));
}
