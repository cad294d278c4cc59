use proptest::prelude::*;
use sbe::density_weak_error::Estimator;
use sbe::harness::{exit_code, run, DriftKind, ExperimentConfig, Mode};
use sbe::Error;

fn cfg(text: &str) -> ExperimentConfig {
    ExperimentConfig::parse(text).unwrap()
}

#[test]
fn defaults_round_trip() {
    let c = ExperimentConfig::default();
    assert_eq!(ExperimentConfig::parse(&c.serialize()).unwrap(), c);
}

#[test]
fn parse_errors_carry_line_and_key() {
    let text = "# comment\nalpha = 1.5\n\nsteps = many\n";
    match ExperimentConfig::parse(text) {
        Err(Error::Parse { line, key, .. }) => {
            assert_eq!(line, 4);
            assert_eq!(key, "steps");
        }
        other => panic!("{other:?}"),
    }
    assert!(matches!(ExperimentConfig::parse("alpha = 1\nalpha = 2\n"), Err(Error::Parse { line: 2, .. })));
    assert!(matches!(ExperimentConfig::parse("colour = red\n"), Err(Error::Parse { line: 1, .. })));
    assert!(matches!(ExperimentConfig::parse("no equals sign\n"), Err(Error::Parse { line: 1, .. })));
}

#[test]
fn kernel_check_cauchy_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = cfg("alpha = 1.0\nsampler_draws = 20000\n");
    c.mode = Mode::KernelCheck;
    let res = run(&c, dir.path());
    assert_eq!(exit_code(&res), 0);
    let o = res.unwrap();
    assert!(o.report.contains("cauchy"), "{}", o.report);
    assert!(dir.path().join("kernel_check.csv").exists());
    assert!(dir.path().join("manifest.txt").exists());
}

#[test]
fn zero_drift_rate_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = cfg("drift = zero\npaths = 2000\nlevels = 8, 16, 32, 64\nbootstrap = 50\n");
    c.mode = Mode::Rate;
    let o = run(&c, dir.path()).unwrap();
    assert!(o.passed);
    assert!(o.report.contains("exact"), "{}", o.report);
    let csv = std::fs::read_to_string(dir.path().join("rate.csv")).unwrap();
    for line in csv.lines().skip(1) {
        assert_eq!(line.split(',').nth(2).unwrap().parse::<f64>().unwrap(), 0.0, "{line}");
    }
}

#[test]
fn invalid_parameters_are_a_configuration_error() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = cfg("beta = -0.4\n");
    c.mode = Mode::Simulate;
    let res = run(&c, dir.path());
    assert_eq!(exit_code(&res), 2);
    match res {
        Err(Error::Configuration(m)) => assert!(m.contains("beta"), "{m}"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn unwritable_output_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("plain");
    std::fs::write(&file, "x").unwrap();
    let mut c = cfg("alpha = 1.0\n");
    c.mode = Mode::KernelCheck;
    assert_eq!(exit_code(&run(&c, &file.join("sub"))), 3);
}

#[test]
fn reruns_reproduce_csv_bytes() {
    let c = {
        let mut c = cfg("paths = 3000\nsteps = 8\ndrift = random-fourier\ncutoff = 64\ntrajectories = true\n");
        c.mode = Mode::Simulate;
        c
    };
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    run(&c, a.path()).unwrap();
    // the manifest alone must be enough to rerun
    let again = ExperimentConfig::load(&a.path().join("manifest.txt")).unwrap();
    assert_eq!(again, c);
    run(&again, b.path()).unwrap();
    for f in ["ensemble.csv", "trajectories.csv", "density.csv", "manifest.txt"] {
        let x = std::fs::read(a.path().join(f)).unwrap();
        let y = std::fs::read(b.path().join(f)).unwrap();
        assert!(!x.is_empty());
        assert_eq!(x, y, "{f}");
    }
}

#[test]
fn drift_check_identities_hold_on_the_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = ExperimentConfig::default();
    c.mode = Mode::DriftCheck;
    let o = run(&c, dir.path()).unwrap();
    // the sup-norm scaling slope carries a log factor and is judged by the acceptance suite
    for line in o.report.lines().filter(|l| !l.contains("mollified")) {
        assert!(line.starts_with("PASS"), "{line}");
    }
    assert!(o.report.contains("mollified drift scaling"));
}

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![-1e3..1e3f64, Just(f64::INFINITY), Just(0.1 + 0.2)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn serialize_round_trips(
        mode in 0usize..7,
        alpha in 0.1..2.0f64,
        beta in -1.0..0.0f64,
        p in finite(),
        drift in 0usize..5,
        value in prop::collection::vec(-5.0..5.0f64, 1..3),
        steps in 1usize..1000,
        seed in any::<u64>(),
        time in prop::option::of(0.01..3.0f64),
        probes in prop::collection::vec(prop::collection::vec(-3.0..3.0f64, 1..3), 1..6),
        est in 0usize..3,
        flags in any::<(bool, bool, bool)>(),
    ) {
        let modes = [Mode::KernelCheck, Mode::DriftCheck, Mode::Simulate, Mode::Rate, Mode::Duhamel, Mode::Decompose, Mode::Inequalities];
        let drifts = [DriftKind::Zero, DriftKind::Constant, DriftKind::SingleMode, DriftKind::RandomFourier, DriftKind::LipschitzSmooth];
        let c = ExperimentConfig {
            mode: modes[mode],
            alpha,
            beta,
            p,
            drift: drifts[drift],
            drift_value: value,
            steps,
            seed,
            time,
            probes,
            estimator: [Estimator::Histogram, Estimator::Kde, Estimator::Conditional][est],
            allow_invalid: flags.0,
            trajectories: flags.1,
            plot: flags.2,
            ..ExperimentConfig::default()
        };
        prop_assert_eq!(ExperimentConfig::parse(&c.serialize()).unwrap(), c);
    }
}
