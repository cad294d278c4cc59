// Level differences of bounded test functions and the fitted weak rate.

use sbe::besov_drift::{distributional_fixture, single_mode_fixture, DriftField};
use sbe::density_weak_error::{weak_error_levels, RateOptions, TestFunction};
use sbe::euler_sim::SchemeConfig;
use sbe::stable_kernel::StableLaw;

pub fn run_example() -> sbe::Result<()> {
    let law = StableLaw::new(1.5, 1)?;
    let tests = TestFunction::standard_set(&[0.0], 1.5, 1.0);
    let cfg = SchemeConfig::new(1.0, 8, vec![0.0], 10_000, 1);
    let levels = [8, 16, 32, 64, 128];
    let opts = RateOptions {
        bootstrap: 200,
        ..RateOptions::default()
    };
    let rough = DriftField::new(distributional_fixture(1.5, 1, -0.1))?;
    let r = weak_error_levels(&rough, &law, &cfg, &tests, &levels, opts)?;
    print!("{}", r.summary());
    print!("{}", r.to_csv());

    let smooth = DriftField::new(single_mode_fixture(1.5, 1, 2.0 * std::f64::consts::PI))?;
    let c = weak_error_levels(&smooth, &law, &cfg, &tests, &levels, opts)?;
    println!("smooth drift slope {:.3}", c.slope.unwrap_or(f64::NAN));
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
