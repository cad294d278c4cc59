// Histogram, kernel and conditional estimates of the scheme density.

use sbe::besov_drift::{distributional_fixture, DriftField};
use sbe::density_weak_error::{conditional_density, estimate_density, BandwidthRule, Estimator, Window};
use sbe::euler_sim::{simulate_grid, SchemeConfig};
use sbe::stable_kernel::StableLaw;

pub fn run_example() -> sbe::Result<()> {
    let law = StableLaw::new(1.5, 1)?;
    let field = DriftField::new(distributional_fixture(1.5, 1, -0.1))?;
    let cfg = SchemeConfig::new(1.0, 16, vec![0.0], 20_000, 5);
    let window = Window::new(4.0, 17);
    let e = simulate_grid(&field, &law, &cfg)?;
    let rule = BandwidthRule::Scaled { c_b: 1.0 };
    let hist = estimate_density(&e, &law, &[0.0], 1.0, window, Estimator::Histogram, rule)?;
    let kde = estimate_density(&e, &law, &[0.0], 1.0, window, Estimator::Kde, rule)?;
    // no bandwidth: averages p(h, y - last position - last drift step)
    let cond = conditional_density(&field, &law, &cfg, 1.0, window)?;
    println!("    y  histogram       kde  conditional   stderr");
    for i in (0..window.points).step_by(2) {
        println!(
            "{:>5.1}  {:>9.4} {:>9.4}  {:>11.4}  {:.1e}",
            kde.point(i)[0],
            hist.values[i],
            kde.values[i],
            cond.estimate.values[i],
            cond.stderr[i]
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
