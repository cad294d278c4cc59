// Check the scheme's Duhamel representation against a kernel estimate of its density.

use sbe::besov_drift::{single_mode_fixture, DriftField};
use sbe::density_weak_error::{duhamel_residual, DuhamelOptions};
use sbe::euler_sim::{simulate_grid, SchemeConfig};
use sbe::stable_kernel::StableLaw;

pub fn run_example() -> sbe::Result<()> {
    let law = StableLaw::new(1.5, 1)?;
    let field = DriftField::new(single_mode_fixture(1.5, 1, 16.0))?;
    let mut cfg = SchemeConfig::new(1.0, 4, vec![0.0], 20_000, 12);
    cfg.keep_trajectories = true;
    let e = simulate_grid(&field, &law, &cfg)?;
    let r = duhamel_residual(&e, &field, &law, 1.0, DuhamelOptions::default())?;
    println!("sup residual {:.4}, rms {:.4}, kde noise {:.4}", r.sup, r.l2, r.kde_noise);
    for i in (0..r.points.len()).step_by(8) {
        println!("y = {:>5.2}: kde {:.4}, duhamel {:.4}", r.points[i][0], r.lhs[i], r.rhs[i]);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
