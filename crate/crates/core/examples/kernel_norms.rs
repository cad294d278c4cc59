// Thermic Besov norms and the small-time scaling of the kernel's norm.

use sbe::besov_drift::{thermic_norm, TorusGrid};
use sbe::harness::checks::kernel_norm_scaling_check;
use sbe::stable_kernel::StableLaw;

pub fn run_example() -> sbe::Result<()> {
    let law = StableLaw::new(1.5, 1)?;
    let grid = TorusGrid::new(1, 2048, 8.0)?;
    for t in [0.01, 0.1] {
        // centre the kernel at 0 on the periodic grid
        let values: Vec<f64> = (0..grid.len())
            .map(|i| {
                let x = grid.point(i)[0];
                law.pdf(t, &[if x < 4.0 { x } else { x - 8.0 }])
            })
            .collect();
        let n = thermic_norm(&grid, &values, 0.5, f64::INFINITY, 1.0, 1.5)?;
        println!("|p({t}, .)| in B^0.5_(inf,1): {n:.4}");
    }
    for ell in [f64::INFINITY, 2.0] {
        let c = kernel_norm_scaling_check(1.5, 0.5, ell)?;
        println!("{}: slope {:.4}, expected {}", c.name, c.value, c.limit);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
