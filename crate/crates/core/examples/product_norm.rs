// Spot check of the Besov product-norm estimate, with the gap and rate it implies.

use sbe::besov_drift::BesovParams;
use sbe::inequality_lab::{gap_and_rate, product_norm_spot_check, ProductGrid};
use sbe::stable_kernel::StableLaw;

pub fn run_example() -> sbe::Result<()> {
    let law = StableLaw::new(1.5, 1)?;
    let besov = BesovParams::sup_norm(-0.1);
    let g = gap_and_rate(1.5, 1, &besov, 0.015);
    println!("gamma {:.3}, rate {:.3}, valid {}", g.gamma, g.rate, g.valid);
    for s in [0.2, 0.5, 0.8] {
        for k in [0, 1] {
            let r = product_norm_spot_check(&law, &besov, s, 1.0, &[0.0], &[0.3], k, 0.5, ProductGrid::standard(1))?;
            println!("s = {s}, k = {k}: lhs {:.4e}, rhs {:.4e}, ratio {:.3}", r.lhs, r.rhs, r.ratio);
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
