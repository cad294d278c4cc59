// Split the density error of a coarse scheme against a fine reference into six terms.

use sbe::besov_drift::{distributional_fixture, DriftField};
use sbe::density_weak_error::error_decomposition;
use sbe::euler_sim::SchemeConfig;
use sbe::stable_kernel::StableLaw;

pub fn run_example() -> sbe::Result<()> {
    let law = StableLaw::new(1.5, 1)?;
    let field = DriftField::new(distributional_fixture(1.5, 1, -0.1))?;
    let cfg = SchemeConfig::new(1.0, 4, vec![0.0], 2000, 17);
    let probes: Vec<Vec<f64>> = [-1.0, 0.0, 1.0].iter().map(|y| vec![*y]).collect();
    let d = error_decomposition(&field, &law, &cfg, 32, 1.0, &probes, 8)?;
    for p in &d.points {
        let terms: Vec<String> = p.terms.iter().map(|t| format!("{t:+.2e}")).collect();
        println!("y = {:+.1}: {}", p.y[0], terms.join(" "));
        println!("        sum {:+.3e} vs G^h - G_ref {:+.3e} (noise {:.1e})", p.sum(), p.gamma_h - p.gamma_ref, p.combined_noise);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
