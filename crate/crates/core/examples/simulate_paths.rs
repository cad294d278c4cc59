// Run the Euler scheme, export the ensemble and replay it from its provenance record.

use sbe::besov_drift::{distributional_fixture, DriftField};
use sbe::euler_sim::{read_provenance, replay, simulate_grid, write_ensemble_csv, write_provenance, SchemeConfig};
use sbe::stable_kernel::StableLaw;

pub fn run_example() -> sbe::Result<()> {
    let law = StableLaw::new(1.5, 1)?;
    let field = DriftField::new(distributional_fixture(1.5, 1, -0.1))?;
    let mut cfg = SchemeConfig::new(1.0, 16, vec![0.0], 2000, 9);
    cfg.keep_trajectories = true;
    let e = simulate_grid(&field, &law, &cfg)?;
    let x = e.terminal();
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    println!("{} paths, mean terminal position {mean:.4}", x.len());
    println!("path 0 at step 8: {:?}", e.grid_position(0, 8));

    let dir = std::env::temp_dir().join("sbe-simulate-example");
    std::fs::create_dir_all(&dir)?;
    write_ensemble_csv(&dir.join("ensemble.csv"), &e)?;
    write_provenance(&dir.join("provenance.json"), &e.provenance)?;
    let again = replay(&read_provenance(&dir.join("provenance.json"))?)?;
    assert_eq!(again.terminal(), x);
    println!("replayed bit for bit from {}", dir.display());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
