// Build the distributional random-Fourier drift, store it as a manifest and evaluate
// its mollified and integrated forms.

use sbe::besov_drift::{
    distributional_fixture, from_manifest, mollified_drift, integrated_step_drift, to_manifest, validate_parameters,
    DriftField,
};
use sbe::stable_kernel::StableLaw;

pub fn run_example() -> sbe::Result<()> {
    let spec = distributional_fixture(1.5, 1, -0.1);
    let check = validate_parameters(spec.alpha, spec.dim, &spec.besov);
    println!("gamma = {:.3}, valid = {}", check.gamma, check.valid);

    let text = to_manifest(&spec);
    assert_eq!(from_manifest(&text)?, spec);
    println!("manifest:\n{text}");

    let field = DriftField::new(spec)?;
    let law = StableLaw::new(1.5, 1)?;
    println!("{} modes", field.mode_count());
    for lag in [1e-3, 1e-2, 1e-1] {
        let b = mollified_drift(&field, &law, 0.5 + lag, 0.5, &[0.3])?[0];
        println!("mollified drift at lag {lag:e}: {b:+.5}");
    }
    // integral of the mollified drift over one step
    let h = 1.0 / 64.0;
    println!("step drift over h = 1/64: {:+.6}", integrated_step_drift(&field, &law, 0.25, h, &[0.3])?[0]);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
