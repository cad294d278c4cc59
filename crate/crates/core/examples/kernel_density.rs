// Evaluate the rotationally invariant stable density and compare with closed forms.

use sbe::stable_kernel::{bound_kernel, cdf_1d, evaluate_density, evaluate_gradient, StableLaw};

pub fn run_example() -> sbe::Result<()> {
    // alpha = 1 is the Cauchy law
    let cauchy = StableLaw::new(1.0, 1)?;
    for z in [0.0, 0.5, 3.0, 10.0] {
        let p = evaluate_density(&cauchy, 1.0, &[z])?;
        let exact = 1.0 / (std::f64::consts::PI * (1.0 + z * z));
        println!("cauchy p(1, {z:>4}) = {p:.12}  closed form {exact:.12}");
        assert!((p - exact).abs() < 1e-6 * exact);
    }

    let law = StableLaw::new(1.5, 1)?;
    let t = 0.3;
    for z in [0.0, 1.0, 5.0, 40.0] {
        let p = evaluate_density(&law, t, &[z])?;
        let g = evaluate_gradient(&law, t, &[z])?[0];
        let pbar = bound_kernel(&law, t, &[z])?;
        println!("alpha 1.5: p = {p:.4e}, dp/dz = {g:.4e}, p / pbar = {:.3}", p / pbar);
    }
    println!("P(X_1 <= 2) = {:.6}", cdf_1d(&law, 1.0, 2.0)?);

    let plane = StableLaw::new(1.5, 2)?;
    println!("d = 2: p(1, 0) = {:.6}", evaluate_density(&plane, 1.0, &[0.0, 0.0])?);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
