// Beta identities, singular-integral bounds and the divergence guard.

use sbe::inequality_lab::{
    beta_identity, blow_up_guard, sample_admissible, sample_violating, singular_bound_ratio, singular_sweep,
    SingularIntegralSpec, SweepRanges, Variant,
};

pub fn run_example() -> sbe::Result<()> {
    let b = beta_identity(0.3, 0.6, 0.5, 1.5)?;
    println!("B(0.7, 0.4): closed form {:.15}, quadrature {:.15}", b.closed_form, b.quadrature);

    let s = SingularIntegralSpec::new(0.2, 0.3, 0.1, 0.05, 1.5, 0.4, 1.0);
    for v in Variant::ALL {
        println!("{v}: ratio {:.4}", singular_bound_ratio(&s, v)?);
    }
    // a divergent exponent is refused before integrating
    let bad = SingularIntegralSpec::new(0.7, 0.1, 0.0, 0.0, 1.5, 0.4, 1.0);
    println!("{}", singular_bound_ratio(&bad, Variant::Left).unwrap_err());
    let v = &sample_violating(1, Variant::Full, 3)[0];
    println!("guard on a violating tuple: {:?}", blow_up_guard(v, Variant::Full)?);

    let sweep = singular_sweep(&sample_admissible(50, &SweepRanges::default(), 7))?;
    for v in Variant::ALL {
        println!("{v}: fitted constant over 50 tuples {:.2}", sweep.fitted_constant(v));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
