//! Drifts in `L^r([0,T], B^beta_{p,q})` as finite Fourier series on a torus,
//! their exact stable-semigroup mollifications and thermic Besov norms.

pub mod field;
pub mod fourier;
pub mod holder;
pub mod manifest;
pub mod params;
pub mod table;
pub mod thermic;

pub use field::{Construction, DriftField, DriftSpec, ModeWeights};
pub use fourier::{lebesgue_norm, TorusGrid};
pub use holder::{holder_modulus_integrated, PairGrid};
pub use manifest::{from_manifest, read_manifest, to_manifest, write_manifest};
pub use params::{conjugate, validate_parameters, BesovParams, ParameterCheck};
pub use table::{DriftTable, DEFAULT_TABLE_POINTS};
pub use thermic::{derivative_order, thermic_norm, thermic_parts, ThermicParts};

use crate::error::Result;
use crate::stable_kernel::StableLaw;

pub fn mollified_drift(drift: &DriftField, law: &StableLaw, s: f64, tau: f64, z: &[f64]) -> Result<Vec<f64>> {
    drift.mollified_drift(law, s, tau, z)
}

pub fn integrated_step_drift(drift: &DriftField, law: &StableLaw, t_start: f64, h: f64, z: &[f64]) -> Result<Vec<f64>> {
    drift.integrated_step_drift(law, t_start, h, z)
}

/// Thermic norm of the time-`s` section of one drift component after smoothing
/// by `P_smoothing` (the raw section of a distributional drift is only reached
/// through its grid truncation).
pub fn section_thermic_norm(
    drift: &DriftField,
    law: &StableLaw,
    grid: &TorusGrid,
    s: f64,
    smoothing: f64,
    component: usize,
    theta: f64,
    ell: f64,
    m: f64,
) -> Result<f64> {
    drift.check_law(law)?;
    let w = drift.section_weights(s, smoothing)?;
    let c = drift.grid_coefficients(grid, &w, component)?;
    Ok(thermic_parts(grid, &c, theta, ell, m, law.alpha())?.total())
}

/// Seed of the shared random-fourier fixture.
pub const FIXTURE_SEED: u64 = 20240611;

/// The distributional random-fourier fixture: `L = 16`, `K = 512` (d = 1) or 64 (d = 2, 3),
/// `p = q = r = inf`, time-homogeneous on `[0, 1]`.
pub fn distributional_fixture(alpha: f64, dim: usize, beta: f64) -> DriftSpec {
    let mut spec = DriftSpec::new(
        alpha,
        dim,
        16.0,
        BesovParams::sup_norm(beta),
        Construction::RandomFourier { sigma: 1.0 },
    );
    spec.cutoff = if dim == 1 { 512 } else { 64 };
    spec.seed = FIXTURE_SEED;
    spec
}

/// `b(z) = cos(2 pi z_1 / L)` in the first component; Lipschitz control for rate experiments.
pub fn single_mode_fixture(alpha: f64, dim: usize, torus_length: f64) -> DriftSpec {
    let mut wave = vec![0; dim];
    wave[0] = 1;
    let mut amplitude = vec![0.0; dim];
    amplitude[0] = 1.0;
    DriftSpec::new(
        alpha,
        dim,
        torus_length,
        BesovParams::sup_norm(-0.1),
        Construction::DeterministicSingleMode { wave, amplitude },
    )
}
