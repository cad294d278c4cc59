//! The grid Euler scheme with semigroup-mollified drift, its continuous-time
//! extension, reference ensembles and the common-random-number level driver.

pub mod config;
pub mod engine;
pub mod export;
pub mod plan;

pub use config::{DriftEval, SchemeConfig};
pub use engine::{
    reference_config, reference_ensemble, run_levels, simulate_continuous, simulate_grid, LevelBlocks, LevelPaths, PathEnsemble,
    Provenance, OVERFLOW_LIMIT,
};
pub use export::{read_ensemble_csv, read_provenance, write_ensemble_csv, write_provenance, write_trajectories_csv};
pub use plan::{DriftCache, SchemeState, StepPlan, WeightedDrift};

use crate::besov_drift::{from_manifest, DriftField};
use crate::error::Result;
use crate::stable_kernel::StableLaw;

/// Rebuild an ensemble from its provenance record.
pub fn replay(p: &Provenance) -> Result<PathEnsemble> {
    let field = DriftField::new(from_manifest(&p.drift_manifest)?)?;
    let law = StableLaw::new(p.alpha, p.dim)?;
    simulate_grid(&field, &law, &p.config)
}
