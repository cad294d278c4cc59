//! Quadrature checks of the scalar inequalities used in the error analysis: the rescaled
//! Beta integral, three singular time integrals and one Besov product-norm estimate.

pub mod beta;
pub mod gap;
pub mod product;
pub mod singular;

pub use beta::{beta_identity, endpoint_integral, lab_tolerance, BetaIdentity};
pub use gap::{gap_and_rate, GapRate};
pub use product::{product_norm_spot_check, ProductCheck, ProductGrid, DAMPING_LIMIT};
pub use singular::{
    blow_up_guard, sample_admissible, sample_violating, singular_bound_ratio, singular_sweep, BlowUp, Predicate,
    SingularIntegralSpec, Sweep, SweepRanges, SweepRow, Variant, BLOW_UP_RATIO,
};
