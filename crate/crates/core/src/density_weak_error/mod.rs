//! Density estimates of the scheme, normalized errors, the level-difference rate
//! experiment, Duhamel residuals and the six-term error decomposition.

pub mod conditional;
pub mod decomposition;
pub mod duhamel;
pub mod estimate;
pub mod plot;
pub mod rate;

pub use conditional::{conditional_density, ConditionalDensity};
pub use decomposition::{error_decomposition, Decomposition, DecompositionPoint};
pub use duhamel::{duhamel_residual, DuhamelOptions, DuhamelResidual};
pub use estimate::{
    density_from_samples, estimate_density, holder_quotient, normalized_sup_error, BandwidthRule, DensityEstimate,
    Estimator, HolderQuotient, Window, DEFAULT_RADIUS,
};
pub use plot::loglog_svg;
pub use rate::{weak_error_levels, RateOptions, RateReport, TestFunction};
