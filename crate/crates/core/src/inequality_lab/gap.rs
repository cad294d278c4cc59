use crate::besov_drift::{validate_parameters, BesovParams};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapRate {
    /// Gap to singularity `gamma = alpha + 2 beta - d/p - alpha/r - 1`.
    pub gamma: f64,
    /// `(gamma - epsilon) / alpha`.
    pub rate: f64,
    pub valid: bool,
}

/// Gap to singularity and the theoretical weak rate for a given `epsilon`.
pub fn gap_and_rate(alpha: f64, dim: usize, besov: &BesovParams, epsilon: f64) -> GapRate {
    let check = validate_parameters(alpha, dim, besov);
    GapRate {
        gamma: check.gamma,
        rate: (check.gamma - epsilon) / alpha,
        valid: check.valid && check.gamma > 0.0,
    }
}
