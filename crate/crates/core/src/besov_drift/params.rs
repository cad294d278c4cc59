use std::fmt;

use crate::error::{invalid, Result};

/// Besov indices of the drift `b in L^r([0,T], B^beta_{p,q})`. Infinite indices are `f64::INFINITY`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesovParams {
    pub beta: f64,
    pub p: f64,
    pub q: f64,
    pub r: f64,
}

impl BesovParams {
    pub fn new(beta: f64, p: f64, q: f64, r: f64) -> Result<Self> {
        if !beta.is_finite() {
            return invalid("beta must be finite");
        }
        for (name, v) in [("p", p), ("q", q), ("r", r)] {
            if !(v >= 1.0) {
                return invalid(format!("{name} must lie in [1, inf], got {v}"));
            }
        }
        Ok(BesovParams { beta, p, q, r })
    }

    /// `p = q = r = inf`.
    pub fn sup_norm(beta: f64) -> Self {
        BesovParams {
            beta,
            p: f64::INFINITY,
            q: f64::INFINITY,
            r: f64::INFINITY,
        }
    }

    pub fn p_conj(&self) -> f64 {
        conjugate(self.p)
    }
    pub fn q_conj(&self) -> f64 {
        conjugate(self.q)
    }
    pub fn r_conj(&self) -> f64 {
        conjugate(self.r)
    }
}

/// Hölder conjugate `x / (x - 1)`, with `1 <-> inf`.
pub fn conjugate(x: f64) -> f64 {
    if x == 1.0 {
        f64::INFINITY
    } else if x.is_infinite() {
        1.0
    } else {
        x / (x - 1.0)
    }
}

/// `1/x` with `1/inf = 0`.
#[inline]
pub fn recip(x: f64) -> f64 {
    if x.is_infinite() {
        0.0
    } else {
        1.0 / x
    }
}

/// Outcome of [`validate_parameters`].
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterCheck {
    /// Whether the well-posedness (Serrin-type) condition holds.
    pub valid: bool,
    /// `gamma = alpha + 2 beta - d/p - alpha/r - 1`.
    pub gamma: f64,
    /// Admissible open interval for beta.
    pub beta_window: (f64, f64),
    /// Lower bound on alpha: `(1 + d/p) / (1 - 1/r)`.
    pub alpha_floor: f64,
    /// Informational: the stricter lower bound on beta needed for the
    /// nonlinear Young integral, `(1 - alpha + 2d/p + 2 alpha/r) / 2`.
    pub stricter_condition: bool,
    /// Human-readable list of violated inequalities.
    pub violations: Vec<String>,
}

impl fmt::Display for ParameterCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.valid {
            write!(f, "valid, gamma = {}", self.gamma)
        } else {
            write!(f, "invalid ({}), gamma = {}", self.violations.join("; "), self.gamma)
        }
    }
}

/// Well-posedness predicate and gap to singularity. Pure; never fails.
pub fn validate_parameters(alpha: f64, dim: usize, besov: &BesovParams) -> ParameterCheck {
    let d = dim as f64;
    let (ip, ir) = (recip(besov.p), recip(besov.r));
    let gamma = alpha + 2.0 * besov.beta - d * ip - alpha * ir - 1.0;
    let alpha_floor = if ir >= 1.0 {
        f64::INFINITY
    } else {
        (1.0 + d * ip) / (1.0 - ir)
    };
    let lo = (1.0 - alpha + d * ip + alpha * ir) / 2.0;
    let window = (lo, 0.0);
    let mut violations = Vec::new();
    if !(alpha > 1.0 && alpha < 2.0) {
        violations.push(format!("alpha = {alpha} outside (1, 2)"));
    }
    if !(alpha > alpha_floor) {
        violations.push(format!("alpha = {alpha} <= (1 + d/p)/(1 - 1/r) = {alpha_floor}"));
    }
    if !(besov.beta > lo && besov.beta < 0.0) {
        violations.push(format!("beta = {} outside ({lo}, 0)", besov.beta));
    }
    let stricter = besov.beta > (1.0 - alpha + 2.0 * d * ip + 2.0 * alpha * ir) / 2.0;
    ParameterCheck {
        valid: violations.is_empty(),
        gamma,
        beta_window: window,
        alpha_floor,
        stricter_condition: stricter,
        violations,
    }
}
