use statrs::function::beta::beta;

use crate::error::{domain, invalid, Result};
use crate::numerics::{integrate, Tolerance};

/// Both sides of `int_u^t (s - u)^-a (t - s)^-b ds = (t - u)^(1-a-b) B(1-a, 1-b)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaIdentity {
    pub closed_form: f64,
    pub quadrature: f64,
}

impl BetaIdentity {
    pub fn relative_gap(&self) -> f64 {
        (self.quadrature - self.closed_form).abs() / self.closed_form.abs()
    }
}

/// Tolerance used for every endpoint-regularized integral of this module.
pub fn lab_tolerance() -> Tolerance {
    Tolerance {
        abs: 1e-12,
        rel: 1e-13,
        max_intervals: 4000,
    }
}

/// Integral over `[lo, hi]` of `exp(log_f(ln(s - lo), ln(hi - s)))`, where the integrand
/// behaves like `(s - lo)^-e_lo` and `(hi - s)^-e_hi` at the endpoints (`e < 1`).
///
/// The interval is split at the midpoint and each half is mapped with
/// `s = lo + w sigma^(1/(1-e))`, which cancels the power exactly. Distances to the
/// endpoints are passed in log form so that no cancellation happens near them.
pub fn endpoint_integral<F>(log_f: F, lo: f64, hi: f64, e_lo: f64, e_hi: f64, tol: Tolerance) -> Result<f64>
where
    F: Fn(f64, f64) -> f64,
{
    if !(lo < hi) {
        return invalid(format!("need lo < hi, got [{lo}, {hi}]"));
    }
    if !(e_lo < 1.0 && e_hi < 1.0) {
        return domain(format!("endpoint exponents ({e_lo}, {e_hi}) are not integrable"));
    }
    let len = hi - lo;
    let w = len / 2.0;
    let lw = w.ln();
    let power = |e: f64| if e > 0.0 { 1.0 / (1.0 - e) } else { 1.0 };
    let half = |e: f64, near_lo: bool| -> Result<f64> {
        let k = power(e);
        let jac = (w * k).ln();
        let g = |sigma: f64| {
            let ls = sigma.ln();
            let ld = lw + k * ls;
            let far = (len - ld.exp()).ln();
            let v = if near_lo { log_f(ld, far) } else { log_f(far, ld) };
            (v + jac + (k - 1.0) * ls).exp()
        };
        Ok(integrate(g, 0.0, 1.0, tol)?.value)
    };
    Ok(half(e_lo, true)? + half(e_hi, false)?)
}

/// Closed form and quadrature of the rescaled Beta integral.
pub fn beta_identity(a: f64, b: f64, u: f64, t: f64) -> Result<BetaIdentity> {
    if ![a, b, u, t].iter().all(|v| v.is_finite()) {
        return invalid("beta_identity needs finite arguments");
    }
    if !(a < 1.0) {
        return domain(format!("predicate a < 1 violated (a = {a})"));
    }
    if !(b < 1.0) {
        return domain(format!("predicate b < 1 violated (b = {b})"));
    }
    if !(u < t) {
        return domain(format!("predicate u < t violated (u = {u}, t = {t})"));
    }
    let closed_form = (t - u).powf(1.0 - a - b) * beta(1.0 - a, 1.0 - b);
    let quadrature = endpoint_integral(|l0, l1| -a * l0 - b * l1, u, t, a, b, lab_tolerance())?;
    Ok(BetaIdentity { closed_form, quadrature })
}
