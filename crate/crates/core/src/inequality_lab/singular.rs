use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::beta::{endpoint_integral, lab_tolerance};
use crate::error::{domain, invalid, Result};
use crate::numerics::{integrate, Tolerance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    /// `int_0^t` with both brackets.
    Full,
    /// `int_0^v`.
    Left,
    /// `int_v^t`, the mirror of `Left`.
    Right,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::Full, Variant::Left, Variant::Right];

    pub fn tag(&self) -> &'static str {
        match self {
            Variant::Full => "full",
            Variant::Left => "left",
            Variant::Right => "right",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Exponents and interval of the three singular integrals. `Left` and `Right` only use
/// `a`, `b` and `v`; `c`, `d` only enter `Full`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularIntegralSpec {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    /// Conjugate index `r' >= 1` (finite).
    pub r_prime: f64,
    pub v: f64,
    pub t: f64,
}

/// One named convergence condition `value < 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Predicate {
    pub name: &'static str,
    pub value: f64,
}

impl Predicate {
    pub fn holds(&self) -> bool {
        self.value < 1.0
    }
}

fn pos(x: f64) -> f64 {
    x.max(0.0)
}

/// `ln(e^x + e^y)`.
fn log_add(x: f64, y: f64) -> f64 {
    let m = x.max(y);
    m + ((x - m).exp() + (y - m).exp()).ln()
}

impl SingularIntegralSpec {
    pub fn new(a: f64, b: f64, c: f64, d: f64, r_prime: f64, v: f64, t: f64) -> Self {
        SingularIntegralSpec { a, b, c, d, r_prime, v, t }
    }

    fn check(&self) -> Result<()> {
        let s = self;
        if ![s.a, s.b, s.c, s.d, s.r_prime, s.v, s.t].iter().all(|x| x.is_finite()) {
            return invalid("singular integral parameters must be finite");
        }
        if !(s.r_prime >= 1.0) {
            return invalid(format!("need r' >= 1, got {}", s.r_prime));
        }
        if !(0.0 < s.v && s.v < s.t) {
            return invalid(format!("need 0 < v < t, got v = {}, t = {}", s.v, s.t));
        }
        Ok(())
    }

    /// Convergence conditions of a variant. For `Full` these are the conditions of the
    /// four expanded integrals; they reduce to `r'(a+c+d) < 1`, `r'(b+c+d) < 1` when `c, d >= 0`.
    pub fn predicates(&self, variant: Variant) -> Vec<Predicate> {
        let (a, b, c, d, r) = (self.a, self.b, self.c, self.d, self.r_prime);
        let p = |name, value| Predicate { name, value };
        match variant {
            Variant::Full => vec![
                p("r'(a+c+d)", r * (a + c + d)),
                p("r'(b+c+d)", r * (b + c + d)),
                p("r'(a+c)", r * (a + c)),
                p("r'(a+d)", r * (a + d)),
                p("r'(b+c)", r * (b + c)),
                p("r'(b+d)", r * (b + d)),
                p("r'a", r * a),
                p("r'b", r * b),
            ],
            Variant::Left | Variant::Right => vec![p("r'(a+b)", r * (a + b)), p("r'a", r * a)],
        }
    }

    pub fn admissible(&self, variant: Variant) -> bool {
        self.predicates(variant).iter().all(Predicate::holds)
    }

    /// Largest predicate value: the exact power of the worst endpoint singularity.
    pub fn worst_exponent(&self, variant: Variant) -> f64 {
        self.predicates(variant).iter().map(|p| p.value).fold(f64::MIN, f64::max)
    }

    fn require(&self, variant: Variant) -> Result<()> {
        self.check()?;
        if let Some(p) = self.predicates(variant).into_iter().find(|p| !p.holds()) {
            return domain(format!(
                "{variant} variant: convergence predicate {} < 1 violated ({} = {})",
                p.name, p.name, p.value
            ));
        }
        Ok(())
    }

    /// Interval and endpoint exponents.
    fn layout(&self, variant: Variant) -> (f64, f64, f64, f64) {
        let (a, b, c, d, r) = (self.a, self.b, self.c, self.d, self.r_prime);
        match variant {
            Variant::Full => (0.0, self.t, r * (a + pos(c) + pos(d)), r * (b + pos(c) + pos(d))),
            Variant::Left => (0.0, self.v, r * (a + pos(b)), 0.0),
            Variant::Right => (self.v, self.t, 0.0, r * (a + pos(b))),
        }
    }

    /// Log of the integrand from the log distances to the two ends of its interval.
    fn log_integrand(&self, variant: Variant, l_lo: f64, l_hi: f64) -> f64 {
        let (a, b, c, d, r) = (self.a, self.b, self.c, self.d, self.r_prime);
        let lt = self.t.ln();
        match variant {
            Variant::Full => {
                -a * r * l_lo - b * r * l_hi + r * log_add(-c * l_lo, -c * l_hi) + r * log_add(-d * l_lo, -d * l_hi)
            }
            Variant::Left => -a * r * l_lo + r * log_add(-b * l_lo, -b * lt),
            Variant::Right => -a * r * l_hi + r * log_add(-b * lt, -b * l_hi),
        }
    }

    /// `(int ...)^(1/r')`, the left side of the bound.
    pub fn lhs(&self, variant: Variant) -> Result<f64> {
        self.require(variant)?;
        let (lo, hi, e_lo, e_hi) = self.layout(variant);
        let i = endpoint_integral(|l0, l1| self.log_integrand(variant, l0, l1), lo, hi, e_lo, e_hi, lab_tolerance())?;
        Ok(i.powf(1.0 / self.r_prime))
    }

    /// The bound with constant 1.
    pub fn rhs(&self, variant: Variant) -> f64 {
        let (a, b, c, d) = (self.a, self.b, self.c, self.d);
        let e = 1.0 / self.r_prime;
        let side = |len: f64| len.powf(e - a - b) + self.t.powf(-b) * len.powf(e - a);
        match variant {
            Variant::Full => self.t.powf(e - a - b - c - d),
            Variant::Left => side(self.v),
            Variant::Right => side(self.t - self.v),
        }
    }
}

/// Left side over right side (with constant 1) of one of the three bounds.
pub fn singular_bound_ratio(spec: &SingularIntegralSpec, variant: Variant) -> Result<f64> {
    Ok(spec.lhs(variant)? / spec.rhs(variant))
}

/// Outcome of the blow-up guard at the worst endpoint of a variant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlowUp {
    /// Contributions of `[w 1e-9, w 1e-6]` and `[w 1e-12, w 1e-9]` (`w` the half-length).
    pub increments: [f64; 2],
    pub diverges: bool,
}

/// Increment ratio at or above which the guard reports divergence. A power
/// `dist^-e` gives the ratio `10^(3(e-1))`, so exponents up to about 0.985 read as convergent.
pub const BLOW_UP_RATIO: f64 = 0.9;

/// Truncated integrals towards each singular endpoint, without assuming the predicates.
/// Divergence is read off from increments that stop shrinking as the cut moves inwards.
pub fn blow_up_guard(spec: &SingularIntegralSpec, variant: Variant) -> Result<BlowUp> {
    spec.check()?;
    let (lo, hi, _, _) = spec.layout(variant);
    let len = hi - lo;
    let w = len / 2.0;
    let tol = Tolerance {
        abs: 1e-300,
        rel: 1e-10,
        max_intervals: 4000,
    };
    let ends: &[bool] = match variant {
        Variant::Full => &[true, false],
        Variant::Left => &[true],
        Variant::Right => &[false],
    };
    let mut worst = BlowUp {
        increments: [0.0; 2],
        diverges: false,
    };
    let mut worst_ratio = f64::MIN;
    for &near_lo in ends {
        // x = ln(distance to the singular end)
        let g = |x: f64| {
            let far = (len - x.exp()).ln();
            let v = if near_lo {
                spec.log_integrand(variant, x, far)
            } else {
                spec.log_integrand(variant, far, x)
            };
            (v + x).exp()
        };
        let cut = |k: f64| w.ln() + k * std::f64::consts::LN_10;
        let piece = |from: f64, to: f64| integrate(g, cut(from), cut(to), tol).map(|i| i.value);
        let (i1, i2) = match (piece(-9.0, -6.0), piece(-12.0, -9.0)) {
            (Ok(x), Ok(y)) => (x, y),
            _ => (f64::INFINITY, f64::INFINITY),
        };
        let ratio = if i1.is_finite() && i1 > 0.0 { i2 / i1 } else { f64::INFINITY };
        if ratio > worst_ratio {
            worst_ratio = ratio;
            worst = BlowUp {
                increments: [i1, i2],
                diverges: !(ratio < BLOW_UP_RATIO),
            };
        }
    }
    Ok(worst)
}

/// Sampling box of the sweep. Tuples are redrawn until every variant is admissible with
/// `worst_exponent <= 1 - margin`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRanges {
    pub a: (f64, f64),
    pub b: (f64, f64),
    pub c: (f64, f64),
    pub d: (f64, f64),
    pub r_prime: (f64, f64),
    pub t: (f64, f64),
    /// `v / t`.
    pub v_fraction: (f64, f64),
    pub margin: f64,
}

impl Default for SweepRanges {
    fn default() -> Self {
        SweepRanges {
            a: (0.0, 0.6),
            b: (0.0, 0.6),
            c: (0.0, 0.3),
            d: (0.0, 0.3),
            r_prime: (1.0, 3.0),
            t: (0.1, 2.0),
            v_fraction: (0.05, 0.95),
            margin: 0.05,
        }
    }
}

/// Draw `n` admissible tuples.
pub fn sample_admissible(n: usize, ranges: &SweepRanges, seed: u64) -> Vec<SingularIntegralSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    let u = |(lo, hi): (f64, f64), rng: &mut ChaCha8Rng| lo + (hi - lo) * rng.random::<f64>();
    while out.len() < n {
        let t = u(ranges.t, &mut rng);
        let s = SingularIntegralSpec {
            a: u(ranges.a, &mut rng),
            b: u(ranges.b, &mut rng),
            c: u(ranges.c, &mut rng),
            d: u(ranges.d, &mut rng),
            r_prime: u(ranges.r_prime, &mut rng),
            v: t * u(ranges.v_fraction, &mut rng),
            t,
        };
        if Variant::ALL.iter().all(|&v| s.worst_exponent(v) <= 1.0 - ranges.margin) {
            out.push(s);
        }
    }
    out
}

/// Draw `n` tuples whose worst exponent for `variant` lies in `[1.05, 1.5]`.
pub fn sample_violating(n: usize, variant: Variant, seed: u64) -> Vec<SingularIntegralSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let t = 0.1 + 1.9 * rng.random::<f64>();
        let s = SingularIntegralSpec {
            a: -0.2 + 1.4 * rng.random::<f64>(),
            b: -0.2 + 1.4 * rng.random::<f64>(),
            c: 0.5 * rng.random::<f64>(),
            d: 0.5 * rng.random::<f64>(),
            r_prime: 1.0 + 2.0 * rng.random::<f64>(),
            v: t * (0.05 + 0.9 * rng.random::<f64>()),
            t,
        };
        let e = s.worst_exponent(variant);
        if (1.05..=1.5).contains(&e) {
            out.push(s);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub variant: Variant,
    pub spec: SingularIntegralSpec,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub rows: Vec<SweepRow>,
}

impl Sweep {
    /// Fitted constant of one variant: the largest observed ratio.
    pub fn fitted_constant(&self, variant: Variant) -> f64 {
        self.rows
            .iter()
            .filter(|r| r.variant == variant)
            .map(|r| r.ratio)
            .fold(f64::MIN, f64::max)
    }

    pub fn max_constant(&self) -> f64 {
        self.rows.iter().map(|r| r.ratio).fold(f64::MIN, f64::max)
    }

    pub fn all_finite(&self) -> bool {
        self.rows.iter().all(|r| r.ratio.is_finite())
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("variant,a,b,c,d,r_prime,ratio\n");
        for r in &self.rows {
            let p = &r.spec;
            s.push_str(&format!(
                "{},{:?},{:?},{:?},{:?},{:?},{:?}\n",
                r.variant, p.a, p.b, p.c, p.d, p.r_prime, r.ratio
            ));
        }
        s
    }
}

/// Ratios of all three variants over the given tuples, one rayon task per tuple.
pub fn singular_sweep(tuples: &[SingularIntegralSpec]) -> Result<Sweep> {
    let rows: Vec<Vec<SweepRow>> = tuples
        .par_iter()
        .map(|spec| {
            Variant::ALL
                .iter()
                .map(|&variant| {
                    Ok(SweepRow {
                        variant,
                        spec: *spec,
                        ratio: singular_bound_ratio(spec, variant)?,
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let mut rows: Vec<SweepRow> = rows.into_iter().flatten().collect();
    rows.sort_by_key(|r| Variant::ALL.iter().position(|v| *v == r.variant));
    Ok(Sweep { rows })
}
