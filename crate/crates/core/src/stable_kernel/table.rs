//! Tabulated radial profiles with exact-slope cubic Hermite interpolation,
//! an in-process cache and an optional binary disk cache (`STBL` files).

use std::collections::HashMap;
use std::f64::consts::PI;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;
use statrs::function::gamma::ln_gamma;

use super::profile::MixtureProfiles;
use crate::error::{Error, Result};

/// Number of nodes per profile table.
pub const TABLE_POINTS: usize = 1025;
/// Largest tabulated radius; beyond it a two-term power tail is used.
pub const TABLE_RMAX: f64 = 100.0;

const MAGIC: &[u8; 4] = b"STBL";
const VERSION: u32 = 1;

/// Radial profile `phi_dim` on the grid `r_j = sinh(j * step)`.
#[derive(Debug, Clone)]
pub struct RadialTable {
    pub alpha: f64,
    pub dim: usize,
    step: f64,
    r: Vec<f64>,
    value: Vec<f64>,
    slope: Vec<f64>,
    tail: [f64; TAIL_TERMS],
}

const TAIL_TERMS: usize = 5;

/// Coefficient of `r^(-d - k alpha)` in the large-r expansion of `phi_d`.
pub fn asymptotic_coefficient(alpha: f64, dim: usize, k: usize) -> f64 {
    let kf = k as f64;
    let d = dim as f64;
    let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
    let ln_mag = kf * alpha * 2f64.ln() + ln_gamma(kf * alpha / 2.0 + 1.0) + ln_gamma((kf * alpha + d) / 2.0)
        - ln_gamma(kf + 1.0)
        - (d / 2.0 + 1.0) * PI.ln();
    sign * ln_mag.exp() * (kf * PI * alpha / 2.0).sin()
}

fn grid(n: usize) -> (f64, Vec<f64>) {
    let step = TABLE_RMAX.asinh() / (n - 1) as f64;
    let mut r: Vec<f64> = (0..n).map(|j| (j as f64 * step).sinh()).collect();
    r[n - 1] = TABLE_RMAX;
    (step, r)
}

impl RadialTable {
    /// Build from node values of `phi_dim` and `phi_{dim+2}` on the standard grid.
    fn from_nodes(alpha: f64, dim: usize, value: Vec<f64>, upper: &[f64]) -> Self {
        let n = value.len();
        let (step, r) = grid(n);
        let slope: Vec<f64> = r.iter().zip(upper).map(|(r, u)| -2.0 * PI * r * u).collect();
        // asymptotic series with four exact terms, the fifth fitted to the edge value
        let rm = r[n - 1];
        let mut tail = [0.0; TAIL_TERMS];
        let mut partial = 0.0;
        for (k, c) in tail.iter_mut().enumerate().take(TAIL_TERMS - 1) {
            *c = asymptotic_coefficient(alpha, dim, k + 1);
            partial += *c * rm.powf(-(dim as f64) - (k + 1) as f64 * alpha);
        }
        tail[TAIL_TERMS - 1] = (value[n - 1] - partial) * rm.powf(dim as f64 + TAIL_TERMS as f64 * alpha);
        RadialTable {
            alpha,
            dim,
            step,
            r,
            value,
            slope,
            tail,
        }
    }

    /// Interpolated `phi_dim(r)`.
    #[inline]
    pub fn eval(&self, r: f64) -> f64 {
        let n = self.r.len();
        if r >= self.r[n - 1] {
            let ra = r.powf(-self.alpha);
            let mut acc = 0.0;
            let mut pw = r.powi(-(self.dim as i32));
            for c in &self.tail {
                pw *= ra;
                acc += c * pw;
            }
            return acc;
        }
        let mut j = (r.asinh() / self.step) as usize;
        if j >= n - 1 {
            j = n - 2;
        }
        // asinh rounding can land one cell off
        if r < self.r[j] && j > 0 {
            j -= 1;
        } else if r > self.r[j + 1] {
            j += 1;
        }
        let (r0, r1) = (self.r[j], self.r[j + 1]);
        let h = r1 - r0;
        let t = (r - r0) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.value[j] + h10 * h * self.slope[j] + h01 * self.value[j + 1] + h11 * h * self.slope[j + 1]
    }

    pub fn nodes(&self) -> (&[f64], &[f64]) {
        (&self.r, &self.value)
    }
}

/// The pair of tables a law needs: `phi_d` for the density and `phi_{d+2}` for the gradient.
#[derive(Debug)]
pub struct LawTables {
    pub density: RadialTable,
    pub gradient: RadialTable,
}

fn memory_cache() -> &'static Mutex<HashMap<(u64, usize), Arc<LawTables>>> {
    static CACHE: OnceLock<Mutex<HashMap<(u64, usize), Arc<LawTables>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Directory of the optional disk cache, from `SBE_CACHE_DIR`.
pub fn cache_dir_from_env() -> Option<PathBuf> {
    std::env::var_os("SBE_CACHE_DIR").map(PathBuf::from)
}

/// Tables for `(alpha, dim)`, building (and caching) them on first use.
pub fn law_tables(alpha: f64, dim: usize, disk: Option<&Path>) -> Result<Arc<LawTables>> {
    let key = (alpha.to_bits(), dim);
    if let Some(t) = memory_cache().lock().expect("cache poisoned").get(&key) {
        return Ok(t.clone());
    }
    let mut evaluator: Option<MixtureProfiles> = None;
    let mut phi = |d: usize| -> Result<Vec<f64>> { profile_nodes(alpha, dim, d, TABLE_POINTS, disk, &mut evaluator) };
    let (p0, p2, p4) = (phi(dim)?, phi(dim + 2)?, phi(dim + 4)?);
    let tables = Arc::new(LawTables {
        density: RadialTable::from_nodes(alpha, dim, p0, &p2),
        gradient: RadialTable::from_nodes(alpha, dim + 2, p2, &p4),
    });
    memory_cache()
        .lock()
        .expect("cache poisoned")
        .insert(key, tables.clone());
    Ok(tables)
}

fn profile_nodes(
    alpha: f64,
    law_dim: usize,
    dim: usize,
    n: usize,
    disk: Option<&Path>,
    evaluator: &mut Option<MixtureProfiles>,
) -> Result<Vec<f64>> {
    let path = disk.map(|d| d.join(cache_file_name(alpha, dim, n)));
    if let Some(p) = &path {
        if p.exists() {
            match read_stbl(p) {
                Ok(t) if t.alpha.to_bits() == alpha.to_bits() && t.dim == dim && t.r.len() == n => {
                    return Ok(t.phi);
                }
                _ => {} // stale or corrupt: rebuild and overwrite
            }
        }
    }
    if evaluator.is_none() {
        *evaluator = Some(MixtureProfiles::new(alpha, law_dim, 3)?);
    }
    let ev = evaluator.as_ref().expect("evaluator just built");
    let (_, r) = grid(n);
    let phi: Vec<f64> = r.par_iter().map(|&r| ev.profile(dim, r)).collect::<Result<_>>()?;
    if let Some(p) = &path {
        if let Some(parent) = p.parent() {
            std::fs::create_dir_all(parent)?;
        }
        write_stbl(
            p,
            &StblTable {
                alpha,
                dim,
                r: r.clone(),
                phi: phi.clone(),
            },
        )?;
    }
    Ok(phi)
}

pub fn cache_file_name(alpha: f64, dim: usize, n: usize) -> String {
    format!("stbl_a{:016x}_d{dim}_n{n}.bin", alpha.to_bits())
}

/// Contents of an `STBL` file: header `STBL`, version, alpha, dim, npoints,
/// then `npoints` little-endian `(r, phi)` pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct StblTable {
    pub alpha: f64,
    pub dim: usize,
    pub r: Vec<f64>,
    pub phi: Vec<f64>,
}

pub fn write_stbl(path: &Path, t: &StblTable) -> Result<()> {
    let mut buf = Vec::with_capacity(24 + 16 * t.r.len());
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    buf.extend_from_slice(&t.alpha.to_le_bytes());
    buf.extend_from_slice(&(t.dim as u32).to_le_bytes());
    buf.extend_from_slice(&(t.r.len() as u32).to_le_bytes());
    for (r, p) in t.r.iter().zip(&t.phi) {
        buf.extend_from_slice(&r.to_le_bytes());
        buf.extend_from_slice(&p.to_le_bytes());
    }
    let tmp = path.with_extension("tmp");
    let mut f = std::fs::File::create(&tmp)?;
    f.write_all(&buf)?;
    drop(f);
    std::fs::rename(tmp, path)?;
    Ok(())
}

pub fn read_stbl(path: &Path) -> Result<StblTable> {
    let mut buf = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut buf)?;
    let bad = |m: &str| Error::Format(format!("{}: {m}", path.display()));
    if buf.len() < 24 || &buf[0..4] != MAGIC {
        return Err(bad("missing STBL magic"));
    }
    let u32_at = |o: usize| u32::from_le_bytes(buf[o..o + 4].try_into().unwrap());
    let f64_at = |o: usize| f64::from_le_bytes(buf[o..o + 8].try_into().unwrap());
    if u32_at(4) != VERSION {
        return Err(bad("unsupported version"));
    }
    let alpha = f64_at(8);
    let dim = u32_at(16) as usize;
    let n = u32_at(20) as usize;
    if buf.len() != 24 + 16 * n {
        return Err(bad("truncated payload"));
    }
    let mut r = Vec::with_capacity(n);
    let mut phi = Vec::with_capacity(n);
    for j in 0..n {
        r.push(f64_at(24 + 16 * j));
        phi.push(f64_at(32 + 16 * j));
    }
    Ok(StblTable { alpha, dim, r, phi })
}
