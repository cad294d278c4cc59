//! Text manifests (`besovdrift v1`) from which a drift fixture is regenerated.

use std::fmt::Write as _;
use std::path::Path;

use super::field::{Construction, DriftSpec};
use super::params::BesovParams;
use crate::error::{Error, Result};

pub const HEADER: &str = "besovdrift v1";

fn num(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        // Debug formatting round-trips exactly
        format!("{x:?}")
    }
}

fn list<T: ToString>(v: &[T]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

/// Serialize a spec. Floats are written in shortest round-trip form.
pub fn to_manifest(spec: &DriftSpec) -> String {
    let mut s = String::new();
    let b = &spec.besov;
    writeln!(s, "{HEADER}").unwrap();
    writeln!(s, "alpha = {}", num(spec.alpha)).unwrap();
    writeln!(s, "d = {}", spec.dim).unwrap();
    writeln!(s, "L = {}", num(spec.torus_length)).unwrap();
    writeln!(s, "K = {}", spec.cutoff).unwrap();
    writeln!(s, "beta = {}", num(b.beta)).unwrap();
    writeln!(s, "p = {}", num(b.p)).unwrap();
    writeln!(s, "q = {}", num(b.q)).unwrap();
    writeln!(s, "r = {}", num(b.r)).unwrap();
    writeln!(s, "seed = {}", spec.seed).unwrap();
    writeln!(s, "construction = {}", spec.construction.tag()).unwrap();
    match &spec.construction {
        Construction::RandomFourier { sigma } => writeln!(s, "sigma = {}", num(*sigma)).unwrap(),
        Construction::DeterministicSingleMode { wave, amplitude } => {
            writeln!(s, "wave = {}", list(wave)).unwrap();
            let a: Vec<String> = amplitude.iter().map(|x| num(*x)).collect();
            writeln!(s, "amplitude = {}", a.join(",")).unwrap();
        }
        Construction::Constant { value } => {
            let a: Vec<String> = value.iter().map(|x| num(*x)).collect();
            writeln!(s, "value = {}", a.join(",")).unwrap();
        }
        Construction::LipschitzSmooth { amplitude } => writeln!(s, "amplitude = {}", num(*amplitude)).unwrap(),
    }
    writeln!(s, "horizon = {}", num(spec.horizon)).unwrap();
    writeln!(s, "cells = {}", spec.time_cells).unwrap();
    writeln!(s, "modulation = {}", num(spec.modulation)).unwrap();
    s
}

struct Fields {
    entries: Vec<(usize, String, String)>,
}

impl Fields {
    fn raw(&self, key: &str) -> Option<(usize, &str)> {
        self.entries
            .iter()
            .find(|(_, k, _)| k == key)
            .map(|(l, _, v)| (*l, v.as_str()))
    }

    fn required(&self, key: &str) -> Result<(usize, &str)> {
        self.raw(key).ok_or_else(|| Error::Parse {
            line: 0,
            key: key.into(),
            message: "missing required key".into(),
        })
    }

    fn parse<T: std::str::FromStr>(&self, key: &str) -> Result<T> {
        let (line, v) = self.required(key)?;
        v.parse().map_err(|_| Error::Parse {
            line,
            key: key.into(),
            message: format!("cannot parse `{v}`"),
        })
    }

    fn parse_or<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T> {
        if self.raw(key).is_none() {
            return Ok(default);
        }
        self.parse(key)
    }

    fn list<T: std::str::FromStr>(&self, key: &str) -> Result<Vec<T>> {
        let (line, v) = self.required(key)?;
        v.split(',')
            .map(|x| {
                x.trim().parse().map_err(|_| Error::Parse {
                    line,
                    key: key.into(),
                    message: format!("cannot parse list entry `{x}`"),
                })
            })
            .collect()
    }
}

pub fn from_manifest(text: &str) -> Result<DriftSpec> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('#')
    });
    match lines.next() {
        Some((_, l)) if l.trim() == HEADER => {}
        Some((i, l)) => {
            return Err(Error::Parse {
                line: i + 1,
                key: String::new(),
                message: format!("expected header `{HEADER}`, found `{}`", l.trim()),
            })
        }
        None => return Err(Error::Format("empty drift manifest".into())),
    }
    let mut entries = Vec::new();
    for (i, l) in lines {
        let (k, v) = l.split_once('=').ok_or_else(|| Error::Parse {
            line: i + 1,
            key: String::new(),
            message: "expected `key = value`".into(),
        })?;
        let k = k.trim().to_string();
        if entries.iter().any(|(_, e, _): &(usize, String, String)| *e == k) {
            return Err(Error::Parse {
                line: i + 1,
                key: k,
                message: "duplicate key".into(),
            });
        }
        entries.push((i + 1, k, v.trim().to_string()));
    }
    let f = Fields { entries };
    let beta: f64 = f.parse("beta")?;
    let besov = BesovParams::new(beta, f.parse("p")?, f.parse("q")?, f.parse("r")?)?;
    let tag: String = f.parse("construction")?;
    let construction = match tag.as_str() {
        "random-fourier" => Construction::RandomFourier {
            sigma: f.parse_or("sigma", 1.0)?,
        },
        "deterministic-single-mode" => Construction::DeterministicSingleMode {
            wave: f.list("wave")?,
            amplitude: f.list("amplitude")?,
        },
        "constant" => Construction::Constant { value: f.list("value")? },
        "lipschitz-smooth" => Construction::LipschitzSmooth {
            amplitude: f.parse_or("amplitude", 1.0)?,
        },
        other => {
            let (line, _) = f.required("construction")?;
            return Err(Error::Parse {
                line,
                key: "construction".into(),
                message: format!("unknown construction `{other}`"),
            });
        }
    };
    Ok(DriftSpec {
        alpha: f.parse("alpha")?,
        dim: f.parse("d")?,
        torus_length: f.parse("L")?,
        cutoff: f.parse("K")?,
        besov,
        seed: f.parse("seed")?,
        horizon: f.parse_or("horizon", 1.0)?,
        time_cells: f.parse_or("cells", 64)?,
        modulation: f.parse_or("modulation", 0.0)?,
        construction,
    })
}

pub fn write_manifest(path: &Path, spec: &DriftSpec) -> Result<()> {
    std::fs::write(path, to_manifest(spec))?;
    Ok(())
}

pub fn read_manifest(path: &Path) -> Result<DriftSpec> {
    from_manifest(&std::fs::read_to_string(path)?)
}
