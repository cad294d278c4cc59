use std::io::{BufWriter, Write};
use std::path::Path;

use super::engine::{PathEnsemble, Provenance};
use crate::error::{Error, Result};

/// CSV with columns `path,time,x_1..x_d`, one row per path and query time.
pub fn write_ensemble_csv(path: &Path, e: &PathEnsemble) -> Result<()> {
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    write_header(&mut w, e.dim)?;
    for p in 0..e.paths {
        for (q, t) in e.times.iter().enumerate() {
            write_row(&mut w, p, *t, e.position(p, q))?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Same schema for the grid trajectories.
pub fn write_trajectories_csv(path: &Path, e: &PathEnsemble) -> Result<()> {
    if e.trajectories.is_none() {
        return Err(Error::InvalidArgument("ensemble has no trajectories".into()));
    }
    let h = e.horizon() / e.steps as f64;
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    write_header(&mut w, e.dim)?;
    for p in 0..e.paths {
        for k in 0..=e.steps {
            let t = if k == e.steps { e.horizon() } else { k as f64 * h };
            write_row(&mut w, p, t, e.grid_position(p, k).expect("trajectories present"))?;
        }
    }
    w.flush()?;
    Ok(())
}

fn write_header<W: Write>(w: &mut W, d: usize) -> Result<()> {
    write!(w, "path,time")?;
    for c in 1..=d {
        write!(w, ",x_{c}")?;
    }
    writeln!(w)?;
    Ok(())
}

fn write_row<W: Write>(w: &mut W, p: usize, t: f64, x: &[f64]) -> Result<()> {
    write!(w, "{p},{t:?}")?;
    for v in x {
        write!(w, ",{v:?}")?;
    }
    writeln!(w)?;
    Ok(())
}

/// Rows of an ensemble CSV: `(path, time, position)`.
pub fn read_ensemble_csv(path: &Path) -> Result<Vec<(usize, f64, Vec<f64>)>> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| Error::Format("empty ensemble CSV".into()))?;
    let d = header.split(',').count().saturating_sub(2);
    let mut out = Vec::new();
    for (i, l) in lines.enumerate() {
        let f: Vec<&str> = l.split(',').collect();
        let bad = || Error::Parse {
            line: i + 2,
            key: String::new(),
            message: format!("malformed row `{l}`"),
        };
        if f.len() != d + 2 {
            return Err(bad());
        }
        let p = f[0].parse().map_err(|_| bad())?;
        let t = f[1].parse().map_err(|_| bad())?;
        let x = f[2..].iter().map(|v| v.parse().map_err(|_| bad())).collect::<Result<Vec<f64>>>()?;
        out.push((p, t, x));
    }
    Ok(out)
}

pub fn write_provenance(path: &Path, p: &Provenance) -> Result<()> {
    let text = serde_json::to_string_pretty(p).map_err(|e| Error::Format(e.to_string()))?;
    std::fs::write(path, text)?;
    Ok(())
}

pub fn read_provenance(path: &Path) -> Result<Provenance> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}
