//! Run configuration and output formats.
//!
//! CSV files are comma-separated with a header row, LF line endings and
//! floats written with 17 significant digits; undefined values are `nan`.

pub mod config;

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::atom_forces::ForceMap;
use crate::dynamics::TrajectoryState;
use crate::error::Result;
use crate::superpose::FieldMap;

pub use config::{Quantity, RunConfig};

/// `{:.16e}`, with `nan` for NaN and no sign on zero.
pub fn fmt_float(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else {
        format!("{:.16e}", v + 0.0)
    }
}

fn row<W: Write>(w: &mut W, values: &[f64]) -> Result<()> {
    let line: Vec<String> = values.iter().map(|&v| fmt_float(v)).collect();
    writeln!(w, "{}", line.join(","))?;
    Ok(())
}

/// Columns `coord1,coord2,amplitude,phase,intensity`; `coord1` indexes rows
/// of the map (`z` or `x`), `coord2` columns (`ρ` or `y`).
pub fn write_field_map<W: Write>(w: &mut W, map: &FieldMap) -> Result<()> {
    writeln!(w, "coord1,coord2,amplitude,phase,intensity")?;
    for (i, &a) in map.axis1.iter().enumerate() {
        for (j, &b) in map.axis2.iter().enumerate() {
            let k = map.index(i, j);
            row(w, &[a, b, map.amplitude[k], map.phase[k], map.intensity[k]])?;
        }
    }
    Ok(())
}

/// Columns `coord1,coord2,f_rho,f_phi,f_z`.
pub fn write_force_map<W: Write>(w: &mut W, map: &ForceMap) -> Result<()> {
    writeln!(w, "coord1,coord2,f_rho,f_phi,f_z")?;
    let n = map.axis2.len();
    for (i, &a) in map.axis1.iter().enumerate() {
        for (j, &b) in map.axis2.iter().enumerate() {
            let f = map.forces[i * n + j];
            row(w, &[a, b, f.rho, f.phi, f.z])?;
        }
    }
    Ok(())
}

/// Columns `t,x,y,z,vx,vy,vz,rho,phi`.
pub fn write_trajectory<W: Write>(w: &mut W, states: &[TrajectoryState]) -> Result<()> {
    writeln!(w, "t,x,y,z,vx,vy,vz,rho,phi")?;
    for s in states {
        let [x, y, z] = s.cartesian_position();
        let [vx, vy, vz] = s.cartesian_velocity();
        row(w, &[s.time, x, y, z, vx, vy, vz, s.position.rho, s.position.phi])?;
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpringRow {
    pub d: f64,
    pub k0_analytic: f64,
    pub k0_numeric: f64,
}

/// Columns `d,K0_analytic,K0_numeric`.
pub fn write_spring_sweep<W: Write>(w: &mut W, rows: &[SpringRow]) -> Result<()> {
    writeln!(w, "d,K0_analytic,K0_numeric")?;
    for r in rows {
        row(w, &[r.d, r.k0_analytic, r.k0_numeric])?;
    }
    Ok(())
}

/// Creates `path` and hands a buffered writer to `body`.
pub fn write_file<F>(path: &Path, body: F) -> Result<()>
where
    F: FnOnce(&mut std::io::BufWriter<std::fs::File>) -> Result<()>,
{
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    body(&mut w)?;
    w.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write_file(path, |w| {
        serde_json::to_writer_pretty(&mut *w, value)?;
        writeln!(w)?;
        Ok(())
    })
}
