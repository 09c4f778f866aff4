//! One function per subcommand. Each writes its files into `out`.

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use vortex_lattice::atom_forces::{
    central_ring_radius, ferris_rate, force_map, lift_speed, spring_constant_k0, spring_constant_numeric, Light, Optics,
};
use vortex_lattice::dynamics::{integrate, oscillation_frequency, trap_frequency, TrajectoryState};
use vortex_lattice::io::{self, fmt_float, RunConfig, SpringRow};
use vortex_lattice::ring_analysis::{
    compare_double_rings, default_region, find_rings, fringe_drift_speed, pattern_rotation, radial_separation, RingClass,
};
use vortex_lattice::{Error, Pair, Result};

#[derive(Serialize)]
struct Metadata<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    config: &'a RunConfig,
}

/// `run_metadata.json`: the resolved configuration in SI units.
pub fn write_metadata(out: &Path, command: &str, config: &RunConfig) -> Result<()> {
    let meta = Metadata { tool: "vl", version: env!("CARGO_PKG_VERSION"), command, config };
    io::write_json(&out.join("run_metadata.json"), &meta)
}

fn pair_of(config: &RunConfig) -> Result<Pair> {
    Pair::new(config.pair.clone()).map_err(|e| Error::Config(e.to_string()))
}

pub fn field_map(config: &RunConfig, out: &Path) -> Result<()> {
    if config.grids.is_empty() {
        return Err(Error::Config("field-map needs at least one entry in `grids`".into()));
    }
    let pair = pair_of(config)?;
    let optics = if config.forces {
        let atom = config.require_atom()?;
        Some(Optics::new(atom, Light::Pair(&pair), config.model)?.with_velocity_coupling(false))
    } else {
        None
    };
    for g in &config.grids {
        let map = pair.intensity_map(&g.grid)?;
        io::write_file(&out.join(format!("{}.csv", g.name)), |w| io::write_field_map(w, &map))?;
        if let Some(optics) = &optics {
            let forces = force_map(optics, &g.grid)?;
            io::write_file(&out.join(format!("{}_forces.csv", g.name)), |w| io::write_force_map(w, &forces))?;
        }
    }
    Ok(())
}

pub fn spring_sweep(config: &RunConfig, out: &Path) -> Result<()> {
    let atom = config.require_atom()?;
    let sweep = config.sweep.as_ref().ok_or_else(|| Error::Config("spring-sweep needs a `sweep` section".into()))?;
    let separations: Vec<f64> = (0..sweep.steps)
        .map(|i| {
            if sweep.steps == 1 {
                sweep.d_min
            } else {
                sweep.d_min + (sweep.d_max - sweep.d_min) * i as f64 / (sweep.steps - 1) as f64
            }
        })
        .collect();
    let rows: Result<Vec<SpringRow>> = separations
        .par_iter()
        .map(|&d| {
            let pair = Pair::new(config.pair.clone().with_separation(d))?;
            Ok(SpringRow { d, k0_analytic: spring_constant_k0(&atom, &pair)?, k0_numeric: spring_constant_numeric(&atom, &pair)? })
        })
        .collect();
    let rows = rows?;
    io::write_file(&out.join("spring_sweep.csv"), |w| io::write_spring_sweep(w, &rows))
}

#[derive(Serialize)]
struct RingSummary {
    rings: usize,
    central: usize,
    double: usize,
    single: usize,
    splittings: usize,
    fringe_delta: f64,
    central_z: Option<f64>,
    central_radius: Option<f64>,
    rho0: Option<f64>,
    compared_double_rings: usize,
    max_radius_error: Option<f64>,
    /// Largest `sqrt(|l|/2) d δ / z_R²` among the compared rings.
    alpha_max: Option<f64>,
    alpha_below_one: bool,
}

pub fn rings(config: &RunConfig, out: &Path) -> Result<()> {
    let pair = pair_of(config)?;
    let region = config.rings_region.clone().unwrap_or_else(|| default_region(&pair));
    let set = find_rings(&pair, &region)?;
    io::write_file(&out.join("rings.json"), |w| {
        w.write_all(set.to_json()?.as_bytes())?;
        writeln!(w)?;
        Ok(())
    })?;

    // formula comparison needs equal p = 0 beams and a positive separation
    let comparisons = if pair.separation() > 0.0 { compare_double_rings(&pair, &set).unwrap_or_default() } else { Vec::new() };
    let mut alpha_max: Option<f64> = None;
    let mut lines = vec!["z,inner,outer,w1,w2,radius_error,delta_rho,delta_rho_exact,delta_rho_approx,alpha,alpha_below_one".to_string()];
    for c in &comparisons {
        let sep = radial_separation(&pair, c.z.abs())?;
        alpha_max = Some(alpha_max.map_or(sep.alpha, |a| a.max(sep.alpha)));
        let nums = [c.z, c.inner, c.outer, c.centre_offset.0, c.centre_offset.1, c.centre_offset_error, c.outer - c.inner, sep.exact, sep.approx, sep.alpha];
        let mut fields: Vec<String> = nums.iter().map(|&v| fmt_float(v)).collect();
        fields.push((sep.alpha < 1.0).to_string());
        lines.push(fields.join(","));
    }
    io::write_file(&out.join("ring_comparison.csv"), |w| {
        for l in &lines {
            writeln!(w, "{l}")?;
        }
        Ok(())
    })?;

    let count = |class: RingClass| set.rings.iter().filter(|r| r.class == class).count();
    let central = set.central();
    let summary = RingSummary {
        rings: set.rings.len(),
        central: count(RingClass::Central),
        double: count(RingClass::Double),
        single: count(RingClass::Single),
        splittings: set.splittings.len(),
        fringe_delta: set.fringe_delta,
        central_z: central.map(|r| r.z),
        central_radius: central.map(|r| r.radius),
        rho0: central_ring_radius(&pair).ok(),
        compared_double_rings: comparisons.len(),
        max_radius_error: comparisons.iter().map(|c| c.centre_offset_error).reduce(f64::max),
        alpha_max,
        alpha_below_one: alpha_max.is_none_or(|a| a < 1.0),
    };
    io::write_json(&out.join("rings_summary.json"), &summary)
}

#[derive(Serialize)]
struct FerrisSample {
    t: f64,
    rotation_rate: f64,
    drift_speed: f64,
    /// The turn stays below half a petal period, so the rate is unambiguous.
    unambiguous: bool,
}

#[derive(Serialize)]
struct FerrisSummary {
    delta_omega: f64,
    rho: f64,
    z: f64,
    analytic_rotation_rate: f64,
    analytic_drift_speed: f64,
    measured_rotation_rate: f64,
    measured_drift_speed: f64,
    samples: Vec<FerrisSample>,
}

pub fn ferris(config: &RunConfig, out: &Path) -> Result<()> {
    let f = config.ferris.as_ref().ok_or_else(|| Error::Config("ferris needs a `ferris` section".into()))?;
    if config.pair.delta_omega == 0.0 {
        return Err(Error::Config("ferris needs a nonzero pair.delta_omega: the pattern is static".into()));
    }
    let times: Vec<f64> = f.times.iter().copied().filter(|&t| t != 0.0).collect();
    if times.is_empty() {
        return Err(Error::Config("ferris.times needs at least one nonzero time".into()));
    }
    if f.maps && config.grids.is_empty() {
        return Err(Error::Config("ferris.maps needs at least one entry in `grids`".into()));
    }
    let pair = pair_of(config)?;
    let rate = ferris_rate(&pair)?;
    let half_petal = std::f64::consts::PI / f64::from(pair.azimuthal_order().unsigned_abs());
    let samples = times
        .iter()
        .map(|&t| {
            Ok(FerrisSample {
                t,
                rotation_rate: pattern_rotation(&pair, f.rho, f.z, t)? / t,
                drift_speed: fringe_drift_speed(&pair, f.rho, t)?,
                unambiguous: (rate * t).abs() < half_petal,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let n = samples.len() as f64;
    let summary = FerrisSummary {
        delta_omega: config.pair.delta_omega,
        rho: f.rho,
        z: f.z,
        analytic_rotation_rate: rate,
        analytic_drift_speed: lift_speed(&pair),
        measured_rotation_rate: samples.iter().map(|s| s.rotation_rate).sum::<f64>() / n,
        measured_drift_speed: samples.iter().map(|s| s.drift_speed).sum::<f64>() / n,
        samples,
    };
    if f.maps {
        let g = &config.grids[0];
        for (i, &t) in f.times.iter().enumerate() {
            let map = pair.intensity_map(&g.grid.clone().at_time(t))?;
            io::write_file(&out.join(format!("{}_t{i}.csv", g.name)), |w| io::write_field_map(w, &map))?;
        }
    }
    io::write_json(&out.join("ferris_summary.json"), &summary)
}

#[derive(Serialize)]
struct TrajectorySummary {
    samples: usize,
    duration: f64,
    /// From upward mean crossings of `z(t)`; absent with fewer than two.
    axial_frequency: Option<f64>,
    analytic_trap_frequency: Option<f64>,
    initial_lz: f64,
    final_lz: f64,
    lz_growth: f64,
    /// Largest drop of `L_z` between consecutive samples.
    max_lz_decrease: f64,
    final_state: TrajectoryState,
}

pub fn trajectory(config: &RunConfig, out: &Path) -> Result<()> {
    let atom = config.require_atom()?;
    let tc = config.trajectory.as_ref().ok_or_else(|| Error::Config("trajectory needs a `trajectory` section".into()))?;
    let pair = pair_of(config)?;
    let states = integrate(&atom, &pair, tc.start, &tc.integrator)?;
    io::write_file(&out.join("trajectory.csv"), |w| io::write_trajectory(w, &states))?;

    let times: Vec<f64> = states.iter().map(|s| s.time).collect();
    let zs: Vec<f64> = states.iter().map(|s| s.position.z).collect();
    let lz: Vec<f64> = states.iter().map(|s| s.angular_momentum(atom.mass)).collect();
    let (first, last) = (lz[0], lz[lz.len() - 1]);
    let final_state = states[states.len() - 1];
    let summary = TrajectorySummary {
        samples: states.len(),
        duration: final_state.time - states[0].time,
        axial_frequency: oscillation_frequency(&times, &zs),
        analytic_trap_frequency: trap_frequency(&atom, &pair).ok(),
        initial_lz: first,
        final_lz: last,
        lz_growth: last - first,
        max_lz_decrease: lz.windows(2).map(|w| w[0] - w[1]).fold(0.0, f64::max),
        final_state,
    };
    io::write_json(&out.join("trajectory_summary.json"), &summary)
}
