//! Run configuration: a JSON document whose physical values are either bare
//! SI numbers or strings with a unit suffix (`"8um"`, `"10.01MHz"`,
//! `"0.5Gamma"`, `"24w0"`). Frequencies given in Hz are cycles per second and
//! are converted to rad/s.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::atom_forces::{central_ring_radius, AtomSpec, ForceModel, PairCoupling, PhaseModel, Velocity};
use crate::dynamics::{ForceTerms, IntegratorConfig, TrajectoryState};
use crate::error::{Error, Result};
use crate::lg_mode::{CylPoint, Sign};
use crate::ring_analysis::{default_region, fringe_maximum};
use crate::superpose::{Axis, GridShape, GridSpec, Pair, PairSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dimension {
    Length,
    AngularFrequency,
    Wavenumber,
    Mass,
    Time,
    Angle,
}

/// Scales that depend on other configuration values.
#[derive(Clone, Copy, Debug, Default)]
pub struct UnitContext {
    pub wavelength: Option<f64>,
    pub waist: Option<f64>,
    pub rayleigh_range: Option<f64>,
    pub ring_radius: Option<f64>,
    pub gamma: Option<f64>,
}

const TWO_PI: f64 = std::f64::consts::TAU;

fn unit_factor(dim: Dimension, unit: &str, ctx: &UnitContext) -> Option<Result<f64>> {
    let need = |v: Option<f64>, what: &str| v.ok_or_else(|| Error::Config(format!("unit `{unit}` needs {what} to be defined first")));
    let f = match (dim, unit) {
        (Dimension::Length, "m") => Ok(1.0),
        (Dimension::Length, "mm") => Ok(1e-3),
        (Dimension::Length, "um" | "μm" | "µm") => Ok(1e-6),
        (Dimension::Length, "nm") => Ok(1e-9),
        (Dimension::Length, "lambda") => need(ctx.wavelength, "the wavelength"),
        (Dimension::Length, "w0") => need(ctx.waist, "the waist"),
        (Dimension::Length, "zR") => need(ctx.rayleigh_range, "the waist and wavelength"),
        (Dimension::Length, "rho0") => need(ctx.ring_radius, "an equal-beam pair"),
        (Dimension::AngularFrequency, "rad/s") => Ok(1.0),
        (Dimension::AngularFrequency, "Hz") => Ok(TWO_PI),
        (Dimension::AngularFrequency, "kHz") => Ok(TWO_PI * 1e3),
        (Dimension::AngularFrequency, "MHz") => Ok(TWO_PI * 1e6),
        (Dimension::AngularFrequency, "GHz") => Ok(TWO_PI * 1e9),
        (Dimension::AngularFrequency, "Gamma") => need(ctx.gamma, "the linewidth"),
        (Dimension::Wavenumber, "rad/m" | "1/m") => Ok(1.0),
        (Dimension::Mass, "kg") => Ok(1.0),
        (Dimension::Mass, "g") => Ok(1e-3),
        (Dimension::Mass, "amu" | "u") => Ok(crate::constants::ATOMIC_MASS_UNIT),
        (Dimension::Time, "s") => Ok(1.0),
        (Dimension::Time, "ms") => Ok(1e-3),
        (Dimension::Time, "us" | "μs" | "µs") => Ok(1e-6),
        (Dimension::Time, "ns") => Ok(1e-9),
        (Dimension::Angle, "rad") => Ok(1.0),
        (Dimension::Angle, "deg") => Ok(std::f64::consts::PI / 180.0),
        (Dimension::Angle, "pi") => Ok(std::f64::consts::PI),
        _ => return None,
    };
    Some(f)
}

const UNITS: &[&str] = &[
    "lambda", "Gamma", "rad/s", "rad/m", "rho0", "amu", "kHz", "MHz", "GHz", "1/m", "deg", "rad", "Hz", "mm", "um", "μm", "µm", "nm", "w0",
    "zR", "kg", "ms", "us", "μs", "µs", "ns", "pi", "m", "g", "u", "s",
];

/// A configuration value: bare SI number or `"<number><unit>"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Quantity {
    Number(f64),
    Text(String),
}

impl Quantity {
    pub fn resolve(&self, dim: Dimension, ctx: &UnitContext) -> Result<f64> {
        match self {
            Quantity::Number(v) => Ok(*v),
            Quantity::Text(s) => parse_quantity(s, dim, ctx),
        }
    }
}

impl From<f64> for Quantity {
    fn from(v: f64) -> Self {
        Quantity::Number(v)
    }
}

/// Parses `"<number><unit>"`; a missing number means 1 and a missing unit means SI.
pub fn parse_quantity(text: &str, dim: Dimension, ctx: &UnitContext) -> Result<f64> {
    let s = text.trim();
    if let Ok(v) = s.parse::<f64>() {
        return Ok(v);
    }
    for unit in UNITS {
        let Some(head) = s.strip_suffix(unit) else { continue };
        let head = head.trim().trim_end_matches('*').trim();
        let value = if head.is_empty() {
            1.0
        } else if head == "-" {
            -1.0
        } else {
            match head.parse::<f64>() {
                Ok(v) => v,
                Err(_) => continue,
            }
        };
        if let Some(factor) = unit_factor(dim, unit, ctx) {
            return Ok(value * factor?);
        }
    }
    Err(Error::Config(format!("cannot read `{text}` as a {dim:?} value")))
}

fn q(v: &Quantity, dim: Dimension, ctx: &UnitContext, field: &str) -> Result<f64> {
    v.resolve(dim, ctx).map_err(|e| match e {
        Error::Config(m) => Error::Config(format!("{field}: {m}")),
        other => other,
    })
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawBeams {
    pub wavelength: Quantity,
    pub waist: Quantity,
    pub l1: i32,
    #[serde(default)]
    pub l2: Option<i32>,
    #[serde(default)]
    pub p: u32,
    #[serde(default = "unit_amp")]
    pub amp1: f64,
    #[serde(default = "unit_amp")]
    pub amp2: f64,
    /// Lab-frame sign of beam 2's `lφ` term (default −1).
    #[serde(default)]
    pub azimuthal_sign2: Option<i32>,
    #[serde(default)]
    pub normalization: Option<f64>,
}

fn unit_amp() -> f64 {
    1.0
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawPair {
    pub separation: Quantity,
    #[serde(default)]
    pub delta_omega: Option<Quantity>,
    #[serde(default)]
    pub delta_k: Option<Quantity>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawAtom {
    pub gamma: Quantity,
    pub delta0: Quantity,
    pub omega0: Quantity,
    pub mass: Quantity,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawModel {
    #[serde(default = "default_phase")]
    pub phase: PhaseModel,
    #[serde(default = "default_coupling")]
    pub coupling: PairCoupling,
}

fn default_phase() -> PhaseModel {
    PhaseModel::Reduced
}

fn default_coupling() -> PairCoupling {
    PairCoupling::SumOfBeams
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawAxis {
    pub min: Quantity,
    pub max: Quantity,
    #[serde(default)]
    pub count: Option<usize>,
    #[serde(default)]
    pub step: Option<Quantity>,
}

/// Axial slice position: a length, or `"fringe:N"` for the `N`-th axial
/// intensity maximum from the centre along the mid-plane ring radius.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, tag = "kind", rename_all = "snake_case")]
pub enum RawGrid {
    RhoZ {
        z: RawAxis,
        rho: RawAxis,
        #[serde(default)]
        phi: Option<Quantity>,
        #[serde(default)]
        time: Option<Quantity>,
        #[serde(default)]
        name: Option<String>,
    },
    Xy {
        x: RawAxis,
        y: RawAxis,
        z: Quantity,
        #[serde(default)]
        time: Option<Quantity>,
        #[serde(default)]
        name: Option<String>,
    },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSweep {
    pub d_min: Quantity,
    pub d_max: Quantity,
    pub steps: usize,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawRings {
    #[serde(default)]
    pub z: Option<RawAxis>,
    #[serde(default)]
    pub rho: Option<RawAxis>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawFerris {
    pub times: Vec<Quantity>,
    #[serde(default)]
    pub rho: Option<Quantity>,
    #[serde(default)]
    pub z: Option<Quantity>,
    /// Write a map per sample time using the first configured grid.
    #[serde(default)]
    pub maps: bool,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawVector {
    #[serde(default)]
    pub rho: Option<Quantity>,
    #[serde(default)]
    pub phi: Option<Quantity>,
    #[serde(default)]
    pub z: Option<Quantity>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawTrajectory {
    pub start: RawVector,
    #[serde(default)]
    pub velocity: Option<RawVector>,
    pub step: Quantity,
    pub duration: Quantity,
    #[serde(default)]
    pub terms: Option<ForceTerms>,
    #[serde(default = "yes")]
    pub velocity_coupling: bool,
    #[serde(default = "one")]
    pub sample_every: usize,
}

fn yes() -> bool {
    true
}

fn one() -> usize {
    1
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub beams: RawBeams,
    pub pair: RawPair,
    #[serde(default)]
    pub atom: Option<RawAtom>,
    #[serde(default)]
    pub model: Option<RawModel>,
    #[serde(default)]
    pub grids: Vec<RawGrid>,
    /// Also write force maps for every grid.
    #[serde(default)]
    pub forces: bool,
    #[serde(default)]
    pub sweep: Option<RawSweep>,
    #[serde(default)]
    pub rings: Option<RawRings>,
    #[serde(default)]
    pub ferris: Option<RawFerris>,
    #[serde(default)]
    pub trajectory: Option<RawTrajectory>,
    /// Accepted for reproducibility bookkeeping; every computation is deterministic.
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NamedGrid {
    pub name: String,
    pub grid: GridSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepConfig {
    pub d_min: f64,
    pub d_max: f64,
    pub steps: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FerrisConfig {
    pub times: Vec<f64>,
    pub rho: f64,
    pub z: f64,
    pub maps: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrajectoryConfig {
    pub start: TrajectoryState,
    pub integrator: IntegratorConfig,
}

/// Fully resolved configuration in SI units.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub pair: PairSpec,
    pub atom: Option<AtomSpec>,
    pub model: ForceModel,
    pub grids: Vec<NamedGrid>,
    pub forces: bool,
    pub sweep: Option<SweepConfig>,
    pub rings_region: Option<GridSpec>,
    pub ferris: Option<FerrisConfig>,
    pub trajectory: Option<TrajectoryConfig>,
    pub seed: Option<u64>,
}

impl RunConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        raw.resolve()
    }

    pub fn require_atom(&self) -> Result<AtomSpec> {
        self.atom.ok_or_else(|| Error::Config("this command needs an `atom` section".into()))
    }

    /// Replaces the phase model; sum-of-beams coupling is forced for the reduced model.
    pub fn set_phase_model(&mut self, phase: PhaseModel) {
        self.model.phase = phase;
        if phase == PhaseModel::Reduced {
            self.model.coupling = PairCoupling::SumOfBeams;
        }
        if let Some(t) = &mut self.trajectory {
            t.integrator.model = self.model;
        }
    }
}

fn resolve_axis(a: &RawAxis, ctx: &UnitContext, field: &str) -> Result<Axis> {
    let min = q(&a.min, Dimension::Length, ctx, field)?;
    let max = q(&a.max, Dimension::Length, ctx, field)?;
    let axis = match (a.count, &a.step) {
        (Some(n), None) => Axis::new(min, max, n),
        (None, Some(s)) => {
            let step = q(s, Dimension::Length, ctx, field)?;
            if !(step > 0.0) {
                return Err(Error::Config(format!("{field}: step must be positive")));
            }
            Axis::with_max_step(min, max, step)
        }
        _ => return Err(Error::Config(format!("{field}: give exactly one of `count` or `step`"))),
    };
    Ok(axis)
}

impl RawConfig {
    pub fn resolve(&self) -> Result<RunConfig> {
        let mut ctx = UnitContext::default();
        let b = &self.beams;
        let wavelength = q(&b.wavelength, Dimension::Length, &ctx, "beams.wavelength")?;
        ctx.wavelength = Some(wavelength);
        let waist = q(&b.waist, Dimension::Length, &ctx, "beams.waist")?;
        ctx.waist = Some(waist);
        ctx.rayleigh_range = Some(std::f64::consts::PI * waist * waist / wavelength);

        let separation = q(&self.pair.separation, Dimension::Length, &ctx, "pair.separation")?;
        if !(separation >= 0.0) {
            return Err(Error::Config(format!("pair.separation must be non-negative, got {separation}")));
        }
        let l2 = b.l2.unwrap_or(b.l1);
        let mut spec = PairSpec::counter_propagating(wavelength, waist, b.l1, l2, separation);
        spec.beam1.radial = b.p;
        spec.beam2.radial = b.p;
        spec.beam1.amp_scale = b.amp1;
        spec.beam2.amp_scale = b.amp2;
        spec.beam1.normalization = b.normalization;
        spec.beam2.normalization = b.normalization;
        if let Some(s) = b.azimuthal_sign2 {
            spec.beam2.azimuthal_sign = Sign::from_i32(s).ok_or_else(|| Error::Config(format!("beams.azimuthal_sign2 must be +1 or -1, got {s}")))?;
        }

        let mut atom = None;
        if let Some(a) = &self.atom {
            let gamma = q(&a.gamma, Dimension::AngularFrequency, &ctx, "atom.gamma")?;
            ctx.gamma = Some(gamma);
            atom = Some(AtomSpec {
                gamma,
                delta0: q(&a.delta0, Dimension::AngularFrequency, &ctx, "atom.delta0")?,
                omega0_rabi: q(&a.omega0, Dimension::AngularFrequency, &ctx, "atom.omega0")?,
                mass: q(&a.mass, Dimension::Mass, &ctx, "atom.mass")?,
            });
        }
        if let Some(dw) = &self.pair.delta_omega {
            spec.delta_omega = q(dw, Dimension::AngularFrequency, &ctx, "pair.delta_omega")?;
        }
        if let Some(dk) = &self.pair.delta_k {
            spec.delta_k = q(dk, Dimension::Wavenumber, &ctx, "pair.delta_k")?;
        }

        let pair = Pair::new(spec.clone()).map_err(|e| Error::Config(e.to_string()))?;
        if let Some(a) = &atom {
            a.validate().map_err(|e| Error::Config(e.to_string()))?;
        }
        ctx.ring_radius = central_ring_radius(&pair).ok();

        let model = match &self.model {
            Some(m) => ForceModel { phase: m.phase, coupling: m.coupling },
            None => ForceModel::REDUCED_SUM,
        };
        if model.phase == PhaseModel::Reduced && model.coupling == PairCoupling::TotalField {
            return Err(Error::Config("the reduced phase model needs sum_of_beams coupling".into()));
        }

        let mut grids = Vec::new();
        for (i, g) in self.grids.iter().enumerate() {
            let field = format!("grids[{i}]");
            let (grid, name) = match g {
                RawGrid::RhoZ { z, rho, phi, time, name } => {
                    let phi = phi.as_ref().map(|p| q(p, Dimension::Angle, &ctx, &field)).transpose()?.unwrap_or(0.0);
                    let t = time.as_ref().map(|p| q(p, Dimension::Time, &ctx, &field)).transpose()?.unwrap_or(0.0);
                    let grid = GridSpec::rho_z(resolve_axis(z, &ctx, &field)?, resolve_axis(rho, &ctx, &field)?, phi).at_time(t);
                    (grid, name.clone().unwrap_or_else(|| format!("map{i}_rho_z")))
                }
                RawGrid::Xy { x, y, z, time, name } => {
                    let zpos = resolve_slice_z(z, &pair, &ctx, &field)?;
                    let t = time.as_ref().map(|p| q(p, Dimension::Time, &ctx, &field)).transpose()?.unwrap_or(0.0);
                    let grid = GridSpec::xy(resolve_axis(x, &ctx, &field)?, resolve_axis(y, &ctx, &field)?, zpos).at_time(t);
                    (grid, name.clone().unwrap_or_else(|| format!("map{i}_xy")))
                }
            };
            grid.validate().map_err(|e| Error::Config(format!("{field}: {e}")))?;
            grids.push(NamedGrid { name, grid });
        }

        let sweep = match &self.sweep {
            Some(s) => {
                let d_min = q(&s.d_min, Dimension::Length, &ctx, "sweep.d_min")?;
                let d_max = q(&s.d_max, Dimension::Length, &ctx, "sweep.d_max")?;
                if !(d_min >= 0.0 && d_max >= d_min) || s.steps == 0 {
                    return Err(Error::Config("sweep needs 0 <= d_min <= d_max and steps >= 1".into()));
                }
                Some(SweepConfig { d_min, d_max, steps: s.steps })
            }
            None => None,
        };

        let rings_region = self.rings.as_ref().map(|r| rings_region(r, &pair, &ctx)).transpose()?;

        let ferris = match &self.ferris {
            Some(f) => {
                let times = f.times.iter().map(|t| q(t, Dimension::Time, &ctx, "ferris.times")).collect::<Result<Vec<_>>>()?;
                let rho = match &f.rho {
                    Some(r) => q(r, Dimension::Length, &ctx, "ferris.rho")?,
                    None => ctx.ring_radius.ok_or_else(|| Error::Config("ferris.rho is required for unequal beams".into()))?,
                };
                let z = f.z.as_ref().map(|z| q(z, Dimension::Length, &ctx, "ferris.z")).transpose()?.unwrap_or(0.0);
                Some(FerrisConfig { times, rho, z, maps: f.maps })
            }
            None => None,
        };

        let trajectory = match &self.trajectory {
            Some(t) => {
                let comp = |v: &Option<Quantity>, dim, f: &str| -> Result<f64> {
                    v.as_ref().map(|x| q(x, dim, &ctx, f)).transpose().map(|o| o.unwrap_or(0.0))
                };
                let position = CylPoint::new(
                    comp(&t.start.rho, Dimension::Length, "trajectory.start.rho")?,
                    comp(&t.start.phi, Dimension::Angle, "trajectory.start.phi")?,
                    comp(&t.start.z, Dimension::Length, "trajectory.start.z")?,
                );
                if position.rho < 0.0 {
                    return Err(Error::Config("trajectory.start.rho must be non-negative".into()));
                }
                let velocity = match &t.velocity {
                    Some(v) => Velocity::new(plain(&v.rho)?, plain(&v.phi)?, plain(&v.z)?),
                    None => Velocity::ZERO,
                };
                let mut integrator = IntegratorConfig::new(
                    q(&t.step, Dimension::Time, &ctx, "trajectory.step")?,
                    q(&t.duration, Dimension::Time, &ctx, "trajectory.duration")?,
                    model,
                );
                integrator.terms = t.terms.unwrap_or_default();
                integrator.velocity_coupling = t.velocity_coupling;
                integrator.sample_every = t.sample_every;
                integrator.validate().map_err(|e| Error::Config(e.to_string()))?;
                Some(TrajectoryConfig { start: TrajectoryState { position, velocity, time: 0.0 }, integrator })
            }
            None => None,
        };

        Ok(RunConfig { pair: spec, atom, model, grids, forces: self.forces, sweep, rings_region, ferris, trajectory, seed: self.seed })
    }
}

/// Velocities are plain m/s numbers.
fn plain(v: &Option<Quantity>) -> Result<f64> {
    match v {
        None => Ok(0.0),
        Some(Quantity::Number(x)) => Ok(*x),
        Some(Quantity::Text(s)) => {
            let s = s.trim();
            s.strip_suffix("m/s").unwrap_or(s).trim().parse().map_err(|_| Error::Config(format!("cannot read velocity `{s}`")))
        }
    }
}

fn resolve_slice_z(z: &Quantity, pair: &Pair, ctx: &UnitContext, field: &str) -> Result<f64> {
    if let Quantity::Text(s) = z {
        if let Some(n) = s.trim().strip_prefix("fringe:") {
            let n: i32 = n.trim().parse().map_err(|_| Error::Config(format!("{field}: bad fringe index in `{s}`")))?;
            let rho = ctx.ring_radius.ok_or_else(|| Error::Config(format!("{field}: `fringe:N` needs equal beams")))?;
            let guess = f64::from(n) * std::f64::consts::PI / pair.wavenumber();
            return Ok(fringe_maximum(pair, rho, 0.0, guess, 0.0));
        }
    }
    q(z, Dimension::Length, ctx, field)
}

/// Ring-detection region; unset axes fall back to [`default_region`].
fn rings_region(r: &RawRings, pair: &Pair, ctx: &UnitContext) -> Result<GridSpec> {
    let GridSpec { shape: GridShape::RhoZ { z: z0, rho: rho0, .. }, .. } = default_region(pair) else {
        unreachable!("default region is a (rho, z) grid")
    };
    let z = match &r.z {
        Some(a) => resolve_axis(a, ctx, "rings.z")?,
        None => z0,
    };
    let rho = match &r.rho {
        Some(a) => resolve_axis(a, ctx, "rings.rho")?,
        None => rho0,
    };
    Ok(GridSpec::rho_z(z, rho, 0.0))
}
