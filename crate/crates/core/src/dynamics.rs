//! Classical point-atom trajectories in the optical force field of a pair.
//!
//! The state is advanced in Cartesian coordinates with the classical
//! fourth-order Runge–Kutta scheme; positions and velocities are handed in and
//! out in the cylindrical frame. Forces are re-evaluated at every stage.

use serde::{Deserialize, Serialize};

use crate::atom_forces::{spring_constant_k0, AtomSpec, CylVector, ForceModel, ForceVec, Light, Optics, Velocity};
use crate::error::{Error, Result};
use crate::lg_mode::CylPoint;
use crate::superpose::Pair;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryState {
    pub position: CylPoint,
    pub velocity: Velocity,
    pub time: f64,
}

impl TrajectoryState {
    pub fn at_rest(position: CylPoint) -> Self {
        TrajectoryState { position, velocity: Velocity::ZERO, time: 0.0 }
    }

    pub fn cartesian_position(&self) -> [f64; 3] {
        self.position.to_cartesian()
    }

    pub fn cartesian_velocity(&self) -> [f64; 3] {
        self.velocity.to_cartesian(self.position.phi)
    }

    /// `L_z = m (x v_y - y v_x)`.
    pub fn angular_momentum(&self, mass: f64) -> f64 {
        let [x, y, _] = self.cartesian_position();
        let [vx, vy, _] = self.cartesian_velocity();
        mass * (x * vy - y * vx)
    }

    pub fn kinetic_energy(&self, mass: f64) -> f64 {
        let v = self.cartesian_velocity();
        0.5 * mass * (v[0] * v[0] + v[1] * v[1] + v[2] * v[2])
    }

    fn from_cartesian(r: [f64; 3], v: [f64; 3], time: f64) -> Self {
        let position = CylPoint::from_cartesian(r[0], r[1], r[2]);
        TrajectoryState { position, velocity: CylVector::from_cartesian(v, position.phi), time }
    }
}

/// Which parts of the optical force act on the atom.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForceTerms {
    /// Radial and axial scattering components.
    pub scattering: bool,
    /// Azimuthal scattering component (the light-induced torque).
    pub torque: bool,
    pub dipole: bool,
}

impl ForceTerms {
    pub const ALL: ForceTerms = ForceTerms { scattering: true, torque: true, dipole: true };
    pub const SCATTERING: ForceTerms = ForceTerms { scattering: true, torque: true, dipole: false };
    pub const AXIAL_TRAP: ForceTerms = ForceTerms { scattering: true, torque: false, dipole: false };
    pub const DIPOLE: ForceTerms = ForceTerms { scattering: false, torque: false, dipole: true };
}

impl Default for ForceTerms {
    fn default() -> Self {
        ForceTerms::ALL
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    /// Nominal step (s); the duration is split into `round(duration/step)` equal steps.
    pub step: f64,
    pub duration: f64,
    pub model: ForceModel,
    #[serde(default)]
    pub terms: ForceTerms,
    /// Include `v·∇Θ` in the detuning.
    pub velocity_coupling: bool,
    /// Keep every n-th state; the first and last states are always kept.
    #[serde(default = "one")]
    pub sample_every: usize,
}

fn one() -> usize {
    1
}

impl IntegratorConfig {
    pub fn new(step: f64, duration: f64, model: ForceModel) -> Self {
        IntegratorConfig { step, duration, model, terms: ForceTerms::ALL, velocity_coupling: true, sample_every: 1 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step.is_finite() && self.step > 0.0) {
            return Err(Error::invalid("step", format!("must be positive, got {}", self.step)));
        }
        if !(self.duration.is_finite() && self.duration >= self.step) {
            return Err(Error::invalid("duration", format!("must be at least one step, got {}", self.duration)));
        }
        if self.sample_every == 0 {
            return Err(Error::invalid("sample_every", "must be at least 1"));
        }
        Ok(())
    }

    pub fn step_count(&self) -> usize {
        ((self.duration / self.step).round() as usize).max(1)
    }
}

/// `sqrt(𝒦₀/m)` of the axial midplane trap.
pub fn trap_frequency(atom: &AtomSpec, pair: &Pair) -> Result<f64> {
    let k0 = spring_constant_k0(atom, pair)?;
    if !(k0 > 0.0) {
        return Err(Error::Domain(format!("no axial trap: K0 = {k0:e} N/m")));
    }
    Ok((k0 / atom.mass).sqrt())
}

/// Length scale of the lit region: `z_R + d/2` axially, the doughnut radius at
/// the far focal plane radially.
pub fn beam_extent(pair: &Pair) -> f64 {
    let b = pair.beam1();
    let axial = b.rayleigh_range() + 0.5 * pair.separation();
    let radial = b.waist_at(pair.separation()) * f64::from(b.abs_winding().max(1)).sqrt();
    axial.max(radial)
}

/// Force evaluator bound to one atom, pair and configuration.
pub struct ForceField<'a> {
    optics: Optics<'a>,
    terms: ForceTerms,
}

impl<'a> ForceField<'a> {
    pub fn new(atom: AtomSpec, pair: &'a Pair, cfg: &IntegratorConfig) -> Result<Self> {
        let optics = Optics::new(atom, Light::Pair(pair), cfg.model)?.with_velocity_coupling(cfg.velocity_coupling);
        Ok(ForceField { optics, terms: cfg.terms })
    }

    pub fn force(&self, pt: CylPoint, vel: &Velocity, t: f64) -> Result<ForceVec> {
        let mut f = ForceVec::ZERO;
        if self.terms.scattering || self.terms.torque {
            let s = self.optics.scattering_force(pt, vel, t)?;
            if self.terms.scattering {
                f.rho += s.rho;
                f.z += s.z;
            }
            if self.terms.torque {
                f.phi += s.phi;
            }
        }
        if self.terms.dipole {
            f += self.optics.dipole_force(pt, vel, t)?;
        }
        Ok(f)
    }

    /// Kinetic plus dipole potential energy; conserved only for dipole-only
    /// motion without velocity coupling in a static field.
    pub fn total_energy(&self, s: &TrajectoryState) -> Result<f64> {
        let v = if self.terms.dipole { self.optics.dipole_potential(s.position, &s.velocity, s.time)? } else { 0.0 };
        Ok(s.kinetic_energy(self.optics.atom().mass) + v)
    }

    fn acceleration(&self, r: [f64; 3], v: [f64; 3], t: f64) -> Result<[f64; 3]> {
        let pt = CylPoint::from_cartesian(r[0], r[1], r[2]);
        let vel = CylVector::from_cartesian(v, pt.phi);
        let f = self.force(pt, &vel, t)?.to_cartesian(pt.phi);
        let m = self.optics.atom().mass;
        Ok([f[0] / m, f[1] / m, f[2] / m])
    }
}

fn axpy(a: f64, x: [f64; 3], y: [f64; 3]) -> [f64; 3] {
    [y[0] + a * x[0], y[1] + a * x[1], y[2] + a * x[2]]
}

/// Integrates the trajectory starting at `init`.
///
/// Fails with [`Error::StepSize`] when the step exceeds a fiftieth of the
/// axial trap period and with [`Error::Divergence`] once the atom is more than
/// ten beam extents from the origin.
pub fn integrate(atom: &AtomSpec, pair: &Pair, init: TrajectoryState, cfg: &IntegratorConfig) -> Result<Vec<TrajectoryState>> {
    cfg.validate()?;
    atom.validate()?;
    if let Ok(omega) = trap_frequency(atom, pair) {
        let limit = std::f64::consts::TAU / (50.0 * omega);
        if cfg.step > limit {
            return Err(Error::StepSize { step: cfg.step, limit });
        }
    }
    let field = ForceField::new(*atom, pair, cfg)?;
    let bound = 10.0 * beam_extent(pair);
    let n = cfg.step_count();
    let h = cfg.duration / n as f64;

    let mut r = init.cartesian_position();
    let mut v = init.cartesian_velocity();
    let t0 = init.time;
    let mut out = Vec::with_capacity(n / cfg.sample_every + 2);
    out.push(TrajectoryState::from_cartesian(r, v, t0));

    for i in 0..n {
        let t = t0 + i as f64 * h;
        let a1 = field.acceleration(r, v, t)?;
        let (r2, v2) = (axpy(0.5 * h, v, r), axpy(0.5 * h, a1, v));
        let a2 = field.acceleration(r2, v2, t + 0.5 * h)?;
        let (r3, v3) = (axpy(0.5 * h, v2, r), axpy(0.5 * h, a2, v));
        let a3 = field.acceleration(r3, v3, t + 0.5 * h)?;
        let (r4, v4) = (axpy(h, v3, r), axpy(h, a3, v));
        let a4 = field.acceleration(r4, v4, t + h)?;
        for k in 0..3 {
            r[k] += h / 6.0 * (v[k] + 2.0 * v2[k] + 2.0 * v3[k] + v4[k]);
            v[k] += h / 6.0 * (a1[k] + 2.0 * a2[k] + 2.0 * a3[k] + a4[k]);
        }
        let t_next = t0 + (i + 1) as f64 * h;
        let radius = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
        if !(radius <= bound) || !v.iter().all(|x| x.is_finite()) {
            return Err(Error::Divergence { time: t_next, radius });
        }
        if (i + 1) % cfg.sample_every == 0 || i + 1 == n {
            out.push(TrajectoryState::from_cartesian(r, v, t_next));
        }
    }
    Ok(out)
}

/// Mean angular frequency of an oscillating signal from the spacing of its
/// upward crossings of the mean, with linear interpolation between samples.
pub fn oscillation_frequency(times: &[f64], values: &[f64]) -> Option<f64> {
    if times.len() != values.len() || times.len() < 3 {
        return None;
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let crossings: Vec<f64> = (1..values.len())
        .filter(|&i| values[i - 1] < mean && values[i] >= mean)
        .map(|i| {
            let (a, b) = (values[i - 1] - mean, values[i] - mean);
            times[i - 1] + (times[i] - times[i - 1]) * (-a / (b - a))
        })
        .collect();
    if crossings.len() < 2 {
        return None;
    }
    let periods = (crossings.len() - 1) as f64;
    Some(std::f64::consts::TAU * periods / (crossings[crossings.len() - 1] - crossings[0]))
}
