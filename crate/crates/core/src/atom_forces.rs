//! Optical forces on a two-level atom.
//!
//! For a field component with Rabi frequency `Ω(r)` and phase `Θ(r)` the
//! steady-state forces are
//!
//! ```text
//! F_scatt = (ħΓ/4) Ω² ∇Θ / (Δ² + Ω²/2 + Γ²/4)
//! F_dip   = -(ħ/2) Ω ∇Ω  Δ / (Δ² + Ω²/2 + Γ²/4)
//! V_dip   =  (ħ/2) Δ ln(1 + (Ω²/2) / (Δ² + Γ²/4))
//! ```
//!
//! with `Δ = Δ₀ - v·∇Θ`. A pair of beams is treated either as two independent
//! components whose forces add (the low-intensity picture) or as one
//! component carrying the superposed field (an extrapolation to saturation).
//!
//! The second half of the module holds the closed-form low-intensity trap
//! quantities of the shifted pair: `Q±`, the axial spring constant, the
//! mid-plane ring radius and the light-induced torque.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::constants::{AXIS_EPSILON, HBAR};
use crate::error::{Error, Result};
use crate::lg_mode::{CylPoint, LgMode};
use crate::numdiff::Stencil;
use crate::superpose::Pair;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AtomSpec {
    /// Natural linewidth Γ (rad/s).
    pub gamma: f64,
    /// Detuning Δ₀ = ω - ω₀ (rad/s).
    pub delta0: f64,
    /// Rabi frequency Ω₀ for a field of amplitude `U_k00` (rad/s).
    pub omega0_rabi: f64,
    /// Mass (kg).
    pub mass: f64,
}

impl AtomSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma.is_finite() && self.gamma > 0.0) {
            return Err(Error::invalid("gamma", format!("must be positive, got {}", self.gamma)));
        }
        if !(self.mass.is_finite() && self.mass > 0.0) {
            return Err(Error::invalid("mass", format!("must be positive, got {}", self.mass)));
        }
        if !(self.omega0_rabi.is_finite() && self.omega0_rabi >= 0.0) {
            return Err(Error::invalid("omega0_rabi", format!("must be non-negative, got {}", self.omega0_rabi)));
        }
        if !self.delta0.is_finite() {
            return Err(Error::invalid("delta0", "must be finite"));
        }
        Ok(())
    }

    /// `Δ₀² + Γ²/4`.
    pub fn detuning_width_sq(&self) -> f64 {
        self.delta0 * self.delta0 + 0.25 * self.gamma * self.gamma
    }
}

/// Vector in the local cylindrical frame `(ρ̂, φ̂, ẑ)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CylVector {
    pub rho: f64,
    pub phi: f64,
    pub z: f64,
}

/// Force (N).
pub type ForceVec = CylVector;
/// Velocity (m/s).
pub type Velocity = CylVector;
/// Phase gradient (rad/m); `phi` is `(1/ρ) ∂Θ/∂φ`.
pub type PhaseGradient = CylVector;

impl CylVector {
    pub const ZERO: CylVector = CylVector { rho: 0.0, phi: 0.0, z: 0.0 };

    pub fn new(rho: f64, phi: f64, z: f64) -> Self {
        CylVector { rho, phi, z }
    }

    pub fn dot(&self, other: &CylVector) -> f64 {
        self.rho * other.rho + self.phi * other.phi + self.z * other.z
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.rho.is_finite() && self.phi.is_finite() && self.z.is_finite()
    }

    /// Rotates into Cartesian components at azimuth `phi`.
    pub fn to_cartesian(&self, phi: f64) -> [f64; 3] {
        let (s, c) = phi.sin_cos();
        [self.rho * c - self.phi * s, self.rho * s + self.phi * c, self.z]
    }

    pub fn from_cartesian(v: [f64; 3], phi: f64) -> Self {
        let (s, c) = phi.sin_cos();
        CylVector { rho: v[0] * c + v[1] * s, phi: -v[0] * s + v[1] * c, z: v[2] }
    }
}

impl Add for CylVector {
    type Output = CylVector;
    fn add(self, o: CylVector) -> CylVector {
        CylVector::new(self.rho + o.rho, self.phi + o.phi, self.z + o.z)
    }
}

impl AddAssign for CylVector {
    fn add_assign(&mut self, o: CylVector) {
        *self = *self + o;
    }
}

impl Sub for CylVector {
    type Output = CylVector;
    fn sub(self, o: CylVector) -> CylVector {
        CylVector::new(self.rho - o.rho, self.phi - o.phi, self.z - o.z)
    }
}

impl Neg for CylVector {
    type Output = CylVector;
    fn neg(self) -> CylVector {
        CylVector::new(-self.rho, -self.phi, -self.z)
    }
}

impl Mul<f64> for CylVector {
    type Output = CylVector;
    fn mul(self, s: f64) -> CylVector {
        CylVector::new(self.rho * s, self.phi * s, self.z * s)
    }
}

/// How phase gradients are obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseModel {
    /// Gouy and curvature phases dropped: each beam contributes
    /// `±k ẑ + (l/ρ) φ̂`, both beams circulating the same way.
    Reduced,
    /// Finite differences of the complete phase.
    Full,
}

/// How the two beams of a pair act on the atom.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairCoupling {
    /// Forces of the individual beams add (low intensity).
    SumOfBeams,
    /// Single-field formulas applied to the superposed `U`, `Θ`.
    TotalField,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ForceModel {
    pub phase: PhaseModel,
    pub coupling: PairCoupling,
}

impl ForceModel {
    pub const REDUCED_SUM: ForceModel = ForceModel { phase: PhaseModel::Reduced, coupling: PairCoupling::SumOfBeams };
    pub const FULL_SUM: ForceModel = ForceModel { phase: PhaseModel::Full, coupling: PairCoupling::SumOfBeams };
    pub const FULL_TOTAL: ForceModel = ForceModel { phase: PhaseModel::Full, coupling: PairCoupling::TotalField };
}

/// `Ω = Ω₀ U / U_ref`.
pub fn rabi_at(atom: &AtomSpec, amplitude: f64, amp_scale_ref: f64) -> f64 {
    atom.omega0_rabi * amplitude / amp_scale_ref
}

/// `Δ = Δ₀ - v·∇Θ`.
pub fn detuning_eff(atom: &AtomSpec, vel: &Velocity, grad: &PhaseGradient) -> f64 {
    atom.delta0 - vel.dot(grad)
}

fn saturation_denominator(atom: &AtomSpec, omega_sq: f64, detuning: f64) -> f64 {
    detuning * detuning + 0.5 * omega_sq + 0.25 * atom.gamma * atom.gamma
}

/// Scattering force for given `Ω²`, `∇Θ` and effective detuning.
pub fn scattering_from(atom: &AtomSpec, omega_sq: f64, grad: &PhaseGradient, detuning: f64) -> ForceVec {
    if omega_sq == 0.0 {
        return ForceVec::ZERO;
    }
    *grad * (0.25 * HBAR * atom.gamma * omega_sq / saturation_denominator(atom, omega_sq, detuning))
}

/// Dipole force for given `Ω`, `∇Ω` and effective detuning.
pub fn dipole_from(atom: &AtomSpec, omega: f64, grad_omega: &CylVector, detuning: f64) -> ForceVec {
    *grad_omega * (-0.5 * HBAR * omega * detuning / saturation_denominator(atom, omega * omega, detuning))
}

/// Dipole potential for given `Ω²` and effective detuning.
pub fn dipole_potential_from(atom: &AtomSpec, omega_sq: f64, detuning: f64) -> f64 {
    let width = detuning * detuning + 0.25 * atom.gamma * atom.gamma;
    0.5 * HBAR * detuning * (0.5 * omega_sq / width).ln_1p()
}

/// One field acting on the atom.
#[derive(Clone, Copy, Debug)]
pub enum FieldComponent<'a> {
    /// A single beam; `delta_k` adds to its axial wavenumber (beam 2 of a pair
    /// carries the pair's `Δk`).
    Beam { mode: &'a LgMode, delta_k: f64 },
    /// The superposed field of a pair.
    Total(&'a Pair),
}

impl<'a> FieldComponent<'a> {
    pub fn beam(mode: &'a LgMode) -> Self {
        FieldComponent::Beam { mode, delta_k: 0.0 }
    }

    /// Signed-free amplitude `|U|`.
    pub fn amplitude(&self, pt: CylPoint, t: f64) -> f64 {
        match self {
            FieldComponent::Beam { mode, .. } => mode.amplitude(pt).abs(),
            FieldComponent::Total(pair) => pair.total_amplitude(pt, t),
        }
    }

    /// Unit-modulus (beams) or envelope (pairs) field without the carrier
    /// `e^{iωt}`; phase differences are taken through ratios of these.
    fn complex(&self, pt: CylPoint, t: f64) -> num_complex::Complex64 {
        match self {
            FieldComponent::Beam { mode, delta_k } => num_complex::Complex64::from_polar(1.0, mode.phase(pt, 0.0) + delta_k * pt.z),
            FieldComponent::Total(pair) => pair.field_sum_envelope(pt, t),
        }
    }

    fn wavelength_and_waist(&self) -> (f64, f64) {
        let spec = match self {
            FieldComponent::Beam { mode, .. } => mode.spec(),
            FieldComponent::Total(pair) => &pair.spec().beam1,
        };
        (spec.wavelength, spec.waist)
    }

    pub fn default_stencil(&self) -> Stencil {
        let (l, w) = self.wavelength_and_waist();
        Stencil::for_beam(l, w)
    }

    /// `∇Θ`; errors at dark points of a superposed field.
    pub fn phase_gradient(&self, pt: CylPoint, t: f64, model: PhaseModel, stencil: &Stencil) -> Result<PhaseGradient> {
        let on_axis = pt.rho < AXIS_EPSILON;
        match (self, model) {
            (FieldComponent::Beam { mode, delta_k }, PhaseModel::Reduced) => {
                let spec = mode.spec();
                let az = if on_axis { 0.0 } else { f64::from(spec.winding) / pt.rho };
                Ok(CylVector::new(0.0, az, spec.direction.value() * mode.wavenumber() + delta_k))
            }
            (FieldComponent::Total(_), PhaseModel::Reduced) => {
                Err(Error::Domain("the reduced phase model is defined per beam; use sum-of-beams coupling".into()))
            }
            (FieldComponent::Beam { mode, delta_k }, PhaseModel::Full) => {
                // the carrier ω t is common to both samples
                let phase = |p: CylPoint| mode.phase(p, 0.0) + delta_k * p.z;
                let d_rho = stencil.derivative(|h| {
                    wrap_difference(phase(CylPoint { rho: pt.rho + h, ..pt }) - phase(CylPoint { rho: pt.rho - h, ..pt }))
                });
                let d_z = stencil.derivative(|h| {
                    wrap_difference(phase(CylPoint { z: pt.z + h, ..pt }) - phase(CylPoint { z: pt.z - h, ..pt }))
                });
                let spec = mode.spec();
                let az = if on_axis { 0.0 } else { spec.azimuthal_sign.value() * f64::from(spec.winding) / pt.rho };
                Ok(CylVector::new(d_rho, az, d_z))
            }
            (FieldComponent::Total(pair), PhaseModel::Full) => {
                let (u, phase) = pair.total_field(pt, t);
                if phase.is_none() {
                    return Err(Error::DarkPoint { amplitude: u });
                }
                let arg_ratio = |a: CylPoint, b: CylPoint| -> Result<f64> {
                    let r = self.complex(a, t) * self.complex(b, t).conj();
                    if r.norm() == 0.0 {
                        return Err(Error::DarkPoint { amplitude: 0.0 });
                    }
                    Ok(r.arg())
                };
                let d_rho = stencil.try_derivative(|h| arg_ratio(CylPoint { rho: pt.rho + h, ..pt }, CylPoint { rho: pt.rho - h, ..pt }))?;
                let d_z = stencil.try_derivative(|h| arg_ratio(CylPoint { z: pt.z + h, ..pt }, CylPoint { z: pt.z - h, ..pt }))?;
                let az = if on_axis {
                    0.0
                } else {
                    // arc-length step h along φ̂
                    stencil.try_derivative(|h| {
                        let dphi = h / pt.rho;
                        arg_ratio(CylPoint { phi: pt.phi + dphi, ..pt }, CylPoint { phi: pt.phi - dphi, ..pt })
                    })?
                };
                Ok(CylVector::new(d_rho, az, d_z))
            }
        }
    }

    /// `∇|U|`. Single beams use central differences. For a pair the smooth
    /// pieces of `U² = U₁² + U₂² + 2U₁U₂ cos χ` are differentiated separately,
    /// since `|U|` itself is nearly kinked at deep fringe minima.
    pub fn amplitude_gradient(&self, pt: CylPoint, t: f64, stencil: &Stencil) -> CylVector {
        match self {
            FieldComponent::Beam { mode, .. } => {
                let g = beam_amplitude_gradient(mode, pt, stencil);
                if mode.amplitude(pt) < 0.0 {
                    -g
                } else {
                    g
                }
            }
            FieldComponent::Total(pair) => {
                let u = pair.total_amplitude(pt, t);
                if u == 0.0 {
                    return CylVector::ZERO;
                }
                let (u1, u2) = (pair.beam1().amplitude(pt), pair.beam2().amplitude(pt));
                let (g1, g2) = (beam_amplitude_gradient(pair.beam1(), pt, stencil), beam_amplitude_gradient(pair.beam2(), pt, stencil));
                let chi = |p: CylPoint| pair.mixing_angle(p, t);
                let d_rho = stencil.derivative(|h| wrap_difference(chi(CylPoint { rho: pt.rho + h, ..pt }) - chi(CylPoint { rho: pt.rho - h, ..pt })));
                let d_z = stencil.derivative(|h| wrap_difference(chi(CylPoint { z: pt.z + h, ..pt }) - chi(CylPoint { z: pt.z - h, ..pt })));
                let d_phi = if pt.rho < AXIS_EPSILON { 0.0 } else { f64::from(pair.azimuthal_order()) / pt.rho };
                let grad_chi = CylVector::new(d_rho, d_phi, d_z);
                let (s, c) = chi(pt).sin_cos();
                let half_grad_sq = g1 * (u1 + c * u2) + g2 * (u2 + c * u1) + grad_chi * (-u1 * u2 * s);
                half_grad_sq * (1.0 / u)
            }
        }
    }
}

/// `∇U` of a signed single-beam amplitude; `U` has no `φ` dependence.
fn beam_amplitude_gradient(mode: &LgMode, pt: CylPoint, stencil: &Stencil) -> CylVector {
    let amp = |p: CylPoint| mode.amplitude(p);
    let d_rho = stencil.derivative(|h| amp(CylPoint { rho: pt.rho + h, ..pt }) - amp(CylPoint { rho: pt.rho - h, ..pt }));
    let d_z = stencil.derivative(|h| amp(CylPoint { z: pt.z + h, ..pt }) - amp(CylPoint { z: pt.z - h, ..pt }));
    CylVector::new(d_rho, 0.0, d_z)
}

fn wrap_difference(d: f64) -> f64 {
    crate::lg_mode::principal(d)
}

/// The light field seen by an atom.
#[derive(Clone, Copy, Debug)]
pub enum Light<'a> {
    Beam(&'a LgMode),
    Pair(&'a Pair),
}

/// Force evaluator for one atom species in one light field.
#[derive(Clone, Debug)]
pub struct Optics<'a> {
    atom: AtomSpec,
    components: Vec<FieldComponent<'a>>,
    phase_model: PhaseModel,
    amp_ref: f64,
    stencil: Stencil,
    velocity_coupling: bool,
}

impl<'a> Optics<'a> {
    pub fn new(atom: AtomSpec, light: Light<'a>, model: ForceModel) -> Result<Self> {
        atom.validate()?;
        let (components, amp_ref) = match light {
            Light::Beam(mode) => (vec![FieldComponent::beam(mode)], mode.spec().amp_scale),
            Light::Pair(pair) => {
                let s = pair.spec();
                let amp_ref = if s.beam1.amp_scale > 0.0 { s.beam1.amp_scale } else { s.beam2.amp_scale };
                let comps = match model.coupling {
                    PairCoupling::SumOfBeams => vec![
                        FieldComponent::beam(pair.beam1()),
                        FieldComponent::Beam { mode: pair.beam2(), delta_k: s.delta_k },
                    ],
                    PairCoupling::TotalField => {
                        if model.phase == PhaseModel::Reduced {
                            return Err(Error::Domain("reduced phase model requires sum-of-beams coupling".into()));
                        }
                        vec![FieldComponent::Total(pair)]
                    }
                };
                (comps, amp_ref)
            }
        };
        if amp_ref <= 0.0 {
            return Err(Error::invalid("amp_scale", "the reference amplitude U_k00 must be positive"));
        }
        let stencil = components[0].default_stencil();
        Ok(Optics { atom, components, phase_model: model.phase, amp_ref, stencil, velocity_coupling: true })
    }

    pub fn with_stencil(mut self, stencil: Stencil) -> Self {
        self.stencil = stencil;
        self
    }

    /// When off, `Δ = Δ₀` regardless of the atom's velocity.
    pub fn with_velocity_coupling(mut self, on: bool) -> Self {
        self.velocity_coupling = on;
        self
    }

    pub fn atom(&self) -> &AtomSpec {
        &self.atom
    }

    pub fn components(&self) -> &[FieldComponent<'a>] {
        &self.components
    }

    pub fn stencil(&self) -> Stencil {
        self.stencil
    }

    /// Rabi frequency of one component.
    pub fn rabi(&self, component: &FieldComponent<'_>, pt: CylPoint, t: f64) -> f64 {
        rabi_at(&self.atom, component.amplitude(pt, t), self.amp_ref)
    }

    /// Phase gradient of a single-component light field.
    pub fn phase_gradient(&self, pt: CylPoint, t: f64) -> Result<PhaseGradient> {
        match self.components.as_slice() {
            [only] => only.phase_gradient(pt, t, self.phase_model, &self.stencil),
            _ => Err(Error::Domain("sum-of-beams coupling has one phase gradient per beam".into())),
        }
    }

    fn gradient_or_dark(&self, c: &FieldComponent<'_>, pt: CylPoint, t: f64) -> Result<PhaseGradient> {
        match c.phase_gradient(pt, t, self.phase_model, &self.stencil) {
            Err(Error::DarkPoint { .. }) => Ok(PhaseGradient::ZERO),
            other => other,
        }
    }

    fn detuning(&self, vel: &Velocity, grad: &PhaseGradient) -> f64 {
        if self.velocity_coupling {
            detuning_eff(&self.atom, vel, grad)
        } else {
            self.atom.delta0
        }
    }

    pub fn scattering_force(&self, pt: CylPoint, vel: &Velocity, t: f64) -> Result<ForceVec> {
        let mut total = ForceVec::ZERO;
        for c in &self.components {
            let omega = self.rabi(c, pt, t);
            let grad = self.gradient_or_dark(c, pt, t)?;
            total += scattering_from(&self.atom, omega * omega, &grad, self.detuning(vel, &grad));
        }
        Ok(total)
    }

    pub fn dipole_force(&self, pt: CylPoint, vel: &Velocity, t: f64) -> Result<ForceVec> {
        let mut total = ForceVec::ZERO;
        for c in &self.components {
            let omega = self.rabi(c, pt, t);
            let grad = self.gradient_or_dark(c, pt, t)?;
            let grad_omega = c.amplitude_gradient(pt, t, &self.stencil) * (self.atom.omega0_rabi / self.amp_ref);
            total += dipole_from(&self.atom, omega, &grad_omega, self.detuning(vel, &grad));
        }
        Ok(total)
    }

    pub fn dipole_potential(&self, pt: CylPoint, vel: &Velocity, t: f64) -> Result<f64> {
        let mut total = 0.0;
        for c in &self.components {
            let omega = self.rabi(c, pt, t);
            let detuning = if self.velocity_coupling {
                self.detuning(vel, &self.gradient_or_dark(c, pt, t)?)
            } else {
                self.atom.delta0
            };
            total += dipole_potential_from(&self.atom, omega * omega, detuning);
        }
        Ok(total)
    }
}

fn require_equal_doughnuts(pair: &Pair) -> Result<()> {
    let (a, b) = (&pair.spec().beam1, &pair.spec().beam2);
    if a.radial != 0 || b.radial != 0 {
        return Err(Error::Domain("closed-form trap quantities require p = 0 doughnut beams".into()));
    }
    if a.winding.abs() != b.winding.abs() || a.waist != b.waist || a.amp_scale != b.amp_scale {
        return Err(Error::Domain("closed-form trap quantities require equal beams".into()));
    }
    Ok(())
}

/// Beam-1 Rabi frequency squared at `pt`, referenced to its own amplitude scale.
fn rabi_sq_beam(atom: &AtomSpec, mode: &LgMode, pt: CylPoint) -> f64 {
    let omega = rabi_at(atom, mode.amplitude(pt), mode.spec().amp_scale);
    omega * omega
}

/// Saturation ratio `Ω²/(Δ₀² + Γ²/4 + Ω²/2)` of beam 1 at `pt`.
pub fn q_plus(atom: &AtomSpec, pair: &Pair, pt: CylPoint) -> f64 {
    let w = rabi_sq_beam(atom, pair.beam1(), pt);
    w / (atom.detuning_width_sq() + 0.5 * w)
}

/// As [`q_plus`] for beam 2.
pub fn q_minus(atom: &AtomSpec, pair: &Pair, pt: CylPoint) -> f64 {
    let w = rabi_sq_beam(atom, pair.beam2(), pt);
    w / (atom.detuning_width_sq() + 0.5 * w)
}

/// Axial component of the reduced sum-of-beams scattering force at `v = 0`:
/// `(ħΓk/4)(Q₊ - Q₋)`.
pub fn reduced_axial_force(atom: &AtomSpec, pair: &Pair, rho: f64, z: f64) -> f64 {
    let pt = CylPoint::new(rho, 0.0, z);
    0.25 * HBAR * atom.gamma * pair.wavenumber() * (q_plus(atom, pair, pt) - q_minus(atom, pair, pt))
}

/// Position-dependent spring constant `𝒦(ρ)` of the axial scattering trap.
pub fn spring_constant(atom: &AtomSpec, pair: &Pair, rho: f64) -> Result<f64> {
    require_equal_doughnuts(pair)?;
    let b = pair.beam1();
    let zr = b.rayleigh_range();
    let w0 = b.spec().waist;
    let d = pair.separation();
    let l = f64::from(b.abs_winding());
    let a2 = zr * zr + d * d / 4.0;
    let bracket = ((l + 1.0) * a2 - 2.0 * rho * rho * zr * zr / (w0 * w0)) / (a2 * a2);
    Ok(spring_prefactor(atom, pair, rho) * bracket)
}

/// `(ħΓk/2) d (Δ₀²+Γ²/4) Ω² / (Δ₀²+Γ²/4+Ω²/2)²` with `Ω` taken from beam 1 at
/// radius `rho`, a distance `d/2` from its focus.
fn spring_prefactor(atom: &AtomSpec, pair: &Pair, rho: f64) -> f64 {
    let w = rabi_sq_beam(atom, pair.beam1(), CylPoint::new(rho, 0.0, 0.0));
    let a = atom.detuning_width_sq();
    0.5 * HBAR * atom.gamma * pair.wavenumber() * pair.separation() * a * w / (a + 0.5 * w).powi(2)
}

/// Spring constant on the mid-plane ring, `𝒦₀ = 𝒦(ρ₀)`.
pub fn spring_constant_k0(atom: &AtomSpec, pair: &Pair) -> Result<f64> {
    let rho0 = central_ring_radius(pair)?;
    let zr = pair.beam1().rayleigh_range();
    let d = pair.separation();
    Ok(spring_prefactor(atom, pair, rho0) / (zr * zr + d * d / 4.0))
}

/// `V₀(z) = 𝒦₀ z² / 2`.
pub fn harmonic_potential_v0(atom: &AtomSpec, pair: &Pair, z: f64) -> Result<f64> {
    Ok(0.5 * spring_constant_k0(atom, pair)? * z * z)
}

/// `ρ₀ = w0 sqrt(|l|/2) sqrt(1 + d²/(4 z_R²))`.
pub fn central_ring_radius(pair: &Pair) -> Result<f64> {
    require_equal_doughnuts(pair)?;
    Ok(pair.beam1().doughnut_radius(pair.separation() / 2.0))
}

/// Axial torque on an atom at rest on the mid-plane ring: `(ħΓ|l|/2) Q₊(ρ₀, 0)`.
pub fn torque_axial(atom: &AtomSpec, pair: &Pair) -> Result<f64> {
    let rho0 = central_ring_radius(pair)?;
    let l = f64::from(pair.spec().beam1.winding);
    Ok(0.5 * HBAR * atom.gamma * l * q_plus(atom, pair, CylPoint::new(rho0, 0.0, 0.0)))
}

/// Angular velocity of the interference pattern, `Δω / m` with `m` the net
/// azimuthal order (`Δω/(2l)` for equal beams).
pub fn ferris_rate(pair: &Pair) -> Result<f64> {
    let m = pair.azimuthal_order();
    if m == 0 {
        return Err(Error::Domain("net azimuthal order is zero: the pattern has no petals to rotate".into()));
    }
    Ok(pair.spec().delta_omega / f64::from(m))
}

/// Axial drift speed of the fringes with Gouy and curvature phases ignored,
/// `Δω / (2k)`.
pub fn lift_speed(pair: &Pair) -> f64 {
    pair.spec().delta_omega / (2.0 * pair.wavenumber())
}

/// `-∂F_z/∂z` at `(ρ₀, 0)` of the reduced sum-of-beams force, by Richardson
/// central differences with step `z_R/1000`.
pub fn spring_constant_numeric(atom: &AtomSpec, pair: &Pair) -> Result<f64> {
    let rho0 = central_ring_radius(pair)?;
    let h = 1e-3 * pair.beam1().rayleigh_range();
    Ok(-Stencil::new(h).derivative(|dz| reduced_axial_force(atom, pair, rho0, dz) - reduced_axial_force(atom, pair, rho0, -dz)))
}

/// Total optical force sampled on a grid, for an atom at rest.
#[derive(Clone, Debug)]
pub struct ForceMap {
    pub axis1: Vec<f64>,
    pub axis2: Vec<f64>,
    /// Row-major over (`axis1`, `axis2`).
    pub forces: Vec<ForceVec>,
}

pub fn force_map(optics: &Optics<'_>, grid: &crate::superpose::GridSpec) -> Result<ForceMap> {
    use rayon::prelude::*;
    grid.validate()?;
    let (axis1, axis2) = grid.axes();
    let rows: Result<Vec<Vec<ForceVec>>> = axis1
        .par_iter()
        .map(|&a| {
            axis2
                .iter()
                .map(|&b| {
                    let pt = grid.point(a, b);
                    Ok(optics.scattering_force(pt, &Velocity::ZERO, grid.time)? + optics.dipole_force(pt, &Velocity::ZERO, grid.time)?)
                })
                .collect()
        })
        .collect();
    Ok(ForceMap { axis1, axis2, forces: rows?.into_iter().flatten().collect() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::{SODIUM_D2_LINEWIDTH, SODIUM_D2_WAVELENGTH, SODIUM_MASS};
    use crate::superpose::PairSpec;
    use std::f64::consts::{PI, TAU};

    const GAMMA: f64 = SODIUM_D2_LINEWIDTH;

    fn sodium(delta0: f64, omega0: f64) -> AtomSpec {
        AtomSpec { gamma: GAMMA, delta0, omega0_rabi: omega0, mass: SODIUM_MASS }
    }

    fn fig2_pair(d: f64) -> Pair {
        Pair::new(PairSpec::counter_propagating(SODIUM_D2_WAVELENGTH, 8e-6, 1, 1, d)).unwrap()
    }

    #[test]
    fn rabi_scaling() {
        let a = sodium(0.0, 3.0e7);
        assert_eq!(rabi_at(&a, 2.0, 2.0), 3.0e7);
        assert_eq!(rabi_at(&a, 0.0, 2.0), 0.0);
        // bright fringe, U1 = U2 = u: total 2u
        let p = Pair::new(PairSpec::counter_propagating(SODIUM_D2_WAVELENGTH, 8e-6, 2, 2, 0.0)).unwrap();
        let pt = CylPoint::new(8e-6, 0.0, 0.0);
        let u = p.beam1().amplitude(pt);
        let total = p.total_amplitude(pt, 0.0);
        assert!((rabi_at(&a, total, 1.0) - 2.0 * 3.0e7 * u).abs() < 1e-6);
    }

    #[test]
    fn detuning_shifts() {
        let a = sodium(0.5 * GAMMA, GAMMA);
        let k = TAU / SODIUM_D2_WAVELENGTH;
        assert_eq!(detuning_eff(&a, &Velocity::ZERO, &CylVector::new(0.0, 3.0, k)), 0.5 * GAMMA);
        let d = detuning_eff(&a, &Velocity::new(0.0, 0.0, 0.7), &CylVector::new(0.0, 0.0, k));
        assert!((d - (0.5 * GAMMA - 0.7 * k)).abs() < 1e-6);
        let (l, rho, vphi) = (3.0, 5e-6, 0.2);
        let d = detuning_eff(&a, &Velocity::new(0.0, vphi, 0.0), &CylVector::new(0.0, l / rho, k));
        assert!((d - (0.5 * GAMMA - vphi * l / rho)).abs() < 1e-6);
    }

    #[test]
    fn scattering_saturation_rearrangement() {
        let a = sodium(0.3 * GAMMA, 0.0);
        let k = TAU / SODIUM_D2_WAVELENGTH;
        for omega in [0.1 * GAMMA, GAMMA, 4.0 * GAMMA] {
            let grad = CylVector::new(0.0, 0.0, k);
            let f = scattering_from(&a, omega * omega, &grad, a.delta0);
            let s = 0.5 * omega * omega / a.detuning_width_sq();
            let expected = 0.5 * HBAR * k * GAMMA * s / (1.0 + s);
            assert!((f.z - expected).abs() <= 1e-12 * expected);
            assert!(f.norm() <= 0.5 * HBAR * k * GAMMA);
        }
        assert_eq!(scattering_from(&a, 0.0, &CylVector::new(0.0, 0.0, k), 0.0), ForceVec::ZERO);
    }

    #[test]
    fn dipole_limits() {
        let a = sodium(-2.0 * GAMMA, GAMMA);
        assert_eq!(dipole_from(&a, GAMMA, &CylVector::new(1.0, 0.0, 1.0), 0.0), ForceVec::ZERO);
        assert_eq!(dipole_from(&a, GAMMA, &CylVector::ZERO, -GAMMA), ForceVec::ZERO);
        assert_eq!(dipole_potential_from(&a, 0.0, a.delta0), 0.0);
        assert!(dipole_potential_from(&a, GAMMA * GAMMA, -GAMMA) < 0.0);
        assert!(dipole_potential_from(&a, GAMMA * GAMMA, GAMMA) > 0.0);
        // red detuning pulls towards increasing Ω
        let f = dipole_from(&a, GAMMA, &CylVector::new(1.0, 0.0, 0.0), -GAMMA);
        assert!(f.rho > 0.0);
    }

    #[test]
    fn pair_amplitude_gradient_near_dark_fringe() {
        // unequal beams leave a shallow but sharp minimum of |U| along z
        let mut spec = PairSpec::counter_propagating(SODIUM_D2_WAVELENGTH, 8e-6, 2, 2, 0.0);
        spec.beam2.amp_scale = 0.98;
        let p = Pair::new(spec).unwrap();
        let c = FieldComponent::Total(&p);
        let dark = SODIUM_D2_WAVELENGTH / 4.0;
        let rho = p.beam1().doughnut_radius(0.0);
        let sq = |z: f64| p.total_amplitude(CylPoint::new(rho, 0.3, z), 0.0).powi(2);
        for z in [dark * 0.999, dark * 1.003, dark * 1.05] {
            let g = c.amplitude_gradient(CylPoint::new(rho, 0.3, z), 0.0, &c.default_stencil());
            let u = p.total_amplitude(CylPoint::new(rho, 0.3, z), 0.0);
            let h = SODIUM_D2_WAVELENGTH / 1e4;
            let d = |h: f64| (sq(z + h) - sq(z - h)) / (2.0 * h);
            let expect = (4.0 * d(0.5 * h) - d(h)) / 3.0;
            assert!((2.0 * u * g.z - expect).abs() <= 1e-7 * expect.abs().max(sq(z) / SODIUM_D2_WAVELENGTH), "z = {z:e}");
        }
    }

    #[test]
    fn dipole_potential_small_saturation_series() {
        let a = sodium(-3.0 * GAMMA, 0.0);
        let width = a.detuning_width_sq();
        let omega_sq = 0.02 * width; // Ω²/2 = 0.01 (Δ² + Γ²/4)
        let v = dipole_potential_from(&a, omega_sq, a.delta0);
        let series = HBAR * a.delta0 * omega_sq / (4.0 * width);
        assert!(((v - series) / series).abs() < 0.01);
    }

    #[test]
    fn reduced_single_beam_gradient() {
        let m = LgMode::new(crate::BeamSpec::new(SODIUM_D2_WAVELENGTH, 8e-6, 3)).unwrap();
        let c = FieldComponent::beam(&m);
        let g = c.phase_gradient(CylPoint::new(4e-6, 0.2, 1e-5), 0.0, PhaseModel::Reduced, &c.default_stencil()).unwrap();
        assert_eq!(g, CylVector::new(0.0, 3.0 / 4e-6, m.wavenumber()));
    }

    #[test]
    fn full_gradient_on_axis_at_focus() {
        // d/dz [kz - (|l|+1) atan(z/z_R)] at z = 0
        for l in [0, 2, 7] {
            let m = LgMode::new(crate::BeamSpec::new(SODIUM_D2_WAVELENGTH, 8e-6, l)).unwrap();
            let c = FieldComponent::beam(&m);
            let g = c.phase_gradient(CylPoint::new(0.0, 0.0, 0.0), 0.0, PhaseModel::Full, &c.default_stencil()).unwrap();
            let expected = m.wavenumber() - f64::from(l.abs() + 1) / m.rayleigh_range();
            assert!((g.z - expected).abs() <= 1e-9 * expected, "l={l}: {} vs {expected}", g.z);
            assert_eq!(g.phi, 0.0);
            assert!(g.rho.abs() < 1e-3);
        }
    }

    #[test]
    fn total_phase_axial_gradient_vanishes_at_symmetric_plane() {
        let p = Pair::new(PairSpec::counter_propagating(SODIUM_D2_WAVELENGTH, 8e-6, 2, 2, 1e-4)).unwrap();
        let c = FieldComponent::Total(&p);
        // the amplitude-gradient cross term carries sin((l1 + l2) φ), so sample at φ = 0
        let g = c.phase_gradient(CylPoint::new(8e-6, 0.0, 0.0), 0.0, PhaseModel::Full, &c.default_stencil()).unwrap();
        assert!(g.z.abs() < 1e-6 * p.wavenumber(), "{}", g.z);
    }

    #[test]
    fn dark_point_is_reported_and_kills_scattering() {
        let p = Pair::new(PairSpec::counter_propagating(SODIUM_D2_WAVELENGTH, 8e-6, 3, 3, 0.0)).unwrap();
        let dark = CylPoint::new(8e-6, PI / 6.0, 0.0);
        let c = FieldComponent::Total(&p);
        assert!(matches!(c.phase_gradient(dark, 0.0, PhaseModel::Full, &c.default_stencil()), Err(Error::DarkPoint { .. })));
        let optics = Optics::new(sodium(0.5 * GAMMA, GAMMA), Light::Pair(&p), ForceModel::FULL_TOTAL).unwrap();
        let f = optics.scattering_force(dark, &Velocity::ZERO, 0.0).unwrap();
        assert!(f.norm() < 1e-40);
    }

    #[test]
    fn midplane_sum_of_beams_symmetry() {
        let d = 2e-4;
        let p = fig2_pair(d);
        let atom = sodium(0.5 * GAMMA, GAMMA);
        let rho0 = central_ring_radius(&p).unwrap();
        let optics = Optics::new(atom, Light::Pair(&p), ForceModel::REDUCED_SUM).unwrap();
        let f = optics.scattering_force(CylPoint::new(rho0, 0.4, 0.0), &Velocity::ZERO, 0.0).unwrap();
        assert_eq!(f.z, 0.0);
        let single = 0.25 * HBAR * GAMMA * (1.0 / rho0) * q_plus(&atom, &p, CylPoint::new(rho0, 0.0, 0.0));
        assert!((f.phi - 2.0 * single).abs() <= 1e-12 * f.phi);
        // torque cross-check
        let t = torque_axial(&atom, &p).unwrap();
        assert!((t - rho0 * f.phi).abs() <= 1e-12 * t);
        assert!((reduced_axial_force(&atom, &p, rho0, 3e-6) - optics.scattering_force(CylPoint::new(rho0, 0.0, 3e-6), &Velocity::ZERO, 0.0).unwrap().z).abs() < 1e-30);
    }

    #[test]
    fn q_plus_limits() {
        let p = fig2_pair(1e-4);
        let zero = sodium(0.5 * GAMMA, 0.0);
        let pt = CylPoint::new(6e-6, 0.0, 1e-6);
        assert_eq!(q_plus(&zero, &p, pt), 0.0);
        // choose Ω₀ so that Ω² = 2(Δ₀² + Γ²/4) at pt
        let atom = sodium(0.5 * GAMMA, 1.0);
        let u = p.beam1().amplitude(pt);
        let target = (2.0 * atom.detuning_width_sq()).sqrt();
        let tuned = AtomSpec { omega0_rabi: target / u, ..atom };
        assert!((q_plus(&tuned, &p, pt) - 1.0).abs() < 1e-12);
        let mid = CylPoint::new(6e-6, 0.0, 0.0);
        assert_eq!(q_plus(&tuned, &p, mid), q_minus(&tuned, &p, mid));
    }

    #[test]
    fn spring_constant_identities() {
        let atom = sodium(0.5 * GAMMA, GAMMA);
        assert_eq!(spring_constant_k0(&atom, &fig2_pair(0.0)).unwrap(), 0.0);
        assert_eq!(spring_constant(&atom, &fig2_pair(0.0), 5e-6).unwrap(), 0.0);
        for d in [5e-5, 3e-4, 1.2e-3] {
            let p = fig2_pair(d);
            let rho0 = central_ring_radius(&p).unwrap();
            let k = spring_constant(&atom, &p, rho0).unwrap();
            let k0 = spring_constant_k0(&atom, &p).unwrap();
            assert!((k - k0).abs() <= 1e-12 * k0);
        }
    }

    #[test]
    fn harmonic_potential_shape() {
        let atom = sodium(0.5 * GAMMA, GAMMA);
        let p = fig2_pair(3e-4);
        assert_eq!(harmonic_potential_v0(&atom, &p, 0.0).unwrap(), 0.0);
        let z = 2e-6;
        assert_eq!(harmonic_potential_v0(&atom, &p, z).unwrap(), harmonic_potential_v0(&atom, &p, -z).unwrap());
        let k0 = spring_constant_k0(&atom, &p).unwrap();
        let h = 1e-8;
        let slope = (harmonic_potential_v0(&atom, &p, z + h).unwrap() - harmonic_potential_v0(&atom, &p, z - h).unwrap()) / (2.0 * h);
        assert!((-slope - (-k0 * z)).abs() <= 1e-8 * k0 * z);
    }

    #[test]
    fn central_ring_radius_values() {
        let p = Pair::new(PairSpec::counter_propagating(SODIUM_D2_WAVELENGTH, 8e-6, 2, 2, 0.0)).unwrap();
        assert!((central_ring_radius(&p).unwrap() - 8e-6).abs() < 1e-18);
        let zr = p.beam1().rayleigh_range();
        let p2 = Pair::new(PairSpec::counter_propagating(SODIUM_D2_WAVELENGTH, 8e-6, 2, 2, 2.0 * zr)).unwrap();
        assert!((central_ring_radius(&p2).unwrap() - 8e-6 * 2f64.sqrt()).abs() < 1e-17);
    }

    #[test]
    fn torque_vanishes_without_winding_or_light() {
        let p = Pair::new(PairSpec::counter_propagating(SODIUM_D2_WAVELENGTH, 8e-6, 0, 0, 1e-4)).unwrap();
        assert_eq!(torque_axial(&sodium(0.0, GAMMA), &p).unwrap(), 0.0);
        assert_eq!(torque_axial(&sodium(0.0, 0.0), &fig2_pair(1e-4)).unwrap(), 0.0);
    }

    #[test]
    fn ferris_and_lift_rates() {
        let spec = PairSpec::counter_propagating(SODIUM_D2_WAVELENGTH, 8e-6, 80, 80, 1e-4).with_frequency_offset(TAU * 1000.0);
        let p = Pair::new(spec.clone()).unwrap();
        assert!((ferris_rate(&p).unwrap() - TAU * 6.25).abs() < 1e-12);
        assert!((lift_speed(&p) - 2.95e-4).abs() < 5e-7);
        let mut s = spec.clone();
        s.beam1.winding = 160;
        s.beam2.winding = 160;
        assert!((ferris_rate(&Pair::new(s).unwrap()).unwrap() - TAU * 3.125).abs() < 1e-12);
        let still = Pair::new(spec.clone().with_frequency_offset(0.0)).unwrap();
        assert_eq!(ferris_rate(&still).unwrap(), 0.0);
        assert_eq!(lift_speed(&still), 0.0);
        let mut s = spec;
        s.beam2.azimuthal_sign = crate::Sign::Plus;
        assert!(ferris_rate(&Pair::new(s).unwrap()).is_err());
    }

    #[test]
    fn closed_forms_reject_unequal_beams() {
        let mut spec = PairSpec::counter_propagating(SODIUM_D2_WAVELENGTH, 8e-6, 1, 2, 1e-4);
        assert!(central_ring_radius(&Pair::new(spec.clone()).unwrap()).is_err());
        spec.beam2.winding = 1;
        spec.beam1.radial = 1;
        assert!(spring_constant_k0(&sodium(0.0, GAMMA), &Pair::new(spec).unwrap()).is_err());
    }

    #[test]
    fn reduced_total_field_is_rejected() {
        let p = fig2_pair(1e-4);
        let model = ForceModel { phase: PhaseModel::Reduced, coupling: PairCoupling::TotalField };
        assert!(Optics::new(sodium(0.0, GAMMA), Light::Pair(&p), model).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn q_plus_monotone_and_bounded(w1 in 0.0f64..1e3, w2 in 0.0f64..1e3, delta in -5.0f64..5.0) {
                let atom = sodium(delta * GAMMA, GAMMA);
                let a = atom.detuning_width_sq();
                let q = |x: f64| x * GAMMA * GAMMA / (a + 0.5 * x * GAMMA * GAMMA);
                let (lo, hi) = if w1 < w2 { (w1, w2) } else { (w2, w1) };
                prop_assert!(q(lo) <= q(hi));
                prop_assert!(q(hi) <= 2.0);
            }

            #[test]
            fn scattering_bounded_by_saturation(omega in 0.0f64..50.0, delta in -10.0f64..10.0, gz in -2e7f64..2e7, gp in -1e6f64..1e6) {
                let atom = sodium(delta * GAMMA, GAMMA);
                let grad = CylVector::new(0.0, gp, gz);
                let o = omega * GAMMA;
                let f = scattering_from(&atom, o * o, &grad, atom.delta0);
                prop_assert!(f.norm() <= 0.5 * HBAR * GAMMA * grad.norm());
            }
        }
    }
}
