//! Single Laguerre-Gaussian mode.
//!
//! A mode of winding number `l` and radial index `p` has the lab-frame field
//! `E = U e^{iΘ}` with
//!
//! ```text
//! U = A · C_lp · (1 + ζ²/z_R²)^(-1/2) · (√2 ρ / w)^|l| · L_p^|l|(2ρ²/w²) · exp(-ρ²/w²)
//! Θ = s_dir · k (z - z_f) + s_az · l φ - (2p + |l| + 1) atan(ζ/z_R) + k ρ² ζ / (2(ζ² + z_R²)) + ω t
//! ```
//!
//! where `ζ = s_dir · (z - z_f)` is the axial coordinate in the beam's own
//! propagation frame. A backward beam therefore accrues its Gouy and curvature
//! phases exactly as a forward beam would, mirrored about its focal plane.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::constants::SPEED_OF_LIGHT;
use crate::error::{Error, Result};

/// A sign of ±1, used for the propagation direction and azimuthal handedness.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    #[inline]
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn from_i32(v: i32) -> Option<Sign> {
        match v {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }
}

/// Parameters of one LG beam.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BeamSpec {
    /// Vacuum wavelength (m).
    pub wavelength: f64,
    /// Focal-plane waist `w0` (m).
    pub waist: f64,
    /// Winding number `l`.
    pub winding: i32,
    /// Radial index `p`.
    pub radial: u32,
    /// Direction of axial propagation.
    pub direction: Sign,
    /// Axial position of the focal plane (m).
    pub focal_z: f64,
    /// Plane-wave amplitude scale `U_k00` (field units).
    pub amp_scale: f64,
    /// Sign applied to the `l φ` term in the lab frame.
    pub azimuthal_sign: Sign,
    /// Overrides the normalisation constant `C_lp`; `None` selects
    /// `sqrt(p! / (p + |l|)!)`.
    #[serde(default)]
    pub normalization: Option<f64>,
}

impl BeamSpec {
    /// Forward-propagating beam focused at `z = 0` with unit amplitude scale.
    pub fn new(wavelength: f64, waist: f64, winding: i32) -> Self {
        BeamSpec {
            wavelength,
            waist,
            winding,
            radial: 0,
            direction: Sign::Plus,
            focal_z: 0.0,
            amp_scale: 1.0,
            azimuthal_sign: Sign::Plus,
            normalization: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.wavelength.is_finite() && self.wavelength > 0.0) {
            return Err(Error::invalid("wavelength", format!("must be positive, got {}", self.wavelength)));
        }
        if !(self.waist.is_finite() && self.waist > 0.0) {
            return Err(Error::invalid("waist", format!("must be positive, got {}", self.waist)));
        }
        if !self.focal_z.is_finite() {
            return Err(Error::invalid("focal_z", "must be finite"));
        }
        if !(self.amp_scale.is_finite() && self.amp_scale >= 0.0) {
            return Err(Error::invalid("amp_scale", format!("must be non-negative, got {}", self.amp_scale)));
        }
        if let Some(c) = self.normalization {
            if !(c.is_finite() && c > 0.0) {
                return Err(Error::invalid("normalization", format!("must be positive, got {c}")));
            }
        }
        Ok(())
    }

    pub fn wavenumber(&self) -> f64 {
        TAU / self.wavelength
    }

    pub fn angular_frequency(&self) -> f64 {
        SPEED_OF_LIGHT * self.wavenumber()
    }

    /// `z_R = π w0² / λ`.
    pub fn rayleigh_range(&self) -> f64 {
        PI * self.waist * self.waist / self.wavelength
    }

    /// Beam radius `w(ζ) = w0 sqrt(1 + ζ²/z_R²)` at a distance `z_local` from focus.
    pub fn waist_at(&self, z_local: f64) -> f64 {
        let zr = self.rayleigh_range();
        self.waist * (1.0 + (z_local / zr).powi(2)).sqrt()
    }

    /// Axial coordinate in the beam's propagation frame.
    #[inline]
    pub fn local_z(&self, z: f64) -> f64 {
        self.direction.value() * (z - self.focal_z)
    }
}

/// Point in cylindrical coordinates `(ρ, φ, z)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CylPoint {
    pub rho: f64,
    pub phi: f64,
    pub z: f64,
}

impl CylPoint {
    pub fn new(rho: f64, phi: f64, z: f64) -> Self {
        CylPoint { rho, phi, z }
    }

    /// From Cartesian coordinates; `φ` is reported in `[0, 2π)`.
    pub fn from_cartesian(x: f64, y: f64, z: f64) -> Self {
        let phi = y.atan2(x);
        CylPoint { rho: x.hypot(y), phi: if phi < 0.0 { phi + TAU } else { phi }, z }
    }

    pub fn to_cartesian(self) -> [f64; 3] {
        let (s, c) = self.phi.sin_cos();
        [self.rho * c, self.rho * s, self.z]
    }
}

/// Complex field at a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FieldSample {
    /// `U ≥ 0`.
    pub amplitude: f64,
    /// Principal value in `(-π, π]`.
    pub phase: f64,
    pub complex_value: Complex64,
}

impl FieldSample {
    /// Builds a sample from a possibly negative amplitude and an unreduced
    /// phase; a negative amplitude is folded into the phase as `+π`.
    pub fn from_signed(amplitude: f64, phase: f64) -> Self {
        let (amplitude, phase) = if amplitude < 0.0 { (-amplitude, phase + PI) } else { (amplitude, phase) };
        let phase = principal(phase);
        FieldSample { amplitude, phase, complex_value: Complex64::from_polar(amplitude, phase) }
    }

    pub fn intensity(&self) -> f64 {
        self.amplitude * self.amplitude
    }
}

/// Reduces an angle to `(-π, π]`.
pub fn principal(angle: f64) -> f64 {
    let r = angle.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

/// Associated Laguerre polynomial `L_p^α(x)` by upward recurrence in `p`.
pub fn laguerre_poly(p: u32, alpha: u32, x: f64) -> f64 {
    let a = f64::from(alpha);
    let mut prev = 1.0;
    if p == 0 {
        return prev;
    }
    let mut cur = 1.0 + a - x;
    for n in 1..p {
        let n = f64::from(n);
        let next = ((2.0 * n + 1.0 + a - x) * cur - (n + a) * prev) / (n + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// `ln sqrt(p! / (p + |l|)!)`, summed directly so large `|l|` cannot overflow.
fn ln_conventional_norm(p: u32, abs_l: u32) -> f64 {
    -0.5 * (p + 1..=p + abs_l).map(|i| f64::from(i).ln()).sum::<f64>()
}

/// A validated beam with its derived constants cached for repeated evaluation.
#[derive(Clone, Debug)]
pub struct LgMode {
    spec: BeamSpec,
    k: f64,
    omega: f64,
    z_r: f64,
    abs_l: u32,
    ln_norm: f64,
}

impl LgMode {
    pub fn new(spec: BeamSpec) -> Result<Self> {
        spec.validate()?;
        let abs_l = spec.winding.unsigned_abs();
        let ln_norm = match spec.normalization {
            Some(c) => c.ln(),
            None => ln_conventional_norm(spec.radial, abs_l),
        };
        Ok(LgMode {
            k: spec.wavenumber(),
            omega: spec.angular_frequency(),
            z_r: spec.rayleigh_range(),
            abs_l,
            ln_norm,
            spec,
        })
    }

    pub fn spec(&self) -> &BeamSpec {
        &self.spec
    }

    pub fn wavenumber(&self) -> f64 {
        self.k
    }

    pub fn rayleigh_range(&self) -> f64 {
        self.z_r
    }

    pub fn abs_winding(&self) -> u32 {
        self.abs_l
    }

    /// Normalisation constant `C_lp` in use.
    pub fn normalization(&self) -> f64 {
        self.ln_norm.exp()
    }

    pub fn waist_at(&self, z_local: f64) -> f64 {
        self.spec.waist * (1.0 + (z_local / self.z_r).powi(2)).sqrt()
    }

    /// Signed amplitude `U_klp`; non-negative whenever `p = 0`.
    pub fn amplitude(&self, pt: CylPoint) -> f64 {
        let zeta = self.spec.local_z(pt.z);
        let spread = 1.0 + (zeta / self.z_r).powi(2);
        let w2 = self.spec.waist * self.spec.waist * spread;
        let x = 2.0 * pt.rho * pt.rho / w2;
        if self.abs_l > 0 && x == 0.0 {
            return 0.0;
        }
        let mut ln_mag = self.ln_norm - 0.5 * spread.ln() - 0.5 * x;
        if self.abs_l > 0 {
            ln_mag += 0.5 * f64::from(self.abs_l) * x.ln();
        }
        self.spec.amp_scale * ln_mag.exp() * laguerre_poly(self.spec.radial, self.abs_l, x)
    }

    /// `-(2p + |l| + 1) atan(ζ/z_R)`.
    pub fn gouy_phase(&self, z_local: f64) -> f64 {
        -f64::from(2 * self.spec.radial + self.abs_l + 1) * (z_local / self.z_r).atan()
    }

    /// `k ρ² ζ / (2(ζ² + z_R²))`.
    pub fn curvature_phase(&self, rho: f64, z_local: f64) -> f64 {
        self.k * rho * rho * z_local / (2.0 * (z_local * z_local + self.z_r * self.z_r))
    }

    /// `s_dir · k (z - z_f)`.
    pub fn plane_phase(&self, z: f64) -> f64 {
        self.spec.direction.value() * self.k * (z - self.spec.focal_z)
    }

    /// `s_az · l φ`.
    pub fn azimuthal_phase(&self, phi: f64) -> f64 {
        self.spec.azimuthal_sign.value() * f64::from(self.spec.winding) * phi
    }

    /// Unreduced phase `Θ_klp` including `ω t`.
    pub fn phase(&self, pt: CylPoint, t: f64) -> f64 {
        let zeta = self.spec.local_z(pt.z);
        self.plane_phase(pt.z)
            + self.azimuthal_phase(pt.phi)
            + self.gouy_phase(zeta)
            + self.curvature_phase(pt.rho, zeta)
            + self.omega * t
    }

    pub fn field(&self, pt: CylPoint, t: f64) -> FieldSample {
        FieldSample::from_signed(self.amplitude(pt), self.phase(pt, t))
    }

    /// `U e^{iΘ}` without reducing the phase first.
    pub fn complex(&self, pt: CylPoint, t: f64) -> Complex64 {
        Complex64::from_polar(1.0, self.phase(pt, t)) * self.amplitude(pt)
    }

    /// Radius of the intensity maximum of a `p = 0` doughnut at `ζ`:
    /// `w(ζ) sqrt(|l|/2)`.
    pub fn doughnut_radius(&self, z_local: f64) -> f64 {
        self.waist_at(z_local) * (f64::from(self.abs_l) / 2.0).sqrt()
    }
}
