//! Superposition of two co-polarised LG beams.
//!
//! Beam 1 propagates towards `+z` with its focus at `z = -d/2`; beam 2
//! propagates towards `-z` with its focus at `z = +d/2`. The frequency offset
//! `Δω = ω₁ - ω₂` and wavenumber offset `Δk` are carried by beam 2, whose
//! field is multiplied by `e^{i(Δk z + Δω t)}`. With that bookkeeping
//!
//! ```text
//! U² = U₁² + U₂² + 2 U₁ U₂ cos(Θ₁ - Θ₂ - Δk z - Δω t)
//! ```
//!
//! and the total phase is the argument of `E₁ + E₂`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lg_mode::{principal, BeamSpec, CylPoint, LgMode, Sign};

/// Total amplitudes at or below this fraction of `|U₁| + |U₂|` have no phase.
pub const DARK_FRACTION: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairSpec {
    pub beam1: BeamSpec,
    pub beam2: BeamSpec,
    /// Focal-plane separation `d ≥ 0` (m).
    pub separation: f64,
    /// `Δω = ω₁ - ω₂` (rad/s).
    #[serde(default)]
    pub delta_omega: f64,
    /// `Δk = k₁ - k₂` (rad/m).
    #[serde(default)]
    pub delta_k: f64,
}

impl PairSpec {
    /// Two doughnut beams of equal wavelength and waist, focused at `∓d/2`,
    /// with beam 2 carrying the opposite lab-frame azimuthal sign.
    pub fn counter_propagating(wavelength: f64, waist: f64, l1: i32, l2: i32, separation: f64) -> Self {
        let mut beam1 = BeamSpec::new(wavelength, waist, l1);
        beam1.focal_z = -separation / 2.0;
        let mut beam2 = BeamSpec::new(wavelength, waist, l2);
        beam2.direction = Sign::Minus;
        beam2.azimuthal_sign = Sign::Minus;
        beam2.focal_z = separation / 2.0;
        PairSpec { beam1, beam2, separation, delta_omega: 0.0, delta_k: 0.0 }
    }

    /// Moves both focal planes to `∓d/2` for a new separation.
    pub fn with_separation(mut self, separation: f64) -> Self {
        self.separation = separation;
        self.beam1.focal_z = -separation / 2.0;
        self.beam2.focal_z = separation / 2.0;
        self
    }

    pub fn with_frequency_offset(mut self, delta_omega: f64) -> Self {
        self.delta_omega = delta_omega;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.beam1.validate()?;
        self.beam2.validate()?;
        let d = self.separation;
        if !(d.is_finite() && d >= 0.0) {
            return Err(Error::invalid("separation", format!("must be non-negative, got {d}")));
        }
        if self.beam1.direction != Sign::Plus || self.beam2.direction != Sign::Minus {
            return Err(Error::invalid("direction", "beam 1 must propagate along +z and beam 2 along -z"));
        }
        let tol = 1e-12 * d.max(self.beam1.waist);
        if (self.beam1.focal_z + d / 2.0).abs() > tol || (self.beam2.focal_z - d / 2.0).abs() > tol {
            return Err(Error::invalid("focal_z", "beam foci must sit at -d/2 (beam 1) and +d/2 (beam 2)"));
        }
        let rel = (self.beam1.wavelength - self.beam2.wavelength).abs() / self.beam1.wavelength;
        if rel > 1e-12 {
            return Err(Error::invalid("wavelength", "both beams must share one carrier wavelength; use delta_omega/delta_k for offsets"));
        }
        if !self.delta_omega.is_finite() || !self.delta_k.is_finite() {
            return Err(Error::invalid("delta_omega", "frequency and wavenumber offsets must be finite"));
        }
        Ok(())
    }
}

/// Parts of `Θ₁ - Θ₂` at equal frequencies.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseDifference {
    pub total: f64,
    /// Plane-wave part, `2kz` for the standard geometry.
    pub plane: f64,
    /// `(s₁l₁ - s₂l₂) φ`, i.e. `(l₁ + l₂) φ` for the default handedness.
    pub azimuthal: f64,
    pub gouy: f64,
    pub curvature: f64,
}

/// Which closed form to use for the Gouy phase difference of equal beams.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GouyClosedForm {
    /// Denominator `z_R² - (z² + d²/4)`, as commonly printed.
    AsPrinted,
    /// Denominator `z_R² - z² + d²/4` from the arctangent addition rule.
    Identity,
}

/// A validated pair of beams.
#[derive(Clone, Debug)]
pub struct Pair {
    spec: PairSpec,
    beam1: LgMode,
    beam2: LgMode,
}

impl Pair {
    pub fn new(spec: PairSpec) -> Result<Self> {
        spec.validate()?;
        Ok(Pair { beam1: LgMode::new(spec.beam1.clone())?, beam2: LgMode::new(spec.beam2.clone())?, spec })
    }

    pub fn spec(&self) -> &PairSpec {
        &self.spec
    }

    pub fn beam1(&self) -> &LgMode {
        &self.beam1
    }

    pub fn beam2(&self) -> &LgMode {
        &self.beam2
    }

    pub fn separation(&self) -> f64 {
        self.spec.separation
    }

    pub fn wavenumber(&self) -> f64 {
        self.beam1.wavenumber()
    }

    /// Net azimuthal order `m = s₁l₁ - s₂l₂` of the interference term.
    pub fn azimuthal_order(&self) -> i32 {
        let s1 = self.spec.beam1.azimuthal_sign.value() as i32;
        let s2 = self.spec.beam2.azimuthal_sign.value() as i32;
        s1 * self.spec.beam1.winding - s2 * self.spec.beam2.winding
    }

    /// Extra phase carried by beam 2 for the frequency/wavenumber offset.
    #[inline]
    pub fn offset_phase(&self, z: f64, t: f64) -> f64 {
        self.spec.delta_k * z + self.spec.delta_omega * t
    }

    pub fn field1(&self, pt: CylPoint, t: f64) -> Complex64 {
        self.beam1.complex(pt, t)
    }

    pub fn field2(&self, pt: CylPoint, t: f64) -> Complex64 {
        let u = self.beam2.amplitude(pt);
        Complex64::from_polar(1.0, self.beam2.phase(pt, t) + self.offset_phase(pt.z, t)) * u
    }

    pub fn phase_difference(&self, pt: CylPoint) -> PhaseDifference {
        let (b1, b2) = (&self.beam1, &self.beam2);
        let (z1, z2) = (b1.spec().local_z(pt.z), b2.spec().local_z(pt.z));
        let plane = b1.plane_phase(pt.z) - b2.plane_phase(pt.z);
        let azimuthal = b1.azimuthal_phase(pt.phi) - b2.azimuthal_phase(pt.phi);
        let gouy = b1.gouy_phase(z1) - b2.gouy_phase(z2);
        let curvature = b1.curvature_phase(pt.rho, z1) - b2.curvature_phase(pt.rho, z2);
        PhaseDifference { total: b1.phase(pt, 0.0) - b2.phase(pt, 0.0), plane, azimuthal, gouy, curvature }
    }

    /// Argument of the interference cosine, `Θ₁ - Θ₂ - Δk z - Δω t`, reduced
    /// to a few multiples of π. The common `ω t` cancels analytically, and the
    /// axial and azimuthal parts are reduced separately so that shifting `φ`
    /// by a period leaves the axial part bit-identical.
    pub fn mixing_angle(&self, pt: CylPoint, t: f64) -> f64 {
        let (b1, b2) = (&self.beam1, &self.beam2);
        let (z1, z2) = (b1.spec().local_z(pt.z), b2.spec().local_z(pt.z));
        let axial = b1.plane_phase(pt.z) - b2.plane_phase(pt.z) - self.spec.delta_k * pt.z + b1.gouy_phase(z1) - b2.gouy_phase(z2)
            + b1.curvature_phase(pt.rho, z1)
            - b2.curvature_phase(pt.rho, z2);
        let azimuthal = b1.azimuthal_phase(pt.phi) - b2.azimuthal_phase(pt.phi);
        principal(axial) + principal(azimuthal) - principal(self.spec.delta_omega * t)
    }

    fn envelope(u1: f64, u2: f64, cos_mix: f64) -> f64 {
        let u = (u1 * u1 + u2 * u2 + 2.0 * u1 * u2 * cos_mix).max(0.0).sqrt();
        let (a1, a2) = (u1.abs(), u2.abs());
        u.clamp((a1 - a2).abs(), a1 + a2)
    }

    pub fn total_amplitude(&self, pt: CylPoint, t: f64) -> f64 {
        let u1 = self.beam1.amplitude(pt);
        let u2 = self.beam2.amplitude(pt);
        Self::envelope(u1, u2, self.mixing_angle(pt, t).cos())
    }

    /// Total phase in `(-π, π]`, or `None` at a dark point.
    pub fn total_phase(&self, pt: CylPoint, t: f64) -> Option<f64> {
        self.total_field(pt, t).1
    }

    /// `(U, Θ)` of the total field; `Θ` is `None` where the field vanishes.
    ///
    /// `E₁ + E₂ = e^{iΘ₁} (U₁ + U₂ e^{-iχ})` with `χ` the mixing angle, so
    /// `Θ = Θ₁ + arg(U₁ + U₂ e^{-iχ})`.
    pub fn total_field(&self, pt: CylPoint, t: f64) -> (f64, Option<f64>) {
        let u1 = self.beam1.amplitude(pt);
        let u2 = self.beam2.amplitude(pt);
        let (s, c) = self.mixing_angle(pt, t).sin_cos();
        let u = Self::envelope(u1, u2, c);
        let scale = u1.abs() + u2.abs();
        if scale == 0.0 || u <= DARK_FRACTION * scale {
            return (u, None);
        }
        let rel = (-u2 * s).atan2(u1 + u2 * c);
        let th1 = principal(self.beam1.phase(pt, 0.0));
        let wt = principal(self.beam1.spec().angular_frequency() * t);
        (u, Some(principal(th1 + rel + wt)))
    }

    /// `(E₁ + E₂) e^{-iωt}`: the total field without its common carrier
    /// oscillation, for phase comparisons between nearby points at one time.
    pub fn field_sum_envelope(&self, pt: CylPoint, t: f64) -> Complex64 {
        let u1 = self.beam1.amplitude(pt);
        let u2 = self.beam2.amplitude(pt);
        let chi = self.mixing_angle(pt, t);
        Complex64::from_polar(1.0, principal(self.beam1.phase(pt, 0.0))) * (u1 + Complex64::from_polar(u2, -chi))
    }

    pub fn intensity(&self, pt: CylPoint, t: f64) -> f64 {
        self.total_amplitude(pt, t).powi(2)
    }

    /// Gouy difference from a single arctangent, for equal windings only.
    /// Diagnostic: [`phase_difference`](Self::phase_difference) always uses
    /// the exact two-arctangent sum.
    pub fn gouy_difference_closed_form(&self, z: f64, form: GouyClosedForm) -> Result<f64> {
        if self.spec.beam1.winding.abs() != self.spec.beam2.winding.abs() || self.spec.beam1.radial != self.spec.beam2.radial {
            return Err(Error::Domain("closed-form Gouy difference needs equal |l| and p".into()));
        }
        let zr = self.beam1.rayleigh_range();
        let a = self.spec.separation / 2.0;
        let den = match form {
            GouyClosedForm::AsPrinted => zr * zr - (z * z + a * a),
            GouyClosedForm::Identity => zr * zr - z * z + a * a,
        };
        let order = f64::from(2 * self.spec.beam1.radial + self.beam1.abs_winding() + 1);
        Ok(-order * (2.0 * z * zr).atan2(den))
    }

    /// `k ρ² d / (2(z² + z_R²))`: the first-order curvature difference of two
    /// beams whose curvature phases are both referred to the `+z` axis.
    pub fn curvature_difference_closed_form(&self, rho: f64, z: f64) -> f64 {
        let zr = self.beam1.rayleigh_range();
        self.wavenumber() * rho * rho * self.spec.separation / (2.0 * (z * z + zr * zr))
    }

    /// Per-beam curvature difference with both beams referred to `+z`
    /// (beam 2 evaluated at `z - d/2` without reversing its axis). This is the
    /// exact counterpart of [`curvature_difference_closed_form`](Self::curvature_difference_closed_form).
    pub fn curvature_difference_coaxial(&self, rho: f64, z: f64) -> f64 {
        let a = self.spec.separation / 2.0;
        self.beam1.curvature_phase(rho, z + a) - self.beam2.curvature_phase(rho, z - a)
    }

    /// Samples `U`, `Θ` and `U²` on a grid.
    pub fn intensity_map(&self, grid: &GridSpec) -> Result<FieldMap> {
        grid.validate()?;
        let (axis1, axis2) = grid.axes();
        let t = grid.time;
        let rows: Vec<Vec<(f64, f64)>> = axis1
            .par_iter()
            .map(|&a| {
                axis2
                    .iter()
                    .map(|&b| {
                        let (u, th) = self.total_field(grid.point(a, b), t);
                        (u, th.unwrap_or(f64::NAN))
                    })
                    .collect()
            })
            .collect();
        let n = axis1.len() * axis2.len();
        let mut amplitude = Vec::with_capacity(n);
        let mut phase = Vec::with_capacity(n);
        for (u, th) in rows.into_iter().flatten() {
            amplitude.push(u);
            phase.push(th);
        }
        let intensity = amplitude.iter().map(|u| u * u).collect();
        Ok(FieldMap { grid: grid.clone(), axis1, axis2, amplitude, phase, intensity })
    }
}

/// Closed interval with a sample count.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Axis {
    pub fn new(min: f64, max: f64, count: usize) -> Self {
        Axis { min, max, count }
    }

    /// Axis of spacing at most `step` covering `[min, max]`.
    pub fn with_max_step(min: f64, max: f64, step: f64) -> Self {
        let count = ((max - min) / step).ceil() as usize + 1;
        Axis { min, max, count }
    }

    pub fn spacing(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            (self.max - self.min) / (self.count - 1) as f64
        }
    }

    /// Samples; the last point is exactly `max` and symmetric axes are mirrored exactly.
    pub fn samples(&self) -> Vec<f64> {
        let n = self.count;
        if n == 1 {
            return vec![self.min];
        }
        (0..n)
            .map(|i| {
                let span = self.max - self.min;
                let last = (n - 1) as f64;
                if 2 * i < n {
                    self.min + span * (i as f64 / last)
                } else {
                    self.max - span * ((n - 1 - i) as f64 / last)
                }
            })
            .collect()
    }

    fn validate(&self, name: &'static str) -> Result<()> {
        if !(self.min.is_finite() && self.max.is_finite()) {
            return Err(Error::invalid(name, "bounds must be finite"));
        }
        if self.count < 2 || self.max <= self.min {
            return Err(Error::invalid(name, format!("needs max > min and at least 2 samples, got [{}, {}] x {}", self.min, self.max, self.count)));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GridShape {
    /// Half-plane at fixed azimuth; rows are `z`, columns are `ρ`.
    RhoZ { z: Axis, rho: Axis, phi: f64 },
    /// Transverse slice at fixed `z`; rows are `x`, columns are `y`.
    Xy { x: Axis, y: Axis, z: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub shape: GridShape,
    /// Evaluation time (s).
    #[serde(default)]
    pub time: f64,
}

impl GridSpec {
    pub fn rho_z(z: Axis, rho: Axis, phi: f64) -> Self {
        GridSpec { shape: GridShape::RhoZ { z, rho, phi }, time: 0.0 }
    }

    pub fn xy(x: Axis, y: Axis, z: f64) -> Self {
        GridSpec { shape: GridShape::Xy { x, y, z }, time: 0.0 }
    }

    pub fn at_time(mut self, time: f64) -> Self {
        self.time = time;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !self.time.is_finite() {
            return Err(Error::invalid("time", "must be finite"));
        }
        match &self.shape {
            GridShape::RhoZ { z, rho, phi } => {
                z.validate("z")?;
                rho.validate("rho")?;
                if rho.min < 0.0 {
                    return Err(Error::invalid("rho", "must be non-negative"));
                }
                if !phi.is_finite() {
                    return Err(Error::invalid("phi", "must be finite"));
                }
            }
            GridShape::Xy { x, y, z } => {
                x.validate("x")?;
                y.validate("y")?;
                if !z.is_finite() {
                    return Err(Error::invalid("z", "must be finite"));
                }
            }
        }
        Ok(())
    }

    pub fn axis_names(&self) -> (&'static str, &'static str) {
        match self.shape {
            GridShape::RhoZ { .. } => ("z", "rho"),
            GridShape::Xy { .. } => ("x", "y"),
        }
    }

    pub fn axes(&self) -> (Vec<f64>, Vec<f64>) {
        match &self.shape {
            GridShape::RhoZ { z, rho, .. } => (z.samples(), rho.samples()),
            GridShape::Xy { x, y, .. } => (x.samples(), y.samples()),
        }
    }

    /// Lab-frame point for a pair of axis coordinates.
    pub fn point(&self, a: f64, b: f64) -> CylPoint {
        match self.shape {
            // negative ρ samples are never produced: validate() forbids them
            GridShape::RhoZ { phi, .. } => CylPoint::new(b, phi, a),
            GridShape::Xy { z, .. } => CylPoint::from_cartesian(a, b, z),
        }
    }
}

/// Sampled total field; values are row-major over (`axis1`, `axis2`).
#[derive(Clone, Debug)]
pub struct FieldMap {
    pub grid: GridSpec,
    pub axis1: Vec<f64>,
    pub axis2: Vec<f64>,
    pub amplitude: Vec<f64>,
    /// `NaN` at dark points.
    pub phase: Vec<f64>,
    pub intensity: Vec<f64>,
}

impl FieldMap {
    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.axis2.len() + j
    }

    pub fn intensity_at(&self, i: usize, j: usize) -> f64 {
        self.intensity[self.index(i, j)]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.axis2.len();
        &self.intensity[i * n..(i + 1) * n]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{PI, TAU};

    const LAMBDA: f64 = 589.16e-9;

    fn fig3() -> Pair {
        let w0 = 6.0 * LAMBDA;
        Pair::new(PairSpec::counter_propagating(LAMBDA, w0, 80, 80, 24.0 * w0)).unwrap()
    }

    fn rho0(p: &Pair) -> f64 {
        let b = p.beam1();
        let zr = b.rayleigh_range();
        let d = p.separation();
        b.spec().waist * 40f64.sqrt() * (1.0 + d * d / (4.0 * zr * zr)).sqrt()
    }

    #[test]
    fn midplane_axis_phase_difference() {
        let p = fig3();
        let phi = 0.37;
        let pd = p.phase_difference(CylPoint::new(0.0, phi, 0.0));
        assert!((pd.total - 160.0 * phi).abs() < 1e-12);
        assert!(pd.plane.abs() < 1e-12 && pd.gouy.abs() < 1e-12 && pd.curvature.abs() < 1e-12);
    }

    #[test]
    fn coincident_foci_on_axis() {
        let w0 = 6.0 * LAMBDA;
        let p = Pair::new(PairSpec::counter_propagating(LAMBDA, w0, 5, 5, 0.0)).unwrap();
        let zr = p.beam1().rayleigh_range();
        let k = p.wavenumber();
        let z = 0.21 * zr;
        let pd = p.phase_difference(CylPoint::new(0.0, 0.0, z));
        let expected = 2.0 * k * z - 12.0 * (z / zr).atan();
        assert!((pd.total - expected).abs() < 1e-9);
    }

    #[test]
    fn phase_difference_parts_sum_and_match_per_beam_oracle() {
        let p = fig3();
        let zr = p.beam1().rayleigh_range();
        let pt = CylPoint::new(rho0(&p), 0.0, zr / 10.0);
        let pd = p.phase_difference(pt);
        let oracle = p.beam1().phase(pt, 0.0) - p.beam2().phase(pt, 0.0);
        assert!((pd.total - oracle).abs() < 1e-9);
        let parts = pd.plane + pd.azimuthal + pd.gouy + pd.curvature;
        assert!((parts - pd.total).abs() < 1e-9);
        assert!((pd.plane - 2.0 * p.wavenumber() * pt.z).abs() < 1e-9);
        // two-arctangent Gouy sum for the adopted geometry
        let a = p.separation() / 2.0;
        let gouy = -81.0 * ((pt.z + a) / zr).atan() - 81.0 * ((pt.z - a) / zr).atan();
        assert!((pd.gouy - gouy).abs() < 1e-12);
    }

    #[test]
    fn gouy_closed_forms() {
        let p = fig3();
        let zr = p.beam1().rayleigh_range();
        for z in [-0.6 * zr, -0.1 * zr, 0.05 * zr, 0.4 * zr] {
            let exact = p.phase_difference(CylPoint::new(0.0, 0.0, z)).gouy;
            let identity = p.gouy_difference_closed_form(z, GouyClosedForm::Identity).unwrap();
            let printed = p.gouy_difference_closed_form(z, GouyClosedForm::AsPrinted).unwrap();
            assert!((identity - exact).abs() < 1e-10, "z={z}");
            assert!((printed - exact).abs() > 1e-3, "printed form should disagree for d != 0");
        }
    }

    #[test]
    fn curvature_closed_form_agrees_to_first_order_in_d() {
        // Own-frame curvature difference is odd in z and vanishes at the
        // mid-plane; the closed form describes coaxially referred curvature.
        let w0 = 20.0 * LAMBDA;
        let zr = PI * w0 * w0 / LAMBDA;
        let rho = 2.0 * w0;
        let mut prev = f64::INFINITY;
        for frac in [0.2, 0.1, 0.05, 0.025] {
            let p = Pair::new(PairSpec::counter_propagating(LAMBDA, w0, 2, 2, frac * zr)).unwrap();
            let closed = p.curvature_difference_closed_form(rho, 0.0);
            let exact = p.curvature_difference_coaxial(rho, 0.0);
            let rel = (closed - exact).abs() / exact.abs();
            assert!(rel < frac * frac, "d/zR={frac} rel={rel}");
            assert!(rel < prev);
            prev = rel;
            let own = p.phase_difference(CylPoint::new(rho, 0.0, 0.0)).curvature;
            assert!(own.abs() < 1e-12);
        }
    }

    #[test]
    fn single_beam_limit_and_dark_fringe() {
        let mut spec = PairSpec::counter_propagating(LAMBDA, 6.0 * LAMBDA, 3, 3, 10e-6);
        spec.beam2.amp_scale = 0.0;
        let p = Pair::new(spec).unwrap();
        let pt = CylPoint::new(5e-6, 0.4, 1e-6);
        assert!((p.total_amplitude(pt, 0.0) - p.beam1().amplitude(pt)).abs() < 1e-15);
        let th = p.total_phase(pt, 0.0).unwrap();
        assert!((th - principal(p.beam1().phase(pt, 0.0))).abs() < 1e-12);

        // equal beams at the mid-plane: dark where (l1 + l2) φ = π
        let p = Pair::new(PairSpec::counter_propagating(LAMBDA, 6.0 * LAMBDA, 3, 3, 10e-6)).unwrap();
        let dark = CylPoint::new(5e-6, PI / 6.0, 0.0);
        assert!(p.total_amplitude(dark, 0.0) < 1e-12 * p.beam1().amplitude(dark));
        assert!(p.total_phase(dark, 0.0).is_none());
    }

    #[test]
    fn frequency_offset_rotates_pattern_exactly() {
        let spec = PairSpec::counter_propagating(LAMBDA, 6.0 * LAMBDA, 4, 4, 30e-6).with_frequency_offset(TAU * 1e3);
        let p = Pair::new(spec).unwrap();
        let t = 3.3e-5;
        let rate = TAU * 1e3 / 8.0;
        for &(rho, phi, z) in &[(8e-6, 0.3, 1e-6), (9e-6, 2.0, -4e-6), (7e-6, 5.5, 2.2e-6)] {
            let now = p.intensity(CylPoint::new(rho, phi, z), t);
            let before = p.intensity(CylPoint::new(rho, phi - rate * t, z), 0.0);
            assert!((now - before).abs() <= 1e-12 * now.max(before));
        }
    }

    #[test]
    fn map_layout_and_intensity() {
        let p = fig3();
        let grid = GridSpec::rho_z(Axis::new(-1e-6, 1e-6, 5), Axis::new(1e-5, 3e-5, 4), 0.0);
        let map = p.intensity_map(&grid).unwrap();
        assert_eq!(map.intensity.len(), 20);
        let pt = CylPoint::new(map.axis2[2], 0.0, map.axis1[3]);
        assert!((map.intensity_at(3, 2) - p.intensity(pt, 0.0)).abs() < 1e-15 * map.intensity_at(3, 2).max(1e-300));
        for (u, i) in map.amplitude.iter().zip(&map.intensity) {
            assert_eq!(u * u, *i);
        }
    }

    #[test]
    fn axis_samples_are_mirror_symmetric() {
        let s = Axis::new(-3.7e-5, 3.7e-5, 2881).samples();
        for i in 0..s.len() {
            assert_eq!(s[i], -s[s.len() - 1 - i]);
        }
        assert_eq!(*s.last().unwrap(), 3.7e-5);
    }

    #[test]
    fn rejects_bad_grids_and_pairs() {
        let p = fig3();
        assert!(p.intensity_map(&GridSpec::rho_z(Axis::new(0.0, 1.0, 1), Axis::new(0.0, 1.0, 3), 0.0)).is_err());
        assert!(p.intensity_map(&GridSpec::rho_z(Axis::new(0.0, 1.0, 3), Axis::new(-1.0, 1.0, 3), 0.0)).is_err());
        let mut spec = PairSpec::counter_propagating(LAMBDA, 1e-5, 1, 1, 1e-4);
        spec.beam2.focal_z = 0.0;
        assert!(Pair::new(spec).is_err());
        let spec = PairSpec::counter_propagating(LAMBDA, 1e-5, 1, 1, -1e-4);
        assert!(Pair::new(spec).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn pair_strategy() -> impl Strategy<Value = Pair> {
            (1i32..12, 1i32..12, 4.0f64..30.0, 0.0f64..3.0, 0.0f64..2.0, -1e4f64..1e4).prop_map(|(l1, l2, w, dz, a2, dw)| {
                let w0 = w * LAMBDA;
                let zr = PI * w0 * w0 / LAMBDA;
                let mut spec = PairSpec::counter_propagating(LAMBDA, w0, l1, l2, dz * zr).with_frequency_offset(dw);
                spec.beam2.amp_scale = a2;
                Pair::new(spec).unwrap()
            })
        }

        proptest! {
            #[test]
            fn envelope_bounds_hold(p in pair_strategy(), r in 0.0f64..3.0, phi in 0.0f64..TAU, zf in -1.0f64..1.0, t in 0.0f64..1e-3) {
                let w0 = p.spec().beam1.waist;
                let pt = CylPoint::new(r * w0 * 3.0, phi, zf * p.beam1().rayleigh_range());
                let u = p.total_amplitude(pt, t);
                let (u1, u2) = (p.beam1().amplitude(pt), p.beam2().amplitude(pt));
                prop_assert!(u >= (u1 - u2).abs() && u <= u1 + u2);
            }

            #[test]
            fn azimuthal_periodicity(p in pair_strategy(), r in 0.2f64..3.0, phi in 0.0f64..TAU, zf in -0.5f64..0.5) {
                let order = p.azimuthal_order();
                prop_assume!(order != 0);
                let w0 = p.spec().beam1.waist;
                let a = CylPoint::new(r * w0 * 3.0, phi, zf * p.beam1().rayleigh_range());
                let b = CylPoint { phi: phi + TAU / f64::from(order), ..a };
                let (ia, ib) = (p.intensity(a, 0.0), p.intensity(b, 0.0));
                prop_assert!((ia - ib).abs() <= 1e-12 * ia.max(ib).max(1e-300));
            }

            #[test]
            fn mirror_symmetry_for_equal_beams(l in 1i32..20, w in 4.0f64..20.0, dz in 0.0f64..2.0, r in 0.2f64..3.0, phi in 0.0f64..TAU, zf in 0.0f64..0.6) {
                let w0 = w * LAMBDA;
                let zr = PI * w0 * w0 / LAMBDA;
                let p = Pair::new(PairSpec::counter_propagating(LAMBDA, w0, l, l, dz * zr)).unwrap();
                let a = CylPoint::new(r * w0 * 3.0, phi, zf * zr);
                let b = CylPoint::new(a.rho, -phi, -a.z);
                let (ia, ib) = (p.intensity(a, 0.0), p.intensity(b, 0.0));
                prop_assert!((ia - ib).abs() <= 1e-9 * ia.max(ib).max(1e-300));
            }
        }
    }
}
