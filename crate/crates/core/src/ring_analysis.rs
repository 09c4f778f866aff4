//! Ring-lattice detection on `(ρ, z)` intensity maps and the double-ring
//! geometry of a shifted pair.
//!
//! Detection follows the ridge of per-`z` radial maxima. Axial maxima of the
//! ridge that stand out from minima on both sides within one wavelength are
//! rings; the one nearest `z = 0` is the central ring and the rest are paired
//! outwards into doubles.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::superpose::{Axis, FieldMap, GridShape, GridSpec, Pair};

/// Minimum prominence of an axial maximum relative to its own height.
pub const MIN_PROMINENCE: f64 = 1e-3;
/// Radial maxima weaker than this fraction of the row maximum are ignored.
pub const RADIAL_PEAK_FLOOR: f64 = 0.01;
/// Pairing window in units of the fringe spacing.
pub const PAIRING_WINDOW: f64 = 1.5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RingClass {
    Central,
    Double,
    /// Off-centre ring left without a partner.
    Single,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialPeak {
    pub radius: f64,
    pub peak: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ring {
    pub z: f64,
    /// Radius of the strongest radial maximum at this `z`.
    pub radius: f64,
    pub peak: f64,
    pub class: RingClass,
    /// All resolved radial maxima on the ring's row, by increasing radius.
    #[serde(skip)]
    pub radial_peaks: Vec<RadialPeak>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Splitting {
    pub z: f64,
    pub delta_rho: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RingSet {
    pub fringe_delta: f64,
    /// Ordered by strictly increasing `z`.
    pub rings: Vec<Ring>,
    pub splittings: Vec<Splitting>,
}

impl RingSet {
    pub fn central(&self) -> Option<&Ring> {
        self.rings.iter().find(|r| r.class == RingClass::Central)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Vertex of the parabola through three equally spaced samples, as
/// `(offset in units of the spacing, value)`.
pub fn parabolic_vertex(y0: f64, y1: f64, y2: f64) -> (f64, f64) {
    let curv = y0 - 2.0 * y1 + y2;
    if curv >= 0.0 {
        return (0.0, y1);
    }
    let off = (0.5 * (y0 - y2) / curv).clamp(-0.5, 0.5);
    (off, y1 - 0.25 * (y0 - y2) * off)
}

/// Refined maximum of `v` at discrete index `i` on a uniform axis.
fn refine(axis: &[f64], v: &[f64], i: usize) -> (f64, f64) {
    if i == 0 || i + 1 >= v.len() {
        return (axis[i], v[i]);
    }
    let (off, val) = parabolic_vertex(v[i - 1], v[i], v[i + 1]);
    let h = axis[i + 1] - axis[i];
    (axis[i] + off * h, val)
}

/// Local radial maxima of a row at or above `RADIAL_PEAK_FLOOR` of its maximum.
pub fn radial_peaks(rho: &[f64], row: &[f64]) -> Vec<RadialPeak> {
    let top = row.iter().copied().fold(0.0, f64::max);
    if top <= 0.0 {
        return Vec::new();
    }
    let n = row.len();
    let mut out = Vec::new();
    let mut j = 0;
    while j < n {
        // plateau [j, e]
        let mut e = j;
        while e + 1 < n && row[e + 1] == row[j] {
            e += 1;
        }
        let left_ok = j == 0 || row[j - 1] < row[j];
        let right_ok = e + 1 == n || row[e + 1] < row[j];
        if left_ok && right_ok && row[j] >= RADIAL_PEAK_FLOOR * top && j > 0 && e + 1 < n {
            let mid = (j + e) / 2;
            let (r, p) = refine(rho, row, mid);
            out.push(RadialPeak { radius: r, peak: p });
        }
        j = e + 1;
    }
    out
}

struct Ridge {
    radius: f64,
    peak: f64,
}

fn ridge(map: &FieldMap) -> Vec<Ridge> {
    (0..map.axis1.len())
        .into_par_iter()
        .map(|i| {
            let row = map.row(i);
            let j = row
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.partial_cmp(b.1).unwrap_or(Ordering::Equal))
                .map(|(j, _)| j)
                .unwrap_or(0);
            let (radius, peak) = refine(&map.axis2, row, j);
            Ridge { radius, peak }
        })
        .collect()
}

/// Indices of ridge maxima bracketed by sufficiently deep minima within
/// `window` samples on both sides.
fn axial_maxima(peaks: &[f64], window: usize) -> Vec<usize> {
    let n = peaks.len();
    let mut out = Vec::new();
    let mut i = 1;
    while i + 1 < n {
        let mut e = i;
        while e + 1 < n && peaks[e + 1] == peaks[i] {
            e += 1;
        }
        if e + 1 >= n {
            break;
        }
        if peaks[i - 1] < peaks[i] && peaks[e + 1] < peaks[i] {
            let top = peaks[i];
            let lo = i.saturating_sub(window);
            let hi = (e + window).min(n - 1);
            let left = descend(&peaks[lo..=i], true);
            let right = descend(&peaks[e..=hi], false);
            if let (Some(l), Some(r)) = (left, right) {
                if top - l.max(r) >= MIN_PROMINENCE * top {
                    out.push((i + e) / 2);
                }
            }
        }
        i = e + 1;
    }
    out
}

/// Value of the first local minimum walking away from the maximum, or `None`
/// if the slice is monotone (the minimum lies beyond the window).
fn descend(s: &[f64], towards_start: bool) -> Option<f64> {
    let v: Vec<f64> = if towards_start { s.iter().rev().copied().collect() } else { s.to_vec() };
    for k in 1..v.len() {
        if v[k] > v[k - 1] {
            return Some(v[k - 1]);
        }
    }
    None
}

fn median(mut v: Vec<f64>) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    let n = v.len();
    Some(if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) })
}

/// Smallest region accepted by [`check_resolution`]: `|z| ≤ d/2` (at least
/// `2λ`) at `λ/20`, and the radial band swept by the doughnuts between the
/// foci, padded by `3 w0`, at `w0/100`.
pub fn default_region(pair: &Pair) -> GridSpec {
    let spec = &pair.spec().beam1;
    let half = (pair.separation() / 2.0).max(2.0 * spec.wavelength);
    let z = Axis::with_max_step(-half, half, spec.wavelength / 20.0);
    let b = pair.beam1();
    let lo = (b.doughnut_radius(0.0) - 3.0 * spec.waist).max(0.0);
    let hi = b.doughnut_radius(pair.separation()) + 3.0 * spec.waist;
    GridSpec::rho_z(z, Axis::with_max_step(lo, hi, spec.waist / 100.0), 0.0)
}

/// Checks that `region` is a `(ρ, z)` grid fine enough to resolve the fringes
/// and rings of `pair`.
pub fn check_resolution(pair: &Pair, region: &GridSpec) -> Result<()> {
    region.validate()?;
    let GridShape::RhoZ { z, rho, .. } = &region.shape else {
        return Err(Error::Resolution("ring detection needs a (rho, z) half-plane grid".into()));
    };
    let spec = &pair.spec().beam1;
    let (dz_max, drho_max) = (spec.wavelength / 20.0, spec.waist / 100.0);
    let slack = 1.0 + 1e-9;
    if z.spacing() > dz_max * slack {
        return Err(Error::Resolution(format!(
            "axial spacing {:.3e} m exceeds lambda/20 = {:.3e} m; use at least {} z samples",
            z.spacing(),
            dz_max,
            ((z.max - z.min) / dz_max).ceil() as usize + 1
        )));
    }
    if rho.spacing() > drho_max * slack {
        return Err(Error::Resolution(format!(
            "radial spacing {:.3e} m exceeds w0/100 = {:.3e} m; use at least {} rho samples",
            rho.spacing(),
            drho_max,
            ((rho.max - rho.min) / drho_max).ceil() as usize + 1
        )));
    }
    let half = pair.separation() / 2.0;
    let tol = 1e-9 * half;
    if z.min > -half + tol || z.max < half - tol {
        return Err(Error::Resolution(format!("z range [{:.3e}, {:.3e}] must cover |z| <= d/2 = {half:.3e}", z.min, z.max)));
    }
    Ok(())
}

/// Evaluates `pair` on `region` and detects its rings.
pub fn find_rings(pair: &Pair, region: &GridSpec) -> Result<RingSet> {
    check_resolution(pair, region)?;
    let map = pair.intensity_map(region)?;
    find_rings_in_map(pair, &map)
}

/// Ring detection on an existing `(ρ, z)` map; the map's resolution is not checked.
pub fn find_rings_in_map(pair: &Pair, map: &FieldMap) -> Result<RingSet> {
    if !matches!(map.grid.shape, GridShape::RhoZ { .. }) {
        return Err(Error::Resolution("ring detection needs a (rho, z) half-plane grid".into()));
    }
    let zs = &map.axis1;
    if zs.len() < 3 || map.axis2.len() < 3 {
        return Err(Error::Resolution("map needs at least 3 samples per axis".into()));
    }
    let dz = zs[1] - zs[0];
    let lambda = pair.spec().beam1.wavelength;
    let window = ((lambda / dz).ceil() as usize).max(1);

    let ridge = ridge(map);
    let peaks: Vec<f64> = ridge.iter().map(|r| r.peak).collect();
    let idx = axial_maxima(&peaks, window);
    if idx.is_empty() {
        return Err(Error::NoRings);
    }

    let mut rings: Vec<Ring> = idx
        .iter()
        .map(|&i| {
            let (z, peak) = refine(zs, &peaks, i);
            Ring { z, radius: ridge[i].radius, peak, class: RingClass::Single, radial_peaks: radial_peaks(&map.axis2, map.row(i)) }
        })
        .collect();

    let near = (pair.separation() / 4.0).max(2.0 * lambda);
    let spacing = |rs: &[Ring], lim: f64| -> Vec<f64> {
        rs.windows(2).filter(|w| w[0].z.abs() <= lim && w[1].z.abs() <= lim).map(|w| w[1].z - w[0].z).collect()
    };
    let fringe_delta = median(spacing(&rings, near))
        .or_else(|| median(spacing(&rings, f64::INFINITY)))
        .ok_or_else(|| Error::Resolution("only one fringe found; widen the z range".into()))?;

    classify(&mut rings, fringe_delta);

    let splittings = rings
        .iter()
        .filter_map(|r| {
            let mut strongest = r.radial_peaks.clone();
            if strongest.len() < 2 {
                return None;
            }
            strongest.sort_by(|a, b| b.peak.partial_cmp(&a.peak).unwrap_or(Ordering::Equal));
            let (a, b) = (strongest[0].radius, strongest[1].radius);
            Some(Splitting { z: r.z, delta_rho: (a - b).abs() })
        })
        .collect();

    Ok(RingSet { fringe_delta, rings, splittings })
}

fn classify(rings: &mut [Ring], delta: f64) {
    let Some((c, cz)) = rings.iter().enumerate().map(|(i, r)| (i, r.z.abs())).min_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(Ordering::Equal)) else {
        return;
    };
    // right walk starts at start_right; left walk's first ring is end_left - 1
    let (start_right, end_left) = if cz <= 0.5 * delta {
        rings[c].class = RingClass::Central;
        (c + 1, c)
    } else if rings[c].z > 0.0 {
        (c, c)
    } else {
        (c + 1, c + 1)
    };
    let window = PAIRING_WINDOW * delta;
    // right side walks outwards with increasing index
    let mut i = start_right;
    while i + 1 < rings.len() {
        if rings[i + 1].z - rings[i].z <= window {
            rings[i].class = RingClass::Double;
            rings[i + 1].class = RingClass::Double;
            i += 2;
        } else {
            i += 1;
        }
    }
    // left side walks outwards with decreasing index
    let mut i = end_left;
    while i >= 2 {
        if rings[i - 1].z - rings[i - 2].z <= window {
            rings[i - 1].class = RingClass::Double;
            rings[i - 2].class = RingClass::Double;
            i -= 2;
        } else {
            i -= 1;
        }
    }
}

/// Doughnut radii `(w₁, w₂)` of the double ring a distance `delta` from the
/// centre: `w0 sqrt(|l|/2) sqrt(1 + (d/2 ∓ δ)²/z_R²)`.
pub fn double_ring_radii(pair: &Pair, delta: f64) -> Result<(f64, f64)> {
    let half = check_delta(pair, delta)?;
    let b = pair.beam1();
    Ok((b.doughnut_radius(half - delta), b.doughnut_radius(half + delta)))
}

fn check_delta(pair: &Pair, delta: f64) -> Result<f64> {
    let half = pair.separation() / 2.0;
    if !(delta >= 0.0 && delta < half) {
        return Err(Error::Domain(format!("delta must lie in [0, d/2) = [0, {half:e}), got {delta:e}")));
    }
    let (a, b) = (&pair.spec().beam1, &pair.spec().beam2);
    if a.radial != 0 || b.radial != 0 || a.winding.abs() != b.winding.abs() || a.waist != b.waist {
        return Err(Error::Domain("double-ring formulas require equal p = 0 doughnut beams".into()));
    }
    Ok(half)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialSeparation {
    /// `w₂ - w₁`.
    pub exact: f64,
    /// Leading Taylor term `w0 sqrt(|l|/2) d δ / z_R²`.
    pub approx: f64,
    /// `sqrt(|l|/2) d δ / z_R² = approx / w0`.
    pub alpha: f64,
    /// `w0 sqrt(2|l|) d δ / z_R²`, twice the leading term; kept for comparison.
    pub approx_doubled: f64,
    /// `sqrt(2|l|) d δ / z_R²`.
    pub alpha_doubled: f64,
}

pub fn radial_separation(pair: &Pair, delta: f64) -> Result<RadialSeparation> {
    let (w1, w2) = double_ring_radii(pair, delta)?;
    let b = pair.beam1();
    let zr = b.rayleigh_range();
    let l = f64::from(b.abs_winding());
    let x = pair.separation() * delta / (zr * zr);
    let alpha = (0.5 * l).sqrt() * x;
    let alpha_doubled = (2.0 * l).sqrt() * x;
    let w0 = b.spec().waist;
    Ok(RadialSeparation { exact: w2 - w1, approx: w0 * alpha, alpha, approx_doubled: w0 * alpha_doubled, alpha_doubled })
}

/// Measured radii of one resolved double ring against both readings of its
/// offset `δ`: from the centre (`δ = |z|`) and from the focal plane
/// (`δ = d/2 - |z|`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DoubleRingComparison {
    pub z: f64,
    pub inner: f64,
    pub outer: f64,
    pub centre_offset: (f64, f64),
    pub focal_offset: (f64, f64),
    pub centre_offset_error: f64,
    pub focal_offset_error: f64,
}

/// Compares every ring with two resolved radial maxima against the formula radii.
pub fn compare_double_rings(pair: &Pair, set: &RingSet) -> Result<Vec<DoubleRingComparison>> {
    let half = pair.separation() / 2.0;
    let mut out = Vec::new();
    for r in &set.rings {
        if r.radial_peaks.len() < 2 || r.z.abs() >= half || r.z == 0.0 {
            continue;
        }
        let mut top = r.radial_peaks.clone();
        top.sort_by(|a, b| b.peak.partial_cmp(&a.peak).unwrap_or(Ordering::Equal));
        let (inner, outer) = {
            let (a, b) = (top[0].radius, top[1].radius);
            (a.min(b), a.max(b))
        };
        let centre = double_ring_radii(pair, r.z.abs())?;
        let focal = double_ring_radii(pair, half - r.z.abs())?;
        let err = |(w1, w2): (f64, f64)| ((inner - w1) / w1).abs().max(((outer - w2) / w2).abs());
        out.push(DoubleRingComparison {
            z: r.z,
            inner,
            outer,
            centre_offset: centre,
            focal_offset: focal,
            centre_offset_error: err(centre),
            focal_offset_error: err(focal),
        });
    }
    Ok(out)
}

/// Angle by which the azimuthal intensity pattern on the circle `(ρ, z)` has
/// turned between times 0 and `t`, from the phase of its `m`-th Fourier
/// harmonic. Valid while the turn stays below `π/|m|`.
pub fn pattern_rotation(pair: &Pair, rho: f64, z: f64, t: f64) -> Result<f64> {
    let m = pair.azimuthal_order();
    if m == 0 {
        return Err(Error::Domain("net azimuthal order is zero: no petals to track".into()));
    }
    let n = 8 * m.unsigned_abs() as usize;
    let harmonic = |time: f64| {
        let mut acc = num_complex::Complex64::new(0.0, 0.0);
        for j in 0..n {
            let phi = std::f64::consts::TAU * j as f64 / n as f64;
            let i = pair.intensity(crate::lg_mode::CylPoint::new(rho, phi, z), time);
            acc += num_complex::Complex64::from_polar(i, -f64::from(m) * phi);
        }
        acc
    };
    let (h0, h1) = (harmonic(0.0), harmonic(t));
    if h0.norm() == 0.0 || h1.norm() == 0.0 {
        return Err(Error::Domain("no azimuthal modulation on the sampled circle".into()));
    }
    Ok((h0 * h1.conj()).arg() / f64::from(m))
}

/// Axial position of the intensity maximum on the line `(ρ, φ)` nearest
/// `z_guess` at time `t`, refined by golden-section search within a quarter
/// fringe.
pub fn fringe_maximum(pair: &Pair, rho: f64, phi: f64, z_guess: f64, t: f64) -> f64 {
    let k = pair.wavenumber();
    let period = std::f64::consts::PI / k;
    let f = |z: f64| pair.intensity(crate::lg_mode::CylPoint::new(rho, phi, z), t);
    // coarse scan of one period around the guess
    let n = 64;
    let mut best = (z_guess, f(z_guess));
    for j in 0..=n {
        let z = z_guess - 0.5 * period + period * j as f64 / n as f64;
        let v = f(z);
        if v > best.1 {
            best = (z, v);
        }
    }
    let (mut a, mut b) = (best.0 - period / n as f64, best.0 + period / n as f64);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    for _ in 0..80 {
        if f(c) > f(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - g * (b - a);
        d = a + g * (b - a);
    }
    0.5 * (a + b)
}

/// Axial drift speed of the fringe nearest `z = 0` on the line `(ρ, φ = 0)`
/// between times 0 and `t`.
pub fn fringe_drift_speed(pair: &Pair, rho: f64, t: f64) -> Result<f64> {
    if t == 0.0 {
        return Err(Error::invalid("t", "must be nonzero"));
    }
    let z0 = fringe_maximum(pair, rho, 0.0, 0.0, 0.0);
    let z1 = fringe_maximum(pair, rho, 0.0, z0, t);
    Ok((z1 - z0) / t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::superpose::PairSpec;
    use std::f64::consts::{PI, TAU};

    const LAMBDA: f64 = 589.16e-9;

    #[test]
    fn parabola_vertex_exact_for_quadratics() {
        let f = |x: f64| 3.0 - 2.0 * (x - 0.3) * (x - 0.3);
        let (off, val) = parabolic_vertex(f(-1.0), f(0.0), f(1.0));
        assert!((off - 0.3).abs() < 1e-12);
        assert!((val - 3.0).abs() < 1e-12);
        assert_eq!(parabolic_vertex(1.0, 1.0, 1.0), (0.0, 1.0));
    }

    #[test]
    fn radial_peak_finder() {
        let rho: Vec<f64> = (0..200).map(|j| j as f64 * 0.01).collect();
        let row: Vec<f64> = rho.iter().map(|&r| (-(r - 0.5f64).powi(2) / 0.002).exp() + 0.5 * (-(r - 1.2f64).powi(2) / 0.002).exp()).collect();
        let p = radial_peaks(&rho, &row);
        assert_eq!(p.len(), 2);
        assert!((p[0].radius - 0.5).abs() < 1e-3);
        assert!((p[1].radius - 1.2).abs() < 1e-3);
    }

    fn small_pair(l: i32, d: f64) -> Pair {
        Pair::new(PairSpec::counter_propagating(LAMBDA, 4.0 * LAMBDA, l, l, d)).unwrap()
    }

    fn region(pair: &Pair, half_z: f64) -> GridSpec {
        let w0 = pair.spec().beam1.waist;
        GridSpec::rho_z(
            Axis::with_max_step(-half_z, half_z, LAMBDA / 20.0),
            Axis::with_max_step(0.2 * w0, 3.0 * w0, w0 / 100.0),
            0.0,
        )
    }

    #[test]
    fn rejects_coarse_grids() {
        let p = small_pair(2, 10.0 * LAMBDA);
        let w0 = 4.0 * LAMBDA;
        let coarse_z = GridSpec::rho_z(Axis::new(-5.0 * LAMBDA, 5.0 * LAMBDA, 50), Axis::with_max_step(0.0, w0, w0 / 100.0), 0.0);
        assert!(matches!(find_rings(&p, &coarse_z), Err(Error::Resolution(_))));
        let coarse_rho = GridSpec::rho_z(Axis::with_max_step(-5.0 * LAMBDA, 5.0 * LAMBDA, LAMBDA / 20.0), Axis::new(0.0, w0, 10), 0.0);
        assert!(matches!(find_rings(&p, &coarse_rho), Err(Error::Resolution(_))));
        let short = GridSpec::rho_z(Axis::with_max_step(-LAMBDA, LAMBDA, LAMBDA / 20.0), Axis::with_max_step(0.0, w0, w0 / 100.0), 0.0);
        assert!(matches!(find_rings(&p, &short), Err(Error::Resolution(_))));
        let xy = GridSpec::xy(Axis::new(-1e-6, 1e-6, 3), Axis::new(-1e-6, 1e-6, 3), 0.0);
        assert!(find_rings(&p, &xy).is_err());
    }

    #[test]
    fn single_beam_has_no_rings() {
        let mut spec = PairSpec::counter_propagating(LAMBDA, 4.0 * LAMBDA, 2, 2, 4.0 * LAMBDA);
        spec.beam2.amp_scale = 0.0;
        let p = Pair::new(spec).unwrap();
        assert!(matches!(find_rings(&p, &region(&p, 3.0 * LAMBDA)), Err(Error::NoRings)));
    }

    #[test]
    fn coincident_foci_lattice() {
        let p = small_pair(2, 0.0);
        let set = find_rings(&p, &region(&p, 3.0 * LAMBDA)).unwrap();
        let central = set.central().expect("central ring");
        assert!(central.z.abs() < LAMBDA / 20.0);
        let drho = 4.0 * LAMBDA / 100.0;
        for r in &set.rings {
            let expected = p.beam1().doughnut_radius(r.z);
            assert!((r.radius - expected).abs() <= drho, "z={} radius {} vs {}", r.z, r.radius, expected);
        }
        assert!(set.splittings.is_empty());
        assert!(set.rings.windows(2).all(|w| w[1].z > w[0].z));
    }

    #[test]
    fn lattice_is_mirror_symmetric() {
        let p = small_pair(3, 12.0 * LAMBDA);
        let set = find_rings(&p, &region(&p, 6.0 * LAMBDA)).unwrap();
        let dz = LAMBDA / 20.0;
        let drho = 4.0 * LAMBDA / 100.0;
        for r in set.rings.iter().filter(|r| r.z > 0.0) {
            let m = set.rings.iter().find(|q| (q.z + r.z).abs() <= dz).expect("mirror ring");
            assert!((m.radius - r.radius).abs() <= drho);
        }
        let central = set.central().unwrap();
        assert!((central.radius - p.beam1().doughnut_radius(6.0 * LAMBDA)).abs() <= drho);
    }

    #[test]
    fn pairing_walks_outwards() {
        let ring = |z: f64| Ring { z, radius: 1.0, peak: 1.0, class: RingClass::Single, radial_peaks: vec![] };
        let mut rs: Vec<Ring> = [-3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0, 4.0, 7.0].iter().map(|&z| ring(z)).collect();
        classify(&mut rs, 1.0);
        let classes: Vec<RingClass> = rs.iter().map(|r| r.class).collect();
        use RingClass::*;
        assert_eq!(classes, vec![Single, Double, Double, Central, Double, Double, Double, Double, Single]);
    }

    #[test]
    fn ring_set_json_schema() {
        let set = RingSet {
            fringe_delta: 3e-7,
            rings: vec![Ring { z: 0.0, radius: 2e-5, peak: 4.0, class: RingClass::Central, radial_peaks: vec![] }],
            splittings: vec![Splitting { z: 1e-6, delta_rho: 1e-7 }],
        };
        let v: serde_json::Value = serde_json::from_str(&set.to_json().unwrap()).unwrap();
        assert_eq!(v["rings"][0]["class"], "central");
        assert!(v["rings"][0].get("peak").is_some());
        assert_eq!(v["splittings"][0]["delta_rho"], 1e-7);
        assert_eq!(RingSet::from_json(&set.to_json().unwrap()).unwrap(), set);
    }

    #[test]
    fn double_ring_radii_limits() {
        let w0 = 6.0 * LAMBDA;
        let p = Pair::new(PairSpec::counter_propagating(LAMBDA, w0, 80, 80, 24.0 * w0)).unwrap();
        let rho0 = p.beam1().doughnut_radius(12.0 * w0);
        let (a, b) = double_ring_radii(&p, 0.0).unwrap();
        assert!((a - rho0).abs() < 1e-18 && (b - rho0).abs() < 1e-18);
        let (a, b) = double_ring_radii(&p, 3e-6).unwrap();
        assert!(b > a && a > 0.0);
        assert!(double_ring_radii(&p, 12.0 * w0).is_err());
        assert!(double_ring_radii(&p, -1e-9).is_err());
        assert!(double_ring_radii(&small_pair(2, 0.0), 0.0).is_err());
    }

    #[test]
    fn radial_separation_leading_term() {
        let w0 = 8e-6;
        let zr = PI * w0 * w0 / LAMBDA;
        let delta = PI / (TAU / LAMBDA);
        let p = Pair::new(PairSpec::counter_propagating(LAMBDA, w0, 2, 2, 0.2 * zr)).unwrap();
        let s = radial_separation(&p, delta).unwrap();
        assert!(((s.approx - s.exact) / s.exact).abs() < 0.15);
        assert!((s.approx_doubled / s.approx - 2.0).abs() < 1e-12);
        assert!((s.alpha * w0 - s.approx).abs() < 1e-24);
        assert!(s.alpha < 1.0);
        let z = radial_separation(&p, 0.0).unwrap();
        assert_eq!((z.exact, z.approx), (0.0, 0.0));
    }

    #[test]
    fn rotation_measurement_is_exact() {
        let spec = PairSpec::counter_propagating(LAMBDA, 6.0 * LAMBDA, 5, 5, 10.0 * LAMBDA).with_frequency_offset(TAU * 1000.0);
        let p = Pair::new(spec).unwrap();
        let t = 1e-4;
        let ang = pattern_rotation(&p, p.beam1().doughnut_radius(5.0 * LAMBDA), 0.3e-6, t).unwrap();
        let expected = TAU * 1000.0 * t / 10.0;
        assert!((ang - expected).abs() <= 1e-9 * expected);
    }
}
