//! Physical constants (CODATA 2018, exact where defined).

pub const HBAR: f64 = 1.054_571_817e-34;
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;

/// Sodium D2 line used by the bundled examples.
pub const SODIUM_D2_WAVELENGTH: f64 = 589.16e-9;
pub const SODIUM_D2_LINEWIDTH: f64 = 2.0 * std::f64::consts::PI * 10.01e6;
pub const SODIUM_MASS: f64 = 3.8175e-26;

/// Radius below which azimuthal unit vectors are treated as undefined.
pub const AXIS_EPSILON: f64 = 1e-15;
