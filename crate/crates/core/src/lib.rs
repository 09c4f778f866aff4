//! Interference of two counter-propagating Laguerre-Gaussian doughnut beams
//! whose focal planes are separated along the common axis, and the optical
//! forces that the combined field exerts on two-level atoms.
//!
//! The crate is organised bottom-up:
//!
//! * [`lg_mode`] evaluates a single LG mode (amplitude, phase, complex field).
//! * [`superpose`] adds two co-polarised modes into a total amplitude and
//!   phase, with an optional frequency offset, and samples intensity maps.
//! * [`atom_forces`] turns fields into scattering and dipole forces and
//!   provides the closed-form low-intensity trap quantities.
//! * [`ring_analysis`] detects the finite ring lattice between the foci.
//! * [`dynamics`] integrates classical point-atom trajectories.
//! * [`io`] holds the run configuration and the CSV/JSON output formats.
//!
//! All quantities are SI (m, s, rad/s, N, J) unless a name says otherwise.

pub mod atom_forces;
pub mod constants;
pub mod dynamics;
mod error;
pub mod io;
pub mod lg_mode;
pub mod numdiff;
pub mod ring_analysis;
pub mod superpose;

pub use atom_forces::{AtomSpec, CylVector, ForceModel, ForceVec, PairCoupling, PhaseModel, Velocity};
pub use error::{Error, Result};
pub use lg_mode::{BeamSpec, CylPoint, FieldSample, LgMode, Sign};
pub use superpose::{FieldMap, GridSpec, Pair, PairSpec};
