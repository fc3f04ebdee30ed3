//! Free energies of determinantal and Pfaffian Coulomb gases on the Riemann sphere with
//! point charges at the poles.
//!
//! The crate computes exact log-partition functions from (skew-)orthogonal norms of a
//! radially symmetric weight, closed-form values for the induced spherical ensemble, and
//! the five-term large-`N` expansions built from functionals of the background measure.

pub mod acceptance;
pub mod error;
pub mod expansion;
pub mod free_energy;
pub mod measure;
pub mod norms;
pub mod numerics;
pub mod specfun;

pub use error::{Error, Result};
pub use expansion::{ExpansionCoefficients, ResidualReport};
pub use free_energy::{FreeEnergy, Geometry};
pub use measure::{BuiltinMeasure, MeasureFunctionals, RadialMeasure};
pub use norms::{ChargedEnsemble, Kind, LogNorm};
