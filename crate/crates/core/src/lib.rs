//! Propagation, mode exchange, storage and retrieval of a two-color single
//! photon in a double-Lambda EIT medium.
//!
//! * [`params`]: medium, coupling and probe parameters.
//! * [`analytic`]: closed-form propagation model.
//! * [`dynamics`]: space-marching integrator of the coupled field/atom equations.
//! * [`protocol`]: storage-and-retrieval experiment and its figures of merit.
//! * [`presets`]: the reference parameter sets.

pub mod analytic;
pub mod dynamics;
pub mod error;
pub mod params;
pub mod presets;
pub mod protocol;

pub use error::{AnalyticError, ParamError, ProtocolError, SimError};
pub use num_complex::Complex64 as C64;
