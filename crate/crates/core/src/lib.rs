//! Unambiguous delay-Doppler recovery for random pulse phase coded
//! pulse-Doppler radar.
//!
//! The crate covers signal synthesis ([`signal_model`]), the structured
//! measurement operators ([`measurement`]), greedy and convex sparse
//! recovery ([`recovery`]), a multiple-PRF baseline ([`baseline_mprf`]) and
//! spark analysis plus hit-rate experiments ([`analysis`]).

pub mod analysis;
pub mod baseline_mprf;
pub mod dft;
pub mod error;
pub mod measurement;
pub mod recovery;
pub mod signal_model;

pub use error::{Error, Result};

/// Dense complex matrix (column-major).
pub type CMatrix = nalgebra::DMatrix<num_complex::Complex64>;
/// Dense complex column vector.
pub type CVector = nalgebra::DVector<num_complex::Complex64>;
