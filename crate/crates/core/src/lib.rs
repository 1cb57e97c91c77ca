//! Steady-state optical response of resonantly driven multilevel atoms.
//!
//! The four-level double-loop scheme lives in [`model`] and [`dressed`];
//! [`spectra`] and [`doppler`] turn probe amplitudes into lineshapes.
//! [`mixing`], [`lics`] and [`relaxation`] hold the closed forms for resonant
//! frequency mixing, laser-induced continuum structure and relaxation-driven
//! interference.

pub mod doppler;
pub mod dressed;
pub mod error;
pub mod lics;
pub mod mixing;
pub mod model;
pub mod relaxation;
pub mod spectra;

pub use error::{Error, Result};
pub use num_complex::Complex64;
