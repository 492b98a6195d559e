//! Frequency-domain quantum noise model of a cold-damped capacitive accelerometer.
//!
//! Every dissipative element is a semi-infinite noise line whose incoming field
//! carries thermal and zero-point fluctuations. The closed-form noise
//! coefficients of the open-loop sensor ([`sensor`]) and of the cold-damped
//! instrument ([`servo`]) are cross-checked by a direct linear solve of the
//! element relations ([`network`]). [`budget`] turns the coefficients into
//! force and acceleration noise spectra and optimizes the amplifier matching.
//!
//! Conventions: time dependence `exp(-iωt)`, so a capacitor has impedance
//! `i/(ωC)`. Spectra are symmetrized double-sided densities.

#![cfg_attr(not(feature = "std"), no_std)]
// `!(x > 0.0)` is used on purpose: it rejects NaN along with the bad values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod budget;
pub mod error;
pub mod lines;
pub mod linalg;
pub mod network;
pub mod noise;
pub mod optimize;
pub mod params;
pub mod sensor;
pub mod servo;

pub use error::{Error, Result};
pub use lines::{CoefficientSet, Line};
pub use noise::{EffectiveTemperature, Frequency, NoiseLine, HBAR, K_B};
pub use params::InstrumentParams;

/// Complex double used throughout.
pub type C64 = num_complex::Complex64;
