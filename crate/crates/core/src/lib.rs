//! Design models for coupling power converters to a capacitor-less DC link
//! through a series inductor with a zener + freewheel diode clamp.
//!
//! The crate is `no_std` and only needs `alloc`. It covers:
//!
//! - [`model`]: the shared domain types and the parts catalog data model,
//! - [`sizing`]: base impedance, AC reactor and DC coupler sizing, clamp voltage
//!   budget and clamp-chain selection,
//! - [`harmonics`]: six-pulse rectifier ripple spectrum, ripple currents, THD and
//!   inductor attenuation,
//! - [`transient`]: the disconnection transient (closed form and fixed-step RK4),
//!   zener surge checks and connection inrush.
//!
//! All quantities are SI base units. The only exception is [`model::SourceSpec`],
//! which takes line voltage in kV and apparent power in kVA.
#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod error;
pub mod harmonics;
pub mod model;
pub mod sizing;
pub mod transient;

pub use error::{Error, Result};
