//! Numerics for coherent transport by adiabatic passage (CTAP) of atoms in
//! radio-frequency dressed triple-well potentials.
//!
//! The crate is `no_std` (it needs `alloc`). Everything here works in a
//! dimensionless unit system in which `hbar = 1`; SI quantities enter and
//! leave through [`units::UnitScaling`]. File formats, configuration and the
//! command line live in the `ctap` companion crate.
//!
//! Module map:
//!
//! * [`units`]: physical constants, atomic species, unit scaling.
//! * [`rf`]: multi-frequency rf-dressed adiabatic potentials and trap geometry.
//! * [`schedule`]: time-dependent radio frequencies for the transport sequence.
//! * [`grid`], [`fft`]: spatial grid, wavefunctions, radix-2 FFT.
//! * [`evolution`]: imaginary-time ground states and split-step propagation
//!   (linear Schrödinger and Gross-Pitaevskii).
//! * [`three_level`]: the reduced three-mode model and tunnelling extraction.
//! * [`analysis`]: fidelity metrics, sensitivity probes, sweeps and the
//!   Landau-Zener diagnostic.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod analysis;
pub mod error;
pub mod evolution;
pub mod fft;
pub mod grid;
mod math;
pub mod rf;
pub mod schedule;
pub mod three_level;
pub mod units;

pub use error::{Error, Result};
pub use math::C64;
