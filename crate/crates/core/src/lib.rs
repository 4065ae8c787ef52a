// Copyright 2026 The hybridcool Authors
// SPDX-License-Identifier: Apache-2.0

//! Ground-state cooling of a mechanical oscillator coupled to a driven qubit
//! and an optical cavity.
//!
//! Units: hbar = 1, frequencies and rates in MHz, times in microseconds.

pub mod cavity_spectrum;
pub mod cli;
pub mod config;
pub mod cooling_strong;
pub mod cooling_weak;
pub mod device;
pub mod error;
pub mod lindblad;
pub mod operators;
pub mod params;
pub mod qubit_spectrum;

pub use error::{Error, Result};
pub use params::{Cutoffs, EffectiveParams, SystemParams};
