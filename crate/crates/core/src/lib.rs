//! Optical, optomechanical and cavity-QED properties of one-dimensional
//! resonators built from thin lossless mirrors.
//!
//! The engine composes 2×2 transfer matrices, locates transmission
//! resonances as minima of `D(k) = |m22|²`, measures their linewidths, and
//! derives the dispersive optomechanical coupling `G` and the
//! Jaynes–Cummings couplings `g` of each gap. [`closed_form`] holds the
//! analytic two-, three- and four-mirror results the engine is checked
//! against.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod closed_form;
pub mod config;
pub mod couplings;
mod error;
pub mod job;
pub mod resonance;
pub mod scalar;
pub mod tmm;

pub use error::{Error, Result};
pub use resonance::{find_resonances, OverlapFlag, Resonance, SearchOptions};
pub use tmm::{CavityStack, Incidence, OpticalElement, TransferMatrix};
