//! Discrete time-frequency analysis on the periodized unit interval.
//!
//! The crate provides sampled signals and kernels, oscillation and maximal
//! operators, the dyadic tile calculus (wave packets, density, size, trees),
//! averaged tile operators, and rotation-flow probes.

pub mod averaging;
pub mod ergodic;
pub mod error;
pub mod fourier;
pub mod io;
pub mod kernels;
pub mod numerics;
pub mod oscillation;
pub mod signal;
pub mod tiles;

#[cfg(test)]
mod properties;

pub use num_complex::Complex64 as C64;

pub use error::{Error, Result};
pub use kernels::{DecayReport, Kernel, KernelMeta};
pub use oscillation::{DensePartition, OscSpec};
pub use signal::{GridSpec, MeasurableSet, Signal};
pub use tiles::{DyadicInterval, Linearization, Polarity, SplitReport, Tile, Tree};
