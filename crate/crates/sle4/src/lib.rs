//! Monte Carlo toolkit for the natural length measure on SLE₄.
//!
//! The crate simulates chordal SLE₄ through exact vertical-slit Loewner
//! compositions, samples discrete Gaussian free fields spectrally, builds the
//! critical (γ = 2) LQG boundary length measure with its log-corrected
//! regularisation, and assembles the conformally covariant curve measure
//! obtained by averaging unzipped boundary lengths over the field. A CLI
//! harness (`sle4`) runs the statistical verification suites and writes
//! CSV/JSON artifacts.
//!
//! Module map:
//! - [`loewner`]: driving functions, slit-map compositions, traces, capacity.
//! - [`field`]: grid domains, zero/free-boundary GFF samplers, averages,
//!   Green's functions, quantum wedge fields.
//! - [`chaos`]: critical boundary measure, LQG coordinate change, conditioned
//!   drifted Brownian motion, wedge moment experiments.
//! - [`measure`]: field unzipping, curve measures, intensity/scaling/
//!   invariance statistics, Minkowski content estimation.
//! - [`harness`]: experiment configuration, suite orchestration, reporting.

pub mod chaos;
pub mod config;
pub mod error;
pub mod field;
pub mod harness;
pub mod loewner;
pub mod measure;
pub mod path;
pub mod report;
pub mod rng;
pub mod stats;

pub use error::SimError;
pub use path::SamplePath;

/// Convenience alias used throughout the numeric kernels.
pub type C64 = num_complex::Complex64;
