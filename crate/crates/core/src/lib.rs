//! Exact sampling models and suppression-law certification kernels for
//! multimode interferometers.
//!
//! The crate simulates `n` particles scattered through an `m`-mode unitary
//! under four models — uniform, classical (distinguishable), mean-field
//! (random-phase macroscopic superposition) and bosonic (permanent-weighted) —
//! plus a misaligned variant in which one particle is distinguishable from the
//! rest. On top of the samplers it provides the Fourier-matrix suppression-law
//! certificate: forbidden-event tests, violation ratios with false-accept
//! confidence, coarse-grained witnesses (coincidence probability, clouding,
//! mean occupations) and first-order estimates of how partial
//! distinguishability and matrix inaccuracy degrade the certificate.
//!
//! The crate is `no_std` (it only needs `alloc`); all file formats and the
//! command-line driver live in the companion `bosim-cli` crate.
//!
//! Mode indices are 1-based throughout the public API, matching the usual
//! interferometer-port convention; conversion to storage offsets happens at
//! the accessor boundary only. Every sampler is a pure function of its
//! arguments and a 64-bit seed: shot `i` consumes the counter-based stream
//! `(seed, i)`, so batches are reproducible independent of execution order.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod certify;
pub mod error;
pub mod events;
mod fp;
pub mod linalg;
pub mod permanent;
pub mod rng;
pub mod samplers;

pub use error::{Error, Result};
pub use events::{InputConfig, Mode, OccupationEvent};
pub use linalg::{MatrixLabel, ModeUnitary, PerturbationField};
pub use samplers::{Model, SampleBatch};
