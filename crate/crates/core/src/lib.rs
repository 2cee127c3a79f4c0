//! Physical-layer network coding over an IRS-assisted butterfly network.
//!
//! Two single-antenna sources transmit BPSK symbols simultaneously to a
//! two-antenna relay, partly through an intelligent reflecting surface (IRS)
//! with `M` passive phase-shifting elements. The relay applies a linear
//! receiver `G` that targets the sum/difference vector `D·x`, detects the XOR
//! of the two bits directly, and broadcasts it. Destination `D1` combines the
//! relayed XOR with the symbol it overhears from `S1` to recover `S2`'s bit.
//!
//! The crate is organised bottom-up:
//!
//! - [`model`]: system parameters, Rayleigh channel draws, forward propagation.
//! - [`numerics`]: Hermitian eigendecomposition, PSD projection, Q-function.
//! - [`beamform`]: MMSE relay receiver, exact MSE and its lifted quadratic form.
//! - [`irsopt`]: IRS phase design (ADMM inner SDP, rank-one penalised
//!   convex-concave loop, alternating optimisation with the beamformer).
//! - [`detect`]: XOR log-likelihood ratios, link detectors, NNC baseline.
//! - [`analysis`]: closed-form BERs and the per-realization BER pipeline.
//! - [`harness`]: seeded sweeps, curve files and run manifests.
//!
//! Runnable walkthroughs for each layer live in `examples/`.

pub mod analysis;
pub mod beamform;
pub mod detect;
pub mod error;
pub mod harness;
pub mod irsopt;
pub mod model;
pub mod numerics;

pub use error::{Error, Result};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
/// Dense complex matrix.
pub type CMatrix = nalgebra::DMatrix<C64>;
/// Dense complex column vector.
pub type CVector = nalgebra::DVector<C64>;
