//! Crosstalk attack simulation for trapped-ion quantum adders.
//!
//! The crate builds attack circuits and victim adders (ripple-carry full
//! adders and residue-number-system modulo adders), places them together on
//! a modeled 20-qubit ion chain, runs Monte-Carlo noise trajectories with a
//! parametric crosstalk channel, and reports output probability, attack
//! effectiveness and parallel-vs-monolithic improvement.
//!
//! Simulation code is generic over the amplitude scalar (`f32`/`f64`); the
//! aliases below fix it to `f64`, which is what the harness uses.

pub mod adders;
pub mod attacks;
pub mod bench;
pub mod cli;
pub mod error;
pub mod noise;
pub mod rns;
pub mod scalar;
pub mod simcore;
pub mod tenancy;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type PureState = simcore::StateVector<f64>;
pub type PureState32 = simcore::StateVector<f32>;
pub type SparseState = simcore::SparseState<f64>;
