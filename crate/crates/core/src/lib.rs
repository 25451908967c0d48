//! Monte Carlo simulation of information-theoretic erasure in physical
//! memory cells: a Johnson-noise capacitor bit, a double-well bit, the
//! binary-channel information measures used to grade erasure, and the
//! classical dissipation bounds they are compared against.

pub mod bounds;
pub mod capacitor;
pub mod cli;
pub mod config;
pub mod doublewell;
pub mod ensemble;
pub mod error;
pub mod experiments;
pub mod info;
pub mod output;
pub mod rng;
pub mod sde;
pub mod stats;
pub mod verify;

pub use error::{Error, Result};
