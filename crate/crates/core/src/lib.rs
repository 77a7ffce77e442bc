//! Quantum discord of two-qubit states and the discording power of
//! two-qubit gates.

pub mod discord;
pub mod error;
pub mod gates;
pub mod linalg;
pub mod mdms;
pub mod optimize;
pub mod power;
pub mod states;
pub mod verify;

pub use error::{Error, Result};
