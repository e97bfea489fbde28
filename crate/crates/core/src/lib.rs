//! Matrix-level emulator for KvN-linearized electromagnetic fluid dynamics.
//!
//! Nonlinear, divergence-free polynomial ODE systems (discretized plasma-fluid
//! equations) are lifted to a Hermitian operator on a truncated bosonic Fock
//! space and evolved either by truncated Chebyshev polynomials (the QSVT
//! engine), by exact exponentiation, or integrated classically with RK4.

pub mod analysis;
pub mod block_encoding;
pub mod cases;
pub mod config;
pub mod engine;
pub mod error;
pub mod fock;
pub mod hamiltonian;
pub mod model;
pub mod qsvt;
pub mod solvers;
pub mod state;

pub use error::{Error, Result};
