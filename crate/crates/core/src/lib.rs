//! Nonlocal-in-time diffusion with a finite memory horizon: kernels, the
//! discrete memory operator, scalar and field solvers, free-space Laplace
//! inversion and a trapping random walk.

// `!(x > 0.0)` is used throughout to reject NaN along with the bound
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod field_solver;
pub mod freespace;
pub mod kernel;
pub mod memory_op;
pub mod quadrature;
pub mod scalar_msd;
pub mod special;
pub mod walker;

pub use error::{Error, Result};
pub use kernel::{KernelFamily, KernelSpec};
pub use memory_op::{build_weights, c_coefficient, HistoryRing, MemoryWeights};
