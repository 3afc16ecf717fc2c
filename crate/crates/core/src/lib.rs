//! Conditional entropies with quantum memory, measurement overlaps and
//! discretized position/momentum statistics.
//!
//! The crate is organized bottom-up:
//!
//! - [`qstate`]: density matrices, cq states, POVMs, grid wavefunctions
//! - [`entropy`]: von Neumann, relative, max-relative and differential entropies
//! - [`minmax`]: conditional min-/max-entropy via a certified ADMM solver
//! - [`discretize`]: interval partitions, FFT momentum transform, convergence ladders
//! - [`overlap`]: position–momentum overlap `c(δq, δp)` via a Nyström eigensolve
//! - [`gaussian`]: EPR covariance matrices and the von Neumann saturation gap
//! - [`verify`]: seeded checkers for the uncertainty relations and lemmas
//! - [`io`]: JSON state files

pub mod error;
pub mod linalg;
pub mod qstate;
pub mod entropy;
pub mod minmax;
pub mod discretize;
pub mod overlap;
pub mod gaussian;
pub mod par;
pub mod verify;
pub mod io;

pub use error::{Error, Result};
