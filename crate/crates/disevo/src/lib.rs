//! Canonical formalism for variational discrete systems with quadratic
//! per-step action contributions: discrete Legendre transforms, pre-/post-
//! constraint extraction, global and local evolution moves, effective actions
//! via bulk elimination, and Dirac-style constraint classification with
//! degree-of-freedom counting.

pub mod scalar;
pub mod linalg;
pub mod action;
pub mod legendre;
pub mod evolution;
pub mod local_moves;
pub mod analysis;
pub mod models;
pub mod verify;
pub mod cli;

pub use scalar::{Rat, Scalar};
