//! Exact index-iteration arithmetic for closed geodesics on spheres.
//!
//! The crate turns normal-form data of linearized Poincaré maps into iterated
//! Morse indices, and mechanically checks the arithmetic that links them to
//! the loop-space homology of `Sⁿ`: Betti ladders, Morse inequalities, the
//! mean index identity and common index jump certificates.

pub mod cli;
pub mod config;
pub mod error;
pub mod homology;
pub mod interval;
pub mod iteration;
pub mod jump;
pub mod morse;
pub mod symplectic;

pub use error::{Error, Result};
