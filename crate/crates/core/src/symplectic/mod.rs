//! Symplectic matrices, the basic normal-form blocks and the descriptor
//! that records a normal form by block counts and rotation numbers.

mod descriptor;
mod matrix;
mod rotation;
pub mod spectrum;

pub use descriptor::NormalFormDescriptor;
pub use matrix::{blocks, check_symplectic, classify_2x2, BlockClass, Matrix, SymplecticMatrix};
pub use rotation::{
    format_decimal, max_decimal_error, RotationNumber, DEFAULT_RESOLUTION_LIMIT,
};
pub use spectrum::descriptor_consistent;
