//! Finite-dimensional laboratory for free unitary dilations of non-commuting
//! contraction semigroups.

pub mod dilation;
pub mod error;
pub mod evolution;
pub mod freeword;
pub mod matrix;
pub mod partition;
pub mod random;
pub mod semigroup;

pub use error::{Error, Result};
pub use matrix::{c64, LinearMap, Matrix, Spectrum, Vector, C64};
