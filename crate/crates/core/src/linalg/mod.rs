//! Dense complex matrices and the matrix-analytic primitives the rest of the crate uses.

mod eig;
mod matrix;
mod svd;

pub use eig::{herm_eig, psd_power, range_projection, HermEig};
pub use matrix::{inner, vec_norm, CMatrix, TolerancePolicy, C64, I, ONE, ZERO};
pub use svd::{polar_decompose, svd, PolarParts, Svd};

