//! Polar decompositions and λ-Aluthge transforms over finite direct sums of full
//! complex matrix blocks, together with the preserver maps that intertwine them and
//! seeded falsification suites for the identities they satisfy.

pub mod algebra;
pub mod aluthge;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod preservers;
pub mod sampling;

pub use algebra::{AlgElem, MatrixUnitSystem, VNAlgebra};
pub use aluthge::Lambda;
pub use error::{Error, Result};
pub use linalg::{CMatrix, PolarParts, TolerancePolicy, C64};
pub use preservers::{PreserverMap, ScalarMap, TrialReport};
