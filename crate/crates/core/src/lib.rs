//! Numerical verification of identities on almost contact metric manifolds.
//!
//! Tensors are evaluated pointwise in a chart. Component functions are
//! evaluated on second-order jets, so connections, curvature and covariant
//! derivatives are exact up to floating point, with no finite differences.

pub mod geometry;
pub mod jet;
pub mod linalg;
pub mod octonion;
pub mod parallel;
pub mod perm;
pub mod report;
pub mod runner;
pub mod scalar;
pub mod tensor;
pub mod verifier;
pub mod zoo;

pub use jet::{Jet1, Jet2};
pub use perm::{GroupAlgebraElement, Permutation};
pub use scalar::{Differentiable, Scalar};
pub use tensor::PointTensor;
