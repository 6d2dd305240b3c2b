//! Matrix constructions and machine checks for the classical r-matrix
//! structure of the rational, hyperbolic and trigonometric Calogero-Moser
//! models on `gl_n`: the standard Lax matrix, the momentum-independent
//! dynamical r-matrices, the gauge transformations that remove their
//! coordinate dependence, the resulting constant r-matrices, and their
//! identification with the Cremmer-Gervais solution.
//!
//! All constructions are generic over the scalar field: IEEE complex doubles
//! for every model case, exact Gaussian rationals for the rational case.

pub mod constr;
pub mod dynr;
pub mod eig;
pub mod error;
pub mod expm;
pub mod gauge;
pub mod jsonio;
pub mod lax;
pub mod matrix;
pub mod potentials;
pub mod sampling;
pub mod scalar;
pub mod tensor;

pub use error::{CmrError, Result};
pub use matrix::{Root, SquareMatrix};
pub use potentials::{CaseKind, ModelCase};
pub use scalar::{C64, GaussRat, Scalar, ScalarMode};
pub use tensor::{kron, wedge, Slot3, Tensor2, Tensor3};
