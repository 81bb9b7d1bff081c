//! Analytic functional calculus `f(X)` for non-Hermitian matrices, directional
//! Fréchet derivatives `D^m f(A; B)`, and executable checks of the operator
//! k-tone inequalities relating them.
//!
//! Every numerical routine is generic over [`Real`] (`f32` or `f64`). The
//! aliases below fix `f64`, which is what the verification tolerances assume.

pub mod error;
pub mod frechet;
pub mod funcalc;
pub mod matcore;
pub mod repfun;
pub mod sampler;
pub mod scalar;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::Real;

pub type ComplexMatrix = matcore::Matrix<f64>;
pub type HermitianMatrix = matcore::Hermitian<f64>;
pub type Spectrum = matcore::Spectrum<f64>;

pub type ComplexMatrix32 = matcore::Matrix<f32>;
pub type HermitianMatrix32 = matcore::Hermitian<f32>;
pub type Contour = funcalc::Contour;
pub type CalcResult = funcalc::CalcResult<f64>;
pub type DerivativeTensor = frechet::DerivativeTensor<f64>;
pub type TaylorSums = frechet::TaylorSums<f64>;
