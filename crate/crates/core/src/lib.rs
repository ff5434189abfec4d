//! Numerical search for vectors and bases mutually unbiased to a pair made of
//! the identity and a complex Hadamard matrix.
//!
//! The numerical core is generic over [`scalar::Real`]; the aliases below fix
//! it to `f64`, which is what the tolerances quoted in the docs assume.

pub mod analysis;
pub mod catalog;
pub mod error;
pub mod io;
pub mod linalg;
pub mod scalar;
pub mod solver;
pub mod sweep;

pub use error::{Error, Result};

/// Double precision complex scalar.
pub type ComplexScalar = scalar::Complex<f64>;
/// Double precision dense matrix.
pub type ComplexMatrix = linalg::Matrix<f64>;
/// Double precision unit vector.
pub type StateVector = linalg::StateVector<f64>;
/// Double precision orthonormal basis.
pub type OrthonormalBasis = linalg::OrthonormalBasis<f64>;
/// Double precision probability vector.
pub type ProbabilityDistribution = linalg::ProbabilityDistribution<f64>;
