//! Certifying whether a tuple of matrices admits invariant subspaces of
//! prescribed dimensions that fail to span, via the determinant of a Krylov
//! matrix on a tensor product of exterior powers.

pub mod acceptance;
pub mod certifier;
pub mod error;
pub mod generators;
pub mod multilinear;
pub mod numerics;
pub mod oracle;
pub mod spectral;
pub mod tuple;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use multilinear::{Partition, TensorBasis};
pub use numerics::LogComplex;
pub use spectral::SubPartition;
pub use tuple::{ComplexMatrix, MatrixTuple};
