//! Dense complex linear algebra: eigendecomposition, scale-safe
//! determinants, singular values and numerical rank.

mod eigen;
mod logcomplex;
mod lu;
mod svd;

pub use eigen::{eigendecomposition, eigenvalues, min_gap, SpectralData};
pub use logcomplex::{wrap_phase, LogComplex};
pub use lu::{lu_logdet, PIVOT_ZERO};
pub use svd::{numerical_rank, singular_values, smallest_singular_value};
pub(crate) use svd::rank_of_spectrum;
