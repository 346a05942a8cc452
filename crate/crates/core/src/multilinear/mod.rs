//! Wedge and tensor bases, the induced operator on `⊗ Λ^{k_i} C^n`, and the
//! determinant covector.

mod basis;
mod covector;
mod operator;

pub use basis::{
    binomial, enumerate_wedge_basis, flat_index, multinomial, unflat_index, Partition,
    TensorBasis,
};
pub(crate) use basis::{binomial_signed, k_subsets, mask_of};
pub use covector::{determinant_covector, pair_with_decomposable, wedge_coordinates, Covector};
pub use operator::{
    kronecker_sum_diagonal_terms, kronecker_sum_operator, wedge_derivation, DEFAULT_SIZE_CAP,
};
