//! Evaluation of `P` and `P̂`, degree bookkeeping, and the membership verdict.

mod certify;
mod evaluate;
mod krylov;

pub use evaluate::{
    eval_p, eval_phat, hatp_degree, homogeneity_check, joint_homogeneity_error, krylov_matrix,
    p_joint_degree, tuple_spectra, DegreeSelector, EvalOptions, Homogeneity, PEvaluation,
    PhatEvaluation, DENOM_MARGIN_MIN, KRYLOV_ZERO_RTOL,
};
pub use krylov::{build_krylov_matrix, build_krylov_matrix_with_diagonal, KrylovBasis, KrylovMatrix};
pub use certify::{
    certify_membership, normalized_residual, Certifier, CertifierConfig, ResidualEvaluation,
    Status, Verdict,
};
