use serde::{Deserialize, Serialize};

use super::krylov::{build_krylov_matrix_with_diagonal, KrylovBasis, KrylovMatrix};
use crate::error::{Error, Result};
use crate::multilinear::{
    binomial, binomial_signed, determinant_covector, kronecker_sum_diagonal_terms, kronecker_sum_operator,
    DEFAULT_SIZE_CAP,
};
use crate::numerics::{eigendecomposition, LogComplex, SpectralData};
use crate::spectral::{eval_denominator, Denominator};
use crate::tuple::MatrixTuple;

/// A charged factor smaller than this makes `P̂ = P / ∏ D^e` ill-posed.
pub const DENOM_MARGIN_MIN: f64 = -13.815510557964274; // ln(1e-6)

/// A Krylov step whose residual falls below this fraction of the operator
/// scale is an exact termination of the sequence in floating point.
pub const KRYLOV_ZERO_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalOptions {
    pub size_cap: usize,
    pub basis: KrylovBasis,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self {
            size_cap: DEFAULT_SIZE_CAP,
            basis: KrylovBasis::Orthogonal,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PEvaluation {
    pub value: LogComplex,
    /// Smallest Krylov step residual relative to the operator scale.
    pub min_step_ratio: f64,
    pub krylov: KrylovMatrix,
}

/// Builds `M` for the tuple.
pub fn krylov_matrix(t: &MatrixTuple, opts: &EvalOptions) -> Result<KrylovMatrix> {
    let a = kronecker_sum_operator(t, opts.size_cap)?;
    let w = determinant_covector(t.partition());
    let diagonal = match opts.basis {
        KrylovBasis::OrthogonalExtended => Some(kronecker_sum_diagonal_terms(t)),
        _ => None,
    };
    build_krylov_matrix_with_diagonal(&a, &w, opts.basis, diagonal.as_deref())
}

/// `P = det M`.
pub fn eval_p(t: &MatrixTuple, opts: &EvalOptions) -> Result<PEvaluation> {
    let krylov = krylov_matrix(t, opts)?;
    let mut value = krylov.determinant()?;
    let min_step_ratio = match opts.basis {
        KrylovBasis::Orthogonal | KrylovBasis::OrthogonalExtended => {
            krylov.step_ratios().into_iter().fold(f64::INFINITY, f64::min)
        }
        KrylovBasis::Power => f64::NAN,
    };
    if min_step_ratio < KRYLOV_ZERO_RTOL {
        value = LogComplex::ZERO;
    }
    Ok(PEvaluation {
        value,
        min_step_ratio,
        krylov,
    })
}

/// Eigendecomposition of every matrix of the tuple.
pub fn tuple_spectra(t: &MatrixTuple) -> Result<Vec<SpectralData>> {
    t.matrices().iter().map(eigendecomposition).collect()
}

pub(crate) fn eigenvalue_lists(spectra: &[SpectralData]) -> Vec<Vec<num_complex::Complex64>> {
    spectra.iter().map(|s| s.eigenvalues.clone()).collect()
}

#[derive(Debug, Clone)]
pub struct PhatEvaluation {
    pub value: LogComplex,
    pub p: PEvaluation,
    pub denominator: Denominator,
    /// Smallest `ln |factor|` among the charged factors.
    pub denom_margin: f64,
    /// The quotient is ill-posed here (a charged factor nearly vanishes).
    pub ill_conditioned: bool,
    pub spectra: Vec<SpectralData>,
}

/// `P̂ = P / ∏_{weight >= 2} D_{k'}^{exponent}`.
pub fn eval_phat(t: &MatrixTuple, opts: &EvalOptions) -> Result<PhatEvaluation> {
    let spectra = tuple_spectra(t)?;
    let p = eval_p(t, opts)?;
    let denominator = eval_denominator(&eigenvalue_lists(&spectra), t.partition());
    let denom_margin = denominator.min_factor_log_mag;
    let ill_conditioned = denominator.is_zero() || denom_margin < DENOM_MARGIN_MIN;
    let value = if denominator.is_zero() {
        LogComplex::ZERO
    } else {
        p.value / denominator.value
    };
    Ok(PhatEvaluation {
        value,
        p,
        denominator,
        denom_margin,
        ill_conditioned,
        spectra,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DegreeSelector {
    Matrix(usize),
    Total,
}

/// Degree of `P̂` in matrix `i`: `C(n,2) C(n-2,k_i-1) ∏_{j≠i} C(n,k_j)`, or
/// the sum over all matrices.
pub fn hatp_degree(p: &crate::multilinear::Partition, which: DegreeSelector) -> Result<u64> {
    let n = p.n();
    let per = |i: usize| -> u64 {
        let others: u64 = p
            .parts()
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, &k)| binomial(n, k))
            .product();
        binomial(n, 2) * binomial_signed(n as i64 - 2, p.parts()[i] as i64 - 1) * others
    };
    match which {
        DegreeSelector::Matrix(i) if i < p.len() => Ok(per(i)),
        DegreeSelector::Matrix(i) => Err(Error::InvalidIndex(format!(
            "matrix index {i} out of range 0..{}",
            p.len()
        ))),
        DegreeSelector::Total => Ok((0..p.len()).map(per).sum()),
    }
}

/// Joint degree of `P` in all matrices: `C(N, 2)`.
pub fn p_joint_degree(p: &crate::multilinear::Partition) -> u64 {
    binomial(p.tensor_dim(), 2)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum Homogeneity {
    Measured {
        error: f64,
        degree: u64,
        tolerance: f64,
        passed: bool,
    },
    Indeterminate {
        reason: String,
    },
}

impl Homogeneity {
    pub fn passed(&self) -> bool {
        matches!(self, Homogeneity::Measured { passed: true, .. })
    }
}

/// Compares `ln|P̂|` before and after `A_i ← c A_i` against `d_i ln c`.
pub fn homogeneity_check(t: &MatrixTuple, i: usize, c: f64, opts: &EvalOptions) -> Result<Homogeneity> {
    if i >= t.partition().len() {
        return Err(Error::InvalidIndex(format!("matrix index {i} out of range")));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::Shape(format!("scale factor must be positive, got {c}")));
    }
    let degree = hatp_degree(t.partition(), DegreeSelector::Matrix(i))?;
    let base = eval_phat(t, opts)?;
    let scaled = eval_phat(&t.with_scaled(i, num_complex::Complex64::new(c, 0.0)), opts)?;
    if base.ill_conditioned || scaled.ill_conditioned {
        return Ok(Homogeneity::Indeterminate {
            reason: "a charged spectral factor nearly vanishes".into(),
        });
    }
    if base.value.is_zero || scaled.value.is_zero {
        return Ok(Homogeneity::Indeterminate {
            reason: "P̂ vanishes at the tuple".into(),
        });
    }
    let error = (scaled.value.log_mag - base.value.log_mag - degree as f64 * c.ln()).abs();
    let tolerance = 1e-6 * (degree.max(1) as f64);
    Ok(Homogeneity::Measured {
        error,
        degree,
        tolerance,
        passed: error < tolerance,
    })
}

/// `|ln|P(c t)| - ln|P(t)| - C(N,2) ln c|` relative to `C(N,2) |ln c|`.
pub fn joint_homogeneity_error(t: &MatrixTuple, c: f64, opts: &EvalOptions) -> Result<f64> {
    let degree = p_joint_degree(t.partition()) as f64;
    let base = eval_p(t, opts)?;
    let scaled = eval_p(&t.scaled(num_complex::Complex64::new(c, 0.0)), opts)?;
    if base.value.is_zero || scaled.value.is_zero {
        return Err(Error::NumericalFailure("P vanishes at the tuple".into()));
    }
    let expected = degree * c.ln();
    let err = (scaled.value.log_mag - base.value.log_mag - expected).abs();
    Ok(err / expected.abs().max(f64::MIN_POSITIVE))
}
