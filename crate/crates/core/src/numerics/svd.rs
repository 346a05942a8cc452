use nalgebra::linalg::SVD;

use crate::error::{Error, Result};
use crate::tuple::ComplexMatrix;

const SVD_MAX_ITER: usize = 10_000;

/// Singular values in decreasing order (length `min(rows, cols)`).
pub fn singular_values(m: &ComplexMatrix) -> Result<Vec<f64>> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Ok(Vec::new());
    }
    let svd = SVD::try_new(m.clone(), false, false, f64::EPSILON, SVD_MAX_ITER)
        .ok_or_else(|| Error::NumericalFailure("SVD iteration did not converge".into()))?;
    let mut s: Vec<f64> = svd.singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    Ok(s)
}

pub fn smallest_singular_value(m: &ComplexMatrix) -> Result<f64> {
    Ok(singular_values(m)?.last().copied().unwrap_or(0.0))
}

/// Number of singular values above `tol * σ_max`.
pub fn numerical_rank(m: &ComplexMatrix, tol: f64) -> Result<usize> {
    let s = singular_values(m)?;
    Ok(rank_of_spectrum(&s, tol))
}

pub(crate) fn rank_of_spectrum(s: &[f64], tol: f64) -> usize {
    let max = s.iter().copied().fold(0.0, f64::max);
    if max == 0.0 {
        return 0;
    }
    s.iter().filter(|&&x| x > tol * max).count()
}
