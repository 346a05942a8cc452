use std::cmp::Ordering;

use nalgebra::linalg::Schur;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tuple::ComplexMatrix;

const SCHUR_MAX_ITER: usize = 10_000;

/// Eigenvalues (sorted by real part, then imaginary part), unit
/// eigenvectors as matching columns, and accuracy diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralData {
    pub eigenvalues: Vec<Complex64>,
    pub eigenvectors: ComplexMatrix,
    /// `min_{j != j'} |λ_j - λ_j'|`; infinite for a 1x1 matrix.
    pub min_gap: f64,
    /// `max_j ‖A v_j - λ_j v_j‖ / ‖A‖_F`.
    pub backward_error: f64,
}

impl SpectralData {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvector(&self, j: usize) -> nalgebra::DVector<Complex64> {
        self.eigenvectors.column(j).into_owned()
    }
}

pub(crate) fn cmp_complex(a: &Complex64, b: &Complex64) -> Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

fn schur(a: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix)> {
    if a.nrows() != a.ncols() {
        return Err(Error::Shape(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    Schur::try_new(a.clone(), f64::EPSILON, SCHUR_MAX_ITER)
        .map(Schur::unpack)
        .ok_or_else(|| Error::NumericalFailure("Schur iteration did not converge".into()))
}

/// Eigenvalues only, in the deterministic order.
pub fn eigenvalues(a: &ComplexMatrix) -> Result<Vec<Complex64>> {
    if a.nrows() == 0 {
        return Ok(Vec::new());
    }
    let (_, t) = schur(a)?;
    let mut vals: Vec<Complex64> = (0..t.nrows()).map(|i| t[(i, i)]).collect();
    vals.sort_by(cmp_complex);
    Ok(vals)
}

/// Complex Schur form followed by back-substitution for the eigenvectors of
/// the triangular factor.
pub fn eigendecomposition(a: &ComplexMatrix) -> Result<SpectralData> {
    let n = a.nrows();
    let (q, t) = schur(a)?;
    let norm_a = a.norm();
    let small = f64::EPSILON * norm_a.max(f64::MIN_POSITIVE);

    let mut pairs: Vec<(Complex64, nalgebra::DVector<Complex64>)> = Vec::with_capacity(n);
    for j in 0..n {
        let lambda = t[(j, j)];
        let mut y = nalgebra::DVector::<Complex64>::zeros(n);
        y[j] = Complex64::new(1.0, 0.0);
        for i in (0..j).rev() {
            let mut s = Complex64::new(0.0, 0.0);
            for m in i + 1..=j {
                s += t[(i, m)] * y[m];
            }
            let mut denom = t[(i, i)] - lambda;
            if denom.norm() < small {
                denom = Complex64::new(small, 0.0);
            }
            y[i] = -s / denom;
        }
        let mut v = &q * y;
        let norm = v.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::NumericalFailure(format!(
                "eigenvector {j} could not be normalized"
            )));
        }
        v.unscale_mut(norm);
        pairs.push((lambda, v));
    }
    pairs.sort_by(|a, b| cmp_complex(&a.0, &b.0));

    let eigenvalues: Vec<Complex64> = pairs.iter().map(|p| p.0).collect();
    let mut eigenvectors = ComplexMatrix::zeros(n, n);
    for (j, (_, v)) in pairs.iter().enumerate() {
        eigenvectors.set_column(j, v);
    }
    let mut backward_error: f64 = 0.0;
    if norm_a > 0.0 {
        for (lambda, v) in &pairs {
            let r = a * v - v * *lambda;
            backward_error = backward_error.max(r.norm() / norm_a);
        }
    }
    Ok(SpectralData {
        min_gap: min_gap(&eigenvalues),
        eigenvalues,
        eigenvectors,
        backward_error,
    })
}

/// Smallest pairwise distance in a list of complex numbers.
pub fn min_gap(values: &[Complex64]) -> f64 {
    let mut gap = f64::INFINITY;
    for i in 0..values.len() {
        for j in i + 1..values.len() {
            gap = gap.min((values[i] - values[j]).norm());
        }
    }
    gap
}
