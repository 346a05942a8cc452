use num_complex::Complex64;

use super::logcomplex::LogComplex;
use crate::error::{Error, Result};
use crate::tuple::ComplexMatrix;

/// Pivots below this magnitude mark the determinant as exactly zero.
pub const PIVOT_ZERO: f64 = 1e-300;

/// `det m` as a [`LogComplex`], via LU with partial pivoting.
pub fn lu_logdet(m: &ComplexMatrix) -> Result<LogComplex> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::Shape(format!(
            "determinant needs a square matrix, got {}x{}",
            n,
            m.ncols()
        )));
    }
    // Row-major scratch copy keeps the elimination loops contiguous.
    let mut a: Vec<Complex64> = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            a.push(m[(i, j)]);
        }
    }
    let mut log_mag = 0.0;
    let mut phase = 0.0;
    let mut swaps = 0usize;
    for k in 0..n {
        let (p, pmag) = (k..n)
            .map(|i| (i, a[i * n + k].norm()))
            .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if !(pmag >= PIVOT_ZERO) {
            return Ok(LogComplex::ZERO);
        }
        if p != k {
            for j in 0..n {
                a.swap(k * n + j, p * n + j);
            }
            swaps += 1;
        }
        let pivot = a[k * n + k];
        log_mag += pmag.ln();
        phase += pivot.arg();
        let inv = Complex64::new(1.0, 0.0) / pivot;
        let (upper, lower) = a.split_at_mut((k + 1) * n);
        let pivot_row = &upper[k * n..(k + 1) * n];
        for row in lower.chunks_exact_mut(n) {
            let f = row[k] * inv;
            if f == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in k + 1..n {
                row[j] -= f * pivot_row[j];
            }
        }
    }
    if swaps % 2 == 1 {
        phase += std::f64::consts::PI;
    }
    Ok(LogComplex::new(log_mag, phase))
}
