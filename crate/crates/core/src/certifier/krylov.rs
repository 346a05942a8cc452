//! Krylov matrices `M = (w; wA; ..; wA^{N-1})` in scale-safe form.
//!
//! Rows are never stored at their true size: `row r` of the stored matrix
//! carries a log scale `γ_r` and `det M = e^{Σγ_r} · det(stored)`.
//!
//! * [`KrylovBasis::Power`] stores `w A^r` renormalized to unit length, so
//!   true row `r` is exactly `e^{γ_r}` times stored row `r`.
//! * [`KrylovBasis::Orthogonal`] runs Arnoldi with full
//!   reorthogonalization. Stored rows are orthonormal and `e^{γ_r}` is the
//!   norm of the component of `w A^r` orthogonal to the previous rows, so
//!   the scaled stored matrix differs from `M` by a unit lower-triangular
//!   factor: same determinant, same rank, and none of the power basis's
//!   exponential ill-conditioning. The rank is the grade of `w`, read off
//!   as the first step whose residual is negligible next to `‖A‖`.

use std::ops::Neg;

use num_complex::{Complex, Complex64};
use num_traits::Num;
use twofloat::TwoFloat;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multilinear::Covector;
use crate::numerics::{lu_logdet, singular_values, LogComplex};
use crate::tuple::ComplexMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KrylovBasis {
    Power,
    #[default]
    Orthogonal,
    /// Arnoldi in double-double arithmetic. Rounding errors that leak into
    /// a missing eigendirection are amplified along the recurrence, so this
    /// resolves `det M = 0` far more sharply at large `N`.
    OrthogonalExtended,
}

#[derive(Debug, Clone)]
pub struct KrylovMatrix {
    pub basis: KrylovBasis,
    /// Stored rows, each of unit length (or zero after an exact breakdown).
    pub rows: ComplexMatrix,
    /// `γ_r`; `-inf` once the Krylov sequence has terminated exactly.
    pub log_scales: Vec<f64>,
    /// `sqrt(‖A‖_1 ‖A‖_∞)`, an upper bound on `‖A‖_2`.
    pub operator_norm: f64,
}

impl KrylovMatrix {
    pub fn dim(&self) -> usize {
        self.log_scales.len()
    }

    /// `det M` as a [`LogComplex`].
    pub fn determinant(&self) -> Result<LogComplex> {
        if self.log_scales.iter().any(|g| *g == f64::NEG_INFINITY) {
            return Ok(LogComplex::ZERO);
        }
        let shift: f64 = self.log_scales.iter().sum();
        Ok(lu_logdet(&self.rows)?.scale_ln(shift))
    }

    /// Stored rows multiplied back by `e^{γ_r - max γ}`.
    pub fn rescaled(&self) -> ComplexMatrix {
        let top = self
            .log_scales
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        let mut m = self.rows.clone();
        for (r, g) in self.log_scales.iter().enumerate() {
            let f = (g - top).exp();
            m.row_mut(r).scale_mut(f);
        }
        m
    }

    /// Numerical rank of `M`.
    ///
    /// Orthogonal basis: the Krylov grade, i.e. one plus the number of
    /// leading steps whose relative residual stays at or above `tol`.
    /// Power basis: singular values of [`Self::rescaled`] above
    /// `tol · σ_max` (unreliable beyond small `N`).
    pub fn numerical_rank(&self, tol: f64) -> Result<usize> {
        match self.basis {
            KrylovBasis::Orthogonal | KrylovBasis::OrthogonalExtended => {
                if self.log_scales.first().is_none_or(|g| *g == f64::NEG_INFINITY) {
                    return Ok(0);
                }
                let steps = self.step_ratios();
                Ok(1 + steps.iter().take_while(|h| **h >= tol).count())
            }
            KrylovBasis::Power => {
                let s = singular_values(&self.rescaled())?;
                Ok(crate::numerics::rank_of_spectrum(&s, tol))
            }
        }
    }

    /// Arnoldi residuals relative to the operator norm,
    /// `e^{γ_r - γ_{r-1}} / ‖A‖`. Only meaningful for the orthogonal basis.
    pub fn step_ratios(&self) -> Vec<f64> {
        let scale = if self.operator_norm > 0.0 { self.operator_norm } else { 1.0 };
        self.log_scales
            .windows(2)
            .map(|w| (w[1] - w[0]).exp() / scale)
            .collect()
    }
}

/// `v ↦ v A` for a row vector `v`.
fn row_times(v: &[Complex64], a: &ComplexMatrix) -> Vec<Complex64> {
    let n = a.ncols();
    (0..n)
        .map(|m| {
            let col = a.column(m);
            v.iter().zip(col.iter()).map(|(x, y)| x * y).sum()
        })
        .collect()
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn build_krylov_matrix(
    a: &ComplexMatrix,
    w: &Covector,
    basis: KrylovBasis,
) -> Result<KrylovMatrix> {
    build_krylov_matrix_with_diagonal(a, w, basis, None)
}

/// Like [`build_krylov_matrix`], but the extended basis re-sums the diagonal
/// of `A` from `diagonal_terms` in its own precision. Rounding of those sums
/// in `f64` breaks the Kronecker structure and dominates `P` near its zeros.
pub fn build_krylov_matrix_with_diagonal(
    a: &ComplexMatrix,
    w: &Covector,
    basis: KrylovBasis,
    diagonal_terms: Option<&[Vec<Complex64>]>,
) -> Result<KrylovMatrix> {
    let n = a.nrows();
    if diagonal_terms.is_some_and(|d| d.len() != n) {
        return Err(Error::Shape(format!("expected {n} diagonal entries")));
    }
    if a.ncols() != n || w.len() != n {
        return Err(Error::Shape(format!(
            "operator is {}x{}, covector has length {}",
            a.nrows(),
            a.ncols(),
            w.len()
        )));
    }
    let mut k = match basis {
        KrylovBasis::Power => power_rows(a, w),
        KrylovBasis::Orthogonal => arnoldi_rows::<f64>(a, None, w, basis),
        KrylovBasis::OrthogonalExtended => arnoldi_rows::<TwoFloat>(a, diagonal_terms, w, basis),
    };
    k.operator_norm = operator_norm_bound(a);
    Ok(k)
}

fn operator_norm_bound(a: &ComplexMatrix) -> f64 {
    let col_max = a
        .column_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let row_max = a
        .row_iter()
        .map(|r| r.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    (col_max * row_max).sqrt()
}

fn power_rows(a: &ComplexMatrix, w: &Covector) -> KrylovMatrix {
    let n = a.nrows();
    let mut rows = ComplexMatrix::zeros(n, n);
    let mut log_scales = vec![f64::NEG_INFINITY; n];
    let mut cur: Vec<Complex64> = w.entries().to_vec();
    let mut gamma = 0.0;
    for r in 0..n {
        if r > 0 {
            cur = row_times(&cur, a);
        }
        let nu = norm(&cur);
        if nu == 0.0 || !nu.is_finite() {
            break;
        }
        gamma += nu.ln();
        for z in &mut cur {
            *z /= nu;
        }
        for (j, z) in cur.iter().enumerate() {
            rows[(r, j)] = *z;
        }
        log_scales[r] = gamma;
    }
    KrylovMatrix {
        basis: KrylovBasis::Power,
        rows,
        log_scales,
        operator_norm: 0.0,
    }
}

/// Real scalar of the Arnoldi recurrence: `f64`, or double-double for the
/// extended basis.
trait Real: Copy + Num + Neg<Output = Self> + PartialOrd {
    fn of(x: f64) -> Self;
    fn approx(self) -> f64;
    fn root(self) -> Self;
}

impl Real for f64 {
    fn of(x: f64) -> Self {
        x
    }
    fn approx(self) -> f64 {
        self
    }
    fn root(self) -> Self {
        self.sqrt()
    }
}

impl Real for TwoFloat {
    fn of(x: f64) -> Self {
        TwoFloat::from(x)
    }
    fn approx(self) -> f64 {
        self.hi() + self.lo()
    }
    fn root(self) -> Self {
        self.sqrt()
    }
}

/// Nonzeros of `A` by column, so `v A` costs one pass over them.
struct SparseColumns<T> {
    cols: Vec<Vec<(usize, Complex<T>)>>,
}

fn lift<T: Real>(z: &Complex64) -> Complex<T> {
    Complex::new(T::of(z.re), T::of(z.im))
}

impl<T: Real> SparseColumns<T> {
    fn new(a: &ComplexMatrix, diagonal_terms: Option<&[Vec<Complex64>]>) -> Self {
        let zero = Complex::new(T::zero(), T::zero());
        let cols = (0..a.ncols())
            .map(|m| {
                let mut col: Vec<(usize, Complex<T>)> = a
                    .column(m)
                    .iter()
                    .enumerate()
                    .filter(|(i, z)| (z.re != 0.0 || z.im != 0.0) && !(diagonal_terms.is_some() && *i == m))
                    .map(|(i, z)| (i, lift(z)))
                    .collect();
                if let Some(terms) = diagonal_terms {
                    let d = terms[m].iter().fold(zero, |acc, z| acc + lift::<T>(z));
                    col.push((m, d));
                }
                col
            })
            .collect();
        Self { cols }
    }

    fn row_times(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        self.cols
            .iter()
            .map(|col| {
                col.iter()
                    .fold(Complex::new(T::zero(), T::zero()), |acc, (i, a)| acc + v[*i] * *a)
            })
            .collect()
    }
}

fn norm_of<T: Real>(v: &[Complex<T>]) -> T {
    v.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).root()
}

/// Removes from `v` its components along the rows in `q`, two classical
/// Gram-Schmidt passes.
fn orthogonalize<T: Real>(v: &mut [Complex<T>], q: &[Vec<Complex<T>>]) {
    let zero = Complex::new(T::zero(), T::zero());
    for _ in 0..2 {
        let coeffs: Vec<Complex<T>> = q
            .iter()
            .map(|qr| qr.iter().zip(v.iter()).fold(zero, |acc, (a, b)| acc + a.conj() * *b))
            .collect();
        for (qr, c) in q.iter().zip(coeffs) {
            for (x, y) in v.iter_mut().zip(qr) {
                *x = *x - c * *y;
            }
        }
    }
}

fn scale_down<T: Real>(v: &mut [Complex<T>], h: T) {
    let inv = T::one() / h;
    for z in v {
        *z = Complex::new(z.re * inv, z.im * inv);
    }
}

fn arnoldi_rows<T: Real>(
    a: &ComplexMatrix,
    diagonal_terms: Option<&[Vec<Complex64>]>,
    w: &Covector,
    basis: KrylovBasis,
) -> KrylovMatrix {
    let n = a.nrows();
    let op = SparseColumns::<T>::new(a, diagonal_terms);
    let mut q: Vec<Vec<Complex<T>>> = Vec::with_capacity(n);
    let mut log_scales = vec![f64::NEG_INFINITY; n];
    let mut start: Vec<Complex<T>> = w
        .entries()
        .iter()
        .map(|z| Complex::new(T::of(z.re), T::of(z.im)))
        .collect();
    let w0 = norm_of(&start);
    if w0 > T::zero() {
        scale_down(&mut start, w0);
        q.push(start);
        log_scales[0] = w0.approx().ln();
    }
    for r in 1..n {
        if q.len() < r {
            break;
        }
        let mut v = op.row_times(&q[r - 1]);
        orthogonalize(&mut v, &q);
        let h = norm_of(&v);
        let hf = h.approx();
        if hf == 0.0 || !hf.is_finite() {
            break;
        }
        scale_down(&mut v, h);
        log_scales[r] = log_scales[r - 1] + hf.ln();
        q.push(v);
    }
    // After an exact breakdown the remaining rows only complete the basis;
    // their scales stay at -inf.
    let mut e = 0;
    while q.len() < n && e < n {
        let mut v = vec![Complex::new(T::zero(), T::zero()); n];
        v[e] = Complex::new(T::one(), T::zero());
        orthogonalize(&mut v, &q);
        let h = norm_of(&v);
        if h.approx() > 1e-8 {
            scale_down(&mut v, h);
            q.push(v);
        }
        e += 1;
    }
    let rows = ComplexMatrix::from_fn(n, n, |i, j| Complex64::new(q[i][j].re.approx(), q[i][j].im.approx()));
    KrylovMatrix {
        basis,
        rows,
        log_scales,
        operator_norm: 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multilinear::{determinant_covector, kronecker_sum_operator, Partition};
    use crate::tuple::MatrixTuple;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn diag(values: &[f64]) -> ComplexMatrix {
        ComplexMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            values.len(),
            values.iter().map(|&v| c(v)),
        ))
    }

    #[test]
    fn identity_power_rows_repeat_w() {
        let p = Partition::new(3, vec![1, 2]).unwrap();
        let w = determinant_covector(&p);
        let k = build_krylov_matrix(&ComplexMatrix::identity(9, 9), &w, KrylovBasis::Power).unwrap();
        let unit: Vec<Complex64> = w.entries().iter().map(|z| z / w.norm()).collect();
        for r in 0..9 {
            for j in 0..9 {
                assert!((k.rows[(r, j)] - unit[j]).norm() < 1e-15);
            }
            assert!((k.log_scales[r] - w.norm().ln()).abs() < 1e-14);
        }
        assert!(k.determinant().unwrap().is_zero);
    }

    #[test]
    fn first_row_is_w_in_both_bases() {
        let p = Partition::new(2, vec![1, 1]).unwrap();
        let w = determinant_covector(&p);
        let a = ComplexMatrix::from_fn(4, 4, |i, j| Complex64::new((i + 2 * j) as f64, 0.5));
        for basis in [KrylovBasis::Power, KrylovBasis::Orthogonal] {
            let k = build_krylov_matrix(&a, &w, basis).unwrap();
            for j in 0..4 {
                let expect = w.entries()[j] / w.norm();
                assert!((k.rows[(0, j)] - expect).norm() < 1e-15);
            }
        }
    }

    /// With diagonal factors, `M` is `diag(w)`-weighted Vandermonde in the
    /// sum eigenvalues restricted to the support of `w`.
    #[test]
    fn diagonal_pair_matches_vandermonde() {
        let p = Partition::new(2, vec![1, 1]).unwrap();
        let t = MatrixTuple::new(p.clone(), vec![diag(&[1.0, 2.0]), diag(&[3.0, 5.0])]).unwrap();
        let a = kronecker_sum_operator(&t, 4096).unwrap();
        let w = determinant_covector(&p);
        let mu: [f64; 4] = [4.0, 6.0, 5.0, 7.0];
        let explicit = ComplexMatrix::from_fn(4, 4, |r, s| w.entries()[s] * c(mu[s].powi(r as i32)));
        // Columns 0 and 3 of w vanish, so M is singular.
        assert_eq!(explicit.column(0).norm(), 0.0);
        for basis in [KrylovBasis::Power, KrylovBasis::Orthogonal] {
            let k = build_krylov_matrix(&a, &w, basis).unwrap();
            let d = k.determinant().unwrap();
            assert!(d.is_zero || d.log_mag < -25.0, "{basis:?} {d:?}");
        }
        // Power rows reproduce the explicit rows up to their scales.
        let k = build_krylov_matrix(&a, &w, KrylovBasis::Power).unwrap();
        for r in 0..4 {
            let f = k.log_scales[r].exp();
            for s in 0..4 {
                assert!((k.rows[(r, s)] * f - explicit[(r, s)]).norm() < 1e-12 * (1.0 + explicit[(r, s)].norm()));
            }
        }
    }

    #[test]
    fn bases_agree_on_determinant() {
        let p = Partition::new(3, vec![1, 2]).unwrap();
        let a1 = ComplexMatrix::from_fn(3, 3, |i, j| Complex64::new(((i * 5 + j * 2) % 7) as f64 / 7.0 - 0.4, (i as f64 - j as f64) * 0.3));
        let a2 = ComplexMatrix::from_fn(3, 3, |i, j| Complex64::new(((i + 4 * j) % 5) as f64 / 5.0 - 0.5, ((i * j) % 3) as f64 * 0.2));
        let t = MatrixTuple::new(p.clone(), vec![a1, a2]).unwrap();
        let a = kronecker_sum_operator(&t, 4096).unwrap();
        let w = determinant_covector(&p);
        let dp = build_krylov_matrix(&a, &w, KrylovBasis::Power).unwrap().determinant().unwrap();
        let dq = build_krylov_matrix(&a, &w, KrylovBasis::Orthogonal).unwrap().determinant().unwrap();
        assert!(dp.relative_distance(dq) < 1e-8, "{dp} vs {dq}");
    }

    #[test]
    fn orthogonal_rows_are_orthonormal() {
        let n = 16;
        let a = ComplexMatrix::from_fn(n, n, |i, j| Complex64::new(((i * 7 + j * 11) % 13) as f64 - 6.0, ((i + j) % 5) as f64 - 2.0));
        let w = Covector::new((0..n).map(|i| Complex64::new(1.0, i as f64 * 0.1)).collect());
        let k = build_krylov_matrix(&a, &w, KrylovBasis::Orthogonal).unwrap();
        let gram = &k.rows * k.rows.adjoint();
        assert!((gram - ComplexMatrix::identity(n, n)).norm() < 1e-12);
        assert_eq!(k.numerical_rank(1e-30).unwrap(), n);
    }
}
