//! The universal input: `l` complex `n x n` matrices with a partition of `n`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::multilinear::Partition;

/// Dense complex matrix used throughout.
pub type ComplexMatrix = DMatrix<Complex64>;

#[derive(Debug, Clone, PartialEq)]
pub struct MatrixTuple {
    partition: Partition,
    matrices: Vec<ComplexMatrix>,
}

impl MatrixTuple {
    pub fn new(partition: Partition, matrices: Vec<ComplexMatrix>) -> Result<Self> {
        let n = partition.n();
        if matrices.len() != partition.len() {
            return Err(Error::Shape(format!(
                "partition has {} parts but {} matrices were given",
                partition.len(),
                matrices.len()
            )));
        }
        for (i, m) in matrices.iter().enumerate() {
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::Shape(format!(
                    "matrix {i} is {}x{}, expected {n}x{n}",
                    m.nrows(),
                    m.ncols()
                )));
            }
            if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::Shape(format!("matrix {i} has non-finite entries")));
            }
        }
        Ok(Self {
            partition,
            matrices,
        })
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn matrices(&self) -> &[ComplexMatrix] {
        &self.matrices
    }

    pub fn n(&self) -> usize {
        self.partition.n()
    }

    pub fn into_matrices(self) -> Vec<ComplexMatrix> {
        self.matrices
    }

    /// Each matrix rescaled to unit Frobenius norm (zero matrices are kept).
    pub fn normalized(&self) -> Self {
        let matrices = self
            .matrices
            .iter()
            .map(|m| {
                let norm = m.norm();
                if norm > 0.0 {
                    m.unscale(norm)
                } else {
                    m.clone()
                }
            })
            .collect();
        Self {
            partition: self.partition.clone(),
            matrices,
        }
    }

    /// Copy with matrix `i` multiplied by `c`.
    pub fn with_scaled(&self, i: usize, c: Complex64) -> Self {
        let mut out = self.clone();
        out.matrices[i] *= c;
        out
    }

    /// Copy with every matrix multiplied by `c`.
    pub fn scaled(&self, c: Complex64) -> Self {
        let mut out = self.clone();
        for m in &mut out.matrices {
            *m *= c;
        }
        out
    }

    /// Simultaneous similarity `A_i -> S A_i S^{-1}`.
    pub fn conjugated(&self, s: &ComplexMatrix) -> Result<Self> {
        let inv = s
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::NumericalFailure("similarity is singular".into()))?;
        let matrices = self.matrices.iter().map(|a| s * a * &inv).collect();
        Self::new(self.partition.clone(), matrices)
    }
}
