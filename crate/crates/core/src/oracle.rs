//! Brute-force detection of a common hyperplane.
//!
//! For diagonalizable matrices the `k_i`-dimensional invariant subspaces are
//! spans of `k_i` eigenvectors. A tuple lies on the variety iff, for some
//! choice of such subspaces, the stacked `n x n` matrix of eigenvectors is
//! singular, i.e. the subspaces fail to span `C^n` directly.

use serde::{Deserialize, Serialize};

use crate::certifier::{Status, Verdict};
use crate::error::{Error, Result};
use crate::multilinear::k_subsets;
use crate::numerics::{eigendecomposition, smallest_singular_value, SpectralData};
use crate::tuple::{ComplexMatrix, MatrixTuple};

/// `σ_min` below this counts as a common hyperplane.
pub const ORACLE_ZERO: f64 = 1e-7;

/// Invariant-subspace choice attaining the smallest `σ_min`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    /// Eigenvector indices (into the sorted spectrum) per matrix.
    pub choice: Vec<Vec<usize>>,
    pub sigma_min: f64,
    /// Stacked unit eigenvectors, one column each.
    pub basis: ComplexMatrix,
}

#[derive(Debug, Clone)]
pub struct OracleOutcome {
    pub min_sigma: f64,
    pub witness: Witness,
    pub spectra: Vec<SpectralData>,
}

impl OracleOutcome {
    pub fn on_variety(&self) -> bool {
        self.min_sigma < ORACLE_ZERO
    }
}

/// All `k`-subsets of eigenvector indices; rejects nearly repeated
/// eigenvalues, where eigenvectors are not determined.
pub fn invariant_subspaces(
    spectrum: &SpectralData,
    k: usize,
    gap_tol: f64,
    index: usize,
) -> Result<Vec<Vec<usize>>> {
    if spectrum.min_gap <= gap_tol {
        return Err(Error::NonDiagonalizable {
            index,
            gap: spectrum.min_gap,
            tol: gap_tol,
        });
    }
    Ok(k_subsets(spectrum.dim(), k))
}

/// Columns of the chosen eigenvectors, matrix by matrix.
pub fn stacked_eigenvectors(spectra: &[SpectralData], choice: &[Vec<usize>]) -> ComplexMatrix {
    let n = spectra.first().map_or(0, SpectralData::dim);
    let cols: usize = choice.iter().map(Vec::len).sum();
    let mut m = ComplexMatrix::zeros(n, cols);
    let mut c = 0;
    for (s, idx) in spectra.iter().zip(choice) {
        for &j in idx {
            m.set_column(c, &s.eigenvectors.column(j));
            c += 1;
        }
    }
    m
}

/// Minimises `σ_min` of the stacked eigenvectors over all choices.
pub fn oracle_detect(t: &MatrixTuple, gap_tol: f64) -> Result<OracleOutcome> {
    let spectra: Vec<SpectralData> = t
        .normalized()
        .matrices()
        .iter()
        .map(eigendecomposition)
        .collect::<Result<_>>()?;
    let options: Vec<Vec<Vec<usize>>> = spectra
        .iter()
        .zip(t.partition().parts())
        .enumerate()
        .map(|(i, (s, &k))| invariant_subspaces(s, k, gap_tol, i))
        .collect::<Result<_>>()?;

    let mut best: Option<Witness> = None;
    let mut digits = vec![0usize; options.len()];
    loop {
        let choice: Vec<Vec<usize>> = digits
            .iter()
            .zip(&options)
            .map(|(&d, o)| o[d].clone())
            .collect();
        let basis = stacked_eigenvectors(&spectra, &choice);
        let sigma = smallest_singular_value(&basis)?;
        if best.as_ref().is_none_or(|b| sigma < b.sigma_min) {
            best = Some(Witness {
                choice,
                sigma_min: sigma,
                basis,
            });
        }
        // Odometer over the choice lists, last factor fastest.
        let mut i = options.len();
        loop {
            if i == 0 {
                let witness = best.expect("at least one choice");
                return Ok(OracleOutcome {
                    min_sigma: witness.sigma_min,
                    witness,
                    spectra,
                });
            }
            i -= 1;
            digits[i] += 1;
            if digits[i] < options[i].len() {
                break;
            }
            digits[i] = 0;
        }
    }
}

/// `σ_min` of a specific choice, used to confirm planted witnesses.
pub fn witness_sigma(t: &MatrixTuple, choice: &[Vec<usize>]) -> Result<f64> {
    let spectra: Vec<SpectralData> = t
        .normalized()
        .matrices()
        .iter()
        .map(eigendecomposition)
        .collect::<Result<_>>()?;
    smallest_singular_value(&stacked_eigenvectors(&spectra, choice))
}

/// A verdict agrees with the oracle when both report the same membership,
/// or when the verdict declines to decide.
pub fn agree(verdict: &Verdict, oracle: &OracleOutcome) -> bool {
    match verdict.status {
        Status::Indeterminate => true,
        Status::OnVariety => oracle.on_variety(),
        Status::Generic => !oracle.on_variety(),
    }
}
