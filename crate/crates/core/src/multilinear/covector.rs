use nalgebra::DVector;
use num_complex::Complex64;

use super::basis::{k_subsets, mask_of, Partition, TensorBasis};
use crate::error::{Error, Result};
use crate::tuple::ComplexMatrix;

/// A linear functional on the flat tensor space.
#[derive(Debug, Clone, PartialEq)]
pub struct Covector {
    entries: Vec<Complex64>,
}

impl Covector {
    pub fn new(entries: Vec<Complex64>) -> Self {
        Self { entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `⟨self, v⟩ = Σ self_m v_m` (no conjugation).
    pub fn apply(&self, v: &[Complex64]) -> Complex64 {
        self.entries.iter().zip(v).map(|(a, b)| a * b).sum()
    }
}

/// The image of `Σ_π sgn(π) e*_{π(1)} ⊗ .. ⊗ e*_{π(n)}` in the dual of
/// `⊗ Λ^{k_i} C^n`.
///
/// The entry at `(S_1, .., S_l)` is zero unless the `S_i` partition
/// `{0, .., n-1}`; otherwise it is the sign of the word `S_1 S_2 .. S_l`.
pub fn determinant_covector(p: &Partition) -> Covector {
    let basis = TensorBasis::new(p);
    let full = if p.n() == 64 { u64::MAX } else { (1u64 << p.n()) - 1 };
    let entries = (0..basis.dim())
        .map(|flat| {
            let digits = basis.digits(flat);
            let mut union = 0u64;
            let mut word = Vec::with_capacity(p.n());
            for (i, d) in digits.into_iter().enumerate() {
                let s = &basis.factor(i)[d];
                let m = mask_of(s);
                if union & m != 0 {
                    return Complex64::new(0.0, 0.0);
                }
                union |= m;
                word.extend_from_slice(s);
            }
            if union != full {
                return Complex64::new(0.0, 0.0);
            }
            Complex64::new(permutation_sign(&word), 0.0)
        })
        .collect();
    Covector::new(entries)
}

/// Sign of a word of distinct integers, via its inversion count.
pub(crate) fn permutation_sign(word: &[usize]) -> f64 {
    let mut inversions = 0usize;
    for i in 0..word.len() {
        for j in i + 1..word.len() {
            if word[i] > word[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Coordinates of `v_1 ∧ .. ∧ v_k` in the lexicographic basis of `Λ^k`:
/// the `k x k` minors on each row subset.
pub fn wedge_coordinates(vectors: &[DVector<Complex64>]) -> Result<Vec<Complex64>> {
    let k = vectors.len();
    let n = vectors.first().map(|v| v.len()).unwrap_or(0);
    if k == 0 || k > n {
        return Err(Error::Shape(format!("cannot wedge {k} vectors of length {n}")));
    }
    if vectors.iter().any(|v| v.len() != n) {
        return Err(Error::Shape("vectors must share one length".into()));
    }
    Ok(k_subsets(n, k)
        .iter()
        .map(|rows| {
            let minor = ComplexMatrix::from_fn(k, k, |r, c| vectors[c][rows[r]]);
            minor.determinant()
        })
        .collect())
}

/// `w̄` applied to `⊗_i (v_{i,1} ∧ .. ∧ v_{i,k_i})`.
pub fn pair_with_decomposable(
    p: &Partition,
    w: &Covector,
    groups: &[Vec<DVector<Complex64>>],
) -> Result<Complex64> {
    let basis = TensorBasis::new(p);
    if w.len() != basis.dim() {
        return Err(Error::Shape(format!(
            "covector has length {}, tensor space has dimension {}",
            w.len(),
            basis.dim()
        )));
    }
    if groups.len() != p.len() {
        return Err(Error::Shape(format!(
            "expected {} vector groups, got {}",
            p.len(),
            groups.len()
        )));
    }
    let mut coords = Vec::with_capacity(groups.len());
    for (g, &k) in groups.iter().zip(p.parts()) {
        if g.len() != k || g.iter().any(|v| v.len() != p.n()) {
            return Err(Error::Shape(format!("expected {k} vectors of length {}", p.n())));
        }
        coords.push(wedge_coordinates(g)?);
    }
    let zero = Complex64::new(0.0, 0.0);
    let mut total = zero;
    for (flat, &wv) in w.entries().iter().enumerate() {
        if wv == zero {
            continue;
        }
        let term = basis
            .digits(flat)
            .into_iter()
            .enumerate()
            .fold(wv, |acc, (i, d)| acc * coords[i][d]);
        total += term;
    }
    Ok(total)
}
