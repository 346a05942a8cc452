use num_complex::Complex64;

use super::basis::{k_subsets, subset_rank, TensorBasis};
use crate::error::{Error, Result};
use crate::tuple::{ComplexMatrix, MatrixTuple};

/// Largest tensor dimension `N` accepted by default.
pub const DEFAULT_SIZE_CAP: usize = 4096;

/// Matrix of the derivation induced by `a` on `Λ^k C^n`: each basis wedge
/// `e_T` maps to the sum over slots of `a` applied to that slot alone.
///
/// Columns and rows are indexed by the lexicographic `k`-subsets.
pub fn wedge_derivation(a: &ComplexMatrix, k: usize) -> Result<ComplexMatrix> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::Shape(format!("expected a square matrix, got {}x{}", n, a.ncols())));
    }
    if k == 0 || k > n {
        return Err(Error::InvalidPartition(format!("wedge degree {k} out of range 1..={n}")));
    }
    if k == 1 {
        return Ok(a.clone());
    }
    let basis = k_subsets(n, k);
    let dim = basis.len();
    let mut out = ComplexMatrix::zeros(dim, dim);
    for (col, subset) in basis.iter().enumerate() {
        for &t in subset {
            for m in 0..n {
                let coeff = a[(m, t)];
                if coeff == Complex64::new(0.0, 0.0) {
                    continue;
                }
                if m == t {
                    out[(col, col)] += coeff;
                    continue;
                }
                if subset.contains(&m) {
                    continue;
                }
                // Moving e_m from slot of e_t to its sorted place passes every
                // element strictly between t and m.
                let (lo, hi) = if m < t { (m, t) } else { (t, m) };
                let passed = subset.iter().filter(|&&s| s > lo && s < hi).count();
                let mut image: Vec<usize> = subset.iter().map(|&s| if s == t { m } else { s }).collect();
                image.sort_unstable();
                let row = subset_rank(n, &image);
                if passed % 2 == 0 {
                    out[(row, col)] += coeff;
                } else {
                    out[(row, col)] -= coeff;
                }
            }
        }
    }
    Ok(out)
}

/// The Kronecker sum `Σ_i I ⊗ .. ⊗ D_i ⊗ .. ⊗ I` where `D_i` is the wedge
/// derivation of `A_i` on `Λ^{k_i} C^n`, in the flat tensor basis.
pub fn kronecker_sum_operator(t: &MatrixTuple, size_cap: usize) -> Result<ComplexMatrix> {
    let p = t.partition();
    let basis = TensorBasis::new(p);
    let dim = basis.dim();
    if dim > size_cap {
        return Err(Error::TooLarge { dim, cap: size_cap });
    }
    let mut out = ComplexMatrix::zeros(dim, dim);
    for (i, (a, &k)) in t.matrices().iter().zip(p.parts()).enumerate() {
        let d = wedge_derivation(a, k)?;
        let di = d.nrows();
        let right = basis.stride(i);
        let left = dim / (di * right);
        for l in 0..left {
            for r in 0..right {
                for x in 0..di {
                    let row = (l * di + x) * right + r;
                    for y in 0..di {
                        let v = d[(x, y)];
                        if v != Complex64::new(0.0, 0.0) {
                            out[(row, (l * di + y) * right + r)] += v;
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Diagonal of the Kronecker sum as unsummed parts: entry `j` lists
/// `A_i[t, t]` for every factor `i` and every `t` in that factor's subset.
///
/// Off-diagonal entries of the operator each come from a single matrix entry
/// and are exact in floating point; only these sums round.
pub fn kronecker_sum_diagonal_terms(t: &MatrixTuple) -> Vec<Vec<Complex64>> {
    let basis = TensorBasis::new(t.partition());
    (0..basis.dim())
        .map(|flat| {
            basis
                .unflat_index(flat)
                .expect("flat index in range")
                .iter()
                .zip(t.matrices())
                .flat_map(|(subset, a)| subset.iter().map(move |&j| a[(j, j)]))
                .collect()
        })
        .collect()
}
