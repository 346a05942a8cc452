//! Partitions of `n`, lexicographic bases of exterior powers, and the
//! mixed-radix indexing of their tensor product.
//!
//! Subsets are stored as sorted `Vec<usize>` with 0-based elements; the
//! element `j` stands for the standard basis vector `e_{j+1}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Binomial coefficient `C(n, k)`, zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    u64::try_from(acc).unwrap_or(u64::MAX)
}

/// Binomial coefficient over signed top argument: `C(a, b)` with the
/// convention that it vanishes for `a < 0` or `b > a`.
pub(crate) fn binomial_signed(a: i64, b: i64) -> u64 {
    if a < 0 || b < 0 || b > a {
        0
    } else {
        binomial(a as usize, b as usize)
    }
}

/// Dimensions `k_1, ..., k_l` of the prescribed invariant subspaces of
/// `n x n` matrices, with `k_1 + ... + k_l = n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Partition {
    n: usize,
    parts: Vec<usize>,
}

impl Partition {
    pub fn new(n: usize, parts: Vec<usize>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidPartition("n must be positive".into()));
        }
        if parts.is_empty() {
            return Err(Error::InvalidPartition("partition must have at least one part".into()));
        }
        if let Some(bad) = parts.iter().find(|&&k| k == 0 || k > n) {
            return Err(Error::InvalidPartition(format!(
                "every part must lie in 1..={n}, got {bad}"
            )));
        }
        let sum: usize = parts.iter().sum();
        if sum != n {
            return Err(Error::InvalidPartition(format!(
                "partition must sum to n (sum {sum}, n = {n})"
            )));
        }
        Ok(Self { n, parts })
    }

    /// Builds the partition from its parts alone; `n` is their sum.
    pub fn from_parts(parts: &[usize]) -> Result<Self> {
        Self::new(parts.iter().sum(), parts.to_vec())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    /// Number of matrices `l`.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// `C(n, k_i)` for every factor.
    pub fn factor_dims(&self) -> Vec<usize> {
        self.parts
            .iter()
            .map(|&k| binomial(self.n, k) as usize)
            .collect()
    }

    /// Dimension `N = prod C(n, k_i)` of the tensor space, saturating.
    pub fn tensor_dim(&self) -> usize {
        self.factor_dims()
            .into_iter()
            .fold(1usize, |acc, d| acc.saturating_mul(d))
    }

    /// Every ordered composition of `n` with at least `min_len` parts.
    pub fn compositions(n: usize, min_len: usize) -> Vec<Partition> {
        fn rec(rest: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if rest == 0 {
                out.push(cur.clone());
                return;
            }
            for k in 1..=rest {
                cur.push(k);
                rec(rest - k, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(n, &mut Vec::new(), &mut out);
        out.into_iter()
            .filter(|p| p.len() >= min_len)
            .map(|parts| Partition { n, parts })
            .collect()
    }
}

impl std::fmt::Display for Partition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.parts.iter().map(|k| k.to_string()).collect();
        write!(f, "n={} k=({})", self.n, parts.join(","))
    }
}

/// Number of ordered set partitions of `{1..n}` into blocks of sizes
/// `k_1, .., k_l`: `n! / ∏ k_i!`.
pub fn multinomial(p: &Partition) -> u64 {
    let mut rest = p.n();
    let mut acc = 1u64;
    for &k in p.parts() {
        acc = acc.saturating_mul(binomial(rest, k));
        rest -= k;
    }
    acc
}

/// All `k`-subsets of `{0, .., n-1}` in lexicographic order.
pub fn enumerate_wedge_basis(n: usize, k: usize) -> Result<Vec<Vec<usize>>> {
    if k == 0 || k > n {
        return Err(Error::InvalidPartition(format!(
            "wedge degree {k} out of range 1..={n}"
        )));
    }
    Ok(k_subsets(n, k))
}

/// Lexicographic `k`-subsets of `{0, .., n-1}`; `k = 0` yields the empty set.
pub(crate) fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k > n {
        return Vec::new();
    }
    let mut out = Vec::with_capacity(binomial(n, k) as usize);
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        // Advance the rightmost position that still has room.
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < n - k + i {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

/// Lexicographic rank of a sorted `k`-subset of `{0, .., n-1}`.
pub(crate) fn subset_rank(n: usize, subset: &[usize]) -> usize {
    let k = subset.len();
    let mut rank = 0u64;
    let mut prev = 0usize;
    for (i, &s) in subset.iter().enumerate() {
        for j in prev..s {
            rank += binomial(n - 1 - j, k - 1 - i);
        }
        prev = s + 1;
    }
    rank as usize
}

pub(crate) fn mask_of(subset: &[usize]) -> u64 {
    subset.iter().fold(0u64, |m, &s| m | (1u64 << s))
}

fn check_subset(n: usize, k: usize, subset: &[usize]) -> Result<()> {
    if subset.len() != k {
        return Err(Error::InvalidIndex(format!(
            "expected a {k}-subset, got {} elements",
            subset.len()
        )));
    }
    if subset.iter().any(|&s| s >= n) {
        return Err(Error::InvalidIndex(format!("element out of range 0..{n}")));
    }
    if subset.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidIndex("subset must be strictly increasing".into()));
    }
    Ok(())
}

/// Basis of `Λ^{k_1} ⊗ ... ⊗ Λ^{k_l}` with row-major flattening, the first
/// factor being the most significant digit.
#[derive(Debug, Clone)]
pub struct TensorBasis {
    partition: Partition,
    factors: Vec<Vec<Vec<usize>>>,
    strides: Vec<usize>,
    dim: usize,
}

impl TensorBasis {
    pub fn new(partition: &Partition) -> Self {
        let n = partition.n();
        let factors: Vec<_> = partition.parts().iter().map(|&k| k_subsets(n, k)).collect();
        let dims: Vec<usize> = factors.iter().map(Vec::len).collect();
        let mut strides = vec![1usize; dims.len()];
        for i in (0..dims.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1].saturating_mul(dims[i + 1]);
        }
        let dim = dims.iter().fold(1usize, |a, &d| a.saturating_mul(d));
        Self {
            partition: partition.clone(),
            factors,
            strides,
            dim,
        }
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The lexicographic wedge basis of factor `i`.
    pub fn factor(&self, i: usize) -> &[Vec<usize>] {
        &self.factors[i]
    }

    pub fn stride(&self, i: usize) -> usize {
        self.strides[i]
    }

    pub fn flat_index(&self, subsets: &[Vec<usize>]) -> Result<usize> {
        let p = &self.partition;
        if subsets.len() != p.len() {
            return Err(Error::InvalidIndex(format!(
                "expected {} subsets, got {}",
                p.len(),
                subsets.len()
            )));
        }
        let mut flat = 0usize;
        for (i, (s, &k)) in subsets.iter().zip(p.parts()).enumerate() {
            check_subset(p.n(), k, s)?;
            flat += subset_rank(p.n(), s) * self.strides[i];
        }
        Ok(flat)
    }

    pub fn unflat_index(&self, flat: usize) -> Result<Vec<Vec<usize>>> {
        if flat >= self.dim {
            return Err(Error::InvalidIndex(format!(
                "flat index {flat} out of range 0..{}",
                self.dim
            )));
        }
        Ok(self
            .digits(flat)
            .into_iter()
            .enumerate()
            .map(|(i, d)| self.factors[i][d].clone())
            .collect())
    }

    /// Per-factor ranks of a flat index.
    pub fn digits(&self, flat: usize) -> Vec<usize> {
        let mut rest = flat;
        self.strides
            .iter()
            .map(|&s| {
                let d = rest / s;
                rest %= s;
                d
            })
            .collect()
    }
}

/// `flat = Σ rank(S_i) · ∏_{j>i} C(n, k_j)`.
pub fn flat_index(partition: &Partition, subsets: &[Vec<usize>]) -> Result<usize> {
    TensorBasis::new(partition).flat_index(subsets)
}

pub fn unflat_index(partition: &Partition, flat: usize) -> Result<Vec<Vec<usize>>> {
    TensorBasis::new(partition).unflat_index(flat)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_based(v: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
        v.into_iter()
            .map(|s| s.into_iter().map(|x| x + 1).collect())
            .collect()
    }

    #[test]
    fn wedge_basis_orders() {
        assert_eq!(
            one_based(enumerate_wedge_basis(3, 2).unwrap()),
            vec![vec![1, 2], vec![1, 3], vec![2, 3]]
        );
        assert_eq!(one_based(enumerate_wedge_basis(3, 3).unwrap()), vec![vec![1, 2, 3]]);
        assert_eq!(
            one_based(enumerate_wedge_basis(4, 1).unwrap()),
            vec![vec![1], vec![2], vec![3], vec![4]]
        );
        assert!(matches!(enumerate_wedge_basis(3, 0), Err(Error::InvalidPartition(_))));
        assert!(matches!(enumerate_wedge_basis(3, 4), Err(Error::InvalidPartition(_))));
    }

    #[test]
    fn ranks_match_enumeration() {
        for n in 1..=7 {
            for k in 0..=n {
                for (r, s) in k_subsets(n, k).iter().enumerate() {
                    assert_eq!(subset_rank(n, s), r);
                }
                assert_eq!(k_subsets(n, k).len() as u64, binomial(n, k));
            }
        }
    }

    #[test]
    fn flat_index_examples() {
        let p = Partition::new(2, vec![1, 1]).unwrap();
        assert_eq!(flat_index(&p, &[vec![0], vec![0]]).unwrap(), 0);
        assert_eq!(flat_index(&p, &[vec![0], vec![1]]).unwrap(), 1);
        assert_eq!(flat_index(&p, &[vec![1], vec![0]]).unwrap(), 2);
        let p = Partition::new(3, vec![1, 2]).unwrap();
        assert_eq!(flat_index(&p, &[vec![1], vec![0, 2]]).unwrap(), 4);
    }

    #[test]
    fn flat_index_rejects_malformed() {
        let p = Partition::new(3, vec![1, 2]).unwrap();
        assert!(matches!(flat_index(&p, &[vec![1]]), Err(Error::InvalidIndex(_))));
        assert!(matches!(flat_index(&p, &[vec![1], vec![2, 0]]), Err(Error::InvalidIndex(_))));
        assert!(matches!(flat_index(&p, &[vec![1], vec![0, 3]]), Err(Error::InvalidIndex(_))));
        assert!(matches!(flat_index(&p, &[vec![1, 2], vec![0, 1]]), Err(Error::InvalidIndex(_))));
        assert!(matches!(unflat_index(&p, 9), Err(Error::InvalidIndex(_))));
    }

    #[test]
    fn flat_unflat_roundtrip_is_exhaustive() {
        for n in 1..=5 {
            for p in Partition::compositions(n, 1) {
                let basis = TensorBasis::new(&p);
                if basis.dim() > 4096 {
                    continue;
                }
                for flat in 0..basis.dim() {
                    let subsets = basis.unflat_index(flat).unwrap();
                    assert_eq!(basis.flat_index(&subsets).unwrap(), flat);
                }
            }
        }
    }

    #[test]
    fn partition_validation() {
        assert!(Partition::new(2, vec![1, 1]).is_ok());
        let err = Partition::new(3, vec![1, 1]).unwrap_err();
        assert!(err.to_string().contains("partition must sum to n"));
        assert!(Partition::new(2, vec![0, 2]).is_err());
        assert!(Partition::new(2, vec![]).is_err());
        assert!(Partition::new(0, vec![]).is_err());
        assert_eq!(Partition::compositions(3, 1).len(), 4);
        assert_eq!(Partition::compositions(4, 2).len(), 7);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(4, 0), 1);
        assert_eq!(binomial(2, 3), 0);
        assert_eq!(binomial_signed(-1, 0), 0);
        assert_eq!(binomial_signed(0, 0), 1);
    }
}
