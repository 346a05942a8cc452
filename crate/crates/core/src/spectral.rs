//! Spectral factors `D_{k'}`: products of eigenvalue-sum differences over
//! disjoint index pairs, and the exponents with which they divide `P`.
//!
//! For a sub-partition `k' = (k'_1, .., k'_l)` with `0 <= k'_i <= k_i`, an
//! oriented pair `(F, G)` picks disjoint `k'_i`-subsets `F(i), G(i)` of the
//! eigenvalue indices of each matrix. Its factor is
//! `Σ_i (Σ_{j∈F(i)} λ_{i,j} - Σ_{j∈G(i)} λ_{i,j})`. Orientation: at the first
//! `i` with `k'_i > 0` we require `min F(i) < min G(i)`, so each unordered
//! pair appears once.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::multilinear::{binomial, binomial_signed, k_subsets, mask_of, Partition};
use crate::numerics::LogComplex;

/// Factor magnitudes below `FACTOR_ZERO_RTOL` times the sum of the
/// eigenvalue magnitudes entering the factor count as exact zeros.
pub const FACTOR_ZERO_RTOL: f64 = 1e-11;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SubPartition {
    kprime: Vec<usize>,
}

impl SubPartition {
    /// Checks `k'_i <= k_i` and positive weight.
    pub fn new(p: &Partition, kprime: Vec<usize>) -> crate::Result<Self> {
        if kprime.len() != p.len() {
            return Err(crate::Error::InvalidPartition(format!(
                "sub-partition has {} entries, partition has {}",
                kprime.len(),
                p.len()
            )));
        }
        if kprime.iter().zip(p.parts()).any(|(a, b)| a > b) {
            return Err(crate::Error::InvalidPartition(
                "sub-partition entries must not exceed the partition".into(),
            ));
        }
        if kprime.iter().all(|&k| k == 0) {
            return Err(crate::Error::InvalidPartition(
                "sub-partition must have positive weight".into(),
            ));
        }
        Ok(Self { kprime })
    }

    pub fn kprime(&self) -> &[usize] {
        &self.kprime
    }

    pub fn weight(&self) -> usize {
        self.kprime.iter().sum()
    }
}

impl std::fmt::Display for SubPartition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.kprime.iter().map(|k| k.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Every sub-partition of positive weight, in lexicographic order.
pub fn enumerate_sub_partitions(p: &Partition) -> Vec<SubPartition> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; p.len()];
    loop {
        if cur.iter().any(|&k| k > 0) {
            out.push(SubPartition { kprime: cur.clone() });
        }
        let mut i = p.len();
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < p.parts()[i] {
                cur[i] += 1;
                for c in cur.iter_mut().skip(i + 1) {
                    *c = 0;
                }
                break;
            }
        }
    }
}

/// `∏_i C(n - 2k'_i, k_i - k'_i)`, zero when any factor is impossible.
pub fn exponent(p: &Partition, s: &SubPartition) -> u64 {
    let n = p.n() as i64;
    p.parts()
        .iter()
        .zip(s.kprime())
        .map(|(&k, &kp)| binomial_signed(n - 2 * kp as i64, k as i64 - kp as i64))
        .fold(1u64, |a, b| a.saturating_mul(b))
}

/// Number of oriented pairs: `½ ∏_i C(n, k'_i) C(n - k'_i, k'_i)`.
pub fn oriented_pair_count(p: &Partition, s: &SubPartition) -> u64 {
    let n = p.n();
    let ordered = s
        .kprime()
        .iter()
        .map(|&kp| {
            if 2 * kp > n {
                0
            } else {
                binomial(n, kp) * binomial(n - kp, kp)
            }
        })
        .fold(1u64, |a, b| a.saturating_mul(b));
    ordered / 2
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FGPair {
    pub f: Vec<Vec<usize>>,
    pub g: Vec<Vec<usize>>,
}

/// Ordered disjoint `(F, G)` pairs of `k`-subsets of `{0..n-1}`.
fn disjoint_pairs(n: usize, k: usize) -> Vec<(Vec<usize>, Vec<usize>)> {
    let subsets = k_subsets(n, k);
    let mut out = Vec::new();
    for a in &subsets {
        for b in &subsets {
            if mask_of(a) & mask_of(b) == 0 {
                out.push((a.clone(), b.clone()));
            }
        }
    }
    out
}

fn first_active(s: &SubPartition) -> Option<usize> {
    s.kprime().iter().position(|&k| k > 0)
}

/// Per-factor candidate lists with the orientation applied to the first
/// active factor.
fn factor_choices(p: &Partition, s: &SubPartition) -> Vec<Vec<(Vec<usize>, Vec<usize>)>> {
    let lead = first_active(s);
    s.kprime()
        .iter()
        .enumerate()
        .map(|(i, &kp)| {
            let pairs = disjoint_pairs(p.n(), kp);
            if Some(i) == lead {
                pairs.into_iter().filter(|(f, g)| f[0] < g[0]).collect()
            } else {
                pairs
            }
        })
        .collect()
}

/// Visits every element of the Cartesian product of `sizes`.
fn for_each_combination(sizes: &[usize], mut visit: impl FnMut(&[usize])) {
    if sizes.iter().any(|&s| s == 0) {
        return;
    }
    let mut idx = vec![0usize; sizes.len()];
    loop {
        visit(&idx);
        let mut i = sizes.len();
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            idx[i] += 1;
            if idx[i] < sizes[i] {
                break;
            }
            idx[i] = 0;
        }
    }
}

/// All oriented pairs, deterministic order.
pub fn enumerate_fg_pairs(p: &Partition, s: &SubPartition) -> Vec<FGPair> {
    let choices = factor_choices(p, s);
    let sizes: Vec<usize> = choices.iter().map(Vec::len).collect();
    let mut out = Vec::new();
    for_each_combination(&sizes, |idx| {
        let (f, g) = idx
            .iter()
            .enumerate()
            .map(|(i, &c)| choices[i][c].clone())
            .unzip();
        out.push(FGPair { f, g });
    });
    out
}

/// Value of one `D_{k'}` factor product.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DValue {
    pub value: LogComplex,
    /// Smallest `ln |factor|` over all pairs (`-inf` when one vanished).
    pub min_factor_log_mag: f64,
    pub pairs: u64,
}

/// `D_{k'}` from per-matrix eigenvalue lists (`eigs[i][j] = λ_{i,j}`).
pub fn eval_d(eigs: &[Vec<Complex64>], p: &Partition, s: &SubPartition) -> DValue {
    let choices = factor_choices(p, s);
    // Per factor: (difference of sums, sum of magnitudes) for each choice.
    let diffs: Vec<Vec<(Complex64, f64)>> = choices
        .iter()
        .enumerate()
        .map(|(i, list)| {
            list.iter()
                .map(|(f, g)| {
                    let sf: Complex64 = f.iter().map(|&j| eigs[i][j]).sum();
                    let sg: Complex64 = g.iter().map(|&j| eigs[i][j]).sum();
                    let mag: f64 = f.iter().chain(g).map(|&j| eigs[i][j].norm()).sum();
                    (sf - sg, mag)
                })
                .collect()
        })
        .collect();
    let sizes: Vec<usize> = diffs.iter().map(Vec::len).collect();
    let mut log_mag = 0.0;
    let mut phase = 0.0;
    let mut min_factor = f64::INFINITY;
    let mut zero = false;
    let mut pairs = 0u64;
    for_each_combination(&sizes, |idx| {
        let mut z = Complex64::new(0.0, 0.0);
        let mut scale = 0.0;
        for (i, &c) in idx.iter().enumerate() {
            z += diffs[i][c].0;
            scale += diffs[i][c].1;
        }
        pairs += 1;
        let m = z.norm();
        if m <= FACTOR_ZERO_RTOL * scale || m < crate::numerics::PIVOT_ZERO {
            zero = true;
            min_factor = f64::NEG_INFINITY;
            return;
        }
        let lm = m.ln();
        min_factor = min_factor.min(lm);
        log_mag += lm;
        phase += z.arg();
    });
    let value = if zero {
        LogComplex::ZERO
    } else {
        LogComplex::new(log_mag, phase)
    };
    DValue {
        value,
        min_factor_log_mag: min_factor,
        pairs,
    }
}

/// The charged part `∏_{weight >= 2} D_{k'}^{exponent}` of `P`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Denominator {
    pub value: LogComplex,
    /// Smallest `ln |factor|` over all charged factors.
    pub min_factor_log_mag: f64,
    /// Sub-partitions whose factor product vanished.
    pub vanished: Vec<SubPartition>,
    /// `(sub-partition, exponent)` for every charged factor.
    pub charged: Vec<(SubPartition, u64)>,
}

impl Denominator {
    pub fn is_zero(&self) -> bool {
        self.value.is_zero
    }
}

/// Sub-partitions of weight at least two with positive exponent.
pub fn charged_sub_partitions(p: &Partition) -> Vec<(SubPartition, u64)> {
    enumerate_sub_partitions(p)
        .into_iter()
        .filter(|s| s.weight() >= 2)
        .map(|s| {
            let e = exponent(p, &s);
            (s, e)
        })
        .filter(|(_, e)| *e > 0)
        .collect()
}

pub fn eval_denominator(eigs: &[Vec<Complex64>], p: &Partition) -> Denominator {
    let charged = charged_sub_partitions(p);
    let mut value = LogComplex::ONE;
    let mut min_factor = f64::INFINITY;
    let mut vanished = Vec::new();
    for (s, e) in &charged {
        let d = eval_d(eigs, p, s);
        if d.value.is_zero {
            vanished.push(s.clone());
        }
        min_factor = min_factor.min(d.min_factor_log_mag);
        value = value * d.value.powu(*e);
    }
    Denominator {
        value,
        min_factor_log_mag: min_factor,
        vanished,
        charged,
    }
}
