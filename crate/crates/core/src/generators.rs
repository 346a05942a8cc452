//! Seeded test-tuple generators.

use std::collections::HashMap;

use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::multilinear::Partition;
use crate::numerics::{eigendecomposition, singular_values};
use crate::oracle::{witness_sigma, Witness};
use crate::spectral::{exponent, SubPartition};
use crate::tuple::{ComplexMatrix, MatrixTuple};

const MAX_ATTEMPTS: usize = 32;
/// Rejects nearly dependent draws before they are orthonormalized.
const BASIS_COND_MAX: f64 = 1e3;
/// Condition-number ceiling for the similarities of collision tuples.
const SIMILARITY_COND_MAX: f64 = 10.0;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
}

fn gaussian_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

fn condition_number(m: &ComplexMatrix) -> Result<f64> {
    let s = singular_values(m)?;
    let max = s.first().copied().unwrap_or(0.0);
    let min = s.last().copied().unwrap_or(0.0);
    Ok(if min > 0.0 { max / min } else { f64::INFINITY })
}

/// Complex Gaussian entries, each matrix scaled to unit Frobenius norm.
pub fn random_tuple(p: &Partition, seed: u64) -> MatrixTuple {
    let mut r = rng(seed);
    let n = p.n();
    let matrices = (0..p.len())
        .map(|_| {
            let m = gaussian_matrix(&mut r, n, n);
            let norm = m.norm();
            m.unscale(norm)
        })
        .collect();
    MatrixTuple::new(p.clone(), matrices).expect("shapes are consistent by construction")
}

/// Adds `eps` times a unit-norm Gaussian matrix to every matrix.
pub fn perturbed(t: &MatrixTuple, eps: f64, seed: u64) -> MatrixTuple {
    let mut r = rng(seed);
    let n = t.n();
    let matrices = t
        .matrices()
        .iter()
        .map(|a| {
            let e = gaussian_matrix(&mut r, n, n);
            let norm = e.norm();
            a + e.unscale(norm) * Complex64::new(eps, 0.0)
        })
        .collect();
    MatrixTuple::new(t.partition().clone(), matrices).expect("shapes unchanged")
}

/// A tuple whose chosen invariant subspaces all lie in one random
/// hyperplane, together with the planted choice.
///
/// Each `A_i = B_i T_i B_i^*` where `B_i` is unitary, its first `k_i` columns
/// span `V_i ⊂ H`, and `T_i` is block upper triangular, so `V_i` is invariant.
pub fn on_variety_tuple(p: &Partition, seed: u64, gap_tol: f64) -> Result<(MatrixTuple, Witness)> {
    if p.len() < 2 {
        return Err(Error::GenerationFailure(
            "a single n-dimensional subspace cannot lie in a hyperplane".into(),
        ));
    }
    let n = p.n();
    let mut r = rng(seed);
    for _ in 0..MAX_ATTEMPTS {
        if let Some(found) = try_on_variety(p, n, &mut r, gap_tol)? {
            return Ok(found);
        }
    }
    Err(Error::GenerationFailure(format!(
        "no well-separated spectrum after {MAX_ATTEMPTS} attempts"
    )))
}

fn try_on_variety(
    p: &Partition,
    n: usize,
    r: &mut ChaCha8Rng,
    gap_tol: f64,
) -> Result<Option<(MatrixTuple, Witness)>> {
    let hyperplane = gaussian_matrix(r, n, n - 1);
    let mut matrices = Vec::with_capacity(p.len());
    let mut blocks = Vec::with_capacity(p.len());
    for &k in p.parts() {
        // Any basis of V_i works, so take a unitary one: the conjugation
        // then adds no rounding beyond a few ulps.
        let inside = &hyperplane * gaussian_matrix(r, n - 1, k);
        let mut raw = ComplexMatrix::zeros(n, n);
        raw.view_mut((0, 0), (n, k)).copy_from(&inside);
        raw.view_mut((0, k), (n, n - k)).copy_from(&gaussian_matrix(r, n, n - k));
        if condition_number(&raw)? > BASIS_COND_MAX {
            return Ok(None);
        }
        let b = raw.qr().q();
        let mut t = gaussian_matrix(r, n, n);
        t.view_mut((k, 0), (n - k, k)).fill(Complex64::new(0.0, 0.0));
        let b_inv = b.adjoint();
        let a = &b * &t * b_inv;
        let norm = a.norm();
        matrices.push(a.unscale(norm));
        blocks.push(t.view((0, 0), (k, k)).into_owned().unscale(norm));
    }
    let tuple = MatrixTuple::new(p.clone(), matrices)?;

    let mut choice = Vec::with_capacity(p.len());
    for (a, block) in tuple.matrices().iter().zip(&blocks) {
        let spectrum = eigendecomposition(a)?;
        if spectrum.min_gap <= gap_tol {
            return Ok(None);
        }
        let planted = crate::numerics::eigenvalues(block)?;
        let mut idx: Vec<usize> = planted
            .iter()
            .map(|mu| {
                (0..spectrum.dim())
                    .min_by(|&x, &y| {
                        (spectrum.eigenvalues[x] - mu)
                            .norm()
                            .total_cmp(&(spectrum.eigenvalues[y] - mu).norm())
                    })
                    .expect("nonempty spectrum")
            })
            .collect();
        idx.sort_unstable();
        idx.dedup();
        if idx.len() != planted.len() {
            return Ok(None);
        }
        choice.push(idx);
    }
    let sigma_min = witness_sigma(&tuple, &choice)?;
    let spectra: Vec<_> = tuple
        .normalized()
        .matrices()
        .iter()
        .map(eigendecomposition)
        .collect::<Result<_>>()?;
    let basis = crate::oracle::stacked_eigenvectors(&spectra, &choice);
    Ok(Some((
        tuple,
        Witness {
            choice,
            sigma_min,
            basis,
        },
    )))
}

/// `{(-2)^1, ..., (-2)^b}` with the element at position `2a` (1-based)
/// replaced by `-(2^{2a} - 2)`.
pub fn collision_set(a: usize, b: usize) -> Result<Vec<i64>> {
    if a < 1 || 2 * a > b || b > 62 {
        return Err(Error::GenerationFailure(format!(
            "collision set needs 1 <= a and 2a <= b <= 62, got a = {a}, b = {b}"
        )));
    }
    let mut set: Vec<i64> = (1..=b as u32).map(|j| (-2i64).pow(j)).collect();
    set[2 * a - 1] = -((1i64 << (2 * a)) - 2);
    Ok(set)
}

/// Disjoint nonempty index sets with equal sums, as bitmask pairs `(F, G)`
/// with the smallest index in `F`. Exhaustive over `2^b`
/// subsets, so only meant for `b <= 20` or so.
pub fn equal_sum_pairs(values: &[i64]) -> Vec<(u64, u64)> {
    let b = values.len();
    assert!(b < 32, "exhaustive search is limited to fewer than 32 values");
    let mut buckets: HashMap<i64, Vec<u64>> = HashMap::new();
    for mask in 1u64..(1 << b) {
        let sum: i64 = (0..b).filter(|&j| mask >> j & 1 == 1).map(|j| values[j]).sum();
        buckets.entry(sum).or_default().push(mask);
    }
    let mut pairs = Vec::new();
    for masks in buckets.values() {
        for (x, &f) in masks.iter().enumerate() {
            for &g in &masks[x + 1..] {
                if f & g == 0 {
                    let (f, g) = if f.trailing_zeros() < g.trailing_zeros() { (f, g) } else { (g, f) };
                    pairs.push((f, g));
                }
            }
        }
    }
    pairs.sort_unstable();
    pairs
}

/// The unique equal-sum pair of `collision_set(a, b)`; fails unless there is
/// exactly one and both sides have `a` elements.
pub fn unique_collision(a: usize, b: usize) -> Result<(Vec<i64>, u64, u64)> {
    let set = collision_set(a, b)?;
    let pairs = equal_sum_pairs(&set);
    match pairs.as_slice() {
        [(f, g)] if f.count_ones() as usize == a && g.count_ones() as usize == a => {
            Ok((set, *f, *g))
        }
        _ => Err(Error::GenerationFailure(format!(
            "expected one equal-sum pair of size {a} (b = {b}), found {} pairs",
            pairs.len()
        ))),
    }
}

/// Seeded random similarity with condition number at most 10.
pub fn well_conditioned_similarity(n: usize, seed: u64) -> Result<ComplexMatrix> {
    random_similarity(&mut rng(seed), n)
}

fn random_similarity(r: &mut ChaCha8Rng, n: usize) -> Result<ComplexMatrix> {
    for _ in 0..MAX_ATTEMPTS {
        let q1 = gaussian_matrix(r, n, n).qr().q();
        let q2 = gaussian_matrix(r, n, n).qr().q();
        let s = DVector::from_fn(n, |_, _| Complex64::new(r.random_range(1.0..SIMILARITY_COND_MAX), 0.0));
        let m = q1 * ComplexMatrix::from_diagonal(&s) * q2;
        if condition_number(&m)? <= SIMILARITY_COND_MAX {
            return Ok(m);
        }
    }
    Err(Error::GenerationFailure("no well-conditioned similarity found".into()))
}

/// Diagonalizable tuple whose only eigenvalue coincidence is a single
/// `D_{k'}` factor vanishing, conjugated by random similarities.
pub fn single_collision_tuple(p: &Partition, s: &SubPartition, seed: u64) -> Result<MatrixTuple> {
    let n = p.n();
    let a = s.weight();
    if a < 2 {
        return Err(Error::GenerationFailure("collision tuples need weight >= 2".into()));
    }
    if s.kprime().iter().any(|&k| 2 * k > n) || exponent(p, s) == 0 {
        return Err(Error::GenerationFailure(format!(
            "sub-partition {s} does not charge a spectral factor"
        )));
    }
    let b = n * p.len();
    let (set, f, g) = unique_collision(a, b)?;
    let side = |mask: u64| -> Vec<i64> { (0..b).filter(|&j| mask >> j & 1 == 1).map(|j| set[j]).collect() };
    let (mut fs, mut gs) = (side(f), side(g));
    let mut rest = side(!(f | g) & ((1u64 << b) - 1));

    let mut r = rng(seed);
    let mut matrices = Vec::with_capacity(p.len());
    for &kp in s.kprime() {
        let mut eig: Vec<i64> = fs.drain(..kp).chain(gs.drain(..kp)).collect();
        eig.extend(rest.drain(..n - 2 * kp));
        let d = ComplexMatrix::from_diagonal(&DVector::from_iterator(
            n,
            eig.iter().map(|&x| Complex64::new(x as f64, 0.0)),
        ));
        let sim = random_similarity(&mut r, n)?;
        let inv = sim
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::NumericalFailure("similarity is singular".into()))?;
        matrices.push(&sim * d * inv);
    }
    MatrixTuple::new(p.clone(), matrices)
}
