//! End-to-end acceptance checks shared by the test suite and `tuplevar selftest`.
//!
//! Every check returns a [`CriterionReport`]; a check that hits an error
//! fails with the error as its detail rather than aborting the run.

use std::time::{Duration, Instant};

use nalgebra::DVector;
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::certifier::{
    certify_membership, eval_phat, hatp_degree, homogeneity_check, joint_homogeneity_error, krylov_matrix,
    p_joint_degree, Certifier, CertifierConfig, DegreeSelector, EvalOptions, Homogeneity, Status,
};
use crate::error::{Error, Result};
use crate::generators::{
    on_variety_tuple, random_tuple, single_collision_tuple, unique_collision, well_conditioned_similarity,
};
use crate::multilinear::{
    binomial, determinant_covector, kronecker_sum_operator, pair_with_decomposable, Partition, TensorBasis,
};
use crate::numerics::{eigenvalues, lu_logdet, singular_values, LogComplex};
use crate::oracle::oracle_detect;
use crate::spectral::{charged_sub_partitions, enumerate_sub_partitions, eval_d};
use crate::tuple::{ComplexMatrix, MatrixTuple};

/// Scope of an acceptance run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AcceptanceConfig {
    /// Largest `n` exercised; the zero-set check adds its `n = 4` partitions
    /// only when this is at least 4.
    pub max_n: usize,
    /// On-variety and random tuples per partition in the zero-set check.
    pub samples: usize,
    pub seed: u64,
}

impl Default for AcceptanceConfig {
    fn default() -> Self {
        Self {
            max_n: 4,
            samples: 50,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CriterionReport {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl std::fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "[{}] {}. {}: {} ({:.1}s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail,
            self.elapsed.as_secs_f64()
        )
    }
}

type Check = fn(&AcceptanceConfig) -> Result<(bool, String)>;

const CRITERIA: [(u8, &str, Check); 9] = [
    (1, "zero-set agreement", zero_set_agreement),
    (2, "kernel of M at single collisions", collision_kernel),
    (3, "per-matrix degrees of P-hat", per_matrix_degrees),
    (4, "joint homogeneity of P", joint_homogeneity),
    (5, "Kronecker-sum spectrum", kronecker_spectrum),
    (6, "determinant covector pairing", covector_pairing),
    (7, "n = 2 commutator closed form", commutator_closed_form),
    (8, "permutation invariance of D factors", d_permutation_invariance),
    (9, "collision-set uniqueness", collision_uniqueness),
];

/// Number of acceptance criteria.
pub fn criterion_count() -> usize {
    CRITERIA.len()
}

/// Runs one criterion by its 1-based id.
pub fn run_criterion(id: u8, cfg: &AcceptanceConfig) -> Result<CriterionReport> {
    let (id, name, check) = *CRITERIA
        .iter()
        .find(|c| c.0 == id)
        .ok_or_else(|| Error::InvalidIndex(format!("no acceptance criterion {id}")))?;
    let start = Instant::now();
    let (passed, detail) = check(cfg).unwrap_or_else(|e| (false, format!("error: {e}")));
    Ok(CriterionReport {
        id,
        name,
        passed,
        detail,
        elapsed: start.elapsed(),
    })
}

/// Runs every criterion in order, reporting each as soon as it finishes.
pub fn run_all(cfg: &AcceptanceConfig, mut on_report: impl FnMut(&CriterionReport)) -> Vec<CriterionReport> {
    CRITERIA
        .iter()
        .map(|c| {
            let r = run_criterion(c.0, cfg).expect("criterion ids come from the table");
            on_report(&r);
            r
        })
        .collect()
}

fn parts(k: &[usize]) -> Partition {
    Partition::from_parts(k).expect("fixed partitions are valid")
}

fn compositions_up_to(max_n: usize) -> Vec<Partition> {
    (2..=max_n).flat_map(|n| Partition::compositions(n, 1)).collect()
}

fn sub_seed(cfg: &AcceptanceConfig, stream: u64, j: u64) -> u64 {
    cfg.seed
        .wrapping_mul(0x9e37_79b9_7f4a_7c15)
        .wrapping_add(stream.wrapping_mul(1_000_003))
        .wrapping_add(j)
}

fn rng(cfg: &AcceptanceConfig, stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(sub_seed(cfg, stream, 0xacce))
}

/// A scale factor in `[0.5, 2]` kept away from 1 so relative errors of
/// `ln c` shifts are meaningful.
fn scale_factor(r: &mut ChaCha8Rng) -> f64 {
    loop {
        let c: f64 = r.random_range(0.5..=2.0);
        if c.ln().abs() > 0.05 {
            return c;
        }
    }
}

const GAP_TOL: f64 = 1e-8;
const CONJUGATION_CHECKS: usize = 10;

fn zero_set_agreement(cfg: &AcceptanceConfig) -> Result<(bool, String)> {
    if cfg.samples == 0 {
        return Err(Error::Shape("samples must be at least 1".into()));
    }
    let mut partitions = vec![parts(&[1, 1]), parts(&[1, 2]), parts(&[1, 1, 1])];
    if cfg.max_n >= 4 {
        partitions.extend([parts(&[2, 2]), parts(&[1, 1, 1, 1])]);
    }
    let budget = if cfg.max_n >= 4 { 900.0 } else { 300.0 } * (cfg.samples as f64 / 50.0).max(1.0);
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut counts = Vec::new();
    for (pi, p) in partitions.iter().enumerate() {
        let certifier = Certifier::new(CertifierConfig {
            seed: cfg.seed,
            ..CertifierConfig::default()
        });
        let (mut on_ok, mut gen_ok, mut flips) = (0, 0, 0);
        for j in 0..cfg.samples {
            let (planted, _) = on_variety_tuple(p, sub_seed(cfg, 2 * pi as u64, j as u64), GAP_TOL)?;
            let random = random_tuple(p, sub_seed(cfg, 2 * pi as u64 + 1, j as u64));
            for (t, want) in [(&planted, Status::OnVariety), (&random, Status::Generic)] {
                let v = certifier.certify(t)?;
                let oracle = oracle_detect(t, GAP_TOL)?;
                let oracle_status = if oracle.on_variety() { Status::OnVariety } else { Status::Generic };
                if v.status == want && oracle_status == want {
                    if want == Status::OnVariety {
                        on_ok += 1;
                    } else {
                        gen_ok += 1;
                    }
                } else {
                    failures.push(format!(
                        "{p} sample {j}: expected {want}, certifier {} (residual {:.2}, scale {:.2}), oracle {oracle_status}",
                        v.status, v.residual, v.scale
                    ));
                }
                if j < CONJUGATION_CHECKS {
                    let s = well_conditioned_similarity(p.n(), sub_seed(cfg, 97 + pi as u64, j as u64))?;
                    let moved = certifier.certify(&t.conjugated(&s)?)?;
                    if moved.status != v.status {
                        flips += 1;
                        failures.push(format!(
                            "{p} sample {j}: conjugation changed {} to {}",
                            v.status, moved.status
                        ));
                    }
                }
            }
        }
        counts.push(format!(
            "{p}: {on_ok}/{s} on, {gen_ok}/{s} generic, {flips} flips",
            s = cfg.samples
        ));
    }
    let secs = start.elapsed().as_secs_f64();
    if secs > budget {
        failures.push(format!("runtime {secs:.0}s exceeds {budget:.0}s"));
    }
    let mut detail = counts.join("; ");
    if let Some(first) = failures.first() {
        detail = format!("{detail}; {} failure(s), first: {first}", failures.len());
    }
    Ok((failures.is_empty(), detail))
}

fn collision_kernel(cfg: &AcceptanceConfig) -> Result<(bool, String)> {
    let opts = EvalOptions::default();
    let mut checked = 0;
    let mut sharp = 0;
    let mut failures = Vec::new();
    for (pi, p) in compositions_up_to(cfg.max_n.min(3)).iter().enumerate() {
        for (si, (s, e)) in charged_sub_partitions(p).into_iter().enumerate() {
            let t = single_collision_tuple(p, &s, sub_seed(cfg, 200 + pi as u64, si as u64))?;
            let eigs: Vec<Vec<Complex64>> = t.matrices().iter().map(eigenvalues).collect::<Result<_>>()?;
            let vanished: Vec<String> = enumerate_sub_partitions(p)
                .into_iter()
                .filter(|q| q.weight() >= 2 && eval_d(&eigs, p, q).value.is_zero)
                .map(|q| q.to_string())
                .collect();
            if vanished != [s.to_string()] {
                failures.push(format!("{p} {s}: vanishing factors {vanished:?}"));
            }
            let m = krylov_matrix(&t, &opts)?;
            let n_dim = m.dim();
            let rank = m.numerical_rank(1e-8)?;
            checked += 1;
            if rank + e as usize == n_dim {
                sharp += 1;
            }
            if rank + e as usize > n_dim {
                failures.push(format!("{p} {s}: rank {rank} > N - exponent = {}", n_dim - e as usize));
            }
        }
    }
    let mut detail = format!("{checked} collision tuples, rank <= N - exponent, bound attained in {sharp}");
    if let Some(first) = failures.first() {
        detail = format!("{detail}; {} failure(s), first: {first}", failures.len());
    }
    Ok((failures.is_empty() && checked > 0, detail))
}

fn per_matrix_degrees(cfg: &AcceptanceConfig) -> Result<(bool, String)> {
    const TUPLES: usize = 10;
    let opts = EvalOptions::default();
    let mut failures = Vec::new();
    // Frozen reference degrees: (partition, per-matrix, total).
    for (k, per, total) in [(&[1, 1][..], 2, 4), (&[1, 1, 1][..], 27, 81), (&[2, 2][..], 72, 144)] {
        let p = parts(k);
        if hatp_degree(&p, DegreeSelector::Matrix(0))? != per || hatp_degree(&p, DegreeSelector::Total)? != total {
            failures.push(format!("{p}: degree table mismatch"));
        }
    }
    let mut checks = 0;
    let mut worst_rel = 0.0f64;
    for (pi, p) in compositions_up_to(cfg.max_n.min(4)).iter().enumerate() {
        let n = p.n();
        if p.parts().iter().all(|&k| k == 1) {
            let total = hatp_degree(p, DegreeSelector::Total)?;
            if total != (n as u64).pow(n as u32) * binomial(n, 2) {
                failures.push(format!("{p}: total degree {total} is not n^n C(n,2)"));
            }
        }
        let mut r = rng(cfg, 300 + pi as u64);
        let mut measured = 0;
        let mut attempt = 0u64;
        while measured < TUPLES {
            if attempt >= 3 * TUPLES as u64 {
                failures.push(format!("{p}: too few well-conditioned tuples"));
                break;
            }
            let t = random_tuple(p, sub_seed(cfg, 300 + pi as u64, attempt));
            attempt += 1;
            let mut results = Vec::new();
            for i in 0..p.len() {
                let c = scale_factor(&mut r);
                results.push((i, c, homogeneity_check(&t, i, c, &opts)?));
            }
            if results.iter().any(|(_, _, h)| matches!(h, Homogeneity::Indeterminate { .. })) {
                continue;
            }
            measured += 1;
            for (i, c, h) in results {
                let Homogeneity::Measured { error, degree, passed, .. } = h else {
                    unreachable!("indeterminate results were skipped")
                };
                checks += 1;
                let rel = if degree == 0 { error } else { error / (degree as f64 * c.ln().abs()) };
                worst_rel = worst_rel.max(rel);
                if !passed || rel >= 1e-6 || degree != hatp_degree(p, DegreeSelector::Matrix(i))? {
                    failures.push(format!("{p} matrix {i}, c = {c:.3}: error {error:.2e}, relative {rel:.2e}"));
                }
            }
        }
    }
    let mut detail = format!("{checks} scalings, worst relative error {worst_rel:.2e}");
    if let Some(first) = failures.first() {
        detail = format!("{detail}; {} failure(s), first: {first}", failures.len());
    }
    Ok((failures.is_empty(), detail))
}

fn joint_homogeneity(cfg: &AcceptanceConfig) -> Result<(bool, String)> {
    const TUPLES: usize = 10;
    let opts = EvalOptions::default();
    let mut worst = 0.0f64;
    let mut checks = 0;
    let mut failures = Vec::new();
    for (pi, p) in compositions_up_to(cfg.max_n.min(3)).iter().enumerate() {
        if p_joint_degree(p) == 0 {
            continue;
        }
        let mut r = rng(cfg, 400 + pi as u64);
        for j in 0..TUPLES {
            let t = random_tuple(p, sub_seed(cfg, 400 + pi as u64, j as u64));
            let c = scale_factor(&mut r);
            let rel = joint_homogeneity_error(&t, c, &opts)?;
            checks += 1;
            worst = worst.max(rel);
            if !(rel < 1e-6) {
                failures.push(format!("{p} tuple {j}: relative error {rel:.2e}"));
            }
        }
    }
    let mut detail = format!("{checks} tuples, worst relative error {worst:.2e}");
    if let Some(first) = failures.first() {
        detail = format!("{detail}; first failure: {first}");
    }
    Ok((failures.is_empty(), detail))
}

/// Largest distance in a greedy nearest matching of two equal-size multisets.
fn multiset_distance(expected: &[Complex64], computed: &[Complex64]) -> f64 {
    let mut used = vec![false; computed.len()];
    let mut worst = 0.0f64;
    for e in expected {
        let (j, d) = computed
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, c)| (j, (c - e).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("multisets have equal size");
        used[j] = true;
        worst = worst.max(d);
    }
    worst
}

fn kronecker_spectrum(cfg: &AcceptanceConfig) -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    let mut failures = Vec::new();
    let partitions = compositions_up_to(cfg.max_n.min(4));
    for (pi, p) in partitions.iter().enumerate() {
        let t = random_tuple(p, sub_seed(cfg, 500, pi as u64));
        let a = kronecker_sum_operator(&t, usize::MAX)?;
        let norm = singular_values(&a)?.first().copied().unwrap_or(0.0);
        let lambdas: Vec<Vec<Complex64>> = t.matrices().iter().map(eigenvalues).collect::<Result<_>>()?;
        let basis = TensorBasis::new(p);
        let expected: Vec<Complex64> = (0..basis.dim())
            .map(|flat| {
                let subsets = basis.unflat_index(flat).expect("index in range");
                subsets
                    .iter()
                    .enumerate()
                    .flat_map(|(i, f)| f.iter().map(move |&j| (i, j)))
                    .map(|(i, j)| lambdas[i][j])
                    .sum()
            })
            .collect();
        let d = multiset_distance(&expected, &eigenvalues(&a)?) / norm;
        worst = worst.max(d);
        if !(d < 1e-7) {
            failures.push(format!("{p}: distance {d:.2e} ‖A‖"));
        }
    }
    let mut detail = format!("{} partitions, worst mismatch {worst:.2e} ‖A‖", partitions.len());
    if let Some(first) = failures.first() {
        detail = format!("{detail}; first failure: {first}");
    }
    Ok((failures.is_empty(), detail))
}

fn gaussian_vector(r: &mut ChaCha8Rng, n: usize) -> DVector<Complex64> {
    DVector::from_fn(n, |_, _| Complex64::new(StandardNormal.sample(r), StandardNormal.sample(r)))
}

fn covector_pairing(cfg: &AcceptanceConfig) -> Result<(bool, String)> {
    const FAMILIES: usize = 100;
    let mut worst = 0.0f64;
    let mut failures = Vec::new();
    let partitions = compositions_up_to(cfg.max_n.min(4));
    for (pi, p) in partitions.iter().enumerate() {
        let n = p.n();
        let w = determinant_covector(p);
        let mut r = rng(cfg, 600 + pi as u64);
        for j in 0..FAMILIES {
            let groups: Vec<Vec<DVector<Complex64>>> = p
                .parts()
                .iter()
                .map(|&k| (0..k).map(|_| gaussian_vector(&mut r, n)).collect())
                .collect();
            let columns: Vec<DVector<Complex64>> = groups.iter().flatten().cloned().collect();
            let det = lu_logdet(&ComplexMatrix::from_columns(&columns))?;
            let paired = LogComplex::from_complex(pair_with_decomposable(p, &w, &groups)?);
            let rel = paired.relative_distance(det);
            worst = worst.max(rel);
            if !(rel < 1e-12) {
                failures.push(format!("{p} family {j}: relative error {rel:.2e}"));
            }
        }
    }
    let mut detail = format!(
        "{} families over {} partitions, worst relative error {worst:.2e}",
        FAMILIES * partitions.len(),
        partitions.len()
    );
    if let Some(first) = failures.first() {
        detail = format!("{detail}; {} failure(s), first: {first}", failures.len());
    }
    Ok((failures.is_empty(), detail))
}

fn commutator(t: &MatrixTuple) -> ComplexMatrix {
    let (a, b) = (&t.matrices()[0], &t.matrices()[1]);
    a * b - b * a
}

fn commutator_closed_form(cfg: &AcceptanceConfig) -> Result<(bool, String)> {
    const PAIRS: usize = 10;
    let p = parts(&[1, 1]);
    let opts = EvalOptions::default();
    let certifier = CertifierConfig {
        seed: cfg.seed,
        ..CertifierConfig::default()
    };
    let mut ratios = Vec::with_capacity(PAIRS);
    let mut failures = Vec::new();
    for j in 0..PAIRS {
        let t = random_tuple(&p, sub_seed(cfg, 700, j as u64));
        let phat = eval_phat(&t, &opts)?;
        if phat.ill_conditioned {
            failures.push(format!("random pair {j} is ill-conditioned"));
            continue;
        }
        ratios.push((phat.value / lu_logdet(&commutator(&t))?).to_complex());
        let oracle = oracle_detect(&t, GAP_TOL)?;
        let verdict = certify_membership(&t, &certifier)?;
        if oracle.on_variety() || verdict.status != Status::Generic {
            failures.push(format!("random pair {j}: certifier {}, oracle disagrees", verdict.status));
        }
        // A planted pair shares an eigenvector: the commutator is singular
        // and both tests must see it.
        let (planted, _) = on_variety_tuple(&p, sub_seed(cfg, 701, j as u64), GAP_TOL)?;
        let comm = commutator(&planted);
        let sv = singular_values(&comm)?;
        let oracle = oracle_detect(&planted, GAP_TOL)?;
        let verdict = certify_membership(&planted, &certifier)?;
        if sv[1] > 1e-10 * sv[0] || !oracle.on_variety() || verdict.status != Status::OnVariety {
            failures.push(format!(
                "planted pair {j}: commutator σ ratio {:.2e}, certifier {}, oracle {}",
                sv[1] / sv[0],
                verdict.status,
                oracle.on_variety()
            ));
        }
    }
    let mean: Complex64 = ratios.iter().sum::<Complex64>() / ratios.len().max(1) as f64;
    let spread = (ratios.iter().map(|r| (r - mean).norm_sqr()).sum::<f64>() / ratios.len().max(1) as f64).sqrt();
    let rel_std = spread / mean.norm();
    if !(rel_std < 1e-6) {
        failures.push(format!("ratio relative std {rel_std:.2e}"));
    }
    let mut detail = format!("P-hat / det[A1,A2] = {mean:.6}, relative std {rel_std:.2e}");
    if let Some(first) = failures.first() {
        detail = format!("{detail}; {} failure(s), first: {first}", failures.len());
    }
    Ok((failures.is_empty(), detail))
}

fn d_permutation_invariance(cfg: &AcceptanceConfig) -> Result<(bool, String)> {
    const PERMUTATIONS: usize = 20;
    let mut worst = 0.0f64;
    let mut factors = 0;
    let mut failures = Vec::new();
    for (pi, p) in compositions_up_to(cfg.max_n.min(4)).iter().enumerate() {
        let t = random_tuple(p, sub_seed(cfg, 800, pi as u64));
        let eigs: Vec<Vec<Complex64>> = t.matrices().iter().map(eigenvalues).collect::<Result<_>>()?;
        let mut r = rng(cfg, 800 + pi as u64);
        for s in enumerate_sub_partitions(p).into_iter().filter(|s| s.weight() >= 2) {
            factors += 1;
            let base = eval_d(&eigs, p, &s).value;
            for _ in 0..PERMUTATIONS {
                let mut shuffled = eigs.clone();
                for list in &mut shuffled {
                    list.shuffle(&mut r);
                }
                let rel = eval_d(&shuffled, p, &s).value.relative_distance(base);
                worst = worst.max(rel);
                if !(rel < 1e-8) {
                    failures.push(format!("{p} {s}: relative change {rel:.2e}"));
                }
            }
        }
    }
    let mut detail = format!("{factors} factors x {PERMUTATIONS} permutations, worst relative change {worst:.2e}");
    if let Some(first) = failures.first() {
        detail = format!("{detail}; {} failure(s), first: {first}", failures.len());
    }
    Ok((failures.is_empty() && factors > 0, detail))
}

fn collision_uniqueness(_cfg: &AcceptanceConfig) -> Result<(bool, String)> {
    let mut checked = 0;
    let mut failures = Vec::new();
    for a in 1..=4usize {
        for b in 2 * a..=16 {
            checked += 1;
            if let Err(e) = unique_collision(a, b) {
                failures.push(format!("(a, b) = ({a}, {b}): {e}"));
            }
        }
    }
    let mut detail = format!("{checked} (a, b) pairs with a <= 4, b <= 16 have exactly one equal-sum pair");
    if let Some(first) = failures.first() {
        detail = format!("{} failure(s), first: {first}", failures.len());
    }
    Ok((failures.is_empty(), detail))
}
