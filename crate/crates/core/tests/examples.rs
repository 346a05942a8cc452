//! Small hand-checkable cases run through the public API.

use std::f64::consts::LN_2;

use tuplevar_core::certifier::{
    certify_membership, eval_p, eval_phat, hatp_degree, homogeneity_check, krylov_matrix, CertifierConfig,
    DegreeSelector, EvalOptions, Homogeneity, KrylovBasis, Status,
};
use tuplevar_core::generators::{on_variety_tuple, random_tuple, single_collision_tuple};
use tuplevar_core::numerics::eigenvalues;
use tuplevar_core::oracle::{agree, oracle_detect};
use tuplevar_core::spectral::{eval_d, eval_denominator, exponent, SubPartition};
use tuplevar_core::{Complex64, ComplexMatrix, MatrixTuple, Partition};

fn m2(rows: [[f64; 2]; 2]) -> ComplexMatrix {
    ComplexMatrix::from_fn(2, 2, |r, c| Complex64::new(rows[r][c], 0.0))
}

fn pair(a: [[f64; 2]; 2], b: [[f64; 2]; 2]) -> MatrixTuple {
    MatrixTuple::new(Partition::from_parts(&[1, 1]).unwrap(), vec![m2(a), m2(b)]).unwrap()
}

const DIAG12: [[f64; 2]; 2] = [[1.0, 0.0], [0.0, 2.0]];
const SHARED: [[f64; 2]; 2] = [[3.0, 0.0], [1.0, 4.0]];
const SWAP: [[f64; 2]; 2] = [[0.0, 1.0], [1.0, 0.0]];
const JORDAN: [[f64; 2]; 2] = [[1.0, 1.0], [0.0, 1.0]];

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

#[test]
fn p_vanishes_on_a_shared_eigenvector() {
    let opts = EvalOptions::default();
    assert!(eval_p(&pair(DIAG12, SHARED), &opts).unwrap().value.is_zero);
    assert!(!eval_p(&pair(DIAG12, SWAP), &opts).unwrap().value.is_zero);
    // Commuting diagonal matrices share e1 and e2.
    assert!(eval_p(&pair(DIAG12, [[3.0, 0.0], [0.0, 5.0]]), &opts).unwrap().value.is_zero);
}

#[test]
fn p_vanishes_at_a_single_collision() {
    let t = pair([[-2.0, 0.0], [0.0, 4.0]], [[-8.0, 0.0], [0.0, -14.0]]);
    assert!(eval_p(&t, &EvalOptions::default()).unwrap().value.is_zero);
    let phat = eval_phat(&t, &EvalOptions::default()).unwrap();
    assert!(phat.denominator.is_zero() && phat.ill_conditioned);
}

#[test]
fn d_factor_of_small_pair() {
    let p = Partition::from_parts(&[1, 1]).unwrap();
    let s = SubPartition::new(&p, vec![1, 1]).unwrap();
    let eigs = vec![vec![c(1.0), c(2.0)], vec![c(3.0), c(5.0)]];
    let d = eval_d(&eigs, &p, &s).value.to_complex();
    assert!((d - c(-3.0)).norm() < 1e-12, "{d}");
    let den = eval_denominator(&eigs, &p);
    assert_eq!(den.charged.len(), 1);
    assert_eq!(den.charged[0].1, 1);
    assert!((den.value.to_complex() - c(-3.0)).norm() < 1e-12);

    // λ11 - λ12 = -(λ21 - λ22) makes one oriented factor vanish.
    let balanced = vec![vec![c(1.0), c(2.0)], vec![c(5.0), c(4.0)]];
    assert!(eval_d(&balanced, &p, &s).value.is_zero);
}

#[test]
fn exponents() {
    let cases: [(&[usize], &[usize], u64); 3] = [
        (&[1, 1], &[1, 1], 1),
        (&[1, 1, 1], &[1, 1, 0], 3),
        (&[2, 2], &[1, 0], 12),
    ];
    for (k, kp, e) in cases {
        let p = Partition::from_parts(k).unwrap();
        assert_eq!(exponent(&p, &SubPartition::new(&p, kp.to_vec()).unwrap()), e, "{k:?} {kp:?}");
    }
}

#[test]
fn degrees() {
    for (k, per, total) in [(&[1, 1][..], 2, 4), (&[1, 1, 1][..], 27, 81), (&[2, 2][..], 72, 144)] {
        let p = Partition::from_parts(k).unwrap();
        for i in 0..p.len() {
            assert_eq!(hatp_degree(&p, DegreeSelector::Matrix(i)).unwrap(), per);
        }
        assert_eq!(hatp_degree(&p, DegreeSelector::Total).unwrap(), total);
    }
}

#[test]
fn homogeneity_of_a_random_pair() {
    let t = random_tuple(&Partition::from_parts(&[1, 1]).unwrap(), 11);
    let opts = EvalOptions::default();
    let Homogeneity::Measured { error, passed, .. } = homogeneity_check(&t, 0, 1.0, &opts).unwrap() else {
        panic!("random pair is well conditioned");
    };
    assert!(passed && error == 0.0);
    let base = eval_phat(&t, &opts).unwrap().value.log_mag;
    let scaled = eval_phat(&t.with_scaled(0, c(2.0)), &opts).unwrap().value.log_mag;
    assert!((scaled - base - 2.0 * LN_2).abs() < 1e-8);
}

#[test]
fn certify_small_pairs() {
    let cfg = CertifierConfig::default();
    assert_eq!(certify_membership(&pair(DIAG12, SHARED), &cfg).unwrap().status, Status::OnVariety);
    assert_eq!(certify_membership(&pair(DIAG12, SWAP), &cfg).unwrap().status, Status::Generic);
    let jordan = certify_membership(&pair(JORDAN, SHARED), &cfg).unwrap();
    assert_eq!(jordan.status, Status::Indeterminate);
    assert!(jordan.notes.iter().any(|n| n.contains("gap")));
}

#[test]
fn oracle_small_pairs() {
    let on = oracle_detect(&pair(DIAG12, SHARED), 1e-8).unwrap();
    assert!(on.min_sigma < 1e-12);
    assert_eq!(on.witness.choice, vec![vec![1], vec![1]]);

    let off = oracle_detect(&pair(DIAG12, SWAP), 1e-8).unwrap();
    assert!(off.min_sigma >= 0.4);
    let cfg = CertifierConfig::default();
    assert!(agree(&certify_membership(&pair(DIAG12, SWAP), &cfg).unwrap(), &off));
}

#[test]
fn planted_plane_for_mixed_partition() {
    let p = Partition::from_parts(&[1, 2]).unwrap();
    for seed in 0..5 {
        let (t, w) = on_variety_tuple(&p, seed, 1e-8).unwrap();
        let out = oracle_detect(&t, 1e-8).unwrap();
        assert!(out.min_sigma < 1e-8 && w.sigma_min < 1e-8);
        assert_eq!(t, on_variety_tuple(&p, seed, 1e-8).unwrap().0);
    }
}

#[test]
fn collision_tuple_for_pair() {
    let p = Partition::from_parts(&[1, 1]).unwrap();
    let s = SubPartition::new(&p, vec![1, 1]).unwrap();
    let t = single_collision_tuple(&p, &s, 0).unwrap();
    let mut spectra: Vec<Vec<f64>> = t
        .matrices()
        .iter()
        .map(|a| eigenvalues(a).unwrap().iter().map(|z| z.re).collect())
        .collect();
    for v in &mut spectra {
        v.sort_by(f64::total_cmp);
    }
    let close = |a: &[f64], b: &[f64]| a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-9);
    assert!(close(&spectra[0], &[-2.0, 4.0]) && close(&spectra[1], &[-14.0, -8.0]), "{spectra:?}");
    assert!(eval_p(&t, &EvalOptions::default()).unwrap().value.is_zero);
    let m = krylov_matrix(&t, &EvalOptions::default()).unwrap();
    assert!(m.numerical_rank(1e-8).unwrap() <= 3);
}

#[test]
fn krylov_bases_agree_on_random_triples() {
    let t = random_tuple(&Partition::from_parts(&[1, 1, 1]).unwrap(), 5);
    let value = |basis| {
        eval_p(&t, &EvalOptions { basis, ..EvalOptions::default() })
            .unwrap()
            .value
    };
    let reference = value(KrylovBasis::OrthogonalExtended);
    assert!(value(KrylovBasis::Orthogonal).relative_distance(reference) < 1e-8);
}
