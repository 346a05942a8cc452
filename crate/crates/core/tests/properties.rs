use num_complex::Complex64;
use proptest::prelude::*;
use tuplevar_core::generators::random_tuple;
use tuplevar_core::multilinear::{enumerate_wedge_basis, flat_index, unflat_index, wedge_derivation};
use tuplevar_core::numerics::{eigendecomposition, eigenvalues, lu_logdet, numerical_rank, singular_values};
use tuplevar_core::{ComplexMatrix, LogComplex, Partition};

/// Random unit-Frobenius `n x n` matrices drawn through the seeded generator.
fn matrices(n: usize, count: usize, seed: u64) -> Vec<ComplexMatrix> {
    let p = Partition::new(n * count, vec![n; count]).unwrap();
    random_tuple(&p, seed)
        .into_matrices()
        .into_iter()
        .map(|m| m.view((0, 0), (n, n)).into_owned())
        .collect()
}

fn composition() -> impl Strategy<Value = Partition> {
    prop::collection::vec(1usize..=3, 1..=3).prop_map(|parts| Partition::from_parts(&parts).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn flat_index_roundtrip(p in composition(), pick in any::<prop::sample::Index>()) {
        let flat = pick.index(p.tensor_dim());
        let subsets = unflat_index(&p, flat).unwrap();
        prop_assert_eq!(flat_index(&p, &subsets).unwrap(), flat);
    }

    #[test]
    fn wedge_derivation_spectrum_is_subset_sums(n in 2usize..=4, k_off in 0usize..4, seed in any::<u64>()) {
        let k = 1 + k_off % n;
        let a = &matrices(n, 1, seed)[0];
        let lambda = eigenvalues(a).unwrap();
        let mut expected: Vec<Complex64> = enumerate_wedge_basis(n, k)
            .unwrap()
            .iter()
            .map(|s| s.iter().map(|&j| lambda[j]).sum())
            .collect();
        let mut got = eigenvalues(&wedge_derivation(a, k).unwrap()).unwrap();
        for v in [&mut expected, &mut got] {
            v.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
        }
        // Sorting is unstable under rounding, so match greedily instead.
        for e in &expected {
            let (j, d) = got
                .iter()
                .enumerate()
                .map(|(j, g)| (j, (g - e).norm()))
                .min_by(|x, y| x.1.total_cmp(&y.1))
                .unwrap();
            prop_assert!(d < 1e-10, "eigenvalue {e} missing, nearest at {d:e}");
            got.remove(j);
        }
    }

    #[test]
    fn log_complex_products(re in -1e3f64..1e3, im in -1e3f64..1e3, re2 in -1e3f64..1e3, im2 in -1e3f64..1e3) {
        let (a, b) = (Complex64::new(re, im), Complex64::new(re2, im2));
        prop_assume!(a.norm() > 1e-6 && b.norm() > 1e-6);
        let prod = (LogComplex::from_complex(a) * LogComplex::from_complex(b)).to_complex();
        prop_assert!((prod - a * b).norm() <= 1e-12 * (a * b).norm());
        let quot = (LogComplex::from_complex(a) / LogComplex::from_complex(b)).to_complex();
        prop_assert!((quot - a / b).norm() <= 1e-12 * (a / b).norm());
    }

    #[test]
    fn logdet_is_multiplicative(n in 1usize..=6, seed in any::<u64>()) {
        let m = matrices(n, 2, seed);
        let product = lu_logdet(&(&m[0] * &m[1])).unwrap();
        let split = lu_logdet(&m[0]).unwrap() * lu_logdet(&m[1]).unwrap();
        prop_assert!(product.relative_distance(split) < 1e-9);
    }

    #[test]
    fn eigenvalues_reproduce_trace_and_determinant(n in 1usize..=6, seed in any::<u64>()) {
        let a = &matrices(n, 1, seed)[0];
        let s = eigendecomposition(a).unwrap();
        let sum: Complex64 = s.eigenvalues.iter().sum();
        prop_assert!((sum - a.trace()).norm() < 1e-12);
        let prod = s.eigenvalues.iter().fold(LogComplex::ONE, |acc, &z| acc * LogComplex::from_complex(z));
        prop_assert!(prod.relative_distance(lu_logdet(a).unwrap()) < 1e-8);
        prop_assert!(s.backward_error < 1e-12);
    }

    #[test]
    fn rank_is_unitarily_invariant(n in 2usize..=6, r_off in 0usize..6, seed in any::<u64>()) {
        let r = 1 + r_off % n;
        let m = matrices(n, 3, seed);
        let low = m[0].columns(0, r) * m[1].rows(0, r);
        let q = m[2].clone().qr().q();
        prop_assert_eq!(numerical_rank(&low, 1e-10).unwrap(), r);
        prop_assert_eq!(numerical_rank(&(&q * &low), 1e-10).unwrap(), r);
        let s0 = singular_values(&low).unwrap();
        let s1 = singular_values(&(&low * q.adjoint())).unwrap();
        for (a, b) in s0.iter().zip(&s1) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn random_tuples_depend_only_on_seed(p in composition(), seed in any::<u64>()) {
        prop_assert_eq!(random_tuple(&p, seed), random_tuple(&p, seed));
    }
}
