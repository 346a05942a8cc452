use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use tuplevar_bench::{label, partition, planted, random, PARTITIONS};
use tuplevar_core::certifier::{eval_p, eval_phat, Certifier, CertifierConfig, EvalOptions, KrylovBasis};
use tuplevar_core::multilinear::kronecker_sum_operator;
use tuplevar_core::oracle::oracle_detect;

fn operator(c: &mut Criterion) {
    let mut g = c.benchmark_group("kronecker_sum_operator");
    for parts in PARTITIONS {
        let t = random(parts);
        g.bench_function(label(t.partition()), |b| {
            b.iter(|| kronecker_sum_operator(black_box(&t), usize::MAX).unwrap())
        });
    }
    g.finish();
}

fn determinant(c: &mut Criterion) {
    let mut g = c.benchmark_group("eval_p");
    g.sample_size(10);
    for parts in PARTITIONS {
        let t = random(parts);
        for basis in [KrylovBasis::Power, KrylovBasis::Orthogonal, KrylovBasis::OrthogonalExtended] {
            let opts = EvalOptions {
                basis,
                ..EvalOptions::default()
            };
            g.bench_with_input(BenchmarkId::new(format!("{basis:?}"), label(t.partition())), &t, |b, t| {
                b.iter(|| eval_p(black_box(t), &opts).unwrap())
            });
        }
    }
    g.finish();
}

fn quotient(c: &mut Criterion) {
    let mut g = c.benchmark_group("eval_phat");
    g.sample_size(10);
    for parts in PARTITIONS {
        let t = random(parts);
        g.bench_function(label(t.partition()), |b| {
            b.iter(|| eval_phat(black_box(&t), &EvalOptions::default()).unwrap())
        });
    }
    g.finish();
}

fn membership(c: &mut Criterion) {
    let mut g = c.benchmark_group("certify");
    g.sample_size(10);
    for parts in PARTITIONS {
        let certifier = Certifier::new(CertifierConfig::default());
        // Calibration is cached per partition; time only the verdict.
        certifier.calibration_scale(&partition(parts)).unwrap();
        let t = planted(parts);
        g.bench_function(label(t.partition()), |b| b.iter(|| certifier.certify(black_box(&t)).unwrap()));
    }
    g.finish();
}

fn oracle(c: &mut Criterion) {
    let mut g = c.benchmark_group("oracle_detect");
    for parts in PARTITIONS {
        let t = random(parts);
        g.bench_function(label(t.partition()), |b| b.iter(|| oracle_detect(black_box(&t), 1e-8).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, operator, determinant, quotient, membership, oracle);
criterion_main!(benches);
