//! Fixtures shared by the benchmarks.

use tuplevar_core::generators::{on_variety_tuple, random_tuple};
use tuplevar_core::{MatrixTuple, Partition};

/// Partitions timed by every benchmark group, smallest tensor space first.
pub const PARTITIONS: [&[usize]; 4] = [&[1, 1], &[1, 1, 1], &[2, 2], &[1, 1, 1, 1]];

pub fn partition(parts: &[usize]) -> Partition {
    Partition::from_parts(parts).expect("benchmark partitions are valid")
}

/// Label such as `k=1,1,1 N=27`.
pub fn label(p: &Partition) -> String {
    let parts: Vec<String> = p.parts().iter().map(ToString::to_string).collect();
    format!("k={} N={}", parts.join(","), p.tensor_dim())
}

pub fn random(parts: &[usize]) -> MatrixTuple {
    random_tuple(&partition(parts), 1)
}

pub fn planted(parts: &[usize]) -> MatrixTuple {
    on_variety_tuple(&partition(parts), 1, 1e-8)
        .expect("planting succeeds for benchmark partitions")
        .0
}
