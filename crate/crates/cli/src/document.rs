//! JSON tuple documents: `matrices[i][row][col] = [re, im]`.

use serde::{Deserialize, Serialize};
use tuplevar_core::{Complex64, ComplexMatrix, MatrixTuple, Partition};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TupleDocument {
    pub n: usize,
    pub partition: Vec<usize>,
    pub matrices: Vec<Vec<Vec<[f64; 2]>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<Metadata>,
}

impl TupleDocument {
    pub fn parse(text: &str) -> Result<Self, String> {
        serde_json::from_str(text).map_err(|e| format!("malformed tuple document: {e}"))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents hold only finite numbers")
    }

    pub fn from_tuple(t: &MatrixTuple, metadata: Option<Metadata>) -> Self {
        let matrices = t
            .matrices()
            .iter()
            .map(|m| {
                (0..m.nrows())
                    .map(|r| (0..m.ncols()).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect())
                    .collect()
            })
            .collect();
        Self {
            n: t.n(),
            partition: t.partition().parts().to_vec(),
            matrices,
            metadata,
        }
    }

    /// Validates shapes and values and builds the tuple.
    pub fn to_tuple(&self) -> Result<MatrixTuple, String> {
        let n = self.n;
        if self.partition.iter().sum::<usize>() != n {
            return Err(format!(
                "partition must sum to n (n = {n}, partition sums to {})",
                self.partition.iter().sum::<usize>()
            ));
        }
        let partition = Partition::new(n, self.partition.clone()).map_err(|e| e.to_string())?;
        if self.matrices.len() != self.partition.len() {
            return Err(format!(
                "expected {} matrices for the partition, found {}",
                self.partition.len(),
                self.matrices.len()
            ));
        }
        let mut matrices = Vec::with_capacity(self.matrices.len());
        for (i, rows) in self.matrices.iter().enumerate() {
            if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                return Err(format!("matrix {i} is not {n}x{n}"));
            }
            if rows.iter().flatten().flatten().any(|x| !x.is_finite()) {
                return Err(format!("matrix {i} has a non-finite entry"));
            }
            matrices.push(ComplexMatrix::from_fn(n, n, |r, c| {
                let [re, im] = rows[r][c];
                Complex64::new(re, im)
            }));
        }
        MatrixTuple::new(partition, matrices).map_err(|e| e.to_string())
    }
}
