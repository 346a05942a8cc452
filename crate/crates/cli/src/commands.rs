use std::io::Read;

use serde_json::{json, Value};
use tuplevar_core::acceptance::{run_all, AcceptanceConfig};
use tuplevar_core::certifier::{
    eval_p, eval_phat, hatp_degree, p_joint_degree, Certifier, CertifierConfig, DegreeSelector, EvalOptions,
    Status,
};
use tuplevar_core::generators::{on_variety_tuple, random_tuple, single_collision_tuple};
use tuplevar_core::oracle::{oracle_detect, ORACLE_ZERO};
use tuplevar_core::spectral::{enumerate_sub_partitions, eval_d};
use tuplevar_core::{Complex64, Error, LogComplex, MatrixTuple, Partition, SubPartition};

use crate::document::{Metadata, TupleDocument};
use crate::{GenKind, GlobalArgs, Which};

pub const EXIT_GENERIC: u8 = 0;
pub const EXIT_INPUT: u8 = 1;
pub const EXIT_GENERATION: u8 = 2;
pub const EXIT_ON_VARIETY: u8 = 10;
pub const EXIT_INDETERMINATE: u8 = 20;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::GenerationFailure(_) => EXIT_GENERATION,
            Error::NonDiagonalizable { .. } | Error::NumericalFailure(_) => EXIT_INDETERMINATE,
            _ => EXIT_INPUT,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

type Outcome = Result<u8, Failure>;

fn read_document(g: &GlobalArgs) -> Result<TupleDocument, Failure> {
    let text = match &g.input {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))?,
        None => {
            let mut s = String::new();
            std::io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| Failure::input(format!("cannot read stdin: {e}")))?;
            s
        }
    };
    TupleDocument::parse(&text).map_err(Failure::input)
}

fn read_tuple(g: &GlobalArgs) -> Result<MatrixTuple, Failure> {
    let t = read_document(g)?.to_tuple().map_err(Failure::input)?;
    let dim = t.partition().tensor_dim();
    if dim > g.size_cap {
        return Err(Error::TooLarge { dim, cap: g.size_cap }.into());
    }
    Ok(t)
}

fn partition_of(n: Option<usize>, parts: Vec<usize>) -> Result<Partition, Failure> {
    let sum = parts.iter().sum::<usize>();
    let n = n.unwrap_or(sum);
    if sum != n {
        return Err(Failure::input(format!("partition must sum to n (n = {n}, partition sums to {sum})")));
    }
    Ok(Partition::new(n, parts)?)
}

/// Non-finite numbers become strings so the output stays valid JSON.
fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else if x.is_nan() {
        json!("nan")
    } else if x > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

fn log_complex(z: LogComplex) -> Value {
    if z.is_zero {
        return json!("zero");
    }
    let log10 = z.log10_mag();
    let mut v = json!({ "log10_magnitude": num(log10), "phase": num(z.phase) });
    if log10.abs() < 300.0 {
        v["magnitude"] = num(10f64.powf(log10));
    }
    v
}

fn complex(z: Complex64) -> Value {
    json!([num(z.re), num(z.im)])
}

fn emit(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("values are plain JSON"));
}

fn certifier_config(g: &GlobalArgs) -> CertifierConfig {
    CertifierConfig {
        drop: g.tolerance_drop,
        margin: g.tolerance_drop / 2.0,
        gap_tol: g.gap_tol,
        seed: g.seed,
        size_cap: g.size_cap,
        ..CertifierConfig::default()
    }
}

fn eval_options(g: &GlobalArgs) -> EvalOptions {
    EvalOptions {
        size_cap: g.size_cap,
        ..EvalOptions::default()
    }
}

pub fn certify(g: &GlobalArgs) -> Outcome {
    let t = read_tuple(g)?;
    let cfg = certifier_config(g);
    let v = Certifier::new(cfg.clone()).certify(&t)?;
    let mut out = json!({
        "status": v.status.to_string(),
        "residual": num(v.residual),
        "scale": num(v.scale),
        "on_variety_below": num(v.scale - cfg.drop),
        "generic_above": num(v.scale - cfg.margin),
        "denom_margin": num(v.denom_margin),
        "min_gaps": v.min_gaps.iter().copied().map(num).collect::<Vec<_>>(),
        "notes": v.notes,
        "seed": g.seed,
    });
    if v.status == Status::Indeterminate {
        out["suggestion"] = json!("retry on a small random perturbation of the tuple");
    }
    emit(&out);
    Ok(match v.status {
        Status::Generic => EXIT_GENERIC,
        Status::OnVariety => EXIT_ON_VARIETY,
        Status::Indeterminate => EXIT_INDETERMINATE,
    })
}

pub fn oracle(g: &GlobalArgs) -> Outcome {
    let t = read_tuple(g)?;
    let out = oracle_detect(&t, g.gap_tol)?;
    let choice: Vec<Vec<usize>> = out
        .witness
        .choice
        .iter()
        .map(|c| c.iter().map(|j| j + 1).collect())
        .collect();
    let eigenvalues: Vec<Vec<Value>> = out
        .witness
        .choice
        .iter()
        .zip(&out.spectra)
        .map(|(c, s)| c.iter().map(|&j| complex(s.eigenvalues[j])).collect())
        .collect();
    emit(&json!({
        "on_variety": out.on_variety(),
        "min_sigma": num(out.min_sigma),
        "threshold": ORACLE_ZERO,
        "witness": { "choice": choice, "eigenvalues": eigenvalues },
    }));
    Ok(if out.on_variety() { EXIT_ON_VARIETY } else { EXIT_GENERIC })
}

fn d_entry(eigs: &[Vec<Complex64>], p: &Partition, s: &SubPartition) -> Value {
    let d = eval_d(eigs, p, s);
    json!({
        "sub_partition": s.kprime(),
        "weight": s.weight(),
        "value": log_complex(d.value),
        "pairs": d.pairs,
    })
}

pub fn eval(g: &GlobalArgs, which: Which, sub: Option<Vec<usize>>, partition: Option<Vec<usize>>) -> Outcome {
    if which == Which::Degrees {
        let p = match partition {
            Some(parts) => partition_of(None, parts)?,
            None => read_tuple(g)?.partition().clone(),
        };
        let per = (0..p.len())
            .map(|i| hatp_degree(&p, DegreeSelector::Matrix(i)))
            .collect::<Result<Vec<_>, _>>()?;
        emit(&json!({
            "partition": p.parts(),
            "per_matrix": per,
            "total": hatp_degree(&p, DegreeSelector::Total)?,
            "p_joint": p_joint_degree(&p),
        }));
        return Ok(EXIT_GENERIC);
    }
    let t = read_tuple(g)?;
    let opts = eval_options(g);
    let out = match which {
        Which::P => {
            let v = eval_p(&t, &opts)?;
            json!({ "which": "P", "value": log_complex(v.value), "min_step_ratio": num(v.min_step_ratio) })
        }
        Which::D => {
            let p = t.partition();
            let eigs = t
                .matrices()
                .iter()
                .map(tuplevar_core::numerics::eigenvalues)
                .collect::<Result<Vec<_>, _>>()?;
            match sub {
                Some(k) => {
                    let s = SubPartition::new(p, k).map_err(|e| Failure::input(e.to_string()))?;
                    json!({ "which": "D", "factors": [d_entry(&eigs, p, &s)] })
                }
                None => {
                    let all: Vec<Value> = enumerate_sub_partitions(p).iter().map(|s| d_entry(&eigs, p, s)).collect();
                    json!({ "which": "D", "factors": all })
                }
            }
        }
        Which::Phat => {
            let v = eval_phat(&t, &opts)?;
            json!({
                "which": "Phat",
                "value": log_complex(v.value),
                "p": log_complex(v.p.value),
                "denominator": log_complex(v.denominator.value),
                "denom_margin": num(v.denom_margin),
                "ill_conditioned": v.ill_conditioned,
            })
        }
        Which::Degrees => unreachable!("handled above"),
    };
    emit(&out);
    Ok(EXIT_GENERIC)
}

pub fn generate(
    g: &GlobalArgs,
    kind: GenKind,
    n: Option<usize>,
    parts: Vec<usize>,
    sub: Option<Vec<usize>>,
) -> Outcome {
    let p = partition_of(n, parts)?;
    let (t, description) = match kind {
        GenKind::Random => (random_tuple(&p, g.seed), "random unit-norm tuple".to_string()),
        GenKind::OnVariety => (on_variety_tuple(&p, g.seed, g.gap_tol)?.0, "planted on-variety tuple".to_string()),
        GenKind::Collision => {
            let k = sub.ok_or_else(|| Failure::input("collision tuples need --sub-partition"))?;
            let s = SubPartition::new(&p, k).map_err(|e| Failure::input(e.to_string()))?;
            (single_collision_tuple(&p, &s, g.seed)?, format!("single collision at k' = {s}"))
        }
    };
    let doc = TupleDocument::from_tuple(
        &t,
        Some(Metadata {
            seed: Some(g.seed),
            description: Some(description),
        }),
    );
    println!("{}", doc.to_json());
    Ok(EXIT_GENERIC)
}

pub fn selftest(g: &GlobalArgs, max_n: usize, samples: usize) -> Outcome {
    if samples == 0 {
        return Err(Failure::input("samples must be ≥ 1"));
    }
    if max_n < 2 {
        return Err(Failure::input("max-n must be at least 2"));
    }
    let cfg = AcceptanceConfig {
        max_n,
        samples,
        seed: g.seed,
    };
    println!("selftest: max_n = {max_n}, samples = {samples}, seed = {}", g.seed);
    let reports = run_all(&cfg, |r| println!("{r}"));
    let failed = reports.iter().filter(|r| !r.passed).count();
    let secs: f64 = reports.iter().map(|r| r.elapsed.as_secs_f64()).sum();
    println!("selftest: {} passed, {failed} failed in {secs:.1}s", reports.len() - failed);
    Ok(if failed == 0 { EXIT_GENERIC } else { EXIT_INPUT })
}
