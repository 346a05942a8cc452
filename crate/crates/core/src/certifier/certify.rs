use std::collections::HashMap;
use std::sync::Mutex;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::evaluate::{eval_phat, EvalOptions, PhatEvaluation};
use super::krylov::KrylovBasis;
use crate::error::{Error, Result};
use crate::generators::random_tuple;
use crate::multilinear::{Partition, DEFAULT_SIZE_CAP};
use crate::numerics::LogComplex;
use crate::oracle::Witness;
use crate::tuple::MatrixTuple;

/// Thresholds and seeds of the membership test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertifierConfig {
    /// OnVariety when the residual sits this far below the calibration scale.
    pub drop: f64,
    /// Generic when the residual is no further than this below the scale.
    pub margin: f64,
    pub gap_tol: f64,
    pub calibration_samples: usize,
    pub seed: u64,
    pub size_cap: usize,
    /// Relative step of the finite-difference probes.
    pub probe_step: f64,
    pub probe_directions: usize,
}

impl Default for CertifierConfig {
    fn default() -> Self {
        Self {
            drop: 23.0,
            margin: 11.5,
            gap_tol: 1e-8,
            calibration_samples: 8,
            seed: 0,
            size_cap: DEFAULT_SIZE_CAP,
            probe_step: 1e-6,
            probe_directions: 3,
        }
    }
}

impl CertifierConfig {
    fn eval_options(&self) -> EvalOptions {
        EvalOptions {
            size_cap: self.size_cap,
            ..EvalOptions::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    OnVariety,
    Generic,
    Indeterminate,
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Status::OnVariety => "on_variety",
            Status::Generic => "generic",
            Status::Indeterminate => "indeterminate",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub status: Status,
    /// `ln` of the estimated relative distance to `{P̂ = 0}`; `-inf` when
    /// `P̂` vanishes exactly.
    pub residual: f64,
    /// Mean residual of random tuples with the same partition.
    pub scale: f64,
    pub denom_margin: f64,
    /// Smallest eigenvalue gap of each normalized matrix.
    pub min_gaps: Vec<f64>,
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

/// Residual of one tuple together with the evaluation it came from.
#[derive(Debug, Clone)]
pub struct ResidualEvaluation {
    pub residual: f64,
    pub phat: PhatEvaluation,
}

/// Fixed probe directions: one unit-Frobenius matrix per factor.
fn probe_tuple(t: &MatrixTuple, seed: u64) -> MatrixTuple {
    random_tuple(t.partition(), seed)
}

/// `ln|z - 1|` for `z` in log form, without overflow.
fn ln_abs_minus_one(z: LogComplex) -> f64 {
    if z.is_zero {
        return 0.0;
    }
    if z.log_mag > 40.0 {
        return z.log_mag;
    }
    (z.to_complex() - Complex64::new(1.0, 0.0)).norm().ln()
}

/// Normalized residual of `P̂` at the unit-norm rescaling of `t`.
///
/// Raw `ln|P̂|` spreads over hundreds of nats between random tuples once
/// `n ≥ 3` and shifts under conjugation, so it is divided by the size of a
/// directional derivative: with `q = P̂(t + εE)/P̂(t)` for a few fixed unit
/// directions `E`, the residual is `ln ε - max_E ln|q - 1|`, i.e. roughly
/// `ln(|P̂| / |∂_E P̂|)`, the log of a Newton step to the zero set.
pub fn normalized_residual(t: &MatrixTuple, cfg: &CertifierConfig) -> Result<ResidualEvaluation> {
    let opts = cfg.eval_options();
    let t = t.normalized();
    // The base value may sit at the rounding floor, so it gets the extended
    // recurrence; the probes are ε away from the zero set and do not.
    let phat = eval_phat(
        &t,
        &EvalOptions {
            basis: KrylovBasis::OrthogonalExtended,
            ..opts
        },
    )?;
    if phat.value.is_zero {
        return Ok(ResidualEvaluation {
            residual: f64::NEG_INFINITY,
            phat,
        });
    }
    let eps = cfg.probe_step;
    let mut steepest = f64::NEG_INFINITY;
    for d in 0..cfg.probe_directions.max(1) {
        let dir = probe_tuple(&t, cfg.seed.wrapping_add(0x9e37_79b9).wrapping_add(d as u64));
        let moved: Vec<_> = t
            .matrices()
            .iter()
            .zip(dir.matrices())
            .map(|(a, e)| a + e * Complex64::new(eps, 0.0))
            .collect();
        let moved = MatrixTuple::new(t.partition().clone(), moved)?;
        let q = eval_phat(&moved, &opts)?.value / phat.value;
        steepest = steepest.max(ln_abs_minus_one(q));
    }
    Ok(ResidualEvaluation {
        residual: eps.ln() - steepest,
        phat,
    })
}

/// Membership test with a per-partition calibration cache.
#[derive(Debug, Default)]
pub struct Certifier {
    cfg: CertifierConfig,
    scales: Mutex<HashMap<Partition, f64>>,
}

impl Certifier {
    pub fn new(cfg: CertifierConfig) -> Self {
        Self {
            cfg,
            scales: Mutex::new(HashMap::new()),
        }
    }

    pub fn config(&self) -> &CertifierConfig {
        &self.cfg
    }

    /// Mean residual over seeded random unit-norm tuples.
    pub fn calibration_scale(&self, p: &Partition) -> Result<f64> {
        if let Some(s) = self.scales.lock().expect("calibration cache poisoned").get(p) {
            return Ok(*s);
        }
        let samples = self.cfg.calibration_samples.max(1);
        let values: Vec<f64> = std::thread::scope(|scope| {
            let handles: Vec<_> = (0..samples)
                .map(|j| {
                    scope.spawn(move || {
                        let seed = self.cfg.seed.wrapping_mul(0x5851_f42d).wrapping_add(j as u64 + 1);
                        normalized_residual(&random_tuple(p, seed), &self.cfg).map(|r| r.residual)
                    })
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("calibration worker panicked"))
                .collect::<Result<Vec<f64>>>()
        })?
        .into_iter()
        .filter(|r| r.is_finite())
        .collect();
        if values.is_empty() {
            return Err(Error::NumericalFailure(
                "no calibration sample produced a finite residual".into(),
            ));
        }
        let scale = values.iter().sum::<f64>() / values.len() as f64;
        self.scales
            .lock()
            .expect("calibration cache poisoned")
            .insert(p.clone(), scale);
        Ok(scale)
    }

    /// Classifies the tuple. Only oversize input is an error; numerical
    /// trouble yields an indeterminate verdict with a note.
    pub fn certify(&self, t: &MatrixTuple) -> Result<Verdict> {
        let dim = t.partition().tensor_dim();
        if dim > self.cfg.size_cap {
            return Err(Error::TooLarge {
                dim,
                cap: self.cfg.size_cap,
            });
        }
        let scale = match self.calibration_scale(t.partition()) {
            Ok(s) => s,
            Err(e) => return Ok(indeterminate(f64::NAN, f64::NAN, e.to_string())),
        };
        let r = match normalized_residual(t, &self.cfg) {
            Ok(r) => r,
            Err(e) => return Ok(indeterminate(scale, f64::NAN, e.to_string())),
        };
        let min_gaps: Vec<f64> = r.phat.spectra.iter().map(|s| s.min_gap).collect();
        let mut notes = Vec::new();
        let mut status = if r.residual < scale - self.cfg.drop {
            Status::OnVariety
        } else if r.residual > scale - self.cfg.margin {
            Status::Generic
        } else {
            notes.push("residual falls between the drop and margin thresholds".to_string());
            Status::Indeterminate
        };
        if let Some((i, g)) = min_gaps
            .iter()
            .enumerate()
            .find(|(_, g)| **g < self.cfg.gap_tol)
        {
            notes.push(format!("matrix {i} has eigenvalue gap {g:.3e}"));
            status = Status::Indeterminate;
        }
        if r.phat.ill_conditioned {
            notes.push(format!(
                "a charged spectral factor nearly vanishes (ln margin {:.3})",
                r.phat.denom_margin
            ));
            status = Status::Indeterminate;
        }
        Ok(Verdict {
            status,
            residual: r.residual,
            scale,
            denom_margin: r.phat.denom_margin,
            min_gaps,
            notes,
            witness: None,
        })
    }
}

fn indeterminate(scale: f64, denom_margin: f64, note: String) -> Verdict {
    Verdict {
        status: Status::Indeterminate,
        residual: f64::NAN,
        scale,
        denom_margin,
        min_gaps: Vec::new(),
        notes: vec![note],
        witness: None,
    }
}

/// One-shot certification without a shared calibration cache.
pub fn certify_membership(t: &MatrixTuple, cfg: &CertifierConfig) -> Result<Verdict> {
    Certifier::new(cfg.clone()).certify(t)
}
