//! Batch property runs: many generated instances, certificate against oracle.
//!
//! Instance `i` is drawn from `derive_seed(seed, i)`, so results do not depend
//! on thread count or completion order.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::hamiltonian::certify_hamiltonian;
use crate::harness::generate::{
    derive_seed, generate, generate_hamiltonian, random_spec, rng_from_seed, GeneratorKind, GeneratorSpec,
};
use crate::harness::io::Report;
use crate::tolerance::{ToleranceConfig, Verdict};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BatchConfig {
    pub kind: GeneratorKind,
    pub count: usize,
    pub seed: u64,
    pub max_dim: usize,
    pub tol: ToleranceConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchItem {
    pub index: usize,
    pub spec: GeneratorSpec,
    /// `None` when generation failed.
    pub report: Option<Report>,
    pub oracle: Option<Verdict>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl BatchItem {
    /// Oracle outside the band, so agreement is decidable.
    pub fn decided(&self) -> bool {
        self.oracle.is_some_and(|v| v != Verdict::Indeterminate)
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct BatchSummary {
    pub kind: String,
    pub count: usize,
    pub seed: u64,
    pub max_dim: usize,
    pub generation_errors: usize,
    /// Oracle `σ_min` inside the band; excluded from the agreement rate.
    pub oracle_indeterminate: usize,
    pub decided: usize,
    pub agreements: usize,
    pub agreement_rate: f64,
    pub verdicts: BTreeMap<String, usize>,
    pub reasons: BTreeMap<String, usize>,
    /// Per decomposition dimension, value → count.
    pub dims_histogram: BTreeMap<String, BTreeMap<usize, usize>>,
    pub disagreements: Vec<usize>,
}

impl BatchSummary {
    pub fn passed(&self) -> bool {
        self.disagreements.is_empty() && self.generation_errors == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatchOutcome {
    pub items: Vec<BatchItem>,
    pub summary: BatchSummary,
}

pub fn batch_spec(cfg: &BatchConfig, index: usize) -> GeneratorSpec {
    let mut rng = rng_from_seed(derive_seed(cfg.seed, index as u64));
    random_spec(&mut rng, cfg.kind, cfg.max_dim)
}

fn evaluate(cfg: &BatchConfig, index: usize) -> BatchItem {
    let spec = batch_spec(cfg, index);
    let cert = match cfg.kind {
        GeneratorKind::Hamiltonian => generate_hamiltonian(&spec, &cfg.tol).map(|h| certify_hamiltonian(&h)),
        _ => generate(&spec, &cfg.tol).map(|inst| crate::certificate::certify(&inst)),
    };
    match cert {
        Ok(cert) => BatchItem {
            index,
            spec,
            report: Some(Report::from(&cert)),
            oracle: Some(cert.oracle.verdict),
            error: None,
        },
        Err(e) => BatchItem {
            index,
            spec,
            report: None,
            oracle: None,
            error: Some(e.to_string()),
        },
    }
}

pub fn run_batch(cfg: &BatchConfig) -> BatchOutcome {
    let evaluated: Vec<BatchItem> = (0..cfg.count).into_par_iter().map(|i| evaluate(cfg, i)).collect();

    let mut summary = BatchSummary {
        kind: cfg.kind.name().to_string(),
        count: cfg.count,
        seed: cfg.seed,
        max_dim: cfg.max_dim,
        ..Default::default()
    };
    let mut items = Vec::with_capacity(evaluated.len());
    for item in evaluated {
        match (&item.report, item.oracle) {
            (None, _) | (_, None) => summary.generation_errors += 1,
            (Some(_), Some(Verdict::Indeterminate)) => summary.oracle_indeterminate += 1,
            (Some(r), Some(_)) => {
                summary.decided += 1;
                if r.agreement {
                    summary.agreements += 1;
                } else {
                    summary.disagreements.push(item.index);
                }
                *summary.verdicts.entry(r.verdict.to_string()).or_default() += 1;
                *summary.reasons.entry(r.reason.to_string()).or_default() += 1;
                if let Some(d) = r.dims {
                    let fields = [
                        ("X1", d.X1),
                        ("X2", d.X2),
                        ("X3", d.X3),
                        ("Y1", d.Y1),
                        ("Y2", d.Y2),
                        ("Y3", d.Y3),
                        ("RA_perp", d.RA_perp),
                        ("RB_perp", d.RB_perp),
                        ("R_int", d.R_int),
                    ];
                    for (name, v) in fields {
                        *summary
                            .dims_histogram
                            .entry(name.to_string())
                            .or_default()
                            .entry(v)
                            .or_default() += 1;
                    }
                }
            }
        }
        items.push(item);
    }
    summary.agreement_rate = if summary.decided == 0 {
        1.0
    } else {
        summary.agreements as f64 / summary.decided as f64
    };
    BatchOutcome { items, summary }
}
