//! Repeated max-eigenvalue estimates over a set of geometries.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{repetition_seed, EigenEstimate, EstimationPlan, Shots};
use crate::circuit::NoiseModel;
use crate::error::{Error, Result};
use crate::oscillator::Geometry;

pub const SWEEP_CSV_HEADER: &str =
    "geometry,n_osc,n_qubits,gate_count,f,shots,lambda_exact,lambda_mixed,lambda_est_mean,rel_err_mean,rel_err_std";

/// Repetitions per geometry family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Repetitions {
    pub chain: usize,
    pub blade: usize,
}

impl Repetitions {
    pub fn uniform(n: usize) -> Self {
        Self { chain: n, blade: n }
    }

    pub fn for_geometry(&self, g: &Geometry) -> usize {
        if g.is_blade() {
            self.blade
        } else {
            self.chain
        }
    }
}

impl Default for Repetitions {
    fn default() -> Self {
        Self {
            chain: 100,
            blade: 1000,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub noise: NoiseModel,
    pub shots: Shots,
    pub repetitions: Repetitions,
    pub seed: u64,
}

/// One aggregated row; field order matches [`SWEEP_CSV_HEADER`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub geometry: String,
    pub n_osc: usize,
    pub n_qubits: usize,
    pub gate_count: usize,
    pub f: f64,
    /// 0 in analytic mode.
    pub shots: u64,
    pub lambda_exact: f64,
    pub lambda_mixed: f64,
    pub lambda_est_mean: f64,
    pub rel_err_mean: f64,
    pub rel_err_std: f64,
}

/// Runs every geometry's max-eigenpair estimate `repetitions` times
/// (repetition `r` uses [`repetition_seed`]`(seed, r)`) and aggregates.
///
/// Work is spread over the current rayon pool; results are reduced in a fixed
/// order, so the output does not depend on the thread count. Rows are ordered
/// by geometry family (chains first), then gate count.
pub fn sweep(geometries: &[Geometry], config: &SweepConfig) -> Result<Vec<SweepRow>> {
    let plans: Vec<(Geometry, usize, EstimationPlan)> = geometries
        .par_iter()
        .map(|g| {
            let padded = g.padded_matrix()?;
            Ok((*g, padded.original_dim, EstimationPlan::for_max(&padded.matrix)?))
        })
        .collect::<Result<_>>()?;

    let tasks: Vec<(usize, u64)> = plans
        .iter()
        .enumerate()
        .flat_map(|(gi, (g, _, _))| {
            let reps = config.repetitions.for_geometry(g);
            (0..reps as u64).map(move |r| (gi, r))
        })
        .collect();
    if plans.iter().any(|(g, _, _)| config.repetitions.for_geometry(g) == 0) {
        return Err(Error::Argument("repetitions must be >= 1".into()));
    }

    let estimates: Vec<EigenEstimate> = tasks
        .par_iter()
        .map(|&(gi, r)| {
            plans[gi]
                .2
                .run(&config.noise, config.shots, repetition_seed(config.seed, r))
        })
        .collect::<Result<_>>()?;

    let mut rows = Vec::with_capacity(plans.len());
    let mut cursor = 0;
    for (g, n_osc, plan) in &plans {
        let reps = config.repetitions.for_geometry(g);
        let chunk = &estimates[cursor..cursor + reps];
        cursor += reps;
        let rel: Vec<f64> = chunk
            .iter()
            .map(|e| {
                e.rel_error.ok_or(Error::MetricUndefined {
                    delta: plan.lambda_exact() - plan.lambda_mixed(),
                })
            })
            .collect::<Result<_>>()?;
        let lambda: Vec<f64> = chunk.iter().map(|e| e.lambda_est).collect();
        let (rel_err_mean, rel_err_std) = mean_std(&rel);
        rows.push(SweepRow {
            geometry: g.to_string(),
            n_osc: *n_osc,
            n_qubits: plan.n_qubits(),
            gate_count: plan.gate_count(),
            f: config.noise.gate_fidelity(),
            shots: config.shots.count(),
            lambda_exact: plan.lambda_exact(),
            lambda_mixed: plan.lambda_mixed(),
            lambda_est_mean: mean_std(&lambda).0,
            rel_err_mean,
            rel_err_std,
        });
    }

    let family_rank = |row: &SweepRow, g: &Geometry| (g.is_blade(), g.family(), row.gate_count);
    let mut keyed: Vec<_> = rows.into_iter().zip(geometries).collect();
    keyed.sort_by_key(|(r, g)| family_rank(r, g));
    Ok(keyed.into_iter().map(|(r, _)| r).collect())
}

/// Mean and sample standard deviation (0 for a single value).
fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

pub fn rows_to_csv(rows: &[SweepRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    if rows.is_empty() {
        return Ok(format!("{SWEEP_CSV_HEADER}\n"));
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

pub fn rows_to_json(rows: &[SweepRow]) -> Result<String> {
    Ok(serde_json::to_string_pretty(rows)?)
}
