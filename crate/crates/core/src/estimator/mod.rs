//! The hybrid eigenvalue routine.
//!
//! 1. Diagonalise `H` classically.
//! 2. Decompose `H` into Pauli weights `g_i`.
//! 3. Amplitude-encode the eigenvector `v_k` and estimate every `E_k(P_i)`.
//! 4. Reassemble `lambda_k = sum_i g_i E_k(P_i)`.
//!
//! Noise enters through the encoding circuit's gate count; the identity term
//! is never measured and always contributes `g_1`.

mod eigen;
mod sweep;

pub use eigen::{eigendecompose, EigenPair};
pub use sweep::{rows_to_csv, rows_to_json, sweep, Repetitions, SweepConfig, SweepRow, SWEEP_CSV_HEADER};

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::circuit::{
    apply_circuit, apply_global_depolarizing, expectation_analytic, parity_plus_probability, synthesize_encoding,
    Circuit, ExpectationEstimate, NoiseModel, Statevector,
};
use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::pauli::{decompose, PauliDecomposition, PauliString};

/// Default shots per measured Pauli term.
pub const DEFAULT_SHOTS: u64 = 4096;

/// Seed stride between repetitions of the same estimate.
pub const REPETITION_SEED_STRIDE: u64 = 10_007;

pub fn repetition_seed(base_seed: u64, rep: u64) -> u64 {
    base_seed.wrapping_add(REPETITION_SEED_STRIDE.wrapping_mul(rep))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shots {
    Analytic,
    Sampled(u64),
}

impl Shots {
    /// `0` stands for analytic mode.
    pub fn count(&self) -> u64 {
        match self {
            Shots::Analytic => 0,
            Shots::Sampled(n) => *n,
        }
    }
}

impl Default for Shots {
    fn default() -> Self {
        Shots::Sampled(DEFAULT_SHOTS)
    }
}

impl fmt::Display for Shots {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shots::Analytic => f.write_str("analytic"),
            Shots::Sampled(n) => write!(f, "{n}"),
        }
    }
}

impl FromStr for Shots {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("analytic") {
            return Ok(Shots::Analytic);
        }
        match s.parse::<u64>() {
            Ok(0) => Err(Error::Argument("shots must be >= 1 (or `analytic`)".into())),
            Ok(n) => Ok(Shots::Sampled(n)),
            Err(_) => Err(Error::Parse(format!("bad shots value `{s}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorMetrics {
    /// `lambda_max - lambda_est`
    pub eps: f64,
    /// `lambda_max - lambda_mixed`
    pub delta: f64,
    /// `eps / delta`
    pub rel: f64,
}

pub fn error_metrics(lambda_max: f64, lambda_est: f64, lambda_mixed: f64) -> Result<ErrorMetrics> {
    let delta = lambda_max - lambda_mixed;
    if delta.is_nan() || delta <= 0.0 {
        return Err(Error::MetricUndefined { delta });
    }
    let eps = lambda_max - lambda_est;
    Ok(ErrorMetrics {
        eps,
        delta,
        rel: eps / delta,
    })
}

/// `omega = sqrt(lambda)`.
pub fn resonance_frequency(lambda: f64) -> Result<f64> {
    if lambda < 0.0 || lambda.is_nan() {
        return Err(Error::Domain(format!(
            "resonance frequency of negative eigenvalue {lambda}"
        )));
    }
    Ok(lambda.sqrt())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenEstimate {
    pub k: usize,
    pub lambda_exact: f64,
    pub lambda_est: f64,
    pub omega_est: f64,
    /// Set when the estimate came out negative and `omega_est` was clamped to 0.
    pub omega_clamped: bool,
    pub lambda_mixed: f64,
    /// `lambda_k - lambda_est`; absent when `lambda_k == lambda_mixed`.
    pub eps_lambda: Option<f64>,
    /// `lambda_k - lambda_mixed`
    pub delta_lambda: Option<f64>,
    /// `eps / delta`; `1 - f^G` in analytic mode.
    pub rel_error: Option<f64>,
    pub gate_count: usize,
    pub gate_fidelity: f64,
    /// 0 in analytic mode.
    pub shots_per_term: u64,
    /// Terms in the pruned decomposition, identity included.
    pub total_terms: usize,
}

#[derive(Clone, Debug, PartialEq)]
struct PlannedTerm {
    pauli: PauliString,
    weight: f64,
    /// `<v_k|P|v_k>` on the prepared state.
    expectation: f64,
    /// Probability of a +1 score after the basis change.
    plus_probability: f64,
}

/// Everything about one eigenpair estimate that does not depend on the noise
/// level, shot count or seed. Build it once and [`run`](Self::run) it per repetition.
#[derive(Clone, Debug)]
pub struct EstimationPlan {
    k: usize,
    n_qubits: usize,
    lambda_exact: f64,
    lambda_mixed: f64,
    encoding: Circuit,
    terms: Vec<PlannedTerm>,
}

impl EstimationPlan {
    pub fn new(h: &DenseMatrix, k: usize) -> Result<Self> {
        let pairs = eigendecompose(h)?;
        let decomposition = decompose(h)?;
        Self::from_parts(&pairs, &decomposition, k)
    }

    /// Plan for the largest eigenvalue.
    pub fn for_max(h: &DenseMatrix) -> Result<Self> {
        Self::new(h, h.dim().saturating_sub(1))
    }

    pub fn from_parts(pairs: &[EigenPair], decomposition: &PauliDecomposition, k: usize) -> Result<Self> {
        let pair = pairs
            .get(k)
            .ok_or_else(|| Error::Argument(format!("eigenpair index {k} out of range (dimension {})", pairs.len())))?;
        let encoding = synthesize_encoding(&pair.vector)?;
        let n_qubits = encoding.n_qubits();
        if n_qubits != decomposition.n_qubits() {
            return Err(Error::Shape(format!(
                "eigenvector spans {n_qubits} qubits, decomposition {}",
                decomposition.n_qubits()
            )));
        }
        let prepared = apply_circuit(&encoding, &Statevector::zero_state(n_qubits))?;
        let terms = decomposition
            .terms()
            .iter()
            .map(|t| {
                Ok(PlannedTerm {
                    pauli: t.pauli,
                    weight: t.weight,
                    expectation: expectation_analytic(&prepared, &t.pauli)?,
                    plus_probability: parity_plus_probability(&prepared, &t.pauli)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            k,
            n_qubits,
            lambda_exact: pair.value,
            lambda_mixed: decomposition.mixed_state_value(),
            encoding,
            terms,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn lambda_exact(&self) -> f64 {
        self.lambda_exact
    }

    pub fn lambda_mixed(&self) -> f64 {
        self.lambda_mixed
    }

    pub fn encoding(&self) -> &Circuit {
        &self.encoding
    }

    pub fn gate_count(&self) -> usize {
        self.encoding.gate_count()
    }

    pub fn total_terms(&self) -> usize {
        self.terms.len()
    }

    /// Per-term estimates of `E_k(P_i)` before noise.
    ///
    /// In sampled mode each shot's score depends only on the outcome parity on
    /// the support of `P_i`, so the number of +1 scores is drawn directly from
    /// `Binomial(shots, p_plus)`: the same distribution as sampling bitstrings.
    /// Term `i` uses seed `seed + i`.
    fn term_estimates(&self, shots: Shots, seed: u64) -> Result<Vec<ExpectationEstimate>> {
        self.terms
            .iter()
            .enumerate()
            .map(|(i, t)| {
                if t.pauli.is_identity() {
                    return Ok(ExpectationEstimate {
                        value: 1.0,
                        shots: shots.count(),
                        std_error: 0.0,
                    });
                }
                match shots {
                    Shots::Analytic => Ok(ExpectationEstimate::analytic(t.expectation)),
                    Shots::Sampled(n) => {
                        if n < 1 {
                            return Err(Error::Argument("shots must be >= 1".into()));
                        }
                        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64));
                        let plus = Binomial::new(n, t.plus_probability)
                            .map_err(|e| Error::Argument(format!("binomial sampler: {e}")))?
                            .sample(&mut rng);
                        Ok(ExpectationEstimate::from_counts(plus, n))
                    }
                }
            })
            .collect()
    }

    pub fn run(&self, noise: &NoiseModel, shots: Shots, seed: u64) -> Result<EigenEstimate> {
        let gate_count = self.gate_count();
        let estimates = self.term_estimates(shots, seed)?;
        let lambda_est: f64 = self
            .terms
            .iter()
            .zip(&estimates)
            .map(|(t, e)| t.weight * apply_global_depolarizing(e.value, &t.pauli, noise, gate_count))
            .sum();

        let omega_clamped = lambda_est < 0.0;
        let omega_est = resonance_frequency(lambda_est.max(0.0))?;

        let delta = self.lambda_exact - self.lambda_mixed;
        let degenerate = delta.abs() <= 1e-12 * self.lambda_exact.abs().max(1.0);
        let (eps_lambda, delta_lambda, rel_error) = if degenerate {
            (None, None, None)
        } else {
            let eps = self.lambda_exact - lambda_est;
            (Some(eps), Some(delta), Some(eps / delta))
        };

        Ok(EigenEstimate {
            k: self.k,
            lambda_exact: self.lambda_exact,
            lambda_est,
            omega_est,
            omega_clamped,
            lambda_mixed: self.lambda_mixed,
            eps_lambda,
            delta_lambda,
            rel_error,
            gate_count,
            gate_fidelity: noise.gate_fidelity(),
            shots_per_term: shots.count(),
            total_terms: self.terms.len(),
        })
    }
}

/// Estimates eigenpair `k` (ascending order) of a padded matrix.
pub fn estimate_eigenvalue(
    h_padded: &DenseMatrix,
    k: usize,
    noise: &NoiseModel,
    shots: Shots,
    seed: u64,
) -> Result<EigenEstimate> {
    if k >= h_padded.dim() {
        return Err(Error::Argument(format!(
            "eigenpair index {k} out of range (dimension {})",
            h_padded.dim()
        )));
    }
    EstimationPlan::new(h_padded, k)?.run(noise, shots, seed)
}
