use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{weighted::WeightedIndex, Distribution};
use serde::{Deserialize, Serialize};

use super::{apply_circuit, Circuit, Gate, Statevector};
use crate::error::{Error, Result};
use crate::pauli::{PauliString, PauliSymbol};

/// Estimated `<P>`. `shots == 0` marks an analytic (infinite-shot) value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpectationEstimate {
    pub value: f64,
    pub shots: u64,
    pub std_error: f64,
}

impl ExpectationEstimate {
    pub fn analytic(value: f64) -> Self {
        Self {
            value,
            shots: 0,
            std_error: 0.0,
        }
    }

    /// Mean and standard error of `shots` scores of +-1, `plus` of them +1.
    pub fn from_counts(plus: u64, shots: u64) -> Self {
        assert!(shots >= 1 && plus <= shots);
        let value = (2.0 * plus as f64 - shots as f64) / shots as f64;
        let std_error = if shots > 1 {
            // sum (s - mean)^2 = shots (1 - mean^2) for s in {-1, +1}
            let var = (shots as f64 * (1.0 - value * value)).max(0.0) / (shots - 1) as f64;
            (var / shots as f64).sqrt()
        } else {
            0.0
        };
        Self {
            value,
            shots,
            std_error,
        }
    }
}

/// Rotation taking the eigenbasis of `p` to the computational basis.
pub fn measurement_basis_change(p: &PauliString) -> Circuit {
    let mut c = Circuit::new(p.n_qubits());
    for q in 0..p.n_qubits() {
        match p.symbol(q) {
            PauliSymbol::X => c.push(Gate::Had { target: q }),
            PauliSymbol::Y => c
                .push(Gate::Sdg { target: q })
                .and_then(|_| c.push(Gate::Had { target: q })),
            PauliSymbol::I | PauliSymbol::Z => Ok(()),
        }
        .expect("qubit index in range");
    }
    c
}

fn check_qubits(s: &Statevector, p: &PauliString) -> Result<()> {
    if s.n_qubits() != p.n_qubits() {
        return Err(Error::Shape(format!(
            "state has {} qubits, Pauli string has {}",
            s.n_qubits(),
            p.n_qubits()
        )));
    }
    Ok(())
}

/// Exact `<s|P|s>`.
pub fn expectation_analytic(s: &Statevector, p: &PauliString) -> Result<f64> {
    check_qubits(s, p)?;
    let amps = s.amplitudes();
    let value: Complex64 = amps
        .iter()
        .enumerate()
        .map(|(row, a)| {
            let (col, phase) = p.row_action(row);
            amps[col].conj() * phase.apply(*a)
        })
        .sum();
    debug_assert!(
        value.im.abs() < 1e-10,
        "Hermitian expectation has imaginary part {}",
        value.im
    );
    Ok(value.re.clamp(-1.0, 1.0))
}

/// Probability that a computational-basis measurement after the basis change
/// yields even parity on the support of `p`, i.e. a +1 score.
pub fn parity_plus_probability(s: &Statevector, p: &PauliString) -> Result<f64> {
    check_qubits(s, p)?;
    let rotated = apply_circuit(&measurement_basis_change(p), s)?;
    let support = p.support_mask();
    Ok(rotated
        .probabilities()
        .iter()
        .enumerate()
        .filter(|(i, _)| (*i as u64 & support).count_ones().is_multiple_of(2))
        .map(|(_, pr)| pr)
        .sum::<f64>()
        .clamp(0.0, 1.0))
}

/// Shot-sampled `<P>`: rotate into the eigenbasis of `p`, draw `shots`
/// bitstrings from the Born distribution and score each by its parity on the
/// support of `p`. Fully determined by `seed`.
pub fn expectation_sampled(s: &Statevector, p: &PauliString, shots: u64, seed: u64) -> Result<ExpectationEstimate> {
    if shots < 1 {
        return Err(Error::Argument("shots must be >= 1".into()));
    }
    check_qubits(s, p)?;
    if p.is_identity() {
        return Ok(ExpectationEstimate {
            value: 1.0,
            shots,
            std_error: 0.0,
        });
    }
    let rotated = apply_circuit(&measurement_basis_change(p), s)?;
    let dist = WeightedIndex::new(rotated.probabilities())
        .map_err(|e| Error::Argument(format!("cannot sample state: {e}")))?;
    let support = p.support_mask();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let plus = (0..shots)
        .filter(|_| (dist.sample(&mut rng) as u64 & support).count_ones().is_multiple_of(2))
        .count() as u64;
    Ok(ExpectationEstimate::from_counts(plus, shots))
}
