use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::PauliString;

/// Per-gate fidelity at which `f^G` halves near `G = 100`.
pub const DEFAULT_GATE_FIDELITY: f64 = 0.993;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseMode {
    Noiseless,
    GlobalDepolarizing,
}

/// Global depolarizing noise: after `G` gates the state is
/// `f^G rho + (1 - f^G) I / 2^n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    mode: NoiseMode,
    gate_fidelity: f64,
}

impl NoiseModel {
    pub fn noiseless() -> Self {
        Self {
            mode: NoiseMode::Noiseless,
            gate_fidelity: 1.0,
        }
    }

    pub fn global_depolarizing(gate_fidelity: f64) -> Result<Self> {
        if !(gate_fidelity > 0.0 && gate_fidelity <= 1.0) {
            return Err(Error::OutOfRange {
                what: "gate fidelity",
                value: gate_fidelity,
                min: 0.0,
                max: 1.0,
            });
        }
        Ok(Self {
            mode: NoiseMode::GlobalDepolarizing,
            gate_fidelity,
        })
    }

    /// `f == 1` maps to the noiseless model.
    pub fn from_fidelity(gate_fidelity: f64) -> Result<Self> {
        if gate_fidelity == 1.0 {
            Ok(Self::noiseless())
        } else {
            Self::global_depolarizing(gate_fidelity)
        }
    }

    pub fn mode(&self) -> NoiseMode {
        self.mode
    }

    pub fn gate_fidelity(&self) -> f64 {
        self.gate_fidelity
    }

    /// Surviving fraction `f^G` of the noiseless state.
    pub fn circuit_fidelity(&self, gate_count: usize) -> f64 {
        match self.mode {
            NoiseMode::Noiseless => 1.0,
            NoiseMode::GlobalDepolarizing => self.gate_fidelity.powi(gate_count as i32),
        }
    }
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self::global_depolarizing(DEFAULT_GATE_FIDELITY).expect("valid default")
    }
}

/// Noisy expectation of `p`: unchanged for the identity, `e_ideal * f^G` otherwise.
pub fn apply_global_depolarizing(e_ideal: f64, p: &PauliString, noise: &NoiseModel, gate_count: usize) -> f64 {
    if p.is_identity() {
        e_ideal
    } else {
        e_ideal * noise.circuit_fidelity(gate_count)
    }
}
