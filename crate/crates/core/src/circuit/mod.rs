//! Gate-level circuits and an exact statevector kernel.

mod encoding;
mod measure;
mod noise;

pub use encoding::{synthesize_encoding, ENCODING_ANGLE_TOL};
pub use measure::{
    expectation_analytic, expectation_sampled, measurement_basis_change, parity_plus_probability, ExpectationEstimate,
};
pub use noise::{apply_global_depolarizing, NoiseMode, NoiseModel, DEFAULT_GATE_FIDELITY};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on `sum |a|^2 = 1`.
pub const NORM_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "GateRecord", try_from = "GateRecord")]
pub enum Gate {
    Ry { target: usize, angle: f64 },
    Rz { target: usize, angle: f64 },
    Cnot { control: usize, target: usize },
    Had { target: usize },
    Sdg { target: usize },
}

impl Gate {
    pub fn name(&self) -> &'static str {
        match self {
            Gate::Ry { .. } => "RY",
            Gate::Rz { .. } => "RZ",
            Gate::Cnot { .. } => "CNOT",
            Gate::Had { .. } => "HAD",
            Gate::Sdg { .. } => "SDG",
        }
    }

    /// Qubits touched, control first for CNOT.
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::Cnot { control, target } => vec![control, target],
            Gate::Ry { target, .. } | Gate::Rz { target, .. } | Gate::Had { target } | Gate::Sdg { target } => {
                vec![target]
            }
        }
    }

    pub fn target(&self) -> usize {
        match *self {
            Gate::Ry { target, .. }
            | Gate::Rz { target, .. }
            | Gate::Cnot { target, .. }
            | Gate::Had { target }
            | Gate::Sdg { target } => target,
        }
    }
}

/// Wire form of a gate: `{"gate": "RY", "qubits": [0], "angle": 1.57}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
struct GateRecord {
    gate: String,
    qubits: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    angle: Option<f64>,
}

impl From<Gate> for GateRecord {
    fn from(g: Gate) -> Self {
        let angle = match g {
            Gate::Ry { angle, .. } | Gate::Rz { angle, .. } => Some(angle),
            _ => None,
        };
        GateRecord {
            gate: g.name().to_string(),
            qubits: g.qubits(),
            angle,
        }
    }
}

impl TryFrom<GateRecord> for Gate {
    type Error = String;

    fn try_from(r: GateRecord) -> std::result::Result<Self, String> {
        let need_angle = || r.angle.ok_or_else(|| format!("{} needs an angle", r.gate));
        match (r.gate.as_str(), r.qubits.as_slice()) {
            ("RY", &[target]) => Ok(Gate::Ry {
                target,
                angle: need_angle()?,
            }),
            ("RZ", &[target]) => Ok(Gate::Rz {
                target,
                angle: need_angle()?,
            }),
            ("CNOT", &[control, target]) => Ok(Gate::Cnot { control, target }),
            ("HAD", &[target]) => Ok(Gate::Had { target }),
            ("SDG", &[target]) => Ok(Gate::Sdg { target }),
            (name, qubits) => Err(format!("unsupported gate {name} on {qubits:?}")),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    n_qubits: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            gates: Vec::new(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        for q in gate.qubits() {
            if q >= self.n_qubits {
                return Err(Error::Shape(format!(
                    "{} acts on qubit {q} of a {}-qubit circuit",
                    gate.name(),
                    self.n_qubits
                )));
            }
        }
        if let Gate::Cnot { control, target } = gate {
            if control == target {
                return Err(Error::Argument(format!("CNOT control equals target ({control})")));
            }
        }
        self.gates.push(gate);
        Ok(())
    }

    pub(crate) fn from_gates_unchecked(n_qubits: usize, gates: Vec<Gate>) -> Self {
        Self { n_qubits, gates }
    }

    /// Number of elementary gates in the circuit.
    pub fn gate_count(&self) -> usize {
        self.gates.len()
    }

    pub fn count_of(&self, name: &str) -> usize {
        self.gates.iter().filter(|g| g.name() == name).count()
    }

    pub fn append(&mut self, other: &Circuit) -> Result<()> {
        for &g in &other.gates {
            self.push(g)?;
        }
        Ok(())
    }

    /// JSON list of gate records.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.gates)?)
    }

    pub fn from_json(n_qubits: usize, text: &str) -> Result<Self> {
        let gates: Vec<Gate> = serde_json::from_str(text)?;
        let mut c = Circuit::new(n_qubits);
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Statevector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl Statevector {
    /// `|0...0>`
    pub fn zero_state(n_qubits: usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        Self { n_qubits, amps }
    }

    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::Dimension(format!("{len} amplitudes is not a power of two >= 2")));
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::Argument(format!("state norm^2 is {norm}, expected 1")));
        }
        Ok(Self {
            n_qubits: len.trailing_zeros() as usize,
            amps,
        })
    }

    pub fn from_real(v: &[f64]) -> Result<Self> {
        Self::from_amplitudes(v.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `<self|other>`
    pub fn inner(&self, other: &Statevector) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn apply_gate(&mut self, gate: &Gate) {
        match *gate {
            Gate::Ry { target, angle } => {
                let (s, c) = (angle / 2.0).sin_cos();
                self.apply_real_2x2(target, [[c, -s], [s, c]]);
            }
            Gate::Rz { target, angle } => {
                let lo = Complex64::from_polar(1.0, -angle / 2.0);
                let hi = Complex64::from_polar(1.0, angle / 2.0);
                let bit = 1usize << target;
                for (i, a) in self.amps.iter_mut().enumerate() {
                    *a *= if i & bit == 0 { lo } else { hi };
                }
            }
            Gate::Had { target } => {
                let h = std::f64::consts::FRAC_1_SQRT_2;
                self.apply_real_2x2(target, [[h, h], [h, -h]]);
            }
            Gate::Sdg { target } => {
                let bit = 1usize << target;
                for (i, a) in self.amps.iter_mut().enumerate() {
                    if i & bit != 0 {
                        *a = Complex64::new(a.im, -a.re);
                    }
                }
            }
            Gate::Cnot { control, target } => {
                let (cbit, tbit) = (1usize << control, 1usize << target);
                for i in 0..self.amps.len() {
                    if i & cbit != 0 && i & tbit == 0 {
                        self.amps.swap(i, i | tbit);
                    }
                }
            }
        }
    }

    fn apply_real_2x2(&mut self, target: usize, m: [[f64; 2]; 2]) {
        let bit = 1usize << target;
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let (a0, a1) = (self.amps[i], self.amps[i | bit]);
                self.amps[i] = a0 * m[0][0] + a1 * m[0][1];
                self.amps[i | bit] = a0 * m[1][0] + a1 * m[1][1];
            }
        }
    }
}

/// Applies `c` to a copy of `s`.
pub fn apply_circuit(c: &Circuit, s: &Statevector) -> Result<Statevector> {
    if c.n_qubits() != s.n_qubits() {
        return Err(Error::Shape(format!(
            "circuit has {} qubits, state has {}",
            c.n_qubits(),
            s.n_qubits()
        )));
    }
    let mut out = s.clone();
    for g in c.gates() {
        out.apply_gate(g);
    }
    Ok(out)
}
