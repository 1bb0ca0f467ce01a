//! Quantum potential indicators: hardware metric arithmetic, the bundled IBM
//! device table, algorithm requirement checks, and the sequential
//! suitability / classical-alternative / feasibility gate.

use serde::{Deserialize, Serialize};

use crate::circuit::synthesize_encoding;
use crate::error::{Error, Result};
use crate::estimator::eigendecompose;
use crate::matrix::DenseMatrix;
use crate::oscillator::qubits_for_dim;

const REGISTRY_JSON: &str = include_str!("../data/ibm_devices.json");

pub const HERMITIAN_TOL: f64 = 1e-10;

/// `EPLG = 1 - LF^(1/n_2q)`
pub fn eplg_from_layer_fidelity(layer_fidelity: f64, n_2q: u32) -> Result<f64> {
    if !(layer_fidelity > 0.0 && layer_fidelity <= 1.0) {
        return Err(Error::Domain(format!(
            "layer fidelity {layer_fidelity} must lie in (0, 1]"
        )));
    }
    if n_2q < 1 {
        return Err(Error::Argument("n_2q must be >= 1".into()));
    }
    Ok(1.0 - layer_fidelity.powf(1.0 / n_2q as f64))
}

/// `LF = (1 - EPLG)^n_2q`
pub fn layer_fidelity_from_eplg(eplg: f64, n_2q: u32) -> Result<f64> {
    if !(0.0..1.0).contains(&eplg) {
        return Err(Error::Domain(format!("EPLG {eplg} must lie in [0, 1)")));
    }
    if n_2q < 1 {
        return Err(Error::Argument("n_2q must be >= 1".into()));
    }
    Ok((1.0 - eplg).powi(n_2q as i32))
}

/// Quantum phase estimation with `m` ancillas: `(m, 2^m - 1)` controlled-U applications.
pub fn qpe_cost(m: u32) -> Result<(u32, u64)> {
    if !(1..64).contains(&m) {
        return Err(Error::Argument(format!("ancilla count {m} must be in 1..=63")));
    }
    Ok((m, (1u64 << m) - 1))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HhlChecklist {
    pub dimension: usize,
    pub hermitian: bool,
    pub power_of_two: bool,
}

/// HHL input requirements for a real matrix given as rows.
pub fn check_hhl_requirements<R: AsRef<[f64]>>(rows: &[R]) -> Result<HhlChecklist> {
    let m = DenseMatrix::from_rows(rows)?;
    Ok(HhlChecklist {
        dimension: m.dim(),
        hermitian: m.is_symmetric(HERMITIAN_TOL),
        power_of_two: m.dim().is_power_of_two(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeviceSpec {
    pub name: String,
    pub qubits: u32,
    pub qv: Option<u32>,
    /// ops/s
    pub clops_v: Option<u32>,
    /// ops/s
    pub clops_h: Option<u32>,
    /// Error per layered gate on a 100-qubit chain, as a fraction.
    pub eplg_100q: Option<f64>,
}

impl DeviceSpec {
    fn validate(&self) -> std::result::Result<(), String> {
        if self.qubits == 0 {
            return Err("qubits must be > 0".into());
        }
        if let Some(e) = self.eplg_100q {
            if !(e > 0.0 && e < 1.0) {
                return Err(format!("eplg_100q {e} must lie in (0, 1)"));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DeviceRegistry {
    devices: Vec<DeviceSpec>,
}

impl DeviceRegistry {
    /// Parses a JSON array of device rows; rows are numbered from 1 in errors.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: Vec<serde_json::Value> = serde_json::from_str(text).map_err(|e| Error::RegistryParse {
            row: 0,
            message: e.to_string(),
        })?;
        let devices = raw
            .into_iter()
            .enumerate()
            .map(|(i, v)| {
                let row = i + 1;
                let d: DeviceSpec = serde_json::from_value(v).map_err(|e| Error::RegistryParse {
                    row,
                    message: e.to_string(),
                })?;
                d.validate().map_err(|message| Error::RegistryParse { row, message })?;
                Ok(d)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { devices })
    }

    pub fn devices(&self) -> &[DeviceSpec] {
        &self.devices
    }

    pub fn get(&self, name: &str) -> Option<&DeviceSpec> {
        self.devices.iter().find(|d| d.name == name)
    }

    pub fn lookup(&self, name: &str) -> Result<&DeviceSpec> {
        self.get(name).ok_or_else(|| Error::UnknownDevice {
            name: name.to_string(),
            known: self.devices.iter().map(|d| d.name.clone()).collect(),
        })
    }
}

/// The bundled device table.
pub fn load_device_registry() -> Result<DeviceRegistry> {
    DeviceRegistry::from_json(REGISTRY_JSON)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProblemProfile {
    /// Dimension `N` of the linear system or dynamical matrix.
    pub system_size: u64,
    /// How many times the kernel runs in one simulation.
    pub n_steps: u64,
    pub matrix_hermitian: bool,
    pub required_qubits: u32,
    pub encoding_gate_count: u64,
    /// Declared: the workload splits into independent tasks.
    pub embarrassingly_parallel: bool,
}

impl ProblemProfile {
    pub fn new(
        system_size: u64,
        n_steps: u64,
        matrix_hermitian: bool,
        required_qubits: u32,
        encoding_gate_count: u64,
    ) -> Result<Self> {
        for (what, v) in [
            ("system_size", system_size),
            ("n_steps", n_steps),
            ("required_qubits", required_qubits as u64),
            ("encoding_gate_count", encoding_gate_count),
        ] {
            if v < 1 {
                return Err(Error::Argument(format!("{what} must be >= 1")));
            }
        }
        Ok(Self {
            system_size,
            n_steps,
            matrix_hermitian,
            required_qubits,
            encoding_gate_count,
            embarrassingly_parallel: false,
        })
    }

    pub fn parallel(mut self, flag: bool) -> Self {
        self.embarrassingly_parallel = flag;
        self
    }

    /// Profile of estimating the top eigenpair of `h`: qubits from the padded
    /// dimension, gate count from encoding its top eigenvector.
    pub fn from_matrix(h: &DenseMatrix, n_steps: u64) -> Result<Self> {
        let n = h.dim();
        let qubits = qubits_for_dim(n.max(1));
        let padded = h.embed(1 << qubits);
        let pairs = eigendecompose(&padded)?;
        let top = pairs.last().ok_or_else(|| Error::Dimension("empty matrix".into()))?;
        let gates = synthesize_encoding(&top.vector)?.gate_count();
        Self::new(
            n as u64,
            n_steps,
            h.is_symmetric(HERMITIAN_TOL),
            qubits as u32,
            gates.max(1) as u64,
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuitabilityThresholds {
    pub system_size: u64,
    pub n_steps: u64,
}

impl Default for SuitabilityThresholds {
    fn default() -> Self {
        Self {
            system_size: 1 << 10,
            n_steps: 1_000_000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateConfig {
    pub thresholds: SuitabilityThresholds,
    /// Circuit fidelity below which results are deemed noise dominated.
    pub fidelity_floor: f64,
}

impl Default for GateConfig {
    fn default() -> Self {
        Self {
            thresholds: SuitabilityThresholds::default(),
            fidelity_floor: 0.5,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub passed: bool,
    pub reasons: Vec<String>,
}

pub fn assess_suitability(p: &ProblemProfile, thresholds: &SuitabilityThresholds) -> Verdict {
    let mut reasons = Vec::new();
    let size = p.system_size >= thresholds.system_size;
    let steps = p.n_steps >= thresholds.n_steps;
    if size {
        reasons.push(format!(
            "system size {} >= {} (classical cost grows at least as N^3)",
            p.system_size, thresholds.system_size
        ));
    }
    if steps {
        reasons.push(format!("step count {} >= {}", p.n_steps, thresholds.n_steps));
    }
    if !size && !steps {
        reasons.push(format!(
            "system size {} < {} and step count {} < {}",
            p.system_size, thresholds.system_size, p.n_steps, thresholds.n_steps
        ));
    }
    Verdict {
        passed: size || steps,
        reasons,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Feasibility {
    pub feasible: bool,
    pub gate_budget: u64,
    pub reasons: Vec<String>,
}

/// Largest gate count `G` with `(1 - eplg)^G >= fidelity_floor`.
pub fn gate_budget(eplg: f64, fidelity_floor: f64) -> Result<u64> {
    if !(eplg > 0.0 && eplg < 1.0) {
        return Err(Error::Domain(format!("EPLG {eplg} must lie in (0, 1)")));
    }
    if !(fidelity_floor > 0.0 && fidelity_floor < 1.0) {
        return Err(Error::Domain(format!(
            "fidelity floor {fidelity_floor} must lie in (0, 1)"
        )));
    }
    Ok((fidelity_floor.ln() / (1.0 - eplg).ln()).floor() as u64)
}

pub fn assess_feasibility(p: &ProblemProfile, d: &DeviceSpec, fidelity_floor: f64) -> Result<Feasibility> {
    let eplg = d.eplg_100q.ok_or_else(|| {
        Error::InsufficientData(format!("device {} has no EPLG figure to bound the gate count", d.name))
    })?;
    let budget = gate_budget(eplg, fidelity_floor)?;
    let qubits_ok = p.required_qubits <= d.qubits;
    let gates_ok = p.encoding_gate_count <= budget;
    let cmp = |ok| if ok { "<=" } else { ">" };
    let reasons = vec![
        format!(
            "required qubits {} {} device qubits {}",
            p.required_qubits,
            cmp(qubits_ok),
            d.qubits
        ),
        format!(
            "encoding gates {} {} gate budget {} (EPLG {}, fidelity floor {})",
            p.encoding_gate_count,
            cmp(gates_ok),
            budget,
            eplg,
            fidelity_floor
        ),
    ];
    Ok(Feasibility {
        feasible: qubits_ok && gates_ok,
        gate_budget: budget,
        reasons,
    })
}

/// One step of the gate; `evaluated == false` when an earlier step stopped it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Stage {
    pub evaluated: bool,
    pub value: bool,
    pub reasons: Vec<String>,
}

impl Stage {
    fn skipped() -> Self {
        Self {
            evaluated: false,
            value: false,
            reasons: vec!["not evaluated".into()],
        }
    }

    fn done(value: bool, reasons: Vec<String>) -> Self {
        Self {
            evaluated: true,
            value,
            reasons,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AssessmentReport {
    pub suitable: Stage,
    pub classical_alternative_preferred: Stage,
    pub feasible: Stage,
    pub device: DeviceSpec,
    pub gate_budget: Option<u64>,
}

impl AssessmentReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Suitability, then the classical alternative, then device feasibility,
/// stopping at the first step that rules quantum execution out.
pub fn run_gate(p: &ProblemProfile, d: &DeviceSpec, config: &GateConfig) -> Result<AssessmentReport> {
    let suitability = assess_suitability(p, &config.thresholds);
    let mut report = AssessmentReport {
        suitable: Stage::done(suitability.passed, suitability.reasons),
        classical_alternative_preferred: Stage::skipped(),
        feasible: Stage::skipped(),
        device: d.clone(),
        gate_budget: None,
    };
    if !report.suitable.value {
        return Ok(report);
    }

    report.classical_alternative_preferred = if p.embarrassingly_parallel {
        Stage::done(
            true,
            vec!["workload declared embarrassingly parallel; classical parallelisation preferred".into()],
        )
    } else {
        Stage::done(false, vec!["no classical parallelisation alternative declared".into()])
    };
    if report.classical_alternative_preferred.value {
        return Ok(report);
    }

    let feasibility = assess_feasibility(p, d, config.fidelity_floor)?;
    report.gate_budget = Some(feasibility.gate_budget);
    report.feasible = Stage::done(feasibility.feasible, feasibility.reasons);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn torino() -> DeviceSpec {
        load_device_registry().unwrap().lookup("ibm_torino").unwrap().clone()
    }

    #[test]
    fn eplg_examples() {
        assert_eq!(eplg_from_layer_fidelity(1.0, 7).unwrap(), 0.0);
        assert!((eplg_from_layer_fidelity(0.99, 1).unwrap() - 0.01).abs() < 1e-15);
        let e = eplg_from_layer_fidelity(0.452, 99).unwrap();
        assert!((e - 0.0080).abs() < 5e-5, "{e}");
        assert!(matches!(eplg_from_layer_fidelity(0.0, 3), Err(Error::Domain(_))));
        assert!(matches!(eplg_from_layer_fidelity(-0.5, 3), Err(Error::Domain(_))));
    }

    #[test]
    fn qpe_examples() {
        assert_eq!(qpe_cost(1).unwrap(), (1, 1));
        assert_eq!(qpe_cost(3).unwrap(), (3, 7));
        assert_eq!(qpe_cost(10).unwrap(), (10, 1023));
        assert!(matches!(qpe_cost(0), Err(Error::Argument(_))));
    }

    #[test]
    fn hhl_examples() {
        let c = check_hhl_requirements(&[[2.0, -1.0], [-1.0, 2.0]]).unwrap();
        assert!(c.hermitian && c.power_of_two);
        assert!(!check_hhl_requirements(&[[0.0, 1.0], [0.0, 0.0]]).unwrap().hermitian);
        let c = check_hhl_requirements(&[[1.0, 2.0, 0.0], [2.0, 1.0, 0.0], [0.0, 0.0, 1.0]]).unwrap();
        assert!(c.hermitian && !c.power_of_two);
        let ragged = vec![vec![1.0, 2.0], vec![1.0]];
        assert!(matches!(check_hhl_requirements(&ragged), Err(Error::Shape(_))));
    }

    #[test]
    fn registry_lookups() {
        let reg = load_device_registry().unwrap();
        assert_eq!(reg.devices().len(), 15);
        let n = reg.lookup("ibm_nairobi").unwrap();
        assert_eq!((n.qubits, n.qv, n.clops_v), (7, Some(32), Some(2600)));
        let t = reg.lookup("ibm_torino").unwrap();
        assert_eq!((t.qubits, t.clops_h, t.eplg_100q), (133, Some(3800), Some(0.008)));
        assert!(matches!(reg.lookup("ibm_nowhere"), Err(Error::UnknownDevice { .. })));
    }

    #[test]
    fn registry_parse_errors_report_row() {
        let text = r#"[{"name":"a","qubits":5,"qv":null,"clops_v":null,"clops_h":null,"eplg_100q":null},
                       {"name":"b","qubits":"many"}]"#;
        match DeviceRegistry::from_json(text) {
            Err(Error::RegistryParse { row, .. }) => assert_eq!(row, 2),
            other => panic!("{other:?}"),
        }
        let bad_eplg = r#"[{"name":"a","qubits":5,"qv":null,"clops_v":null,"clops_h":null,"eplg_100q":1.5}]"#;
        assert!(matches!(
            DeviceRegistry::from_json(bad_eplg),
            Err(Error::RegistryParse { row: 1, .. })
        ));
        assert!(matches!(
            DeviceRegistry::from_json("{"),
            Err(Error::RegistryParse { .. })
        ));
    }

    #[test]
    fn suitability_examples() {
        let t = SuitabilityThresholds::default();
        assert!(assess_suitability(&ProblemProfile::new(1 << 20, 1, true, 20, 10).unwrap(), &t).passed);
        assert!(assess_suitability(&ProblemProfile::new(64, 5_000_000, true, 6, 125).unwrap(), &t).passed);
        assert!(!assess_suitability(&ProblemProfile::new(4, 10, true, 2, 5).unwrap(), &t).passed);
    }

    #[test]
    fn feasibility_examples() {
        let d = torino();
        let f = assess_feasibility(&ProblemProfile::new(64, 1, true, 6, 125).unwrap(), &d, 0.5).unwrap();
        assert_eq!(f.gate_budget, 86);
        assert!(!f.feasible);
        let f = assess_feasibility(&ProblemProfile::new(1 << 20, 1, true, 200, 1).unwrap(), &d, 0.5).unwrap();
        assert!(!f.feasible);
        let f = assess_feasibility(&ProblemProfile::new(2, 1, true, 1, 1).unwrap(), &d, 0.5).unwrap();
        assert!(f.feasible);
        let nairobi = load_device_registry().unwrap().lookup("ibm_nairobi").unwrap().clone();
        assert!(matches!(
            assess_feasibility(&ProblemProfile::new(64, 1, true, 6, 125).unwrap(), &nairobi, 0.5),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn gate_short_circuits() {
        let d = torino();
        let cfg = GateConfig::default();
        let r = run_gate(&ProblemProfile::new(4, 10, true, 2, 5).unwrap(), &d, &cfg).unwrap();
        assert!(!r.suitable.value);
        assert!(!r.classical_alternative_preferred.evaluated && !r.feasible.evaluated);

        let parallel = ProblemProfile::new(64, 5_000_000, true, 6, 125).unwrap().parallel(true);
        let r = run_gate(&parallel, &d, &cfg).unwrap();
        assert!(r.suitable.value && r.classical_alternative_preferred.value);
        assert!(!r.feasible.evaluated && r.gate_budget.is_none());

        let fits = ProblemProfile::new(4, 5_000_000, true, 2, 5).unwrap();
        let r = run_gate(&fits, &d, &cfg).unwrap();
        assert!(r.feasible.evaluated && r.feasible.value);
        assert_eq!(r.gate_budget, Some(86));
    }

    #[test]
    fn profile_from_chain_matrix() {
        let mut h = DenseMatrix::zeros(64);
        for i in 0..64 {
            h[(i, i)] = 2.0;
            if i + 1 < 64 {
                h[(i, i + 1)] = -1.0;
                h[(i + 1, i)] = -1.0;
            }
        }
        let p = ProblemProfile::from_matrix(&h, 1).unwrap();
        assert_eq!(p.required_qubits, 6);
        assert!(p.matrix_hermitian);
        assert!(p.encoding_gate_count > 86);
    }

    #[test]
    fn profile_counts_validated() {
        assert!(ProblemProfile::new(0, 1, true, 1, 1).is_err());
        assert!(ProblemProfile::new(1, 1, true, 1, 0).is_err());
    }
}
