//! Coupled-oscillator models and their dynamical matrices.
//!
//! Every oscillator carries a single scalar displacement, so an `N`-node
//! system yields an `N x N` dynamical matrix `H = M^-1/2 K M^-1/2` whose
//! eigenvalues are the squared angular resonance frequencies.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

/// Stiffness constant of the blade presets, in N·mm/m: an edge of length `L` mm
/// gets stiffness `BLADE_KAPPA / L` N/m.
pub const BLADE_KAPPA: f64 = 1.0;

/// Column pitch of the blade presets in mm. Horizontal edges keep this length
/// for every height.
pub const BLADE_COLUMN_PITCH_MM: f64 = 10.0;

pub const BLADE_MIN_HEIGHT_MM: f64 = 10.0;
pub const BLADE_MAX_HEIGHT_MM: f64 = 60.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub index: usize,
    /// kg
    pub mass: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spring {
    pub i: usize,
    pub j: usize,
    /// N/m
    pub stiffness: f64,
}

/// Spring from a node to a fixed anchor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroundSpring {
    pub node: usize,
    /// N/m
    pub stiffness: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    FixedFixed,
    FixedFree,
}

impl fmt::Display for Boundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Boundary::FixedFixed => "fixed_fixed",
            Boundary::FixedFree => "fixed_free",
        })
    }
}

impl FromStr for Boundary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fixed_fixed" => Ok(Boundary::FixedFixed),
            "fixed_free" => Ok(Boundary::FixedFree),
            other => Err(Error::Parse(format!(
                "unknown boundary `{other}` (expected fixed_fixed or fixed_free)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BladePreset {
    A,
    B,
    C,
}

impl BladePreset {
    pub const ALL: [BladePreset; 3] = [BladePreset::A, BladePreset::B, BladePreset::C];

    /// (columns, rows) of the preset grid.
    pub fn grid(self) -> (usize, usize) {
        match self {
            BladePreset::A => (3, 4),
            BladePreset::B | BladePreset::C => (4, 6),
        }
    }

    pub fn oscillator_count(self) -> usize {
        let (cols, rows) = self.grid();
        cols * rows
    }
}

impl fmt::Display for BladePreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BladePreset::A => "a",
            BladePreset::B => "b",
            BladePreset::C => "c",
        })
    }
}

impl FromStr for BladePreset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "a" | "A" => Ok(BladePreset::A),
            "b" | "B" => Ok(BladePreset::B),
            "c" | "C" => Ok(BladePreset::C),
            other => Err(Error::Parse(format!("unknown blade preset `{other}`"))),
        }
    }
}

/// A validated mass-spring network with scalar displacements.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OscillatorSystem {
    label: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    height_mm: Option<f64>,
    nodes: Vec<Node>,
    springs: Vec<Spring>,
    ground_springs: Vec<GroundSpring>,
}

impl OscillatorSystem {
    /// Validates and builds a system. `fixed_boundary` declares that the
    /// geometry is anchored, which requires at least one ground spring.
    pub fn new(
        label: impl Into<String>,
        masses: &[f64],
        springs: Vec<Spring>,
        ground_springs: Vec<GroundSpring>,
        height_mm: Option<f64>,
        fixed_boundary: bool,
    ) -> Result<Self> {
        if masses.is_empty() {
            return Err(Error::InvalidModel("system has no oscillators".into()));
        }
        let n = masses.len();
        if let Some((i, m)) = masses.iter().enumerate().find(|(_, m)| !(m.is_finite() && **m > 0.0)) {
            return Err(Error::InvalidModel(format!("mass of node {i} is {m}, must be > 0")));
        }
        let mut seen = HashSet::new();
        for s in &springs {
            if s.i >= n || s.j >= n {
                return Err(Error::InvalidModel(format!(
                    "spring ({}, {}) references a missing node",
                    s.i, s.j
                )));
            }
            if s.i == s.j {
                return Err(Error::InvalidModel(format!("spring connects node {} to itself", s.i)));
            }
            check_stiffness(s.stiffness)?;
            if !seen.insert((s.i.min(s.j), s.i.max(s.j))) {
                return Err(Error::InvalidModel(format!("duplicate spring ({}, {})", s.i, s.j)));
            }
        }
        for g in &ground_springs {
            if g.node >= n {
                return Err(Error::InvalidModel(format!(
                    "ground spring references missing node {}",
                    g.node
                )));
            }
            check_stiffness(g.stiffness)?;
        }
        if fixed_boundary && ground_springs.is_empty() {
            return Err(Error::InvalidModel(
                "fixed boundary declared but no ground spring present".into(),
            ));
        }
        let nodes = masses
            .iter()
            .enumerate()
            .map(|(index, &mass)| Node { index, mass })
            .collect();
        Ok(Self {
            label: label.into(),
            height_mm,
            nodes,
            springs,
            ground_springs,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn height_mm(&self) -> Option<f64> {
        self.height_mm
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn springs(&self) -> &[Spring] {
        &self.springs
    }

    pub fn ground_springs(&self) -> &[GroundSpring] {
        &self.ground_springs
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Parses and re-validates a geometry file.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: OscillatorSystem = serde_json::from_str(text)?;
        for (pos, node) in raw.nodes.iter().enumerate() {
            if node.index != pos {
                return Err(Error::InvalidModel(format!(
                    "node indices must be contiguous from 0 (found {} at position {pos})",
                    node.index
                )));
            }
        }
        let masses: Vec<f64> = raw.nodes.iter().map(|n| n.mass).collect();
        Self::new(
            raw.label,
            &masses,
            raw.springs,
            raw.ground_springs,
            raw.height_mm,
            false,
        )
    }

    /// Stiffness matrix `K` (grounded Laplacian) in N/m.
    pub fn stiffness_matrix(&self) -> DenseMatrix {
        let mut k = DenseMatrix::zeros(self.len());
        for s in &self.springs {
            k[(s.i, s.i)] += s.stiffness;
            k[(s.j, s.j)] += s.stiffness;
            k[(s.i, s.j)] -= s.stiffness;
            k[(s.j, s.i)] -= s.stiffness;
        }
        for g in &self.ground_springs {
            k[(g.node, g.node)] += g.stiffness;
        }
        k
    }
}

fn check_stiffness(k: f64) -> Result<()> {
    if k.is_finite() && k > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidModel(format!("stiffness {k} must be > 0")))
    }
}

/// Mass-normalised stiffness matrix, units 1/s^2.
#[derive(Clone, Debug, PartialEq)]
pub struct DynamicalMatrix {
    matrix: DenseMatrix,
}

impl DynamicalMatrix {
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> DenseMatrix {
        self.matrix
    }
}

/// A dynamical matrix zero-padded to a power-of-two dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct PaddedMatrix {
    pub matrix: DenseMatrix,
    pub n_qubits: usize,
    pub original_dim: usize,
}

pub fn build_chain(n_osc: usize, stiffness: f64, mass: f64, boundary: Boundary) -> Result<OscillatorSystem> {
    if n_osc < 2 {
        return Err(Error::InvalidModel(format!(
            "a chain needs at least 2 oscillators, got {n_osc}"
        )));
    }
    let springs = (0..n_osc - 1).map(|i| Spring { i, j: i + 1, stiffness }).collect();
    let mut ground = vec![GroundSpring { node: 0, stiffness }];
    if boundary == Boundary::FixedFixed {
        ground.push(GroundSpring {
            node: n_osc - 1,
            stiffness,
        });
    }
    OscillatorSystem::new(
        format!("chain:{n_osc}:{boundary}"),
        &vec![mass; n_osc],
        springs,
        ground,
        None,
        true,
    )
}

/// Blade toy model on a rectangular grid, root row anchored.
///
/// Vertical edges (including the anchors of the root row) have length
/// `height_mm / rows` and stiffness `BLADE_KAPPA / length`; horizontal edges keep
/// [`BLADE_COLUMN_PITCH_MM`]. Preset `c` halves the vertical stiffness of the two
/// outer columns. All masses are 1 kg.
pub fn build_blade(preset: BladePreset, height_mm: f64) -> Result<OscillatorSystem> {
    if !(BLADE_MIN_HEIGHT_MM..=BLADE_MAX_HEIGHT_MM).contains(&height_mm) {
        return Err(Error::OutOfRange {
            what: "blade height (mm)",
            value: height_mm,
            min: BLADE_MIN_HEIGHT_MM,
            max: BLADE_MAX_HEIGHT_MM,
        });
    }
    let (cols, rows) = preset.grid();
    let node = |row: usize, col: usize| row * cols + col;
    let vertical = BLADE_KAPPA / (height_mm / rows as f64);
    let horizontal = BLADE_KAPPA / BLADE_COLUMN_PITCH_MM;
    let column_scale = |col: usize| {
        if preset == BladePreset::C && (col == 0 || col == cols - 1) {
            0.5
        } else {
            1.0
        }
    };

    let mut springs = Vec::new();
    for row in 0..rows {
        for col in 0..cols {
            if col + 1 < cols {
                springs.push(Spring {
                    i: node(row, col),
                    j: node(row, col + 1),
                    stiffness: horizontal,
                });
            }
            if row + 1 < rows {
                springs.push(Spring {
                    i: node(row, col),
                    j: node(row + 1, col),
                    stiffness: vertical * column_scale(col),
                });
            }
        }
    }
    let ground = (0..cols)
        .map(|col| GroundSpring {
            node: node(0, col),
            stiffness: vertical * column_scale(col),
        })
        .collect();
    OscillatorSystem::new(
        format!("blade:{preset}:{}", format_height(height_mm)),
        &vec![1.0; cols * rows],
        springs,
        ground,
        Some(height_mm),
        true,
    )
}

fn format_height(h: f64) -> String {
    format!("{h}")
}

pub fn assemble_dynamical_matrix(sys: &OscillatorSystem) -> DynamicalMatrix {
    let mut h = sys.stiffness_matrix();
    let inv_sqrt: Vec<f64> = sys.nodes().iter().map(|n| n.mass.sqrt().recip()).collect();
    let n = h.dim();
    for i in 0..n {
        for j in 0..n {
            h[(i, j)] *= inv_sqrt[i] * inv_sqrt[j];
        }
    }
    DynamicalMatrix { matrix: h }
}

/// Smallest qubit count whose basis covers `dim` states (at least one).
pub fn qubits_for_dim(dim: usize) -> usize {
    let mut n = 1;
    while (1usize << n) < dim {
        n += 1;
    }
    n
}

pub fn pad_to_qubit_dimension(h: &DynamicalMatrix) -> PaddedMatrix {
    let n_qubits = qubits_for_dim(h.dim().max(1));
    PaddedMatrix {
        matrix: h.matrix().embed(1 << n_qubits),
        n_qubits,
        original_dim: h.dim(),
    }
}

/// Geometry selector: `chain:N[:boundary]` or `blade:a|b|c[:height_mm]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Geometry {
    Chain { n_osc: usize, boundary: Boundary },
    Blade { preset: BladePreset, height_mm: f64 },
}

impl Geometry {
    pub fn chain(n_osc: usize) -> Self {
        Geometry::Chain {
            n_osc,
            boundary: Boundary::FixedFixed,
        }
    }

    pub fn blade(preset: BladePreset, height_mm: f64) -> Self {
        Geometry::Blade { preset, height_mm }
    }

    /// Builds the system with unit chain parameters or the blade presets.
    pub fn build(&self) -> Result<OscillatorSystem> {
        match *self {
            Geometry::Chain { n_osc, boundary } => build_chain(n_osc, 1.0, 1.0, boundary),
            Geometry::Blade { preset, height_mm } => build_blade(preset, height_mm),
        }
    }

    pub fn padded_matrix(&self) -> Result<PaddedMatrix> {
        Ok(pad_to_qubit_dimension(&assemble_dynamical_matrix(&self.build()?)))
    }

    /// Family name used when ordering sweep rows.
    pub fn family(&self) -> String {
        match self {
            Geometry::Chain { .. } => "chain".to_string(),
            Geometry::Blade { preset, .. } => format!("blade:{preset}"),
        }
    }

    pub fn is_blade(&self) -> bool {
        matches!(self, Geometry::Blade { .. })
    }
}

impl fmt::Display for Geometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Geometry::Chain { n_osc, boundary } => write!(f, "chain:{n_osc}:{boundary}"),
            Geometry::Blade { preset, height_mm } => {
                write!(f, "blade:{preset}:{}", format_height(*height_mm))
            }
        }
    }
}

impl FromStr for Geometry {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || Error::Parse(format!("bad geometry selector `{s}`"));
        match parts.as_slice() {
            ["chain", n, rest @ ..] if rest.len() <= 1 => {
                let n_osc: usize = n.parse().map_err(|_| bad())?;
                let boundary = match rest {
                    [bc] => bc.parse()?,
                    _ => Boundary::FixedFixed,
                };
                if n_osc < 2 {
                    return Err(Error::InvalidModel(format!(
                        "a chain needs at least 2 oscillators, got {n_osc}"
                    )));
                }
                Ok(Geometry::Chain { n_osc, boundary })
            }
            ["blade", preset, rest @ ..] if rest.len() <= 1 => {
                let preset = preset.parse()?;
                let height_mm = match rest {
                    [h] => h.parse().map_err(|_| bad())?,
                    _ => BLADE_MIN_HEIGHT_MM,
                };
                if !(BLADE_MIN_HEIGHT_MM..=BLADE_MAX_HEIGHT_MM).contains(&height_mm) {
                    return Err(Error::OutOfRange {
                        what: "blade height (mm)",
                        value: height_mm,
                        min: BLADE_MIN_HEIGHT_MM,
                        max: BLADE_MAX_HEIGHT_MM,
                    });
                }
                Ok(Geometry::Blade { preset, height_mm })
            }
            _ => Err(bad()),
        }
    }
}

/// Chains of 2..64 oscillators (1-6 qubits) and the three blades at 10..60 mm.
pub fn standard_ladder() -> Vec<Geometry> {
    let mut out: Vec<Geometry> = (1..=6).map(|q| Geometry::chain(1 << q)).collect();
    for preset in BladePreset::ALL {
        for h in (1..=6).map(|i| 10.0 * i as f64) {
            out.push(Geometry::blade(preset, h));
        }
    }
    out
}
