//! Real amplitude encoding with a binary tree of multiplexed RY rotations.
//!
//! Level `j` rotates qubit `j` conditioned on qubits `0..j`, splitting the
//! weight of each already-fixed prefix between the two values of bit `j`.
//! Each multiplexor is expanded with the Gray-code construction into `2^j`
//! RY gates interleaved with `2^j` CNOTs.

use super::{Circuit, Gate, NORM_TOL};
use crate::error::{Error, Result};

/// Rotation angles with magnitude at or below this are dropped.
pub const ENCODING_ANGLE_TOL: f64 = 1e-12;

/// Circuit mapping `|0...0>` to `v` (up to global sign).
pub fn synthesize_encoding(v: &[f64]) -> Result<Circuit> {
    let len = v.len();
    if len < 2 || !len.is_power_of_two() {
        return Err(Error::Encoding(format!(
            "vector length {len} is not a power of two >= 2"
        )));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::Encoding("vector has non-finite entries".into()));
    }
    let norm_sqr: f64 = v.iter().map(|x| x * x).sum();
    if (norm_sqr.sqrt() - 1.0).abs() > NORM_TOL {
        return Err(Error::Encoding(format!(
            "vector norm is {}, expected 1",
            norm_sqr.sqrt()
        )));
    }
    let n = len.trailing_zeros() as usize;

    let mut gates = Vec::new();
    for level in 0..n {
        let angles = level_angles(v, level, n);
        multiplexed_ry(level, &angles, &mut gates);
    }
    Ok(Circuit::from_gates_unchecked(n, simplify(gates)))
}

/// Angles `alpha_p` for each value `p` of qubits `0..level`.
///
/// Intermediate levels split subtree norms; the last level takes the signed
/// amplitude pair so that signs land exactly.
fn level_angles(v: &[f64], level: usize, n: usize) -> Vec<f64> {
    let prefixes = 1usize << level;
    let bit = 1usize << level;
    if level + 1 == n {
        return (0..prefixes).map(|p| 2.0 * v[p | bit].atan2(v[p])).collect();
    }
    let mask = (bit << 1) - 1;
    let mut weight = vec![0.0f64; bit << 1];
    for (i, x) in v.iter().enumerate() {
        weight[i & mask] += x * x;
    }
    (0..prefixes)
        .map(|p| 2.0 * weight[p | bit].sqrt().atan2(weight[p].sqrt()))
        .collect()
}

fn gray(i: usize) -> usize {
    i ^ (i >> 1)
}

/// Uniformly controlled RY on `target` with controls `0..target`.
fn multiplexed_ry(target: usize, alpha: &[f64], out: &mut Vec<Gate>) {
    let k = target;
    let size = alpha.len();
    debug_assert_eq!(size, 1 << k);
    if k == 0 {
        out.push(Gate::Ry {
            target,
            angle: alpha[0],
        });
        return;
    }
    // theta = 2^-k M^T alpha with M[p][i] = (-1)^(p . gray(i)).
    let scale = 1.0 / size as f64;
    for i in 0..size {
        let g = gray(i);
        let theta: f64 = alpha
            .iter()
            .enumerate()
            .map(|(p, a)| {
                if (p & g).count_ones().is_multiple_of(2) {
                    *a
                } else {
                    -*a
                }
            })
            .sum::<f64>()
            * scale;
        out.push(Gate::Ry { target, angle: theta });
        let flip = g ^ gray((i + 1) % size);
        out.push(Gate::Cnot {
            control: flip.trailing_zeros() as usize,
            target,
        });
    }
}

/// Drops near-zero rotations, merges adjacent RYs on the same qubit, and
/// cancels CNOT pairs inside runs of CNOTs sharing a target (such CNOTs commute).
fn simplify(mut gates: Vec<Gate>) -> Vec<Gate> {
    loop {
        let before = gates.len();
        gates = merge_rotations(gates);
        gates = reduce_cnot_runs(gates);
        if gates.len() == before {
            return gates;
        }
    }
}

fn merge_rotations(gates: Vec<Gate>) -> Vec<Gate> {
    let mut out: Vec<Gate> = Vec::with_capacity(gates.len());
    for g in gates {
        if let Gate::Ry { target, angle } = g {
            if let Some(Gate::Ry {
                target: prev_t,
                angle: prev_a,
            }) = out.last_mut()
            {
                if *prev_t == target {
                    *prev_a += angle;
                    if prev_a.abs() <= ENCODING_ANGLE_TOL {
                        out.pop();
                    }
                    continue;
                }
            }
            if angle.abs() <= ENCODING_ANGLE_TOL {
                continue;
            }
        }
        out.push(g);
    }
    out
}

fn reduce_cnot_runs(gates: Vec<Gate>) -> Vec<Gate> {
    let mut out = Vec::with_capacity(gates.len());
    let mut i = 0;
    while i < gates.len() {
        let Gate::Cnot { target, .. } = gates[i] else {
            out.push(gates[i]);
            i += 1;
            continue;
        };
        let mut j = i;
        let mut controls: Vec<(usize, usize)> = Vec::new();
        while let Some(&Gate::Cnot { control, target: t }) = gates.get(j) {
            if t != target {
                break;
            }
            match controls.iter_mut().find(|(c, _)| *c == control) {
                Some((_, count)) => *count += 1,
                None => controls.push((control, 1)),
            }
            j += 1;
        }
        out.extend(
            controls
                .into_iter()
                .filter(|&(_, count)| count % 2 == 1)
                .map(|(control, _)| Gate::Cnot { control, target }),
        );
        i = j;
    }
    out
}
