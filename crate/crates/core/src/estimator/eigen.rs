//! Cyclic Jacobi eigensolver for dense real symmetric matrices.

use crate::error::Result;
use crate::matrix::DenseMatrix;

pub const SYMMETRY_TOL: f64 = 1e-10;

const MAX_SWEEPS: usize = 100;

#[derive(Clone, Debug, PartialEq)]
pub struct EigenPair {
    pub value: f64,
    /// Unit eigenvector.
    pub vector: Vec<f64>,
}

/// All eigenpairs of `h`, eigenvalues ascending, eigenvectors orthonormal.
pub fn eigendecompose(h: &DenseMatrix) -> Result<Vec<EigenPair>> {
    h.ensure_symmetric(SYMMETRY_TOL)?;
    let n = h.dim();
    // Work on the symmetrised matrix so round-off asymmetry cannot bias rotations.
    let mut a = DenseMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            a[(i, j)] = 0.5 * (h[(i, j)] + h[(j, i)]);
        }
    }
    let mut v = DenseMatrix::identity(n);

    let scale = a.max_abs().max(f64::MIN_POSITIVE);
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)] * a[(i, j)])
            .sum();
        if off.sqrt() <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut pairs: Vec<EigenPair> = (0..n)
        .map(|k| EigenPair {
            value: a[(k, k)],
            vector: (0..n).map(|i| v[(i, k)]).collect(),
        })
        .collect();
    pairs.sort_by(|x, y| x.value.total_cmp(&y.value));
    Ok(pairs)
}

/// One Jacobi rotation zeroing `a[p][q]`, accumulated into the columns of `v`.
fn rotate(a: &mut DenseMatrix, v: &mut DenseMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    if apq == 0.0 {
        return;
    }
    let (app, aqq) = (a[(p, p)], a[(q, q)]);
    let theta = (aqq - app) / (2.0 * apq);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = (t * t + 1.0).sqrt().recip();
    let s = t * c;
    let n = a.dim();

    for k in 0..n {
        let (akp, akq) = (a[(k, p)], a[(k, q)]);
        a[(k, p)] = c * akp - s * akq;
        a[(k, q)] = s * akp + c * akq;
    }
    for k in 0..n {
        let (apk, aqk) = (a[(p, k)], a[(q, k)]);
        a[(p, k)] = c * apk - s * aqk;
        a[(q, k)] = s * apk + c * aqk;
    }
    a[(p, q)] = 0.0;
    a[(q, p)] = 0.0;
    for k in 0..n {
        let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
        v[(k, p)] = c * vkp - s * vkq;
        v[(k, q)] = s * vkp + c * vkq;
    }
}
