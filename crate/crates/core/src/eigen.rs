//! Cyclic complex Jacobi eigensolver for small Hermitian matrices.

use crate::error::{Error, Result};
use crate::tensor::{DenseMatrix, C64};

/// Off-diagonal magnitude below which a Hermitian matrix counts as diagonal.
pub const JACOBI_TOLERANCE: f64 = 1e-13;

const MAX_SWEEPS: usize = 100;

/// Eigenvalues in nonincreasing order with eigenvectors stored as columns.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: DenseMatrix,
}

fn max_off_diagonal(a: &DenseMatrix) -> f64 {
    let n = a.rows();
    let mut m: f64 = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            m = m.max(a[(i, j)].norm());
        }
    }
    m
}

/// Index of the first component with magnitude above `1e-8`.
pub(crate) fn first_significant(v: &[C64]) -> usize {
    v.iter().position(|x| x.norm() > 1e-8).unwrap_or(v.len())
}

/// Indices sorted by nonincreasing `values`; runs of values within `tol` of the
/// run's largest member are ordered by `lead` instead.
pub(crate) fn order_with_ties(values: &[f64], lead: &[usize], tol: f64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[j].total_cmp(&values[i]).then(i.cmp(&j)));
    let mut start = 0;
    while start < order.len() {
        let top = values[order[start]];
        let end = (start..order.len())
            .find(|&k| top - values[order[k]] > tol)
            .unwrap_or(order.len());
        order[start..end].sort_by_key(|&i| (lead[i], i));
        start = end;
    }
    order
}

/// Diagonalizes a Hermitian matrix `A = W diag(λ) W†`.
///
/// Eigenvalues within `1e-12` of each other are ordered by the index of the
/// first significant component of their eigenvectors, which makes the output
/// deterministic inside degenerate subspaces.
pub fn hermitian_eigen(a: &DenseMatrix) -> Result<HermitianEigen> {
    let n = a.rows();
    if n != a.cols() {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: a.cols(),
        });
    }
    let mut a = a.clone();
    let mut w = DenseMatrix::identity(n);

    let mut sweeps = 0;
    while max_off_diagonal(&a) >= JACOBI_TOLERANCE {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NumericalFailure(format!(
                "Jacobi eigensolver did not converge after {MAX_SWEEPS} sweeps"
            )));
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut w, p, q);
            }
        }
    }

    let values: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    let lead: Vec<usize> = (0..n).map(|j| first_significant(&w.column(j))).collect();
    let order = order_with_ties(&values, &lead, 1e-12);

    let mut vectors = DenseMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        for i in 0..n {
            vectors[(i, dst)] = w[(i, src)];
        }
    }
    Ok(HermitianEigen {
        values: order.iter().map(|&i| values[i]).collect(),
        vectors,
    })
}

/// One unitary Jacobi rotation annihilating `a[p][q]`.
fn rotate(a: &mut DenseMatrix, w: &mut DenseMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let g = apq.norm();
    if g < 1e-300 {
        return;
    }
    let phase = apq / g;
    let theta = (a[(q, q)].re - a[(p, p)].re) / (2.0 * g);
    let t = if theta >= 0.0 {
        1.0 / (theta + (theta * theta + 1.0).sqrt())
    } else {
        -1.0 / (-theta + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    // W = diag(1, e^{-iφ}) · [[c, s], [-s, c]] on the (p, q) plane.
    let wpp = C64::new(c, 0.0);
    let wpq = C64::new(s, 0.0);
    let wqp = -phase.conj() * s;
    let wqq = phase.conj() * c;

    let n = a.rows();
    for k in 0..n {
        let (x, y) = (a[(k, p)], a[(k, q)]);
        a[(k, p)] = x * wpp + y * wqp;
        a[(k, q)] = x * wpq + y * wqq;
    }
    for k in 0..n {
        let (x, y) = (a[(p, k)], a[(q, k)]);
        a[(p, k)] = wpp.conj() * x + wqp.conj() * y;
        a[(q, k)] = wpq.conj() * x + wqq.conj() * y;
    }
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
    for k in 0..n {
        let (x, y) = (w[(k, p)], w[(k, q)]);
        w[(k, p)] = x * wpp + y * wqp;
        w[(k, q)] = x * wpq + y * wqq;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hermitian(n: usize, f: impl Fn(usize, usize) -> C64) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = if i == j { C64::new(f(i, j).re, 0.0) } else { f(i, j) };
                m[(i, j)] = v;
                m[(j, i)] = v.conj();
            }
        }
        m
    }

    #[test]
    fn pauli_y() {
        let m = hermitian(2, |i, j| if i == j { C64::new(0.0, 0.0) } else { C64::new(0.0, -1.0) });
        let e = hermitian_eigen(&m).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-14);
        assert!((e.values[1] + 1.0).abs() < 1e-14);
        let v0 = e.vectors.column(0);
        let mv = m.matvec(&v0).unwrap();
        for (a, b) in mv.iter().zip(&v0) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn reconstructs_dense_hermitian() {
        let m = hermitian(5, |i, j| {
            C64::new(((i * 7 + j * 3) % 5) as f64 * 0.3 - 0.4, ((i + 2 * j) % 3) as f64 * 0.2 - 0.1)
        });
        let e = hermitian_eigen(&m).unwrap();
        for w in e.values.windows(2) {
            assert!(w[0] >= w[1]);
        }
        assert!(e.vectors.unitarity_defect() < 1e-12);
        let mut d = DenseMatrix::zeros(5, 5);
        for i in 0..5 {
            d[(i, i)] = C64::new(e.values[i], 0.0);
        }
        let back = e
            .vectors
            .matmul(&d)
            .unwrap()
            .matmul(&e.vectors.adjoint())
            .unwrap();
        assert!(back.max_abs_diff(&m) < 1e-12);
    }

    #[test]
    fn degenerate_diagonal_keeps_basis_order() {
        let m = hermitian(3, |i, j| if i == j { C64::new(0.5, 0.0) } else { C64::new(0.0, 0.0) });
        let e = hermitian_eigen(&m).unwrap();
        assert_eq!(e.vectors, DenseMatrix::identity(3));
    }

    #[test]
    fn rejects_non_square() {
        assert!(hermitian_eigen(&DenseMatrix::zeros(2, 3)).is_err());
    }
}
