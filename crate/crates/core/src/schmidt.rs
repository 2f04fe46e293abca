//! Schmidt decomposition `|ψ⟩ = Σ p_i |α_i⟩ ⊗ |β_i⟩` across a bipartition.
//!
//! The Gram matrix of the smaller side of the coefficient matrix `M` is
//! diagonalized with the Jacobi solver in [`crate::eigen`]; the partner
//! vectors are recovered by applying `M` to the eigenvectors, and each weight
//! is the norm of that image. Taking the norm instead of `√λ` keeps weights of
//! rank-deficient states at the `1e-16` level, so they fall below the drop
//! threshold cleanly.

use crate::eigen::{first_significant, hermitian_eigen, order_with_ties};
use crate::error::Result;
use crate::hardy::hardy_probability;
use crate::tensor::{
    inner, norm, reshape_bipartite, Bipartition, DenseMatrix, Side, StateVector, C64,
};

/// Weights at or below this value are dropped from the decomposition.
pub const WEIGHT_CUTOFF: f64 = 1e-12;

/// Default tolerance for two weights to count as different.
pub const DEFAULT_EPS_DEG: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtDecomposition {
    weights: Vec<f64>,
    left: Vec<Vec<C64>>,
    right: Vec<Vec<C64>>,
    split: Bipartition,
    dims: Vec<usize>,
}

impl SchmidtDecomposition {
    /// Nonincreasing positive weights `p_i`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Orthonormal side-1 vectors `|α_i⟩`.
    pub fn left_vectors(&self) -> &[Vec<C64>] {
        &self.left
    }

    /// Orthonormal side-2 vectors `|β_i⟩`.
    pub fn right_vectors(&self) -> &[Vec<C64>] {
        &self.right
    }

    pub fn vectors(&self, side: Side) -> &[Vec<C64>] {
        match side {
            Side::One => &self.left,
            Side::Two => &self.right,
        }
    }

    pub fn split(&self) -> &Bipartition {
        &self.split
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn rank(&self) -> usize {
        self.weights.len()
    }

    pub fn side_dim(&self, side: Side) -> usize {
        self.split.side_dim(&self.dims, side)
    }

    /// Coefficient matrix `Σ p_i α_i β_iᵀ`.
    pub fn coefficient_matrix(&self) -> DenseMatrix {
        let (d1, d2) = (self.side_dim(Side::One), self.side_dim(Side::Two));
        let mut m = DenseMatrix::zeros(d1, d2);
        for ((p, a), b) in self.weights.iter().zip(&self.left).zip(&self.right) {
            for i in 0..d1 {
                for j in 0..d2 {
                    m[(i, j)] += a[i] * b[j] * *p;
                }
            }
        }
        m
    }

    /// Rebuilds the state on the original subsystem layout.
    pub fn reconstruct(&self) -> StateVector {
        crate::tensor::unreshape_bipartite(&self.coefficient_matrix(), &self.dims, &self.split)
            .expect("decomposition shapes match its own split")
    }

    /// The Schmidt vectors of one side extended to at least `count` orthonormal
    /// vectors by Gram-Schmidt over the computational basis.
    pub fn completed_vectors(&self, side: Side, count: usize) -> Vec<Vec<C64>> {
        let dim = self.side_dim(side);
        let mut out = self.vectors(side).to_vec();
        while out.len() < count.min(dim) {
            let mut best: Option<(f64, Vec<C64>)> = None;
            for k in 0..dim {
                let mut e = vec![C64::new(0.0, 0.0); dim];
                e[k] = C64::new(1.0, 0.0);
                for u in &out {
                    let c = inner(u, &e);
                    for (x, &ui) in e.iter_mut().zip(u) {
                        *x -= c * ui;
                    }
                }
                let n = norm(&e);
                if best.as_ref().is_none_or(|(bn, _)| n > *bn + 1e-12) {
                    best = Some((n, e));
                }
            }
            let (n, e) = best.expect("dimension is at least 2");
            out.push(e.into_iter().map(|x| x / n).collect());
        }
        out
    }
}

/// Schmidt decomposition of `v` across `split`.
pub fn schmidt_decompose(v: &StateVector, split: &Bipartition) -> Result<SchmidtDecomposition> {
    let m = reshape_bipartite(v, split)?;
    let left_side = m.rows() <= m.cols();

    // Eigenvectors of M M† are the α_i; eigenvectors of M† M are the conj(β_i).
    let gram = if left_side {
        m.matmul(&m.adjoint())?
    } else {
        m.adjoint().matmul(&m)?
    };
    let eig = hermitian_eigen(&gram)?;

    let mut terms: Vec<(f64, usize, Vec<C64>, Vec<C64>)> = Vec::new();
    for j in 0..eig.vectors.cols() {
        let u = eig.vectors.column(j);
        let lead = first_significant(&u);
        let (image, solved) = if left_side {
            let conj: Vec<C64> = u.iter().map(|x| x.conj()).collect();
            (m.transpose().matvec(&conj)?, u)
        } else {
            (m.matvec(&u)?, u)
        };
        let p = norm(&image);
        if p <= WEIGHT_CUTOFF {
            continue;
        }
        let image: Vec<C64> = image.iter().map(|x| x / p).collect();
        let (alpha, beta) = if left_side {
            (solved, image)
        } else {
            (image, solved.iter().map(|x| x.conj()).collect())
        };
        terms.push((p, lead, alpha, beta));
    }
    let values: Vec<f64> = terms.iter().map(|t| t.0).collect();
    let leads: Vec<usize> = terms.iter().map(|t| t.1).collect();
    let order = order_with_ties(&values, &leads, WEIGHT_CUTOFF);
    let mut slots: Vec<Option<_>> = terms.into_iter().map(Some).collect();
    let terms: Vec<_> = order.iter().map(|&i| slots[i].take().expect("permutation")).collect();

    let mut weights = Vec::with_capacity(terms.len());
    let mut left = Vec::with_capacity(terms.len());
    let mut right = Vec::with_capacity(terms.len());
    for (p, _, mut alpha, mut beta) in terms {
        fix_phase(&mut alpha, &mut beta);
        weights.push(p);
        left.push(alpha);
        right.push(beta);
    }
    Ok(SchmidtDecomposition {
        weights,
        left,
        right,
        split: split.clone(),
        dims: v.dims().to_vec(),
    })
}

/// Makes the largest component of `alpha` real and positive and moves the
/// compensating phase into `beta`.
fn fix_phase(alpha: &mut [C64], beta: &mut [C64]) {
    let max = alpha.iter().map(|x| x.norm()).fold(0.0, f64::max);
    let Some(k) = alpha.iter().position(|x| x.norm() >= max - 1e-12) else {
        return;
    };
    let phase = alpha[k] / alpha[k].norm();
    for x in alpha.iter_mut() {
        *x *= phase.conj();
    }
    alpha[k] = C64::new(alpha[k].re, 0.0);
    for x in beta.iter_mut() {
        *x *= phase;
    }
}

/// Index pairs `(i, j)`, `i < j`, whose weights differ by more than `eps_deg`,
/// best Hardy probability first.
pub fn distinct_weight_pairs(d: &SchmidtDecomposition, eps_deg: f64) -> Vec<(usize, usize)> {
    let w = &d.weights;
    let mut pairs: Vec<((usize, usize), f64)> = Vec::new();
    for i in 0..w.len() {
        for j in (i + 1)..w.len() {
            if w[i] > WEIGHT_CUTOFF && w[j] > WEIGHT_CUTOFF && (w[i] - w[j]).abs() > eps_deg {
                pairs.push(((i, j), hardy_probability(w[i], w[j])));
            }
        }
    }
    pairs.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    pairs.into_iter().map(|(p, _)| p).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn two_qubit(a: f64, b: f64) -> StateVector {
        StateVector::new(vec![2, 2], vec![c(a, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(b, 0.0)]).unwrap()
    }

    fn decomposition_with_weights(w: &[f64]) -> SchmidtDecomposition {
        let n = w.len();
        let mut amps = vec![c(0.0, 0.0); n * n];
        for (i, &p) in w.iter().enumerate() {
            amps[i * n + i] = c(p, 0.0);
        }
        let v = StateVector::new(vec![n, n], amps).unwrap();
        schmidt_decompose(&v, &Bipartition::leading(1, 2).unwrap()).unwrap()
    }

    #[test]
    fn already_in_schmidt_form() {
        let v = two_qubit(0.8f64.sqrt(), 0.2f64.sqrt());
        let d = schmidt_decompose(&v, &Bipartition::leading(1, 2).unwrap()).unwrap();
        assert_eq!(d.rank(), 2);
        assert!((d.weights()[0] - 0.894_427_190_999_915_9).abs() < 1e-12);
        assert!((d.weights()[1] - 0.447_213_595_499_958).abs() < 1e-12);
        assert!((d.left_vectors()[0][0] - c(1.0, 0.0)).norm() < 1e-12);
        assert!((d.left_vectors()[1][1] - c(1.0, 0.0)).norm() < 1e-12);
        assert!(d.reconstruct().max_abs_diff(&v) < 1e-12);
    }

    #[test]
    fn product_state_has_rank_one() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let v = StateVector::new(vec![2, 2], vec![c(h, 0.0), c(h, 0.0), c(0.0, 0.0), c(0.0, 0.0)])
            .unwrap();
        let d = schmidt_decompose(&v, &Bipartition::leading(1, 2).unwrap()).unwrap();
        assert_eq!(d.rank(), 1);
        assert!((d.weights()[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn phase_convention_on_left_vectors() {
        // i·√0.8|00⟩ + e^{0.3i}·√0.2|11⟩
        let v = StateVector::new(
            vec![2, 2],
            vec![
                c(0.0, 0.8f64.sqrt()),
                c(0.0, 0.0),
                c(0.0, 0.0),
                C64::from_polar(0.2f64.sqrt(), 0.3),
            ],
        )
        .unwrap();
        let d = schmidt_decompose(&v, &Bipartition::leading(1, 2).unwrap()).unwrap();
        for a in d.left_vectors() {
            let k = a
                .iter()
                .enumerate()
                .max_by(|x, y| x.1.norm().total_cmp(&y.1.norm()))
                .unwrap()
                .0;
            assert!(a[k].im == 0.0 && a[k].re > 0.0);
        }
        assert!(d.reconstruct().max_abs_diff(&v) < 1e-12);
    }

    #[test]
    fn wide_and_tall_shapes() {
        let amps: Vec<C64> = (0..12)
            .map(|k| c(((k * 5) % 7) as f64 - 3.0, ((k * 3) % 4) as f64 - 1.5))
            .collect();
        let v = StateVector::new(vec![2, 3, 2], amps).unwrap();
        for spec in ["1|2,3", "2,3|1", "3|1,2", "2|3,1"] {
            let split = Bipartition::parse(spec, 3).unwrap();
            let d = schmidt_decompose(&v, &split).unwrap();
            assert!(d.reconstruct().max_abs_diff(&v) < 1e-12, "{spec}");
            let s: f64 = d.weights().iter().map(|p| p * p).sum();
            assert!((s - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn pairs_single() {
        let d = decomposition_with_weights(&[0.8f64.sqrt(), 0.2f64.sqrt()]);
        assert_eq!(distinct_weight_pairs(&d, DEFAULT_EPS_DEG), vec![(0, 1)]);
    }

    #[test]
    fn pairs_maximally_entangled_excluded() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let d = decomposition_with_weights(&[h, h]);
        assert_eq!(d.rank(), 2);
        assert!(distinct_weight_pairs(&d, DEFAULT_EPS_DEG).is_empty());
    }

    #[test]
    fn pairs_ordered_by_hardy_factor() {
        // Factors evaluated independently: (0,1) 0.0599750104, (0,2) 0.0657352407,
        // (1,2) 0.0206697789.
        let d = decomposition_with_weights(&[0.8, 0.5, (1.0f64 - 0.64 - 0.25).sqrt()]);
        assert_eq!(
            distinct_weight_pairs(&d, DEFAULT_EPS_DEG),
            vec![(0, 2), (0, 1), (1, 2)]
        );
    }

    #[test]
    fn completion_adds_orthonormal_vectors() {
        let v = StateVector::basis(vec![3, 2], 4).unwrap();
        let d = schmidt_decompose(&v, &Bipartition::leading(1, 2).unwrap()).unwrap();
        assert_eq!(d.rank(), 1);
        let left = d.completed_vectors(Side::One, 2);
        assert_eq!(left.len(), 2);
        assert!(inner(&left[0], &left[1]).norm() < 1e-14);
        assert!((norm(&left[1]) - 1.0).abs() < 1e-14);
    }
}
