//! Dense complex state vectors, bipartite reshaping and local projections.
//!
//! Amplitudes are stored flat in row-major order over the subsystem
//! dimensions: the first subsystem is the most significant digit. A
//! [`Bipartition`] lists its sides in a user-chosen order and the reshaped
//! coefficient matrix follows that listed order on each side.

use num_complex::Complex64;
use std::fmt;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Probabilities at or below this value are treated as exact zeros.
pub const ZERO_PROBABILITY: f64 = 1e-14;

const ZERO_NORM: f64 = 1e-14;

/// A pure state over a list of subsystems, each of dimension at least 2.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    dims: Vec<usize>,
    amps: Vec<C64>,
}

impl StateVector {
    /// Builds a normalized state from raw amplitudes.
    pub fn new(dims: Vec<usize>, amps: Vec<C64>) -> Result<Self> {
        Self::unnormalized(dims, amps)?.normalize()
    }

    /// Builds a state without rescaling. The amplitudes are still validated.
    pub fn unnormalized(dims: Vec<usize>, amps: Vec<C64>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidState("no subsystems".into()));
        }
        if let Some(d) = dims.iter().find(|&&d| d < 2) {
            return Err(Error::InvalidState(format!(
                "subsystem dimension {d} is below 2"
            )));
        }
        let total = dims
            .iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .ok_or_else(|| Error::InvalidState("total dimension overflows".into()))?;
        if total != amps.len() {
            return Err(Error::DimensionMismatch {
                expected: total,
                found: amps.len(),
            });
        }
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::InvalidState("non-finite amplitude".into()));
        }
        Ok(Self { dims, amps })
    }

    /// Computational basis state `|index⟩` in row-major order.
    pub fn basis(dims: Vec<usize>, index: usize) -> Result<Self> {
        let total: usize = dims.iter().product();
        if index >= total {
            return Err(Error::DimensionMismatch {
                expected: total,
                found: index,
            });
        }
        let mut amps = vec![C64::new(0.0, 0.0); total];
        amps[index] = C64::new(1.0, 0.0);
        Self::unnormalized(dims, amps)
    }

    /// Tensor product `self ⊗ other`; subsystems of `other` follow those of `self`.
    pub fn tensor(&self, other: &StateVector) -> StateVector {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        let amps = kron(&self.amps, &other.amps);
        StateVector { dims, amps }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub fn num_subsystems(&self) -> usize {
        self.dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.amps.len()
    }

    pub fn norm(&self) -> f64 {
        norm(&self.amps)
    }

    /// Rescales to unit norm, keeping the ray.
    pub fn normalize(&self) -> Result<StateVector> {
        let n = self.norm();
        if n <= ZERO_NORM {
            return Err(Error::ZeroVector);
        }
        let inv = 1.0 / n;
        Ok(StateVector {
            dims: self.dims.clone(),
            amps: self.amps.iter().map(|a| a * inv).collect(),
        })
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        if self.dims != other.dims {
            return Err(Error::DimensionMismatch {
                expected: self.total_dim(),
                found: other.total_dim(),
            });
        }
        Ok(inner(&self.amps, &other.amps))
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &StateVector) -> f64 {
        max_abs_diff(&self.amps, &other.amps)
    }

    pub(crate) fn from_parts(dims: Vec<usize>, amps: Vec<C64>) -> Self {
        debug_assert_eq!(dims.iter().product::<usize>(), amps.len());
        Self { dims, amps }
    }
}

/// Which side of a bipartition an object lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    One,
    Two,
}

/// A split of the subsystems into two nonempty groups (0-based indices).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Bipartition {
    side1: Vec<usize>,
    side2: Vec<usize>,
}

impl Bipartition {
    pub fn new(side1: Vec<usize>, side2: Vec<usize>, num_subsystems: usize) -> Result<Self> {
        if side1.is_empty() || side2.is_empty() {
            return Err(Error::BadPartition("both sides must be nonempty".into()));
        }
        let mut seen = vec![false; num_subsystems];
        for &k in side1.iter().chain(side2.iter()) {
            if k >= num_subsystems {
                return Err(Error::BadPartition(format!(
                    "subsystem {} does not exist (state has {num_subsystems})",
                    k + 1
                )));
            }
            if seen[k] {
                return Err(Error::BadPartition(format!(
                    "subsystem {} listed twice",
                    k + 1
                )));
            }
            seen[k] = true;
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::BadPartition(format!(
                "subsystem {} is on neither side",
                missing + 1
            )));
        }
        Ok(Self { side1, side2 })
    }

    /// `{first k}|{rest}` in natural order.
    pub fn leading(k: usize, num_subsystems: usize) -> Result<Self> {
        Self::new((0..k).collect(), (k..num_subsystems).collect(), num_subsystems)
    }

    /// Parses `"1,2|3"` with 1-based subsystem labels.
    pub fn parse(spec: &str, num_subsystems: usize) -> Result<Self> {
        let (a, b) = spec
            .split_once('|')
            .ok_or_else(|| Error::BadPartition(format!("expected 'A|B', got {spec:?}")))?;
        let side = |s: &str| -> Result<Vec<usize>> {
            s.split(',')
                .map(|t| {
                    let t = t.trim();
                    match t.parse::<usize>() {
                        Ok(k) if k >= 1 => Ok(k - 1),
                        _ => Err(Error::BadPartition(format!("bad subsystem label {t:?}"))),
                    }
                })
                .collect()
        };
        Self::new(side(a)?, side(b)?, num_subsystems)
    }

    pub fn side1(&self) -> &[usize] {
        &self.side1
    }

    pub fn side2(&self) -> &[usize] {
        &self.side2
    }

    pub fn side(&self, side: Side) -> &[usize] {
        match side {
            Side::One => &self.side1,
            Side::Two => &self.side2,
        }
    }

    pub fn side_dim(&self, dims: &[usize], side: Side) -> usize {
        self.side(side).iter().map(|&k| dims[k]).product()
    }

    pub fn num_subsystems(&self) -> usize {
        self.side1.len() + self.side2.len()
    }

    fn check(&self, dims: &[usize]) -> Result<()> {
        if self.num_subsystems() != dims.len() {
            return Err(Error::BadPartition(format!(
                "partition covers {} subsystems, state has {}",
                self.num_subsystems(),
                dims.len()
            )));
        }
        Ok(())
    }
}

impl fmt::Display for Bipartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[usize]| {
            v.iter()
                .map(|k| (k + 1).to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        write!(f, "{}|{}", join(&self.side1), join(&self.side2))
    }
}

/// Flat offsets of every basis state of `group` (listed order, row-major).
pub(crate) fn group_offsets(dims: &[usize], group: &[usize]) -> Vec<usize> {
    let mut strides = vec![1usize; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        strides[k] = strides[k + 1] * dims[k + 1];
    }
    let mut offsets = vec![0usize];
    for &k in group {
        let mut next = Vec::with_capacity(offsets.len() * dims[k]);
        for &o in &offsets {
            for digit in 0..dims[k] {
                next.push(o + digit * strides[k]);
            }
        }
        offsets = next;
    }
    offsets
}

/// Subsystems not in `group`, in increasing order.
pub(crate) fn complement(num_subsystems: usize, group: &[usize]) -> Vec<usize> {
    (0..num_subsystems).filter(|k| !group.contains(k)).collect()
}

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[Vec<C64>]) -> Result<Self> {
        let rows = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != rows) {
            return Err(Error::DimensionMismatch {
                expected: rows,
                found: columns.iter().map(Vec::len).find(|&l| l != rows).unwrap_or(0),
            });
        }
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            for (i, &x) in c.iter().enumerate() {
                m[(i, j)] = x;
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> DenseMatrix {
        let mut m = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    pub fn transpose(&self) -> DenseMatrix {
        let mut m = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)];
            }
        }
        m
    }

    pub fn matmul(&self, rhs: &DenseMatrix) -> Result<DenseMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: rhs.rows,
            });
        }
        let mut m = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..rhs.cols {
                    m.data[i * rhs.cols + j] += a * rhs[(k, j)];
                }
            }
        }
        Ok(m)
    }

    pub fn matvec(&self, x: &[C64]) -> Result<Vec<C64>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: x.len(),
            });
        }
        Ok((0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)] * x[j]).sum())
            .collect())
    }

    pub fn frobenius_norm(&self) -> f64 {
        norm(&self.data)
    }

    pub fn max_abs_diff(&self, other: &DenseMatrix) -> f64 {
        if self.rows != other.rows || self.cols != other.cols {
            return f64::INFINITY;
        }
        max_abs_diff(&self.data, &other.data)
    }

    /// `max |(A A†) - I|` entrywise; zero for exact unitaries.
    pub fn unitarity_defect(&self) -> f64 {
        let p = self
            .matmul(&self.adjoint())
            .expect("square product always conforms");
        p.max_abs_diff(&DenseMatrix::identity(self.rows))
    }
}

impl std::ops::Index<(usize, usize)> for DenseMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Coefficient matrix `M[a][b]` of `v` with `a` indexing side 1 and `b` side 2.
pub fn reshape_bipartite(v: &StateVector, split: &Bipartition) -> Result<DenseMatrix> {
    split.check(&v.dims)?;
    let rows = group_offsets(&v.dims, &split.side1);
    let cols = group_offsets(&v.dims, &split.side2);
    let mut data = Vec::with_capacity(rows.len() * cols.len());
    for &r in &rows {
        for &c in &cols {
            data.push(v.amps[r + c]);
        }
    }
    Ok(DenseMatrix {
        rows: rows.len(),
        cols: cols.len(),
        data,
    })
}

/// Inverse of [`reshape_bipartite`]: scatters a coefficient matrix back into
/// a flat amplitude vector over `dims`.
pub fn unreshape_bipartite(
    m: &DenseMatrix,
    dims: &[usize],
    split: &Bipartition,
) -> Result<StateVector> {
    split.check(dims)?;
    let rows = group_offsets(dims, &split.side1);
    let cols = group_offsets(dims, &split.side2);
    if m.rows != rows.len() || m.cols != cols.len() {
        return Err(Error::DimensionMismatch {
            expected: rows.len() * cols.len(),
            found: m.rows * m.cols,
        });
    }
    let mut amps = vec![C64::new(0.0, 0.0); dims.iter().product()];
    for (a, &r) in rows.iter().enumerate() {
        for (b, &c) in cols.iter().enumerate() {
            amps[r + c] = m[(a, b)];
        }
    }
    StateVector::unnormalized(dims.to_vec(), amps)
}

/// Orthogonal projector acting on a group of subsystems.
#[derive(Debug, Clone, PartialEq)]
pub enum LocalProjector {
    /// Projector onto the span of orthonormal vectors.
    Span(Vec<Vec<C64>>),
    /// Identity minus the projector onto the span of orthonormal vectors.
    Complement(Vec<Vec<C64>>),
}

impl LocalProjector {
    pub fn rank_one(v: Vec<C64>) -> Self {
        LocalProjector::Span(vec![v])
    }

    fn vectors(&self) -> &[Vec<C64>] {
        match self {
            LocalProjector::Span(v) | LocalProjector::Complement(v) => v,
        }
    }

    /// Applies the projector to a vector on the group's own space.
    pub fn apply_to(&self, x: &[C64]) -> Vec<C64> {
        let mut span = vec![C64::new(0.0, 0.0); x.len()];
        for u in self.vectors() {
            let c = inner(u, x);
            for (s, &ui) in span.iter_mut().zip(u.iter()) {
                *s += ui * c;
            }
        }
        match self {
            LocalProjector::Span(_) => span,
            LocalProjector::Complement(_) => x.iter().zip(span).map(|(a, s)| a - s).collect(),
        }
    }
}

/// Applies a projector on `group` to raw amplitudes (no renormalization).
pub(crate) fn project_amps(
    dims: &[usize],
    amps: &[C64],
    group: &[usize],
    projector: &LocalProjector,
) -> Result<Vec<C64>> {
    let offsets = group_offsets(dims, group);
    let dim = offsets.len();
    if let Some(u) = projector.vectors().iter().find(|u| u.len() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: u.len(),
        });
    }
    let rest = group_offsets(dims, &complement(dims.len(), group));
    let mut out = vec![C64::new(0.0, 0.0); amps.len()];
    let mut x = vec![C64::new(0.0, 0.0); dim];
    for &r in &rest {
        for (xi, &o) in x.iter_mut().zip(&offsets) {
            *xi = amps[o + r];
        }
        for (yi, &o) in projector.apply_to(&x).iter().zip(&offsets) {
            out[o + r] = *yi;
        }
    }
    Ok(out)
}

/// Born-rule probability `‖(Π ⊗ I) v‖²` for a rank-one projector on one side,
/// together with the normalized post-measurement state when it is nonzero.
pub fn apply_local_projector(
    v: &StateVector,
    split: &Bipartition,
    side: Side,
    basis_vector: &[C64],
) -> Result<(f64, Option<StateVector>)> {
    split.check(&v.dims)?;
    let projected = project_amps(
        &v.dims,
        &v.amps,
        split.side(side),
        &LocalProjector::rank_one(basis_vector.to_vec()),
    )?;
    let prob = norm_sqr(&projected);
    if prob > ZERO_PROBABILITY {
        let residual = StateVector::from_parts(v.dims.clone(), projected).normalize()?;
        Ok((prob, Some(residual)))
    } else {
        Ok((prob, None))
    }
}

/// Joint Born-rule probability of a list of commuting local projectors acting on
/// disjoint subsystem groups.
pub fn joint_probability(v: &StateVector, projectors: &[(&[usize], &LocalProjector)]) -> Result<f64> {
    let mut amps = v.amps.clone();
    for (group, p) in projectors {
        amps = project_amps(&v.dims, &amps, group, p)?;
    }
    Ok(norm_sqr(&amps))
}

pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm_sqr(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum()
}

pub fn norm(a: &[C64]) -> f64 {
    norm_sqr(a).sqrt()
}

pub fn kron(a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for &x in a {
        for &y in b {
            out.push(x * y);
        }
    }
    out
}

pub fn max_abs_diff(a: &[C64], b: &[C64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Linear combination `Σ c_k v_k` of equal-length vectors.
pub fn combine(coeffs: &[C64], vectors: &[&[C64]]) -> Vec<C64> {
    let len = vectors.first().map_or(0, |v| v.len());
    let mut out = vec![C64::new(0.0, 0.0); len];
    for (&c, v) in coeffs.iter().zip(vectors) {
        for (o, &x) in out.iter_mut().zip(v.iter()) {
            *o += c * x;
        }
    }
    out
}
