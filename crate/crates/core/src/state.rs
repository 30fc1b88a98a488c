//! Density matrices on the global product space.
//!
//! A [`DensityMatrix`] keeps one of three exact representations:
//!
//! - **diagonal** in the product energy basis (thermal products, dephased
//!   and classical states, anything a population permutation produces),
//! - **block diagonal** over disjoint sets of basis indices (pure states with
//!   small support, X-shaped protocol outputs, Dicke mixtures),
//! - **dense**.
//!
//! All three expose the same operations; the representation only changes
//! cost. Indices not covered by any block are zero rows and columns.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, hermiticity_defect, Spectrum, HERMITIAN_TOL};
use crate::system::SystemSpec;

/// Allowed deviation of the trace from one.
pub const TRACE_TOL: f64 = 1e-10;
/// Most negative eigenvalue still accepted as round-off.
pub const PSD_TOL: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Block {
    pub(crate) indices: Vec<usize>,
    pub(crate) matrix: DMatrix<Complex64>,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Repr {
    Diagonal(Vec<f64>),
    Blocks(Vec<Block>),
    Dense(DMatrix<Complex64>),
}

/// Which storage a state currently uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    Diagonal,
    BlockDiagonal,
    Dense,
}

/// A unit-trace, positive semidefinite Hermitian operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dim: usize,
    repr: Repr,
}

impl DensityMatrix {
    /// Validates hermiticity, trace and positivity.
    pub fn from_dense(matrix: DMatrix<Complex64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::Shape(format!(
                "matrix is {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let defect = hermiticity_defect(&matrix);
        if defect > HERMITIAN_TOL {
            return Err(Error::Validity(format!(
                "not Hermitian (max |ρ - ρ†| = {defect:.3e})"
            )));
        }
        let state = Self {
            dim: matrix.nrows(),
            repr: Repr::Dense(matrix),
        };
        state.check_trace_and_positivity()?;
        Ok(state)
    }

    /// A diagonal state from its populations.
    pub fn from_diagonal(populations: Vec<f64>) -> Result<Self> {
        if populations.is_empty() {
            return Err(Error::Shape("empty state".into()));
        }
        let state = Self::diagonal_unchecked(populations);
        state.check_trace_and_positivity()?;
        Ok(state)
    }

    /// `|ψ⟩⟨ψ|`; only the support of `amplitudes` is stored.
    pub fn from_pure(amplitudes: &[Complex64]) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > TRACE_TOL {
            return Err(Error::Validity(format!(
                "state vector has squared norm {norm}"
            )));
        }
        let support: Vec<usize> = (0..amplitudes.len())
            .filter(|&i| amplitudes[i] != ZERO)
            .collect();
        let matrix = DMatrix::from_fn(support.len(), support.len(), |r, c| {
            amplitudes[support[r]] * amplitudes[support[c]].conj()
        });
        Ok(Self::blocks_unchecked(
            amplitudes.len(),
            vec![Block {
                indices: support,
                matrix,
            }],
        ))
    }

    /// Block-diagonal state: each `(indices, matrix)` is the restriction of
    /// the operator to those basis indices; the index sets must be disjoint.
    pub fn from_blocks(dim: usize, blocks: Vec<(Vec<usize>, DMatrix<Complex64>)>) -> Result<Self> {
        let mut seen = vec![false; dim];
        let mut out = Vec::with_capacity(blocks.len());
        for (indices, matrix) in blocks {
            if matrix.nrows() != indices.len() || matrix.ncols() != indices.len() {
                return Err(Error::Shape(
                    "block matrix does not match its index set".into(),
                ));
            }
            for &i in &indices {
                if i >= dim || std::mem::replace(&mut seen[i], true) {
                    return Err(Error::Shape(format!(
                        "block index {i} is out of range or repeated"
                    )));
                }
            }
            let defect = hermiticity_defect(&matrix);
            if defect > HERMITIAN_TOL {
                return Err(Error::Validity(format!(
                    "block not Hermitian ({defect:.3e})"
                )));
            }
            out.push(Block { indices, matrix });
        }
        let state = Self::blocks_unchecked(dim, out);
        state.check_trace_and_positivity()?;
        Ok(state)
    }

    pub(crate) fn diagonal_unchecked(populations: Vec<f64>) -> Self {
        Self {
            dim: populations.len(),
            repr: Repr::Diagonal(populations),
        }
    }

    pub(crate) fn dense_unchecked(matrix: DMatrix<Complex64>) -> Self {
        Self {
            dim: matrix.nrows(),
            repr: Repr::Dense(matrix),
        }
    }

    pub(crate) fn blocks_unchecked(dim: usize, blocks: Vec<Block>) -> Self {
        Self {
            dim,
            repr: Repr::Blocks(blocks),
        }
    }

    pub(crate) fn repr(&self) -> &Repr {
        &self.repr
    }

    fn check_trace_and_positivity(&self) -> Result<()> {
        let tr = self.trace();
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::Validity(format!("trace is {tr}, expected 1")));
        }
        let min = self.spectrum()?.min();
        if min < -PSD_TOL {
            return Err(Error::Validity(format!(
                "not positive semidefinite (min eigenvalue {min:.3e})"
            )));
        }
        Ok(())
    }

    /// Re-checks every invariant.
    pub fn validate(&self) -> Result<()> {
        let defect = match &self.repr {
            Repr::Diagonal(_) => 0.0,
            Repr::Blocks(blocks) => blocks
                .iter()
                .map(|b| hermiticity_defect(&b.matrix))
                .fold(0.0, f64::max),
            Repr::Dense(m) => hermiticity_defect(m),
        };
        if defect > HERMITIAN_TOL {
            return Err(Error::Validity(format!("not Hermitian ({defect:.3e})")));
        }
        self.check_trace_and_positivity()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn representation(&self) -> Representation {
        match self.repr {
            Repr::Diagonal(_) => Representation::Diagonal,
            Repr::Blocks(_) => Representation::BlockDiagonal,
            Repr::Dense(_) => Representation::Dense,
        }
    }

    pub fn trace(&self) -> f64 {
        self.diagonal().iter().sum()
    }

    /// Populations `⟨i|ρ|i⟩`.
    pub fn diagonal(&self) -> Vec<f64> {
        match &self.repr {
            Repr::Diagonal(p) => p.clone(),
            Repr::Blocks(blocks) => {
                let mut out = vec![0.0; self.dim];
                for b in blocks {
                    for (r, &i) in b.indices.iter().enumerate() {
                        out[i] = b.matrix[(r, r)].re;
                    }
                }
                out
            }
            Repr::Dense(m) => (0..self.dim).map(|i| m[(i, i)].re).collect(),
        }
    }

    /// Calls `f(i, j, ρ_ij)` for every stored entry (including explicit zeros
    /// inside blocks and dense storage).
    pub(crate) fn for_each_entry(&self, mut f: impl FnMut(usize, usize, Complex64)) {
        match &self.repr {
            Repr::Diagonal(p) => {
                for (i, &v) in p.iter().enumerate() {
                    if v != 0.0 {
                        f(i, i, Complex64::new(v, 0.0));
                    }
                }
            }
            Repr::Blocks(blocks) => {
                for b in blocks {
                    for (c, &j) in b.indices.iter().enumerate() {
                        for (r, &i) in b.indices.iter().enumerate() {
                            f(i, j, b.matrix[(r, c)]);
                        }
                    }
                }
            }
            Repr::Dense(m) => {
                for j in 0..self.dim {
                    for i in 0..self.dim {
                        f(i, j, m[(i, j)]);
                    }
                }
            }
        }
    }

    /// Entry `⟨i|ρ|j⟩`.
    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        match &self.repr {
            Repr::Diagonal(p) => {
                if i == j {
                    Complex64::new(p[i], 0.0)
                } else {
                    ZERO
                }
            }
            Repr::Blocks(blocks) => {
                for b in blocks {
                    if let Some(r) = b.indices.iter().position(|&x| x == i) {
                        return match b.indices.iter().position(|&x| x == j) {
                            Some(c) => b.matrix[(r, c)],
                            None => ZERO,
                        };
                    }
                }
                ZERO
            }
            Repr::Dense(m) => m[(i, j)],
        }
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        match &self.repr {
            Repr::Dense(m) => m.clone(),
            _ => {
                let mut m = DMatrix::zeros(self.dim, self.dim);
                self.for_each_entry(|i, j, v| m[(i, j)] = v);
                m
            }
        }
    }

    /// The same operator stored densely.
    pub fn to_dense_state(&self) -> Self {
        Self::dense_unchecked(self.to_dense())
    }

    /// Largest `|ρ_ij|` with `i ≠ j`.
    pub fn max_off_diagonal(&self) -> f64 {
        let mut worst: f64 = 0.0;
        self.for_each_entry(|i, j, v| {
            if i != j {
                worst = worst.max(v.norm());
            }
        });
        worst
    }

    /// `Tr(ρH)` for a Hamiltonian diagonal in the product basis.
    pub fn energy(&self, h: &[f64]) -> Result<f64> {
        if h.len() != self.dim {
            return Err(Error::Shape(format!(
                "Hamiltonian has {} levels, state has dimension {}",
                h.len(),
                self.dim
            )));
        }
        Ok(self.diagonal().iter().zip(h).map(|(p, e)| p * e).sum())
    }

    /// Eigenvalues in descending order.
    pub fn spectrum(&self) -> Result<Spectrum> {
        match &self.repr {
            Repr::Diagonal(p) => Ok(Spectrum::from_unsorted(p.clone())),
            Repr::Blocks(blocks) => {
                let covered: usize = blocks.iter().map(|b| b.indices.len()).sum();
                linalg::blocks_eigenvalues(blocks.iter().map(|b| &b.matrix), self.dim - covered)
            }
            Repr::Dense(m) => linalg::hermitian_eigenvalues(m),
        }
    }

    /// Convex combination `t a + (1 - t) b`.
    pub fn mix(t: f64, a: &Self, b: &Self) -> Result<Self> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::Domain(format!("mixing weight {t} not in [0, 1]")));
        }
        if a.dim != b.dim {
            return Err(Error::Shape(format!(
                "dimensions {} and {} differ",
                a.dim, b.dim
            )));
        }
        match (&a.repr, &b.repr) {
            (Repr::Diagonal(x), Repr::Diagonal(y)) => Ok(Self::diagonal_unchecked(
                x.iter()
                    .zip(y)
                    .map(|(u, v)| t * u + (1.0 - t) * v)
                    .collect(),
            )),
            _ => {
                let m = a.to_dense() * Complex64::new(t, 0.0)
                    + b.to_dense() * Complex64::new(1.0 - t, 0.0);
                Ok(Self::dense_unchecked(m))
            }
        }
    }

    /// Maximally mixed state `I/dim`.
    pub fn maximally_mixed(dim: usize) -> Self {
        Self::diagonal_unchecked(vec![1.0 / dim as f64; dim])
    }

    /// The projector onto basis state `index`.
    pub fn basis_projector(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::Shape(format!(
                "basis index {index} out of range for dimension {dim}"
            )));
        }
        let mut p = vec![0.0; dim];
        p[index] = 1.0;
        Ok(Self::diagonal_unchecked(p))
    }

    /// Product of single-subsystem diagonal states given by their populations.
    pub fn product_diagonal(locals: &[Vec<f64>]) -> Self {
        let mut acc = vec![1.0];
        for local in locals {
            acc = acc
                .iter()
                .flat_map(|&a| local.iter().map(move |&b| a * b))
                .collect();
        }
        Self::diagonal_unchecked(acc)
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        match (&self.repr, &other.repr) {
            (Repr::Diagonal(x), Repr::Diagonal(y)) => {
                Self::product_diagonal(&[x.clone(), y.clone()])
            }
            _ => Self::dense_unchecked(self.to_dense().kronecker(&other.to_dense())),
        }
    }
}

/// Largest entrywise difference between two states of equal dimension.
pub fn max_entry_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::Shape(format!(
            "dimensions {} and {} differ",
            a.dim(),
            b.dim()
        )));
    }
    if let (Repr::Diagonal(x), Repr::Diagonal(y)) = (&a.repr, &b.repr) {
        return Ok(x
            .iter()
            .zip(y)
            .map(|(u, v)| (u - v).abs())
            .fold(0.0, f64::max));
    }
    Ok(linalg::max_abs_diff(&a.to_dense(), &b.to_dense()))
}

fn check_state_shape(rho: &DensityMatrix, spec: &SystemSpec) -> Result<()> {
    let dim = spec.dim()?;
    if rho.dim() != dim {
        return Err(Error::Shape(format!(
            "state has dimension {}, system has {dim}",
            rho.dim()
        )));
    }
    Ok(())
}

/// Reduced state of subsystem `keep` (1-based): `Tr_{all but keep} ρ`.
pub fn partial_trace_to(
    rho: &DensityMatrix,
    spec: &SystemSpec,
    keep: usize,
) -> Result<DensityMatrix> {
    check_state_shape(rho, spec)?;
    spec.check_subsystem(keep)?;
    let d = spec.d();
    let stride = spec.stride(keep);
    let digit = |i: usize| (i / stride) % d;
    match &rho.repr {
        Repr::Diagonal(p) => {
            let mut out = vec![0.0; d];
            for (i, &v) in p.iter().enumerate() {
                out[digit(i)] += v;
            }
            Ok(DensityMatrix::diagonal_unchecked(out))
        }
        Repr::Dense(m) => {
            let mut out = DMatrix::zeros(d, d);
            let rest = rho.dim() / d;
            for r in 0..rest {
                let base = (r / stride) * stride * d + r % stride;
                for a in 0..d {
                    for b in 0..d {
                        out[(a, b)] += m[(base + a * stride, base + b * stride)];
                    }
                }
            }
            Ok(DensityMatrix::dense_unchecked(out))
        }
        Repr::Blocks(_) => {
            let mut out = DMatrix::zeros(d, d);
            rho.for_each_entry(|i, j, v| {
                let (a, b) = (digit(i), digit(j));
                if i - a * stride == j - b * stride {
                    out[(a, b)] += v;
                }
            });
            Ok(DensityMatrix::dense_unchecked(out))
        }
    }
}

/// All single-subsystem marginals, subsystem 1 first.
pub fn marginals(rho: &DensityMatrix, spec: &SystemSpec) -> Result<Vec<DensityMatrix>> {
    (1..=spec.n())
        .map(|k| partial_trace_to(rho, spec, k))
        .collect()
}

/// Qubit bias `⟨0|ρ|0⟩ - ⟨1|ρ|1⟩` of a single-qubit state.
pub fn qubit_bias(local: &DensityMatrix) -> Result<f64> {
    if local.dim() != 2 {
        return Err(Error::Shape(format!(
            "bias needs a qubit, got dimension {}",
            local.dim()
        )));
    }
    let p = local.diagonal();
    Ok(p[0] - p[1])
}

/// `-Σ λ ln λ` in nats; eigenvalues within the PSD tolerance are clipped.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    spectrum_entropy(&rho.spectrum()?)
}

/// Entropy of a spectrum, rejecting eigenvalues below `-PSD_TOL`.
pub fn spectrum_entropy(spectrum: &Spectrum) -> Result<f64> {
    let min = spectrum.min();
    if min < -PSD_TOL {
        return Err(Error::Validity(format!(
            "not positive semidefinite (min eigenvalue {min:.3e})"
        )));
    }
    Ok(shannon_entropy(&spectrum.values))
}

/// `-Σ p ln p` with `0 ln 0 = 0`; nonpositive entries are skipped.
pub fn shannon_entropy(p: &[f64]) -> f64 {
    p.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.ln()).sum()
}

/// Global eigendecomposition of a state: spectrum (descending) and the
/// unitary whose columns are the matching eigenvectors.
pub fn eigendecompose_hermitian(rho: &DensityMatrix) -> Result<(Spectrum, DMatrix<Complex64>)> {
    linalg::hermitian_eigen(&rho.to_dense())
}
