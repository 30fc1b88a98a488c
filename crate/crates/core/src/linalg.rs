//! Hermitian eigendecomposition.
//!
//! Matrices are first split into the connected components of their nonzero
//! pattern (a permutation similarity, so exact). Every state this crate
//! builds is block diagonal in that sense: product-basis diagonals, X-shaped
//! protocol outputs, Dicke mixtures. Each component is then handed to
//! nalgebra's implicit-QR Hermitian solver, using the real symmetric variant
//! when the block has no imaginary part.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest tolerated `|A - A†|` entry.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Eigenvalues sorted in descending order.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub tie_break: TieBreak,
}

/// How equal eigenvalues were ordered.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TieBreak {
    /// Equal values keep the order in which the solver produced them
    /// (ascending block, then ascending position inside the block).
    Stable,
}

impl Spectrum {
    pub(crate) fn from_unsorted(mut values: Vec<f64>) -> Self {
        sort_descending(&mut values);
        Self {
            values,
            tie_break: TieBreak::Stable,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Number of eigenvalues above `tol`.
    pub fn rank(&self, tol: f64) -> usize {
        self.values.iter().filter(|&&v| v > tol).count()
    }
}

fn sort_descending(values: &mut [f64]) {
    values.sort_by(|a, b| b.total_cmp(a));
}

/// Connected components of the nonzero pattern of `m`, each sorted
/// ascending, ordered by smallest member.
pub fn nonzero_components(m: &DMatrix<Complex64>) -> Vec<Vec<usize>> {
    let dim = m.nrows();
    let mut parent: Vec<usize> = (0..dim).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for j in 0..dim {
        for i in (j + 1)..dim {
            if m[(i, j)] != Complex64::new(0.0, 0.0) || m[(j, i)] != Complex64::new(0.0, 0.0) {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; dim];
    for i in 0..dim {
        let r = find(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[r]].push(i);
    }
    groups
}

fn check_square_hermitian(m: &DMatrix<Complex64>) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::Shape(format!(
            "matrix is {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let dev = hermiticity_defect(m);
    if dev > HERMITIAN_TOL {
        return Err(Error::Validity(format!(
            "not Hermitian (max |A - A†| = {dev:.3e})"
        )));
    }
    Ok(())
}

/// `max |A_ij - conj(A_ji)|`.
pub fn hermiticity_defect(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for j in 0..n {
        for i in j..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

fn max_iterations(size: usize) -> usize {
    1000 + 100 * size
}

/// Eigenvalues and (optionally) eigenvectors of one dense Hermitian block.
fn eigen_block(
    block: DMatrix<Complex64>,
    vectors: bool,
) -> Result<(Vec<f64>, Option<DMatrix<Complex64>>)> {
    let size = block.nrows();
    if size == 1 {
        let v = vectors.then(|| DMatrix::from_element(1, 1, Complex64::new(1.0, 0.0)));
        return Ok((vec![block[(0, 0)].re], v));
    }
    let iterations = max_iterations(size);
    let is_real = block.iter().all(|z| z.im == 0.0);
    if is_real {
        let real = block.map(|z| z.re);
        let real = (&real + real.transpose()) * 0.5;
        let eig = SymmetricEigen::try_new(real, f64::EPSILON, iterations)
            .ok_or(Error::Numerical { iterations, size })?;
        let vals = eig.eigenvalues.iter().copied().collect();
        let vecs = vectors.then(|| eig.eigenvectors.map(|x| Complex64::new(x, 0.0)));
        Ok((vals, vecs))
    } else {
        let sym = (&block + block.adjoint()) * Complex64::new(0.5, 0.0);
        let eig = SymmetricEigen::try_new(sym, f64::EPSILON, iterations)
            .ok_or(Error::Numerical { iterations, size })?;
        let vals = eig.eigenvalues.iter().copied().collect();
        Ok((vals, vectors.then_some(eig.eigenvectors)))
    }
}

fn sub_block(m: &DMatrix<Complex64>, idx: &[usize]) -> DMatrix<Complex64> {
    DMatrix::from_fn(idx.len(), idx.len(), |r, c| m[(idx[r], idx[c])])
}

/// Eigenvalues of a Hermitian matrix, descending.
pub fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Result<Spectrum> {
    check_square_hermitian(m)?;
    let mut values = Vec::with_capacity(m.nrows());
    for comp in nonzero_components(m) {
        let (vals, _) = eigen_block(sub_block(m, &comp), false)?;
        values.extend(vals);
    }
    Ok(Spectrum::from_unsorted(values))
}

/// Eigenvalues (descending) of an already block-structured Hermitian matrix
/// given as independent blocks.
pub(crate) fn blocks_eigenvalues<'a>(
    blocks: impl Iterator<Item = &'a DMatrix<Complex64>>,
    zeros: usize,
) -> Result<Spectrum> {
    let mut values = vec![0.0; zeros];
    for b in blocks {
        let (vals, _) = eigen_block(b.clone(), false)?;
        values.extend(vals);
    }
    Ok(Spectrum::from_unsorted(values))
}

/// Full eigendecomposition `A = V diag(λ) V†` with `λ` descending; column `k`
/// of `V` is the eigenvector of `values[k]`.
pub fn hermitian_eigen(m: &DMatrix<Complex64>) -> Result<(Spectrum, DMatrix<Complex64>)> {
    check_square_hermitian(m)?;
    let dim = m.nrows();
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(dim);
    let mut locals: Vec<(Vec<usize>, DMatrix<Complex64>)> = Vec::new();
    for comp in nonzero_components(m) {
        let (vals, vecs) = eigen_block(sub_block(m, &comp), true)?;
        let b = locals.len();
        pairs.extend(vals.into_iter().enumerate().map(|(k, v)| (v, b, k)));
        locals.push((comp, vecs.expect("vectors requested")));
    }
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut vectors = DMatrix::zeros(dim, dim);
    for (col, &(_, b, k)) in pairs.iter().enumerate() {
        let (idx, vecs) = &locals[b];
        for (r, &global) in idx.iter().enumerate() {
            vectors[(global, col)] = vecs[(r, k)];
        }
    }
    let spectrum = Spectrum {
        values: pairs.iter().map(|p| p.0).collect(),
        tie_break: TieBreak::Stable,
    };
    Ok((spectrum, vectors))
}

/// `V diag(λ) V†`.
pub fn reconstruct(spectrum: &Spectrum, vectors: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let mut scaled = vectors.clone();
    for (k, &v) in spectrum.values.iter().enumerate() {
        scaled.column_mut(k).scale_mut(v);
    }
    scaled * vectors.adjoint()
}

/// Largest entry of `|A - B|`.
pub fn max_abs_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn diagonal_spectrum_sorted() {
        let m =
            DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(0.1, 0.0), c(0.9, 0.0)]));
        let s = hermitian_eigenvalues(&m).unwrap();
        assert_eq!(s.values, vec![0.9, 0.1]);
    }

    #[test]
    fn bell_projector_is_rank_one() {
        let mut m = DMatrix::zeros(4, 4);
        for &(i, j) in &[(0, 0), (0, 3), (3, 0), (3, 3)] {
            m[(i, j)] = c(0.5, 0.0);
        }
        let (s, v) = hermitian_eigen(&m).unwrap();
        let expected = [1.0, 0.0, 0.0, 0.0];
        for (a, b) in s.values.iter().zip(expected) {
            assert!((a - b).abs() < 1e-14);
        }
        assert!(max_abs_diff(&reconstruct(&s, &v), &m) < 1e-14);
    }

    #[test]
    fn complex_block_round_trip() {
        let m = DMatrix::from_row_slice(
            3,
            3,
            &[
                c(2.0, 0.0),
                c(0.0, 1.0),
                c(0.5, 0.0),
                c(0.0, -1.0),
                c(1.0, 0.0),
                c(0.0, 0.0),
                c(0.5, 0.0),
                c(0.0, 0.0),
                c(3.0, 0.0),
            ],
        );
        let (s, v) = hermitian_eigen(&m).unwrap();
        assert!(s.values.windows(2).all(|w| w[0] >= w[1]));
        assert!(max_abs_diff(&reconstruct(&s, &v), &m) < 1e-12);
        let gram = v.adjoint() * &v;
        assert!(max_abs_diff(&gram, &DMatrix::identity(3, 3)) < 1e-12);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m =
            DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(matches!(hermitian_eigenvalues(&m), Err(Error::Validity(_))));
    }

    #[test]
    fn components_split_x_shape() {
        let mut m = DMatrix::zeros(4, 4);
        m[(0, 3)] = c(0.1, 0.0);
        m[(3, 0)] = c(0.1, 0.0);
        m[(1, 1)] = c(1.0, 0.0);
        assert_eq!(nonzero_components(&m), vec![vec![0, 3], vec![1], vec![2]]);
    }
}
