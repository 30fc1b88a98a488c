//! Unitaries acting on density matrices.
//!
//! Protocol unitaries are products of planar rotations on disjoint pairs of
//! basis states and are applied without materialising the global matrix.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::max_abs_diff;
use crate::state::{Block, DensityMatrix, Repr};

/// Allowed deviation of `UU†` from the identity for dense unitaries.
pub const UNITARY_TOL: f64 = 1e-10;

/// Rotation by `angle` in the plane `{|a⟩, |b⟩}`.
///
/// In the ordered basis `(|a⟩, |b⟩)` the block is
/// `[[cos θ, sin θ], [-sin θ, cos θ]]`, so `U|a⟩ = cos θ |a⟩ - sin θ |b⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation {
    pub a: usize,
    pub b: usize,
    pub angle: f64,
}

impl Rotation {
    fn cos_sin(&self) -> (f64, f64) {
        (self.angle.cos(), self.angle.sin())
    }

    /// True when the rotation only permutes populations up to sign
    /// (angle a multiple of π/2 to round-off).
    fn is_population_permutation(&self) -> bool {
        let (c, s) = self.cos_sin();
        (c * s).abs() <= f64::EPSILON
    }
}

/// A product of rotations on pairwise disjoint index pairs; identity elsewhere.
#[derive(Debug, Clone, PartialEq)]
pub struct StructuredUnitary {
    dim: usize,
    rotations: Vec<Rotation>,
}

impl StructuredUnitary {
    pub fn new(dim: usize, rotations: Vec<Rotation>) -> Result<Self> {
        let mut used = vec![false; dim];
        for r in &rotations {
            if r.a == r.b {
                return Err(Error::Validity(format!(
                    "rotation pairs index {} with itself",
                    r.a
                )));
            }
            if !r.angle.is_finite() {
                return Err(Error::Validity("rotation angle must be finite".into()));
            }
            for i in [r.a, r.b] {
                if i >= dim {
                    return Err(Error::Shape(format!(
                        "rotation index {i} out of range for dimension {dim}"
                    )));
                }
                if std::mem::replace(&mut used[i], true) {
                    return Err(Error::Validity(format!(
                        "index {i} appears in two rotations"
                    )));
                }
            }
        }
        Ok(Self { dim, rotations })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            rotations: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rotations(&self) -> &[Rotation] {
        &self.rotations
    }

    /// The full `dim × dim` matrix.
    pub fn materialize(&self) -> DMatrix<Complex64> {
        let mut u = DMatrix::identity(self.dim, self.dim);
        for r in &self.rotations {
            let (c, s) = r.cos_sin();
            u[(r.a, r.a)] = Complex64::new(c, 0.0);
            u[(r.a, r.b)] = Complex64::new(s, 0.0);
            u[(r.b, r.a)] = Complex64::new(-s, 0.0);
            u[(r.b, r.b)] = Complex64::new(c, 0.0);
        }
        u
    }

    /// The inverse: every rotation with its angle negated.
    pub fn inverse(&self) -> Self {
        let rotations = self
            .rotations
            .iter()
            .map(|r| Rotation {
                angle: -r.angle,
                ..*r
            })
            .collect();
        Self {
            dim: self.dim,
            rotations,
        }
    }
}

/// Something that can conjugate a density matrix, `ρ ↦ UρU†`.
pub trait UnitaryAction {
    fn conjugate(&self, rho: &DensityMatrix) -> Result<DensityMatrix>;
}

/// `UρU†`.
pub fn apply_unitary(rho: &DensityMatrix, u: &impl UnitaryAction) -> Result<DensityMatrix> {
    u.conjugate(rho)
}

impl UnitaryAction for StructuredUnitary {
    fn conjugate(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != self.dim {
            return Err(Error::Shape(format!(
                "unitary has dimension {}, state {}",
                self.dim,
                rho.dim()
            )));
        }
        if self.rotations.is_empty() {
            return Ok(rho.clone());
        }
        match rho.repr() {
            Repr::Diagonal(p)
                if self
                    .rotations
                    .iter()
                    .all(Rotation::is_population_permutation) =>
            {
                let mut out = p.clone();
                for r in &self.rotations {
                    let (c, s) = r.cos_sin();
                    let (pa, pb) = (p[r.a], p[r.b]);
                    out[r.a] = c * c * pa + s * s * pb;
                    out[r.b] = s * s * pa + c * c * pb;
                }
                Ok(DensityMatrix::diagonal_unchecked(out))
            }
            Repr::Diagonal(p) => {
                let blocks = p
                    .iter()
                    .enumerate()
                    .filter(|(_, &v)| v != 0.0)
                    .map(|(i, &v)| Block {
                        indices: vec![i],
                        matrix: DMatrix::from_element(1, 1, Complex64::new(v, 0.0)),
                    })
                    .collect();
                Ok(rotate_blocks(self.dim, blocks, &self.rotations))
            }
            Repr::Blocks(blocks) => Ok(rotate_blocks(self.dim, blocks.clone(), &self.rotations)),
            Repr::Dense(m) => {
                let mut m = m.clone();
                for r in &self.rotations {
                    let (c, s) = r.cos_sin();
                    rotate_rows(&mut m, r.a, r.b, c, s);
                    rotate_cols(&mut m, r.a, r.b, c, s);
                }
                Ok(DensityMatrix::dense_unchecked(m))
            }
        }
    }
}

impl UnitaryAction for DMatrix<Complex64> {
    fn conjugate(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if self.nrows() != rho.dim() || self.ncols() != rho.dim() {
            return Err(Error::Shape(format!(
                "unitary is {}x{}, state has dimension {}",
                self.nrows(),
                self.ncols(),
                rho.dim()
            )));
        }
        let defect = max_abs_diff(
            &(self * self.adjoint()),
            &DMatrix::identity(rho.dim(), rho.dim()),
        );
        if defect > UNITARY_TOL {
            return Err(Error::Validity(format!(
                "matrix is not unitary (max |UU† - I| = {defect:.3e})"
            )));
        }
        Ok(DensityMatrix::dense_unchecked(
            self * rho.to_dense() * self.adjoint(),
        ))
    }
}

/// Rows `a, b` ← block · (row_a, row_b).
fn rotate_rows(m: &mut DMatrix<Complex64>, a: usize, b: usize, c: f64, s: f64) {
    for k in 0..m.ncols() {
        let (x, y) = (m[(a, k)], m[(b, k)]);
        m[(a, k)] = x * c + y * s;
        m[(b, k)] = -x * s + y * c;
    }
}

/// Columns `a, b` ← (col_a, col_b) · block†; the block is real.
fn rotate_cols(m: &mut DMatrix<Complex64>, a: usize, b: usize, c: f64, s: f64) {
    for k in 0..m.nrows() {
        let (x, y) = (m[(k, a)], m[(k, b)]);
        m[(k, a)] = x * c + y * s;
        m[(k, b)] = -x * s + y * c;
    }
}

/// Applies rotations to a block-diagonal operator, merging the blocks that
/// a rotation couples.
fn rotate_blocks(dim: usize, mut blocks: Vec<Block>, rotations: &[Rotation]) -> DensityMatrix {
    // owner[i] = (block, position) for covered indices.
    let mut owner: Vec<Option<(usize, usize)>> = vec![None; dim];
    for (bi, b) in blocks.iter().enumerate() {
        for (pos, &i) in b.indices.iter().enumerate() {
            owner[i] = Some((bi, pos));
        }
    }
    let ensure =
        |blocks: &mut Vec<Block>, owner: &mut Vec<Option<(usize, usize)>>, i: usize| match owner[i]
        {
            Some((bi, _)) => bi,
            None => {
                blocks.push(Block {
                    indices: vec![i],
                    matrix: DMatrix::zeros(1, 1),
                });
                owner[i] = Some((blocks.len() - 1, 0));
                blocks.len() - 1
            }
        };
    for r in rotations {
        let ba = ensure(&mut blocks, &mut owner, r.a);
        let bb = ensure(&mut blocks, &mut owner, r.b);
        let target = if ba != bb {
            let (keep, gone) = (ba.min(bb), ba.max(bb));
            let moved = std::mem::replace(
                &mut blocks[gone],
                Block {
                    indices: Vec::new(),
                    matrix: DMatrix::zeros(0, 0),
                },
            );
            let base = blocks[keep].indices.len();
            let size = base + moved.indices.len();
            let mut merged = DMatrix::zeros(size, size);
            merged
                .view_mut((0, 0), (base, base))
                .copy_from(&blocks[keep].matrix);
            merged
                .view_mut((base, base), (moved.indices.len(), moved.indices.len()))
                .copy_from(&moved.matrix);
            for (pos, &i) in moved.indices.iter().enumerate() {
                owner[i] = Some((keep, base + pos));
            }
            blocks[keep].indices.extend(moved.indices);
            blocks[keep].matrix = merged;
            keep
        } else {
            ba
        };
        let (_, pa) = owner[r.a].expect("covered");
        let (_, pb) = owner[r.b].expect("covered");
        let (c, s) = r.cos_sin();
        let m = &mut blocks[target].matrix;
        rotate_rows(m, pa, pb, c, s);
        rotate_cols(m, pa, pb, c, s);
    }
    blocks.retain(|b| !b.indices.is_empty());
    DensityMatrix::blocks_unchecked(dim, blocks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::max_entry_distance;
    use std::f64::consts::FRAC_PI_2;

    fn tau(p: f64) -> Vec<f64> {
        vec![1.0 - p, p]
    }

    #[test]
    fn identity_leaves_state() {
        let rho = DensityMatrix::product_diagonal(&[tau(0.2), tau(0.3)]);
        let out = apply_unitary(&rho, &StructuredUnitary::identity(4)).unwrap();
        assert_eq!(out, rho);
        let dense_id: DMatrix<Complex64> = DMatrix::identity(4, 4);
        let out = apply_unitary(&rho, &dense_id).unwrap();
        assert!(max_entry_distance(&out, &rho).unwrap() < 1e-16);
    }

    #[test]
    fn swap_exchanges_subsystems() {
        let rho = DensityMatrix::product_diagonal(&[tau(0.2), tau(0.4)]);
        let mut swap = DMatrix::<Complex64>::zeros(4, 4);
        for &(i, j) in &[(0, 0), (1, 2), (2, 1), (3, 3)] {
            swap[(i, j)] = Complex64::new(1.0, 0.0);
        }
        let out = apply_unitary(&rho, &swap).unwrap();
        let expected = DensityMatrix::product_diagonal(&[tau(0.4), tau(0.2)]);
        assert!(max_entry_distance(&out, &expected).unwrap() < 1e-16);
    }

    #[test]
    fn full_rotation_moves_ground_to_top() {
        let rho = DensityMatrix::basis_projector(4, 0).unwrap();
        let u = StructuredUnitary::new(
            4,
            vec![Rotation {
                a: 0,
                b: 3,
                angle: FRAC_PI_2,
            }],
        )
        .unwrap();
        let out = apply_unitary(&rho, &u).unwrap();
        let expected = DensityMatrix::basis_projector(4, 3).unwrap();
        assert!(max_entry_distance(&out, &expected).unwrap() < 1e-15);
    }

    #[test]
    fn structured_matches_materialized_on_every_representation() {
        let rho = DensityMatrix::product_diagonal(&[tau(0.1), tau(0.3), tau(0.2)]);
        let u = StructuredUnitary::new(
            8,
            vec![
                Rotation {
                    a: 0,
                    b: 7,
                    angle: 0.3,
                },
                Rotation {
                    a: 1,
                    b: 6,
                    angle: -1.1,
                },
                Rotation {
                    a: 2,
                    b: 5,
                    angle: 0.7,
                },
            ],
        )
        .unwrap();
        let reference = apply_unitary(&rho, &u.materialize()).unwrap();
        let from_diag = apply_unitary(&rho, &u).unwrap();
        let from_dense = apply_unitary(&rho.to_dense_state(), &u).unwrap();
        assert!(max_entry_distance(&from_diag, &reference).unwrap() < 1e-15);
        assert!(max_entry_distance(&from_dense, &reference).unwrap() < 1e-15);
        // Second pass couples existing blocks with fresh indices.
        let v = StructuredUnitary::new(
            8,
            vec![
                Rotation {
                    a: 7,
                    b: 1,
                    angle: 0.4,
                },
                Rotation {
                    a: 3,
                    b: 4,
                    angle: 0.2,
                },
            ],
        )
        .unwrap();
        let twice = apply_unitary(&from_diag, &v).unwrap();
        let reference = apply_unitary(&reference, &v.materialize()).unwrap();
        assert!(max_entry_distance(&twice, &reference).unwrap() < 1e-15);
    }

    #[test]
    fn inverse_undoes() {
        let rho = DensityMatrix::product_diagonal(&[tau(0.1), tau(0.35)]);
        let u = StructuredUnitary::new(
            4,
            vec![Rotation {
                a: 0,
                b: 3,
                angle: 0.9,
            }],
        )
        .unwrap();
        let back = apply_unitary(&apply_unitary(&rho, &u).unwrap(), &u.inverse()).unwrap();
        assert!(max_entry_distance(&back, &rho).unwrap() < 1e-15);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(StructuredUnitary::new(
            4,
            vec![Rotation {
                a: 0,
                b: 0,
                angle: 1.0
            }]
        )
        .is_err());
        assert!(StructuredUnitary::new(
            4,
            vec![Rotation {
                a: 0,
                b: 4,
                angle: 1.0
            }]
        )
        .is_err());
        assert!(StructuredUnitary::new(
            4,
            vec![
                Rotation {
                    a: 0,
                    b: 3,
                    angle: 1.0
                },
                Rotation {
                    a: 3,
                    b: 1,
                    angle: 1.0
                }
            ]
        )
        .is_err());
        let rho = DensityMatrix::maximally_mixed(2);
        let not_unitary = DMatrix::from_element(2, 2, Complex64::new(1.0, 0.0));
        assert!(matches!(
            apply_unitary(&rho, &not_unitary),
            Err(Error::Validity(_))
        ));
        assert!(matches!(
            apply_unitary(&rho, &StructuredUnitary::identity(4)),
            Err(Error::Shape(_))
        ));
    }
}
