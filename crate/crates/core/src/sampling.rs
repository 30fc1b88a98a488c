//! Seeded random states and unitaries for the randomized property suites.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::state::DensityMatrix;

fn ginibre<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DMatrix<Complex64> {
    DMatrix::from_fn(dim, dim, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// `GG† / Tr(GG†)` for a complex Ginibre matrix `G` (Hilbert-Schmidt measure).
pub fn random_density_matrix<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DensityMatrix {
    let g = ginibre(dim, rng);
    let mut m = &g * g.adjoint();
    let trace = m.trace().re;
    m /= Complex64::from(trace);
    // Exact Hermitian symmetrisation removes round-off from the product.
    let m = (&m + m.adjoint()) * Complex64::from(0.5);
    DensityMatrix::from_dense(m).expect("Ginibre products are density matrices")
}

/// Haar-random unitary: QR of a Ginibre matrix with the phases of `R`'s
/// diagonal moved into `Q`.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DMatrix<Complex64> {
    let qr = ginibre(dim, rng).qr();
    let (mut q, r) = qr.unpack();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Two random states with `Tr(Hρ_1) = Tr(Hρ_2)`.
///
/// Mixing a state with `1/dim` moves its energy toward the maximally mixed
/// energy, so the state further from that energy is mixed down to the other
/// one's. Draws whose energies straddle the maximally mixed energy are
/// discarded and redrawn, at most `max_draws` times.
pub fn equal_energy_pair<R: Rng + ?Sized>(
    h: &[f64],
    rng: &mut R,
    max_draws: usize,
) -> Result<(DensityMatrix, DensityMatrix)> {
    let dim = h.len();
    let centre = h.iter().sum::<f64>() / dim as f64;
    let mixed = DensityMatrix::maximally_mixed(dim);
    for _ in 0..max_draws {
        let a = random_density_matrix(dim, rng);
        let b = random_density_matrix(dim, rng);
        let (ea, eb) = (a.energy(h)? - centre, b.energy(h)? - centre);
        if ea * eb <= 0.0 {
            continue;
        }
        let (far, near, e_far, e_near) = if ea.abs() >= eb.abs() {
            (a, b, ea, eb)
        } else {
            (b, a, eb, ea)
        };
        // Energy of t·far + (1-t)/dim is centre + t·e_far.
        let scaled = DensityMatrix::mix(e_near / e_far, &far, &mixed)?;
        return Ok((scaled, near));
    }
    Err(Error::Numerical {
        iterations: max_draws,
        size: dim,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_diff;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for dim in [1, 2, 5, 16] {
            let u = random_unitary(dim, &mut rng);
            assert!(max_abs_diff(&(&u * u.adjoint()), &DMatrix::identity(dim, dim)) < 1e-12);
        }
    }

    #[test]
    fn random_states_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for dim in [1, 3, 8] {
            let rho = random_density_matrix(dim, &mut rng);
            assert!(rho.validate().is_ok());
        }
    }

    #[test]
    fn pairs_share_energy() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let h = [0.0, 1.0, 1.0, 2.0];
        for _ in 0..20 {
            let (a, b) = equal_energy_pair(&h, &mut rng, 100).unwrap();
            assert!((a.energy(&h).unwrap() - b.energy(&h).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn flat_hamiltonian_never_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        assert!(equal_energy_pair(&[1.0, 1.0], &mut rng, 5).is_err());
    }
}
