//! Work storage protocols on qubits.
//!
//! Both protocols start from a thermal product `τ_β'^{⊗n}` and rotate inside
//! the planes `{|i⟩, |ī⟩}` spanned by a bit string and its negation:
//!
//! - `U_α` rotates every plane with `|i| < n/2` by the same angle, which
//!   rescales the local bias to `cos(2α) z'`;
//! - `V_ℓ` swaps the populations of all planes with `|i| = ℓ`, leaving the
//!   state diagonal.
//!
//! Run backwards, either one extracts work from the locally thermal state it
//! prepared.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::families::product_thermal;
use crate::passivity::ThermalParams;
use crate::state::{marginals, partial_trace_to, qubit_bias, DensityMatrix};
use crate::system::{binomial_pmf, qubit_weight, SystemSpec};
use crate::unitary::{apply_unitary, Rotation, StructuredUnitary};

/// Tolerance on the bias reached by [`prepare_locally_thermal`].
pub const PREPARE_BIAS_TOL: f64 = 1e-10;
/// Residual below which an inversion sequence counts as having hit its target.
pub const SEQUENCE_BIAS_TOL: f64 = 1e-10;

/// A state produced by a protocol and the local bias it was aiming for.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolResult {
    pub state: DensityMatrix,
    /// Bias of the subsystem-1 marginal.
    pub achieved_bias: f64,
    pub target_bias: f64,
    /// `(2/E) atanh(achieved_bias)`.
    pub beta_local: f64,
}

impl ProtocolResult {
    pub fn residual(&self) -> f64 {
        (self.achieved_bias - self.target_bias).abs()
    }
}

fn all_ones(n: usize) -> usize {
    (1usize << n) - 1
}

/// `U_α`: rotation by `alpha` in every plane `{|i⟩, |ī⟩}` with `|i| < n/2`,
/// identity on `|i| = n/2`.
pub fn u_alpha(spec: &SystemSpec, alpha: f64) -> Result<StructuredUnitary> {
    spec.require_qubits("U_α")?;
    let dim = spec.dim()?;
    let n = spec.n();
    let rotations = (0..dim)
        .filter(|&i| 2 * qubit_weight(i) < n)
        .map(|i| Rotation {
            a: i,
            b: i ^ all_ones(n),
            angle: alpha,
        })
        .collect();
    StructuredUnitary::new(dim, rotations)
}

/// Local inverse temperature of a qubit with bias `z` and gap `energy`.
pub fn beta_from_bias(z: f64, energy: f64) -> f64 {
    2.0 / energy * z.atanh()
}

fn measured_bias(state: &DensityMatrix, spec: &SystemSpec) -> Result<f64> {
    qubit_bias(&partial_trace_to(state, spec, 1)?)
}

/// Applies `U_α` with `α = ½ arccos(target_z / z')` to `τ_β'^{⊗n}`, giving a
/// locally thermal state of bias `target_z` with the entropy of the product.
pub fn prepare_locally_thermal(
    spec: &SystemSpec,
    beta_prime: f64,
    target_z: f64,
) -> Result<ProtocolResult> {
    spec.require_qubits("U_α preparation")?;
    let z_prime = ThermalParams::new(spec, beta_prime)?.bias();
    if !target_z.is_finite() || target_z.abs() > z_prime + 1e-15 {
        return Err(Error::UnreachableBias {
            target: target_z,
            available: z_prime,
        });
    }
    let alpha = if z_prime == 0.0 {
        0.0
    } else {
        0.5 * (target_z / z_prime).clamp(-1.0, 1.0).acos()
    };
    let initial = product_thermal(spec, beta_prime)?;
    let state = apply_unitary(&initial, &u_alpha(spec, alpha)?)?;
    let achieved_bias = measured_bias(&state, spec)?;
    if (achieved_bias - target_z).abs() > PREPARE_BIAS_TOL {
        return Err(Error::Validity(format!(
            "prepared bias {achieved_bias} misses target {target_z}"
        )));
    }
    Ok(ProtocolResult {
        beta_local: beta_from_bias(achieved_bias, spec.gap()),
        state,
        achieved_bias,
        target_bias: target_z,
    })
}

/// Angle used by [`prepare_locally_thermal`] for a given target.
pub fn alpha_for_bias(z_prime: f64, target_z: f64) -> f64 {
    0.5 * (target_z / z_prime).clamp(-1.0, 1.0).acos()
}

/// `V_ℓ`: a quarter turn (population swap, with sign) on every plane
/// `{|i⟩, |ī⟩}` with `|i| = level`.
pub fn inversion_v(spec: &SystemSpec, level: usize) -> Result<StructuredUnitary> {
    spec.require_qubits("the inversion V")?;
    let n = spec.n();
    if 2 * level >= n {
        return Err(Error::Domain(format!(
            "inversion level {level} must be below n/2 = {}",
            n as f64 / 2.0
        )));
    }
    let dim = spec.dim()?;
    let rotations = (0..dim)
        .filter(|&i| qubit_weight(i) == level)
        .map(|i| Rotation {
            a: i,
            b: i ^ all_ones(n),
            angle: FRAC_PI_2,
        })
        .collect();
    StructuredUnitary::new(dim, rotations)
}

/// Local bias after `V_ℓ` acts on a thermal product with excited population
/// `p_prime`:
/// `z'' = z' - 2 C(n,ℓ) (z' + 2μ/n) (p'^ℓ (1-p')^{n-ℓ} - p'^{n-ℓ} (1-p')^ℓ)`,
/// `μ = n p' - ℓ`.
pub fn bias_after_inversion(spec: &SystemSpec, p_prime: f64, level: usize) -> Result<f64> {
    spec.require_qubits("the inversion V")?;
    let n = spec.n();
    if 2 * level >= n {
        return Err(Error::Domain(format!(
            "inversion level {level} must be below n/2"
        )));
    }
    if !(0.0..=1.0).contains(&p_prime) {
        return Err(Error::Domain(format!("population {p_prime} not in [0, 1]")));
    }
    Ok(1.0 - 2.0 * p_prime - inversion_shift(n, p_prime, level))
}

/// Bias decrease caused by `V_ℓ` on a thermal product. The weight-ℓ and
/// weight-(n-ℓ) shells are untouched by other levels, so shifts add.
fn inversion_shift(n: usize, p_prime: f64, level: usize) -> f64 {
    let z_prime = 1.0 - 2.0 * p_prime;
    let mu = n as f64 * p_prime - level as f64;
    // C(n,ℓ) p^ℓ q^{n-ℓ} - C(n,ℓ) p^{n-ℓ} q^ℓ, via shell probabilities.
    let shell_low = binomial_pmf(n, level, p_prime);
    let shell_high = binomial_pmf(n, n - level, p_prime);
    2.0 * (z_prime + 2.0 * mu / n as f64) * (shell_low - shell_high)
}

/// An inversion sequence and where it landed.
#[derive(Debug, Clone, PartialEq)]
pub struct InversionSequence {
    pub result: ProtocolResult,
    /// Levels ℓ inverted, in the order they were accepted.
    pub levels: Vec<usize>,
    /// `|achieved - target|`.
    pub residual: f64,
    /// False when the residual exceeds [`SEQUENCE_BIAS_TOL`].
    pub reached: bool,
}

/// Candidate levels `round(n p' - μ)` for `μ = 0, +1, -1, +2, -2, …`,
/// deduplicated and restricted to `ℓ < n/2`.
pub fn inversion_candidates(n: usize, p_prime: f64) -> Vec<usize> {
    let centre = n as f64 * p_prime;
    let mut out = Vec::new();
    let mut seen = vec![false; n];
    for step in 0..=(2 * n) as i64 {
        let mu = if step % 2 == 0 {
            -(step / 2)
        } else {
            step / 2 + 1
        };
        // μ = 0, +1, -1, +2, -2, …
        let level = (centre - mu as f64).round();
        if level < 0.0 {
            continue;
        }
        let level = level as usize;
        if 2 * level < n && !seen[level] {
            seen[level] = true;
            out.push(level);
        }
    }
    out
}

/// Greedy approach to `target_z` with population inversions on a thermal
/// product at `beta_prime`.
///
/// Candidates are visited in [`inversion_candidates`] order; a level is
/// inverted when that strictly lowers `|bias - target|`. Passes repeat over
/// the remaining levels until one pass accepts nothing. Unreachable targets
/// return the best state found with `reached = false`.
pub fn inversion_sequence_to_bias(
    spec: &SystemSpec,
    beta_prime: f64,
    target_z: f64,
) -> Result<InversionSequence> {
    spec.require_qubits("the inversion sequence")?;
    let n = spec.n();
    let thermal = ThermalParams::new(spec, beta_prime)?;
    let p_prime = thermal.excited_population();
    let mut bias = thermal.bias();
    let mut remaining = inversion_candidates(n, p_prime);
    let mut levels = Vec::new();
    loop {
        let mut accepted = false;
        remaining.retain(|&level| {
            let next = bias - inversion_shift(n, p_prime, level);
            if (next - target_z).abs() < (bias - target_z).abs() {
                bias = next;
                levels.push(level);
                accepted = true;
                false
            } else {
                true
            }
        });
        if !accepted {
            break;
        }
    }
    let mut state = product_thermal(spec, beta_prime)?;
    for &level in &levels {
        state = apply_unitary(&state, &inversion_v(spec, level)?)?;
    }
    let achieved_bias = measured_bias(&state, spec)?;
    let residual = (achieved_bias - target_z).abs();
    Ok(InversionSequence {
        result: ProtocolResult {
            beta_local: beta_from_bias(achieved_bias, spec.gap()),
            state,
            achieved_bias,
            target_bias: target_z,
        },
        levels,
        residual,
        reached: residual <= SEQUENCE_BIAS_TOL,
    })
}

/// Largest spread between the biases of the `n` marginals.
pub fn marginal_bias_spread(state: &DensityMatrix, spec: &SystemSpec) -> Result<f64> {
    let biases: Vec<f64> = marginals(state, spec)?
        .iter()
        .map(qubit_bias)
        .collect::<Result<_>>()?;
    let max = biases.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = biases.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(max - min)
}
