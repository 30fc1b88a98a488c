//! Locally thermal correlated states.
//!
//! Every constructor returns a state whose single-subsystem marginals are the
//! thermal state at the system's reference temperature, except
//! [`product_thermal`], which is thermal at the temperature it is given.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::passivity::ThermalParams;
use crate::state::{shannon_entropy, Block, DensityMatrix};
use crate::system::{binomial_pmf, ln_binomial, qubit_weight, SystemSpec};

/// Scan step of the sign-change search for the Ω mixing weight.
pub const OMEGA_SCAN_STEP: f64 = 1e-3;
/// Bisection tolerance on the Ω mixing weight.
pub const OMEGA_BISECT_TOL: f64 = 1e-12;

/// Linear index of `|a⟩^{⊗n}`.
fn repeated_digit_index(spec: &SystemSpec, a: usize) -> usize {
    (0..spec.n()).fold(0, |acc, _| acc * spec.d() + a)
}

/// `Σ_a e^{-βE_a/2} |a⟩^{⊗n} / √𝒵` without the `n ≥ 2` requirement.
///
/// For `n = 1` this is a pure single-subsystem state, not a thermal one.
pub fn thermal_superposition(spec: &SystemSpec) -> Result<DensityMatrix> {
    let dim = spec.dim()?;
    let t = ThermalParams::new(spec, spec.beta())?;
    let indices: Vec<usize> = (0..spec.d())
        .map(|a| repeated_digit_index(spec, a))
        .collect();
    let amps: Vec<f64> = t.populations.iter().map(|p| p.sqrt()).collect();
    let matrix = DMatrix::from_fn(amps.len(), amps.len(), |r, c| {
        Complex64::new(amps[r] * amps[c], 0.0)
    });
    // Underflowed amplitudes would leave zero rows inside the block; they are harmless.
    Ok(DensityMatrix::blocks_unchecked(
        dim,
        vec![Block { indices, matrix }],
    ))
}

/// The pure locally thermal state `|φ⟩ = Σ_a e^{-βE_a/2} |a⟩^{⊗n} / √𝒵`.
pub fn entangled_phi(spec: &SystemSpec) -> Result<DensityMatrix> {
    if spec.n() < 2 {
        return Err(Error::Domain(
            "a pure state of one subsystem cannot have a thermal marginal".into(),
        ));
    }
    thermal_superposition(spec)
}

/// `Σ_a p_a |a…a⟩⟨a…a|`: the dephased version of [`entangled_phi`].
pub fn rho_sep(spec: &SystemSpec) -> Result<DensityMatrix> {
    if spec.n() < 2 {
        return Err(Error::Domain(
            "the correlated classical state needs n >= 2".into(),
        ));
    }
    let dim = spec.dim()?;
    let t = ThermalParams::new(spec, spec.beta())?;
    let mut p = vec![0.0; dim];
    for (a, &w) in t.populations.iter().enumerate() {
        p[repeated_digit_index(spec, a)] = w;
    }
    Ok(DensityMatrix::diagonal_unchecked(p))
}

/// `τ_β'^{⊗n}`.
pub fn product_thermal(spec: &SystemSpec, beta_prime: f64) -> Result<DensityMatrix> {
    spec.dim()?;
    let t = ThermalParams::new(spec, beta_prime)?;
    Ok(DensityMatrix::product_diagonal(&vec![
        t.populations;
        spec.n()
    ]))
}

/// The separable, locally thermal mixture `t ρ_sep + (1 - t) τ_β^{⊗n}`.
pub fn separable_mixture(spec: &SystemSpec, t: f64) -> Result<DensityMatrix> {
    DensityMatrix::mix(t, &rho_sep(spec)?, &product_thermal(spec, spec.beta())?)
}

/// Qubit basis indices of Hamming weight `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DickeIndexSet {
    pub k: usize,
    /// Ascending.
    pub indices: Vec<usize>,
}

impl DickeIndexSet {
    pub fn new(n: usize, k: usize) -> Self {
        let indices = (0..1usize << n).filter(|&i| qubit_weight(i) == k).collect();
        Self { k, indices }
    }
}

/// `Σ_k C(n,k) p^k (1-p)^{n-k} |D_{n,k}⟩⟨D_{n,k}|` for qubits.
pub fn rho_deg(spec: &SystemSpec) -> Result<DensityMatrix> {
    spec.require_qubits("the Dicke mixture")?;
    let dim = spec.dim()?;
    let n = spec.n();
    let p = ThermalParams::new(spec, spec.beta())?.excited_population();
    let blocks = (0..=n)
        .map(|k| {
            let set = DickeIndexSet::new(n, k);
            let size = set.indices.len();
            let value = binomial_pmf(n, k, p) / size as f64;
            Block {
                indices: set.indices,
                matrix: DMatrix::from_element(size, size, Complex64::new(value, 0.0)),
            }
        })
        .collect();
    Ok(DensityMatrix::blocks_unchecked(dim, blocks))
}

/// Smallest `D ≤ ⌊n/2⌋` with `ln C(n, D) ≥ s`.
pub fn choose_d(n: usize, s: f64) -> Result<usize> {
    if s.is_nan() || s < 0.0 {
        return Err(Error::Domain(format!(
            "entropy must be nonnegative, got {s}"
        )));
    }
    (0..=n / 2)
        .find(|&d| ln_binomial(n, d) >= s)
        .ok_or_else(|| Error::Infeasible {
            reason: format!("no D <= {} has ln C({n}, D) >= {s}", n / 2),
            lo: 0.0,
            hi: ln_binomial(n, n / 2),
        })
}

/// Weights of the three-parameter classical family Ω(ε, δ, γ).
#[derive(Debug, Clone, PartialEq)]
pub struct OmegaParams {
    /// Weight of `|0…0⟩`.
    pub epsilon: f64,
    /// Weight of `|1…1⟩`.
    pub delta: f64,
    /// Total weight spread uniformly over the weight-`D` basis states.
    pub gamma: f64,
    pub d: usize,
}

/// Weights for a given γ, with `ε + δ + γ = 1` and `δ + γD/n = p`.
fn omega_weights(n: usize, d: usize, p: f64, gamma: f64) -> (f64, f64) {
    let epsilon = 1.0 - p - gamma * (n - d) as f64 / n as f64;
    let delta = p - gamma * d as f64 / n as f64;
    (epsilon, delta)
}

/// Entropy of Ω as a function of γ.
fn omega_entropy(n: usize, d: usize, p: f64, gamma: f64) -> f64 {
    let (epsilon, delta) = omega_weights(n, d, p, gamma);
    shannon_entropy(&[epsilon, delta, gamma]) + gamma * ln_binomial(n, d)
}

/// Upper end of the admissible γ range (keeps ε, δ ≥ 0).
fn omega_gamma_max(n: usize, d: usize, p: f64) -> f64 {
    let mut g: f64 = 1.0;
    if d > 0 {
        g = g.min(n as f64 * p / d as f64);
    }
    if d < n {
        g = g.min(n as f64 * (1.0 - p) / (n - d) as f64);
    }
    g
}

/// The classical state `ε|0…0⟩⟨0…0| + δ|1…1⟩⟨1…1| + γ/C(n,D) Σ_{|i|=D} |i⟩⟨i|`
/// with locally thermal marginals and total entropy `s_total`.
pub fn omega_state(spec: &SystemSpec, s_total: f64) -> Result<(DensityMatrix, OmegaParams)> {
    spec.require_qubits("the Ω family")?;
    let dim = spec.dim()?;
    let n = spec.n();
    if n < 2 {
        return Err(Error::Domain("the Ω family needs n >= 2".into()));
    }
    let p = ThermalParams::new(spec, spec.beta())?.excited_population();
    let d = choose_d(n, s_total)?;
    if d == 0 {
        return Err(Error::Infeasible {
            reason: "zero entropy is below every locally thermal Ω state".into(),
            lo: omega_entropy(n, 1, p, 0.0),
            hi: omega_entropy(n, 1, p, 0.0),
        });
    }
    let g_max = omega_gamma_max(n, d, p);
    let f = |g: f64| omega_entropy(n, d, p, g) - s_total;

    let f0 = f(0.0);
    let mut gamma = None;
    if f0.abs() <= OMEGA_BISECT_TOL {
        gamma = Some(0.0);
    } else {
        let steps = (g_max / OMEGA_SCAN_STEP).ceil() as usize;
        let (mut lo_f, mut hi_f) = (f0, f0);
        let mut prev = (0.0, f0);
        for k in 1..=steps {
            let g = (k as f64 * OMEGA_SCAN_STEP).min(g_max);
            let v = f(g);
            lo_f = lo_f.min(v);
            hi_f = hi_f.max(v);
            if v == 0.0 {
                gamma = Some(g);
                break;
            }
            if (v > 0.0) != (prev.1 > 0.0) {
                gamma = Some(bisect(&f, prev.0, g, prev.1));
                break;
            }
            prev = (g, v);
        }
        if gamma.is_none() {
            return Err(Error::Infeasible {
                reason: format!(
                    "no mixing weight in [0, {g_max:.6}] reaches S = {s_total} with D = {d}"
                ),
                lo: lo_f + s_total,
                hi: hi_f + s_total,
            });
        }
    }
    let gamma = gamma.expect("root located");
    let (epsilon, delta) = omega_weights(n, d, p, gamma);
    let set = DickeIndexSet::new(n, d);
    let spread = gamma / set.indices.len() as f64;
    let mut pops = vec![0.0; dim];
    for &i in &set.indices {
        pops[i] = spread;
    }
    pops[0] += epsilon;
    pops[dim - 1] += delta;
    let params = OmegaParams {
        epsilon,
        delta,
        gamma,
        d,
    };
    Ok((DensityMatrix::diagonal_unchecked(pops), params))
}

fn bisect(f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, f_lo: f64) -> f64 {
    let lo_positive = f_lo > 0.0;
    while hi - lo > OMEGA_BISECT_TOL {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if (f(mid) > 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::passivity::{ergotropy_in, thermal_state};
    use crate::state::{marginals, max_entry_distance, von_neumann_entropy};

    const P1: f64 = 0.268_941_421_369_995_1;

    fn qubits(n: usize, beta: f64) -> SystemSpec {
        SystemSpec::qubits(n, 1.0, beta).unwrap()
    }

    fn assert_locally_thermal(rho: &DensityMatrix, spec: &SystemSpec, tol: f64) {
        let tau = thermal_state(spec, spec.beta()).unwrap();
        for m in marginals(rho, spec).unwrap() {
            assert!(max_entry_distance(&m, &tau).unwrap() < tol);
        }
    }

    #[test]
    fn phi_at_infinite_temperature_is_bell() {
        let rho = entangled_phi(&qubits(2, 0.0)).unwrap();
        let s = 0.5;
        for (i, j) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            assert!((rho.entry(i, j).re - s).abs() < 1e-15);
        }
        assert!(rho.entry(1, 1).norm() == 0.0);
    }

    #[test]
    fn phi_rejects_single_subsystem() {
        assert!(matches!(
            entangled_phi(&qubits(1, 1.0)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn phi_amplitude_and_marginals() {
        let spec = qubits(3, 1.0);
        let rho = entangled_phi(&spec).unwrap();
        assert!((rho.entry(7, 7).re - 0.268941).abs() < 1e-6);
        assert_locally_thermal(&rho, &spec, 1e-10);
        let m = crate::state::partial_trace_to(&rho, &spec, 2).unwrap();
        assert!((m.diagonal()[0] - 0.731059).abs() < 1e-6);
        assert!(von_neumann_entropy(&rho).unwrap() < 1e-10);
    }

    #[test]
    fn phi_for_qutrits_is_locally_thermal() {
        let spec = SystemSpec::new(3, vec![0.0, 0.4, 1.5], 0.8).unwrap();
        assert_locally_thermal(&entangled_phi(&spec).unwrap(), &spec, 1e-10);
    }

    #[test]
    fn rho_sep_examples() {
        let rho = rho_sep(&qubits(2, 0.0)).unwrap();
        assert_eq!(rho.diagonal(), vec![0.5, 0.0, 0.0, 0.5]);
        let spec = qubits(5, 1.0);
        let rho = rho_sep(&spec).unwrap();
        assert!((von_neumann_entropy(&rho).unwrap() - 0.582203).abs() < 1e-5);
        assert_locally_thermal(&rho, &spec, 1e-10);
        // Dephasing |φ⟩ gives ρ_sep.
        let phi = entangled_phi(&spec).unwrap();
        for (a, b) in phi.diagonal().iter().zip(rho.diagonal()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn product_thermal_examples() {
        let spec = qubits(3, 1.0);
        let rho = product_thermal(&spec, 0.0).unwrap();
        assert!(rho.diagonal().iter().all(|&x| (x - 0.125).abs() < 1e-16));
        let rho = product_thermal(&spec, 0.7).unwrap();
        let t = ThermalParams::new(&spec, 0.7).unwrap();
        let h = crate::system::build_hamiltonian(&spec).unwrap();
        assert!((rho.energy(&h).unwrap() - 3.0 * t.mean_energy).abs() < 1e-10);
        assert!((von_neumann_entropy(&rho).unwrap() - 3.0 * t.entropy()).abs() < 1e-9);
    }

    #[test]
    fn rho_deg_examples() {
        let spec = qubits(1, 1.0);
        let tau = thermal_state(&spec, 1.0).unwrap();
        assert!(max_entry_distance(&rho_deg(&spec).unwrap(), &tau).unwrap() < 1e-15);

        let spec = qubits(2, 1.0);
        let s = rho_deg(&spec).unwrap().spectrum().unwrap();
        let p = ThermalParams::new(&spec, 1.0).unwrap().excited_population();
        let q = 1.0 - p;
        for (got, want) in s.values.iter().zip([q * q, 2.0 * p * q, p * p, 0.0]) {
            assert!((got - want).abs() < 1e-12, "{:?}", s.values);
        }
        for n in 1..=10 {
            let spec = qubits(n, 1.0);
            let rho = rho_deg(&spec).unwrap();
            assert_eq!(rho.spectrum().unwrap().rank(1e-12), n + 1);
            assert_locally_thermal(&rho, &spec, 1e-10);
            let product = product_thermal(&spec, 1.0).unwrap();
            let diff = rho
                .diagonal()
                .iter()
                .zip(product.diagonal())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            assert!(diff < 1e-12);
        }
        let qutrits = SystemSpec::new(2, vec![0.0, 1.0, 2.0], 1.0).unwrap();
        assert!(matches!(rho_deg(&qutrits), Err(Error::Unsupported(_))));
    }

    #[test]
    fn choose_d_examples() {
        assert_eq!(choose_d(8, 0.0).unwrap(), 0);
        assert_eq!(choose_d(8, 2.0).unwrap(), 1);
        assert_eq!(choose_d(8, 2.1).unwrap(), 2);
        assert!(matches!(
            choose_d(8, 70f64.ln() + 0.01),
            Err(Error::Infeasible { .. })
        ));
    }

    #[test]
    fn omega_at_minimal_entropy_is_dephased_phi() {
        let spec = qubits(6, 1.0);
        let s = ThermalParams::new(&spec, 1.0).unwrap().entropy();
        let (rho, params) = omega_state(&spec, s).unwrap();
        assert_eq!(params.gamma, 0.0);
        assert!((params.epsilon - (1.0 - P1)).abs() < 1e-15);
        assert!((params.delta - P1).abs() < 1e-15);
        assert!(max_entry_distance(&rho, &rho_sep(&spec).unwrap()).unwrap() < 1e-15);
    }

    #[test]
    fn omega_n8_entropy_two() {
        let spec = qubits(8, 1.0);
        let (rho, params) = omega_state(&spec, 2.0).unwrap();
        assert_eq!(params.d, 1);
        assert!((params.epsilon + params.delta + params.gamma - 1.0).abs() < 1e-12);
        assert!((params.delta + params.gamma / 8.0 - P1).abs() < 1e-12);
        // Independent recomputation from the stored matrix.
        let dense = rho.to_dense_state();
        assert!((von_neumann_entropy(&dense).unwrap() - 2.0).abs() < 1e-8);
        assert_locally_thermal(&dense, &spec, 1e-10);
        assert!(rho.spectrum().unwrap().rank(1e-14) <= 2 + 8);
        let w = ergotropy_in(&rho, &spec).unwrap().ergotropy;
        assert!(w > 8.0 * P1 - 2.0);
    }

    #[test]
    fn omega_reports_infeasible_entropy() {
        let spec = qubits(4, 1.0);
        // ln C(4,2) = ln 6 is the largest reachable value of ln C(n, D).
        assert!(matches!(
            omega_state(&spec, 1.9),
            Err(Error::Infeasible { .. })
        ));
        assert!(matches!(
            omega_state(&spec, 0.0),
            Err(Error::Infeasible { .. })
        ));
    }

    #[test]
    fn mixtures_are_locally_thermal() {
        let spec = qubits(4, 1.0);
        for t in [0.0, 0.3, 1.0] {
            assert_locally_thermal(&separable_mixture(&spec, t).unwrap(), &spec, 1e-12);
        }
    }
}
