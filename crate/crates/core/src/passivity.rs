//! Thermal and passive states, ergotropy and the closed-form work bounds.
//!
//! The passive state of `ρ` carries `ρ`'s eigenvalues in descending order on
//! the energy levels in ascending order. Degenerate energies are ordered by
//! ascending basis index, which fixes the passive state without changing its
//! energy.

use crate::error::{Error, Result};
use crate::state::{shannon_entropy, spectrum_entropy, DensityMatrix};
use crate::system::{build_hamiltonian, SystemSpec};

/// Stand-in for an infinite inverse temperature, in units of `1/E_1`.
pub const BETA_MAX: f64 = 1e6;
/// Absolute tolerance on the entropy residual when inverting `β' ↦ S(τ_β')`.
pub const ENTROPY_INVERSION_TOL: f64 = 1e-12;
/// Iteration budget of that bisection.
pub const ENTROPY_INVERSION_MAX_ITER: usize = 200;

/// Largest off-diagonal magnitude still treated as diagonal by [`is_passive`].
pub const PASSIVE_COHERENCE_TOL: f64 = 1e-10;
/// Slack on population ordering in [`is_passive`].
pub const PASSIVE_ORDER_SLACK: f64 = 1e-12;

/// Gibbs populations of the local Hamiltonian at a given inverse temperature.
#[derive(Debug, Clone, PartialEq)]
pub struct ThermalParams {
    pub beta_prime: f64,
    /// `e^{-β' E_a} / 𝒵'` for `a = 0..d`.
    pub populations: Vec<f64>,
    pub partition_function: f64,
    /// `Tr(τ_β' h)`.
    pub mean_energy: f64,
}

impl ThermalParams {
    pub fn new(spec: &SystemSpec, beta_prime: f64) -> Result<Self> {
        if beta_prime.is_nan() || beta_prime < 0.0 {
            return Err(Error::Domain(format!(
                "inverse temperature must be nonnegative, got {beta_prime}"
            )));
        }
        let weights: Vec<f64> = spec
            .local_energies()
            .iter()
            .map(|&e| (-beta_prime * e).exp())
            .collect();
        let z: f64 = weights.iter().sum();
        let populations: Vec<f64> = weights.iter().map(|w| w / z).collect();
        let mean_energy = populations
            .iter()
            .zip(spec.local_energies())
            .map(|(p, e)| p * e)
            .sum();
        Ok(Self {
            beta_prime,
            populations,
            partition_function: z,
            mean_energy,
        })
    }

    /// `S(τ_β')` in nats.
    pub fn entropy(&self) -> f64 {
        shannon_entropy(&self.populations)
    }

    /// Ground minus first-excited population; `tanh(β'E/2)` for a qubit.
    pub fn bias(&self) -> f64 {
        self.populations[0] - self.populations[1]
    }

    /// Population of the first excited level.
    pub fn excited_population(&self) -> f64 {
        self.populations[1]
    }
}

/// `τ_β = e^{-βh}/𝒵` of one subsystem.
pub fn thermal_state(spec: &SystemSpec, beta: f64) -> Result<DensityMatrix> {
    let params = ThermalParams::new(spec, beta)?;
    Ok(DensityMatrix::diagonal_unchecked(params.populations))
}

/// Mean local energy `E_β` at the system's reference temperature.
pub fn mean_local_energy(spec: &SystemSpec) -> f64 {
    ThermalParams::new(spec, spec.beta())
        .expect("spec beta is nonnegative")
        .mean_energy
}

/// Basis indices sorted by energy, ties by index.
pub fn energy_order(h: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..h.len()).collect();
    order.sort_by(|&a, &b| h[a].total_cmp(&h[b]).then(a.cmp(&b)));
    order
}

fn check_dims(rho: &DensityMatrix, h: &[f64]) -> Result<()> {
    if rho.dim() != h.len() {
        return Err(Error::Shape(format!(
            "state has dimension {}, Hamiltonian {} levels",
            rho.dim(),
            h.len()
        )));
    }
    Ok(())
}

/// The passive state unitarily reachable from `rho`.
pub fn passive_state(rho: &DensityMatrix, h: &[f64]) -> Result<DensityMatrix> {
    check_dims(rho, h)?;
    let spectrum = rho.spectrum()?;
    let mut populations = vec![0.0; h.len()];
    for (&level, &value) in energy_order(h).iter().zip(&spectrum.values) {
        populations[level] = value;
    }
    Ok(DensityMatrix::diagonal_unchecked(populations))
}

/// Energy of the passive state: descending eigenvalues paired with
/// ascending energies.
pub fn passive_energy(eigenvalues_desc: &[f64], h: &[f64]) -> f64 {
    let mut energies = h.to_vec();
    energies.sort_by(f64::total_cmp);
    eigenvalues_desc
        .iter()
        .zip(&energies)
        .map(|(p, e)| p * e)
        .sum()
}

/// Outcome of an ergotropy evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct WorkReport {
    /// `Tr(ρH)`.
    pub initial_energy: f64,
    /// `Tr(ρ_passive H)`.
    pub passive_energy: f64,
    /// `initial_energy - passive_energy`.
    pub ergotropy: f64,
    /// Upper bound on the work: `n E_β` for a system, otherwise the initial
    /// energy (the Hamiltonian is nonnegative).
    pub bound_n_ebeta: f64,
    /// Entropy-constrained bound at the state's own entropy, when known.
    pub bound_entropy: Option<f64>,
    /// `ergotropy / bound_n_ebeta` (zero when the bound vanishes).
    pub ratio_to_bound: f64,
    /// Von Neumann entropy of the state in nats.
    pub entropy: f64,
}

fn ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// Maximal work extractable from `rho` by a global unitary.
pub fn ergotropy(rho: &DensityMatrix, h: &[f64]) -> Result<WorkReport> {
    check_dims(rho, h)?;
    let spectrum = rho.spectrum()?;
    let entropy = spectrum_entropy(&spectrum)?;
    let initial_energy = rho.energy(h)?;
    let passive_energy = passive_energy(&spectrum.values, h);
    let ergotropy = initial_energy - passive_energy;
    Ok(WorkReport {
        initial_energy,
        passive_energy,
        ergotropy,
        bound_n_ebeta: initial_energy,
        bound_entropy: None,
        ratio_to_bound: ratio(ergotropy, initial_energy),
        entropy,
    })
}

/// [`ergotropy`] of a state of `spec`, with the bounds `n E_β` and the
/// entropy-constrained bound evaluated at the state's entropy.
pub fn ergotropy_in(rho: &DensityMatrix, spec: &SystemSpec) -> Result<WorkReport> {
    let h = build_hamiltonian(spec)?;
    let mut report = ergotropy(rho, &h)?;
    report.bound_n_ebeta = spec.n() as f64 * mean_local_energy(spec);
    report.ratio_to_bound = ratio(report.ergotropy, report.bound_n_ebeta);
    report.bound_entropy = bound_entropy_constrained(spec, report.entropy.max(0.0)).ok();
    Ok(report)
}

/// Whether `rho` is passive for `h`: diagonal to [`PASSIVE_COHERENCE_TOL`]
/// and no population on a higher energy exceeds one on a strictly lower
/// energy by more than [`PASSIVE_ORDER_SLACK`].
pub fn is_passive(rho: &DensityMatrix, h: &[f64]) -> Result<bool> {
    check_dims(rho, h)?;
    if rho.max_off_diagonal() > PASSIVE_COHERENCE_TOL {
        return Ok(false);
    }
    let p = rho.diagonal();
    let order = energy_order(h);
    // Walk energy groups; every population must stay below the minimum of
    // all strictly lower groups.
    let mut floor = f64::INFINITY;
    let mut start = 0;
    while start < order.len() {
        let level = h[order[start]];
        let end = start
            + order[start..]
                .iter()
                .take_while(|&&i| h[i] == level)
                .count();
        let group = &order[start..end];
        if group.iter().any(|&i| p[i] > floor + PASSIVE_ORDER_SLACK) {
            return Ok(false);
        }
        floor = group.iter().map(|&i| p[i]).fold(floor, f64::min);
        start = end;
    }
    Ok(true)
}

/// Inverse temperature whose local thermal state has entropy
/// `s_per_subsystem`, by bisection on the decreasing map `β' ↦ S(τ_β')`.
///
/// Returns `β' = 0` at the maximal entropy `ln d` and [`BETA_MAX`] (in units
/// of `1/E_1`) at the minimal one.
pub fn beta_for_entropy(spec: &SystemSpec, s_per_subsystem: f64) -> Result<ThermalParams> {
    let d = spec.d();
    let s_max = (d as f64).ln();
    let ground_degeneracy = spec
        .local_energies()
        .iter()
        .take_while(|&&e| e == 0.0)
        .count();
    let s_min = (ground_degeneracy as f64).ln();
    if !s_per_subsystem.is_finite()
        || s_per_subsystem < s_min - ENTROPY_INVERSION_TOL
        || s_per_subsystem > s_max + ENTROPY_INVERSION_TOL
    {
        return Err(Error::Domain(format!(
            "entropy per subsystem {s_per_subsystem} outside [{s_min}, {s_max}]"
        )));
    }
    let beta_cap = BETA_MAX / spec.gap().max(f64::MIN_POSITIVE);
    if s_per_subsystem >= s_max {
        return ThermalParams::new(spec, 0.0);
    }
    if s_per_subsystem <= s_min {
        return ThermalParams::new(spec, beta_cap);
    }
    let entropy_at = |b: f64| ThermalParams::new(spec, b).map(|t| t.entropy());
    // Bracket on [lo, hi] with S(lo) > s > S(hi).
    let (mut lo, mut hi) = (0.0_f64, 1.0 / spec.gap().max(f64::MIN_POSITIVE));
    while entropy_at(hi)? > s_per_subsystem {
        lo = hi;
        hi *= 2.0;
        if hi >= beta_cap {
            hi = beta_cap;
            break;
        }
    }
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..ENTROPY_INVERSION_MAX_ITER {
        mid = 0.5 * (lo + hi);
        let s = entropy_at(mid)?;
        if (s - s_per_subsystem).abs() <= ENTROPY_INVERSION_TOL || mid == lo || mid == hi {
            break;
        }
        if s > s_per_subsystem {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    ThermalParams::new(spec, mid)
}

/// Upper bound on the work from any state of entropy `s_total`:
/// `n E_β - n Tr(τ_β' h)` with `S(τ_β') = s_total / n`.
pub fn bound_entropy_constrained(spec: &SystemSpec, s_total: f64) -> Result<f64> {
    let n = spec.n() as f64;
    let s_max = n * (spec.d() as f64).ln();
    if !(0.0..=s_max + ENTROPY_INVERSION_TOL).contains(&s_total) {
        return Err(Error::Domain(format!(
            "total entropy {s_total} outside [0, {s_max}]"
        )));
    }
    let target = beta_for_entropy(spec, s_total / n)?;
    Ok(n * mean_local_energy(spec) - n * target.mean_energy)
}

/// Ergotropy of the dephased classical state: `n E_β - E_1 (1 - 1/𝒵)`,
/// valid once there are at least `d - 1` subsystems.
pub fn w_sep_formula(spec: &SystemSpec) -> Result<f64> {
    let (n, d) = (spec.n(), spec.d());
    if n + 1 < d {
        return Err(Error::Domain(format!(
            "the separable optimum is only known for n >= d - 1 (n = {n}, d = {d})"
        )));
    }
    let params = ThermalParams::new(spec, spec.beta())?;
    Ok(n as f64 * params.mean_energy - spec.gap() * (1.0 - 1.0 / params.partition_function))
}
