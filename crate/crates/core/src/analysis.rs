//! Entanglement detection, bath-assisted bounds and level counting.

use std::collections::BTreeSet;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::hermitian_eigenvalues;
use crate::passivity::{mean_local_energy, ThermalParams};
use crate::state::{marginals, von_neumann_entropy, DensityMatrix};
use crate::system::{binomial, binomial_pmf, SystemSpec};

/// Most negative partial-transpose eigenvalue still read as zero.
pub const NPT_TOL: f64 = 1e-10;

/// A split of the `n` subsystems (1-based labels) into two nonempty sides.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bipartition {
    side_a: BTreeSet<usize>,
    side_b: BTreeSet<usize>,
}

impl Bipartition {
    pub fn new(n: usize, side_a: impl IntoIterator<Item = usize>) -> Result<Self> {
        let side_a: BTreeSet<usize> = side_a.into_iter().collect();
        if let Some(&k) = side_a.iter().find(|&&k| k == 0 || k > n) {
            return Err(Error::Shape(format!("subsystem {k} is not in 1..={n}")));
        }
        let side_b: BTreeSet<usize> = (1..=n).filter(|k| !side_a.contains(k)).collect();
        if side_a.is_empty() || side_b.is_empty() {
            return Err(Error::Shape(
                "both sides of a bipartition must be nonempty".into(),
            ));
        }
        Ok(Self { side_a, side_b })
    }

    /// First `n/2` subsystems against the rest.
    pub fn half(n: usize) -> Result<Self> {
        Self::new(n, 1..=n / 2)
    }

    pub fn side_a(&self) -> &BTreeSet<usize> {
        &self.side_a
    }

    pub fn side_b(&self) -> &BTreeSet<usize> {
        &self.side_b
    }

    fn n(&self) -> usize {
        self.side_a.len() + self.side_b.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// Negative partial transpose.
    Entangled,
    PptUndecided,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntanglementVerdict {
    pub min_pt_eigenvalue: f64,
    pub witness: Option<f64>,
    pub verdict: Verdict,
}

/// `ρ^{T_A}`: transposes the digits of every subsystem on side A.
pub fn partial_transpose(
    rho: &DensityMatrix,
    spec: &SystemSpec,
    part: &Bipartition,
) -> Result<DMatrix<Complex64>> {
    let dim = spec.dim()?;
    if rho.dim() != dim || part.n() != spec.n() {
        return Err(Error::Shape(format!(
            "state of dimension {} and a {}-party split do not fit {} subsystems of dimension {}",
            rho.dim(),
            part.n(),
            spec.n(),
            spec.d()
        )));
    }
    let d = spec.d();
    let strides: Vec<usize> = part.side_a.iter().map(|&k| spec.stride(k)).collect();
    let mut out = DMatrix::<Complex64>::zeros(dim, dim);
    rho.for_each_entry(|i, j, v| {
        let (mut ti, mut tj) = (i, j);
        for &s in &strides {
            let di = (i / s) % d;
            let dj = (j / s) % d;
            ti = ti - di * s + dj * s;
            tj = tj - dj * s + di * s;
        }
        out[(ti, tj)] = v;
    });
    Ok(out)
}

/// Smallest eigenvalue of `ρ^{T_A}`, with the NPT verdict.
pub fn detect_entanglement(
    rho: &DensityMatrix,
    spec: &SystemSpec,
    part: &Bipartition,
    witness: Option<f64>,
) -> Result<EntanglementVerdict> {
    let pt = partial_transpose(rho, spec, part)?;
    let min_pt_eigenvalue = hermitian_eigenvalues(&pt)?.min();
    let verdict = if min_pt_eigenvalue < -NPT_TOL {
        Verdict::Entangled
    } else {
        Verdict::PptUndecided
    };
    Ok(EntanglementVerdict {
        min_pt_eigenvalue,
        witness,
        verdict,
    })
}

/// `sin(2α)(1 - e^{-β'En}) - 2e^{-β'En/2}`. Positive values certify that
/// `U_α τ_β'^{⊗n} U_α†` is entangled across the half-half split: the
/// partial transpose then has a negative 2x2 principal minor on
/// `(0^{n/2}1^{n/2}, 1^{n/2}0^{n/2})`.
pub fn half_split_witness(spec: &SystemSpec, beta_prime: f64, alpha: f64) -> Result<f64> {
    spec.require_qubits("the half-split witness")?;
    if !spec.n().is_multiple_of(2) {
        return Err(Error::Domain(format!(
            "the half-split witness needs even n, got {}",
            spec.n()
        )));
    }
    let x = beta_prime * spec.gap() * spec.n() as f64;
    Ok((2.0 * alpha).sin() * (1.0 - (-x).exp()) - 2.0 * (-x / 2.0).exp())
}

/// `Tr(Hρ) - S(ρ)/β`.
pub fn free_energy(rho: &DensityMatrix, h: &[f64], beta: f64) -> Result<f64> {
    if beta <= 0.0 || !beta.is_finite() {
        return Err(Error::Domain(format!(
            "free energy needs a positive finite beta, got {beta}"
        )));
    }
    Ok(rho.energy(h)? - von_neumann_entropy(rho)? / beta)
}

/// Work extractable from a locally thermal state of entropy `s_total` with
/// access to a bath at the reference temperature: `(nS(τ_β) - S)/β`.
pub fn bath_extractable_work(spec: &SystemSpec, s_total: f64) -> Result<f64> {
    let beta = spec.beta();
    if beta.is_nan() || beta <= 0.0 {
        return Err(Error::Domain("bath-assisted work needs beta > 0".into()));
    }
    let s_max = spec.n() as f64 * ThermalParams::new(spec, beta)?.entropy();
    if !(0.0..=s_max + 1e-12).contains(&s_total) {
        return Err(Error::Domain(format!(
            "entropy {s_total} outside [0, {s_max}]"
        )));
    }
    Ok((s_max - s_total).max(0.0) / beta)
}

/// `Σ_i S(ρ_i) - S(ρ)`.
pub fn mutual_information_multipartite(rho: &DensityMatrix, spec: &SystemSpec) -> Result<f64> {
    let local: f64 = marginals(rho, spec)?
        .iter()
        .map(von_neumann_entropy)
        .sum::<Result<f64>>()?;
    Ok(local - von_neumann_entropy(rho)?)
}

/// Distinct global energies of `n` subsystems with a generic `d`-level ladder:
/// `C(n+d-1, d-1)`.
pub fn count_global_energies(n: usize, d: usize) -> Result<u128> {
    if d == 0 {
        return Err(Error::Domain("local dimension must be positive".into()));
    }
    binomial((n + d - 1) as u64, (d - 1) as u64)
        .ok_or_else(|| Error::Domain(format!("level count for n={n}, d={d} overflows")))
}

/// `nE_β - (1 - max_k C(n,k)p^k(1-p)^{n-k}) E` for qubits.
pub fn w_deg_qubit_formula(spec: &SystemSpec) -> Result<f64> {
    spec.require_qubits("the Dicke-mixture work formula")?;
    Ok(spec.n() as f64 * mean_local_energy(spec) - w_deg_correction(spec)?)
}

/// The `O(1)` gap `(1 - max_k binom) E` between `nE_β` and the Dicke-mixture work.
pub fn w_deg_correction(spec: &SystemSpec) -> Result<f64> {
    spec.require_qubits("the Dicke-mixture work formula")?;
    let n = spec.n();
    let p = ThermalParams::new(spec, spec.beta())?.excited_population();
    let peak = (0..=n).map(|k| binomial_pmf(n, k, p)).fold(0.0, f64::max);
    Ok((1.0 - peak) * spec.gap())
}
