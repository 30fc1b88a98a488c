//! Multi-qudit system description, basis indexing and the non-interacting
//! Hamiltonian.
//!
//! Basis states are linearised big-endian: subsystem 1 is the most
//! significant digit, so for qubits the index `0b101` is `|1⟩|0⟩|1⟩`.
//! Subsystems are numbered from 1 in every public interface.

use crate::error::{Error, Result};

/// Default bound on the global dimension `d^n`.
pub const DEFAULT_DIM_CAP: usize = 16_384;

/// An `n`-partite system of identical `d`-level subsystems sharing one local
/// Hamiltonian `h = Σ_a E_a |a⟩⟨a|` and a reference inverse temperature.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemSpec {
    n: usize,
    local_energies: Vec<f64>,
    beta: f64,
    dim_cap: usize,
}

impl SystemSpec {
    /// The ladder must start at zero and be nondecreasing; `d` is its length.
    pub fn new(n: usize, local_energies: Vec<f64>, beta: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Validity("need at least one subsystem".into()));
        }
        if local_energies.len() < 2 {
            return Err(Error::Validity(format!(
                "local dimension must be at least 2, got {}",
                local_energies.len()
            )));
        }
        if local_energies.iter().any(|e| !e.is_finite()) {
            return Err(Error::Validity("local energies must be finite".into()));
        }
        if local_energies[0] != 0.0 {
            return Err(Error::Validity(format!(
                "ground energy must be zero, got {}",
                local_energies[0]
            )));
        }
        if local_energies.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::Validity(
                "local energies must be nondecreasing".into(),
            ));
        }
        if !(beta.is_finite() && beta >= 0.0) {
            return Err(Error::Validity(format!(
                "beta must be finite and nonnegative, got {beta}"
            )));
        }
        Ok(Self {
            n,
            local_energies,
            beta,
            dim_cap: DEFAULT_DIM_CAP,
        })
    }

    /// `n` qubits with gap `energy`.
    pub fn qubits(n: usize, energy: f64, beta: f64) -> Result<Self> {
        if energy.is_nan() || energy <= 0.0 {
            return Err(Error::Validity(format!(
                "qubit gap must be positive, got {energy}"
            )));
        }
        Self::new(n, vec![0.0, energy], beta)
    }

    /// `n` qudits with the equally spaced ladder `0, E, 2E, …`.
    pub fn equally_spaced(n: usize, d: usize, energy: f64, beta: f64) -> Result<Self> {
        Self::new(n, (0..d).map(|a| a as f64 * energy).collect(), beta)
    }

    pub fn with_dim_cap(mut self, cap: usize) -> Self {
        self.dim_cap = cap;
        self
    }

    pub fn with_n(&self, n: usize) -> Result<Self> {
        Ok(Self::new(n, self.local_energies.clone(), self.beta)?.with_dim_cap(self.dim_cap))
    }

    pub fn with_beta(&self, beta: f64) -> Result<Self> {
        Ok(Self::new(self.n, self.local_energies.clone(), beta)?.with_dim_cap(self.dim_cap))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.local_energies.len()
    }

    pub fn local_energies(&self) -> &[f64] {
        &self.local_energies
    }

    /// First excited energy `E_1`; the qubit gap `E` when `d = 2`.
    pub fn gap(&self) -> f64 {
        self.local_energies[1]
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn dim_cap(&self) -> usize {
        self.dim_cap
    }

    /// Global dimension `d^n`, checked against the cap.
    pub fn dim(&self) -> Result<usize> {
        let d = self.d();
        let mut dim: usize = 1;
        for _ in 0..self.n {
            dim = match dim.checked_mul(d) {
                Some(v) if v <= self.dim_cap => v,
                _ => {
                    return Err(Error::Capacity {
                        dim: (d as f64).powi(self.n as i32).min(usize::MAX as f64) as usize,
                        cap: self.dim_cap,
                    })
                }
            };
        }
        Ok(dim)
    }

    pub(crate) fn require_qubits(&self, what: &str) -> Result<()> {
        if self.d() != 2 {
            return Err(Error::Unsupported(format!(
                "{what} is defined for qubits only (d = {})",
                self.d()
            )));
        }
        Ok(())
    }

    /// Checks a 1-based subsystem label.
    pub(crate) fn check_subsystem(&self, k: usize) -> Result<()> {
        if k == 0 || k > self.n {
            return Err(Error::Shape(format!(
                "subsystem {k} is not in 1..={}",
                self.n
            )));
        }
        Ok(())
    }

    /// Stride of subsystem `k` (1-based) in the linear index.
    pub(crate) fn stride(&self, k: usize) -> usize {
        self.d().pow((self.n - k) as u32)
    }
}

/// A product basis state, held both as digits and as its linear index.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BasisIndex {
    digits: Vec<usize>,
    linear: usize,
}

impl BasisIndex {
    pub fn from_digits(digits: Vec<usize>, d: usize) -> Result<Self> {
        if let Some(&bad) = digits.iter().find(|&&x| x >= d) {
            return Err(Error::Validity(format!(
                "digit {bad} out of range for d = {d}"
            )));
        }
        let linear = digits.iter().fold(0usize, |acc, &x| acc * d + x);
        Ok(Self { digits, linear })
    }

    pub fn from_linear(linear: usize, n: usize, d: usize) -> Self {
        let mut digits = vec![0; n];
        let mut rest = linear;
        for slot in digits.iter_mut().rev() {
            *slot = rest % d;
            rest /= d;
        }
        Self { digits, linear }
    }

    pub fn digits(&self) -> &[usize] {
        &self.digits
    }

    pub fn linear(&self) -> usize {
        self.linear
    }

    /// Sum of digits; the Hamming weight `|i|` for qubits.
    pub fn weight(&self) -> usize {
        self.digits.iter().sum()
    }

    /// Occupation numbers: how many subsystems sit in each local level.
    pub fn occupations(&self, d: usize) -> Vec<usize> {
        let mut occ = vec![0; d];
        for &x in &self.digits {
            occ[x] += 1;
        }
        occ
    }
}

/// Diagonal of `H = Σ_i h_i` in the product basis.
///
/// Each entry is `Σ_a occ_a E_a`, so permutation-related basis states get
/// bitwise identical energies.
pub fn build_hamiltonian(spec: &SystemSpec) -> Result<Vec<f64>> {
    let dim = spec.dim()?;
    let (n, d) = (spec.n(), spec.d());
    let energies = spec.local_energies();
    Ok((0..dim)
        .map(|i| {
            let occ = BasisIndex::from_linear(i, n, d).occupations(d);
            occ.iter().zip(energies).map(|(&c, &e)| c as f64 * e).sum()
        })
        .collect())
}

/// Hamming weight of a qubit basis index.
pub fn qubit_weight(index: usize) -> usize {
    index.count_ones() as usize
}

/// Exact binomial coefficient; `None` on overflow.
pub fn binomial(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}

/// `ln C(n, k)` through log-gamma-free summation; exact enough for n in the thousands.
pub fn ln_binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    let k = k.min(n - k);
    (0..k)
        .map(|i| ((n - i) as f64).ln() - ((i + 1) as f64).ln())
        .sum()
}

/// Binomial probability `C(n,k) p^k (1-p)^(n-k)`, with `0^0 = 1`.
pub fn binomial_pmf(n: usize, k: usize, p: f64) -> f64 {
    if k > n {
        return 0.0;
    }
    let q = 1.0 - p;
    let pk = if k == 0 { 1.0 } else { p.powi(k as i32) };
    let qk = if n == k { 1.0 } else { q.powi((n - k) as i32) };
    if pk == 0.0 || qk == 0.0 {
        return 0.0;
    }
    ln_binomial(n, k).exp() * pk * qk
}
