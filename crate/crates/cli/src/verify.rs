//! Desk-scale verification suites over the whole library.

use std::f64::consts::PI;
use std::fmt::Write;
use std::time::{Duration, Instant};

use corrwork_core::analysis::NPT_TOL;
use corrwork_core::protocols::marginal_bias_spread;
use corrwork_core::sampling::{equal_energy_pair, random_density_matrix, random_unitary};
use corrwork_core::system::binomial;
use corrwork_core::{
    apply_unitary, bath_extractable_work, beta_for_entropy, bias_after_inversion,
    bound_entropy_constrained, build_hamiltonian, count_global_energies, detect_entanglement,
    entangled_phi, ergotropy, ergotropy_in, free_energy, half_split_witness,
    inversion_sequence_to_bias, inversion_v, marginals, max_entry_distance, mean_local_energy,
    omega_state, partial_trace_to, prepare_locally_thermal, product_thermal, qubit_bias, rho_deg,
    rho_sep, separable_mixture, thermal_state, u_alpha, von_neumann_entropy, w_deg_correction,
    w_deg_qubit_formula, w_sep_formula, Bipartition, DensityMatrix, SystemSpec, ThermalParams,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::args::Suite;
use crate::csv::{Cell, Table};
use crate::figure1::{figure1, FIGURE1_DIM_CAP};

type Outcome = Result<String, String>;
type Check = fn(&Context) -> Outcome;

pub struct Context {
    pub seed: u64,
}

impl Context {
    /// Independent stream per check so results do not depend on run order.
    fn rng(&self, salt: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15))
    }
}

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub suite: &'static str,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

#[derive(Debug, Clone)]
pub struct Report {
    pub seed: u64,
    pub results: Vec<CheckResult>,
}

impl Report {
    pub fn failures(&self) -> usize {
        self.results.iter().filter(|r| !r.passed).count()
    }

    pub fn render(&self) -> String {
        let mut out = format!("seed = {}\n", self.seed);
        for r in &self.results {
            let _ = writeln!(
                out,
                "{} {}/{} ({:.1} ms): {}",
                if r.passed { "PASS" } else { "FAIL" },
                r.suite,
                r.name,
                r.elapsed.as_secs_f64() * 1e3,
                r.detail
            );
        }
        let _ = writeln!(
            out,
            "{} of {} checks passed",
            self.results.len() - self.failures(),
            self.results.len()
        );
        out
    }

    pub fn to_table(&self) -> Table {
        let mut t = Table::new(&["suite", "check", "status", "millis", "detail"]);
        t.comments.push(format!("seed = {}", self.seed));
        for r in &self.results {
            t.push(vec![
                Cell::text(r.suite),
                Cell::text(r.name),
                Cell::text(if r.passed { "pass" } else { "fail" }),
                Cell::num(r.elapsed.as_secs_f64() * 1e3),
                Cell::text(r.detail.replace(',', ";")),
            ]);
        }
        t
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn core<T>(r: corrwork_core::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn qubits(n: usize, beta: f64) -> Result<SystemSpec, String> {
    core(SystemSpec::qubits(n, 1.0, beta))
}

fn locally_thermal_defect(rho: &DensityMatrix, spec: &SystemSpec) -> Result<f64, String> {
    let tau = core(thermal_state(spec, spec.beta()))?;
    let mut worst: f64 = 0.0;
    for m in core(marginals(rho, spec))? {
        worst = worst.max(core(max_entry_distance(&m, &tau))?);
    }
    Ok(worst)
}

fn suite_checks(suite: Suite) -> Vec<(&'static str, &'static str, Check)> {
    let passivity: Vec<(&str, &str, Check)> = vec![
        ("passivity", "permutation-oracle", check_permutation_oracle),
        (
            "passivity",
            "passive-energy-unitary-invariance",
            check_unitary_invariance,
        ),
        ("passivity", "convexity-equal-energy", check_convexity),
        ("passivity", "w-sep-closed-form", check_w_sep),
        ("passivity", "n-ebeta-bound", check_n_ebeta_bound),
        ("passivity", "separable-mixtures", check_separable_mixtures),
        ("passivity", "entropy-inversion", check_entropy_inversion),
    ];
    let protocols: Vec<(&str, &str, Check)> = vec![
        ("protocols", "bias-law-grid", check_bias_law),
        ("protocols", "entropy-bound-saturation", check_saturation),
        ("protocols", "inversion-formula", check_inversion_formula),
        ("protocols", "inversion-sequence", check_inversion_sequence),
    ];
    let entanglement: Vec<(&str, &str, Check)> = vec![
        ("entanglement", "bell-partial-transpose", check_bell_pt),
        (
            "entanglement",
            "half-split-witness-value",
            check_witness_value,
        ),
        (
            "entanglement",
            "half-split-witness-sign",
            check_witness_sign,
        ),
        (
            "entanglement",
            "separable-mixtures-ppt",
            check_separable_ppt,
        ),
    ];
    let bounds: Vec<(&str, &str, Check)> = vec![
        ("bounds", "phi-full-extraction", check_phi),
        ("bounds", "figure1-curves", check_figure1),
        ("bounds", "dicke-mixture-formula", check_w_deg),
        ("bounds", "global-energy-count", check_energy_count),
        ("bounds", "omega-construction", check_omega),
        ("bounds", "bath-free-energy-identity", check_bath_identity),
        (
            "bounds",
            "bath-dominates-entropy-bound",
            check_bath_dominance,
        ),
    ];
    match suite {
        Suite::All => [passivity, protocols, entanglement, bounds].concat(),
        Suite::Passivity => passivity,
        Suite::Protocols => protocols,
        Suite::Entanglement => entanglement,
        Suite::Bounds => bounds,
    }
}

pub fn check_names(suite: Suite) -> Vec<String> {
    suite_checks(suite)
        .iter()
        .map(|(s, n, _)| format!("{s}/{n}"))
        .collect()
}

pub fn run(suite: Suite, seed: u64) -> Report {
    let ctx = Context { seed };
    let results = suite_checks(suite)
        .into_iter()
        .map(|(suite, name, check)| {
            let start = Instant::now();
            let outcome = check(&ctx);
            let elapsed = start.elapsed();
            let (passed, detail) = match outcome {
                Ok(d) => (true, d),
                Err(d) => (false, d),
            };
            CheckResult {
                suite,
                name,
                passed,
                detail,
                elapsed,
            }
        })
        .collect();
    Report { seed, results }
}

fn permutations(items: &[f64]) -> Vec<Vec<f64>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

fn check_permutation_oracle(ctx: &Context) -> Outcome {
    let mut rng = ctx.rng(1);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let dim = rng.random_range(1..=8);
        let w: Vec<f64> = (0..dim).map(|_| rng.random::<f64>() + 1e-3).collect();
        let total: f64 = w.iter().sum();
        let p: Vec<f64> = w.iter().map(|x| x / total).collect();
        let h: Vec<f64> = (0..dim)
            .map(|_| (rng.random::<f64>() * 3.0 * 4.0).round() / 4.0)
            .collect();
        let dot = |q: &[f64]| q.iter().zip(&h).map(|(a, b)| a * b).sum::<f64>();
        let oracle = dot(&p)
            - permutations(&p)
                .iter()
                .map(|q| dot(q))
                .fold(f64::INFINITY, f64::min);
        let rho = core(DensityMatrix::from_diagonal(p))?;
        worst = worst.max((core(ergotropy(&rho, &h))?.ergotropy - oracle).abs());
    }
    ensure(worst < 1e-12, || format!("max deviation {worst:.3e}"))?;
    Ok(format!("100 diagonal states, max deviation {worst:.1e}"))
}

fn check_unitary_invariance(ctx: &Context) -> Outcome {
    let mut rng = ctx.rng(2);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let dim = rng.random_range(2..=16);
        let h: Vec<f64> = (0..dim).map(|i| i as f64 * 0.5).collect();
        let rho = random_density_matrix(dim, &mut rng);
        let rotated = core(apply_unitary(&rho, &random_unitary(dim, &mut rng)))?;
        let a = core(ergotropy(&rho, &h))?;
        let b = core(ergotropy(&rotated, &h))?;
        worst = worst.max((a.passive_energy - b.passive_energy).abs());
        worst =
            worst.max(((b.ergotropy - a.ergotropy) - (b.initial_energy - a.initial_energy)).abs());
    }
    ensure(worst < 1e-9, || format!("max deviation {worst:.3e}"))?;
    Ok(format!("100 random unitaries, max deviation {worst:.1e}"))
}

fn check_convexity(ctx: &Context) -> Outcome {
    let mut rng = ctx.rng(3);
    let specs = [
        qubits(1, 1.0)?,
        qubits(2, 1.0)?,
        qubits(3, 1.0)?,
        qubits(4, 1.0)?,
        core(SystemSpec::new(2, vec![0.0, 0.7, 1.9], 1.0))?,
    ];
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..500 {
        let spec = &specs[rng.random_range(0..specs.len())];
        let h = core(build_hamiltonian(spec))?;
        let (a, b) = core(equal_energy_pair(&h, &mut rng, 1000))?;
        let t: f64 = rng.random();
        let mixed = core(DensityMatrix::mix(t, &a, &b))?;
        let lhs = core(ergotropy(&mixed, &h))?.ergotropy;
        let rhs =
            t * core(ergotropy(&a, &h))?.ergotropy + (1.0 - t) * core(ergotropy(&b, &h))?.ergotropy;
        worst = worst.max(lhs - rhs);
    }
    ensure(worst <= 1e-9, || {
        format!("convexity violated by {worst:.3e}")
    })?;
    Ok(format!("500 equal-energy pairs, max excess {worst:.1e}"))
}

fn check_w_sep(_: &Context) -> Outcome {
    let mut worst: f64 = 0.0;
    for d in [2usize, 3] {
        for n in (d - 1).max(2)..=10 {
            let spec = core(SystemSpec::equally_spaced(n, d, 1.0, 1.0))?.with_dim_cap(1 << 16);
            let w = core(ergotropy_in(&core(rho_sep(&spec))?, &spec))?.ergotropy;
            worst = worst.max((w - core(w_sep_formula(&spec))?).abs());
        }
    }
    ensure(worst < 1e-10, || format!("max deviation {worst:.3e}"))?;
    Ok(format!("d in {{2, 3}}, n <= 10, max deviation {worst:.1e}"))
}

fn check_n_ebeta_bound(_: &Context) -> Outcome {
    let mut count = 0;
    for n in 2..=6 {
        let spec = qubits(n, 1.0)?;
        let bound = n as f64 * mean_local_energy(&spec);
        let z = core(ThermalParams::new(&spec, 1.0))?.bias();
        let mut states = vec![
            core(entangled_phi(&spec))?,
            core(rho_sep(&spec))?,
            core(rho_deg(&spec))?,
            core(separable_mixture(&spec, 0.5))?,
            core(prepare_locally_thermal(&spec, 2.0, z))?.state,
        ];
        if let Ok((omega, _)) = omega_state(&spec, 1.0) {
            states.push(omega);
        }
        for rho in states {
            let defect = locally_thermal_defect(&rho, &spec)?;
            ensure(defect < 1e-10, || {
                format!("n={n}: marginal defect {defect:.3e}")
            })?;
            let w = core(ergotropy_in(&rho, &spec))?.ergotropy;
            ensure(w <= bound + 1e-9, || {
                format!("n={n}: work {w} exceeds nE_beta {bound}")
            })?;
            count += 1;
        }
    }
    Ok(format!("{count} locally thermal states within nE_beta"))
}

fn check_separable_mixtures(ctx: &Context) -> Outcome {
    let mut rng = ctx.rng(6);
    let spec = qubits(5, 1.0)?;
    let w_sep = core(w_sep_formula(&spec))?;
    let s_tau = core(ThermalParams::new(&spec, 1.0))?.entropy();
    let mut min_entropy_gap = f64::INFINITY;
    for _ in 0..200 {
        let t: f64 = rng.random();
        let rho = core(separable_mixture(&spec, t))?;
        let report = core(ergotropy_in(&rho, &spec))?;
        ensure(report.ergotropy <= w_sep + 1e-9, || {
            format!("t={t}: work {} above W_sep {w_sep}", report.ergotropy)
        })?;
        ensure(report.entropy >= s_tau - 1e-12, || {
            format!("t={t}: entropy {} below S(tau)", report.entropy)
        })?;
        if t < 1.0 {
            ensure(report.ergotropy < w_sep, || {
                format!("t={t}: W_sep reached below t = 1")
            })?;
            ensure(report.entropy > s_tau + 1e-12, || {
                format!("t={t}: minimal entropy away from t = 1")
            })?;
        }
        min_entropy_gap = min_entropy_gap.min(report.entropy - s_tau);
    }
    Ok(format!(
        "200 mixtures, min entropy excess {min_entropy_gap:.3e}"
    ))
}

fn check_entropy_inversion(_: &Context) -> Outcome {
    let mut worst: f64 = 0.0;
    let specs = [
        qubits(1, 1.0)?,
        core(SystemSpec::new(1, vec![0.0, 1.0, 2.5], 1.0))?,
    ];
    for spec in &specs {
        for beta in [0.05, 0.3, 1.0, 2.0, 7.0] {
            let s = core(ThermalParams::new(spec, beta))?.entropy();
            let back = core(beta_for_entropy(spec, s))?;
            worst = worst.max((back.entropy() - s).abs());
        }
    }
    ensure(worst <= 1e-12, || format!("entropy residual {worst:.3e}"))?;
    Ok(format!("entropy residual {worst:.1e}"))
}

fn check_bias_law(_: &Context) -> Outcome {
    let mut worst: f64 = 0.0;
    for n in 2..=8 {
        let spec = qubits(n, 1.0)?;
        let z_prime = core(ThermalParams::new(&spec, 1.0))?.bias();
        let rho = core(product_thermal(&spec, 1.0))?;
        for k in 0..=4 {
            let alpha = k as f64 * PI / 8.0;
            let out = core(apply_unitary(&rho, &core(u_alpha(&spec, alpha))?))?;
            let z = core(qubit_bias(&core(partial_trace_to(&out, &spec, 1))?))?;
            worst = worst.max((z - (2.0 * alpha).cos() * z_prime).abs());
            worst = worst.max(core(marginal_bias_spread(&out, &spec))?);
        }
    }
    ensure(worst < 1e-12, || format!("max deviation {worst:.3e}"))?;
    Ok(format!("n = 2..8, 5 angles, max deviation {worst:.1e}"))
}

fn check_saturation(_: &Context) -> Outcome {
    let mut worst: f64 = 0.0;
    for n in 2..=8 {
        let spec = qubits(n, 1.0)?;
        for beta_prime in [1.0, 2.5] {
            let t = core(ThermalParams::new(&spec, beta_prime))?;
            for frac in [0.0, 0.4, 0.8] {
                let r = core(prepare_locally_thermal(&spec, beta_prime, frac * t.bias()))?;
                let local = core(spec.with_beta(r.beta_local))?;
                let w = core(ergotropy_in(&r.state, &local))?.ergotropy;
                let bound = core(bound_entropy_constrained(&local, n as f64 * t.entropy()))?;
                worst = worst.max((w - bound).abs());
            }
        }
    }
    ensure(worst < 1e-9, || format!("max deviation {worst:.3e}"))?;
    Ok(format!("n = 2..8, max |W - bound| {worst:.1e}"))
}

fn check_inversion_formula(_: &Context) -> Outcome {
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for n in 2..=12 {
        let spec = qubits(n, 1.0)?;
        for beta_prime in [0.4, 1.0, 2.0] {
            let p = core(ThermalParams::new(&spec, beta_prime))?.excited_population();
            let rho = core(product_thermal(&spec, beta_prime))?;
            for level in 0..n.div_ceil(2) {
                let out = core(apply_unitary(&rho, &core(inversion_v(&spec, level))?))?;
                let measured = core(qubit_bias(&core(partial_trace_to(&out, &spec, 1))?))?;
                worst = worst.max((measured - core(bias_after_inversion(&spec, p, level))?).abs());
                cases += 1;
            }
        }
    }
    ensure(worst < 1e-12, || format!("max deviation {worst:.3e}"))?;
    Ok(format!(
        "{cases} (n, level, beta') cases, max deviation {worst:.1e}"
    ))
}

fn check_inversion_sequence(_: &Context) -> Outcome {
    let mut residuals = Vec::new();
    for n in [8, 12] {
        let spec = qubits(n, 1.0)?;
        let z_prime = core(ThermalParams::new(&spec, 1.0))?.bias();
        let seq = core(inversion_sequence_to_bias(&spec, 1.0, 0.9 * z_prime))?;
        residuals.push(seq.residual);
    }
    ensure(residuals[1] < residuals[0], || {
        format!(
            "residual n=12 {:.3e} not below n=8 {:.3e}",
            residuals[1], residuals[0]
        )
    })?;
    Ok(format!(
        "residual n=8 {:.3e}, n=12 {:.3e}",
        residuals[0], residuals[1]
    ))
}

fn check_bell_pt(_: &Context) -> Outcome {
    let spec = qubits(2, 0.0)?;
    let v = core(detect_entanglement(
        &core(entangled_phi(&spec))?,
        &spec,
        &core(Bipartition::half(2))?,
        None,
    ))?;
    ensure((v.min_pt_eigenvalue + 0.5).abs() < 1e-12, || {
        format!("min eigenvalue {}", v.min_pt_eigenvalue)
    })?;
    Ok(format!("min eigenvalue {:.12}", v.min_pt_eigenvalue))
}

fn check_witness_value(_: &Context) -> Outcome {
    let spec = qubits(2, 1.0)?;
    let lhs = core(half_split_witness(&spec, 1.0, PI / 4.0))?;
    ensure((lhs - 0.128906).abs() < 1e-6, || format!("value {lhs}"))?;
    let rho = core(apply_unitary(
        &core(product_thermal(&spec, 1.0))?,
        &core(u_alpha(&spec, PI / 4.0))?,
    ))?;
    let v = core(detect_entanglement(
        &rho,
        &spec,
        &core(Bipartition::half(2))?,
        Some(lhs),
    ))?;
    ensure(v.min_pt_eigenvalue < -NPT_TOL, || {
        format!("not NPT: {}", v.min_pt_eigenvalue)
    })?;
    Ok(format!(
        "lhs {lhs:.6}, min PT eigenvalue {:.6}",
        v.min_pt_eigenvalue
    ))
}

fn check_witness_sign(_: &Context) -> Outcome {
    let mut certified = 0;
    let mut total = 0;
    for n in [2, 4, 6] {
        let spec = qubits(n, 1.0)?;
        let part = core(Bipartition::half(n))?;
        for beta_e in [0.5, 1.0, 2.0] {
            let rho = core(product_thermal(&spec, beta_e))?;
            for k in 0..=8 {
                let alpha = k as f64 * PI / 16.0;
                let lhs = core(half_split_witness(&spec, beta_e, alpha))?;
                let out = core(apply_unitary(&rho, &core(u_alpha(&spec, alpha))?))?;
                let v = core(detect_entanglement(&out, &spec, &part, Some(lhs)))?;
                total += 1;
                if lhs > 1e-9 {
                    certified += 1;
                    ensure(v.min_pt_eigenvalue < -NPT_TOL, || {
                        format!("n={n} beta'E={beta_e} alpha={alpha}: lhs {lhs} but min PT eigenvalue {}", v.min_pt_eigenvalue)
                    })?;
                }
            }
        }
    }
    Ok(format!(
        "{certified} of {total} grid points certified, all NPT"
    ))
}

fn all_bipartitions(n: usize) -> Result<Vec<Bipartition>, String> {
    (0..(1u32 << (n - 1)) - 1)
        .map(|mask| {
            let side: Vec<usize> = std::iter::once(1)
                .chain((2..=n).filter(|k| mask >> (k - 2) & 1 == 1))
                .collect();
            core(Bipartition::new(n, side))
        })
        .collect()
}

fn check_separable_ppt(_: &Context) -> Outcome {
    let mut worst = f64::INFINITY;
    for n in 2..=6 {
        let spec = qubits(n, 1.0)?;
        for t in [0.0, 0.5, 1.0] {
            let rho = core(separable_mixture(&spec, t))?;
            for part in all_bipartitions(n)? {
                worst = worst
                    .min(core(detect_entanglement(&rho, &spec, &part, None))?.min_pt_eigenvalue);
            }
        }
    }
    ensure(worst >= -NPT_TOL, || {
        format!("min PT eigenvalue {worst:.3e}")
    })?;
    Ok(format!(
        "n <= 6, every bipartition, min PT eigenvalue {worst:.1e}"
    ))
}

fn check_phi(_: &Context) -> Outcome {
    let mut worst: f64 = 0.0;
    for beta in [0.5, 1.0, 2.0] {
        for n in 2..=10 {
            let spec = qubits(n, beta)?;
            let phi = core(entangled_phi(&spec))?;
            let defect = locally_thermal_defect(&phi, &spec)?;
            ensure(defect < 1e-10, || {
                format!("n={n}: marginal defect {defect:.3e}")
            })?;
            let report = core(ergotropy_in(&phi, &spec))?;
            worst = worst.max((report.ergotropy - report.bound_n_ebeta).abs());
        }
    }
    ensure(worst < 1e-9, || format!("max deviation {worst:.3e}"))?;
    Ok(format!("n <= 10, max |W - nE_beta| {worst:.1e}"))
}

fn check_figure1(_: &Context) -> Outcome {
    let rows = core(figure1(1.0, 20, FIGURE1_DIM_CAP))?;
    for (i, r) in rows.iter().enumerate() {
        let n = r.n as f64;
        ensure((r.w_phi_ratio - 1.0).abs() < 1e-10, || {
            format!("n={}: entangled ratio {}", r.n, r.w_phi_ratio)
        })?;
        ensure((r.w_sep_ratio - (1.0 - 1.0 / n)).abs() < 1e-10, || {
            format!("n={}: classical ratio {}", r.n, r.w_sep_ratio)
        })?;
        ensure(
            r.w_sep_ratio <= r.w_entropy_ratio + 1e-9 && r.w_entropy_ratio <= r.w_phi_ratio + 1e-9,
            || format!("n={}: curves out of order", r.n),
        )?;
        if i > 0 {
            let prev = &rows[i - 1];
            ensure(
                r.w_sep_ratio > prev.w_sep_ratio && r.w_entropy_ratio > prev.w_entropy_ratio,
                || format!("n={}: curves not increasing", r.n),
            )?;
        }
    }
    Ok(format!(
        "n = 1..20, entropy-bound ratio at n=20 {:.6}",
        rows[19].w_entropy_ratio
    ))
}

fn check_w_deg(_: &Context) -> Outcome {
    let mut worst: f64 = 0.0;
    for n in 1..=12 {
        let spec = qubits(n, 1.0)?;
        let w = core(ergotropy_in(&core(rho_deg(&spec))?, &spec))?.ergotropy;
        worst = worst.max((w - core(w_deg_qubit_formula(&spec))?).abs());
    }
    ensure(worst < 1e-10, || format!("max deviation {worst:.3e}"))?;
    let mut last = 0.0;
    for n in 1..=14 {
        let c = core(w_deg_correction(&qubits(n, 1.0)?))?;
        ensure(c < 1.0 && c >= last, || {
            format!("n={n}: correction {c} after {last}")
        })?;
        last = c;
    }
    Ok(format!(
        "n <= 12, max deviation {worst:.1e}; correction at n=14 {last:.4}"
    ))
}

fn check_energy_count(_: &Context) -> Outcome {
    // Incommensurate ladder: distinct sums are distinct occupation vectors.
    let generic = [0.0, 1.0, std::f64::consts::SQRT_2, PI];
    for d in 1usize..=4 {
        for n in 1..=6 {
            let mut energies: Vec<f64> = (0..d.pow(n as u32))
                .map(|mut i| {
                    let mut e = 0.0;
                    for _ in 0..n {
                        e += generic[i % d];
                        i /= d;
                    }
                    e
                })
                .collect();
            energies.sort_by(f64::total_cmp);
            energies.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
            let expected = core(count_global_energies(n, d))?;
            ensure(energies.len() as u128 == expected, || {
                format!("n={n} d={d}: {} levels, formula {expected}", energies.len())
            })?;
        }
    }
    Ok("n <= 6, d <= 4 match exhaustive enumeration".into())
}

fn check_omega(_: &Context) -> Outcome {
    let mut cases = 0;
    for n in [6, 8, 10] {
        let spec = qubits(n, 1.0)?;
        let bound = n as f64 * mean_local_energy(&spec);
        for s in [0.8, 1.2, 1.6] {
            let (rho, params) = core(omega_state(&spec, s))?;
            let defect = locally_thermal_defect(&rho, &spec)?;
            ensure(defect < 1e-10, || {
                format!("n={n} S={s}: marginal defect {defect:.3e}")
            })?;
            let report = core(ergotropy_in(&rho, &spec))?;
            ensure((report.entropy - s).abs() < 1e-8, || {
                format!("n={n} S={s}: entropy {}", report.entropy)
            })?;
            let rank = core(rho.spectrum())?.rank(1e-14) as u128;
            let cap = 2 + binomial(n as u64, params.d as u64).unwrap_or(u128::MAX - 2);
            ensure(rank <= cap, || {
                format!("n={n} S={s}: rank {rank} above {cap}")
            })?;
            ensure(report.ergotropy > bound - (params.d as f64 + 1.0), || {
                format!("n={n} S={s}: work {}", report.ergotropy)
            })?;
            cases += 1;
        }
    }
    Ok(format!("{cases} (n, S) cases"))
}

fn check_bath_identity(_: &Context) -> Outcome {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for n in [2, 3, 4, 6] {
        let spec = qubits(n, 1.0)?;
        let h = core(build_hamiltonian(&spec))?;
        let f_thermal = core(free_energy(&core(product_thermal(&spec, 1.0))?, &h, 1.0))?;
        let z = core(ThermalParams::new(&spec, 1.0))?.bias();
        let mut states = vec![
            core(entangled_phi(&spec))?,
            core(rho_sep(&spec))?,
            core(rho_deg(&spec))?,
            core(separable_mixture(&spec, 0.3))?,
            core(prepare_locally_thermal(&spec, 2.5, z))?.state,
        ];
        if let Ok((omega, _)) = omega_state(&spec, 1.2) {
            states.push(omega);
        }
        for rho in states {
            let s = core(von_neumann_entropy(&rho))?;
            let gap = core(free_energy(&rho, &h, 1.0))? - f_thermal;
            worst = worst.max((core(bath_extractable_work(&spec, s))? - gap).abs());
            count += 1;
        }
    }
    ensure(worst < 1e-9, || format!("max deviation {worst:.3e}"))?;
    Ok(format!("{count} states, max deviation {worst:.1e}"))
}

fn check_bath_dominance(_: &Context) -> Outcome {
    let spec = qubits(4, 1.0)?;
    let s_max = 4.0 * core(ThermalParams::new(&spec, 1.0))?.entropy();
    let mut min_gap = f64::INFINITY;
    for k in 0..=10 {
        let s = s_max * k as f64 / 10.0;
        let gap =
            core(bath_extractable_work(&spec, s))? - core(bound_entropy_constrained(&spec, s))?;
        if k < 10 {
            ensure(gap > 0.0, || {
                format!("S={s}: bath bound not above the closed-system bound")
            })?;
            min_gap = min_gap.min(gap);
        } else {
            ensure(gap.abs() < 1e-9, || {
                format!("S={s}: bounds differ at the thermal entropy")
            })?;
        }
    }
    Ok(format!("11-point grid, min gap below S_max {min_gap:.3e}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_partition_all() {
        let all = check_names(Suite::All);
        let parts: usize = [
            Suite::Passivity,
            Suite::Protocols,
            Suite::Entanglement,
            Suite::Bounds,
        ]
        .iter()
        .map(|&s| check_names(s).len())
        .sum();
        assert_eq!(all.len(), parts);
        assert!(check_names(Suite::Protocols).contains(&"protocols/bias-law-grid".to_string()));
        assert!(
            check_names(Suite::Bounds).contains(&"bounds/bath-dominates-entropy-bound".to_string())
        );
    }

    #[test]
    fn protocols_suite_passes() {
        let report = run(Suite::Protocols, 1);
        assert_eq!(report.failures(), 0, "{}", report.render());
        assert!(report.render().starts_with("seed = 1\n"));
    }
}
