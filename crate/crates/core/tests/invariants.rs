//! Cross-module invariants of the state families, protocols and bounds.

use std::f64::consts::PI;

use corrwork_core::analysis::NPT_TOL;
use corrwork_core::protocols::marginal_bias_spread;
use corrwork_core::system::binomial;
use corrwork_core::{
    apply_unitary, bath_extractable_work, bound_entropy_constrained, build_hamiltonian,
    detect_entanglement, entangled_phi, ergotropy_in, free_energy, half_split_witness, marginals,
    max_entry_distance, mean_local_energy, omega_state, partial_trace_to, prepare_locally_thermal,
    product_thermal, qubit_bias, rho_deg, rho_sep, separable_mixture, thermal_state, u_alpha,
    von_neumann_entropy, w_deg_correction, w_deg_qubit_formula, w_sep_formula, Bipartition,
    DensityMatrix, SystemSpec, ThermalParams, Verdict,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn qubits(n: usize, beta: f64) -> SystemSpec {
    SystemSpec::qubits(n, 1.0, beta).unwrap()
}

fn assert_locally_thermal(rho: &DensityMatrix, spec: &SystemSpec) {
    let tau = thermal_state(spec, spec.beta()).unwrap();
    for m in marginals(rho, spec).unwrap() {
        assert!(max_entry_distance(&m, &tau).unwrap() < 1e-10);
    }
}

fn n_ebeta(spec: &SystemSpec) -> f64 {
    spec.n() as f64 * mean_local_energy(spec)
}

#[test]
fn phi_is_pure_and_fully_extractable() {
    for beta in [0.5, 1.0, 2.0] {
        for n in 2..=10 {
            let spec = qubits(n, beta);
            let phi = entangled_phi(&spec).unwrap();
            assert_locally_thermal(&phi, &spec);
            let report = ergotropy_in(&phi, &spec).unwrap();
            assert!(report.entropy < 1e-10);
            assert!(
                (report.ergotropy - n_ebeta(&spec)).abs() < 1e-9,
                "n={n} beta={beta}"
            );
        }
    }
}

#[test]
fn classical_correlations_store_less_than_entanglement() {
    for beta in [0.3, 1.0, 3.0] {
        for n in 2..=10 {
            let spec = qubits(n, beta);
            let sep = ergotropy_in(&rho_sep(&spec).unwrap(), &spec)
                .unwrap()
                .ergotropy;
            let phi = ergotropy_in(&entangled_phi(&spec).unwrap(), &spec)
                .unwrap()
                .ergotropy;
            assert!(sep < phi, "n={n} beta={beta}");
        }
    }
}

#[test]
fn rho_sep_work_matches_closed_form() {
    for d in [2usize, 3] {
        for n in (d - 1).max(2)..=10 {
            let spec = SystemSpec::equally_spaced(n, d, 1.0, 1.0)
                .unwrap()
                .with_dim_cap(1 << 16);
            let rho = rho_sep(&spec).unwrap();
            assert_locally_thermal(&rho, &spec);
            let w = ergotropy_in(&rho, &spec).unwrap().ergotropy;
            assert!(
                (w - w_sep_formula(&spec).unwrap()).abs() < 1e-10,
                "d={d} n={n}"
            );
        }
    }
}

#[test]
fn locally_thermal_states_respect_n_ebeta() {
    let spec = qubits(6, 1.0);
    let bound = n_ebeta(&spec);
    let s_tau = ThermalParams::new(&spec, 1.0).unwrap().entropy();
    let mut states = vec![
        entangled_phi(&spec).unwrap(),
        rho_sep(&spec).unwrap(),
        rho_deg(&spec).unwrap(),
        product_thermal(&spec, 1.0).unwrap(),
        omega_state(&spec, 1.5).unwrap().0,
    ];
    let beta_prime = 2.0;
    let z = ThermalParams::new(&spec, 1.0).unwrap().bias();
    states.push(prepare_locally_thermal(&spec, beta_prime, z).unwrap().state);
    for (i, rho) in states.iter().enumerate() {
        assert_locally_thermal(rho, &spec);
        let report = ergotropy_in(rho, &spec).unwrap();
        assert!(report.ergotropy <= bound + 1e-9);
        // Diagonal states are separable, so their entropy is at least S(τ_β).
        if rho.max_off_diagonal() == 0.0 {
            assert!(report.entropy >= s_tau - 1e-12, "state {i}");
        }
    }
}

#[test]
fn rho_deg_matches_formula_and_correction_grows() {
    for n in 1..=12 {
        let spec = qubits(n, 1.0);
        let rho = rho_deg(&spec).unwrap();
        assert_locally_thermal(&rho, &spec);
        let w = ergotropy_in(&rho, &spec).unwrap().ergotropy;
        assert!(
            (w - w_deg_qubit_formula(&spec).unwrap()).abs() < 1e-10,
            "n={n}"
        );
    }
    let mut last = 0.0;
    for n in 1..=14 {
        let c = w_deg_correction(&qubits(n, 1.0)).unwrap();
        assert!(c < 1.0);
        assert!(c >= last, "n={n}");
        last = c;
    }
}

#[test]
fn omega_family_beats_rank_bound() {
    let spec_tau = ThermalParams::new(&qubits(2, 1.0), 1.0).unwrap().entropy();
    for n in [6, 8, 10] {
        let spec = qubits(n, 1.0);
        for s in [0.8, 1.2, 1.6] {
            let (rho, params) = omega_state(&spec, s).unwrap();
            assert!(s > spec_tau);
            assert_locally_thermal(&rho, &spec);
            let report = ergotropy_in(&rho, &spec).unwrap();
            assert!((report.entropy - s).abs() < 1e-8);
            let rank = rho.spectrum().unwrap().rank(1e-14);
            let cap = 2 + binomial(n as u64, params.d as u64).unwrap() as usize;
            assert!(rank <= cap);
            assert!(
                report.ergotropy > n_ebeta(&spec) - (params.d as f64 + 1.0),
                "n={n} S={s}"
            );
        }
    }
}

#[test]
fn separable_mixtures_stay_below_w_sep() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let s_tau = ThermalParams::new(&qubits(2, 1.0), 1.0).unwrap().entropy();
    let spec = qubits(5, 1.0);
    let w_sep = w_sep_formula(&spec).unwrap();
    for _ in 0..200 {
        let t: f64 = rng.random();
        let rho = separable_mixture(&spec, t).unwrap();
        assert_locally_thermal(&rho, &spec);
        let report = ergotropy_in(&rho, &spec).unwrap();
        assert!(report.ergotropy <= w_sep + 1e-9);
        if t < 1.0 {
            assert!(report.ergotropy < w_sep);
            assert!(report.entropy > s_tau + 1e-12);
        }
    }
    let at_one = ergotropy_in(&separable_mixture(&spec, 1.0).unwrap(), &spec).unwrap();
    assert!((at_one.ergotropy - w_sep).abs() < 1e-10);
}

fn all_bipartitions(n: usize) -> Vec<Bipartition> {
    // Subsets containing subsystem 1, excluding the full set.
    (0..(1u32 << (n - 1)) - 1)
        .map(|mask| {
            let side: Vec<usize> = std::iter::once(1)
                .chain((2..=n).filter(|k| mask >> (k - 2) & 1 == 1))
                .collect();
            Bipartition::new(n, side).unwrap()
        })
        .collect()
}

#[test]
fn separable_mixtures_are_ppt() {
    for n in 2..=6 {
        let spec = qubits(n, 1.0);
        for t in [0.0, 0.4, 1.0] {
            let rho = separable_mixture(&spec, t).unwrap();
            for part in all_bipartitions(n) {
                let v = detect_entanglement(&rho, &spec, &part, None).unwrap();
                assert_eq!(v.verdict, Verdict::PptUndecided);
            }
        }
    }
}

#[test]
fn u_alpha_bias_law() {
    for n in 2..=8 {
        let spec = qubits(n, 1.0);
        let t = ThermalParams::new(&spec, 1.3).unwrap();
        let rho = product_thermal(&spec, 1.3).unwrap();
        for k in 0..=4 {
            let alpha = k as f64 * PI / 8.0;
            let out = apply_unitary(&rho, &u_alpha(&spec, alpha).unwrap()).unwrap();
            let bias = qubit_bias(&partial_trace_to(&out, &spec, 1).unwrap()).unwrap();
            assert!(
                (bias - (2.0 * alpha).cos() * t.bias()).abs() < 1e-12,
                "n={n} k={k}"
            );
            assert!(marginal_bias_spread(&out, &spec).unwrap() < 1e-12);
            let first = partial_trace_to(&out, &spec, 1).unwrap();
            for m in marginals(&out, &spec).unwrap() {
                assert!(max_entry_distance(&m, &first).unwrap() < 1e-12);
            }
        }
    }
}

#[test]
fn preparation_saturates_entropy_bound() {
    for n in 2..=8 {
        let spec = qubits(n, 1.0);
        let t = ThermalParams::new(&spec, 1.6).unwrap();
        let r = prepare_locally_thermal(&spec, 1.6, 0.5 * t.bias()).unwrap();
        assert!((von_neumann_entropy(&r.state).unwrap() - n as f64 * t.entropy()).abs() < 1e-9);
        let local = spec.with_beta(r.beta_local).unwrap();
        let w = ergotropy_in(&r.state, &local).unwrap().ergotropy;
        assert!(
            (w - bound_entropy_constrained(&local, n as f64 * t.entropy()).unwrap()).abs() < 1e-9
        );
    }
}

#[test]
fn witness_positive_implies_npt() {
    for n in [2, 4, 6] {
        for beta_e in [0.5, 1.0, 2.0] {
            let spec = qubits(n, 1.0);
            let rho = product_thermal(&spec, beta_e).unwrap();
            let part = Bipartition::half(n).unwrap();
            for k in 0..=8 {
                let alpha = k as f64 * PI / 16.0;
                let lhs = half_split_witness(&spec, beta_e, alpha).unwrap();
                let out = apply_unitary(&rho, &u_alpha(&spec, alpha).unwrap()).unwrap();
                let v = detect_entanglement(&out, &spec, &part, Some(lhs)).unwrap();
                if lhs > 1e-9 {
                    assert!(
                        v.min_pt_eigenvalue < -NPT_TOL,
                        "n={n} beta_e={beta_e} k={k}"
                    );
                }
            }
        }
    }
}

#[test]
fn bath_work_is_free_energy_gap() {
    let spec = qubits(4, 1.0);
    let h = build_hamiltonian(&spec).unwrap();
    let f_thermal = free_energy(&product_thermal(&spec, 1.0).unwrap(), &h, 1.0).unwrap();
    let z = ThermalParams::new(&spec, 1.0).unwrap().bias();
    let states = vec![
        entangled_phi(&spec).unwrap(),
        rho_sep(&spec).unwrap(),
        rho_deg(&spec).unwrap(),
        separable_mixture(&spec, 0.3).unwrap(),
        omega_state(&spec, 1.2).unwrap().0,
        prepare_locally_thermal(&spec, 2.5, z).unwrap().state,
    ];
    for rho in states {
        assert_locally_thermal(&rho, &spec);
        let s = von_neumann_entropy(&rho).unwrap();
        let gap = free_energy(&rho, &h, 1.0).unwrap() - f_thermal;
        assert!((bath_extractable_work(&spec, s).unwrap() - gap).abs() < 1e-9);
    }
}

#[test]
fn bath_work_dominates_entropy_bound() {
    let spec = qubits(4, 1.0);
    let s_max = 4.0 * ThermalParams::new(&spec, 1.0).unwrap().entropy();
    for k in 0..=10 {
        let s = s_max * k as f64 / 10.0;
        let bath = bath_extractable_work(&spec, s).unwrap();
        let closed = bound_entropy_constrained(&spec, s).unwrap();
        if k == 0 || k == 10 {
            assert!(bath >= closed - 1e-12);
        } else {
            assert!(bath > closed, "k={k}: {bath} vs {closed}");
        }
    }
}
