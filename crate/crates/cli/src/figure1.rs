//! Ratios of extractable work to `nE_β` for qubits at a fixed `βE`.
//!
//! Three curves: the entangled state `|φ⟩` (all of `nE_β`), the classical
//! mixture `ρ_sep`, and the best state with `ρ_sep`'s entropy.

use corrwork_core::{
    bound_entropy_constrained, entangled_phi, ergotropy_in, mean_local_energy,
    thermal_superposition, w_sep_formula, Result, SystemSpec, ThermalParams,
};

use crate::csv::{Cell, Table};
use crate::svg::{Chart, Series};

/// `|φ⟩` is stored on its `d`-dimensional support, so the curve reaches
/// `n = 20` well past the default dimension cap.
pub const FIGURE1_DIM_CAP: usize = 1 << 20;

#[derive(Debug, Clone, PartialEq)]
pub struct Figure1Row {
    pub n: usize,
    pub w_phi_ratio: f64,
    pub w_sep_ratio: f64,
    pub w_entropy_ratio: f64,
}

pub fn figure1_row(beta_e: f64, n: usize, dim_cap: usize) -> Result<Figure1Row> {
    let spec = SystemSpec::qubits(n, 1.0, beta_e)?.with_dim_cap(dim_cap);
    let n_ebeta = n as f64 * mean_local_energy(&spec);
    let phi = if n == 1 {
        thermal_superposition(&spec)?
    } else {
        entangled_phi(&spec)?
    };
    let w_phi = ergotropy_in(&phi, &spec)?.ergotropy;
    let w_sep = w_sep_formula(&spec)?;
    // ρ_sep has the entropy of a single thermal qubit.
    let s_sep = ThermalParams::new(&spec, beta_e)?.entropy();
    let w_entropy = bound_entropy_constrained(&spec, s_sep)?;
    Ok(Figure1Row {
        n,
        w_phi_ratio: w_phi / n_ebeta,
        w_sep_ratio: w_sep / n_ebeta,
        w_entropy_ratio: w_entropy / n_ebeta,
    })
}

pub fn figure1(beta_e: f64, n_max: usize, dim_cap: usize) -> Result<Vec<Figure1Row>> {
    (1..=n_max)
        .map(|n| figure1_row(beta_e, n, dim_cap))
        .collect()
}

pub fn to_table(beta_e: f64, rows: &[Figure1Row]) -> Table {
    let mut t = Table::new(&["n", "w_phi_ratio", "w_sep_ratio", "w_entropy_ratio"]);
    t.comments
        .push(format!("work / (n E_beta) for qubits at beta*E = {beta_e}"));
    for r in rows {
        t.push(vec![
            Cell::Int(r.n as i64),
            Cell::num(r.w_phi_ratio),
            Cell::num(r.w_sep_ratio),
            Cell::num(r.w_entropy_ratio),
        ]);
    }
    t
}

pub fn to_chart(beta_e: f64, rows: &[Figure1Row]) -> Chart {
    let series = |label: &str, f: fn(&Figure1Row) -> f64| Series {
        label: label.into(),
        points: rows.iter().map(|r| (r.n as f64, f(r))).collect(),
    };
    Chart {
        title: format!("Extractable work per nE_β, βE = {beta_e}"),
        x_label: "n".into(),
        y_label: "W / nE_β".into(),
        series: vec![
            series("entangled", |r| r.w_phi_ratio),
            series("classical", |r| r.w_sep_ratio),
            series("entropy bound", |r| r.w_entropy_ratio),
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_points() {
        let rows = figure1(1.0, 4, FIGURE1_DIM_CAP).unwrap();
        assert!((rows[3].w_sep_ratio - 0.75).abs() < 1e-12);
        assert!((rows[1].w_entropy_ratio - 0.683).abs() < 3e-3);
        assert!(rows.iter().all(|r| (r.w_phi_ratio - 1.0).abs() < 1e-10));
        assert!(rows[0].w_sep_ratio.abs() < 1e-15);
        for r in &rows {
            assert!(r.w_sep_ratio <= r.w_entropy_ratio + 1e-9);
            assert!(r.w_entropy_ratio <= r.w_phi_ratio + 1e-9);
        }
    }
}
