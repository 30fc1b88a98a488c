//! Extractable work from correlated, locally thermal quantum states.
//!
//! States live on `n` subsystems of dimension `d` with a local ladder
//! `0 = E_0 ≤ E_1 ≤ …`. The crate builds the state families of interest,
//! computes their ergotropy exactly from the passive state, realizes the
//! storage protocols as sparse rotations and evaluates the closed-form
//! bounds they are compared against.
//!
//! ```
//! use corrwork_core::{entangled_phi, ergotropy_in, SystemSpec};
//!
//! let spec = SystemSpec::qubits(3, 1.0, 1.0).unwrap();
//! let report = ergotropy_in(&entangled_phi(&spec).unwrap(), &spec).unwrap();
//! assert!((report.ergotropy - report.bound_n_ebeta).abs() < 1e-9);
//! ```

pub mod analysis;
pub mod error;
pub mod families;
pub mod linalg;
pub mod passivity;
pub mod protocols;
pub mod sampling;
pub mod state;
pub mod system;
pub mod unitary;

pub use analysis::{
    bath_extractable_work, count_global_energies, detect_entanglement, free_energy,
    half_split_witness, mutual_information_multipartite, partial_transpose, w_deg_correction,
    w_deg_qubit_formula, Bipartition, EntanglementVerdict, Verdict,
};
pub use error::{Error, Result};
pub use families::{
    choose_d, entangled_phi, omega_state, product_thermal, rho_deg, rho_sep, separable_mixture,
    thermal_superposition, DickeIndexSet, OmegaParams,
};
pub use linalg::{hermitian_eigen, hermitian_eigenvalues, Spectrum, TieBreak};
pub use passivity::{
    beta_for_entropy, bound_entropy_constrained, ergotropy, ergotropy_in, is_passive,
    mean_local_energy, passive_energy, passive_state, thermal_state, w_sep_formula, ThermalParams,
    WorkReport,
};
pub use protocols::{
    beta_from_bias, bias_after_inversion, inversion_sequence_to_bias, inversion_v,
    prepare_locally_thermal, u_alpha, InversionSequence, ProtocolResult,
};
pub use state::{
    eigendecompose_hermitian, marginals, max_entry_distance, partial_trace_to, qubit_bias,
    von_neumann_entropy, DensityMatrix, Representation,
};
pub use system::{build_hamiltonian, BasisIndex, SystemSpec, DEFAULT_DIM_CAP};
pub use unitary::{apply_unitary, Rotation, StructuredUnitary, UnitaryAction};

pub use nalgebra::DMatrix;
pub use num_complex::Complex64;
