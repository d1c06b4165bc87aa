//! Simulator and closed-form calculator for conditional coherence synthesis.
//!
//! `N` two-level systems (TLS) prepared in weakly excited product states are
//! measured pairwise with projectors that remove the two-TLS ground state
//! `|g_j g_k⟩`. On success the joint state gains energy and relative entropy
//! of coherence. The crate provides:
//!
//! * [`linalg`]: dense complex matrices, partial trace, von Neumann entropy;
//! * [`states`]: Hamiltonians and pure or dephased product input states;
//! * [`measures`]: energy, coherence, local and mutual coherence, gain reports;
//! * [`protocol`]: measurement plans, post-selection, repeat-until-success;
//! * [`dephasing`]: local dephasing channels and their Kraus-sum oracle;
//! * [`robustness`]: runs with randomly scattered excitation probabilities;
//! * [`closedform`]: exact combinatorial sums and small-`p` approximations;
//! * [`validation`]: the acceptance checks shared by tests and the CLI.
//!
//! Basis convention: index bit `N - j` (most significant first) holds TLS `j`,
//! with `0 = |g⟩` and `1 = |e⟩`. Entropies are in nats.

pub mod closedform;
pub mod dephasing;
mod error;
pub mod linalg;
pub mod measures;
pub mod protocol;
pub mod robustness;
pub mod states;
pub mod validation;

pub use error::{Error, Result};

pub use closedform::{
    approx_dc, approx_dcm, approx_de, approx_ps, cf_exact, count_no_adjacent_ground, ef_exact,
    global_approx, optimal_comparison, ps_exact, GlobalApprox, OptimalComparison,
};
pub use dephasing::{dephase_local, kraus_oracle, DephasingSpec};
pub use linalg::{dephase_full, kron, partial_trace, von_neumann_entropy, CMatrix, CVector, C64};
pub use measures::{
    average_energy, gain_report, local_coherence, mutual_coherence, rel_entropy_coherence,
    GainReport,
};
pub use protocol::{
    apply_protocol, run_experiment, rus_failure_probability, success_mask, MeasurementPlan,
    PlanKind, ProtocolOutcome, RusPlan,
};
pub use states::{
    hamiltonian, initial_coherence, initial_energy, mixed_product_state, pure_product_state,
    QuantumState, SystemSpec, TlsParams,
};
