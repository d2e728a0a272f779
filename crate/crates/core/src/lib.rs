//! Error-probability bounds for quantum and classical target ranging.
//!
//! The crate covers Gaussian-state fidelities with an independent Fock-space
//! cross-check, Chernoff-type bounds for channel-position finding, a Monte
//! Carlo model of the conditional-nulling receiver, range-bin bookkeeping,
//! parameter sweeps, and the `qtr` command-line front end.

pub mod bounds;
pub mod cli;
pub mod cn_sim;
pub mod error;
pub mod fock;
pub mod gaussian;
pub mod grid;
pub mod scenario;

pub use bounds::{
    advantage_condition, advantage_region_search, classical_cpf_lower_bound, classical_ctr_lower_bound,
    classical_qtr_lower_bound_per_bin, cn_error_probability, qtr_cn_asymptotic, qtr_quantum_ub_asymptotic,
    quantum_cpf_upper_bound_exact, AdvantageGrid, BoundsReport, CNParams, ScenarioParams,
};
pub use cn_sim::{simulate_cn, simulate_qtr_cn, CnSimConfig, CnSimResult};
pub use error::{Error, Result};
pub use fock::{fock_fidelity_oracle, FockFidelity};
pub use gaussian::{
    apply_thermal_loss, background_output_state, gaussian_fidelity, target_output_state, tmsv_state,
    GaussianState, ThermalLossChannel,
};
pub use scenario::{build_range_bins, compare_all, energy_accounting, sweep, RangeGrid, SweepSpec};
