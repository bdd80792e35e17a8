//! Verification harness: manufactured solutions, error norms, convergence
//! and locking studies, stability-constant estimates, and the edge
//! consistency diagnostic.

mod cases;
mod consistency;
mod norms;
pub mod report;
mod stability;
mod study;

pub use cases::{builtin_case, ManufacturedCase};
pub use consistency::{
    assemble_edge_pairing_load, broken_h1_norm, consistency_functional, edge_pairing,
};
pub use norms::{error_norms, state_error, ErrorNorms};
pub use stability::{
    estimate_inf_sup_rt, estimate_inf_sup_sigma, infsup_by_svd, korn_constant, InfSupEstimate,
    KornEstimate,
};
pub use study::{
    cn_experiment, convergence_study, dt_refinement_study, locking_sweep, solve_case, CaseSolution,
    CnExperiment, CnExperimentRow, ConvergenceReport, LevelResult,
};
