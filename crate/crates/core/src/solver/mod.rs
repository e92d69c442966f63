//! Periodic uniform-mesh FR solver for linear advection–diffusion and
//! viscous Burgers, with classical RK4 time stepping.

mod burgers;
mod cases;
mod mesh;
mod rhs;
mod time;

use thiserror::Error;

use crate::element::ElementError;

pub use burgers::{
    burgers_initial_field, energy_spectrum, initial_spectrum, phases, run_burgers_ensemble, spectrum_table,
    BurgersEnsembleConfig, EnsembleResult, SPECTRUM_CSV_HEADER,
};
pub use cases::{
    error_norms, exact_solution, run_linear_case, sample_equispaced, state_table, ErrorNorms, LinearCase, LinearRun,
    CONVERGENCE_CSV_HEADER, STATE_CSV_HEADER,
};
pub use mesh::{Mesh1D, SolutionState};
pub use rhs::{rhs_advection_diffusion, rhs_burgers, FrRhs, PdeKind, PdeParams};
pub use time::{rk4_step, run_case, run_from, stable_dt, DtRule, RunConfig, RunResult};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("blow-up: non-finite solution after step {step} (t = {t})")]
    BlowUp { step: usize, t: f64 },
    #[error("invalid mesh: {0}")]
    Mesh(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("length mismatch: {0}")]
    Length(String),
    #[error("seed {seed}: {source}")]
    Seed { seed: u32, source: Box<SolverError> },
    #[error(transparent)]
    Element(#[from] ElementError),
}
