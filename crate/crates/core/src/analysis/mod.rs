//! Bloch-wave analysis of the semi-discrete scheme on one element, the
//! combined amplification/phase analysis, and summation-by-parts checks.

mod combined;
mod fourier;
mod sbp;

use thiserror::Error;

use crate::element::{ElementError, ElementOperators, NodeSet};
use crate::linalg::LinalgError;

pub use combined::{combined_analysis, combined_for_operator, combined_table, CombinedResult, COMBINED_CSV_HEADER};
pub use fourier::{
    assemble_q, dispersion_dissipation, dispersion_table, khat_grid, max_dissipation_sweep, max_dissipation_table,
    DissipationRow, FourierConfig, ModalResult, DISPERSION_CSV_HEADER, MAX_DISSIPATION_CSV_HEADER,
};
pub use sbp::{sbp_report, sbp_sweep, sbp_table, SbpReport, SbpRow, SBP_CSV_HEADER};

/// Builds element operators for a shape parameter and a set of solution
/// points.
pub type OpsBuilder<'a> = dyn Fn(f64, &NodeSet) -> Result<ElementOperators, ElementError> + Sync + 'a;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("defective eigenbasis at k_hat = {k_hat}: cond(W) = {cond:e}")]
    DefectiveModes { k_hat: f64, cond: f64 },
    #[error("invalid analysis configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Element(#[from] ElementError),
}
