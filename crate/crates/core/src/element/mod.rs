//! Reference element `[-1, 1]`: node sets, quadrature, nodal bases and the
//! flux reconstruction operators built from them.

mod basis;
mod nodes;
mod operators;

use thiserror::Error;

use crate::linalg::LinalgError;
use crate::rbf::RbfError;

pub use basis::{nodal_basis_matrices, BasisSpec, BasisVariant, NodalBasis};
pub use nodes::{legendre_eval, legendre_roots, node_set, quadrature, NodeKind, NodeSet, MAX_NODES, MIN_NODES};
pub use operators::{
    build_operators, build_operators_with, gram_schmidt, CorrectionSpace, ElementOperators, OperatorOptions,
    DEFAULT_QUADRATURE_ORDER, OPERATOR_CSV_HEADER,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ElementError {
    #[error("unknown node layout '{0}' (expected legendre, lobatto, chebyshev, uniform_full or uniform_internal)")]
    UnknownNodeKind(String),
    #[error("node count {n} outside [{min}, {max}]")]
    NodeCount { n: usize, min: usize, max: usize },
    #[error("coordinates must be non-empty, strictly increasing and inside [-1, 1]")]
    InvalidCoordinates,
    #[error("quadrature order {order} outside [1, {max}]")]
    QuadratureOrder { order: usize, max: usize },
    #[error("quadrature order {order} is below 2n = {}", 2 * n)]
    QuadratureTooLow { order: usize, n: usize },
    #[error("{centres} centres for {points} solution points")]
    CentreCount { points: usize, centres: usize },
    #[error("Gram-Schmidt breakdown at function {index}: basis is numerically rank deficient")]
    GramSchmidtBreakdown { index: usize },
    #[error(transparent)]
    Rbf(#[from] RbfError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}
