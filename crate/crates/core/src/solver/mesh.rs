use std::sync::Arc;

use crate::element::ElementOperators;

use super::SolverError;

/// Uniform periodic mesh of `n_elements` cells on `[x_min, x_max)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mesh1D {
    pub x_min: f64,
    pub x_max: f64,
    pub n_elements: usize,
}

impl Mesh1D {
    pub fn new(x_min: f64, x_max: f64, n_elements: usize) -> Result<Self, SolverError> {
        if n_elements < 2 {
            return Err(SolverError::Mesh(format!("need at least 2 elements, got {n_elements}")));
        }
        if !(x_max > x_min) || !x_min.is_finite() || !x_max.is_finite() {
            return Err(SolverError::Mesh(format!("empty or non-finite interval [{x_min}, {x_max})")));
        }
        Ok(Self { x_min, x_max, n_elements })
    }

    pub fn h(&self) -> f64 {
        (self.x_max - self.x_min) / self.n_elements as f64
    }

    /// `|J| = h / 2`.
    pub fn jacobian(&self) -> f64 {
        0.5 * self.h()
    }

    pub fn periodic(&self) -> bool {
        true
    }

    /// Physical position of reference coordinate `xhat` in element `j`.
    pub fn physical(&self, j: usize, xhat: f64) -> f64 {
        self.x_min + (j as f64 + 0.5 * (xhat + 1.0)) * self.h()
    }
}

/// Nodal field `u[j * n + i]` at solution point `i` of element `j`.
#[derive(Debug, Clone)]
pub struct SolutionState {
    pub mesh: Mesh1D,
    pub ops: Arc<ElementOperators>,
    pub u: Vec<f64>,
}

impl SolutionState {
    /// Samples `f` at every physical solution point.
    pub fn from_fn(mesh: Mesh1D, ops: Arc<ElementOperators>, f: impl Fn(f64) -> f64) -> Self {
        let u = Self::node_positions_for(&mesh, &ops).into_iter().map(f).collect();
        Self { mesh, ops, u }
    }

    pub fn n(&self) -> usize {
        self.ops.n
    }

    pub fn node_positions(&self) -> Vec<f64> {
        Self::node_positions_for(&self.mesh, &self.ops)
    }

    fn node_positions_for(mesh: &Mesh1D, ops: &ElementOperators) -> Vec<f64> {
        (0..mesh.n_elements).flat_map(|j| ops.points.iter().map(move |&x| mesh.physical(j, x))).collect()
    }

    pub fn element(&self, j: usize) -> &[f64] {
        let n = self.n();
        &self.u[j * n..(j + 1) * n]
    }

    pub fn all_finite(&self) -> bool {
        self.u.iter().all(|v| v.is_finite())
    }

    /// `Σ_j |J| 1ᵀ M u_j`, the discrete integral of `u`.
    pub fn total(&self) -> f64 {
        let n = self.n();
        let ones_m: Vec<f64> = (0..n).map(|i| (0..n).map(|k| self.ops.m[(k, i)]).sum()).collect();
        self.mesh.jacobian() * self.u.chunks(n).map(|uj| uj.iter().zip(&ones_m).map(|(u, w)| u * w).sum::<f64>()).sum::<f64>()
    }
}
