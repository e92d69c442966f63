use std::sync::Arc;

use crate::element::ElementOperators;

use super::{Mesh1D, SolutionState};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PdeKind {
    /// `u_t + a u_x = μ u_xx`.
    AdvectionDiffusion,
    /// `u_t + (u²/2)_x = μ u_xx`.
    Burgers,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdeParams {
    pub kind: PdeKind,
    /// Advection speed; ignored for Burgers.
    pub a: f64,
    pub mu: f64,
    /// Interface upwinding: 1 is full upwind, 0 is central.
    pub alpha: f64,
}

impl PdeParams {
    pub fn advection_diffusion(a: f64, mu: f64) -> Self {
        Self { kind: PdeKind::AdvectionDiffusion, a, mu, alpha: 1.0 }
    }

    pub fn burgers(mu: f64) -> Self {
        Self { kind: PdeKind::Burgers, a: 0.0, mu, alpha: 1.0 }
    }

    fn flux(&self, u: f64) -> f64 {
        match self.kind {
            PdeKind::AdvectionDiffusion => self.a * u,
            PdeKind::Burgers => 0.5 * u * u,
        }
    }

    /// Advective common flux from the states left and right of an interface.
    fn common_flux(&self, ul: f64, ur: f64) -> f64 {
        match self.kind {
            PdeKind::AdvectionDiffusion => {
                let upwind = if self.a >= 0.0 { self.a * ul } else { self.a * ur };
                self.alpha * upwind + (1.0 - self.alpha) * 0.5 * self.a * (ul + ur)
            }
            PdeKind::Burgers => {
                let abar = 0.5 * (ul + ur);
                0.5 * (self.flux(ul) + self.flux(ur)) - 0.5 * abar.abs() * (ur - ul)
            }
        }
    }
}

/// Reusable FR right-hand-side evaluator.
///
/// Interfaces are indexed `0..N`: interface `j` sits between element `j-1`
/// (wrapping) and element `j`. The lifting operator `C` already carries the
/// outward normal signs through `B`, so interface jumps are taken in the
/// `x̂` direction on both faces.
#[derive(Debug, Clone)]
pub struct FrRhs {
    ops: Arc<ElementOperators>,
    mesh: Mesh1D,
    params: PdeParams,
    /// `[left, right]` face traces per element.
    u_face: Vec<[f64; 2]>,
    grad: Vec<f64>,
    flux: Vec<f64>,
    f_face: Vec<[f64; 2]>,
    g_face: Vec<[f64; 2]>,
    common: Vec<f64>,
}

impl FrRhs {
    pub fn new(ops: Arc<ElementOperators>, mesh: Mesh1D, params: PdeParams) -> Self {
        let (n, ne) = (ops.n, mesh.n_elements);
        Self {
            ops,
            mesh,
            params,
            u_face: vec![[0.0; 2]; ne],
            grad: vec![0.0; ne * n],
            flux: vec![0.0; ne * n],
            f_face: vec![[0.0; 2]; ne],
            g_face: vec![[0.0; 2]; ne],
            common: vec![0.0; ne],
        }
    }

    pub fn params(&self) -> &PdeParams {
        &self.params
    }

    /// Writes `du/dt` for the field `u` into `out`.
    pub fn eval(&mut self, u: &[f64], out: &mut [f64]) {
        let ops = Arc::clone(&self.ops);
        let (n, ne) = (ops.n, self.mesh.n_elements);
        assert_eq!(u.len(), n * ne, "FrRhs: field length");
        assert_eq!(out.len(), n * ne, "FrRhs: output length");
        let inv_j = 2.0 / self.mesh.h();
        let (p, d, c) = (&ops.p, &ops.d, &ops.c);
        let prev = |j: usize| if j == 0 { ne - 1 } else { j - 1 };
        let next = |j: usize| if j + 1 == ne { 0 } else { j + 1 };

        for j in 0..ne {
            self.u_face[j] = project(p, &u[j * n..(j + 1) * n]);
        }

        let viscous = self.params.mu != 0.0;
        if viscous {
            // Common solution value at each interface: mean of both traces.
            for j in 0..ne {
                self.common[j] = 0.5 * (self.u_face[prev(j)][1] + self.u_face[j][0]);
            }
            for j in 0..ne {
                let jl = self.common[j] - self.u_face[j][0];
                let jr = self.common[next(j)] - self.u_face[j][1];
                let uj = &u[j * n..(j + 1) * n];
                for i in 0..n {
                    let du: f64 = (0..n).map(|k| d[(i, k)] * uj[k]).sum();
                    self.grad[j * n + i] = inv_j * (du + c[(i, 0)] * jl + c[(i, 1)] * jr);
                }
                self.g_face[j] = project(p, &self.grad[j * n..(j + 1) * n]);
            }
        }

        let mu = self.params.mu;
        for idx in 0..n * ne {
            let g = if viscous { self.grad[idx] } else { 0.0 };
            self.flux[idx] = self.params.flux(u[idx]) - mu * g;
        }
        for j in 0..ne {
            self.f_face[j] = project(p, &self.flux[j * n..(j + 1) * n]);
        }

        for j in 0..ne {
            let l = prev(j);
            let mut fc = self.params.common_flux(self.u_face[l][1], self.u_face[j][0]);
            if viscous {
                fc -= mu * 0.5 * (self.g_face[l][1] + self.g_face[j][0]);
            }
            self.common[j] = fc;
        }

        for j in 0..ne {
            let jl = self.common[j] - self.f_face[j][0];
            let jr = self.common[next(j)] - self.f_face[j][1];
            let fj = &self.flux[j * n..(j + 1) * n];
            for i in 0..n {
                let df: f64 = (0..n).map(|k| d[(i, k)] * fj[k]).sum();
                out[j * n + i] = -inv_j * (df + c[(i, 0)] * jl + c[(i, 1)] * jr);
            }
        }
    }
}

fn project(p: &crate::linalg::Matrix, v: &[f64]) -> [f64; 2] {
    let (l, r) = p.row(0).iter().zip(p.row(1)).zip(v).fold((0.0, 0.0), |(l, r), ((a, b), x)| (l + a * x, r + b * x));
    [l, r]
}

fn rhs_for(state: &SolutionState, params: PdeParams) -> Vec<f64> {
    let mut out = vec![0.0; state.u.len()];
    FrRhs::new(Arc::clone(&state.ops), state.mesh, params).eval(&state.u, &mut out);
    out
}

/// `du/dt` for linear advection–diffusion. `params.kind` is ignored.
pub fn rhs_advection_diffusion(state: &SolutionState, params: &PdeParams) -> Vec<f64> {
    rhs_for(state, PdeParams { kind: PdeKind::AdvectionDiffusion, ..*params })
}

/// `du/dt` for viscous Burgers. `params.kind` and `params.a` are ignored.
pub fn rhs_burgers(state: &SolutionState, params: &PdeParams) -> Vec<f64> {
    rhs_for(state, PdeParams { kind: PdeKind::Burgers, ..*params })
}
