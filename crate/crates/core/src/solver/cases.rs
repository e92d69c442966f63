use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::element::ElementOperators;
use crate::io::{fmt_f64, CsvTable};

use super::time::run_from;
use super::{DtRule, Mesh1D, PdeParams, RunConfig, SolutionState, SolverError};

pub const CONVERGENCE_CSV_HEADER: &str = "case,basis,kernel,eps,layout,centres,n_s,N,dx,L1,L2,Linf,t_end";
pub const STATE_CSV_HEADER: &str = "element,node,x,u";

const BUMP_PERIOD: f64 = 20.0;
const BUMP_IMAGES: i32 = 3;

/// The two linear test problems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LinearCase {
    /// `u₀ = sin x` on `[-π, π)`, `a = 1`, `μ = 0`.
    SineAdvection,
    /// `u₀ = exp(-x²)` on `[-10, 10)`, `a = 1`, `μ = 0.1`.
    GaussianAdvDiff,
}

impl LinearCase {
    pub fn name(self) -> &'static str {
        match self {
            LinearCase::SineAdvection => "sine_adv",
            LinearCase::GaussianAdvDiff => "gaussian_adv_diff",
        }
    }

    pub fn domain(self) -> (f64, f64) {
        match self {
            LinearCase::SineAdvection => (-PI, PI),
            LinearCase::GaussianAdvDiff => (-0.5 * BUMP_PERIOD, 0.5 * BUMP_PERIOD),
        }
    }

    pub fn params(self) -> PdeParams {
        match self {
            LinearCase::SineAdvection => PdeParams::advection_diffusion(1.0, 0.0),
            LinearCase::GaussianAdvDiff => PdeParams::advection_diffusion(1.0, 0.1),
        }
    }

    /// One traversal for the sine; half the domain for the bump.
    pub fn default_t_end(self) -> f64 {
        match self {
            LinearCase::SineAdvection => 2.0 * PI,
            LinearCase::GaussianAdvDiff => 10.0,
        }
    }

    pub fn mesh(self, n_elements: usize) -> Result<Mesh1D, SolverError> {
        let (a, b) = self.domain();
        Mesh1D::new(a, b, n_elements)
    }
}

impl fmt::Display for LinearCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LinearCase {
    type Err = SolverError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sine_adv" => Ok(LinearCase::SineAdvection),
            "gaussian_adv_diff" => Ok(LinearCase::GaussianAdvDiff),
            _ => Err(SolverError::Config(format!("unknown case '{s}' (expected sine_adv or gaussian_adv_diff)"))),
        }
    }
}

/// Exact periodic solution at `(x, t)`.
pub fn exact_solution(case: LinearCase, x: f64, t: f64, params: &PdeParams) -> f64 {
    let y = x - params.a * t;
    match case {
        LinearCase::SineAdvection => y.sin(),
        LinearCase::GaussianAdvDiff => {
            let spread = 1.0 + 4.0 * params.mu * t;
            let y = (y + 0.5 * BUMP_PERIOD).rem_euclid(BUMP_PERIOD) - 0.5 * BUMP_PERIOD;
            let amp = 1.0 / spread.sqrt();
            (-BUMP_IMAGES..=BUMP_IMAGES)
                .map(|m| {
                    let d = y - f64::from(m) * BUMP_PERIOD;
                    amp * (-d * d / spread).exp()
                })
                .sum()
        }
    }
}

/// Point-mean norms of the nodal error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorNorms {
    pub l1: f64,
    pub l2: f64,
    pub linf: f64,
}

pub fn error_norms(state: &SolutionState, exact: impl Fn(f64, f64) -> f64, t: f64) -> ErrorNorms {
    let xs = state.node_positions();
    let count = xs.len() as f64;
    let (mut l1, mut l2, mut linf) = (0.0, 0.0, 0.0f64);
    for (x, u) in xs.iter().zip(&state.u) {
        let e = (u - exact(*x, t)).abs();
        l1 += e;
        l2 += e * e;
        linf = linf.max(e);
    }
    ErrorNorms { l1: l1 / count, l2: (l2 / count).sqrt(), linf }
}

/// Values at `n` offset-uniform points per element (`x̂ = -1 + (2i+1)/n`),
/// globally equispaced. Returns `(x, u)`.
pub fn sample_equispaced(state: &SolutionState) -> (Vec<f64>, Vec<f64>) {
    let n = state.n();
    let refs: Vec<f64> = (0..n).map(|i| -1.0 + (2 * i + 1) as f64 / n as f64).collect();
    let (v, _) = state.ops.basis().matrices(&refs);
    let mut xs = Vec::with_capacity(state.u.len());
    let mut us = Vec::with_capacity(state.u.len());
    for j in 0..state.mesh.n_elements {
        let s = v.mul_vec(state.element(j));
        for (i, &xr) in refs.iter().enumerate() {
            xs.push(state.mesh.physical(j, xr));
            us.push(s[i]);
        }
    }
    (xs, us)
}

pub fn state_table(state: &SolutionState) -> CsvTable {
    let mut t = CsvTable::new(STATE_CSV_HEADER);
    let n = state.n();
    for (idx, (x, u)) in state.node_positions().iter().zip(&state.u).enumerate() {
        t.push(vec![(idx / n).to_string(), (idx % n).to_string(), fmt_f64(*x), fmt_f64(*u)]);
    }
    t
}

/// Outcome of one linear-case run.
#[derive(Debug, Clone)]
pub struct LinearRun {
    pub case: LinearCase,
    pub n_elements: usize,
    pub dx: f64,
    pub t_end: f64,
    pub dt: f64,
    pub steps: usize,
    pub dt_rule: DtRule,
    pub norms: ErrorNorms,
    pub state: SolutionState,
}

/// Runs a linear case to `t_end` and measures the error against the exact
/// solution.
///
/// With `max_halvings > 0`, the CFL numbers are halved until halving once
/// more changes the L2 error by less than 1%; the reported run is the
/// coarser of the final pair.
pub fn run_linear_case(
    case: LinearCase,
    ops: Arc<ElementOperators>,
    n_elements: usize,
    t_end: f64,
    dt_rule: DtRule,
    max_halvings: usize,
) -> Result<LinearRun, SolverError> {
    let mesh = case.mesh(n_elements)?;
    let params = case.params();
    let once = |rule: DtRule| -> Result<LinearRun, SolverError> {
        let cfg = RunConfig { mesh, ops: Arc::clone(&ops), params, t_end, dt_rule: rule };
        let init = SolutionState::from_fn(mesh, Arc::clone(&ops), |x| exact_solution(case, x, 0.0, &params));
        let r = run_from(&cfg, init)?;
        let norms = error_norms(&r.state, |x, t| exact_solution(case, x, t, &params), t_end);
        Ok(LinearRun { case, n_elements, dx: mesh.h(), t_end, dt: r.dt, steps: r.steps, dt_rule: rule, norms, state: r.state })
    };
    let mut current = once(dt_rule)?;
    for _ in 0..max_halvings {
        let finer = once(current.dt_rule.halved())?;
        let change = (current.norms.l2 - finer.norms.l2).abs() / finer.norms.l2.max(f64::MIN_POSITIVE);
        if change < 0.01 {
            break;
        }
        current = finer;
    }
    Ok(current)
}
