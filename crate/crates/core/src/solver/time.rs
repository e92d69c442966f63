use std::sync::Arc;

use crate::element::ElementOperators;

use super::{FrRhs, Mesh1D, PdeKind, PdeParams, SolutionState, SolverError};

/// `dt = cfl·h / (λ (2n+1))`, capped by `cfl_diffusive·h² / (μ (2n+1)²)`
/// when `μ > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DtRule {
    pub cfl: f64,
    pub cfl_diffusive: f64,
}

impl Default for DtRule {
    fn default() -> Self {
        Self { cfl: 0.4, cfl_diffusive: 0.4 }
    }
}

impl DtRule {
    pub fn halved(self) -> Self {
        Self { cfl: 0.5 * self.cfl, cfl_diffusive: 0.5 * self.cfl_diffusive }
    }
}

/// Time step for `n` solution points per element. `umax` is the largest
/// |u| of the initial field (the wave speed for Burgers).
pub fn stable_dt(mesh: &Mesh1D, n: usize, params: &PdeParams, umax: f64, rule: &DtRule) -> f64 {
    let h = mesh.h();
    let p = (2 * n + 1) as f64;
    let lambda = match params.kind {
        PdeKind::AdvectionDiffusion => params.a.abs(),
        PdeKind::Burgers => umax,
    };
    let mut dt = f64::INFINITY;
    if lambda > 0.0 {
        dt = rule.cfl * h / (lambda * p);
    }
    if params.mu > 0.0 {
        dt = dt.min(rule.cfl_diffusive * h * h / (params.mu * p * p));
    }
    dt
}

#[derive(Debug, Default, Clone)]
struct Rk4Work {
    k: [Vec<f64>; 4],
    stage: Vec<f64>,
}

fn rk4_into(u: &mut [f64], dt: f64, rhs: &mut impl FnMut(&[f64], &mut [f64]), w: &mut Rk4Work) {
    let len = u.len();
    for k in &mut w.k {
        k.resize(len, 0.0);
    }
    w.stage.resize(len, 0.0);
    let [k1, k2, k3, k4] = &mut w.k;
    rhs(u, k1);
    for i in 0..len {
        w.stage[i] = u[i] + 0.5 * dt * k1[i];
    }
    rhs(&w.stage, k2);
    for i in 0..len {
        w.stage[i] = u[i] + 0.5 * dt * k2[i];
    }
    rhs(&w.stage, k3);
    for i in 0..len {
        w.stage[i] = u[i] + dt * k3[i];
    }
    rhs(&w.stage, k4);
    for i in 0..len {
        u[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
}

/// One classical fourth-order Runge–Kutta step.
pub fn rk4_step(u: &[f64], dt: f64, mut rhs: impl FnMut(&[f64], &mut [f64])) -> Vec<f64> {
    let mut out = u.to_vec();
    rk4_into(&mut out, dt, &mut rhs, &mut Rk4Work::default());
    out
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub mesh: Mesh1D,
    pub ops: Arc<ElementOperators>,
    pub params: PdeParams,
    pub t_end: f64,
    pub dt_rule: DtRule,
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub state: SolutionState,
    /// Nominal step; the last step may be shorter to land on `t_end`.
    pub dt: f64,
    pub steps: usize,
}

/// Integrates from the sampled initial condition to `t_end`.
pub fn run_case(cfg: &RunConfig, initial: impl Fn(f64) -> f64) -> Result<RunResult, SolverError> {
    let state = SolutionState::from_fn(cfg.mesh, Arc::clone(&cfg.ops), initial);
    run_from(cfg, state)
}

/// Integrates an existing state to `cfg.t_end`.
pub fn run_from(cfg: &RunConfig, mut state: SolutionState) -> Result<RunResult, SolverError> {
    if !(cfg.t_end >= 0.0 && cfg.t_end.is_finite()) {
        return Err(SolverError::Config(format!("t_end must be finite and non-negative, got {}", cfg.t_end)));
    }
    let umax = state.u.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut dt = stable_dt(&cfg.mesh, cfg.ops.n, &cfg.params, umax, &cfg.dt_rule);
    if !dt.is_finite() {
        dt = cfg.t_end;
    }
    if cfg.t_end == 0.0 {
        return Ok(RunResult { state, dt, steps: 0 });
    }
    let full = (cfg.t_end / dt).floor() as usize;
    let rest = cfg.t_end - full as f64 * dt;
    let mut steps: Vec<f64> = vec![dt; full];
    if rest > 1e-12 * cfg.t_end {
        steps.push(rest);
    }

    let mut rhs = FrRhs::new(Arc::clone(&cfg.ops), cfg.mesh, cfg.params);
    let mut f = |u: &[f64], out: &mut [f64]| rhs.eval(u, out);
    let mut work = Rk4Work::default();
    let mut t = 0.0;
    for (i, &h) in steps.iter().enumerate() {
        rk4_into(&mut state.u, h, &mut f, &mut work);
        t += h;
        if !state.all_finite() {
            return Err(SolverError::BlowUp { step: i + 1, t });
        }
    }
    Ok(RunResult { state, dt, steps: steps.len() })
}
