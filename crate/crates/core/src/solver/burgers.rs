use std::f64::consts::PI;
use std::sync::Arc;

use rand_mt::Mt;
use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::element::ElementOperators;
use crate::io::{fmt_f64, CsvTable};

use super::cases::sample_equispaced;
use super::time::run_from;
use super::{DtRule, Mesh1D, PdeParams, RunConfig, SolutionState, SolverError};

pub const SPECTRUM_CSV_HEADER: &str = "f,E";

#[derive(Debug, Clone, PartialEq)]
pub struct BurgersEnsembleConfig {
    pub rho: f64,
    pub k_max: usize,
    pub seeds: Vec<u32>,
    pub t_end: f64,
    pub mu: f64,
    pub n_elements: usize,
    pub dt_rule: DtRule,
}

impl Default for BurgersEnsembleConfig {
    fn default() -> Self {
        Self {
            rho: 0.1,
            k_max: 2048,
            seeds: (0..20).collect(),
            t_end: 0.1,
            mu: 5e-3,
            n_elements: 1200,
            dt_rule: DtRule::default(),
        }
    }
}

impl BurgersEnsembleConfig {
    /// `E₀(k) = 2/(3√π ρ) (kρ)⁴ exp(-(kρ)²)`.
    pub fn e0(&self, k: f64) -> f64 {
        let kr = k * self.rho;
        2.0 / (3.0 * PI.sqrt() * self.rho) * kr.powi(4) * (-kr * kr).exp()
    }

    pub fn mesh(&self) -> Result<Mesh1D, SolverError> {
        Mesh1D::new(0.0, 2.0 * PI, self.n_elements)
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        if !(self.rho > 0.0 && self.rho.is_finite()) {
            return Err(SolverError::Config(format!("rho must be positive, got {}", self.rho)));
        }
        if !(self.mu >= 0.0 && self.mu.is_finite()) {
            return Err(SolverError::Config(format!("mu must be non-negative, got {}", self.mu)));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(SolverError::Config(format!("t_end must be non-negative, got {}", self.t_end)));
        }
        if self.seeds.is_empty() {
            return Err(SolverError::Config("seed list is empty".into()));
        }
        Ok(())
    }
}

/// First `count` doubles in `[0, 1)` of the MT19937 stream for `seed`, with
/// 53-bit resolution (two 32-bit draws per value).
pub fn phases(seed: u32, count: usize) -> Vec<f64> {
    let mut mt = Mt::new(seed);
    (0..count)
        .map(|_| {
            let a = mt.next_u32() >> 5;
            let b = mt.next_u32() >> 6;
            (f64::from(a) * 67_108_864.0 + f64::from(b)) / 9_007_199_254_740_992.0
        })
        .collect()
}

/// `u₀(x) = Σ_k sqrt(2E₀(k)) cos(kx + 2πΨ(k))` at every solution point.
pub fn burgers_initial_field(
    cfg: &BurgersEnsembleConfig,
    seed: u32,
    mesh: Mesh1D,
    ops: Arc<ElementOperators>,
) -> Result<SolutionState, SolverError> {
    if mesh.x_min != 0.0 || (mesh.x_max - 2.0 * PI).abs() > 1e-12 {
        return Err(SolverError::Mesh(format!("Burgers field needs [0, 2π), got [{}, {})", mesh.x_min, mesh.x_max)));
    }
    let psi = phases(seed, cfg.k_max + 1);
    let modes: Vec<(f64, f64, f64)> = (0..=cfg.k_max)
        .filter_map(|k| {
            let amp = (2.0 * cfg.e0(k as f64)).sqrt();
            (amp > 0.0).then_some((k as f64, amp, 2.0 * PI * psi[k]))
        })
        .collect();
    Ok(SolutionState::from_fn(mesh, ops, |x| modes.iter().map(|&(k, a, p)| a * (k * x + p).cos()).sum()))
}

/// Ensemble-averaged energy per integer wavenumber `f = 0..=L/2` of
/// equispaced samples of length `L`.
///
/// Positive and negative frequencies are folded, so a mode
/// `sqrt(2E) cos(fx + φ)` contributes exactly `E` at `f`, and `Σ_f E(f)`
/// equals the mean of `u²`.
pub fn energy_spectrum(runs: &[Vec<f64>]) -> Result<Vec<f64>, SolverError> {
    let len = runs.first().map_or(0, Vec::len);
    if len == 0 {
        return Err(SolverError::Length("no samples".into()));
    }
    if let Some(r) = runs.iter().find(|r| r.len() != len) {
        return Err(SolverError::Length(format!("run of length {} among runs of length {len}", r.len())));
    }
    let fft = FftPlanner::new().plan_fft_forward(len);
    let norm = 1.0 / (len as f64 * len as f64);
    let mut total = vec![0.0; len / 2 + 1];
    let mut buf = vec![Complex64::new(0.0, 0.0); len];
    for run in runs {
        for (b, &v) in buf.iter_mut().zip(run) {
            *b = Complex64::new(v, 0.0);
        }
        fft.process(&mut buf);
        for (f, e) in total.iter_mut().enumerate() {
            let mirror = len - f;
            let mut p = buf[f].norm_sqr();
            if f != 0 && mirror != f {
                p += buf[mirror].norm_sqr();
            }
            *e += p * norm;
        }
    }
    let inv = 1.0 / runs.len() as f64;
    Ok(total.into_iter().map(|e| e * inv).collect())
}

pub fn spectrum_table(spectrum: &[f64]) -> CsvTable {
    let mut t = CsvTable::new(SPECTRUM_CSV_HEADER);
    for (f, e) in spectrum.iter().enumerate() {
        t.push(vec![f.to_string(), fmt_f64(*e)]);
    }
    t
}

#[derive(Debug, Clone)]
pub struct EnsembleResult {
    pub seeds: Vec<u32>,
    /// Nominal time step per seed.
    pub dt: Vec<f64>,
    pub steps: Vec<usize>,
    pub initial: Vec<f64>,
    pub final_spectrum: Vec<f64>,
}

/// Spectrum of the initial fields only, no time stepping.
pub fn initial_spectrum(cfg: &BurgersEnsembleConfig, ops: Arc<ElementOperators>) -> Result<Vec<f64>, SolverError> {
    cfg.validate()?;
    let mesh = cfg.mesh()?;
    let samples = cfg
        .seeds
        .par_iter()
        .map(|&s| burgers_initial_field(cfg, s, mesh, Arc::clone(&ops)).map(|st| sample_equispaced(&st).1))
        .collect::<Result<Vec<_>, _>>()?;
    energy_spectrum(&samples)
}

/// Runs every seed to `t_end` and averages the spectra in seed order.
pub fn run_burgers_ensemble(cfg: &BurgersEnsembleConfig, ops: Arc<ElementOperators>) -> Result<EnsembleResult, SolverError> {
    cfg.validate()?;
    let mesh = cfg.mesh()?;
    let run_cfg = RunConfig { mesh, ops: Arc::clone(&ops), params: PdeParams::burgers(cfg.mu), t_end: cfg.t_end, dt_rule: cfg.dt_rule };
    let runs = cfg
        .seeds
        .par_iter()
        .map(|&seed| {
            let init = burgers_initial_field(cfg, seed, mesh, Arc::clone(&ops))?;
            let before = sample_equispaced(&init).1;
            let after = run_from(&run_cfg, init).map_err(|e| SolverError::Seed { seed, source: Box::new(e) })?;
            Ok((before, sample_equispaced(&after.state).1, after.dt, after.steps))
        })
        .collect::<Result<Vec<_>, SolverError>>()?;
    let mut initial = Vec::with_capacity(runs.len());
    let mut last = Vec::with_capacity(runs.len());
    let mut dt = Vec::with_capacity(runs.len());
    let mut steps = Vec::with_capacity(runs.len());
    for (a, b, d, s) in runs {
        initial.push(a);
        last.push(b);
        dt.push(d);
        steps.push(s);
    }
    Ok(EnsembleResult { seeds: cfg.seeds.clone(), dt, steps, initial: energy_spectrum(&initial)?, final_spectrum: energy_spectrum(&last)? })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::element::{build_operators, node_set, BasisSpec, NodeKind};

    #[test]
    fn mt_phases_match_reference_stream() {
        let p = phases(7, 3);
        assert_eq!(p, vec![0.07630828937395717, 0.7799187922401146, 0.4384092314408935]);
        assert_eq!(phases(7, 5)[..3], p[..]);
    }

    #[test]
    fn e0_values() {
        let cfg = BurgersEnsembleConfig::default();
        let k = 2f64.sqrt() / cfg.rho;
        let expect = 2.0 / (3.0 * PI.sqrt() * 0.1) * 4.0 * (-2.0f64).exp();
        assert!((cfg.e0(k) - expect).abs() < 1e-12);
        assert!((cfg.e0(k) - 2.036126855695524).abs() < 1e-12);
        let argmax = (1..=30).max_by(|&a, &b| cfg.e0(a as f64).total_cmp(&cfg.e0(b as f64))).unwrap();
        assert_eq!(argmax, 14);
        assert!(cfg.e0(14.0) > cfg.e0(13.0));
    }

    #[test]
    fn pure_tone_spectrum() {
        let u: Vec<f64> = (0..64).map(|i| (3.0 * 2.0 * PI * i as f64 / 64.0).cos()).collect();
        let e = energy_spectrum(&[u.clone()]).unwrap();
        assert_eq!(e.len(), 33);
        assert!((e[3] - 0.5).abs() < 1e-14);
        for (f, v) in e.iter().enumerate() {
            if f != 3 {
                assert!(*v < 1e-28, "f={f}: {v}");
            }
        }
        let mean_sq = u.iter().map(|v| v * v).sum::<f64>() / 64.0;
        assert!((e.iter().sum::<f64>() - mean_sq).abs() < 1e-10);
    }

    #[test]
    fn spectrum_rejects_ragged_runs() {
        assert!(matches!(energy_spectrum(&[vec![1.0; 8], vec![1.0; 9]]), Err(SolverError::Length(_))));
        assert!(energy_spectrum(&[]).is_err());
    }

    #[test]
    fn initial_field_is_deterministic_and_domain_checked() {
        let ops = Arc::new(build_operators(&BasisSpec::polynomial(node_set(NodeKind::Legendre, 3).unwrap())).unwrap());
        let cfg = BurgersEnsembleConfig { k_max: 64, n_elements: 16, ..Default::default() };
        let mesh = cfg.mesh().unwrap();
        let a = burgers_initial_field(&cfg, 3, mesh, Arc::clone(&ops)).unwrap();
        let b = burgers_initial_field(&cfg, 3, mesh, Arc::clone(&ops)).unwrap();
        assert_eq!(a.u, b.u);
        let c = burgers_initial_field(&cfg, 4, mesh, Arc::clone(&ops)).unwrap();
        assert_ne!(a.u, c.u);
        assert!(burgers_initial_field(&cfg, 3, Mesh1D::new(-PI, PI, 16).unwrap(), ops).is_err());
    }

    #[test]
    fn spectrum_table_layout() {
        let t = spectrum_table(&[0.0, 0.25]);
        assert_eq!(t.to_csv_string(), "f,E\n0,0.0\n1,0.25\n");
    }
}
