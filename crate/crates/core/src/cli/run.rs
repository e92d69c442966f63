use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::{
    combined_analysis, combined_table, dispersion_dissipation, dispersion_table, khat_grid, max_dissipation_sweep,
    max_dissipation_table, sbp_sweep, sbp_table, FourierConfig,
};
use crate::element::{build_operators_with, node_set, BasisSpec, ElementError, ElementOperators, NodeKind, NodeSet};
use crate::io::{fmt_f64, CsvTable};
use crate::rbf::{condition_sweep, condition_table, CONDITION_CSV_HEADER};
use crate::solver::{run_burgers_ensemble, run_linear_case, spectrum_table, DtRule, LinearCase, CONVERGENCE_CSV_HEADER};

use super::config::{Command, ExperimentConfig};
use super::CliError;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ManifestRun {
    pub label: String,
    pub dt: f64,
    pub steps: usize,
}

/// Written as `manifest.toml` next to the CSVs. `config` is the effective
/// configuration after overrides, enough to repeat the run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub quadrature_order: usize,
    pub wall_time_s: f64,
    pub outputs: Vec<String>,
    pub seeds: Vec<u32>,
    pub runs: Vec<ManifestRun>,
    pub config: ExperimentConfig,
}

struct Sink<'a> {
    dir: &'a Path,
    files: Vec<String>,
    runs: Vec<ManifestRun>,
}

impl Sink<'_> {
    fn write(&mut self, name: String, table: &CsvTable) -> Result<(), CliError> {
        let path = self.dir.join(&name);
        table.write(&path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        self.files.push(name);
        Ok(())
    }
}

/// Label for one basis: `family_layout_nN[_epsE]`.
pub fn basis_label(spec: &BasisSpec, layout: NodeKind) -> String {
    let mut s = format!("{}_{}_n{}", spec.family(), layout, spec.n());
    if let Some(e) = spec.eps() {
        s.push_str(&format!("_eps{}", fmt_f64(e)));
    }
    s
}

fn operators(cfg: &ExperimentConfig, eps: Option<f64>, points: &NodeSet) -> Result<(BasisSpec, Arc<ElementOperators>), ElementError> {
    let spec = cfg.basis_spec(eps, points)?;
    let ops = build_operators_with(&spec, &cfg.operator_options())?;
    Ok((spec, Arc::new(ops)))
}

fn runtime(label: &str, e: impl std::fmt::Display) -> CliError {
    CliError::Runtime(format!("{label}: {e}"))
}

/// Runs `cfg.command`, writing CSVs and `manifest.toml` into `out`.
pub fn run(cfg: &ExperimentConfig, out: &Path) -> Result<RunManifest, CliError> {
    let diags = cfg.validate();
    if !diags.is_empty() {
        return Err(CliError::Config(diags));
    }
    std::fs::create_dir_all(out).map_err(|e| CliError::Io(format!("{}: {e}", out.display())))?;
    let start = Instant::now();
    let mut sink = Sink { dir: out, files: Vec::new(), runs: Vec::new() };
    let mut seeds = Vec::new();
    match cfg.command {
        Command::Convergence => convergence(cfg, &mut sink)?,
        Command::Fourier => fourier(cfg, &mut sink)?,
        Command::Sbp => sbp(cfg, &mut sink)?,
        Command::Condition => condition(cfg, &mut sink)?,
        Command::Burgers => {
            seeds = cfg.seeds();
            burgers(cfg, &mut sink)?;
        }
    }
    let manifest = RunManifest {
        command: cfg.command.to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        quadrature_order: cfg.basis.quadrature_order,
        wall_time_s: start.elapsed().as_secs_f64(),
        outputs: sink.files,
        seeds,
        runs: sink.runs,
        config: cfg.clone(),
    };
    let text = toml::to_string(&manifest).map_err(|e| CliError::Io(e.to_string()))?;
    let path = out.join("manifest.toml");
    std::fs::write(&path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(manifest)
}

fn sweep_points(cfg: &ExperimentConfig) -> Vec<(Option<f64>, NodeKind, usize)> {
    let mut v = Vec::new();
    for eps in cfg.eps_values() {
        for layout in cfg.layouts() {
            for &n in &cfg.basis.n_s {
                v.push((eps, layout, n));
            }
        }
    }
    v
}

fn convergence(cfg: &ExperimentConfig, sink: &mut Sink<'_>) -> Result<(), CliError> {
    let c = &cfg.convergence;
    let rule = DtRule { cfl: c.cfl, cfl_diffusive: c.cfl_diffusive };
    let mut jobs = Vec::new();
    for name in &c.cases {
        let case: LinearCase = name.parse().map_err(|e| runtime(name, e))?;
        for (eps, layout, n) in sweep_points(cfg) {
            for &ne in &c.n_elements {
                jobs.push((case, eps, layout, n, ne));
            }
        }
    }
    let results = jobs
        .par_iter()
        .map(|&(case, eps, layout, n, ne)| {
            let points = node_set(layout, n).map_err(|e| runtime(layout.name(), e))?;
            let (spec, ops) = operators(cfg, eps, &points).map_err(|e| runtime(&format!("{case} {layout} n={n}"), e))?;
            let label = format!("{case}_{}_N{ne}", basis_label(&spec, layout));
            let t_end = c.t_end.unwrap_or(case.default_t_end());
            let run = run_linear_case(case, ops, ne, t_end, rule, c.dt_halvings).map_err(|e| runtime(&label, e))?;
            let centres = spec.centres().map_or("none", |cn| cn.kind().name());
            let row = vec![
                case.to_string(),
                spec.family().to_string(),
                spec.kernel_name().to_string(),
                spec.eps().map(fmt_f64).unwrap_or_default(),
                layout.to_string(),
                centres.to_string(),
                n.to_string(),
                ne.to_string(),
                fmt_f64(run.dx),
                fmt_f64(run.norms.l1),
                fmt_f64(run.norms.l2),
                fmt_f64(run.norms.linf),
                fmt_f64(run.t_end),
            ];
            Ok((row, ManifestRun { label, dt: run.dt, steps: run.steps }))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let mut table = CsvTable::new(CONVERGENCE_CSV_HEADER);
    for (row, run) in results {
        table.push(row);
        sink.runs.push(run);
    }
    sink.write("convergence.csv".into(), &table)
}

fn fourier(cfg: &ExperimentConfig, sink: &mut Sink<'_>) -> Result<(), CliError> {
    let f = &cfg.fourier;
    let grid = khat_grid(f.k_count);
    for (eps, layout, n) in sweep_points(cfg) {
        let points = node_set(layout, n).map_err(|e| runtime(layout.name(), e))?;
        let (spec, ops) = operators(cfg, eps, &points).map_err(|e| runtime(&format!("{layout} n={n}"), e))?;
        let label = basis_label(&spec, layout);
        let fc = FourierConfig::new(ops).with_alpha(f.alpha);
        let modes = dispersion_dissipation(&fc, &grid).map_err(|e| runtime(&label, e))?;
        sink.write(format!("dispersion_{label}.csv"), &dispersion_table(&modes))?;
        if !f.times.is_empty() {
            let rows = grid
                .par_iter()
                .map(|&kh| combined_analysis(&fc, kh, &f.times))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| runtime(&label, e))?;
            let flat: Vec<_> = rows.into_iter().flatten().collect();
            sink.write(format!("combined_{label}.csv"), &combined_table(&flat))?;
        }
    }
    if cfg.is_rbf() {
        let builder = |eps: f64, pts: &NodeSet| operators(cfg, Some(eps), pts).map(|(_, ops)| Arc::unwrap_or_clone(ops));
        for layout in cfg.layouts() {
            let rows = max_dissipation_sweep(layout, &cfg.basis.eps, &cfg.basis.n_s, f.alpha, f.k_count, &builder)
                .map_err(|e| runtime(layout.name(), e))?;
            sink.write(format!("max_dissipation_{}_{layout}.csv", cfg.basis.family), &max_dissipation_table(&rows))?;
        }
    }
    Ok(())
}

fn sbp(cfg: &ExperimentConfig, sink: &mut Sink<'_>) -> Result<(), CliError> {
    let eps: Vec<f64> = cfg.eps_values().into_iter().map(|e| e.unwrap_or(f64::NAN)).collect();
    let rbf = cfg.is_rbf();
    let builder = |e: f64, pts: &NodeSet| operators(cfg, rbf.then_some(e), pts).map(|(_, ops)| Arc::unwrap_or_clone(ops));
    let rows = sbp_sweep(&eps, &cfg.basis.n_s, &cfg.layouts(), &builder).map_err(|e| runtime("sbp", e))?;
    sink.write("sbp.csv".into(), &sbp_table(&rows))
}

fn condition(cfg: &ExperimentConfig, sink: &mut Sink<'_>) -> Result<(), CliError> {
    let mut table = CsvTable::new(CONDITION_CSV_HEADER);
    for mode in cfg.condition_modes() {
        for &n in &cfg.basis.n_s {
            let rows = condition_sweep(&cfg.layouts(), n, &cfg.basis.eps, mode).map_err(|e| runtime(&format!("{mode} n={n}"), e))?;
            table.extend(condition_table(&rows));
        }
    }
    sink.write("condition.csv".into(), &table)
}

fn burgers(cfg: &ExperimentConfig, sink: &mut Sink<'_>) -> Result<(), CliError> {
    let ens = cfg.burgers_config();
    for (eps, layout, n) in sweep_points(cfg) {
        let points = node_set(layout, n).map_err(|e| runtime(layout.name(), e))?;
        let (spec, ops) = operators(cfg, eps, &points).map_err(|e| runtime(&format!("{layout} n={n}"), e))?;
        let label = format!("{}_N{}", basis_label(&spec, layout), ens.n_elements);
        let res = run_burgers_ensemble(&ens, ops).map_err(|e| runtime(&label, e))?;
        for ((seed, dt), steps) in res.seeds.iter().zip(&res.dt).zip(&res.steps) {
            sink.runs.push(ManifestRun { label: format!("{label}_seed{seed}"), dt: *dt, steps: *steps });
        }
        sink.write(format!("spectrum_initial_{label}.csv"), &spectrum_table(&res.initial))?;
        sink.write(format!("spectrum_{label}.csv"), &spectrum_table(&res.final_spectrum))?;
    }
    Ok(())
}

/// Paths of the CSVs listed in a manifest.
pub fn output_paths(out: &Path, manifest: &RunManifest) -> Vec<PathBuf> {
    manifest.outputs.iter().map(|f| out.join(f)).collect()
}
