use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::element::{node_set, BasisSpec, CorrectionSpace, ElementError, NodeKind, NodeSet, OperatorOptions};
use crate::rbf::{ConditionMode, Kernel, RbfConfig};
use crate::solver::{BurgersEnsembleConfig, DtRule, LinearCase};

/// Subcommands that produce output files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    #[default]
    Convergence,
    Fourier,
    Sbp,
    Condition,
    Burgers,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Convergence => "convergence",
            Command::Fourier => "fourier",
            Command::Sbp => "sbp",
            Command::Condition => "condition",
            Command::Burgers => "burgers",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BasisSection {
    /// `polynomial`, `rbf_direct` or `rbf_ga`.
    pub family: String,
    /// Kernel for `rbf_direct`.
    pub kernel: String,
    pub eps: Vec<f64>,
    pub layouts: Vec<String>,
    /// `same` (centres at the solution points) or a layout name.
    pub centres: String,
    pub n_s: Vec<usize>,
    pub correction: String,
    pub quadrature_order: usize,
}

impl Default for BasisSection {
    fn default() -> Self {
        Self {
            family: "polynomial".into(),
            kernel: "ga".into(),
            eps: Vec::new(),
            layouts: vec!["legendre".into()],
            centres: "same".into(),
            n_s: vec![3],
            correction: "polynomial".into(),
            quadrature_order: OperatorOptions::default().quadrature_order,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConvergenceSection {
    pub cases: Vec<String>,
    pub n_elements: Vec<usize>,
    /// Overrides the per-case default end time.
    pub t_end: Option<f64>,
    pub cfl: f64,
    pub cfl_diffusive: f64,
    /// Extra CFL halvings tried until the L2 error settles to 1%.
    pub dt_halvings: usize,
}

impl Default for ConvergenceSection {
    fn default() -> Self {
        let rule = DtRule::default();
        Self {
            cases: vec!["sine_adv".into()],
            n_elements: vec![8, 16, 32],
            t_end: None,
            cfl: rule.cfl,
            cfl_diffusive: rule.cfl_diffusive,
            dt_halvings: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FourierSection {
    pub alpha: f64,
    pub k_count: usize,
    /// Times for the combined analysis; empty skips it.
    pub times: Vec<f64>,
}

impl Default for FourierSection {
    fn default() -> Self {
        Self { alpha: 1.0, k_count: 256, times: vec![1.0, 2.0] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConditionSection {
    pub modes: Vec<String>,
}

impl Default for ConditionSection {
    fn default() -> Self {
        Self { modes: vec!["direct".into(), "stable".into()] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BurgersSection {
    pub n_elements: usize,
    /// Explicit seeds; when empty, `seed_base + i` for `i < runs`.
    pub seeds: Vec<u64>,
    pub seed_base: u64,
    pub runs: usize,
    pub t_end: f64,
    pub mu: f64,
    pub rho: f64,
    pub k_max: usize,
    pub cfl: f64,
    pub cfl_diffusive: f64,
}

impl Default for BurgersSection {
    fn default() -> Self {
        let d = BurgersEnsembleConfig::default();
        Self {
            n_elements: d.n_elements,
            seeds: Vec::new(),
            seed_base: 0,
            runs: d.seeds.len(),
            t_end: d.t_end,
            mu: d.mu,
            rho: d.rho,
            k_max: d.k_max,
            cfl: d.dt_rule.cfl,
            cfl_diffusive: d.dt_rule.cfl_diffusive,
        }
    }
}

/// Everything a run needs. Read from TOML; every key has a default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub command: Command,
    pub basis: BasisSection,
    pub convergence: ConvergenceSection,
    pub fourier: FourierSection,
    pub condition: ConditionSection,
    pub burgers: BurgersSection,
}

/// One validation failure, tied to a dotted config key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub field: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

const FAMILIES: [&str; 3] = ["polynomial", "rbf_direct", "rbf_ga"];
const N_RANGE: (usize, usize) = (2, 10);

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn is_rbf(&self) -> bool {
        self.basis.family != "polynomial"
    }

    /// Every problem with the config, in key order. Sections not used by
    /// `self.command` are not checked.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        let mut diag = |field: &str, message: String| out.push(Diagnostic { field: field.into(), message });
        let b = &self.basis;

        if !FAMILIES.contains(&b.family.as_str()) {
            diag("basis.family", format!("unknown family '{}' (expected one of {})", b.family, FAMILIES.join(", ")));
        }
        if b.family == "rbf_direct" && b.kernel.parse::<Kernel>().is_err() {
            diag("basis.kernel", format!("unknown kernel '{}'", b.kernel));
        }
        let needs_eps = self.is_rbf() || self.command == Command::Condition;
        if needs_eps && b.eps.is_empty() {
            diag("basis.eps", format!("required for {}", if self.is_rbf() { b.family.as_str() } else { "condition" }));
        }
        for e in &b.eps {
            if !(e.is_finite() && *e > 0.0) {
                diag("basis.eps", format!("{e} is not a positive finite shape parameter"));
            }
        }
        if b.layouts.is_empty() {
            diag("basis.layouts", "must not be empty".into());
        }
        for l in &b.layouts {
            if l.parse::<NodeKind>().is_err() {
                diag("basis.layouts", format!("unknown layout '{l}'"));
            }
        }
        if b.centres != "same" && b.centres.parse::<NodeKind>().is_err() {
            diag("basis.centres", format!("unknown centre layout '{}' (expected same or a layout name)", b.centres));
        }
        if b.n_s.is_empty() {
            diag("basis.n_s", "must not be empty".into());
        }
        for &n in &b.n_s {
            if !(N_RANGE.0..=N_RANGE.1).contains(&n) {
                diag("basis.n_s", format!("{n} outside [{}, {}]", N_RANGE.0, N_RANGE.1));
            }
        }
        if b.correction.parse::<CorrectionSpace>().is_err() {
            diag("basis.correction", format!("unknown correction space '{}'", b.correction));
        }
        let max_n = b.n_s.iter().copied().max().unwrap_or(0);
        if b.quadrature_order < 2 * max_n || b.quadrature_order > 200 {
            diag("basis.quadrature_order", format!("{} outside [{}, 200]", b.quadrature_order, 2 * max_n));
        }

        match self.command {
            Command::Convergence => {
                let c = &self.convergence;
                if c.cases.is_empty() {
                    diag("convergence.cases", "must not be empty".into());
                }
                for name in &c.cases {
                    if name.parse::<LinearCase>().is_err() {
                        diag("convergence.cases", format!("unknown case '{name}'"));
                    }
                }
                if c.n_elements.is_empty() {
                    diag("convergence.n_elements", "must not be empty".into());
                }
                for &n in &c.n_elements {
                    if n < 2 {
                        diag("convergence.n_elements", format!("{n} is below 2"));
                    }
                }
                if let Some(t) = c.t_end {
                    if !(t.is_finite() && t >= 0.0) {
                        diag("convergence.t_end", format!("{t} is not a non-negative time"));
                    }
                }
                check_cfl(&mut diag, "convergence", c.cfl, c.cfl_diffusive);
            }
            Command::Fourier => {
                let f = &self.fourier;
                if !(0.0..=1.0).contains(&f.alpha) {
                    diag("fourier.alpha", format!("{} outside [0, 1]", f.alpha));
                }
                if f.k_count == 0 {
                    diag("fourier.k_count", "must be positive".into());
                }
                for t in &f.times {
                    if !(t.is_finite() && *t >= 0.0) {
                        diag("fourier.times", format!("{t} is not a non-negative time"));
                    }
                }
            }
            Command::Sbp => {}
            Command::Condition => {
                let c = &self.condition;
                if c.modes.is_empty() {
                    diag("condition.modes", "must not be empty".into());
                }
                for m in &c.modes {
                    if parse_mode(m).is_none() {
                        diag("condition.modes", format!("unknown mode '{m}' (expected direct or stable)"));
                    }
                }
            }
            Command::Burgers => {
                let g = &self.burgers;
                if g.n_elements < 2 {
                    diag("burgers.n_elements", format!("{} is below 2", g.n_elements));
                }
                if g.seeds.is_empty() && g.runs == 0 {
                    diag("burgers.runs", "must be positive when no seeds are listed".into());
                }
                let too_big = g.seeds.iter().any(|&s| s > u64::from(u32::MAX))
                    || (g.seeds.is_empty() && g.runs > 0 && g.seed_base + g.runs as u64 - 1 > u64::from(u32::MAX));
                if too_big {
                    diag("burgers.seeds", format!("seeds must not exceed {}", u32::MAX));
                }
                if !(g.t_end.is_finite() && g.t_end >= 0.0) {
                    diag("burgers.t_end", format!("{} is not a non-negative time", g.t_end));
                }
                if !(g.mu.is_finite() && g.mu >= 0.0) {
                    diag("burgers.mu", format!("{} is negative or not finite", g.mu));
                }
                if !(g.rho.is_finite() && g.rho > 0.0) {
                    diag("burgers.rho", format!("{} is not positive", g.rho));
                }
                check_cfl(&mut diag, "burgers", g.cfl, g.cfl_diffusive);
            }
        }
        out
    }

    pub fn layouts(&self) -> Vec<NodeKind> {
        self.basis.layouts.iter().filter_map(|l| l.parse().ok()).collect()
    }

    /// Shape parameters to sweep; a single `None` for polynomials.
    pub fn eps_values(&self) -> Vec<Option<f64>> {
        if self.is_rbf() {
            self.basis.eps.iter().copied().map(Some).collect()
        } else {
            vec![None]
        }
    }

    pub fn operator_options(&self) -> OperatorOptions {
        OperatorOptions {
            quadrature_order: self.basis.quadrature_order,
            correction: self.basis.correction.parse().unwrap_or(CorrectionSpace::Polynomial),
        }
    }

    /// Basis for one sweep point. `eps` is ignored for polynomials.
    pub fn basis_spec(&self, eps: Option<f64>, points: &NodeSet) -> Result<BasisSpec, ElementError> {
        let centres = || -> Result<NodeSet, ElementError> {
            if self.basis.centres == "same" {
                Ok(points.clone())
            } else {
                node_set(self.basis.centres.parse()?, points.len())
            }
        };
        let eps = eps.unwrap_or(f64::NAN);
        match self.basis.family.as_str() {
            "rbf_direct" => {
                let kernel: Kernel = self.basis.kernel.parse()?;
                Ok(BasisSpec::rbf_direct(points.clone(), RbfConfig::new(kernel, eps, centres()?)?))
            }
            "rbf_ga" => Ok(BasisSpec::rbf_ga(points.clone(), centres()?, eps)),
            _ => Ok(BasisSpec::polynomial(points.clone())),
        }
    }

    pub fn condition_modes(&self) -> Vec<ConditionMode> {
        self.condition.modes.iter().filter_map(|m| parse_mode(m)).collect()
    }

    pub fn seeds(&self) -> Vec<u32> {
        let g = &self.burgers;
        let raw: Vec<u64> = if g.seeds.is_empty() { (0..g.runs as u64).map(|i| g.seed_base + i).collect() } else { g.seeds.clone() };
        raw.into_iter().filter_map(|s| u32::try_from(s).ok()).collect()
    }

    pub fn burgers_config(&self) -> BurgersEnsembleConfig {
        let g = &self.burgers;
        BurgersEnsembleConfig {
            rho: g.rho,
            k_max: g.k_max,
            seeds: self.seeds(),
            t_end: g.t_end,
            mu: g.mu,
            n_elements: g.n_elements,
            dt_rule: DtRule { cfl: g.cfl, cfl_diffusive: g.cfl_diffusive },
        }
    }
}

fn check_cfl(diag: &mut impl FnMut(&str, String), section: &str, cfl: f64, cfl_d: f64) {
    if !(cfl.is_finite() && cfl > 0.0) {
        diag(&format!("{section}.cfl"), format!("{cfl} is not positive"));
    }
    if !(cfl_d.is_finite() && cfl_d > 0.0) {
        diag(&format!("{section}.cfl_diffusive"), format!("{cfl_d} is not positive"));
    }
}

fn parse_mode(s: &str) -> Option<ConditionMode> {
    match s {
        "direct" => Some(ConditionMode::Direct),
        "stable" => Some(ConditionMode::Stable),
        _ => None,
    }
}

/// Applies `key=value` overrides to TOML text. `key` is a dotted path;
/// `value` is parsed as a TOML value, or taken as a string if that fails.
pub fn apply_overrides(text: &str, overrides: &[String]) -> Result<String, Diagnostic> {
    let mut doc: toml::Table = text.parse().map_err(|e: toml::de::Error| Diagnostic { field: "config".into(), message: e.to_string() })?;
    for item in overrides {
        let (key, raw) = item
            .split_once('=')
            .ok_or_else(|| Diagnostic { field: item.clone(), message: "override must look like key=value".into() })?;
        let (key, raw) = (key.trim(), raw.trim());
        let value = parse_value(raw);
        let mut parts: Vec<&str> = key.split('.').collect();
        let last = parts.pop().filter(|s| !s.is_empty()).ok_or_else(|| Diagnostic { field: key.into(), message: "empty key".into() })?;
        let mut table = &mut doc;
        for p in parts {
            let entry = table.entry(p.to_string()).or_insert_with(|| toml::Value::Table(toml::Table::new()));
            table = entry
                .as_table_mut()
                .ok_or_else(|| Diagnostic { field: key.into(), message: format!("'{p}' is not a table") })?;
        }
        table.insert(last.to_string(), value);
    }
    Ok(toml::to_string(&doc).expect("table serializes"))
}

fn parse_value(raw: &str) -> toml::Value {
    #[derive(Deserialize)]
    struct Wrap {
        v: toml::Value,
    }
    toml::from_str::<Wrap>(&format!("v = {raw}")).map(|w| w.v).unwrap_or_else(|_| toml::Value::String(raw.to_string()))
}

impl FromStr for Command {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [Command::Convergence, Command::Fourier, Command::Sbp, Command::Condition, Command::Burgers]
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown command '{s}'"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        for cmd in ["convergence", "fourier", "sbp", "burgers"] {
            let cfg = ExperimentConfig { command: cmd.parse().unwrap(), ..Default::default() };
            assert!(cfg.validate().is_empty(), "{cmd}: {:?}", cfg.validate());
        }
    }

    #[test]
    fn rbf_without_eps_names_the_field() {
        let cfg = ExperimentConfig::from_toml("[basis]\nfamily = \"rbf_ga\"\n").unwrap();
        let d = cfg.validate();
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].field, "basis.eps");
    }

    #[test]
    fn single_point_is_out_of_range() {
        let cfg = ExperimentConfig::from_toml("[basis]\nn_s = [1]\n").unwrap();
        let d = cfg.validate();
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].field, "basis.n_s");
    }

    #[test]
    fn every_violation_is_listed() {
        let cfg = ExperimentConfig::from_toml("[basis]\nn_s = []\nlayouts = [\"grid\"]\n[convergence]\nn_elements = []\n").unwrap();
        let fields: Vec<_> = cfg.validate().into_iter().map(|d| d.field).collect();
        assert_eq!(fields, ["basis.layouts", "basis.n_s", "convergence.n_elements"]);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(ExperimentConfig::from_toml("[basis]\nepsilon = [0.1]\n").is_err());
    }

    #[test]
    fn overrides_replace_and_create_keys() {
        let text = apply_overrides("[basis]\nn_s = [3]\n", &["basis.n_s=[4, 5]".into(), "basis.family=rbf_ga".into(), "command=\"sbp\"".into()]).unwrap();
        let cfg = ExperimentConfig::from_toml(&text).unwrap();
        assert_eq!(cfg.basis.n_s, vec![4, 5]);
        assert_eq!(cfg.basis.family, "rbf_ga");
        assert_eq!(cfg.command, Command::Sbp);
        assert!(apply_overrides("", &["novalue".into()]).is_err());
    }

    #[test]
    fn toml_round_trip() {
        let mut cfg = ExperimentConfig::default();
        cfg.basis.eps = vec![0.1, 0.5];
        cfg.convergence.t_end = Some(1.5);
        assert_eq!(ExperimentConfig::from_toml(&cfg.to_toml()).unwrap(), cfg);
    }

    #[test]
    fn seeds_from_base() {
        let mut cfg = ExperimentConfig::default();
        cfg.burgers.seed_base = 10;
        cfg.burgers.runs = 3;
        assert_eq!(cfg.seeds(), vec![10, 11, 12]);
        cfg.burgers.seeds = vec![5, 1];
        assert_eq!(cfg.seeds(), vec![5, 1]);
    }
}
