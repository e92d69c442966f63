use std::fmt;

use crate::element::{node_set, NodeKind};
use crate::io::{fmt_f64, CsvTable};
use crate::linalg::condition_number_2;

use super::{alternant_matrix, Kernel, RbfConfig, RbfError, StableBasis};

pub const CONDITION_CSV_HEADER: &str = "eps,layout,n,mode,cond";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConditionMode {
    /// Gaussian alternant matrix.
    Direct,
    /// Evaluation matrix of the stable basis.
    Stable,
}

impl fmt::Display for ConditionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConditionMode::Direct => "direct",
            ConditionMode::Stable => "stable",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionRow {
    pub eps: f64,
    pub layout: NodeKind,
    pub n: usize,
    pub mode: ConditionMode,
    pub cond: f64,
}

impl ConditionRow {
    pub fn cells(&self) -> Vec<String> {
        vec![fmt_f64(self.eps), self.layout.to_string(), self.n.to_string(), self.mode.to_string(), fmt_f64(self.cond)]
    }
}

/// Condition numbers of the Gaussian interpolation matrix at the solution
/// points (centres coincide with points), per layout and ε.
pub fn condition_sweep(layouts: &[NodeKind], n: usize, eps_grid: &[f64], mode: ConditionMode) -> Result<Vec<ConditionRow>, RbfError> {
    let mut rows = Vec::with_capacity(layouts.len() * eps_grid.len());
    for &layout in layouts {
        let pts = node_set(layout, n).map_err(|e| RbfError::Layout(e.to_string()))?;
        for &eps in eps_grid {
            let matrix = match mode {
                ConditionMode::Direct => alternant_matrix(pts.coords(), &RbfConfig::new(Kernel::Ga, eps, pts.clone())?)?,
                ConditionMode::Stable => StableBasis::new(&pts, eps)?.evaluation_matrix(pts.coords()),
            };
            rows.push(ConditionRow { eps, layout, n, mode, cond: condition_number_2(&matrix)? });
        }
    }
    Ok(rows)
}

pub fn condition_table(rows: &[ConditionRow]) -> CsvTable {
    let mut t = CsvTable::new(CONDITION_CSV_HEADER);
    for r in rows {
        t.push(r.cells());
    }
    t
}
