use rayon::prelude::*;

use crate::element::{node_set, ElementOperators, NodeKind};
use crate::io::{fmt_f64, CsvTable};
use crate::linalg::{invert, norm2, singular_values};

use super::{AnalysisError, OpsBuilder};

pub const SBP_CSV_HEADER: &str = "eps,n_s,layout,cons_err,stab_err";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SbpReport {
    /// `‖1ᵀMC − 1ᵀPᵀB‖₂`.
    pub conservation_error: f64,
    /// `‖M⁻¹PᵀB − C‖₂` (largest singular value).
    pub stability_error: f64,
}

pub fn sbp_report(ops: &ElementOperators) -> Result<SbpReport, AnalysisError> {
    let n = ops.n;
    let ptb = ops.p.transpose().matmul(&ops.b);
    let mc = ops.m.matmul(&ops.c);
    let cons: Vec<f64> = (0..2).map(|f| (0..n).map(|i| mc[(i, f)] - ptb[(i, f)]).sum()).collect();
    let stab = invert(&ops.m)?.matmul(&ptb).sub(&ops.c);
    let stability_error = singular_values(&stab).first().copied().unwrap_or(0.0);
    Ok(SbpReport { conservation_error: norm2(&cons), stability_error })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SbpRow {
    pub eps: f64,
    pub n_s: usize,
    pub layout: NodeKind,
    pub report: SbpReport,
}

/// SBP errors per `(ε, n_s, layout)`, in that nesting order.
pub fn sbp_sweep(
    eps_grid: &[f64],
    n_list: &[usize],
    layouts: &[NodeKind],
    builder: &OpsBuilder<'_>,
) -> Result<Vec<SbpRow>, AnalysisError> {
    let mut cases = Vec::new();
    for &eps in eps_grid {
        for &n_s in n_list {
            for &layout in layouts {
                cases.push((eps, n_s, layout));
            }
        }
    }
    cases
        .par_iter()
        .map(|&(eps, n_s, layout)| {
            let ops = builder(eps, &node_set(layout, n_s)?)?;
            Ok(SbpRow { eps, n_s, layout, report: sbp_report(&ops)? })
        })
        .collect()
}

pub fn sbp_table(rows: &[SbpRow]) -> CsvTable {
    let mut t = CsvTable::new(SBP_CSV_HEADER);
    for r in rows {
        t.push(vec![
            fmt_f64(r.eps),
            r.n_s.to_string(),
            r.layout.to_string(),
            fmt_f64(r.report.conservation_error),
            fmt_f64(r.report.stability_error),
        ]);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::element::build_operators;
    use crate::element::{BasisSpec, NodeSet};

    fn ga(eps: f64, pts: &NodeSet) -> Result<ElementOperators, crate::element::ElementError> {
        build_operators(&BasisSpec::rbf_ga(pts.clone(), pts.clone(), eps))
    }

    #[test]
    fn polynomial_operators_satisfy_both_identities() {
        for kind in NodeKind::ALL {
            for n in 2..=5 {
                let ops = build_operators(&BasisSpec::polynomial(node_set(kind, n).unwrap())).unwrap();
                let r = sbp_report(&ops).unwrap();
                assert!(r.conservation_error <= 1e-12 && r.stability_error <= 1e-12, "{kind} {n}: {r:?}");
            }
        }
    }

    #[test]
    fn ga_errors_shrink_with_eps() {
        let eps = [1.0, 0.5, 0.25, 0.1, 0.05];
        let rows = sbp_sweep(&eps, &[4], &[NodeKind::Legendre], &ga).unwrap();
        for w in rows.windows(2) {
            assert!(w[1].report.conservation_error < w[0].report.conservation_error, "{w:?}");
            assert!(w[1].report.stability_error < w[0].report.stability_error, "{w:?}");
        }
    }

    #[test]
    fn sweep_order_and_table() {
        let rows = sbp_sweep(&[0.5], &[2, 3], &[NodeKind::Lobatto, NodeKind::Chebyshev], &ga).unwrap();
        let t = sbp_table(&rows);
        let keys: Vec<_> = t.rows().iter().map(|r| (r[1].clone(), r[2].clone())).collect();
        assert_eq!(keys[0], ("2".into(), "lobatto".into()));
        assert_eq!(keys[3], ("3".into(), "chebyshev".into()));
    }
}
