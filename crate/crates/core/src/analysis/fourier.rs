use std::sync::Arc;

use rayon::prelude::*;

use crate::element::{node_set, ElementOperators, NodeKind};
use crate::io::{fmt_f64, CsvTable};
use crate::linalg::{eig_complex, CMatrix, Complex64, Matrix};

use super::{AnalysisError, OpsBuilder};

pub const DISPERSION_CSV_HEADER: &str = "k_hat,mode,re_c,im_c,is_physical";
pub const MAX_DISSIPATION_CSV_HEADER: &str = "eps,n_s,diss_max";

/// Overlaps closer than this are treated as ties.
const OVERLAP_TIE: f64 = 1e-9;

/// Bloch-wave setup for one element type.
///
/// Wavenumbers are reported as `k̂ = k h / n_s`, so `k̂ ∈ (0, π]` spans one
/// wave per solution point.
#[derive(Debug, Clone)]
pub struct FourierConfig {
    pub ops: Arc<ElementOperators>,
    /// Interface upwinding: 1 is full upwind, 0 is central.
    pub alpha: f64,
    pub h: f64,
}

impl FourierConfig {
    pub fn new(ops: Arc<ElementOperators>) -> Self {
        Self { ops, alpha: 1.0, h: 2.0 }
    }

    pub fn with_alpha(self, alpha: f64) -> Self {
        Self { alpha, ..self }
    }

    pub fn validate(&self) -> Result<(), AnalysisError> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(AnalysisError::Config(format!("alpha must lie in [0, 1], got {}", self.alpha)));
        }
        if !(self.h > 0.0 && self.h.is_finite()) {
            return Err(AnalysisError::Config(format!("h must be positive, got {}", self.h)));
        }
        Ok(())
    }

    /// Physical wavenumber `k = k̂ n_s / h`.
    pub fn wavenumber(&self, k_hat: f64) -> f64 {
        k_hat * self.ops.n as f64 / self.h
    }

    /// `exp(i k (h/2)(x̂_s + 1))` at the solution points.
    pub fn bloch_vector(&self, k: f64) -> Vec<Complex64> {
        self.ops.points.iter().map(|&x| Complex64::from_polar(1.0, k * 0.5 * self.h * (x + 1.0))).collect()
    }
}

/// `count` points uniform on `(0, π]`.
pub fn khat_grid(count: usize) -> Vec<f64> {
    (1..=count).map(|i| std::f64::consts::PI * i as f64 / count as f64).collect()
}

fn lift(ops: &ElementOperators, k: [[f64; 2]; 2]) -> Matrix {
    let n = ops.n;
    Matrix::from_fn(n, n, |i, j| {
        let mut s = 0.0;
        for a in 0..2 {
            for b in 0..2 {
                s += ops.c[(i, a)] * k[a][b] * ops.p[(b, j)];
            }
        }
        s
    })
}

/// Semi-discrete operator `Q(k)` with `du/dt = Q u` for a Bloch wave of
/// wavenumber `k` under `u_t + u_x = 0`.
///
/// The left face of an element couples to the right trace of its left
/// neighbour (phase `e^{-ikh}`) with weight `α`; the right face couples to
/// the left trace of its right neighbour (phase `e^{ikh}`) with weight `1-α`.
pub fn assemble_q(cfg: &FourierConfig, k: f64) -> CMatrix {
    let ops = &cfg.ops;
    let a = cfg.alpha;
    let c_left = lift(ops, [[0.0, a], [0.0, 0.0]]);
    let c_mid = ops.d.add(&lift(ops, [[-a, 0.0], [0.0, -(1.0 - a)]]));
    let c_right = lift(ops, [[0.0, 0.0], [1.0 - a, 0.0]]);
    let back = Complex64::from_polar(1.0, -k * cfg.h);
    let fwd = Complex64::from_polar(1.0, k * cfg.h);
    let scale = -2.0 / cfg.h;
    CMatrix::from_fn(ops.n, ops.n, |i, j| {
        (back * c_left[(i, j)] + c_mid[(i, j)] + fwd * c_right[(i, j)]) * scale
    })
}

/// Modes at one wavenumber.
#[derive(Debug, Clone)]
pub struct ModalResult {
    pub k_hat: f64,
    /// Eigenvalues `ω'` of `iQ`.
    pub omega: Vec<Complex64>,
    /// `ĉ' = ω' h / n_s`, so a consistent scheme has `ĉ' → k̂`.
    pub c_hat: Vec<Complex64>,
    pub physical: usize,
}

impl ModalResult {
    pub fn physical_c_hat(&self) -> Complex64 {
        self.c_hat[self.physical]
    }
}

fn modes_at(cfg: &FourierConfig, k_hat: f64) -> Result<ModalResult, AnalysisError> {
    let k = cfg.wavenumber(k_hat);
    let iq = assemble_q(cfg, k).scale(Complex64::i());
    let eig = eig_complex(&iq)?;
    let v = cfg.bloch_vector(k);
    let vnorm = crate::linalg::norm2(&v);
    let n = cfg.ops.n;
    let overlap = |m: usize| -> f64 {
        let w = eig.vectors.column(m);
        let dot: Complex64 = w.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
        dot.norm() / (crate::linalg::norm2(&w) * vnorm)
    };
    let mut physical = 0;
    let mut best = overlap(0);
    for m in 1..n {
        let o = overlap(m);
        let tie = (o - best).abs() <= OVERLAP_TIE;
        if (!tie && o > best) || (tie && eig.values[m].im.abs() < eig.values[physical].im.abs()) {
            physical = m;
            best = best.max(o);
        }
    }
    let factor = cfg.h / n as f64;
    let c_hat = eig.values.iter().map(|w| w * factor).collect();
    Ok(ModalResult { k_hat, omega: eig.values, c_hat, physical })
}

/// Eigen-analysis of `iQ` at each `k̂`, in grid order.
pub fn dispersion_dissipation(cfg: &FourierConfig, k_hats: &[f64]) -> Result<Vec<ModalResult>, AnalysisError> {
    cfg.validate()?;
    k_hats.par_iter().map(|&kh| modes_at(cfg, kh)).collect()
}

pub fn dispersion_table(results: &[ModalResult]) -> CsvTable {
    let mut t = CsvTable::new(DISPERSION_CSV_HEADER);
    for r in results {
        for (m, c) in r.c_hat.iter().enumerate() {
            t.push(vec![
                fmt_f64(r.k_hat),
                m.to_string(),
                fmt_f64(c.re),
                fmt_f64(c.im),
                u8::from(m == r.physical).to_string(),
            ]);
        }
    }
    t
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DissipationRow {
    pub eps: f64,
    pub n_s: usize,
    /// Largest physical-mode `Im(ĉ')` over the grid.
    pub diss_max: f64,
}

/// Maximum physical-mode dissipation per `(ε, n_s)`, ε-major.
pub fn max_dissipation_sweep(
    layout: NodeKind,
    eps_grid: &[f64],
    n_list: &[usize],
    alpha: f64,
    k_count: usize,
    builder: &OpsBuilder<'_>,
) -> Result<Vec<DissipationRow>, AnalysisError> {
    let grid = khat_grid(k_count);
    let pairs: Vec<(f64, usize)> = eps_grid.iter().flat_map(|&e| n_list.iter().map(move |&n| (e, n))).collect();
    pairs
        .par_iter()
        .map(|&(eps, n_s)| {
            let ops = builder(eps, &node_set(layout, n_s)?)?;
            let cfg = FourierConfig::new(Arc::new(ops)).with_alpha(alpha);
            let modes = dispersion_dissipation(&cfg, &grid)?;
            let diss_max = modes.iter().map(|m| m.physical_c_hat().im).fold(f64::NEG_INFINITY, f64::max);
            Ok(DissipationRow { eps, n_s, diss_max })
        })
        .collect()
}

pub fn max_dissipation_table(rows: &[DissipationRow]) -> CsvTable {
    let mut t = CsvTable::new(MAX_DISSIPATION_CSV_HEADER);
    for r in rows {
        t.push(vec![fmt_f64(r.eps), r.n_s.to_string(), fmt_f64(r.diss_max)]);
    }
    t
}
