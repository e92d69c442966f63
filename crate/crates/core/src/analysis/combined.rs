use crate::element::ElementOperators;
use crate::io::{fmt_f64, CsvTable};
use crate::linalg::{eig_complex, CMatrix, Complex64, Lu};

use super::fourier::assemble_q;
use super::{AnalysisError, FourierConfig};

pub const COMBINED_CSV_HEADER: &str = "k_hat,t,G,dphi";

/// Eigenbases worse conditioned than this cannot be inverted reliably.
const DEFECTIVE_COND: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CombinedResult {
    pub k_hat: f64,
    pub t: f64,
    /// `‖ũ(t)‖ / ‖u(t)‖` in L² over the reference element.
    pub g: f64,
    /// `∠ ∫ u(t) conj(ũ(t)) dx̂`, wrapped to `(-π, π]`. Positive when the
    /// discrete wave runs ahead of the exact one.
    pub dphi: f64,
}

/// Evolves the nodal Bloch wave `exp(ik(h/2)(x̂+1))` exactly in time under
/// the semi-discrete operator, `ũ(t) = W e^{tΛ} W⁻¹ ũ(0)`, and compares it
/// with the exact advected wave `e^{-ikt} u(0)`.
pub fn combined_analysis(cfg: &FourierConfig, k_hat: f64, times: &[f64]) -> Result<Vec<CombinedResult>, AnalysisError> {
    cfg.validate()?;
    let k = cfg.wavenumber(k_hat);
    combined_for_operator(cfg, &assemble_q(cfg, k), k_hat, times)
}

/// As [`combined_analysis`] with a caller-supplied operator `Q`.
pub fn combined_for_operator(
    cfg: &FourierConfig,
    q: &CMatrix,
    k_hat: f64,
    times: &[f64],
) -> Result<Vec<CombinedResult>, AnalysisError> {
    let k = cfg.wavenumber(k_hat);
    let u0 = cfg.bloch_vector(k);
    let eig = eig_complex(q)?;
    if !(eig.vectors_cond <= DEFECTIVE_COND) {
        return Err(AnalysisError::DefectiveModes { k_hat, cond: eig.vectors_cond });
    }
    let beta = Lu::factor(&eig.vectors)?.solve(&u0);
    let ops = &cfg.ops;
    let exact_at_quad = reconstruct(ops, &u0);
    times
        .iter()
        .map(|&t| {
            let approx = if t == 0.0 {
                u0.clone()
            } else {
                let scaled: Vec<Complex64> = beta.iter().zip(&eig.values).map(|(b, l)| b * (l * t).exp()).collect();
                eig.vectors.mul_vec(&scaled)
            };
            let a = reconstruct(ops, &approx);
            let shift = Complex64::from_polar(1.0, -k * t);
            let (mut na, mut nb, mut cross) = (0.0, 0.0, Complex64::new(0.0, 0.0));
            for ((w, ua), ub) in ops.quad_weights.iter().zip(&a).zip(&exact_at_quad) {
                let ub = ub * shift;
                na += w * ua.norm_sqr();
                nb += w * ub.norm_sqr();
                cross += ub * ua.conj() * *w;
            }
            let dphi = if t == 0.0 { 0.0 } else { cross.arg() };
            Ok(CombinedResult { k_hat, t, g: (na / nb).sqrt(), dphi })
        })
        .collect()
}

/// Nodal values to values at the quadrature nodes through the scheme's basis.
fn reconstruct(ops: &ElementOperators, u: &[Complex64]) -> Vec<Complex64> {
    let v = &ops.quad_values;
    (0..v.rows()).map(|q| v.row(q).iter().zip(u).map(|(t, x)| x * *t).sum()).collect()
}

pub fn combined_table(rows: &[CombinedResult]) -> CsvTable {
    let mut t = CsvTable::new(COMBINED_CSV_HEADER);
    for r in rows {
        t.push(vec![fmt_f64(r.k_hat), fmt_f64(r.t), fmt_f64(r.g), fmt_f64(r.dphi)]);
    }
    t
}
