//! Radial basis functions: kernels, the direct alternant route, and a
//! well-conditioned basis spanning the same space as flat Gaussians.

mod conditioning;
mod kernel;
mod stable;

use thiserror::Error;

use crate::element::NodeSet;
use crate::linalg::{condition_number_2, LinalgError, Lu, Matrix};

pub use conditioning::{condition_sweep, condition_table, ConditionMode, ConditionRow, CONDITION_CSV_HEADER};
pub use kernel::Kernel;
pub use stable::StableBasis;

/// Conditioning beyond which the direct route is refused.
pub const ILL_CONDITIONED: f64 = 1e15;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RbfError {
    #[error("unknown kernel '{0}' (expected ga, mq, iq, imq or w13)")]
    UnknownKernel(String),
    #[error("invalid layout: {0}")]
    Layout(String),
    #[error("size mismatch: {0}")]
    SizeMismatch(String),
    #[error("shape parameter must be finite and positive, got {0}")]
    ShapeParameter(f64),
    #[error("ill-conditioned alternant (condition {cond:e}); use the stable Gaussian basis instead")]
    IllConditioned { cond: f64 },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RbfConfig {
    pub kernel: Kernel,
    pub eps: f64,
    pub centres: NodeSet,
}

impl RbfConfig {
    pub fn new(kernel: Kernel, eps: f64, centres: NodeSet) -> Result<Self, RbfError> {
        if kernel != Kernel::W13 && !(eps.is_finite() && eps > 0.0) {
            return Err(RbfError::ShapeParameter(eps));
        }
        Ok(Self { kernel, eps, centres })
    }

    /// Kernel values `φ(|x - c_j|)` for every centre.
    pub fn row(&self, x: f64) -> Vec<f64> {
        self.centres.coords().iter().map(|&c| self.kernel.eval(self.eps, (x - c).abs())).collect()
    }

    /// `d/dx φ(|x - c_j|)` for every centre.
    pub fn deriv_row(&self, x: f64) -> Vec<f64> {
        self.centres.coords().iter().map(|&c| self.kernel.deriv_x(self.eps, x, c)).collect()
    }
}

/// `A[i][j] = φ(|x_i - c_j|)`.
pub fn alternant_matrix(points: &[f64], cfg: &RbfConfig) -> Result<Matrix, RbfError> {
    if points.len() != cfg.centres.len() {
        return Err(RbfError::SizeMismatch(format!("{} points for {} centres", points.len(), cfg.centres.len())));
    }
    let rows: Vec<Vec<f64>> = points.iter().map(|&x| cfg.row(x)).collect();
    Ok(Matrix::from_rows(&rows))
}

/// Coefficients ψ with `Σ_j ψ_j φ(|x_i - c_j|) = values[i]`.
pub fn interpolate_direct(values: &[f64], points: &[f64], cfg: &RbfConfig) -> Result<Vec<f64>, RbfError> {
    if values.len() != points.len() {
        return Err(RbfError::SizeMismatch(format!("{} values for {} points", values.len(), points.len())));
    }
    let a = alternant_matrix(points, cfg)?;
    let lu = checked_lu(&a)?;
    Ok(lu.solve(values))
}

/// LU factors of `a`, refusing matrices past [`ILL_CONDITIONED`].
pub(crate) fn checked_lu(a: &Matrix) -> Result<Lu<f64>, RbfError> {
    let cond = condition_number_2(a)?;
    if cond > ILL_CONDITIONED {
        return Err(RbfError::IllConditioned { cond });
    }
    Ok(Lu::factor(a)?)
}
