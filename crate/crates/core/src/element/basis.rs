use crate::linalg::{Lu, Matrix};
use crate::rbf::{checked_lu, RbfConfig, StableBasis};

use super::{ElementError, NodeSet};

#[derive(Debug, Clone, PartialEq)]
pub enum BasisVariant {
    /// Lagrange polynomials through the solution points.
    Polynomial,
    /// Cardinal functions of a kernel basis, via the alternant matrix.
    RbfDirect(RbfConfig),
    /// Cardinal functions of the Gaussian span, via [`StableBasis`].
    RbfGa { centres: NodeSet, eps: f64 },
}

/// Approximation space of one element: a variant plus its solution points.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisSpec {
    pub variant: BasisVariant,
    pub points: NodeSet,
}

impl BasisSpec {
    pub fn polynomial(points: NodeSet) -> Self {
        Self { variant: BasisVariant::Polynomial, points }
    }

    pub fn rbf_direct(points: NodeSet, cfg: RbfConfig) -> Self {
        Self { variant: BasisVariant::RbfDirect(cfg), points }
    }

    pub fn rbf_ga(points: NodeSet, centres: NodeSet, eps: f64) -> Self {
        Self { variant: BasisVariant::RbfGa { centres, eps }, points }
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    /// `polynomial`, `rbf_direct` or `rbf_ga`.
    pub fn family(&self) -> &'static str {
        match self.variant {
            BasisVariant::Polynomial => "polynomial",
            BasisVariant::RbfDirect(_) => "rbf_direct",
            BasisVariant::RbfGa { .. } => "rbf_ga",
        }
    }

    /// Kernel name; Gaussian for the stable variant, `none` for polynomials.
    pub fn kernel_name(&self) -> &'static str {
        match &self.variant {
            BasisVariant::Polynomial => "none",
            BasisVariant::RbfDirect(cfg) => cfg.kernel.name(),
            BasisVariant::RbfGa { .. } => "ga",
        }
    }

    pub fn eps(&self) -> Option<f64> {
        match &self.variant {
            BasisVariant::Polynomial => None,
            BasisVariant::RbfDirect(cfg) => Some(cfg.eps),
            BasisVariant::RbfGa { eps, .. } => Some(*eps),
        }
    }

    pub fn centres(&self) -> Option<&NodeSet> {
        match &self.variant {
            BasisVariant::Polynomial => None,
            BasisVariant::RbfDirect(cfg) => Some(&cfg.centres),
            BasisVariant::RbfGa { centres, .. } => Some(centres),
        }
    }

    pub fn validate(&self) -> Result<(), ElementError> {
        if let Some(c) = self.centres() {
            if c.len() != self.n() {
                return Err(ElementError::CentreCount { points: self.n(), centres: c.len() });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
enum Repr {
    /// `denom[k] = Π_{i≠k} (x_k - x_i)`.
    Polynomial { denom: Vec<f64> },
    Direct { cfg: RbfConfig, lu_t: Lu<f64> },
    Stable { basis: StableBasis, lu_t: Lu<f64> },
}

/// Cardinal basis `θ_k` with `θ_k(x_j) = δ_kj` at the solution points.
///
/// For the kernel variants `θ(x) = A⁻ᵀ φ(x)`, where `A[i][j]` is the j-th
/// underlying function at solution point `i`.
#[derive(Debug, Clone)]
pub struct NodalBasis {
    points: Vec<f64>,
    repr: Repr,
}

impl NodalBasis {
    pub fn new(spec: &BasisSpec) -> Result<Self, ElementError> {
        spec.validate()?;
        let points = spec.points.coords().to_vec();
        let repr = match &spec.variant {
            BasisVariant::Polynomial => Repr::Polynomial {
                denom: (0..points.len())
                    .map(|k| (0..points.len()).filter(|&i| i != k).map(|i| points[k] - points[i]).product())
                    .collect(),
            },
            BasisVariant::RbfDirect(cfg) => {
                let a = crate::rbf::alternant_matrix(&points, cfg)?;
                Repr::Direct { cfg: cfg.clone(), lu_t: checked_lu(&a.transpose())? }
            }
            BasisVariant::RbfGa { centres, eps } => {
                let basis = StableBasis::new(centres, *eps)?;
                let e = basis.evaluation_matrix(&points);
                Repr::Stable { basis, lu_t: checked_lu(&e.transpose())? }
            }
        };
        Ok(Self { points, repr })
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// `θ_k(x)` for every `k`.
    pub fn values(&self, x: f64) -> Vec<f64> {
        match &self.repr {
            Repr::Polynomial { denom } => {
                let n = self.n();
                (0..n)
                    .map(|k| (0..n).filter(|&i| i != k).map(|i| x - self.points[i]).product::<f64>() / denom[k])
                    .collect()
            }
            Repr::Direct { cfg, lu_t } => lu_t.solve(&cfg.row(x)),
            Repr::Stable { basis, lu_t } => lu_t.solve(&basis.eval(x)),
        }
    }

    /// `θ_k'(x)` for every `k`.
    pub fn derivs(&self, x: f64) -> Vec<f64> {
        match &self.repr {
            Repr::Polynomial { denom } => {
                let n = self.n();
                (0..n)
                    .map(|k| {
                        let mut acc = 0.0;
                        for l in (0..n).filter(|&l| l != k) {
                            acc += (0..n).filter(|&i| i != k && i != l).map(|i| x - self.points[i]).product::<f64>();
                        }
                        acc / denom[k]
                    })
                    .collect()
            }
            Repr::Direct { cfg, lu_t } => lu_t.solve(&cfg.deriv_row(x)),
            Repr::Stable { basis, lu_t } => lu_t.solve(&basis.deriv(x)),
        }
    }

    /// `(V, V')` with `V[k][i] = θ_i(x_k)`.
    pub fn matrices(&self, eval_points: &[f64]) -> (Matrix, Matrix) {
        let v: Vec<Vec<f64>> = eval_points.iter().map(|&x| self.values(x)).collect();
        let dv: Vec<Vec<f64>> = eval_points.iter().map(|&x| self.derivs(x)).collect();
        (Matrix::from_rows(&v), Matrix::from_rows(&dv))
    }

    /// Interpolant `Σ_k u_k θ_k(x)`.
    pub fn interpolate(&self, u: &[f64], x: f64) -> f64 {
        self.values(x).iter().zip(u).map(|(t, u)| t * u).sum()
    }
}

pub fn nodal_basis_matrices(spec: &BasisSpec, eval_points: &[f64]) -> Result<(Matrix, Matrix), ElementError> {
    Ok(NodalBasis::new(spec)?.matrices(eval_points))
}
