use std::fmt;
use std::str::FromStr;

use crate::io::{fmt_f64, CsvTable};
use crate::linalg::Matrix;

use super::{quadrature, BasisSpec, ElementError, NodalBasis};

pub const DEFAULT_QUADRATURE_ORDER: usize = 50;
pub const OPERATOR_CSV_HEADER: &str = "matrix,row,col,value";

/// Relative norm below which an orthogonalized function counts as lost.
const BREAKDOWN_RTOL: f64 = 1e-10;

/// Function space in which the lifting operator `C` is built.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CorrectionSpace {
    /// Polynomials of degree `n - 1` on the solution points (the nodal DG
    /// correction), combined with the variant's own `D` and `P`.
    Polynomial,
    /// The variant's own span. For RBF variants this makes `C = M⁻¹PᵀB`
    /// hold identically.
    Own,
}

impl CorrectionSpace {
    pub fn name(self) -> &'static str {
        match self {
            CorrectionSpace::Polynomial => "polynomial",
            CorrectionSpace::Own => "own",
        }
    }
}

impl fmt::Display for CorrectionSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CorrectionSpace {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "polynomial" => Ok(CorrectionSpace::Polynomial),
            "own" => Ok(CorrectionSpace::Own),
            _ => Err(format!("unknown correction space '{s}' (expected polynomial or own)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OperatorOptions {
    pub quadrature_order: usize,
    pub correction: CorrectionSpace,
}

impl Default for OperatorOptions {
    fn default() -> Self {
        Self { quadrature_order: DEFAULT_QUADRATURE_ORDER, correction: CorrectionSpace::Polynomial }
    }
}

/// Reference-element matrices. Flux point 0 is `x̂ = -1`, flux point 1 is
/// `x̂ = +1`.
#[derive(Debug, Clone)]
pub struct ElementOperators {
    pub n: usize,
    /// Solution points.
    pub points: Vec<f64>,
    /// `n×n`, `D[i][j] = θ_j'(x_i)`.
    pub d: Matrix,
    /// `2×n`, `P[f][j] = θ_j(±1)`.
    pub p: Matrix,
    /// `n×n` mass matrix `∫ θ_i θ_j`.
    pub m: Matrix,
    /// `diag(-1, 1)`.
    pub b: Matrix,
    /// `n×2` lifting operator: columns are `g_L'` and `g_R'` at the
    /// solution points.
    pub c: Matrix,
    pub quadrature_order: usize,
    pub correction: CorrectionSpace,
    pub quad_nodes: Vec<f64>,
    pub quad_weights: Vec<f64>,
    /// `θ_j` at the quadrature nodes.
    pub quad_values: Matrix,
    basis: NodalBasis,
    spec: BasisSpec,
}

impl ElementOperators {
    pub fn basis(&self) -> &NodalBasis {
        &self.basis
    }

    pub fn spec(&self) -> &BasisSpec {
        &self.spec
    }

    /// One CSV block per matrix (`D`, `P`, `M`, `B`, `C`).
    pub fn debug_dump(&self) -> CsvTable {
        let mut t = CsvTable::new(OPERATOR_CSV_HEADER);
        for (name, mat) in [("D", &self.d), ("P", &self.p), ("M", &self.m), ("B", &self.b), ("C", &self.c)] {
            for i in 0..mat.rows() {
                for j in 0..mat.cols() {
                    t.push(vec![name.to_string(), i.to_string(), j.to_string(), fmt_f64(mat[(i, j)])]);
                }
            }
        }
        t
    }
}

pub fn build_operators(spec: &BasisSpec) -> Result<ElementOperators, ElementError> {
    build_operators_with(spec, &OperatorOptions::default())
}

pub fn build_operators_with(spec: &BasisSpec, opts: &OperatorOptions) -> Result<ElementOperators, ElementError> {
    let n = spec.n();
    if opts.quadrature_order < 2 * n {
        return Err(ElementError::QuadratureTooLow { order: opts.quadrature_order, n });
    }
    let basis = NodalBasis::new(spec)?;
    let points = spec.points.coords().to_vec();
    let (_, d) = basis.matrices(&points);
    let (p, _) = basis.matrices(&[-1.0, 1.0]);
    let (quad_nodes, quad_weights) = quadrature(opts.quadrature_order)?;
    let (quad_values, _) = basis.matrices(&quad_nodes);
    let m = weighted_gram(&quad_values, &quad_weights);

    let c = match opts.correction {
        CorrectionSpace::Own => lifting(&quad_values, &quad_weights, &p)?,
        CorrectionSpace::Polynomial => {
            let poly = NodalBasis::new(&BasisSpec::polynomial(spec.points.clone()))?;
            let (vq, _) = poly.matrices(&quad_nodes);
            let (pp, _) = poly.matrices(&[-1.0, 1.0]);
            lifting(&vq, &quad_weights, &pp)?
        }
    };

    Ok(ElementOperators {
        n,
        points,
        d,
        p,
        m,
        b: Matrix::diag(&[-1.0, 1.0]),
        c,
        quadrature_order: opts.quadrature_order,
        correction: opts.correction,
        quad_nodes,
        quad_weights,
        quad_values,
        basis,
        spec: spec.clone(),
    })
}

/// `Vᵀ W V` with `W = diag(weights)`, symmetrized exactly.
fn weighted_gram(v: &Matrix, weights: &[f64]) -> Matrix {
    let n = v.cols();
    let mut g = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let s: f64 = (0..v.rows()).map(|q| weights[q] * v[(q, i)] * v[(q, j)]).sum();
            g[(i, j)] = s;
            g[(j, i)] = s;
        }
    }
    g
}

/// Orthonormalizes the nodal functions sampled in `values` (one column per
/// function) under the quadrature inner product, by modified Gram–Schmidt
/// with one reorthogonalization pass.
///
/// Returns `A` with column `i` holding the nodal coefficients of `ξ_i`, so
/// `ξ_i = Σ_k A[k][i] θ_k` and `Aᵀ M A = I`.
pub fn gram_schmidt(values: &Matrix, weights: &[f64]) -> Result<Matrix, ElementError> {
    let (nq, n) = (values.rows(), values.cols());
    let dot = |a: &[f64], b: &[f64]| -> f64 { (0..nq).map(|q| weights[q] * a[q] * b[q]).sum() };
    let mut q_vals: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut coeffs: Vec<Vec<f64>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut v = values.column(i);
        let mut a = vec![0.0; n];
        a[i] = 1.0;
        let original = dot(&v, &v).sqrt();
        for _pass in 0..2 {
            for j in 0..i {
                let r = dot(&q_vals[j], &v);
                for (vq, qq) in v.iter_mut().zip(&q_vals[j]) {
                    *vq -= r * qq;
                }
                for (ak, ck) in a.iter_mut().zip(&coeffs[j]) {
                    *ak -= r * ck;
                }
            }
        }
        let norm = dot(&v, &v).sqrt();
        if !(norm > BREAKDOWN_RTOL * original) {
            return Err(ElementError::GramSchmidtBreakdown { index: i });
        }
        v.iter_mut().for_each(|x| *x /= norm);
        a.iter_mut().for_each(|x| *x /= norm);
        q_vals.push(v);
        coeffs.push(a);
    }
    Ok(Matrix::from_fn(n, n, |k, i| coeffs[i][k]))
}

/// Lifting operator from the orthonormal basis `ξ` of the given space:
/// `σ_L,i = -ξ_i(-1)`, `σ_R,i = ξ_i(+1)`, `C[s][f] = Σ_i σ_f,i ξ_i(x_s)`.
fn lifting(quad_values: &Matrix, weights: &[f64], p: &Matrix) -> Result<Matrix, ElementError> {
    let a = gram_schmidt(quad_values, weights)?;
    let xi_at_flux = p.matmul(&a);
    let n = a.rows();
    Ok(Matrix::from_fn(n, 2, |s, f| {
        let sign = if f == 0 { -1.0 } else { 1.0 };
        (0..n).map(|i| sign * xi_at_flux[(f, i)] * a[(s, i)]).sum()
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::element::{node_set, NodeKind};
    use crate::linalg::invert;

    fn poly_ops(kind: NodeKind, n: usize) -> ElementOperators {
        build_operators(&BasisSpec::polynomial(node_set(kind, n).unwrap())).unwrap()
    }

    #[test]
    fn linear_hat_mass_matrix() {
        let ops = poly_ops(NodeKind::Lobatto, 2);
        let expect = Matrix::from_rows(&[vec![2.0 / 3.0, 1.0 / 3.0], vec![1.0 / 3.0, 2.0 / 3.0]]);
        assert!(ops.m.sub(&expect).max_abs() < 1e-15);
    }

    #[test]
    fn polynomial_lifting_is_dg_correction() {
        for kind in NodeKind::ALL {
            for n in 2..=5 {
                let ops = poly_ops(kind, n);
                let expect = invert(&ops.m).unwrap().matmul(&ops.p.transpose()).matmul(&ops.b);
                assert!(ops.c.sub(&expect).max_abs() < 1e-12, "{kind} n={n}");
            }
        }
    }

    #[test]
    fn collocated_flux_points_give_unit_projection_rows() {
        for kind in [NodeKind::Lobatto, NodeKind::UniformFull] {
            let ops = poly_ops(kind, 4);
            assert_eq!(ops.p.row(0), &[1.0, 0.0, 0.0, 0.0]);
            assert_eq!(ops.p.row(1), &[0.0, 0.0, 0.0, 1.0]);
        }
    }

    #[test]
    fn quadrature_below_2n_is_rejected() {
        let spec = BasisSpec::polynomial(node_set(NodeKind::Legendre, 5).unwrap());
        let opts = OperatorOptions { quadrature_order: 9, ..Default::default() };
        assert!(matches!(build_operators_with(&spec, &opts), Err(ElementError::QuadratureTooLow { .. })));
    }

    #[test]
    fn dependent_functions_break_down() {
        let v = Matrix::from_rows(&[vec![1.0, 2.0], vec![1.0, 2.0], vec![1.0, 2.0]]);
        assert!(matches!(gram_schmidt(&v, &[1.0; 3]), Err(ElementError::GramSchmidtBreakdown { index: 1 })));
    }

    #[test]
    fn own_space_lifting_matches_identity_for_rbf() {
        let pts = node_set(NodeKind::Legendre, 4).unwrap();
        let spec = BasisSpec::rbf_ga(pts.clone(), pts, 0.7);
        let ops = build_operators_with(&spec, &OperatorOptions { correction: CorrectionSpace::Own, ..Default::default() }).unwrap();
        let expect = invert(&ops.m).unwrap().matmul(&ops.p.transpose()).matmul(&ops.b);
        assert!(ops.c.sub(&expect).max_abs() < 1e-10);
    }

    #[test]
    fn debug_dump_layout() {
        let t = poly_ops(NodeKind::Lobatto, 2).debug_dump();
        assert_eq!(t.header(), OPERATOR_CSV_HEADER);
        // D 4, P 4, M 4, B 4, C 4
        assert_eq!(t.len(), 20);
        assert_eq!(t.rows()[0], vec!["D", "0", "0", "-0.5"]);
    }
}
