use rbf_fr::element::{
    build_operators, build_operators_with, nodal_basis_matrices, node_set, quadrature, BasisSpec, ElementError,
    NodeKind, OperatorOptions,
};
use rbf_fr::linalg::{invert, Matrix};
use rbf_fr::rbf::{Kernel, RbfConfig};

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

#[test]
fn node_set_examples() {
    assert_eq!(node_set(NodeKind::Lobatto, 3).unwrap().coords(), &[-1.0, 0.0, 1.0]);
    let r = 0.6f64.sqrt();
    assert!(close(node_set(NodeKind::Legendre, 3).unwrap().coords(), &[-r, 0.0, r], 1e-15));
    assert!(close(node_set(NodeKind::UniformInternal, 3).unwrap().coords(), &[-2.0 / 3.0, 0.0, 2.0 / 3.0], 1e-15));
    let (a, b) = ((std::f64::consts::PI / 8.0).cos(), (3.0 * std::f64::consts::PI / 8.0).cos());
    assert!(close(node_set(NodeKind::Chebyshev, 4).unwrap().coords(), &[-a, -b, b, a], 1e-15));
}

#[test]
fn node_set_errors() {
    assert!(matches!(node_set(NodeKind::Legendre, 1), Err(ElementError::NodeCount { .. })));
    assert!(matches!(node_set(NodeKind::Lobatto, 11), Err(ElementError::NodeCount { .. })));
    assert!(matches!("gauss".parse::<NodeKind>(), Err(ElementError::UnknownNodeKind(_))));
}

#[test]
fn cardinality_at_solution_points() {
    let pts = node_set(NodeKind::Chebyshev, 4).unwrap();
    let specs = [
        BasisSpec::polynomial(pts.clone()),
        BasisSpec::rbf_direct(pts.clone(), RbfConfig::new(Kernel::Mq, 0.8, pts.clone()).unwrap()),
        BasisSpec::rbf_ga(pts.clone(), pts.clone(), 0.3),
    ];
    for spec in &specs {
        let (v, _) = nodal_basis_matrices(spec, pts.coords()).unwrap();
        assert!(v.sub(&Matrix::identity(4)).max_abs() < 1e-12, "{}", spec.family());
    }
}

#[test]
fn linear_lagrange_derivative() {
    let spec = BasisSpec::polynomial(node_set(NodeKind::Lobatto, 2).unwrap());
    let (_, dv) = nodal_basis_matrices(&spec, &[-1.0, 1.0]).unwrap();
    assert_eq!(dv.row(0), &[-0.5, 0.5]);
    assert_eq!(dv.row(1), &[-0.5, 0.5]);
}

#[test]
fn flat_gaussian_values_at_flux_points() {
    let pts = node_set(NodeKind::Legendre, 4).unwrap();
    let (ga, _) = nodal_basis_matrices(&BasisSpec::rbf_ga(pts.clone(), pts.clone(), 1e-3), &[-1.0, 1.0]).unwrap();
    let (poly, _) = nodal_basis_matrices(&BasisSpec::polynomial(pts), &[-1.0, 1.0]).unwrap();
    assert!(ga.sub(&poly).max_abs() <= 1e-6);
}

#[test]
fn linear_hat_mass_matrix() {
    let ops = build_operators(&BasisSpec::polynomial(node_set(NodeKind::Lobatto, 2).unwrap())).unwrap();
    let expect = Matrix::from_rows(&[vec![2.0 / 3.0, 1.0 / 3.0], vec![1.0 / 3.0, 2.0 / 3.0]]);
    assert!(ops.m.sub(&expect).max_abs() < 1e-14);
}

#[test]
fn polynomial_lifting_is_m_inverse_pt_b() {
    for kind in NodeKind::ALL {
        for n in 2..=5 {
            let ops = build_operators(&BasisSpec::polynomial(node_set(kind, n).unwrap())).unwrap();
            let lifted = invert(&ops.m).unwrap().matmul(&ops.p.transpose()).matmul(&ops.b);
            assert!(ops.c.sub(&lifted).max_abs() <= 1e-12, "{kind} n={n}");
        }
    }
}

#[test]
fn collocated_flux_points() {
    for kind in [NodeKind::Lobatto, NodeKind::UniformFull] {
        for n in 2..=5 {
            let ops = build_operators(&BasisSpec::polynomial(node_set(kind, n).unwrap())).unwrap();
            for j in 0..n {
                assert_eq!(ops.p[(0, j)], if j == 0 { 1.0 } else { 0.0 }, "{kind} n={n}");
                assert_eq!(ops.p[(1, j)], if j == n - 1 { 1.0 } else { 0.0 }, "{kind} n={n}");
            }
        }
    }
}

#[test]
fn quadrature_order_below_2n_rejected() {
    let spec = BasisSpec::polynomial(node_set(NodeKind::Legendre, 5).unwrap());
    let opts = OperatorOptions { quadrature_order: 9, ..Default::default() };
    assert!(matches!(build_operators_with(&spec, &opts), Err(ElementError::QuadratureTooLow { .. })));
}

#[test]
fn quadrature_examples() {
    assert_eq!(quadrature(1).unwrap(), (vec![0.0], vec![2.0]));
    let (x, w) = quadrature(2).unwrap();
    let r = 1.0 / 3.0f64.sqrt();
    assert!(close(&x, &[-r, r], 1e-15) && close(&w, &[1.0, 1.0], 1e-15));
    let (x, w) = quadrature(3).unwrap();
    let i4: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(4)).sum();
    assert!((i4 - 0.4).abs() < 1e-14);
    assert!(matches!(quadrature(0), Err(ElementError::QuadratureOrder { .. })));
    assert!(matches!(quadrature(201), Err(ElementError::QuadratureOrder { .. })));
}
