use std::sync::Arc;

use proptest::prelude::*;
use rbf_fr::analysis::{assemble_q, combined_analysis, dispersion_dissipation, khat_grid, sbp_report, FourierConfig};
use rbf_fr::element::{
    build_operators, gram_schmidt, nodal_basis_matrices, node_set, BasisSpec, ElementOperators, NodeKind,
};
use rbf_fr::io::{fmt_f64, CsvTable};
use rbf_fr::linalg::{condition_number_2, eig_complex, invert, solve_dense, CMatrix, Complex64, Matrix};
use rbf_fr::rbf::{alternant_matrix, Kernel, RbfConfig};
use rbf_fr::solver::{rhs_advection_diffusion, rhs_burgers, rk4_step, FrRhs, Mesh1D, PdeParams, SolutionState};

fn kind() -> impl Strategy<Value = NodeKind> {
    prop::sample::select(NodeKind::ALL.to_vec())
}

fn matrix(n: usize, lo: f64, hi: f64) -> impl Strategy<Value = Matrix> {
    prop::collection::vec(lo..hi, n * n).prop_map(move |v| Matrix::from_vec(n, n, v))
}

fn sized_matrix(max: usize) -> impl Strategy<Value = Matrix> {
    (2..=max).prop_flat_map(|n| matrix(n, -1.0, 1.0))
}

fn poly(kind: NodeKind, n: usize) -> Arc<ElementOperators> {
    Arc::new(build_operators(&BasisSpec::polynomial(node_set(kind, n).unwrap())).unwrap())
}

fn ga(kind: NodeKind, n: usize, eps: f64) -> ElementOperators {
    let pts = node_set(kind, n).unwrap();
    build_operators(&BasisSpec::rbf_ga(pts.clone(), pts, eps)).unwrap()
}

/// Eigenvalue multisets compared by optimal matching (sizes ≤ 6).
fn multiset_gap(a: &[Complex64], b: &[Complex64]) -> f64 {
    fn go(a: &[Complex64], b: &mut Vec<Complex64>) -> f64 {
        let Some((first, rest)) = a.split_first() else { return 0.0 };
        let mut best = f64::INFINITY;
        for j in 0..b.len() {
            let v = b.remove(j);
            best = best.min((*first - v).norm().max(go(rest, b)));
            b.insert(j, v);
        }
        best
    }
    go(a, &mut b.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn solve_residual_is_small(a in sized_matrix(8), seed in prop::collection::vec(-10.0f64..10.0, 8)) {
        let n = a.rows();
        prop_assume!(condition_number_2(&a).unwrap() <= 1e8);
        let b = &seed[..n];
        let x = solve_dense(&a, b).unwrap();
        let r = a.mul_vec(&x);
        let xinf = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let binf = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let res = r.iter().zip(b).fold(0.0f64, |m, (p, q)| m.max((p - q).abs()));
        prop_assert!(res <= 1e-12 * (a.norm_inf() * xinf + binf), "{res}");
    }

    #[test]
    fn condition_is_scale_invariant(a in sized_matrix(6), c in prop_oneof![-1e3f64..-1e-3, 1e-3f64..1e3]) {
        let k = condition_number_2(&a).unwrap();
        prop_assume!(k.is_finite() && k < 1e10);
        let ks = condition_number_2(&a.scale(c)).unwrap();
        prop_assert!((ks - k).abs() <= 1e-9 * k, "{k} {ks}");
    }

    #[test]
    fn eigenvalues_survive_similarity(a in sized_matrix(6), pert in matrix(6, -0.3, 0.3)) {
        let n = a.rows();
        let s = Matrix::from_fn(n, n, |i, j| pert[(i, j)] + if i == j { 1.0 } else { 0.0 });
        prop_assume!(condition_number_2(&s).unwrap() < 10.0);
        let b = s.matmul(&a).matmul(&invert(&s).unwrap());
        let (ea, eb) = (eig_complex(&a.to_complex()).unwrap(), eig_complex(&b.to_complex()).unwrap());
        // Near-defective pairs are too sensitive to compare at 1e-9.
        prop_assume!(ea.vectors_cond < 1e3);
        prop_assert!(multiset_gap(&ea.values, &eb.values) <= 1e-9, "{:?} {:?}", ea.values, eb.values);
    }

    #[test]
    fn alternant_is_symmetric_bounded_with_unit_diagonal(k in kind(), n in 2usize..=10, eps in 1e-3f64..3.0) {
        let pts = node_set(k, n).unwrap();
        let a = alternant_matrix(pts.coords(), &RbfConfig::new(Kernel::Ga, eps, pts.clone()).unwrap()).unwrap();
        prop_assert_eq!(a.clone(), a.transpose());
        for i in 0..n {
            prop_assert_eq!(a[(i, i)], 1.0);
            for j in 0..n {
                prop_assert!(a[(i, j)] > 0.0 && a[(i, j)] <= 1.0);
            }
        }
    }

    #[test]
    fn kernel_derivative_matches_finite_difference(
        kernel in prop::sample::select(Kernel::ALL.to_vec()),
        eps in 0.1f64..2.0,
        x in -1.0f64..1.0,
        c in -1.0f64..1.0,
    ) {
        let h = 1e-6;
        prop_assume!((x - c).abs() > 1e-3 && ((x - c).abs() - 1.0).abs() > 1e-3);
        let fd = (kernel.eval(eps, (x + h - c).abs()) - kernel.eval(eps, (x - h - c).abs())) / (2.0 * h);
        let an = kernel.deriv_x(eps, x, c);
        prop_assert!((fd - an).abs() <= 1e-6 * an.abs().max(1.0), "{fd} {an}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn flat_limit_approaches_polynomials(k in kind(), n in 2usize..=5) {
        let p = poly(k, n);
        let gap = |e: f64| { let g = ga(k, n, e); g.d.sub(&p.d).max_abs().max(g.p.sub(&p.p).max_abs()) };
        prop_assert!(gap(1e-3) < gap(1e-2));
    }

    #[test]
    fn cardinality_for_every_basis(k in kind(), n in 2usize..=8, eps in 0.01f64..1.5, which in 0usize..3) {
        let pts = node_set(k, n).unwrap();
        let spec = match which {
            0 => BasisSpec::polynomial(pts.clone()),
            1 => BasisSpec::rbf_ga(pts.clone(), pts.clone(), eps),
            _ => BasisSpec::rbf_direct(pts.clone(), RbfConfig::new(Kernel::Imq, 1.0 + eps, pts.clone()).unwrap()),
        };
        let (v, _) = nodal_basis_matrices(&spec, pts.coords()).unwrap();
        prop_assert!(v.sub(&Matrix::identity(n)).max_abs() < 1e-10);
    }

    #[test]
    fn mass_matrix_is_symmetric_positive_definite(k in kind(), n in 2usize..=6, eps in 0.01f64..1.5, rbf in any::<bool>()) {
        let ops = if rbf { ga(k, n, eps) } else { (*poly(k, n)).clone() };
        prop_assert!(ops.m.sub(&ops.m.transpose()).max_abs() <= 1e-13);
        let eig = eig_complex(&ops.m.to_complex()).unwrap();
        prop_assert!(eig.values.iter().all(|l| l.re > 0.0 && l.im.abs() < 1e-10), "{:?}", eig.values);
    }

    #[test]
    fn gram_schmidt_is_orthonormal(k in kind(), n in 2usize..=6, eps in 0.01f64..1.5) {
        let ops = ga(k, n, eps);
        let a = gram_schmidt(&ops.quad_values, &ops.quad_weights).unwrap();
        let xi = ops.quad_values.matmul(&a);
        let w = Matrix::diag(&ops.quad_weights);
        let gram = xi.transpose().matmul(&w).matmul(&xi);
        prop_assert!(gram.sub(&Matrix::identity(n)).max_abs() <= 1e-12);
    }

    #[test]
    fn layouts_give_distinct_operators(n in 3usize..=6, eps in 0.05f64..1.0) {
        let ds: Vec<Matrix> = NodeKind::ALL.iter().map(|&k| ga(k, n, eps).d).collect();
        for i in 0..ds.len() {
            for j in i + 1..ds.len() {
                // Lobatto and full uniform coincide for n ≤ 3.
                if n == 3 && matches!((NodeKind::ALL[i], NodeKind::ALL[j]), (NodeKind::Lobatto, NodeKind::UniformFull)) {
                    continue;
                }
                prop_assert!(ds[i] != ds[j], "{} {}", NodeKind::ALL[i], NodeKind::ALL[j]);
            }
        }
    }
}

fn fourier_field(coeffs: &[f64]) -> impl Fn(f64) -> f64 + '_ {
    move |x: f64| coeffs.iter().enumerate().map(|(m, c)| c * ((m + 1) as f64 * x + 0.3 * m as f64).sin()).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn linear_advection_conserves_the_integral(
        k in kind(),
        n in 2usize..=5,
        ne in 4usize..=12,
        alpha in 0.0f64..=1.0,
        a in -2.0f64..2.0,
        coeffs in prop::collection::vec(-1.0f64..1.0, 1..4),
    ) {
        let mesh = Mesh1D::new(0.0, 2.0 * std::f64::consts::PI, ne).unwrap();
        let ops = poly(k, n);
        let state = SolutionState::from_fn(mesh, Arc::clone(&ops), fourier_field(&coeffs));
        let params = PdeParams { alpha, ..PdeParams::advection_diffusion(a, 0.0) };
        let mut rhs = FrRhs::new(ops, mesh, params);
        let dt = 0.01;
        let mut u = state.u.clone();
        for _ in 0..20 {
            u = rk4_step(&u, dt, |x, out| rhs.eval(x, out));
        }
        let after = SolutionState { u, ..state.clone() };
        prop_assert!((after.total() - state.total()).abs() <= 1e-10 * 0.2, "{} {}", state.total(), after.total());
    }

    #[test]
    fn constant_state_is_a_fixed_point(
        k in kind(),
        n in 2usize..=6,
        ne in 2usize..=10,
        c in -5.0f64..5.0,
        a in -3.0f64..3.0,
        mu in 0.0f64..1.0,
        alpha in 0.0f64..=1.0,
    ) {
        let mesh = Mesh1D::new(-1.0, 1.5, ne).unwrap();
        let state = SolutionState::from_fn(mesh, poly(k, n), |_| c);
        let lin = rhs_advection_diffusion(&state, &PdeParams { alpha, ..PdeParams::advection_diffusion(a, mu) });
        let bur = rhs_burgers(&state, &PdeParams::burgers(mu));
        let scale = c.abs().max(1.0) * (a.abs() + c.abs()).max(1.0);
        prop_assert!(lin.iter().chain(&bur).all(|v| v.abs() <= 1e-12 * scale), "{lin:?} {bur:?}");
    }

    #[test]
    fn symbol_is_conjugate_symmetric(k in kind(), n in 2usize..=5, kh in 0.01f64..3.1, alpha in 0.0f64..=1.0, eps in 0.05f64..1.5) {
        let cfg = FourierConfig::new(Arc::new(ga(k, n, eps))).with_alpha(alpha);
        let kk = cfg.wavenumber(kh);
        let (qp, qm) = (assemble_q(&cfg, kk), assemble_q(&cfg, -kk));
        let conj = qp.map(|z: Complex64| z.conj());
        prop_assert!(qm.sub(&conj).max_abs() <= 1e-14 * qp.max_abs().max(1.0));
    }

    #[test]
    fn sbp_identities_hold_for_polynomials(k in kind(), n in 2usize..=8) {
        let r = sbp_report(&poly(k, n)).unwrap();
        prop_assert!(r.conservation_error <= 1e-11 && r.stability_error <= 1e-11, "{r:?}");
    }

    #[test]
    fn combined_analysis_tracks_the_physical_mode(
        k in kind(),
        n in 3usize..=5,
        frac in 0.05f64..0.2,
        t in 10.0f64..20.0,
    ) {
        let cfg = FourierConfig::new(poly(k, n));
        let kh = frac * std::f64::consts::PI;
        let m = &dispersion_dissipation(&cfg, &[kh]).unwrap()[0];
        let w = m.omega[m.physical];
        let r = combined_analysis(&cfg, kh, &[t]).unwrap()[0];
        let g = (w.im * t).exp();
        let dphi = (w.re - cfg.wavenumber(kh)) * t;
        prop_assert!((r.g - g).abs() <= 0.1 * g, "{} {g}", r.g);
        prop_assert!((r.dphi - dphi).abs() <= 0.1 * dphi.abs(), "{} {dphi}", r.dphi);
    }

    #[test]
    fn csv_round_trips(
        values in prop::collection::vec(prop::collection::vec(any::<f64>(), 3), 0..20),
        labels in prop::collection::vec("[a-z_,\" ]{0,8}", 20),
    ) {
        let mut t = CsvTable::new("label,x,y,z");
        for (row, label) in values.iter().zip(&labels) {
            let mut cells = vec![label.clone()];
            cells.extend(row.iter().map(|&v| fmt_f64(v)));
            t.push(cells);
        }
        let text = t.to_csv_string();
        let back = CsvTable::parse(&text).unwrap();
        prop_assert_eq!(back.to_csv_string(), text);
        for (row, orig) in back.rows().iter().zip(&values) {
            for (cell, v) in row[1..].iter().zip(orig) {
                let parsed: f64 = cell.parse().unwrap();
                prop_assert!(parsed.to_bits() == v.to_bits() || (parsed.is_nan() && v.is_nan()));
            }
        }
    }
}

/// The domain is finite, so every combination is checked.
#[test]
fn direct_and_stable_operators_agree() {
    let mut failures = Vec::new();
    for k in NodeKind::ALL {
        for n in 2..=5 {
            for eps in [0.5, 0.25, 0.1] {
                let pts = node_set(k, n).unwrap();
                let stable = ga(k, n, eps);
                let direct =
                    build_operators(&BasisSpec::rbf_direct(pts.clone(), RbfConfig::new(Kernel::Ga, eps, pts).unwrap())).unwrap();
                let gap = stable.d.sub(&direct.d).max_abs().max(stable.p.sub(&direct.p).max_abs());
                if gap > 1e-7 {
                    failures.push(format!("{k} n={n} eps={eps}: {gap:e}"));
                }
            }
        }
    }
    assert!(failures.is_empty(), "{failures:#?}");
}

fn constant_defects(ops: &ElementOperators) -> (f64, f64) {
    let ones = vec![1.0; ops.n];
    let d1 = ops.d.mul_vec(&ones).iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let p1 = ops.p.mul_vec(&ones).iter().fold(0.0f64, |m, v| m.max((v - 1.0).abs()));
    (d1, p1)
}

/// Collocated flux points reproduce constants at the faces exactly, so the
/// projection defect can only stay at zero there.
#[test]
fn gaussian_constants_improve_as_eps_shrinks() {
    for k in NodeKind::ALL {
        for n in 2..=10 {
            if n == 2 && matches!(k, NodeKind::Lobatto | NodeKind::UniformFull) {
                continue;
            }
            let defects: Vec<(f64, f64)> = [1.0, 0.5, 0.1, 0.01].iter().map(|&e| constant_defects(&ga(k, n, e))).collect();
            for w in defects.windows(2) {
                assert!(w[1].0 < w[0].0, "{k} n={n}: {defects:?}");
                assert!(w[1].1 < w[0].1 || (w[0].1 == 0.0 && w[1].1 == 0.0), "{k} n={n}: {defects:?}");
            }
        }
    }
}

/// With two centres at the faces the constant defect of `D` is
/// `4ε² e^{-4ε²} / (1 + e^{-4ε²})`, which peaks near ε = 0.6.
#[test]
fn two_endpoint_gaussians_follow_closed_form() {
    for k in [NodeKind::Lobatto, NodeKind::UniformFull] {
        for eps in [1.0f64, 0.5, 0.1, 0.01] {
            let (d1, p1) = constant_defects(&ga(k, 2, eps));
            let q = (-4.0 * eps * eps).exp();
            let expect = 4.0 * eps * eps * q / (1.0 + q);
            assert!((d1 - expect).abs() <= 1e-12 * expect.max(1e-3), "{k} {eps}: {d1} vs {expect}");
            assert_eq!(p1, 0.0);
        }
    }
}

/// Eigenvalue tracks matched by proximity along the wavenumber grid move
/// smoothly: no step is more than ten times its neighbours.
#[test]
fn eigenvalue_tracks_are_continuous() {
    fn step(a: &[Complex64], b: &[Complex64]) -> f64 {
        multiset_gap(a, b)
    }
    for n in 2..=5 {
        for k in NodeKind::ALL {
            for ops in [poly(k, n), Arc::new(ga(k, n, 0.5)), Arc::new(ga(k, n, 1.5))] {
                let modes = dispersion_dissipation(&FourierConfig::new(ops), &khat_grid(256)).unwrap();
                let d: Vec<f64> = modes.windows(2).map(|w| step(&w[0].omega, &w[1].omega)).collect();
                for i in 1..d.len() - 1 {
                    assert!(d[i] <= 10.0 * d[i - 1].max(d[i + 1]), "{k} n={n} step {i}: {:?}", &d[i - 1..=i + 1]);
                }
            }
        }
    }
}

/// Polynomial FR on sine advection converges at order at least `n_s - 1/2`.
#[test]
fn polynomial_convergence_order() {
    use rbf_fr::solver::{run_linear_case, DtRule, LinearCase};
    for n in 2..=5 {
        let err = |ne: usize| {
            run_linear_case(LinearCase::SineAdvection, poly(NodeKind::Legendre, n), ne, 2.0 * std::f64::consts::PI, DtRule::default(), 0)
                .unwrap()
                .norms
                .l2
        };
        let rate = (err(16) / err(32)).log2();
        assert!(rate >= n as f64 - 0.5, "n={n}: {rate}");
    }
}

#[test]
fn complex_helpers_are_consistent() {
    let q = CMatrix::identity(2).scale(Complex64::new(0.0, 2.0));
    assert_eq!(q.map(|z: Complex64| z.conj()), q.scale(Complex64::new(-1.0, 0.0)));
}
