use super::{condition_number_2, norm2, CMatrix, Complex64, LinalgError, Result};

const ITERATIONS_PER_EIGENVALUE: usize = 60;
const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Eigenvalues and unit-norm eigenvectors (columns of `vectors`), sorted by
/// real part then imaginary part.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<Complex64>,
    pub vectors: CMatrix,
    /// 2-norm condition number of `vectors`.
    pub vectors_cond: f64,
}

/// Complex Schur decomposition by Householder reduction to Hessenberg form
/// followed by Wilkinson-shifted QR, then eigenvectors by back substitution
/// on the triangular factor.
pub fn eig_complex(a: &CMatrix) -> Result<EigenDecomposition> {
    if !a.is_square() {
        return Err(LinalgError::Dimension(format!("eigen-decomposition needs a square matrix, got {}x{}", a.rows(), a.cols())));
    }
    let n = a.rows();
    if n == 0 {
        return Ok(EigenDecomposition { values: vec![], vectors: CMatrix::zeros(0, 0), vectors_cond: 1.0 });
    }
    let (mut t, mut z) = hessenberg(a);
    schur_qr(&mut t, &mut z)?;
    let y = triangular_eigenvectors(&t);
    let mut vecs = z.matmul(&y);

    for j in 0..n {
        let nrm = norm2(&vecs.column(j));
        for i in 0..n {
            vecs[(i, j)] /= nrm;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        let (a, b) = (t[(i, i)], t[(j, j)]);
        a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
    });
    let values: Vec<Complex64> = order.iter().map(|&k| t[(k, k)]).collect();
    let vectors = CMatrix::from_fn(n, n, |i, j| vecs[(i, order[j])]);
    let vectors_cond = condition_number_2(&vectors)?;
    Ok(EigenDecomposition { values, vectors, vectors_cond })
}

/// Returns `(H, Q)` with `A = Q H Qᴴ`, `H` upper Hessenberg.
fn hessenberg(a: &CMatrix) -> (CMatrix, CMatrix) {
    let n = a.rows();
    let mut h = a.clone();
    let mut q = CMatrix::identity(n);
    for k in 0..n.saturating_sub(2) {
        let x: Vec<Complex64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let xnorm = norm2(&x);
        if xnorm == 0.0 {
            continue;
        }
        let phase = if x[0].norm() == 0.0 { ONE } else { x[0] / x[0].norm() };
        let mut v = x;
        v[0] += phase * xnorm;
        let vnorm = norm2(&v);
        if vnorm == 0.0 {
            continue;
        }
        for e in &mut v {
            *e /= vnorm;
        }
        // H <- (I - 2vvᴴ) H (I - 2vvᴴ), acting on rows/cols k+1..n.
        for j in 0..n {
            let mut s = ZERO;
            for (l, vi) in v.iter().enumerate() {
                s += vi.conj() * h[(k + 1 + l, j)];
            }
            for (l, vi) in v.iter().enumerate() {
                h[(k + 1 + l, j)] -= *vi * s * 2.0;
            }
        }
        for m in [&mut h, &mut q] {
            for i in 0..n {
                let mut s = ZERO;
                for (l, vi) in v.iter().enumerate() {
                    s += m[(i, k + 1 + l)] * *vi;
                }
                for (l, vi) in v.iter().enumerate() {
                    m[(i, k + 1 + l)] -= s * vi.conj() * 2.0;
                }
            }
        }
        for i in k + 2..n {
            h[(i, k)] = ZERO;
        }
    }
    (h, q)
}

/// Rotation `G = [[c, s], [-s̄, c]]` with `G [x; y] = [r; 0]`.
fn givens(x: Complex64, y: Complex64) -> (f64, Complex64) {
    let ax = x.norm();
    if y.norm() == 0.0 {
        return (1.0, ZERO);
    }
    if ax == 0.0 {
        return (0.0, ONE);
    }
    let rho = ax.hypot(y.norm());
    (ax / rho, x * y.conj() / (ax * rho))
}

fn schur_qr(h: &mut CMatrix, z: &mut CMatrix) -> Result<()> {
    let n = h.rows();
    let cap = ITERATIONS_PER_EIGENVALUE * n;
    let mut total = 0usize;
    let mut hi = n - 1;
    let mut its = 0usize;
    let hnorm = h.max_abs().max(f64::MIN_POSITIVE);
    while hi > 0 {
        let mut l = hi;
        while l > 0 {
            let s = h[(l - 1, l - 1)].norm() + h[(l, l)].norm();
            let s = if s == 0.0 { hnorm } else { s };
            if h[(l, l - 1)].norm() <= f64::EPSILON * s {
                h[(l, l - 1)] = ZERO;
                break;
            }
            l -= 1;
        }
        if l == hi {
            hi -= 1;
            its = 0;
            continue;
        }
        its += 1;
        total += 1;
        if total > cap {
            return Err(LinalgError::NoConvergence { iterations: total });
        }

        let mu = if its % 11 == 10 {
            // Exceptional shift to break cycles.
            h[(hi, hi)] + Complex64::new(h[(hi, hi - 1)].norm() * 0.75, h[(hi, hi - 1)].norm() * 0.4375)
        } else {
            wilkinson(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };

        for k in l..=hi {
            h[(k, k)] -= mu;
        }
        let mut rots = Vec::with_capacity(hi - l);
        for k in l..hi {
            let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
            for j in k..n {
                let (x, y) = (h[(k, j)], h[(k + 1, j)]);
                h[(k, j)] = x * c + s * y;
                h[(k + 1, j)] = -s.conj() * x + y * c;
            }
            h[(k + 1, k)] = ZERO;
            rots.push((c, s));
        }
        for (idx, &(c, s)) in rots.iter().enumerate() {
            let k = l + idx;
            let rmax = (k + 2).min(hi);
            for i in 0..=rmax {
                let (x, y) = (h[(i, k)], h[(i, k + 1)]);
                h[(i, k)] = x * c + y * s.conj();
                h[(i, k + 1)] = -x * s + y * c;
            }
            for i in 0..n {
                let (x, y) = (z[(i, k)], z[(i, k + 1)]);
                z[(i, k)] = x * c + y * s.conj();
                z[(i, k + 1)] = -x * s + y * c;
            }
        }
        for k in l..=hi {
            h[(k, k)] += mu;
        }
    }
    Ok(())
}

/// Eigenvalue of the trailing 2×2 block closest to its last diagonal entry.
fn wilkinson(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let m = (a + d) * 0.5;
    let (r1, r2) = (m + disc, m - disc);
    if (r1 - d).norm() <= (r2 - d).norm() {
        r1
    } else {
        r2
    }
}

/// Columns are eigenvectors of the upper-triangular `t`.
fn triangular_eigenvectors(t: &CMatrix) -> CMatrix {
    let n = t.rows();
    let smin = (f64::EPSILON * t.max_abs()).max(f64::MIN_POSITIVE);
    let mut y = CMatrix::zeros(n, n);
    for k in 0..n {
        let lambda = t[(k, k)];
        y[(k, k)] = ONE;
        for i in (0..k).rev() {
            let mut s = ZERO;
            for j in i + 1..=k {
                s += t[(i, j)] * y[(j, k)];
            }
            let mut d = t[(i, i)] - lambda;
            if d.norm() < smin {
                d = Complex64::new(smin, 0.0);
            }
            y[(i, k)] = -s / d;
        }
    }
    y
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;
    use rand_mt::Mt;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn residual(a: &CMatrix, e: &EigenDecomposition) -> f64 {
        let n = a.rows();
        let aw = a.matmul(&e.vectors);
        let mut worst: f64 = 0.0;
        for j in 0..n {
            let r: Vec<Complex64> = (0..n).map(|i| aw[(i, j)] - e.vectors[(i, j)] * e.values[j]).collect();
            worst = worst.max(norm2(&r));
        }
        worst
    }

    #[test]
    fn diagonal_matrix() {
        let a = CMatrix::diag(&[c(1.0, 2.0), c(3.0, 0.0)]);
        let e = eig_complex(&a).unwrap();
        assert_eq!(e.values, vec![c(1.0, 2.0), c(3.0, 0.0)]);
        for i in 0..2 {
            for j in 0..2 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((e.vectors[(i, j)].norm() - expect).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn rotation_generator() {
        let a = Matrix::from_rows(&[vec![0.0, 1.0], vec![-1.0, 0.0]]).to_complex();
        let e = eig_complex(&a).unwrap();
        assert!((e.values[0] - c(0.0, -1.0)).norm() < 1e-14);
        assert!((e.values[1] - c(0.0, 1.0)).norm() < 1e-14);
        assert!(residual(&a, &e) < 1e-13);
    }

    #[test]
    fn random_5x5_residual() {
        let mut rng = Mt::new(3);
        let mut u = || f64::from(rng.next_u32()) / 4294967296.0 - 0.5;
        let a = CMatrix::from_fn(5, 5, |_, _| c(u(), u()));
        let e = eig_complex(&a).unwrap();
        assert!(residual(&a, &e) < 1e-9 * a.norm_fro());
        for w in e.values.windows(2) {
            assert!(w[0].re <= w[1].re);
        }
    }

    #[test]
    fn jordan_block_does_not_fail() {
        let a = Matrix::from_rows(&[vec![2.0, 1.0], vec![0.0, 2.0]]).to_complex();
        let e = eig_complex(&a).unwrap();
        assert!((e.values[0] - c(2.0, 0.0)).norm() < 1e-12);
        assert!(e.vectors_cond > 1e12);
    }

    #[test]
    fn companion_of_known_roots() {
        // Roots 1, 2, 3, 4 of x^4 - 10x^3 + 35x^2 - 50x + 24.
        let a = Matrix::from_rows(&[
            vec![10.0, -35.0, 50.0, -24.0],
            vec![1.0, 0.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0, 0.0],
            vec![0.0, 0.0, 1.0, 0.0],
        ])
        .to_complex();
        let e = eig_complex(&a).unwrap();
        for (k, v) in e.values.iter().enumerate() {
            assert!((v - c(k as f64 + 1.0, 0.0)).norm() < 1e-10, "{v}");
        }
    }
}
