use super::{DenseMatrix, LinalgError, Result, Scalar};

const MAX_SWEEPS: usize = 80;

/// Singular values in descending order, by one-sided (Hestenes) Jacobi.
///
/// Complex columns are handled by rotating out the phase of the inner
/// product before the real rotation.
pub fn singular_values<T: Scalar>(a: &DenseMatrix<T>) -> Vec<f64> {
    let work = if a.rows() >= a.cols() { a.clone() } else { a.adjoint() };
    let (m, n) = (work.rows(), work.cols());
    let scale = work.max_abs();
    if scale == 0.0 || n == 0 {
        return vec![0.0; n];
    }
    // Column-major copy, scaled to unit max entry to keep squares in range.
    let mut cols: Vec<Vec<T>> = (0..n).map(|j| (0..m).map(|i| work[(i, j)] * T::from_real(1.0 / scale)).collect()).collect();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha: f64 = cols[p].iter().map(|x| x.modulus_sqr()).sum();
                let beta: f64 = cols[q].iter().map(|x| x.modulus_sqr()).sum();
                let mut gamma = T::zero();
                for (x, y) in cols[p].iter().zip(&cols[q]) {
                    gamma += x.conj() * *y;
                }
                let g = gamma.modulus();
                if g == 0.0 || g <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                // Make the inner product real and positive, then rotate.
                let phase = gamma / T::from_real(g);
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let phase_conj = phase.conj();
                for i in 0..m {
                    let x = cols[p][i];
                    let y = cols[q][i] * phase_conj;
                    cols[p][i] = x * T::from_real(c) - y * T::from_real(s);
                    cols[q][i] = x * T::from_real(s) + y * T::from_real(c);
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut sv: Vec<f64> = cols.iter().map(|c| c.iter().map(|x| x.modulus_sqr()).sum::<f64>().sqrt() * scale).collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// `σ_max / σ_min`; `+∞` when `σ_min` is zero or the ratio overflows.
pub fn condition_number_2<T: Scalar>(a: &DenseMatrix<T>) -> Result<f64> {
    if !a.is_square() {
        return Err(LinalgError::Dimension(format!("condition number needs a square matrix, got {}x{}", a.rows(), a.cols())));
    }
    let sv = singular_values(a);
    let (Some(&smax), Some(&smin)) = (sv.first(), sv.last()) else {
        return Ok(1.0);
    };
    if smin == 0.0 {
        return Ok(f64::INFINITY);
    }
    let c = smax / smin;
    Ok(if c.is_finite() { c } else { f64::INFINITY })
}
