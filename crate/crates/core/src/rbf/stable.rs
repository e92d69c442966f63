use crate::element::NodeSet;
use crate::linalg::Matrix;

use super::RbfError;

/// Largest series index attempted; reached only for ε well beyond the
/// range where this construction is useful.
const MAX_TERMS: usize = 400;
const SERIES_RTOL: f64 = 1e-18;
const NORMALIZATION_SAMPLES: usize = 401;

/// Well-conditioned basis for the span of Gaussians centred at `c_j`.
///
/// With `z = 2ε²x`, each Gaussian factors as
/// `exp(-ε²(x-c)²) = exp(-ε²c²) · exp(-ε²x²) · exp(c z)`.
/// The m-th function takes the divided difference of `exp(c z)` over
/// `c_0..c_m`:
///
/// `ψ_m(x) = exp(-ε²x²) Σ_{k≥m} h_{k-m}(c_0..c_m) z^k / k!`
///
/// where `h_r` is the complete homogeneous symmetric polynomial of degree
/// `r`. Orders below `m` cancel exactly because the series starts at `k = m`,
/// so nothing is ever formed by subtracting nearly equal exponentials.
#[derive(Debug, Clone, PartialEq)]
pub struct StableBasis {
    centres: Vec<f64>,
    eps: f64,
    /// `weights[(m, j)] = 1 / Π_{l≤m, l≠j} (c_j - c_l)` for `j ≤ m`.
    weights: Matrix,
    /// `moments[m][r] = h_r(c_0..c_m)`.
    moments: Vec<Vec<f64>>,
    cmax: f64,
    scales: Vec<f64>,
}

impl StableBasis {
    pub fn new(centres: &NodeSet, eps: f64) -> Result<Self, RbfError> {
        if !(eps.is_finite() && eps > 0.0) {
            return Err(RbfError::ShapeParameter(eps));
        }
        let c = centres.coords().to_vec();
        let n = c.len();
        let weights = Matrix::from_fn(n, n, |m, j| {
            if j > m {
                return 0.0;
            }
            1.0 / (0..=m).filter(|&l| l != j).map(|l| c[j] - c[l]).product::<f64>()
        });

        let mut moments = Vec::with_capacity(n);
        let mut prev = vec![0.0; MAX_TERMS + 2];
        for (m, &cm) in c.iter().enumerate() {
            let mut cur = vec![0.0; MAX_TERMS + 2];
            cur[0] = 1.0;
            for r in 1..cur.len() {
                let lower = if m == 0 { 0.0 } else { prev[r] };
                cur[r] = lower + cm * cur[r - 1];
            }
            moments.push(cur.clone());
            prev = cur;
        }

        let cmax = c.iter().fold(0.0f64, |a, &x| a.max(x.abs()));
        let mut basis = Self { centres: c, eps, weights, moments, cmax, scales: vec![1.0; n] };
        let scales = (0..n)
            .map(|m| {
                (0..NORMALIZATION_SAMPLES)
                    .map(|i| -1.0 + 2.0 * i as f64 / (NORMALIZATION_SAMPLES - 1) as f64)
                    .map(|x| basis.raw(m, x).0.abs())
                    .fold(0.0, f64::max)
            })
            .collect();
        basis.scales = scales;
        Ok(basis)
    }

    pub fn len(&self) -> usize {
        self.centres.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centres.is_empty()
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn centres(&self) -> &[f64] {
        &self.centres
    }

    /// Divided-difference weights (before the Gaussian factor and scaling).
    pub fn divided_difference_weights(&self) -> &Matrix {
        &self.weights
    }

    pub fn scales(&self) -> &[f64] {
        &self.scales
    }

    /// Coefficients `W` with `ψ_m = Σ_j W[m][j] exp(-ε²(x - c_j)²)`.
    ///
    /// Only meaningful at moderate ε; the entries grow like ε^(-2m).
    pub fn gaussian_coefficients(&self) -> Matrix {
        let e2 = self.eps * self.eps;
        let n = self.len();
        let z_scale = |m: usize| (2.0 * e2).powi(m as i32);
        Matrix::from_fn(n, n, |m, j| {
            self.weights[(m, j)] * (e2 * self.centres[j] * self.centres[j]).exp() / z_scale(m) / self.scales[m]
        })
    }

    /// `ψ_m(x)` for every `m`.
    pub fn eval(&self, x: f64) -> Vec<f64> {
        (0..self.len()).map(|m| self.raw(m, x).0 / self.scales[m]).collect()
    }

    /// `ψ_m'(x)` for every `m`.
    pub fn deriv(&self, x: f64) -> Vec<f64> {
        (0..self.len()).map(|m| self.raw(m, x).1 / self.scales[m]).collect()
    }

    /// Evaluation matrix `E[i][m] = ψ_m(x_i)`.
    pub fn evaluation_matrix(&self, points: &[f64]) -> Matrix {
        let rows: Vec<Vec<f64>> = points.iter().map(|&x| self.eval(x)).collect();
        Matrix::from_rows(&rows)
    }

    /// Unscaled `(ψ_m(x), ψ_m'(x))`, with the constant factor `(2ε²)^m`
    /// dropped so that flat functions stay O(1) before normalization.
    fn raw(&self, m: usize, x: f64) -> (f64, f64) {
        let e2 = self.eps * self.eps;
        let g = (-e2 * x * x).exp();
        let z = 2.0 * e2 * x;
        let h = &self.moments[m];

        // S(z) / (2ε²)^m = x^m / m! · Σ_r h_r z^r m!/(m+r)!
        let value_series = self.series(|r| h[r], z, m);
        let s = x.powi(m as i32) / factorial(m) * value_series;

        // 2ε² S'(z) / (2ε²)^m: for m ≥ 1 the series of index m - 1 with the
        // same moments; for m = 0 the shifted moments h_{r+1}.
        let ds = if m == 0 {
            2.0 * e2 * self.series(|r| h[r + 1], z, 0)
        } else {
            x.powi(m as i32 - 1) / factorial(m - 1) * self.series(|r| h[r], z, m - 1)
        };
        // d/dx [g S] = g (-2ε²x S + 2ε² S'), keeping the (2ε²)^m convention.
        let value = g * s;
        let deriv = g * (-2.0 * e2 * x * s + ds);
        (value, deriv)
    }

    /// `Σ_{r≥0} coef(r) z^r p!/(p+r)!`, truncated once the remaining tail
    /// is below [`SERIES_RTOL`] of the running sum.
    fn series(&self, coef: impl Fn(usize) -> f64, z: f64, p: usize) -> f64 {
        let bound_ratio = self.cmax * z.abs();
        let mut sum = coef(0);
        let mut t = 1.0;
        let mut bound = 1.0;
        for r in 1..=MAX_TERMS {
            t *= z / (p + r) as f64;
            bound *= bound_ratio / r as f64;
            sum += coef(r) * t;
            // Past r > 2 c|z| the bound shrinks at least geometrically by ½,
            // so the tail is below twice the current bound.
            if r as f64 > 2.0 * bound_ratio && 2.0 * bound * (p + r + 1) as f64 <= SERIES_RTOL * sum.abs() {
                break;
            }
            if bound == 0.0 {
                break;
            }
        }
        sum
    }
}

fn factorial(m: usize) -> f64 {
    (1..=m).map(|k| k as f64).product()
}
