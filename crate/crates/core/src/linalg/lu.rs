use super::{DenseMatrix, LinalgError, Result, Scalar};

/// LU factorization with partial (row) pivoting, `P A = L U`.
#[derive(Debug, Clone)]
pub struct Lu<T> {
    lu: DenseMatrix<T>,
    perm: Vec<usize>,
}

impl<T: Scalar> Lu<T> {
    /// Fails with [`LinalgError::Singular`] when a pivot is zero or below
    /// `n · ε_mach · max|A|`.
    pub fn factor(a: &DenseMatrix<T>) -> Result<Self> {
        if !a.is_square() {
            return Err(LinalgError::Dimension(format!("LU needs a square matrix, got {}x{}", a.rows(), a.cols())));
        }
        let n = a.rows();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let tol = n as f64 * f64::EPSILON * a.max_abs();
        for k in 0..n {
            let (p, pmag) = (k..n)
                .map(|i| (i, lu[(i, k)].modulus()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if !(pmag > tol) {
                return Err(LinalgError::Singular { pivot: pmag, column: k });
            }
            if p != k {
                for j in 0..n {
                    let t = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = t;
                }
                perm.swap(k, p);
            }
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                let l = lu[(i, k)] / pivot;
                lu[(i, k)] = l;
                if l != T::zero() {
                    for j in k + 1..n {
                        let u = lu[(k, j)];
                        lu[(i, j)] -= l * u;
                    }
                }
            }
        }
        Ok(Self { lu, perm })
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    /// Panics if `b.len()` differs from the factored dimension.
    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.dim();
        assert_eq!(b.len(), n, "Lu::solve: rhs length {} for a {n}x{n} system", b.len());
        let mut x: Vec<T> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu[(i, j)] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s -= self.lu[(i, j)] * x[j];
            }
            x[i] = s / self.lu[(i, i)];
        }
        x
    }

    /// Solves for every column of `b`.
    pub fn solve_matrix(&self, b: &DenseMatrix<T>) -> DenseMatrix<T> {
        let mut out = DenseMatrix::zeros(b.rows(), b.cols());
        for j in 0..b.cols() {
            let x = self.solve(&b.column(j));
            for (i, v) in x.into_iter().enumerate() {
                out[(i, j)] = v;
            }
        }
        out
    }
}

pub fn solve_dense<T: Scalar>(a: &DenseMatrix<T>, b: &[T]) -> Result<Vec<T>> {
    if b.len() != a.rows() {
        return Err(LinalgError::Dimension(format!("rhs length {} for {} rows", b.len(), a.rows())));
    }
    Ok(Lu::factor(a)?.solve(b))
}

pub fn invert<T: Scalar>(a: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
    let lu = Lu::factor(a)?;
    Ok(lu.solve_matrix(&DenseMatrix::identity(a.rows())))
}
