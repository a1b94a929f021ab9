use super::{LinalgError, Matrix, Real};

/// LU factorization with partial pivoting, `P·A = L·U`, packed in one matrix.
pub struct Lu<T> {
    lu: Matrix<T>,
    perm: Vec<usize>,
}

impl<T: Real> Lu<T> {
    pub fn factor(a: &Matrix<T>) -> Result<Self, LinalgError> {
        if !a.is_square() {
            return Err(LinalgError::Dimension {
                op: "lu",
                detail: format!("{}x{} is not square", a.rows(), a.cols()),
            });
        }
        let n = a.rows();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (p, pivot) =
                (k..n)
                    .map(|i| (i, lu[(i, k)].abs()))
                    .fold((k, T::zero()), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pivot == T::zero() {
                return Err(LinalgError::Singular);
            }
            lu.swap_rows(k, p);
            perm.swap(k, p);
            let d = lu[(k, k)];
            for i in k + 1..n {
                let l = lu[(i, k)] / d;
                lu[(i, k)] = l;
                if l != T::zero() {
                    for j in k + 1..n {
                        let u = lu[(k, j)];
                        lu[(i, j)] -= l * u;
                    }
                }
            }
        }
        Ok(Lu { lu, perm })
    }

    /// Solves `A·X = B` for every column of `b`.
    pub fn solve(&self, b: &Matrix<T>) -> Matrix<T> {
        let n = self.lu.rows();
        assert_eq!(b.rows(), n, "lu solve shape mismatch");
        let m = b.cols();
        let mut x = Matrix::from_fn(n, m, |i, j| b[(self.perm[i], j)]);
        for j in 0..m {
            for i in 0..n {
                let mut s = x[(i, j)];
                for k in 0..i {
                    s -= self.lu[(i, k)] * x[(k, j)];
                }
                x[(i, j)] = s;
            }
            for i in (0..n).rev() {
                let mut s = x[(i, j)];
                for k in i + 1..n {
                    s -= self.lu[(i, k)] * x[(k, j)];
                }
                x[(i, j)] = s / self.lu[(i, i)];
            }
        }
        x
    }
}

pub fn solve<T: Real>(a: &Matrix<T>, b: &Matrix<T>) -> Result<Matrix<T>, LinalgError> {
    if a.rows() != b.rows() {
        return Err(LinalgError::Dimension {
            op: "solve",
            detail: format!("{}x{} vs rhs {}x{}", a.rows(), a.cols(), b.rows(), b.cols()),
        });
    }
    let x = Lu::factor(a)?.solve(b);
    if x.is_finite() {
        Ok(x)
    } else {
        Err(LinalgError::Singular)
    }
}

pub fn inverse<T: Real>(a: &Matrix<T>) -> Result<Matrix<T>, LinalgError> {
    solve(a, &Matrix::identity(a.rows()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_of_permuted_matrix() {
        let a = Matrix::from_rows(&[[0.0, 2.0, 1.0], [1.0, 0.0, 0.0], [3.0, 1.0, 4.0]]);
        let inv = inverse(&a).unwrap();
        let err = (&(&a * &inv) - &Matrix::identity(3)).max_abs();
        assert!(err < 1e-15, "{err}");
    }

    #[test]
    fn singular_is_reported() {
        let a = Matrix::from_rows(&[[1.0, 2.0], [2.0, 4.0]]);
        assert_eq!(inverse(&a).err(), Some(LinalgError::Singular));
    }
}
