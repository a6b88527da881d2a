use num_complex::Complex;

use super::dense::CMatrix;
use super::scalar::{czero, Real};
use super::LinalgError;

/// `P A = L U` with partial pivoting, packed in one matrix.
#[derive(Clone, Debug)]
pub struct Lu<T: Real> {
    packed: CMatrix<T>,
    perm: Vec<usize>,
    min_pivot: T,
}

impl<T: Real> Lu<T> {
    pub fn factor(a: &CMatrix<T>) -> Result<Self, LinalgError> {
        if !a.is_square() {
            return Err(LinalgError::Precondition("LU of non-square matrix".into()));
        }
        let n = a.rows();
        let mut m = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut min_pivot = T::infinity();
        for k in 0..n {
            let mut p = k;
            let mut best = m[(k, k)].norm();
            for i in k + 1..n {
                let v = m[(i, k)].norm();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            min_pivot = min_pivot.min(best);
            if best == T::zero() {
                return Err(LinalgError::Singular(format!("zero pivot at column {k}")));
            }
            if p != k {
                for j in 0..n {
                    let t = m[(k, j)];
                    m[(k, j)] = m[(p, j)];
                    m[(p, j)] = t;
                }
                perm.swap(k, p);
            }
            let pivot = m[(k, k)];
            for i in k + 1..n {
                let l = m[(i, k)] / pivot;
                m[(i, k)] = l;
                if l.norm() == T::zero() {
                    continue;
                }
                for j in k + 1..n {
                    let u = m[(k, j)];
                    m[(i, j)] -= l * u;
                }
            }
        }
        Ok(Self { packed: m, perm, min_pivot })
    }

    /// Smallest pivot magnitude encountered.
    pub fn min_pivot(&self) -> T {
        self.min_pivot
    }

    #[allow(clippy::needless_range_loop)] // triangular sweeps read clearest indexed
    pub fn solve_vec(&self, b: &[Complex<T>]) -> Vec<Complex<T>> {
        let n = self.perm.len();
        let mut x: Vec<Complex<T>> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut acc = x[i];
            for j in 0..i {
                acc -= self.packed[(i, j)] * x[j];
            }
            x[i] = acc;
        }
        for i in (0..n).rev() {
            let mut acc = x[i];
            for j in i + 1..n {
                acc -= self.packed[(i, j)] * x[j];
            }
            x[i] = acc / self.packed[(i, i)];
        }
        x
    }

    pub fn solve(&self, b: &CMatrix<T>) -> CMatrix<T> {
        let cols: Vec<Vec<Complex<T>>> = (0..b.cols()).map(|j| self.solve_vec(&b.column(j))).collect();
        CMatrix::from_columns(b.rows(), &cols)
    }

    pub fn inverse(&self) -> CMatrix<T> {
        self.solve(&CMatrix::identity(self.perm.len()))
    }

    pub fn determinant(&self) -> Complex<T> {
        let n = self.perm.len();
        let mut det = Complex::new(T::one(), T::zero());
        for i in 0..n {
            det *= self.packed[(i, i)];
        }
        // Parity of the permutation.
        let mut seen = vec![false; n];
        let mut sign = false;
        for s in 0..n {
            if seen[s] {
                continue;
            }
            let mut len = 0;
            let mut j = s;
            while !seen[j] {
                seen[j] = true;
                j = self.perm[j];
                len += 1;
            }
            if len % 2 == 0 {
                sign = !sign;
            }
        }
        if sign {
            czero::<T>() - det
        } else {
            det
        }
    }
}
