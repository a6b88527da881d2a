use num_complex::Complex;

use super::dense::CMatrix;
use super::scalar::{czero, Real};

/// Compressed sparse row complex matrix. Column indices are sorted and unique per row.
#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix<T: Real> {
    rows: usize,
    cols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<Complex<T>>,
}

impl<T: Real> CsrMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, indptr: vec![0; rows + 1], indices: vec![], values: vec![] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![Complex::new(T::one(), T::zero()); n])
    }

    pub fn from_diagonal(diag: &[Complex<T>]) -> Self {
        let n = diag.len();
        let mut indptr = Vec::with_capacity(n + 1);
        let mut indices = Vec::with_capacity(n);
        let mut values = Vec::with_capacity(n);
        indptr.push(0);
        for (i, d) in diag.iter().enumerate() {
            if d.re != T::zero() || d.im != T::zero() {
                indices.push(i);
                values.push(*d);
            }
            indptr.push(indices.len());
        }
        Self { rows: n, cols: n, indptr, indices, values }
    }

    /// Duplicates are summed; exact zeros are dropped.
    pub fn from_triplets(rows: usize, cols: usize, mut triplets: Vec<(usize, usize, Complex<T>)>) -> Self {
        triplets.sort_unstable_by_key(|a| (a.0, a.1));
        let mut indptr = vec![0usize; rows + 1];
        let mut indices = Vec::with_capacity(triplets.len());
        let mut values: Vec<Complex<T>> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (i, j, v) in triplets {
            assert!(i < rows && j < cols, "triplet ({i},{j}) out of bounds");
            if last == Some((i, j)) {
                *values.last_mut().expect("nonempty") += v;
            } else {
                indices.push(j);
                values.push(v);
                indptr[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..rows {
            indptr[i + 1] += indptr[i];
        }
        Self { rows, cols, indptr, indices, values }.pruned(T::zero())
    }

    pub fn from_dense(m: &CMatrix<T>, drop_below: T) -> Self {
        let mut t = Vec::new();
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                let v = m[(i, j)];
                if v.norm() > drop_below {
                    t.push((i, j, v));
                }
            }
        }
        Self::from_triplets(m.rows(), m.cols(), t)
    }

    /// Drop entries with modulus `<= tol`.
    pub fn pruned(self, tol: T) -> Self {
        let mut indptr = Vec::with_capacity(self.rows + 1);
        let mut indices = Vec::with_capacity(self.indices.len());
        let mut values = Vec::with_capacity(self.values.len());
        indptr.push(0);
        for i in 0..self.rows {
            for k in self.indptr[i]..self.indptr[i + 1] {
                let v = self.values[k];
                if v.norm() > tol {
                    indices.push(self.indices[k]);
                    values.push(v);
                }
            }
            indptr.push(indices.len());
        }
        Self { rows: self.rows, cols: self.cols, indptr, indices, values }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// `(column, value)` pairs of row `i`.
    pub fn row_entries(&self, i: usize) -> impl Iterator<Item = (usize, Complex<T>)> + '_ {
        let r = self.indptr[i]..self.indptr[i + 1];
        self.indices[r.clone()].iter().copied().zip(self.values[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> Complex<T> {
        let r = self.indptr[i]..self.indptr[i + 1];
        match self.indices[r.clone()].binary_search(&j) {
            Ok(k) => self.values[r.start + k],
            Err(_) => czero(),
        }
    }

    /// Iterate over all stored `(row, column, value)` entries.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, Complex<T>)> + '_ {
        (0..self.rows).flat_map(move |i| self.row_entries(i).map(move |(j, v)| (i, j, v)))
    }

    /// `y += alpha * A x`
    pub fn matvec_add(&self, alpha: Complex<T>, x: &[Complex<T>], y: &mut [Complex<T>]) {
        debug_assert_eq!(x.len(), self.cols);
        debug_assert_eq!(y.len(), self.rows);
        for (i, yi) in y.iter_mut().enumerate() {
            let mut acc = czero();
            for k in self.indptr[i]..self.indptr[i + 1] {
                acc += self.values[k] * x[self.indices[k]];
            }
            *yi += alpha * acc;
        }
    }

    pub fn matvec(&self, x: &[Complex<T>]) -> Vec<Complex<T>> {
        let mut y = vec![czero(); self.rows];
        self.matvec_add(Complex::new(T::one(), T::zero()), x, &mut y);
        y
    }

    pub fn adjoint(&self) -> Self {
        let t = self.triplets().map(|(i, j, v)| (j, i, v.conj())).collect();
        Self::from_triplets(self.cols, self.rows, t)
    }

    pub fn transpose(&self) -> Self {
        let t = self.triplets().map(|(i, j, v)| (j, i, v)).collect();
        Self::from_triplets(self.cols, self.rows, t)
    }

    pub fn scale(&self, a: Complex<T>) -> Self {
        let mut out = self.clone();
        for v in out.values.iter_mut() {
            *v *= a;
        }
        out.pruned(T::zero())
    }

    pub fn add(&self, other: &Self) -> Self {
        self.add_scaled(Complex::new(T::one(), T::zero()), other)
    }

    /// `self + a * other`
    pub fn add_scaled(&self, a: Complex<T>, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let t = self.triplets().chain(other.triplets().map(|(i, j, v)| (i, j, a * v))).collect();
        Self::from_triplets(self.rows, self.cols, t)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add_scaled(Complex::new(-T::one(), T::zero()), other)
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "sparse matmul dimension mismatch");
        let mut indptr = Vec::with_capacity(self.rows + 1);
        let mut indices = Vec::new();
        let mut values = Vec::new();
        indptr.push(0);
        let mut acc = vec![czero::<T>(); other.cols];
        let mut mark = vec![usize::MAX; other.cols];
        let mut touched: Vec<usize> = Vec::new();
        for i in 0..self.rows {
            touched.clear();
            for (k, a) in self.row_entries(i) {
                for (j, b) in other.row_entries(k) {
                    if mark[j] != i {
                        mark[j] = i;
                        acc[j] = czero();
                        touched.push(j);
                    }
                    acc[j] += a * b;
                }
            }
            touched.sort_unstable();
            for &j in &touched {
                let v = acc[j];
                if v.re != T::zero() || v.im != T::zero() {
                    indices.push(j);
                    values.push(v);
                }
            }
            indptr.push(indices.len());
        }
        Self { rows: self.rows, cols: other.cols, indptr, indices, values }
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self.matmul(other).sub(&other.matmul(self))
    }

    pub fn anticommutator(&self, other: &Self) -> Self {
        self.matmul(other).add(&other.matmul(self))
    }

    /// Kronecker product; row index of `a ⊗ b` is `ia * b.rows + ib`.
    pub fn kron(a: &Self, b: &Self) -> Self {
        let mut t = Vec::with_capacity(a.nnz() * b.nnz());
        for (ia, ja, va) in a.triplets() {
            for (ib, jb, vb) in b.triplets() {
                t.push((ia * b.rows + ib, ja * b.cols + jb, va * vb));
            }
        }
        Self::from_triplets(a.rows * b.rows, a.cols * b.cols, t)
    }

    pub fn to_dense(&self) -> CMatrix<T> {
        let mut m = CMatrix::zeros(self.rows, self.cols);
        for (i, j, v) in self.triplets() {
            m[(i, j)] += v;
        }
        m
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.norm()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.sub(other).max_abs()
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.rows.min(self.cols)).fold(czero(), |acc, i| acc + self.get(i, i))
    }

    /// Principal-like submatrix on the given row and column index lists.
    pub fn restrict(&self, row_idx: &[usize], col_idx: &[usize]) -> Self {
        let mut col_pos = vec![usize::MAX; self.cols];
        for (p, &c) in col_idx.iter().enumerate() {
            col_pos[c] = p;
        }
        let mut t = Vec::new();
        for (pi, &r) in row_idx.iter().enumerate() {
            for (j, v) in self.row_entries(r) {
                let pj = col_pos[j];
                if pj != usize::MAX {
                    t.push((pi, pj, v));
                }
            }
        }
        Self::from_triplets(row_idx.len(), col_idx.len(), t)
    }

    /// `Some(d)` when the matrix is diagonal.
    pub fn as_diagonal(&self) -> Option<Vec<Complex<T>>> {
        if self.rows != self.cols {
            return None;
        }
        let mut d = vec![czero(); self.rows];
        for (i, j, v) in self.triplets() {
            if i != j {
                return None;
            }
            d[i] = v;
        }
        Some(d)
    }
}
