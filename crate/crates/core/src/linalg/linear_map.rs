use num_complex::Complex;
use rand::Rng;

use super::dense::CMatrix;
use super::random::{random_complex, random_vector};
use super::scalar::{czero, diff_norm, dot, norm, Real};
use super::sparse::CsrMatrix;

/// Dimension above which operators stay matrix-free.
pub const DEFAULT_MATERIALIZATION_THRESHOLD: usize = 4096;

/// Square linear operator given by its action.
pub trait LinearMap<T: Real> {
    fn dim(&self) -> usize;

    /// `y = A x`
    fn apply(&self, x: &[Complex<T>], y: &mut [Complex<T>]);

    /// `y = A^* x`
    fn apply_adjoint(&self, x: &[Complex<T>], y: &mut [Complex<T>]);

    fn apply_vec(&self, x: &[Complex<T>]) -> Vec<Complex<T>> {
        let mut y = vec![czero(); self.dim()];
        self.apply(x, &mut y);
        y
    }

    fn apply_adjoint_vec(&self, x: &[Complex<T>]) -> Vec<Complex<T>> {
        let mut y = vec![czero(); self.dim()];
        self.apply_adjoint(x, &mut y);
        y
    }

    /// Dense matrix through the action on basis vectors.
    fn materialize(&self) -> CMatrix<T> {
        let n = self.dim();
        let mut m = CMatrix::zeros(n, n);
        let mut e = vec![czero(); n];
        let mut col = vec![czero(); n];
        for j in 0..n {
            e[j] = Complex::new(T::one(), T::zero());
            self.apply(&e, &mut col);
            for i in 0..n {
                m[(i, j)] = col[i];
            }
            e[j] = czero();
        }
        m
    }
}

impl<T: Real> LinearMap<T> for CMatrix<T> {
    fn dim(&self) -> usize {
        self.rows()
    }

    fn apply(&self, x: &[Complex<T>], y: &mut [Complex<T>]) {
        y.copy_from_slice(&self.matvec(x));
    }

    fn apply_adjoint(&self, x: &[Complex<T>], y: &mut [Complex<T>]) {
        y.copy_from_slice(&self.adjoint_matvec(x));
    }

    fn materialize(&self) -> CMatrix<T> {
        self.clone()
    }
}

/// Sparse operator with its adjoint precomputed.
#[derive(Clone, Debug)]
pub struct SparseMap<T: Real> {
    pub forward: CsrMatrix<T>,
    pub adjoint: CsrMatrix<T>,
}

impl<T: Real> SparseMap<T> {
    pub fn new(m: CsrMatrix<T>) -> Self {
        let adjoint = m.adjoint();
        Self { forward: m, adjoint }
    }
}

impl<T: Real> LinearMap<T> for SparseMap<T> {
    fn dim(&self) -> usize {
        self.forward.rows()
    }

    fn apply(&self, x: &[Complex<T>], y: &mut [Complex<T>]) {
        y.fill(czero());
        self.forward.matvec_add(Complex::new(T::one(), T::zero()), x, y);
    }

    fn apply_adjoint(&self, x: &[Complex<T>], y: &mut [Complex<T>]) {
        y.fill(czero());
        self.adjoint.matvec_add(Complex::new(T::one(), T::zero()), x, y);
    }

    fn materialize(&self) -> CMatrix<T> {
        self.forward.to_dense()
    }
}

/// Real diagonal operator.
#[derive(Clone, Debug)]
pub struct DiagonalMap<T: Real> {
    pub diag: Vec<T>,
}

impl<T: Real> LinearMap<T> for DiagonalMap<T> {
    fn dim(&self) -> usize {
        self.diag.len()
    }

    fn apply(&self, x: &[Complex<T>], y: &mut [Complex<T>]) {
        for ((yi, xi), d) in y.iter_mut().zip(x).zip(&self.diag) {
            *yi = xi.scale(*d);
        }
    }

    fn apply_adjoint(&self, x: &[Complex<T>], y: &mut [Complex<T>]) {
        self.apply(x, y)
    }
}

/// `A^2` for a self-adjoint `A`, without materializing.
pub struct Squared<'a, T: Real, M: LinearMap<T> + ?Sized> {
    pub inner: &'a M,
    _marker: std::marker::PhantomData<T>,
}

impl<'a, T: Real, M: LinearMap<T> + ?Sized> Squared<'a, T, M> {
    pub fn new(inner: &'a M) -> Self {
        Self { inner, _marker: std::marker::PhantomData }
    }
}

impl<T: Real, M: LinearMap<T> + ?Sized> LinearMap<T> for Squared<'_, T, M> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn apply(&self, x: &[Complex<T>], y: &mut [Complex<T>]) {
        let mut t = vec![czero(); x.len()];
        self.inner.apply(x, &mut t);
        self.inner.apply(&t, y);
    }

    fn apply_adjoint(&self, x: &[Complex<T>], y: &mut [Complex<T>]) {
        let mut t = vec![czero(); x.len()];
        self.inner.apply_adjoint(x, &mut t);
        self.inner.apply_adjoint(&t, y);
    }
}

/// Largest relative defect of `A(ax + by) = aAx + bAy` over random probes.
pub fn linearity_defect<T: Real, M: LinearMap<T> + ?Sized, R: Rng + ?Sized>(op: &M, probes: usize, rng: &mut R) -> T {
    let n = op.dim();
    let mut worst = T::zero();
    for _ in 0..probes {
        let x = random_vector::<T, R>(n, rng);
        let y = random_vector::<T, R>(n, rng);
        let a: Complex<T> = random_complex(rng);
        let b: Complex<T> = random_complex(rng);
        let comb: Vec<Complex<T>> = x.iter().zip(&y).map(|(p, q)| a * p + b * q).collect();
        let lhs = op.apply_vec(&comb);
        let ax = op.apply_vec(&x);
        let ay = op.apply_vec(&y);
        let rhs: Vec<Complex<T>> = ax.iter().zip(&ay).map(|(p, q)| a * p + b * q).collect();
        worst = worst.max(diff_norm(&lhs, &rhs) / (T::one() + norm(&rhs)));
    }
    worst
}

/// Largest `|<u, A v> - <A^* u, v>|` over random probes, relative to `1 + |<u, A v>|`.
pub fn adjointness_defect<T: Real, M: LinearMap<T> + ?Sized, R: Rng + ?Sized>(op: &M, probes: usize, rng: &mut R) -> T {
    let n = op.dim();
    let mut worst = T::zero();
    for _ in 0..probes {
        let u = random_vector::<T, R>(n, rng);
        let v = random_vector::<T, R>(n, rng);
        let lhs = dot(&u, &op.apply_vec(&v));
        let rhs = dot(&op.apply_adjoint_vec(&u), &v);
        worst = worst.max((lhs - rhs).norm() / (T::one() + lhs.norm()));
    }
    worst
}

/// Largest `|<u, A v> - <A u, v>|` over random probes, relative to `1 + |<u, A v>|`.
pub fn self_adjointness_defect<T: Real, M: LinearMap<T> + ?Sized, R: Rng + ?Sized>(
    op: &M,
    probes: usize,
    rng: &mut R,
) -> T {
    let n = op.dim();
    let mut worst = T::zero();
    for _ in 0..probes {
        let u = random_vector::<T, R>(n, rng);
        let v = random_vector::<T, R>(n, rng);
        let lhs = dot(&u, &op.apply_vec(&v));
        let rhs = dot(&op.apply_vec(&u), &v);
        worst = worst.max((lhs - rhs).norm() / (T::one() + lhs.norm()));
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random::random_matrix;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn dense_and_sparse_probes() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = random_matrix::<f64, _>(10, &mut rng);
        assert!(linearity_defect(&a, 4, &mut rng) < 1e-12);
        assert!(adjointness_defect(&a, 4, &mut rng) < 1e-12);
        let s = SparseMap::new(CsrMatrix::from_dense(&a, 0.0));
        assert!(adjointness_defect(&s, 4, &mut rng) < 1e-12);
        assert!(s.materialize().max_abs_diff(&a) == 0.0);
        let h = a.hermitian_part();
        assert!(self_adjointness_defect(&h, 4, &mut rng) < 1e-12);
        assert!(self_adjointness_defect(&a, 4, &mut rng) > 1e-3);
    }
}
