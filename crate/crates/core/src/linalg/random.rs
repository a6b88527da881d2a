use num_complex::Complex;
use rand::Rng;

use super::dense::CMatrix;
use super::scalar::Real;

/// Complex entry with real and imaginary parts uniform in `[-1, 1)`.
pub fn random_complex<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Complex<T> {
    Complex::new(T::lit(rng.gen_range(-1.0..1.0)), T::lit(rng.gen_range(-1.0..1.0)))
}

pub fn random_vector<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<Complex<T>> {
    (0..n).map(|_| random_complex(rng)).collect()
}

pub fn random_matrix<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix<T> {
    CMatrix::from_fn(n, n, |_, _| random_complex(rng))
}

pub fn random_hermitian<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix<T> {
    random_matrix::<T, R>(n, rng).hermitian_part()
}

/// Skew-Hermitian matrix rescaled to Frobenius norm `scale`.
pub fn random_skew_hermitian<T: Real, R: Rng + ?Sized>(n: usize, scale: T, rng: &mut R) -> CMatrix<T> {
    let h = random_hermitian::<T, R>(n, rng);
    let f = h.frobenius_norm();
    let s = if f > T::zero() { scale / f } else { T::zero() };
    h.scale(Complex::new(T::zero(), s))
}
