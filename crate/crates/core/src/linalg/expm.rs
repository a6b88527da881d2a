use num_complex::Complex;

use super::dense::CMatrix;
use super::eig::{hermitian_eig, HermitianEigen};
use super::lu::Lu;
use super::scalar::{cx, Real};
use super::LinalgError;

/// Minimum angular distance from `-1` accepted by [`matrix_log_principal`].
pub const BRANCH_MARGIN: f64 = 1e-6;

/// Scaling and squaring with a Taylor kernel on `X / 2^s`, `||X/2^s||_1 <= 1/2`.
pub fn matrix_exp<T: Real>(x: &CMatrix<T>) -> Result<CMatrix<T>, LinalgError> {
    if !x.is_square() {
        return Err(LinalgError::Precondition("matrix_exp of non-square matrix".into()));
    }
    if !x.is_finite() {
        return Err(LinalgError::Numerical("matrix_exp: non-finite input".into()));
    }
    let n = x.rows();
    let nrm = x.norm_one();
    let half = T::lit(0.5);
    let mut s: i32 = 0;
    if nrm > half {
        s = (nrm / half).log2().ceil().to_i32().unwrap_or(0).max(0);
    }
    let y = x.scale_real(T::lit(0.5f64.powi(s)));
    let mut sum = CMatrix::identity(n);
    let mut term = CMatrix::identity(n);
    for k in 1..=40 {
        term = term.matmul(&y).scale_real(T::one() / T::from_usize_lossy(k));
        sum = &sum + &term;
        if term.max_abs() <= T::epsilon() * sum.max_abs() {
            break;
        }
    }
    for _ in 0..s {
        sum = sum.matmul(&sum);
    }
    if !sum.is_finite() {
        return Err(LinalgError::Numerical("matrix_exp overflow".into()));
    }
    Ok(sum)
}

/// Spectral data of a unitary matrix: `U = V diag(exp(i theta)) V^*`, `theta` in `(-pi, pi)`.
#[derive(Clone, Debug)]
pub struct UnitarySpectrum<T: Real> {
    pub phases: Vec<T>,
    pub vectors: CMatrix<T>,
}

impl<T: Real> UnitarySpectrum<T> {
    pub fn log(&self) -> CMatrix<T> {
        spectral_function(&self.vectors, &self.phases, |t| cx(T::zero(), t))
    }

    /// Fréchet derivative of the principal logarithm at `U` in direction `e`.
    pub fn log_derivative(&self, e: &CMatrix<T>) -> CMatrix<T> {
        let th = &self.phases;
        hadamard_in_basis(&self.vectors, e, |p, q| {
            let d = (th[p] - th[q]) * T::lit(0.5);
            let ratio = if d.abs() < T::lit(1e-4) { T::one() + d * d / T::lit(6.0) } else { d / d.sin() };
            Complex::from_polar(ratio, -(th[p] + th[q]) * T::lit(0.5))
        })
    }
}

pub fn unitary_tolerance<T: Real>() -> T {
    T::epsilon().sqrt()
}

/// Principal logarithm of a unitary matrix via the Cayley transform.
pub fn matrix_log_principal<T: Real>(u: &CMatrix<T>) -> Result<CMatrix<T>, LinalgError> {
    Ok(unitary_spectrum(u)?.log())
}

/// Phases and eigenvectors of a unitary with spectrum away from `-1`.
pub fn unitary_spectrum<T: Real>(u: &CMatrix<T>) -> Result<UnitarySpectrum<T>, LinalgError> {
    if !u.is_square() {
        return Err(LinalgError::Precondition("log of non-square matrix".into()));
    }
    let defect = u.unitarity_defect();
    if !(defect <= unitary_tolerance::<T>()) {
        return Err(LinalgError::Precondition(format!(
            "matrix_log_principal: input not unitary (defect {:e})",
            defect.to_f64().unwrap_or(f64::NAN)
        )));
    }
    let n = u.rows();
    let id = CMatrix::<T>::identity(n);
    let branch = |detail: String| LinalgError::Branch(detail);
    // S = i (I - U)(I + U)^{-1}, solved from the right through the transpose.
    let lu = Lu::factor(&(&id + u).transpose()).map_err(|_| branch("eigenvalue at -1".into()))?;
    let margin = T::lit(BRANCH_MARGIN);
    // |1 + e^{i theta}| ~ pi - |theta| near the branch.
    if lu.min_pivot() < margin * T::lit(1e-3) {
        return Err(branch("eigenvalue numerically at -1".into()));
    }
    let s = lu.solve(&(&id - u).transpose()).transpose().scale(cx(T::zero(), T::one())).hermitian_part();
    let HermitianEigen { values, vectors } = hermitian_eig(&s)?;
    let phases: Vec<T> = values.iter().map(|&t| T::lit(2.0) * t.atan()).collect();
    let worst = phases.iter().fold(T::zero(), |m, &t| m.max(t.abs()));
    if T::PI() - worst < margin {
        return Err(branch(format!(
            "eigenvalue phase {:e} within {:e} of pi",
            worst.to_f64().unwrap_or(f64::NAN),
            BRANCH_MARGIN
        )));
    }
    Ok(UnitarySpectrum { phases, vectors })
}

/// Spectral data of a skew-Hermitian matrix: `X = V diag(i theta) V^*`.
#[derive(Clone, Debug)]
pub struct SkewSpectrum<T: Real> {
    pub angles: Vec<T>,
    pub vectors: CMatrix<T>,
}

impl<T: Real> SkewSpectrum<T> {
    pub fn new(x: &CMatrix<T>) -> Result<Self, LinalgError> {
        let h = x.scale(cx(T::zero(), -T::one()));
        let HermitianEigen { values, vectors } = hermitian_eig(&h)?;
        Ok(Self { angles: values, vectors })
    }

    pub fn exp(&self) -> CMatrix<T> {
        spectral_function(&self.vectors, &self.angles, |t| Complex::from_polar(T::one(), t))
    }

    /// Fréchet derivative of `exp` at `X` in direction `e`.
    pub fn exp_derivative(&self, e: &CMatrix<T>) -> CMatrix<T> {
        let th = &self.angles;
        hadamard_in_basis(&self.vectors, e, |p, q| {
            let d = (th[p] - th[q]) * T::lit(0.5);
            let sinc = if d.abs() < T::lit(1e-4) { T::one() - d * d / T::lit(6.0) } else { d.sin() / d };
            Complex::from_polar(sinc, (th[p] + th[q]) * T::lit(0.5))
        })
    }
}

fn spectral_function<T: Real>(v: &CMatrix<T>, x: &[T], f: impl Fn(T) -> Complex<T>) -> CMatrix<T> {
    let n = x.len();
    let fx: Vec<Complex<T>> = x.iter().map(|&t| f(t)).collect();
    let mut vs = v.clone();
    for i in 0..n {
        for j in 0..n {
            vs[(i, j)] *= fx[j];
        }
    }
    vs.matmul(&v.adjoint())
}

/// `V (F o (V^* E V)) V^*` for a divided-difference kernel `F`.
fn hadamard_in_basis<T: Real>(
    v: &CMatrix<T>,
    e: &CMatrix<T>,
    kernel: impl Fn(usize, usize) -> Complex<T>,
) -> CMatrix<T> {
    let mut inner = v.adjoint().matmul(e).matmul(v);
    let n = inner.rows();
    for p in 0..n {
        for q in 0..n {
            inner[(p, q)] *= kernel(p, q);
        }
    }
    v.matmul(&inner).matmul(&v.adjoint())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random::random_skew_hermitian;
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn exp_of_zero_is_identity() {
        let e = matrix_exp(&CMatrix::<f64>::zeros(4, 4)).unwrap();
        assert_eq!(e, CMatrix::identity(4));
    }

    #[test]
    fn scalar_i_pi() {
        let x = CMatrix::from_diagonal(&[Complex64::new(0.0, std::f64::consts::PI)]);
        let e = matrix_exp(&x).unwrap();
        assert!((e[(0, 0)] + 1.0).norm() < 1e-14);
    }

    #[test]
    fn skew_exp_is_unitary_and_inverts() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..5 {
            let x = random_skew_hermitian::<f64, _>(9, 1.0, &mut rng);
            let u = matrix_exp(&x).unwrap();
            let ui = matrix_exp(&x.scale_real(-1.0)).unwrap();
            assert!(u.unitarity_defect() < 1e-10);
            assert!(u.matmul(&ui).max_abs_diff(&CMatrix::identity(9)) < 1e-10);
            let spec = SkewSpectrum::new(&x).unwrap();
            assert!(spec.exp().max_abs_diff(&u) < 1e-12);
        }
    }

    #[test]
    fn log_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..5 {
            let x = random_skew_hermitian::<f64, _>(7, 0.5, &mut rng);
            let u = matrix_exp(&x).unwrap();
            let l = matrix_log_principal(&u).unwrap();
            assert!(l.max_abs_diff(&x) < 1e-9);
            assert!(l.is_skew_hermitian(1e-12));
        }
        let l = matrix_log_principal(&CMatrix::<f64>::identity(3)).unwrap();
        assert!(l.max_abs() < 1e-15);
    }

    #[test]
    fn branch_error_at_minus_one() {
        let u = CMatrix::from_diagonal(&[Complex64::new(-1.0, 0.0), Complex64::new(1.0, 0.0)]);
        assert!(matches!(matrix_log_principal(&u), Err(LinalgError::Branch(_))));
        let t = std::f64::consts::PI - 1e-8;
        let u = CMatrix::from_diagonal(&[Complex64::from_polar(1.0, t)]);
        assert!(matches!(matrix_log_principal(&u), Err(LinalgError::Branch(_))));
    }

    #[test]
    fn frechet_derivatives_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let x = random_skew_hermitian::<f64, _>(5, 1.2, &mut rng);
        let e = random_skew_hermitian::<f64, _>(5, 1.0, &mut rng);
        let h = 1e-4;
        let fd = |f: &dyn Fn(&CMatrix<f64>) -> CMatrix<f64>, at: &CMatrix<f64>| {
            let p = |s: f64| f(&(at + &e.scale_real(s)));
            let num = &(&p(-2.0 * h).scale_real(1.0) - &p(-h).scale_real(8.0)) + &(&p(h).scale_real(8.0) - &p(2.0 * h));
            num.scale_real(1.0 / (12.0 * h))
        };
        let spec = SkewSpectrum::new(&x).unwrap();
        let de = spec.exp_derivative(&e);
        let fe = fd(&|m| matrix_exp(m).unwrap(), &x);
        assert!(de.max_abs_diff(&fe) < 1e-8);

        let u = spec.exp();
        let ue = u.matmul(&e);
        let us = unitary_spectrum(&u).unwrap();
        let dl = us.log_derivative(&ue);
        let h2 = 1e-4;
        let path = |s: f64| {
            let es = matrix_exp(&e.scale_real(s)).unwrap();
            matrix_log_principal(&u.matmul(&es)).unwrap()
        };
        let fl = (&(&path(-2.0 * h2) - &path(-h2).scale_real(8.0)) + &(&path(h2).scale_real(8.0) - &path(2.0 * h2)))
            .scale_real(1.0 / (12.0 * h2));
        assert!(dl.max_abs_diff(&fl) < 1e-8);
    }
}
