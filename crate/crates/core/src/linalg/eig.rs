use num_complex::Complex;

use super::dense::CMatrix;
use super::scalar::{cone, czero, Real};
use super::LinalgError;

/// Spectral decomposition `M = V diag(values) V^*`, values ascending.
#[derive(Clone, Debug)]
pub struct HermitianEigen<T: Real> {
    pub values: Vec<T>,
    pub vectors: CMatrix<T>,
}

impl<T: Real> HermitianEigen<T> {
    pub fn vector(&self, j: usize) -> Vec<Complex<T>> {
        self.vectors.column(j)
    }

    /// `V diag(f(values)) V^*`
    pub fn apply_function(&self, f: impl Fn(T) -> Complex<T>) -> CMatrix<T> {
        let n = self.values.len();
        let fv: Vec<Complex<T>> = self.values.iter().map(|&x| f(x)).collect();
        let mut scaled = self.vectors.clone();
        for i in 0..n {
            for j in 0..n {
                scaled[(i, j)] *= fv[j];
            }
        }
        scaled.matmul(&self.vectors.adjoint())
    }

    /// `max |M V - V diag(values)|`
    pub fn residual(&self, m: &CMatrix<T>) -> T {
        let mv = m.matmul(&self.vectors);
        let n = self.values.len();
        let mut r = T::zero();
        for i in 0..m.rows() {
            for j in 0..n {
                let d = mv[(i, j)] - self.vectors[(i, j)].scale(self.values[j]);
                r = r.max(d.norm());
            }
        }
        r
    }
}

/// Hermitian tolerance for the precondition check.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Eigendecomposition of a Hermitian matrix via Householder tridiagonalization and implicit QL.
pub fn hermitian_eig<T: Real>(m: &CMatrix<T>) -> Result<HermitianEigen<T>, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::Precondition(format!(
            "hermitian_eig: matrix is {}x{}, not square",
            m.rows(),
            m.cols()
        )));
    }
    if !m.is_finite() {
        return Err(LinalgError::Numerical("hermitian_eig: non-finite entry".into()));
    }
    let tol = hermitian_tolerance::<T>();
    if !m.is_hermitian(tol) {
        return Err(LinalgError::Precondition(format!(
            "hermitian_eig: input not Hermitian (defect {:e})",
            m.hermitian_defect().to_f64().unwrap_or(f64::NAN)
        )));
    }
    let n = m.rows();
    if n == 0 {
        return Ok(HermitianEigen { values: vec![], vectors: CMatrix::zeros(0, 0) });
    }
    let mut a = m.hermitian_part();
    let mut q = CMatrix::<T>::identity(n);
    householder_tridiagonalize(&mut a, &mut q);

    let mut d: Vec<T> = (0..n).map(|i| a[(i, i)].re).collect();
    let mut e = vec![T::zero(); n];
    // Diagonal phases make the subdiagonal real and non-negative.
    let mut phase = vec![cone::<T>(); n];
    for i in 0..n.saturating_sub(1) {
        let b = a[(i + 1, i)];
        let r = b.norm();
        e[i] = r;
        phase[i + 1] = if r > T::zero() { phase[i] * b.unscale(r) } else { phase[i] };
    }
    let mut z = vec![T::zero(); n * n];
    for i in 0..n {
        z[i * n + i] = T::one();
    }
    tql2(&mut d, &mut e, Some(&mut z), n)?;

    // V = Q * P * Z
    let mut qp = q;
    for i in 0..n {
        for j in 0..n {
            qp[(i, j)] *= phase[j];
        }
    }
    let mut v = CMatrix::<T>::zeros(n, n);
    for i in 0..n {
        for k in 0..n {
            let a_ik = qp[(i, k)];
            if a_ik.re == T::zero() && a_ik.im == T::zero() {
                continue;
            }
            for j in 0..n {
                v[(i, j)] += a_ik.scale(z[k * n + j]);
            }
        }
    }
    Ok(HermitianEigen { values: d, vectors: v })
}

/// Eigenvalues only of a Hermitian matrix.
pub fn hermitian_eigvals<T: Real>(m: &CMatrix<T>) -> Result<Vec<T>, LinalgError> {
    if !m.is_square() || !m.is_hermitian(hermitian_tolerance::<T>()) {
        return Err(LinalgError::Precondition("hermitian_eigvals: input not square Hermitian".into()));
    }
    let n = m.rows();
    let mut a = m.hermitian_part();
    let mut q = CMatrix::<T>::zeros(0, 0);
    householder_reduce(&mut a, &mut q, false);
    let mut d: Vec<T> = (0..n).map(|i| a[(i, i)].re).collect();
    let mut e = vec![T::zero(); n];
    for i in 0..n.saturating_sub(1) {
        e[i] = a[(i + 1, i)].norm();
    }
    tql2(&mut d, &mut e, None, n)?;
    Ok(d)
}

pub(crate) fn hermitian_tolerance<T: Real>() -> T {
    // f32 cannot meet the f64 tolerance; scale by its epsilon ratio.
    let ratio = T::epsilon().to_f64().unwrap_or(f64::EPSILON) / f64::EPSILON;
    T::lit(HERMITIAN_TOL * ratio)
}

fn householder_tridiagonalize<T: Real>(a: &mut CMatrix<T>, q: &mut CMatrix<T>) {
    householder_reduce(a, q, true);
}

/// In-place `A <- H A H` with `H = I - 2 v v^*` on trailing blocks; accumulates `Q <- Q H`.
fn householder_reduce<T: Real>(a: &mut CMatrix<T>, q: &mut CMatrix<T>, accumulate: bool) {
    let n = a.rows();
    if n < 3 {
        return;
    }
    let two = T::lit(2.0);
    for k in 0..n - 2 {
        let s = k + 1;
        let len = n - s;
        let mut v: Vec<Complex<T>> = (s..n).map(|i| a[(i, k)]).collect();
        let xnorm = super::scalar::norm(&v);
        if xnorm == T::zero() {
            continue;
        }
        let x0 = v[0];
        let ph = if x0.norm() > T::zero() { x0.unscale(x0.norm()) } else { cone() };
        let alpha = -ph.scale(xnorm);
        v[0] -= alpha;
        let vnorm = super::scalar::norm(&v);
        if vnorm == T::zero() {
            continue;
        }
        for z in v.iter_mut() {
            *z = z.unscale(vnorm);
        }
        // p = A_sub v, K = v^* p, w = p - K v
        let mut p = vec![czero::<T>(); len];
        for (ii, pi) in p.iter_mut().enumerate() {
            let row = a.row(s + ii);
            let mut acc = czero();
            for (jj, vj) in v.iter().enumerate() {
                acc += row[s + jj] * vj;
            }
            *pi = acc;
        }
        let kk = super::scalar::dot(&v, &p).re;
        let w: Vec<Complex<T>> = p.iter().zip(&v).map(|(pi, vi)| pi - vi.scale(kk)).collect();
        for ii in 0..len {
            for jj in 0..len {
                let upd = (v[ii] * w[jj].conj() + w[ii] * v[jj].conj()).scale(two);
                a[(s + ii, s + jj)] -= upd;
            }
        }
        a[(s, k)] = alpha;
        a[(k, s)] = alpha.conj();
        for i in s + 1..n {
            a[(i, k)] = czero();
            a[(k, i)] = czero();
        }
        if accumulate {
            for r in 0..n {
                let mut qv = czero::<T>();
                for (jj, vj) in v.iter().enumerate() {
                    qv += q[(r, s + jj)] * vj;
                }
                let qv2 = qv.scale(two);
                for (jj, vj) in v.iter().enumerate() {
                    q[(r, s + jj)] -= qv2 * vj.conj();
                }
            }
        }
    }
}

/// Implicit QL on a real symmetric tridiagonal matrix.
///
/// `d` holds the diagonal, `e[i]` couples `i` and `i+1`, `e[n-1]` is ignored. On return `d`
/// is ascending and column `j` of the row-major `z` (if given) is the matching eigenvector
/// rotated by the input `z`.
pub fn tql2<T: Real>(d: &mut [T], e: &mut [T], mut z: Option<&mut [T]>, n: usize) -> Result<(), LinalgError> {
    if n == 0 {
        return Ok(());
    }
    e[n - 1] = T::zero();
    let eps = T::epsilon();
    let mut f = T::zero();
    let mut tst1 = T::zero();
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > 60 {
                    return Err(LinalgError::NonConvergence("tridiagonal QL exceeded 60 sweeps".into()));
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (T::lit(2.0) * e[l]);
                let mut r = p.hypot(T::one());
                if p < T::zero() {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().take(n).skip(l + 2) {
                    *di -= h;
                }
                f += h;
                p = d[m];
                let mut c = T::one();
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = T::zero();
                let mut s2 = T::zero();
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if let Some(z) = z.as_deref_mut() {
                        for k in 0..n {
                            let zk = &mut z[k * n..(k + 1) * n];
                            let hh = zk[i + 1];
                            zk[i + 1] = s * zk[i] + c * hh;
                            zk[i] = c * zk[i] - s * hh;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = T::zero();
    }
    // Selection sort keeps eigenvector columns aligned.
    for i in 0..n.saturating_sub(1) {
        let mut k = i;
        let mut p = d[i];
        for (j, &dj) in d.iter().enumerate().take(n).skip(i + 1) {
            if dj < p {
                k = j;
                p = dj;
            }
        }
        if k != i {
            d.swap(i, k);
            if let Some(z) = z.as_deref_mut() {
                for r in 0..n {
                    z.swap(r * n + i, r * n + k);
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random::random_hermitian;
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn real_diag(v: &[f64]) -> CMatrix<f64> {
        CMatrix::from_diagonal(&v.iter().map(|&x| Complex64::new(x, 0.0)).collect::<Vec<_>>())
    }

    #[test]
    fn diagonal_input_sorted() {
        let e = hermitian_eig(&real_diag(&[3.0, 1.0, 2.0])).unwrap();
        assert_eq!(e.values, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn pauli_x() {
        let m = CMatrix::from_fn(2, 2, |i, j| Complex64::new(if i != j { 1.0 } else { 0.0 }, 0.0));
        let e = hermitian_eig(&m).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-15);
        assert!((e.values[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn random_hermitian_residual() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let m = random_hermitian::<f64, _>(50, &mut rng);
        let e = hermitian_eig(&m).unwrap();
        let emax = e.values.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        assert!(e.residual(&m) <= 1e-10 * 50.0 * emax);
        assert!(e.vectors.unitarity_defect() < 1e-10);
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        let vals = hermitian_eigvals(&m).unwrap();
        for (a, b) in vals.iter().zip(&e.values) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m = CMatrix::<f64>::zeros(2, 2);
        m[(0, 1)] = Complex64::new(1.0, 0.0);
        assert!(matches!(hermitian_eig(&m), Err(LinalgError::Precondition(_))));
    }

    #[test]
    fn single_precision_path() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = random_hermitian::<f32, _>(20, &mut rng);
        let e = hermitian_eig(&m).unwrap();
        assert!(e.residual(&m) < 1e-4);
    }

    #[test]
    fn degenerate_spectrum() {
        let e = hermitian_eig(&real_diag(&[2.0, 2.0, 2.0, -1.0])).unwrap();
        assert_eq!(e.values, vec![-1.0, 2.0, 2.0, 2.0]);
        assert!(e.vectors.unitarity_defect() < 1e-14);
    }
}
