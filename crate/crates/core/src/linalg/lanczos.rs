use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::eig::tql2;
use super::linear_map::LinearMap;
use super::random::random_vector;
use super::scalar::{axpy, czero, dot, norm, Real};
use super::LinalgError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Extremal {
    Lowest,
    Highest,
}

#[derive(Clone, Debug)]
pub struct LanczosOptions<T: Real> {
    /// Accept when `||A v - e v|| <= tol * (1 + |e|)`.
    pub tol: T,
    /// Krylov steps per run; capped by the free dimension.
    pub max_iter: usize,
    pub max_restarts: usize,
    pub seed: u64,
}

impl<T: Real> Default for LanczosOptions<T> {
    fn default() -> Self {
        Self { tol: T::lit(1e-8), max_iter: 1000, max_restarts: 5, seed: 0x5eed }
    }
}

#[derive(Clone, Debug)]
pub struct EigenPair<T: Real> {
    pub value: T,
    pub vector: Vec<Complex<T>>,
    pub residual: T,
}

/// Extremal eigenpairs of a self-adjoint operator.
///
/// One pair is locked per Lanczos run and later runs work in the orthogonal complement of the
/// locked vectors, so degenerate eigenvalues come out with their full multiplicity.
pub fn lanczos_extremal<T: Real, M: LinearMap<T> + ?Sized>(
    op: &M,
    count: usize,
    target: Extremal,
    opts: &LanczosOptions<T>,
) -> Result<Vec<EigenPair<T>>, LinalgError> {
    let n = op.dim();
    if count > n {
        return Err(LinalgError::Precondition(format!("lanczos_extremal: count {count} exceeds dimension {n}")));
    }
    let sigma = match target {
        Extremal::Lowest => T::one(),
        Extremal::Highest => -T::one(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut locked: Vec<Vec<Complex<T>>> = Vec::with_capacity(count);
    let mut pairs = Vec::with_capacity(count);
    for _ in 0..count {
        let mut restarts = 0;
        let pair = loop {
            match single_run(op, sigma, &locked, opts, &mut rng)? {
                Some(p) => break p,
                None => {
                    restarts += 1;
                    if restarts > opts.max_restarts {
                        return Err(LinalgError::NonConvergence(format!(
                            "lanczos breakdown persisted after {} restarts",
                            opts.max_restarts
                        )));
                    }
                }
            }
        };
        locked.push(pair.vector.clone());
        pairs.push(pair);
    }
    pairs.sort_by(|a, b| {
        let o = a.value.partial_cmp(&b.value).unwrap_or(std::cmp::Ordering::Equal);
        if target == Extremal::Highest {
            o.reverse()
        } else {
            o
        }
    });
    Ok(pairs)
}

fn project_out<T: Real>(w: &mut [Complex<T>], basis: &[Vec<Complex<T>>]) {
    for _ in 0..2 {
        for b in basis {
            let c = dot(b, w);
            axpy(-c, b, w);
        }
    }
}

/// `None` on breakdown before convergence.
fn single_run<T: Real, M: LinearMap<T> + ?Sized>(
    op: &M,
    sigma: T,
    locked: &[Vec<Complex<T>>],
    opts: &LanczosOptions<T>,
    rng: &mut ChaCha8Rng,
) -> Result<Option<EigenPair<T>>, LinalgError> {
    let n = op.dim();
    let free = n - locked.len();
    let tiny = T::epsilon() * T::lit(1e3);
    let mut v0 = random_vector::<T, _>(n, rng);
    project_out(&mut v0, locked);
    let nv = norm(&v0);
    if nv <= tiny {
        return Ok(None);
    }
    for z in v0.iter_mut() {
        *z = z.unscale(nv);
    }
    let max_steps = opts.max_iter.min(free).max(1);
    let mut basis: Vec<Vec<Complex<T>>> = vec![v0];
    let mut alpha: Vec<T> = Vec::new();
    let mut beta: Vec<T> = Vec::new();
    let mut w = vec![czero::<T>(); n];
    let mut last_theta: Option<T> = None;
    loop {
        let j = basis.len() - 1;
        op.apply(&basis[j], &mut w);
        if sigma < T::zero() {
            for z in w.iter_mut() {
                *z = -*z;
            }
        }
        project_out(&mut w, locked);
        let a = dot(&basis[j], &w).re;
        alpha.push(a);
        project_out(&mut w, &basis);
        let b = norm(&w);
        let steps = alpha.len();
        let exhausted = steps >= max_steps;
        let broke = b <= tiny * (T::one() + a.abs());
        let check = broke || exhausted || steps.is_multiple_of(5) || steps <= 2;
        if check {
            let mut d = alpha.clone();
            let mut e = beta.clone();
            e.push(T::zero());
            tql2(&mut d, &mut e, None, steps)?;
            let theta = d[0];
            let stable =
                last_theta.is_some_and(|t| (t - theta).abs() <= opts.tol * T::lit(1e-2) * (T::one() + theta.abs()));
            last_theta = Some(theta);
            if stable || broke || exhausted {
                if let Some(pair) = ritz_candidate(op, &alpha, &beta, &basis, opts)? {
                    return Ok(Some(pair));
                }
                if broke {
                    return Ok(None);
                }
                if exhausted {
                    return Err(LinalgError::NonConvergence(format!(
                        "lanczos did not reach tolerance in {steps} steps"
                    )));
                }
            }
        }
        beta.push(b);
        let mut next = w.clone();
        for z in next.iter_mut() {
            *z = z.unscale(b);
        }
        basis.push(next);
    }
}

fn ritz_candidate<T: Real, M: LinearMap<T> + ?Sized>(
    op: &M,
    alpha: &[T],
    beta: &[T],
    basis: &[Vec<Complex<T>>],
    opts: &LanczosOptions<T>,
) -> Result<Option<EigenPair<T>>, LinalgError> {
    let m = alpha.len();
    let mut d = alpha.to_vec();
    let mut e = beta[..m - 1].to_vec();
    e.push(T::zero());
    let mut z = vec![T::zero(); m * m];
    for i in 0..m {
        z[i * m + i] = T::one();
    }
    tql2(&mut d, &mut e, Some(&mut z), m)?;
    let n = op.dim();
    let mut x = vec![czero::<T>(); n];
    for (i, b) in basis.iter().take(m).enumerate() {
        axpy(Complex::new(z[i * m], T::zero()), b, &mut x);
    }
    let nx = norm(&x);
    for c in x.iter_mut() {
        *c = c.unscale(nx);
    }
    let ax = op.apply_vec(&x);
    let value = dot(&x, &ax).re;
    let mut r = ax;
    axpy(Complex::new(-value, T::zero()), &x, &mut r);
    let residual = norm(&r);
    if residual <= opts.tol * (T::one() + value.abs()) {
        Ok(Some(EigenPair { value, vector: x, residual }))
    } else {
        Ok(None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::dense::CMatrix;
    use crate::linalg::eig::hermitian_eig;
    use crate::linalg::linear_map::DiagonalMap;
    use crate::linalg::random::random_hermitian;

    #[test]
    fn diagonal_lowest_three() {
        let op = DiagonalMap { diag: (0..1000).map(|i| i as f64).collect() };
        let pairs = lanczos_extremal(&op, 3, Extremal::Lowest, &LanczosOptions::default()).unwrap();
        let vals: Vec<f64> = pairs.iter().map(|p| p.value).collect();
        for (v, want) in vals.iter().zip([0.0, 1.0, 2.0]) {
            assert!((v - want).abs() < 1e-8, "{vals:?}");
        }
        for p in &pairs {
            assert!(p.residual <= 1e-8 * (1.0 + p.value.abs()));
        }
    }

    #[test]
    fn dense_extremes_match_eig() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let m = random_hermitian::<f64, _>(60, &mut rng);
        let e = hermitian_eig(&m).unwrap();
        let lo = lanczos_extremal(&m, 2, Extremal::Lowest, &LanczosOptions::default()).unwrap();
        let hi = lanczos_extremal(&m, 2, Extremal::Highest, &LanczosOptions::default()).unwrap();
        assert!((lo[0].value - e.values[0]).abs() < 1e-8);
        assert!((lo[1].value - e.values[1]).abs() < 1e-8);
        assert!((hi[0].value - e.values[59]).abs() < 1e-8);
        assert!((hi[1].value - e.values[58]).abs() < 1e-8);
    }

    #[test]
    fn fourfold_degenerate_ground_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let block = random_hermitian::<f64, _>(30, &mut rng);
        let shift = hermitian_eig(&block).unwrap().values[0];
        let n = 34;
        let mut m = CMatrix::<f64>::zeros(n, n);
        for i in 0..4 {
            m[(i, i)] = Complex::new(shift - 1.0, 0.0);
        }
        for i in 0..30 {
            for j in 0..30 {
                m[(4 + i, 4 + j)] = block[(i, j)];
            }
        }
        // Hide the block structure behind a unitary change of basis.
        let q = hermitian_eig(&random_hermitian::<f64, _>(n, &mut rng)).unwrap().vectors;
        let m = q.matmul(&m).matmul(&q.adjoint()).hermitian_part();
        let pairs = lanczos_extremal(&m, 4, Extremal::Lowest, &LanczosOptions::default()).unwrap();
        for p in &pairs {
            assert!((p.value - (shift - 1.0)).abs() < 1e-8);
        }
        for a in 0..4 {
            for b in 0..a {
                assert!(dot(&pairs[a].vector, &pairs[b].vector).norm() < 1e-8);
            }
        }
    }

    #[test]
    fn count_above_dimension_rejected() {
        let op = DiagonalMap { diag: vec![1.0, 2.0] };
        assert!(lanczos_extremal(&op, 3, Extremal::Lowest, &LanczosOptions::<f64>::default()).is_err());
    }
}
