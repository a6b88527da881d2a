//! The truncated algebra on the window `[-N, N]`: cocycle, norm, adjoint embedding.

use serde::{Deserialize, Serialize};

use crate::linalg::CsrMatrix;
use crate::{re, ComplexMatrix, Error, Result, SparseMatrix, C64};

/// Index window `{-N, ..., N}`; label `i` sits at position `i + N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Truncation {
    n: usize,
}

impl Truncation {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Precondition("truncation N must be at least 1".into()));
        }
        Ok(Self { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `2N + 1`
    pub fn dim(&self) -> usize {
        2 * self.n + 1
    }

    pub fn labels(&self) -> impl Iterator<Item = i64> + Clone {
        let n = self.n as i64;
        -n..=n
    }

    pub fn pos(&self, label: i64) -> usize {
        debug_assert!(label.unsigned_abs() as usize <= self.n);
        (label + self.n as i64) as usize
    }

    pub fn label(&self, pos: usize) -> i64 {
        pos as i64 - self.n as i64
    }

    pub fn contains(&self, label: i64) -> bool {
        label.unsigned_abs() as usize <= self.n
    }

    /// The energy operator `D = diag(i)`.
    pub fn energy(&self) -> ComplexMatrix {
        let d: Vec<C64> = self.labels().map(|i| re(i as f64)).collect();
        ComplexMatrix::from_diagonal(&d)
    }

    /// Matrix unit `e_ij` by window labels.
    pub fn unit(&self, i: i64, j: i64) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(self.dim(), self.dim());
        m[(self.pos(i), self.pos(j))] = re(1.0);
        m
    }

    fn check(&self, m: &ComplexMatrix) -> Result<()> {
        if m.rows() != self.dim() || m.cols() != self.dim() {
            return Err(Error::Dimension(format!(
                "matrix is {}x{}, window N={} needs {}x{}",
                m.rows(),
                m.cols(),
                self.n,
                self.dim(),
                self.dim()
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    /// Element of the compact real form: skew-Hermitian.
    Algebra,
    /// Group element: unitary.
    Group,
    /// Gauge field: Hermitian.
    Gauge,
    /// Complexified algebra element: no constraint.
    Complex,
}

pub const SKEW_HERMITIAN_TOL: f64 = 1e-12;
pub const HERMITIAN_TOL: f64 = 1e-12;
pub const UNITARY_TOL: f64 = 1e-10;

/// Window matrix tagged with the role it plays.
#[derive(Clone, Debug, PartialEq)]
pub struct LieMatrix {
    pub trunc: Truncation,
    pub role: Role,
    pub matrix: ComplexMatrix,
}

impl LieMatrix {
    pub fn new(trunc: Truncation, role: Role, matrix: ComplexMatrix) -> Result<Self> {
        trunc.check(&matrix)?;
        if !matrix.is_finite() {
            return Err(Error::Precondition("non-finite matrix entry".into()));
        }
        let ok = match role {
            Role::Algebra => matrix.is_skew_hermitian(SKEW_HERMITIAN_TOL),
            Role::Group => matrix.is_unitary(UNITARY_TOL),
            Role::Gauge => matrix.is_hermitian(HERMITIAN_TOL),
            Role::Complex => true,
        };
        if !ok {
            return Err(Error::Precondition(format!("matrix does not satisfy role {role:?}")));
        }
        Ok(Self { trunc, role, matrix })
    }

    pub fn complex(trunc: Truncation, matrix: ComplexMatrix) -> Result<Self> {
        Self::new(trunc, Role::Complex, matrix)
    }
}

fn shared(x: &LieMatrix, y: &LieMatrix) -> Result<Truncation> {
    if x.trunc != y.trunc {
        return Err(Error::Dimension(format!("truncations differ: N={} vs N={}", x.trunc.n, y.trunc.n)));
    }
    Ok(x.trunc)
}

/// `[D, Y]_ij = (i - j) Y_ij`
pub fn d_commutator(trunc: Truncation, y: &ComplexMatrix) -> ComplexMatrix {
    let n = trunc.dim();
    ComplexMatrix::from_fn(n, n, |p, q| y[(p, q)].scale((p as f64) - (q as f64)))
}

/// `k * sum_n (X [D, Y])_nn`, summed in window order.
///
/// Imaginary for skew-Hermitian `X, Y`; see [`omega_real`].
pub fn omega(x: &LieMatrix, y: &LieMatrix, level: i64) -> Result<C64> {
    let t = shared(x, y)?;
    Ok(omega_raw(t, &x.matrix, &y.matrix, level as f64))
}

pub(crate) fn omega_raw(t: Truncation, x: &ComplexMatrix, y: &ComplexMatrix, level: f64) -> C64 {
    let n = t.dim();
    let mut acc = C64::new(0.0, 0.0);
    for p in 0..n {
        for q in 0..n {
            acc += x[(p, q)] * y[(q, p)].scale(q as f64 - p as f64);
        }
    }
    acc.scale(level)
}

/// `-i * omega`, real for skew-Hermitian inputs.
pub fn omega_real(x: &LieMatrix, y: &LieMatrix, level: i64) -> Result<f64> {
    Ok((omega(x, y, level)? * C64::new(0.0, -1.0)).re)
}

/// `|omega(X,[Y,Z]) + omega(Y,[Z,X]) + omega(Z,[X,Y])|` at level 1.
pub fn check_jacobi(x: &LieMatrix, y: &LieMatrix, z: &LieMatrix) -> Result<f64> {
    let t = shared(x, y)?;
    shared(y, z)?;
    let (a, b, c) = (&x.matrix, &y.matrix, &z.matrix);
    let s = omega_raw(t, a, &b.commutator(c), 1.0)
        + omega_raw(t, b, &c.commutator(a), 1.0)
        + omega_raw(t, c, &a.commutator(b), 1.0);
    Ok(s.norm())
}

/// `max_i |X_ii| + ||[D, X]||_2`
pub fn banach_norm(x: &LieMatrix) -> f64 {
    let diag = x.matrix.diagonal().iter().fold(0.0f64, |m, z| m.max(z.norm()));
    diag + d_commutator(x.trunc, &x.matrix).frobenius_norm()
}

/// Grading on matrix units: `+1` on `l <= m`, `-1` on `l > m`.
pub fn epsilon_grading(trunc: Truncation) -> Vec<f64> {
    let n = trunc.dim();
    let mut eps = Vec::with_capacity(n * n);
    for l in 0..n {
        for m in 0..n {
            eps.push(if l <= m { 1.0 } else { -1.0 });
        }
    }
    eps
}

/// `ad_X` on the span of the window matrix units; `e_lm` sits at position `pos(l) * (2N+1) + pos(m)`.
pub fn adjoint_embed(x: &LieMatrix) -> SparseMatrix {
    adjoint_raw(x.trunc, &x.matrix)
}

pub(crate) fn adjoint_raw(trunc: Truncation, x: &ComplexMatrix) -> SparseMatrix {
    let n = trunc.dim();
    let mut t = Vec::new();
    for l in 0..n {
        for m in 0..n {
            let col = l * n + m;
            // X e_lm = sum_a X_al e_am
            for a in 0..n {
                let v = x[(a, l)];
                if v.norm() != 0.0 {
                    t.push((a * n + m, col, v));
                }
            }
            // -e_lm X = -sum_b X_mb e_lb
            for b in 0..n {
                let v = x[(m, b)];
                if v.norm() != 0.0 {
                    t.push((l * n + b, col, -v));
                }
            }
        }
    }
    CsrMatrix::from_triplets(n * n, n * n, t)
}

/// Lundberg cocycle evaluations on one pair.
#[derive(Clone, Debug, Serialize)]
pub struct LundbergReport {
    /// `-1/2 tr(ad_X [eps, ad_Y])`
    pub omega_l: C64,
    /// `omega(X, Y)` at level 1.
    pub omega: C64,
    /// `omega_l / omega`, present when `|omega| > 1e-8`.
    pub ratio: Option<f64>,
    /// `1/4 tr(eps [eps, ad_X] [eps, ad_Y])`
    pub quarter_form: C64,
    /// `quarter_form / omega_l`
    pub quarter_to_half_ratio: Option<f64>,
    /// `tr(ad_X [eps, ad_Y])`
    pub plain_form: C64,
    /// `plain_form / omega_l`
    pub plain_to_half_ratio: Option<f64>,
}

fn support_radius(trunc: Truncation, x: &ComplexMatrix) -> i64 {
    let n = trunc.dim();
    let mut r = 0i64;
    for p in 0..n {
        for q in 0..n {
            if x[(p, q)].norm() > 0.0 {
                r = r.max(trunc.label(p).abs()).max(trunc.label(q).abs());
            }
        }
    }
    r
}

fn ratio(num: C64, den: C64) -> Option<f64> {
    if den.norm() > 1e-8 {
        Some((num / den).re)
    } else {
        None
    }
}

/// Evaluates the Lundberg forms on `(ad_X, ad_Y)`.
///
/// Requires the support of `X, Y` inside `|i| <= N - margin`. Every index in a nonzero term of
/// the graded trace then lies in the support hull, so the window trace is exact.
pub fn lundberg_doubling(x: &LieMatrix, y: &LieMatrix, margin: usize) -> Result<LundbergReport> {
    let t = shared(x, y)?;
    if margin > t.n {
        return Err(Error::Precondition(format!("margin {margin} exceeds N={}", t.n)));
    }
    let bound = (t.n - margin) as i64;
    for (name, m) in [("X", &x.matrix), ("Y", &y.matrix)] {
        let r = support_radius(t, m);
        if r > bound {
            return Err(Error::Precondition(format!("{name} supported up to |i|={r}, interior bound is {bound}")));
        }
    }
    let ax = adjoint_raw(t, &x.matrix);
    let ay = adjoint_raw(t, &y.matrix);
    let eps = epsilon_grading(t);
    let eps_m = CsrMatrix::from_diagonal(&eps.iter().map(|&e| re(e)).collect::<Vec<_>>());
    let comm_y = eps_m.commutator(&ay);
    let comm_x = eps_m.commutator(&ax);
    let plain = ax.matmul(&comm_y).trace();
    let omega_l = plain.scale(-0.5);
    let quarter_form = eps_m.matmul(&comm_x).matmul(&comm_y).trace().scale(0.25);
    let om = omega_raw(t, &x.matrix, &y.matrix, 1.0);
    Ok(LundbergReport {
        omega_l,
        omega: om,
        ratio: ratio(omega_l, om),
        quarter_form,
        quarter_to_half_ratio: ratio(quarter_form, omega_l),
        plain_form: plain,
        plain_to_half_ratio: ratio(plain, omega_l),
    })
}

/// `min_lambda max_{|i| <= N} |-i + lambda|`, attained at `lambda = 0`.
pub fn coboundary_gap(n: u64) -> Result<u64> {
    if n == 0 {
        return Err(Error::Precondition("N must be at least 1".into()));
    }
    Ok(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random::random_skew_hermitian;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn tr(n: usize) -> Truncation {
        Truncation::new(n).unwrap()
    }

    fn skew(t: Truncation, rng: &mut ChaCha8Rng) -> LieMatrix {
        LieMatrix::new(t, Role::Algebra, random_skew_hermitian(t.dim(), 1.0, rng)).unwrap()
    }

    /// Random skew-Hermitian matrix supported on `|i| <= r`.
    fn interior(t: Truncation, r: i64, rng: &mut ChaCha8Rng) -> LieMatrix {
        let full = random_skew_hermitian(t.dim(), 1.0, rng);
        let m = ComplexMatrix::from_fn(t.dim(), t.dim(), |p, q| {
            if t.label(p).abs() <= r && t.label(q).abs() <= r {
                full[(p, q)]
            } else {
                C64::new(0.0, 0.0)
            }
        });
        LieMatrix::new(t, Role::Algebra, m).unwrap()
    }

    #[test]
    fn omega_on_matrix_units_gives_central_term() {
        let t = tr(2);
        for k in [1i64, 2, 3] {
            for i in t.labels() {
                for j in t.labels() {
                    for l in t.labels() {
                        for m in t.labels() {
                            let a = LieMatrix::complex(t, t.unit(i, j)).unwrap();
                            let b = LieMatrix::complex(t, t.unit(l, m)).unwrap();
                            let want = if j == l && i == m { (k * (l - i)) as f64 } else { 0.0 };
                            assert_eq!(omega(&a, &b, k).unwrap(), C64::new(want, 0.0));
                        }
                    }
                }
            }
        }
        let e12 = LieMatrix::complex(t, t.unit(1, 2)).unwrap();
        let e21 = LieMatrix::complex(t, t.unit(2, 1)).unwrap();
        assert_eq!(omega(&e12, &e21, 1).unwrap(), C64::new(1.0, 0.0));
    }

    #[test]
    fn omega_vanishes_on_diagonals_and_self() {
        let t = tr(3);
        let a = ComplexMatrix::from_diagonal(&(0..7).map(|p| C64::new(0.0, p as f64 * 0.3)).collect::<Vec<_>>());
        let b = ComplexMatrix::from_diagonal(&(0..7).map(|p| C64::new(0.0, 1.0 - p as f64)).collect::<Vec<_>>());
        let a = LieMatrix::new(t, Role::Algebra, a).unwrap();
        let b = LieMatrix::new(t, Role::Algebra, b).unwrap();
        assert_eq!(omega(&a, &b, 1).unwrap().norm(), 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = skew(t, &mut rng);
        assert!(omega(&x, &x, 1).unwrap().norm() < 1e-12);
    }

    #[test]
    fn omega_is_imaginary_on_skew_pairs() {
        let t = tr(3);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let (x, y) = (skew(t, &mut rng), skew(t, &mut rng));
        let w = omega(&x, &y, 1).unwrap();
        assert!(w.re.abs() < 1e-12 * (1.0 + w.norm()));
        assert!((omega_real(&x, &y, 1).unwrap() - w.im).abs() < 1e-15);
    }

    #[test]
    fn mismatched_truncations_rejected() {
        let a = LieMatrix::complex(tr(1), tr(1).unit(0, 1)).unwrap();
        let b = LieMatrix::complex(tr(2), tr(2).unit(0, 1)).unwrap();
        assert!(matches!(omega(&a, &b, 1), Err(Error::Dimension(_))));
    }

    #[test]
    fn jacobi_residuals() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in [2usize, 4] {
            let t = tr(n);
            for _ in 0..100 {
                let (x, y, z) = (skew(t, &mut rng), skew(t, &mut rng), skew(t, &mut rng));
                assert!(check_jacobi(&x, &y, &z).unwrap() < 1e-10);
            }
            let x = skew(t, &mut rng);
            let z = skew(t, &mut rng);
            assert!(check_jacobi(&x, &x, &z).unwrap() < 1e-12);
            let zero = LieMatrix::new(t, Role::Algebra, ComplexMatrix::zeros(t.dim(), t.dim())).unwrap();
            assert_eq!(check_jacobi(&x, &z, &zero).unwrap(), 0.0);
        }
    }

    #[test]
    fn banach_norm_examples() {
        let t = tr(2);
        let mut d = ComplexMatrix::zeros(5, 5);
        d[(t.pos(1), t.pos(1))] = C64::new(0.0, 1.0);
        d[(t.pos(2), t.pos(2))] = C64::new(0.0, -1.0);
        assert_eq!(banach_norm(&LieMatrix::new(t, Role::Algebra, d).unwrap()), 1.0);
        let x = &t.unit(1, 2) - &t.unit(2, 1);
        let x = LieMatrix::new(t, Role::Algebra, x).unwrap();
        assert!((banach_norm(&x) - 2f64.sqrt()).abs() < 1e-15);
        let z = LieMatrix::new(t, Role::Algebra, ComplexMatrix::zeros(5, 5)).unwrap();
        assert_eq!(banach_norm(&z), 0.0);
    }

    #[test]
    fn adjoint_embedding() {
        let t = tr(2);
        let n = t.dim();
        let x = LieMatrix::new(t, Role::Algebra, &t.unit(1, 2) - &t.unit(2, 1)).unwrap();
        let ad = adjoint_embed(&x).to_dense();
        let col = t.pos(2) * n + t.pos(2);
        let mut want = vec![C64::new(0.0, 0.0); n * n];
        want[t.pos(1) * n + t.pos(2)] = re(1.0);
        want[t.pos(2) * n + t.pos(1)] = re(1.0);
        assert_eq!(ad.column(col), want);

        let diag = ComplexMatrix::from_diagonal(&(0..n).map(|p| C64::new(0.0, p as f64)).collect::<Vec<_>>());
        let ad_d = adjoint_embed(&LieMatrix::new(t, Role::Algebra, diag).unwrap());
        assert!(ad_d.as_diagonal().is_some());

        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..5 {
            let (a, b) = (skew(t, &mut rng), skew(t, &mut rng));
            let ab = LieMatrix::new(t, Role::Algebra, a.matrix.commutator(&b.matrix)).unwrap();
            let lhs = adjoint_embed(&ab);
            let rhs = adjoint_embed(&a).commutator(&adjoint_embed(&b));
            assert!(lhs.max_abs_diff(&rhs) < 1e-10);
        }
    }

    #[test]
    fn graded_blocks_follow_d_commutator() {
        // The eps-odd part of ad_X vanishes exactly for diagonal X and grows with [D, X].
        let t = tr(3);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x = skew(t, &mut rng);
        let eps = epsilon_grading(t);
        let ad = adjoint_embed(&x);
        let odd: f64 = ad.triplets().filter(|&(r, c, _)| eps[r] != eps[c]).map(|(_, _, v)| v.norm_sqr()).sum();
        let dx = d_commutator(t, &x.matrix).frobenius_norm();
        assert!(odd > 0.0 && dx > 0.0);
        let diag = ComplexMatrix::from_diagonal(&x.matrix.diagonal());
        let add = adjoint_embed(&LieMatrix::new(t, Role::Algebra, diag).unwrap());
        assert!(add.triplets().all(|(r, c, _)| eps[r] == eps[c]));
    }

    #[test]
    fn lundberg_ratio_is_two() {
        let t = tr(6);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let mut ratios = Vec::new();
        for _ in 0..10 {
            let (x, y) = (interior(t, 3, &mut rng), interior(t, 3, &mut rng));
            let rep = lundberg_doubling(&x, &y, 3).unwrap();
            let r = rep.ratio.unwrap();
            assert!((r - 2.0).abs() < 1e-10, "ratio {r}");
            assert!((rep.quarter_to_half_ratio.unwrap() + 1.0).abs() < 1e-10);
            assert!((rep.plain_to_half_ratio.unwrap() + 2.0).abs() < 1e-10);
            ratios.push(r);
        }
        let spread = ratios.iter().fold(0.0f64, |m, r| m.max((r - ratios[0]).abs()));
        assert!(spread < 1e-9);
    }

    #[test]
    fn lundberg_exact_on_full_window_support() {
        let t = tr(3);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let (x, y) = (skew(t, &mut rng), skew(t, &mut rng));
        assert!((lundberg_doubling(&x, &y, 0).unwrap().ratio.unwrap() - 2.0).abs() < 1e-10);
        assert!(matches!(lundberg_doubling(&x, &y, 1), Err(Error::Precondition(_))));
    }

    #[test]
    fn lundberg_diagonal_pair_vanishes() {
        let t = tr(3);
        let a = ComplexMatrix::from_diagonal(&(0..7).map(|p| C64::new(0.0, p as f64)).collect::<Vec<_>>());
        let x = LieMatrix::new(t, Role::Algebra, a).unwrap();
        let rep = lundberg_doubling(&x, &x, 0).unwrap();
        assert_eq!(rep.omega_l.norm(), 0.0);
        assert_eq!(rep.omega.norm(), 0.0);
        assert!(rep.ratio.is_none());
    }

    #[test]
    fn coboundary_gap_grows_linearly() {
        assert_eq!(coboundary_gap(1).unwrap(), 1);
        assert_eq!(coboundary_gap(16).unwrap(), 16);
        let ns = [2u64, 4, 8, 16];
        let gaps: Vec<u64> = ns.iter().map(|&n| coboundary_gap(n).unwrap()).collect();
        for (w, m) in gaps.windows(2).zip(ns.windows(2)) {
            assert_eq!(w[1] - w[0], m[1] - m[0]);
        }
        // Independent oracle: brute-force minimax over a lambda grid.
        for n in 1..=6i64 {
            let best = (-400..=400)
                .map(|s| {
                    let lam = s as f64 / 100.0;
                    (-n..=n).map(|i| (lam - i as f64).abs()).fold(0.0, f64::max)
                })
                .fold(f64::INFINITY, f64::min);
            assert!((best - n as f64).abs() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn omega_bilinear_and_skew(seed in 0u64..1000, n in 1usize..4, a in -2.0f64..2.0) {
            let t = tr(n);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (x, y, z) = (skew(t, &mut rng), skew(t, &mut rng), skew(t, &mut rng));
            let wxy = omega(&x, &y, 1).unwrap();
            let wyx = omega(&y, &x, 1).unwrap();
            prop_assert!((wxy + wyx).norm() < 1e-12);
            let comb = LieMatrix::new(t, Role::Algebra, &x.matrix.scale_real(a) + &z.matrix).unwrap();
            let lhs = omega(&comb, &y, 1).unwrap();
            let rhs = wxy.scale(a) + omega(&z, &y, 1).unwrap();
            prop_assert!((lhs - rhs).norm() < 1e-12);
        }

        #[test]
        fn banach_norm_triangle_and_bracket(seed in 0u64..1000, n in 1usize..4) {
            let t = tr(n);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (x, y) = (skew(t, &mut rng), skew(t, &mut rng));
            let sum = LieMatrix::new(t, Role::Algebra, &x.matrix + &y.matrix).unwrap();
            prop_assert!(banach_norm(&sum) <= banach_norm(&x) + banach_norm(&y) + 1e-12);
            let br = LieMatrix::new(t, Role::Algebra, x.matrix.commutator(&y.matrix)).unwrap();
            prop_assert!(banach_norm(&br) <= 2.0 * banach_norm(&x) * banach_norm(&y) + 1e-12);
        }
    }
}
