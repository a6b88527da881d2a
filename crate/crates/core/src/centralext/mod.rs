//! The group-level central extension at truncation: pairs `(g, q)` modulo `det((q⁻¹q')^D) = 1`.

use rand::Rng;
use serde::Serialize;

use crate::liealg::{omega, LieMatrix, Role, Truncation};
use crate::linalg::random::random_skew_hermitian;
use crate::linalg::{matrix_exp, LinalgError};
use crate::report::VerifyReport;
use crate::{re, ComplexMatrix, Error, Result, C64};

pub const EQUIV_G_TOL: f64 = 1e-10;
pub const EQUIV_DET_TOL: f64 = 1e-9;
/// Diagonal entries below this modulus count as singular.
pub const SINGULAR_TOL: f64 = 1e-300;

/// `Π_i q_ii^i = exp(Σ i log q_ii)` over the window, principal logs.
pub fn det_power(trunc: Truncation, q: &[C64]) -> Result<C64> {
    det_power_level(trunc, q, 1)
}

/// `det_power(q)^k`, accumulated as `exp(k Σ i log q_ii)`.
pub fn det_power_level(trunc: Truncation, q: &[C64], level: i64) -> Result<C64> {
    if q.len() != trunc.dim() {
        return Err(Error::Dimension(format!("diagonal has {} entries, window has {}", q.len(), trunc.dim())));
    }
    let mut s = C64::new(0.0, 0.0);
    for (p, z) in q.iter().enumerate() {
        if !(z.norm() > SINGULAR_TOL) {
            return Err(Error::Precondition(format!("diagonal entry {} is zero", trunc.label(p))));
        }
        s += z.ln().scale(trunc.label(p) as f64);
    }
    Ok(s.scale(level as f64).exp())
}

fn diag_mul(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().zip(b).map(|(x, y)| x * y).collect()
}

/// Representative `(g, q)` of an element of the extension; `q` is stored as its diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtElement {
    pub g: LieMatrix,
    pub q: Vec<C64>,
}

impl ExtElement {
    pub fn new(g: LieMatrix, q: Vec<C64>) -> Result<Self> {
        if g.role != Role::Group {
            return Err(Error::Precondition("g must be a group element".into()));
        }
        if q.len() != g.trunc.dim() {
            return Err(Error::Dimension(format!("q has {} entries, window has {}", q.len(), g.trunc.dim())));
        }
        if q.iter().any(|z| !(z.norm() > SINGULAR_TOL) || !z.is_finite()) {
            return Err(Error::Precondition("q must be invertible".into()));
        }
        Ok(Self { g, q })
    }

    pub fn identity(trunc: Truncation) -> Self {
        let g = LieMatrix { trunc, role: Role::Group, matrix: ComplexMatrix::identity(trunc.dim()) };
        Self { g, q: vec![re(1.0); trunc.dim()] }
    }

    /// The section `ψ(g) = (g, g_d)`.
    pub fn section(g: &LieMatrix) -> Result<Self> {
        Self::new(g.clone(), g.matrix.diagonal())
    }

    pub fn trunc(&self) -> Truncation {
        self.g.trunc
    }

    /// `Σ |i h_ii|` with `h = diag(g q⁻¹) - 1`; finite at every truncation.
    pub fn trace_class_defect(&self) -> f64 {
        let t = self.trunc();
        self.g
            .matrix
            .diagonal()
            .iter()
            .zip(&self.q)
            .enumerate()
            .map(|(p, (gd, q))| (gd / q - re(1.0)).norm() * t.label(p).unsigned_abs() as f64)
            .sum()
    }
}

fn shared(a: &ExtElement, b: &ExtElement) -> Result<Truncation> {
    if a.trunc() != b.trunc() {
        return Err(Error::Dimension(format!("truncations differ: N={} vs N={}", a.trunc().n(), b.trunc().n())));
    }
    Ok(a.trunc())
}

/// `g = g'` entrywise to `EQUIV_G_TOL` and `|det_power(q⁻¹q') - 1| < EQUIV_DET_TOL`.
pub fn ext_equiv(a: &ExtElement, b: &ExtElement) -> Result<bool> {
    let t = shared(a, b)?;
    if a.g.matrix.max_abs_diff(&b.g.matrix) > EQUIV_G_TOL {
        return Ok(false);
    }
    let r: Vec<C64> = a.q.iter().zip(&b.q).map(|(x, y)| y / x).collect();
    Ok((det_power(t, &r)? - re(1.0)).norm() < EQUIV_DET_TOL)
}

/// `(g₁, q₁)(g₂, q₂) = (g₁g₂, q₁q₂)`
pub fn ext_mul(a: &ExtElement, b: &ExtElement) -> Result<ExtElement> {
    let t = shared(a, b)?;
    let g = LieMatrix { trunc: t, role: Role::Group, matrix: a.g.matrix.matmul(&b.g.matrix) };
    Ok(ExtElement { g, q: diag_mul(&a.q, &b.q) })
}

/// `(g, q) ↦ (g, det((q g_d)^D))`
pub fn local_trivialize(a: &ExtElement) -> Result<(LieMatrix, C64)> {
    local_trivialize_level(a, 1)
}

/// Level-`k` trivialization: the phase is raised to the `k`-th power.
pub fn local_trivialize_level(a: &ExtElement, level: i64) -> Result<(LieMatrix, C64)> {
    let gd = a.g.matrix.diagonal();
    if let Some(p) = gd.iter().position(|z| !(z.norm() > SINGULAR_TOL)) {
        return Err(Error::Precondition(format!("diagonal part of g is singular at index {}", a.trunc().label(p))));
    }
    let phase = det_power_level(a.trunc(), &diag_mul(&a.q, &gd), level)?;
    Ok((a.g.clone(), phase))
}

#[derive(Clone, Debug, Serialize)]
pub struct BchEstimate {
    pub level: i64,
    pub steps: Vec<f64>,
    /// `c(t)`, purely imaginary.
    pub phases: Vec<C64>,
    /// Extrapolated `lim c(t)/t²`.
    pub coefficient: C64,
    /// `½ k tr X[D, Y]`
    pub target: C64,
    pub relative_error: f64,
}

/// Largest `‖X‖_F` accepted by [`bch_phase_check`].
pub const BCH_NORM_BOUND: f64 = 1.0;
pub const DEFAULT_BCH_STEPS: [f64; 4] = [0.04, 0.02, 0.01, 0.005];

/// Neville extrapolation of the samples `(x_i, f_i)` to `x = 0`.
pub fn extrapolate_to_zero(x: &[f64], f: &[C64]) -> C64 {
    let mut p = f.to_vec();
    let n = x.len();
    for m in 1..n {
        for i in 0..n - m {
            let (xi, xj) = (x[i], x[i + m]);
            p[i] = (p[i + 1].scale(xi) - p[i].scale(xj)) / (xi - xj);
        }
    }
    p[0]
}

fn unit_phase(z: C64) -> C64 {
    C64::new(0.0, z.arg())
}

/// `c(t) = log phase of the trivialized product ψ(e^{tX})ψ(e^{tY})` minus that of `ψ(e^{tX}e^{tY})`,
/// and the `t²` coefficient of `c` by extrapolating `c(t)/t²`.
pub fn bch_phase_check(x: &LieMatrix, y: &LieMatrix, steps: &[f64], level: i64) -> Result<BchEstimate> {
    if x.trunc != y.trunc {
        return Err(Error::Dimension("truncations differ".into()));
    }
    for m in [x, y] {
        if m.role != Role::Algebra {
            return Err(Error::Precondition("BCH check needs skew-Hermitian X and Y".into()));
        }
        if m.matrix.frobenius_norm() > BCH_NORM_BOUND {
            return Err(Error::Precondition(format!(
                "‖X‖_F = {:.3e} exceeds {BCH_NORM_BOUND}",
                m.matrix.frobenius_norm()
            )));
        }
    }
    if steps.is_empty() || steps.iter().any(|t| !(*t > 0.0)) {
        return Err(Error::Precondition("step list must be non-empty and positive".into()));
    }
    let t0 = x.trunc;
    let group = |m: ComplexMatrix| -> Result<LieMatrix> { LieMatrix::new(t0, Role::Group, m) };
    let mut phases = Vec::with_capacity(steps.len());
    for &t in steps {
        let gx = group(matrix_exp(&x.matrix.scale_real(t))?)?;
        let gy = group(matrix_exp(&y.matrix.scale_real(t))?)?;
        let prod = ext_mul(&ExtElement::section(&gx)?, &ExtElement::section(&gy)?)?;
        let (_, a) = local_trivialize_level(&prod, level)?;
        let (_, b) = local_trivialize_level(&ExtElement::section(&prod.g)?, level)?;
        let c = unit_phase(a) - unit_phase(b);
        if c.im.abs() > 1.0 {
            return Err(Error::Linalg(LinalgError::Branch(format!("phase difference {:.3e} at t={t}", c.im))));
        }
        phases.push(c);
    }
    let ratios: Vec<C64> = phases.iter().zip(steps).map(|(c, t)| c / (t * t)).collect();
    let coefficient = extrapolate_to_zero(steps, &ratios);
    let target = omega(x, y, level)?.scale(0.5);
    let relative_error = (coefficient - target).norm() / target.norm().max(f64::MIN_POSITIVE);
    Ok(BchEstimate { level, steps: steps.to_vec(), phases, coefficient, target, relative_error })
}

pub const BCH_REL_TOL: f64 = 1e-3;
pub const MULTIPLICATIVITY_TOL: f64 = 1e-10;
pub const ASSOCIATIVITY_TOL: f64 = 1e-10;
pub const TRIVIALIZATION_TOL: f64 = 1e-9;

fn random_group<R: Rng + ?Sized>(t: Truncation, scale: f64, rng: &mut R) -> Result<LieMatrix> {
    let x = random_skew_hermitian::<f64, R>(t.dim(), scale, rng);
    LieMatrix::new(t, Role::Group, matrix_exp(&x)?)
}

/// Diagonal near the identity: `exp(z)` with `|Re z|, |Im z| <= spread`.
fn random_diagonal<R: Rng + ?Sized>(t: Truncation, spread: f64, rng: &mut R) -> Vec<C64> {
    (0..t.dim()).map(|_| C64::new(rng.gen_range(-spread..spread), rng.gen_range(-spread..spread)).exp()).collect()
}

/// Skew-Hermitian with Frobenius norm `f`.
fn random_algebra<R: Rng + ?Sized>(t: Truncation, f: f64, rng: &mut R) -> Result<LieMatrix> {
    let x = random_skew_hermitian::<f64, R>(t.dim(), 1.0, rng);
    let n = x.frobenius_norm();
    LieMatrix::new(t, Role::Algebra, x.scale_real(f / n))
}

/// Multiplicativity, equivalence, product compatibility, class invariance of the trivialization,
/// and the BCH coefficient at levels 1 and 2.
pub fn check_extension<R: Rng + ?Sized>(
    trunc: Truncation,
    samples: usize,
    bch_pairs: usize,
    rng: &mut R,
) -> Result<VerifyReport> {
    let mut rep = VerifyReport::new();
    let mut mult = 0.0f64;
    for _ in 0..samples {
        let a = random_diagonal(trunc, 0.4, rng);
        let b = random_diagonal(trunc, 0.4, rng);
        let lhs = det_power(trunc, &diag_mul(&a, &b))?;
        let rhs = det_power(trunc, &a)? * det_power(trunc, &b)?;
        mult = mult.max((lhs - rhs).norm() / rhs.norm());
    }
    rep.record("centralext.det_power_multiplicative", mult, MULTIPLICATIVITY_TOL);

    // r with det_power(r) = 1: free off the zero label, entry at +1 fixes the product.
    let unit_ratio = |rng: &mut R| -> Vec<C64> {
        let mut r = random_diagonal(trunc, 0.3, rng);
        r[trunc.pos(1)] = re(1.0);
        let d = det_power(trunc, &r).expect("non-zero diagonal");
        r[trunc.pos(1)] = d.inv();
        r
    };
    let mut assoc = 0.0f64;
    let mut equiv_ok = true;
    let mut triv = 0.0f64;
    for _ in 0..samples {
        let e: Vec<ExtElement> = (0..3)
            .map(|_| ExtElement::new(random_group(trunc, 0.5, rng)?, random_diagonal(trunc, 0.3, rng)))
            .collect::<Result<_>>()?;
        let l = ext_mul(&ext_mul(&e[0], &e[1])?, &e[2])?;
        let r = ext_mul(&e[0], &ext_mul(&e[1], &e[2])?)?;
        let dq = l.q.iter().zip(&r.q).fold(0.0f64, |m, (x, y)| m.max((x - y).norm()));
        assoc = assoc.max(l.g.matrix.max_abs_diff(&r.g.matrix).max(dq));
        let a2 = ExtElement::new(e[0].g.clone(), diag_mul(&e[0].q, &unit_ratio(rng)))?;
        let b2 = ExtElement::new(e[1].g.clone(), diag_mul(&e[1].q, &unit_ratio(rng)))?;
        equiv_ok &= ext_equiv(&e[0], &e[0])? && ext_equiv(&e[0], &a2)? && ext_equiv(&a2, &e[0])?;
        equiv_ok &= !ext_equiv(&e[0], &e[1])?;
        equiv_ok &= ext_equiv(&ext_mul(&e[0], &e[1])?, &ext_mul(&a2, &b2)?)?;
        let (_, p1) = local_trivialize(&e[0])?;
        let (_, p2) = local_trivialize(&a2)?;
        triv = triv.max((p1 - p2).norm());
    }
    rep.record("centralext.ext_mul_associative", assoc, ASSOCIATIVITY_TOL);
    rep.record_bool("centralext.ext_equiv_relation_and_product", equiv_ok);
    rep.record("centralext.trivialization_class_invariant", triv, TRIVIALIZATION_TOL);

    let bch_trunc = Truncation::new(trunc.n().max(2))?;
    let mut worst = 0.0f64;
    for level in [1, 2] {
        for _ in 0..bch_pairs {
            let x = random_algebra(bch_trunc, 0.8, rng)?;
            let y = random_algebra(bch_trunc, 0.8, rng)?;
            worst = worst.max(bch_phase_check(&x, &y, &DEFAULT_BCH_STEPS, level)?.relative_error);
        }
    }
    rep.record("centralext.bch_coefficient", worst, BCH_REL_TOL);
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn tr(n: usize) -> Truncation {
        Truncation::new(n).unwrap()
    }

    #[test]
    fn det_power_examples() {
        let t = tr(1);
        assert_eq!(det_power(t, &[re(1.0); 3]).unwrap(), re(1.0));
        let v = det_power(t, &[re(3.0), re(1.0), re(2.0)]).unwrap();
        assert!((v - re(2.0 / 3.0)).norm() < 1e-15);
        assert!(matches!(det_power(t, &[re(1.0), re(0.0), re(1.0)]), Err(Error::Precondition(_))));
        let v2 = det_power_level(t, &[re(3.0), re(1.0), re(2.0)], 2).unwrap();
        assert!((v2 - re(4.0 / 9.0)).norm() < 1e-15);
    }

    #[test]
    fn equivalence_examples() {
        let t = tr(1);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = random_group(t, 0.5, &mut rng).unwrap();
        let a = ExtElement::section(&g).unwrap();
        assert!(ext_equiv(&a, &a).unwrap());
        // r_{-1} = r_1 = 2: 2⁻¹ · 2 = 1
        let r = [re(2.0), re(1.0), re(2.0)];
        let b = ExtElement::new(g.clone(), diag_mul(&a.q, &r)).unwrap();
        assert!(ext_equiv(&a, &b).unwrap());
        // r_{-1} = 2, r_1 = ½: 2⁻¹ · ½ = ¼
        assert!((det_power(t, &[re(2.0), re(1.0), re(0.5)]).unwrap() - re(0.25)).norm() < 1e-15);
        let b = ExtElement::new(g.clone(), diag_mul(&a.q, &[re(2.0), re(1.0), re(0.5)])).unwrap();
        assert!(!ext_equiv(&a, &b).unwrap());
        let c = ExtElement::new(g.clone(), diag_mul(&a.q, &[re(2.0), re(1.0), re(1.0)])).unwrap();
        assert!(!ext_equiv(&a, &c).unwrap());
        let h = random_group(t, 0.5, &mut rng).unwrap();
        assert!(!ext_equiv(&a, &ExtElement::section(&h).unwrap()).unwrap());
    }

    #[test]
    fn identity_is_neutral_and_trivializes_to_one() {
        let t = tr(2);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let e = ExtElement::identity(t);
        let (_, ph) = local_trivialize(&e).unwrap();
        assert_eq!(ph, re(1.0));
        let a = ExtElement::new(random_group(t, 0.5, &mut rng).unwrap(), random_diagonal(t, 0.3, &mut rng)).unwrap();
        let l = ext_mul(&e, &a).unwrap();
        let r = ext_mul(&a, &e).unwrap();
        assert!(l.g.matrix.max_abs_diff(&a.g.matrix) < 1e-15 && l.q == a.q);
        assert!(r.g.matrix.max_abs_diff(&a.g.matrix) < 1e-15 && r.q == a.q);
        assert_eq!(e.trace_class_defect(), 0.0);
    }

    #[test]
    fn section_phase_is_det_power_of_diagonal_squared() {
        let t = tr(2);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let g = random_group(t, 0.5, &mut rng).unwrap();
        let (_, ph) = local_trivialize(&ExtElement::section(&g).unwrap()).unwrap();
        let gd = g.matrix.diagonal();
        let sq: Vec<C64> = gd.iter().map(|z| z * z).collect();
        let direct: C64 = t.labels().zip(&sq).map(|(i, z)| z.powi(i as i32)).product();
        assert!((ph - direct).norm() < 1e-12);
    }

    #[test]
    fn singular_diagonal_rejected() {
        let t = tr(1);
        let mut m = ComplexMatrix::zeros(3, 3);
        m[(0, 1)] = re(1.0);
        m[(1, 0)] = re(1.0);
        m[(2, 2)] = re(1.0);
        let g = LieMatrix::new(t, Role::Group, m).unwrap();
        let a = ExtElement::new(g, vec![re(1.0); 3]).unwrap();
        assert!(matches!(local_trivialize(&a), Err(Error::Precondition(_))));
    }

    #[test]
    fn extrapolation_recovers_polynomial_limit() {
        let x = [0.4, 0.2, 0.1, 0.05];
        let f: Vec<C64> = x.iter().map(|t| C64::new(1.5 - 2.0 * t + 0.7 * t * t * t, -0.25 * t)).collect();
        let z = extrapolate_to_zero(&x, &f);
        assert!((z - C64::new(1.5, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn bch_commuting_pair_vanishes() {
        let t = tr(2);
        let x = LieMatrix::new(t, Role::Algebra, (&t.unit(1, 1) - &t.unit(-2, -2)).scale(C64::new(0.0, 0.5))).unwrap();
        let y = LieMatrix::new(t, Role::Algebra, t.unit(0, 0).scale(C64::new(0.0, 0.7))).unwrap();
        let e = bch_phase_check(&x, &y, &DEFAULT_BCH_STEPS, 1).unwrap();
        assert!(e.coefficient.norm() < 1e-6);
        assert_eq!(e.target, C64::new(0.0, 0.0));
    }

    #[test]
    fn bch_matrix_unit_pair() {
        let t = tr(2);
        let x = (&t.unit(1, 2) - &t.unit(2, 1)).scale_real(0.5);
        let y = (&t.unit(1, 2) + &t.unit(2, 1)).scale(C64::new(0.0, 0.5));
        let x = LieMatrix::new(t, Role::Algebra, x).unwrap();
        let y = LieMatrix::new(t, Role::Algebra, y).unwrap();
        // tr X[D,Y] = 2i·(½)(½)
        let expected = C64::new(0.0, 0.25);
        let e1 = bch_phase_check(&x, &y, &DEFAULT_BCH_STEPS, 1).unwrap();
        assert!((e1.target - expected).norm() < 1e-15);
        assert!(e1.relative_error < 1e-3, "{e1:?}");
        let e2 = bch_phase_check(&x, &y, &DEFAULT_BCH_STEPS, 2).unwrap();
        assert!((e2.coefficient - e1.coefficient.scale(2.0)).norm() < 1e-6 * e1.coefficient.norm());
        assert!(e2.relative_error < 1e-3);
    }

    #[test]
    fn bch_random_pairs_levels_one_and_two() {
        let t = tr(2);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for level in [1, 2] {
            for _ in 0..5 {
                let x = random_algebra(t, 0.8, &mut rng).unwrap();
                let y = random_algebra(t, 0.8, &mut rng).unwrap();
                let e = bch_phase_check(&x, &y, &DEFAULT_BCH_STEPS, level).unwrap();
                assert!(e.relative_error < BCH_REL_TOL, "{e:?}");
                assert!(e.phases.iter().all(|c| c.re == 0.0));
            }
        }
    }

    #[test]
    fn bch_rejects_large_or_non_skew_input() {
        let t = tr(1);
        let big = LieMatrix::new(t, Role::Algebra, (&t.unit(0, 1) - &t.unit(1, 0)).scale_real(2.0)).unwrap();
        assert!(bch_phase_check(&big, &big, &DEFAULT_BCH_STEPS, 1).is_err());
        let h = LieMatrix::new(t, Role::Gauge, t.unit(0, 0)).unwrap();
        assert!(bch_phase_check(&h, &h, &DEFAULT_BCH_STEPS, 1).is_err());
    }

    #[test]
    fn extension_suite_passes() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let rep = check_extension(tr(2), 20, 5, &mut rng).unwrap();
        assert!(rep.passed(), "{:?}", rep.failures().collect::<Vec<_>>());
    }

    proptest! {
        #[test]
        fn det_power_multiplicative(seed in 0u64..500, n in 1usize..5) {
            let t = tr(n);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_diagonal(t, 0.5, &mut rng);
            let b = random_diagonal(t, 0.5, &mut rng);
            let lhs = det_power(t, &diag_mul(&a, &b)).unwrap();
            let rhs = det_power(t, &a).unwrap() * det_power(t, &b).unwrap();
            prop_assert!((lhs - rhs).norm() <= 1e-10 * rhs.norm());
        }

        #[test]
        fn trivialization_constant_on_classes(seed in 0u64..200) {
            let t = tr(2);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = ExtElement::new(random_group(t, 0.4, &mut rng).unwrap(), random_diagonal(t, 0.3, &mut rng)).unwrap();
            let mut r = vec![re(1.0); t.dim()];
            r[t.pos(-1)] = C64::new(0.9, 0.2);
            r[t.pos(1)] = r[t.pos(-1)];
            r[t.pos(2)] = C64::new(1.1, -0.1);
            r[t.pos(-2)] = r[t.pos(2)];
            let b = ExtElement::new(a.g.clone(), diag_mul(&a.q, &r)).unwrap();
            prop_assert!(ext_equiv(&a, &b).unwrap());
            let (_, pa) = local_trivialize(&a).unwrap();
            let (_, pb) = local_trivialize(&b).unwrap();
            prop_assert!((pa - pb).norm() < 1e-9);
        }
    }
}
