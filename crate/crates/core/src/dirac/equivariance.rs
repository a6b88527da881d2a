use rand::Rng;
use serde::Serialize;

use super::build::{couple, gamma_field};
use super::gauge::{gauge_act, GaugeField};
use super::kernel::{kernel, KernelOptions};
use super::operator::{KronTerm, WeilOperator};
use super::WeilSpace;
use crate::liealg::{LieMatrix, Role, Truncation};
use crate::linalg::random::{random_skew_hermitian, random_vector};
use crate::linalg::scalar::{diff_norm, norm};
use crate::linalg::{matrix_exp, LinearMap, DEFAULT_MATERIALIZATION_THRESHOLD};
use crate::{re, ComplexMatrix, Error, Result, SparseMatrix, C64};

fn algebra_element(space: &WeilSpace, x: &LieMatrix) -> Result<()> {
    if x.trunc != space.trunc() {
        return Err(Error::Precondition("algebra element truncation differs from the space".into()));
    }
    if !x.matrix.is_skew_hermitian(crate::liealg::SKEW_HERMITIAN_TOL) {
        return Err(Error::Precondition("algebra element is not skew-Hermitian".into()));
    }
    Ok(())
}

/// `T(X) = Σ_ij conj(X_ij) t_ij`, which equals `-Σ_ij X_ji t_ij` for skew-Hermitian `X`.
///
/// This is the representation under which `ĝ⁻¹ D_A ĝ = D_{A^g}` holds for the coupling
/// `Σ A_ji γ_ij` and the right action `A^g = g⁻¹Ag + g⁻¹[D,g]`.
pub fn rep_generator(space: &WeilSpace, x: &LieMatrix) -> Result<WeilOperator> {
    if x.trunc != space.trunc() {
        return Err(Error::Precondition("algebra element truncation differs from the space".into()));
    }
    let t = space.trunc();
    let (dm, df) = (space.dim_module(), space.dim_fock());
    let mut left = SparseMatrix::zeros(dm, dm);
    let mut right = SparseMatrix::zeros(df, df);
    for i in t.labels() {
        for j in t.labels() {
            let c = x.matrix[(t.pos(i), t.pos(j))].conj();
            if c.norm() > 0.0 {
                left = left.add_scaled(c, space.module().rho(i, j));
                right = right.add_scaled(c, space.spin().spin(i, j));
            }
        }
    }
    let terms = vec![KronTerm { left: Some(left), right: None }, KronTerm { left: None, right: Some(right) }];
    Ok(WeilOperator::from_terms(dm, df, terms, false))
}

pub const REP_UNITARY_TOL: f64 = 1e-9;

/// Dense `exp(T(X))`.
pub fn rep_exponential(space: &WeilSpace, x: &LieMatrix) -> Result<ComplexMatrix> {
    algebra_element(space, x)?;
    if space.dim() > DEFAULT_MATERIALIZATION_THRESHOLD {
        return Err(Error::Resource(format!(
            "dense exponential at dimension {} above {DEFAULT_MATERIALIZATION_THRESHOLD}; use exp_action",
            space.dim()
        )));
    }
    let u = matrix_exp(&rep_generator(space, x)?.to_dense())?;
    if u.unitarity_defect() > REP_UNITARY_TOL {
        return Err(Error::Numerical(format!("exp(T(X)) unitarity defect {:.3e}", u.unitarity_defect())));
    }
    Ok(u)
}

/// `exp(op) v` by Taylor series on `ceil(||op||_1)` substeps.
pub fn exp_action(op: &WeilOperator, v: &[C64]) -> Vec<C64> {
    let steps = op.norm_one_bound().ceil().max(1.0) as usize;
    let h = 1.0 / steps as f64;
    let mut x = v.to_vec();
    let mut term = vec![C64::new(0.0, 0.0); v.len()];
    for _ in 0..steps {
        let mut acc = x.clone();
        let mut cur = x.clone();
        for n in 1..=60 {
            op.apply(&cur, &mut term);
            let f = h / n as f64;
            for (c, t) in cur.iter_mut().zip(&term) {
                *c = t * f;
            }
            for (a, c) in acc.iter_mut().zip(&cur) {
                *a += c;
            }
            if norm(&cur) <= 1e-17 * norm(&acc) {
                break;
            }
        }
        x = acc;
    }
    x
}

#[derive(Clone, Debug, Serialize)]
pub struct EquivarianceResiduals {
    /// `max ||([D_A, T(X)] - (k+1) Γ([A,X] + [D,X])) v||` over unit probes.
    pub infinitesimal: f64,
    /// `max ||(D_A ĝ - ĝ D_{A^g}) v||` over unit probes, `g = exp(tX)`, `ĝ = exp(t T(X))`.
    pub exponentiated: f64,
}

pub const EQUIVARIANCE_PROBES: usize = 3;
pub const INFINITESIMAL_TOL: f64 = 1e-10;
pub const EXPONENTIATED_TOL: f64 = 1e-8;

fn unit_probe<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<C64> {
    let mut v = random_vector::<f64, R>(dim, rng);
    let n = norm(&v);
    for z in v.iter_mut() {
        *z /= n;
    }
    v
}

pub fn check_equivariance<R: Rng + ?Sized>(
    space: &WeilSpace,
    dirac: &WeilOperator,
    a: &GaugeField,
    x: &LieMatrix,
    t: f64,
    probes: usize,
    rng: &mut R,
) -> Result<EquivarianceResiduals> {
    algebra_element(space, x)?;
    let tr = space.trunc();
    let k1 = (space.level() + 1) as f64;
    let da = couple(space, dirac, a)?;
    let tx = rep_generator(space, x)?;
    let d = tr.energy();
    let b = &a.matrix.commutator(&x.matrix) + &d.commutator(&x.matrix);
    let rhs = gamma_field(space, &b)?.scale(re(k1));
    let xt = x.matrix.scale_real(t);
    let g = LieMatrix::new(tr, Role::Group, matrix_exp(&xt)?)?;
    let dag = couple(space, dirac, &gauge_act(a, &g)?)?;
    let txt = tx.scale(re(t));
    let mut inf = 0.0f64;
    let mut ex = 0.0f64;
    for _ in 0..probes {
        let v = unit_probe(space.dim(), rng);
        let lhs: Vec<C64> = {
            let p = da.apply_vec(&tx.apply_vec(&v));
            let q = tx.apply_vec(&da.apply_vec(&v));
            p.iter().zip(&q).map(|(x, y)| x - y).collect()
        };
        inf = inf.max(diff_norm(&lhs, &rhs.apply_vec(&v)));
        let left = da.apply_vec(&exp_action(&txt, &v));
        let right = exp_action(&txt, &dag.apply_vec(&v));
        ex = ex.max(diff_norm(&left, &right));
    }
    Ok(EquivarianceResiduals { infinitesimal: inf, exponentiated: ex })
}

fn random_algebra<R: Rng + ?Sized>(t: Truncation, rng: &mut R) -> LieMatrix {
    let m = random_skew_hermitian::<f64, R>(t.dim(), 1.0, rng);
    LieMatrix::new(t, Role::Algebra, m).expect("skew-Hermitian by construction")
}

#[derive(Clone, Debug, Serialize)]
pub struct KTheoryPoint {
    pub mu: Option<Vec<f64>>,
    pub residuals: Vec<EquivarianceResiduals>,
    pub kernel_dim: usize,
    pub summands: usize,
    pub condition_i: bool,
    pub condition_ii: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct KTheoryReport {
    pub points: Vec<KTheoryPoint>,
    pub passed: bool,
}

/// Condition (i): equivariance for random `X` at every sample.
/// Condition (ii): the kernel splits into finitely many irreducible summands.
#[allow(clippy::too_many_arguments)]
pub fn verify_ktheory_conditions<R: Rng + ?Sized>(
    space: &WeilSpace,
    dirac: &WeilOperator,
    samples: &[GaugeField],
    x_count: usize,
    t: f64,
    kernel_opts: &KernelOptions,
    rng: &mut R,
) -> Result<KTheoryReport> {
    let mut points = Vec::with_capacity(samples.len());
    for a in samples {
        let mut residuals = Vec::with_capacity(x_count);
        for _ in 0..x_count {
            let x = random_algebra(space.trunc(), rng);
            residuals.push(check_equivariance(space, dirac, a, &x, t, EQUIVARIANCE_PROBES, rng)?);
        }
        let condition_i =
            residuals.iter().all(|r| r.infinitesimal < INFINITESIMAL_TOL && r.exponentiated < EXPONENTIATED_TOL);
        let k = kernel(space, dirac, a, kernel_opts)?;
        let condition_ii = !k.ambiguous && k.blocks.iter().all(|b| b.dim == b.summands << space.trunc().n());
        points.push(KTheoryPoint {
            mu: a.mu.clone(),
            residuals,
            kernel_dim: k.dim,
            summands: k.summands,
            condition_i,
            condition_ii,
        });
    }
    let passed = points.iter().all(|p| p.condition_i && p.condition_ii);
    Ok(KTheoryReport { points, passed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dirac::build_dirac;
    use crate::hwmodule::Weight;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn space(lambda: Vec<i64>, k: i64) -> WeilSpace {
        let t = Truncation::new(1).unwrap();
        WeilSpace::new(&Weight::new(t, lambda, k).unwrap(), 10_000).unwrap()
    }

    #[test]
    fn generator_is_anti_self_adjoint_and_exponential_unitary() {
        let s = space(vec![0, 0, 0], 1);
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let x = random_algebra(s.trunc(), &mut rng);
        let t = rep_generator(&s, &x).unwrap().to_dense();
        assert!((&t + &t.adjoint()).max_abs() < 1e-12);
        let u = rep_exponential(&s, &x).unwrap();
        assert!(u.unitarity_defect() < 1e-9);
        let v = unit_probe(s.dim(), &mut rng);
        let direct = u.matvec(&v);
        let action = exp_action(&rep_generator(&s, &x).unwrap(), &v);
        assert!(diff_norm(&direct, &action) < 1e-12);
        let zero = LieMatrix::new(s.trunc(), Role::Algebra, ComplexMatrix::zeros(3, 3)).unwrap();
        assert!(rep_exponential(&s, &zero).unwrap().max_abs_diff(&ComplexMatrix::identity(s.dim())) == 0.0);
    }

    #[test]
    fn commuting_exponentials_differ_by_a_scalar() {
        let s = space(vec![0, 0, 0], 1);
        let t = s.trunc();
        let ph = |a: f64, b: f64, c: f64| {
            let d: Vec<C64> = [a, b, c].iter().map(|&x| C64::new(0.0, x)).collect();
            LieMatrix::new(t, Role::Algebra, ComplexMatrix::from_diagonal(&d)).unwrap()
        };
        let x = ph(0.3, -0.2, 0.5);
        let y = ph(-0.1, 0.4, 0.25);
        let xy = LieMatrix::new(t, Role::Algebra, &x.matrix + &y.matrix).unwrap();
        let p = rep_exponential(&s, &x).unwrap().matmul(&rep_exponential(&s, &y).unwrap());
        let q = p.matmul(&rep_exponential(&s, &xy).unwrap().adjoint());
        let z = q[(0, 0)];
        assert!((z.norm() - 1.0).abs() < 1e-12);
        assert!(q.max_abs_diff(&ComplexMatrix::identity(s.dim()).scale(z)) < 1e-10);
    }

    #[test]
    fn equivariance_residuals() {
        let s = space(vec![0, 0, 0], 1);
        let d = build_dirac(&s);
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let t = s.trunc();
        let diag_x = LieMatrix::new(
            t,
            Role::Algebra,
            ComplexMatrix::from_diagonal(&[C64::new(0.0, 0.2), C64::new(0.0, -0.1), C64::new(0.0, 0.4)]),
        )
        .unwrap();
        let diag_a = GaugeField::diagonal(t, &[0.1, 0.2, -0.3]).unwrap();
        let r = check_equivariance(&s, &d, &diag_a, &diag_x, 0.1, 3, &mut rng).unwrap();
        assert!(r.infinitesimal < 1e-10 && r.exponentiated < 1e-10, "{r:?}");
        for a in [GaugeField::zero(t), GaugeField::random(t, 0.5, &mut rng)] {
            for _ in 0..3 {
                let x = random_algebra(t, &mut rng);
                let r = check_equivariance(&s, &d, &a, &x, 0.1, 3, &mut rng).unwrap();
                assert!(r.infinitesimal < 1e-10 && r.exponentiated < 1e-8, "{r:?}");
            }
        }
    }

    #[test]
    fn ktheory_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let s = space(vec![0, 0, 0], 1);
        let r = verify_ktheory_conditions(
            &s,
            &build_dirac(&s),
            &[GaugeField::zero(s.trunc())],
            3,
            0.1,
            &KernelOptions::default(),
            &mut rng,
        )
        .unwrap();
        assert!(r.passed);
        assert_eq!(r.points[0].summands, 1);
        let s = space(vec![0, 0, -1], 1);
        let samples = [
            GaugeField::diagonal(s.trunc(), &[0.0, 0.0, 0.5]).unwrap(),
            GaugeField::diagonal(s.trunc(), &[0.0, 0.0, 0.49]).unwrap(),
        ];
        let r = verify_ktheory_conditions(&s, &build_dirac(&s), &samples, 1, 0.1, &KernelOptions::default(), &mut rng)
            .unwrap();
        assert!(r.passed);
        assert_eq!(r.points[0].summands, 1);
        assert_eq!(r.points[1].summands, 0);
        assert_eq!(r.points[1].kernel_dim, 0);
    }
}
