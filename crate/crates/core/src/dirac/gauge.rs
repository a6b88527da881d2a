use rand::Rng;
use serde::Serialize;

use crate::liealg::{LieMatrix, Role, Truncation, HERMITIAN_TOL};
use crate::linalg::random::random_hermitian;
use crate::linalg::{hermitian_eig, LinalgError};
use crate::{re, ComplexMatrix, Error, Result};

/// Hermitian window matrix `A`; `mu` is set when `A` is diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct GaugeField {
    pub trunc: Truncation,
    pub matrix: ComplexMatrix,
    pub mu: Option<Vec<f64>>,
}

/// Output Hermiticity tolerance of the gauge action, relative to `1 + max|entry|`.
pub const ACTION_HERMITIAN_TOL: f64 = 1e-10;

impl GaugeField {
    pub fn new(trunc: Truncation, matrix: ComplexMatrix) -> Result<Self> {
        let m = LieMatrix::new(trunc, Role::Gauge, matrix)?.matrix;
        let mu = m.is_diagonal(HERMITIAN_TOL).then(|| m.diagonal().iter().map(|z| z.re).collect());
        Ok(Self { trunc, matrix: m, mu })
    }

    pub fn zero(trunc: Truncation) -> Self {
        Self { trunc, matrix: ComplexMatrix::zeros(trunc.dim(), trunc.dim()), mu: Some(vec![0.0; trunc.dim()]) }
    }

    pub fn diagonal(trunc: Truncation, mu: &[f64]) -> Result<Self> {
        if mu.len() != trunc.dim() {
            return Err(Error::Dimension(format!("mu has {} entries, window has {}", mu.len(), trunc.dim())));
        }
        if mu.iter().any(|x| !x.is_finite()) {
            return Err(Error::Precondition("non-finite mu entry".into()));
        }
        let d: Vec<_> = mu.iter().map(|&x| re(x)).collect();
        Ok(Self { trunc, matrix: ComplexMatrix::from_diagonal(&d), mu: Some(mu.to_vec()) })
    }

    /// Random Hermitian field with Frobenius norm `scale`.
    pub fn random<R: Rng + ?Sized>(trunc: Truncation, scale: f64, rng: &mut R) -> Self {
        let h = random_hermitian::<f64, R>(trunc.dim(), rng);
        let f = h.frobenius_norm();
        let m = if f > 0.0 { h.scale_real(scale / f) } else { h };
        Self::new(trunc, m.hermitian_part()).expect("hermitian by construction")
    }

    pub fn is_diagonal(&self) -> bool {
        self.mu.is_some()
    }
}

fn unitary(g: &LieMatrix, trunc: Truncation) -> Result<()> {
    if g.trunc != trunc {
        return Err(Error::Precondition("group element truncation differs from the gauge field".into()));
    }
    if !g.matrix.is_unitary(crate::liealg::UNITARY_TOL) {
        return Err(Error::Precondition(format!(
            "gauge transformation is not unitary (defect {:.3e})",
            g.matrix.unitarity_defect()
        )));
    }
    Ok(())
}

/// `A^g = g⁻¹ A g + g⁻¹ [D, g]`, a right action.
pub fn gauge_act(a: &GaugeField, g: &LieMatrix) -> Result<GaugeField> {
    unitary(g, a.trunc)?;
    let gi = g.matrix.adjoint();
    let d = a.trunc.energy();
    let out = &gi.matmul(&a.matrix).matmul(&g.matrix) + &gi.matmul(&d.commutator(&g.matrix));
    if out.hermitian_defect() > out.scaled_tolerance(ACTION_HERMITIAN_TOL) {
        return Err(Error::Numerical(format!(
            "gauge action output not Hermitian (defect {:.3e})",
            out.hermitian_defect()
        )));
    }
    GaugeField::new(a.trunc, out.hermitian_part())
}

#[derive(Clone, Debug, Serialize)]
pub struct GaugeDiagonalization {
    #[serde(skip)]
    pub g: LieMatrix,
    pub mu: Vec<f64>,
    /// Eigenvalues of `D + A`, ascending; eigenvalue `p` is paired with label `p - N`.
    pub eigenvalues: Vec<f64>,
    /// Two eigenvalues share a nearest integer.
    pub tie: bool,
    /// `max |(A^g)_ij|` over `i ≠ j`.
    pub off_diagonal: f64,
}

/// Unitary `g` with `A^g = diag(μ)`: eigenvectors of `D + A` ordered by ascending eigenvalue,
/// each with its largest component made real positive.
pub fn gauge_diagonalize(a: &GaugeField) -> Result<GaugeDiagonalization> {
    let t = a.trunc;
    let h = (&t.energy() + &a.matrix).hermitian_part();
    let e = hermitian_eig(&h)?;
    let n = t.dim();
    let mut g = e.vectors.clone();
    for c in 0..n {
        let mut best = 0;
        for r in 0..n {
            if g[(r, c)].norm() > g[(best, c)].norm() + 1e-14 {
                best = r;
            }
        }
        let z = g[(best, c)];
        let ph = z.conj() / z.norm();
        for r in 0..n {
            g[(r, c)] *= ph;
        }
    }
    let nearest: Vec<i64> = e.values.iter().map(|x| x.round() as i64).collect();
    let tie = nearest.windows(2).any(|w| w[0] == w[1]);
    let mu: Vec<f64> = e.values.iter().enumerate().map(|(p, x)| x - t.label(p) as f64).collect();
    let g = LieMatrix::new(t, Role::Group, g)
        .map_err(|_| Error::Linalg(LinalgError::Numerical("eigenvector matrix not unitary".into())))?;
    let ag = gauge_act(a, &g)?;
    let mut off = 0.0f64;
    for r in 0..n {
        for c in 0..n {
            if r != c {
                off = off.max(ag.matrix[(r, c)].norm());
            }
        }
    }
    Ok(GaugeDiagonalization { g, mu, eigenvalues: e.values, tie, off_diagonal: off })
}

#[derive(Clone, Debug, Serialize)]
pub struct IsotropyReport {
    /// Pairs `(i, j)`, `i > j`, with `|i - j + μ_i - μ_j| < tol`; both `t_ij` and `t_ji` are isotropic.
    pub resonant_pairs: Vec<(i64, i64)>,
    pub tolerance: f64,
    pub summary: String,
}

pub const ISOTROPY_TOL: f64 = 1e-9;

pub fn isotropy(trunc: Truncation, mu: &[f64], tol: f64) -> Result<IsotropyReport> {
    if mu.len() != trunc.dim() {
        return Err(Error::Dimension(format!("mu has {} entries, window has {}", mu.len(), trunc.dim())));
    }
    let mut pairs = Vec::new();
    for i in trunc.labels() {
        for j in trunc.labels().filter(|&j| j < i) {
            let v = (i - j) as f64 + mu[trunc.pos(i)] - mu[trunc.pos(j)];
            if v.abs() < tol {
                pairs.push((i, j));
            }
        }
    }
    let summary = if pairs.is_empty() {
        "diagonal matrices only".to_string()
    } else {
        let dirs: Vec<String> = pairs.iter().map(|(i, j)| format!("t_({i},{j}), t_({j},{i})")).collect();
        format!("diagonal matrices plus {}", dirs.join("; "))
    };
    Ok(IsotropyReport { resonant_pairs: pairs, tolerance: tol, summary })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix_exp;
    use crate::linalg::random::random_skew_hermitian;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn group(t: Truncation, scale: f64, rng: &mut ChaCha8Rng) -> LieMatrix {
        let x = random_skew_hermitian::<f64, _>(t.dim(), scale, rng);
        LieMatrix::new(t, Role::Group, matrix_exp(&x).unwrap()).unwrap()
    }

    #[test]
    fn identity_and_composition() {
        let t = Truncation::new(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = GaugeField::random(t, 0.7, &mut rng);
        let id = LieMatrix::new(t, Role::Group, ComplexMatrix::identity(t.dim())).unwrap();
        assert!(gauge_act(&a, &id).unwrap().matrix.max_abs_diff(&a.matrix) < 1e-14);
        for _ in 0..5 {
            let g1 = group(t, 1.0, &mut rng);
            let g2 = group(t, 1.0, &mut rng);
            let lhs = gauge_act(&gauge_act(&a, &g1).unwrap(), &g2).unwrap();
            let g12 = LieMatrix::new(t, Role::Group, g1.matrix.matmul(&g2.matrix)).unwrap();
            let rhs = gauge_act(&a, &g12).unwrap();
            assert!(lhs.matrix.max_abs_diff(&rhs.matrix) < 1e-10);
        }
    }

    #[test]
    fn diagonal_gauge_keeps_diagonal_field() {
        let t = Truncation::new(1).unwrap();
        let a = GaugeField::diagonal(t, &[0.1, -0.2, 0.3]).unwrap();
        let ph: Vec<_> = [0.3f64, 1.1, -0.7].iter().map(|x| crate::C64::from_polar(1.0, *x)).collect();
        let g = LieMatrix::new(t, Role::Group, ComplexMatrix::from_diagonal(&ph)).unwrap();
        let ag = gauge_act(&a, &g).unwrap();
        assert_eq!(ag.mu.as_ref().map(|m| m.len()), Some(3));
        for (x, y) in ag.mu.unwrap().iter().zip([0.1, -0.2, 0.3]) {
            assert!((x - y).abs() < 1e-14);
        }
        let z = gauge_act(&GaugeField::zero(t), &g).unwrap();
        assert!(z.matrix.max_abs() < 1e-15);
    }

    #[test]
    fn non_unitary_rejected() {
        let t = Truncation::new(1).unwrap();
        let g = LieMatrix { trunc: t, role: Role::Group, matrix: ComplexMatrix::identity(3).scale_real(2.0) };
        assert!(matches!(gauge_act(&GaugeField::zero(t), &g), Err(Error::Precondition(_))));
    }

    #[test]
    fn diagonalization_examples() {
        let t = Truncation::new(1).unwrap();
        let a = GaugeField::diagonal(t, &[0.1, -0.2, 0.3]).unwrap();
        let gd = gauge_diagonalize(&a).unwrap();
        assert!(gd.g.matrix.max_abs_diff(&ComplexMatrix::identity(3)) < 1e-12);
        for (x, y) in gd.mu.iter().zip([0.1, -0.2, 0.3]) {
            assert!((x - y).abs() < 1e-12);
        }
        let t2 = Truncation::new(2).unwrap();
        let m = (&t2.unit(1, 2) + &t2.unit(2, 1)).scale_real(0.1);
        let gd = gauge_diagonalize(&GaugeField::new(t2, m).unwrap()).unwrap();
        assert!(gd.off_diagonal < 1e-10);
        assert!(!gd.tie);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..10 {
            let a = GaugeField::random(t2, 0.3, &mut rng);
            let gd = gauge_diagonalize(&a).unwrap();
            assert!(gd.off_diagonal < 1e-10);
            let mun = gd.mu.iter().map(|x| x * x).sum::<f64>().sqrt();
            assert!(mun <= a.matrix.frobenius_norm() + 1.0);
        }
    }

    #[test]
    fn isotropy_examples() {
        let t = Truncation::new(1).unwrap();
        assert!(isotropy(t, &[0.0; 3], ISOTROPY_TOL).unwrap().resonant_pairs.is_empty());
        let r = isotropy(t, &[0.0, 1.0, 0.0], ISOTROPY_TOL).unwrap();
        assert_eq!(r.resonant_pairs, vec![(1, 0)]);
        let g = [std::f64::consts::SQRT_2 / 10.0, std::f64::consts::PI / 17.0, std::f64::consts::E / 31.0];
        assert!(isotropy(t, &g, ISOTROPY_TOL).unwrap().resonant_pairs.is_empty());
    }
}
