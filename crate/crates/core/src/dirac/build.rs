use serde::Serialize;

use super::gauge::GaugeField;
use super::operator::{KronTerm, WeilOperator};
use super::WeilSpace;
use crate::linalg::LinearMap;
use crate::{re, ComplexMatrix, Error, Result, SparseMatrix, C64};

fn check_window(space: &WeilSpace, i: i64, j: i64) -> Result<()> {
    let t = space.trunc();
    if !t.contains(i) || !t.contains(j) {
        return Err(Error::Precondition(format!("index ({i},{j}) outside window [-{0},{0}]", t.n())));
    }
    Ok(())
}

/// `t_ij = ρ(e_ij) ⊗ Id + Id ⊗ s_ij`
pub fn t_operator(space: &WeilSpace, i: i64, j: i64) -> Result<WeilOperator> {
    check_window(space, i, j)?;
    let terms = vec![
        KronTerm { left: Some(space.module().rho(i, j).clone()), right: None },
        KronTerm { left: None, right: Some(space.spin().spin(i, j).clone()) },
    ];
    Ok(WeilOperator::from_terms(space.dim_module(), space.dim_fock(), terms, i == j))
}

pub fn t_apply(space: &WeilSpace, i: i64, j: i64, v: &[C64]) -> Result<Vec<C64>> {
    if v.len() != space.dim() {
        return Err(Error::Dimension(format!("vector length {} differs from dim {}", v.len(), space.dim())));
    }
    Ok(t_operator(space, i, j)?.apply_vec(v))
}

/// `Id ⊗ γ_ij`
pub fn gamma_operator(space: &WeilSpace, i: i64, j: i64) -> Result<WeilOperator> {
    check_window(space, i, j)?;
    Ok(WeilOperator::right_only(space.dim_module(), space.spin().gamma(i, j).clone(), i == j))
}

/// `Γ(B) = Σ_ij B_ji γ_ij`; self-adjoint when `B` is Hermitian.
pub fn gamma_field(space: &WeilSpace, b: &ComplexMatrix) -> Result<WeilOperator> {
    let t = space.trunc();
    if b.rows() != t.dim() || b.cols() != t.dim() {
        return Err(Error::Dimension(format!("matrix is {}x{}, window has {}", b.rows(), b.cols(), t.dim())));
    }
    let df = space.dim_fock();
    let mut acc = SparseMatrix::zeros(df, df);
    for i in t.labels() {
        for j in t.labels() {
            let c = b[(t.pos(j), t.pos(i))];
            if c.norm() > 0.0 {
                acc = acc.add_scaled(c, space.spin().gamma(i, j));
            }
        }
    }
    let herm = b.hermitian_defect() == 0.0;
    Ok(WeilOperator::right_only(space.dim_module(), acc, herm))
}

/// `Σ_{i>j} s_ij γ_ji + Σ_{i<=j} γ_ji s_ij` on `S`.
fn cubic_term(space: &WeilSpace) -> SparseMatrix {
    let t = space.trunc();
    let sp = space.spin();
    let df = sp.dim();
    let mut acc = SparseMatrix::zeros(df, df);
    for i in t.labels() {
        for j in t.labels() {
            let term = if i > j { sp.spin(i, j).matmul(sp.gamma(j, i)) } else { sp.gamma(j, i).matmul(sp.spin(i, j)) };
            acc = acc.add(&term);
        }
    }
    acc
}

/// `D = Σ_ij ρ(e_ij) ⊗ γ_ji + ⅓ Id ⊗ (normal-ordered cubic term)`
pub fn build_dirac(space: &WeilSpace) -> WeilOperator {
    let t = space.trunc();
    let mut terms = Vec::with_capacity(t.dim() * t.dim() + 1);
    for i in t.labels() {
        for j in t.labels() {
            terms.push(KronTerm {
                left: Some(space.module().rho(i, j).clone()),
                right: Some(space.spin().gamma(j, i).clone()),
            });
        }
    }
    terms.push(KronTerm { left: None, right: Some(cubic_term(space).scale(re(1.0 / 3.0))) });
    WeilOperator::from_terms(space.dim_module(), space.dim_fock(), terms, true)
}

/// Coefficient of the fermionic quadratic in the closed form of `D²`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClosedFormConvention {
    /// `Σ :e_ij e_ji: + Σ i :γ_ij γ_ji:`, exact only at level 0.
    AsStated,
    /// `Σ :e_ij e_ji: + (k+1) Σ i :γ_ij γ_ji:`, exact at every level.
    LevelCorrected,
}

/// `:e_ij e_ji:` is `e_ij e_ji` for `j <= i` and `e_ji e_ij` otherwise.
fn bosonic_quadratic(space: &WeilSpace) -> SparseMatrix {
    let t = space.trunc();
    let m = space.module();
    let mut acc = SparseMatrix::zeros(m.dim(), m.dim());
    for i in t.labels() {
        for j in t.labels() {
            let p = if j <= i { m.rho(i, j).matmul(m.rho(j, i)) } else { m.rho(j, i).matmul(m.rho(i, j)) };
            acc = acc.add(&p);
        }
    }
    acc
}

/// `Σ_ij i :γ_ij γ_ji:` with Wick subtraction of the Fock-vacuum expectation.
fn fermionic_quadratic(space: &WeilSpace) -> SparseMatrix {
    let t = space.trunc();
    let sp = space.spin();
    let df = sp.dim();
    let id = SparseMatrix::identity(df);
    let mut acc = SparseMatrix::zeros(df, df);
    for i in t.labels() {
        for j in t.labels() {
            let p = sp.gamma(i, j).matmul(sp.gamma(j, i));
            let wick = p.sub(&id.scale(p.get(0, 0)));
            acc = acc.add_scaled(re(i as f64), &wick);
        }
    }
    acc
}

pub fn dirac_square_closed_form(space: &WeilSpace, convention: ClosedFormConvention) -> WeilOperator {
    let c = match convention {
        ClosedFormConvention::AsStated => 1.0,
        ClosedFormConvention::LevelCorrected => (space.level() + 1) as f64,
    };
    let terms = vec![
        KronTerm { left: Some(bosonic_quadratic(space)), right: None },
        KronTerm { left: None, right: Some(fermionic_quadratic(space).scale(re(c))) },
    ];
    WeilOperator::from_terms(space.dim_module(), space.dim_fock(), terms, true)
}

/// `C = D² - Σ_i 2(k+1) i t_ii`, kept as `D` composed with itself.
#[derive(Clone, Debug)]
pub struct Casimir {
    pub dirac: WeilOperator,
    pub correction: WeilOperator,
}

pub fn casimir(space: &WeilSpace, dirac: &WeilOperator) -> Casimir {
    let t = space.trunc();
    let k1 = (space.level() + 1) as f64;
    let mut corr = WeilOperator::zero(space.dim_module(), space.dim_fock());
    for i in t.labels() {
        let tii = t_operator(space, i, i).expect("window index");
        corr = corr.add_scaled(re(2.0 * k1 * i as f64), &tii);
    }
    Casimir { dirac: dirac.clone(), correction: corr }
}

impl Casimir {
    pub fn to_sparse(&self) -> SparseMatrix {
        let d = self.dirac.to_sparse();
        d.matmul(&d).sub(&self.correction.to_sparse())
    }
}

impl LinearMap<f64> for Casimir {
    fn dim(&self) -> usize {
        self.dirac.dim()
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        let mut tmp = vec![C64::new(0.0, 0.0); x.len()];
        self.dirac.apply(x, &mut tmp);
        self.dirac.apply(&tmp, y);
        self.correction.apply(x, &mut tmp);
        for (a, b) in y.iter_mut().zip(&tmp) {
            *a -= b;
        }
    }

    fn apply_adjoint(&self, x: &[C64], y: &mut [C64]) {
        self.apply(x, y)
    }
}

/// `λ² - Σ_i 2(k+1) i λ_i`
pub fn casimir_vacuum_value(space: &WeilSpace) -> f64 {
    let t = space.trunc();
    let k1 = (space.level() + 1) as f64;
    t.labels().zip(space.lambda()).map(|(i, &l)| (l * l) as f64 - 2.0 * k1 * i as f64 * l as f64).sum()
}

/// `D_A = D + (k+1) Σ_ij A_ji γ_ij`
pub fn couple(space: &WeilSpace, dirac: &WeilOperator, a: &GaugeField) -> Result<WeilOperator> {
    if a.trunc != space.trunc() {
        return Err(Error::Precondition("gauge field truncation differs from the space".into()));
    }
    let k1 = (space.level() + 1) as f64;
    let g = gamma_field(space, &a.matrix)?.with_self_adjoint(true);
    Ok(dirac.add_scaled(re(k1), &g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hwmodule::Weight;
    use crate::liealg::Truncation;

    fn space(lambda: Vec<i64>, k: i64) -> WeilSpace {
        let t = Truncation::new(1).unwrap();
        WeilSpace::new(&Weight::new(t, lambda, k).unwrap(), 10_000).unwrap()
    }

    #[test]
    fn dimension_of_default_space() {
        assert_eq!(space(vec![0, 0, 0], 1).dim(), 128);
    }

    #[test]
    fn closed_form_level_corrected_is_exact() {
        for k in 0..=2 {
            let s = space(vec![0, 0, 0], k);
            let d = build_dirac(&s).to_sparse();
            let d2 = d.matmul(&d);
            let lc = dirac_square_closed_form(&s, ClosedFormConvention::LevelCorrected).to_sparse();
            assert!(d2.max_abs_diff(&lc) < 1e-10, "k={k}");
            let lit = dirac_square_closed_form(&s, ClosedFormConvention::AsStated).to_sparse();
            let dev = d2.max_abs_diff(&lit);
            if k == 0 {
                assert!(dev < 1e-10);
            } else {
                // The defect is k times the fermionic quadratic, which is not a scalar.
                let f = WeilOperator::right_only(s.dim_module(), fermionic_quadratic(&s), true).to_sparse();
                assert!(d2.sub(&lit).max_abs_diff(&f.scale(re(k as f64))) < 1e-10);
                assert!(dev > 1.0);
            }
        }
    }

    #[test]
    fn casimir_vacuum_value_example() {
        let s = space(vec![0, 0, -1], 1);
        assert_eq!(casimir_vacuum_value(&s), 5.0);
        let c = casimir(&s, &build_dirac(&s));
        let v = s.hw_vacuum();
        let cv = c.apply_vec(&v);
        for (x, y) in cv.iter().zip(&v) {
            assert!((x - y * 5.0).norm() < 1e-10);
        }
    }
}
