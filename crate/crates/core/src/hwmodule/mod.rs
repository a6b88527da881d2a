//! Level-k highest-weight modules of the truncated algebra.
//!
//! `rho(e_ij) = E_ij + k i delta_ij` on the gl(2N+1) irreducible of highest weight
//! `m_i = lambda_i - k i`; the shift absorbs the central term exactly.

pub mod gelfand_tsetlin;
pub mod weight;

use rand::Rng;
use serde::Serialize;

pub use gelfand_tsetlin::GtBasis;
pub use weight::{check_dominance, weyl_dimension, Dominance, Violation, Weight};

use crate::liealg::Truncation;
use crate::report::VerifyReport;
use crate::{re, Error, Result, SparseMatrix, C64};

pub const DEFAULT_DIM_CAP: usize = 100_000;

#[derive(Clone, Debug)]
pub struct HwModule {
    weight: Weight,
    basis: GtBasis,
    rho: Vec<SparseMatrix>,
}

/// Index of the highest-weight vector in the Gelfand–Tsetlin basis.
pub const HW_INDEX: usize = 0;

pub fn build_module(weight: &Weight, dim_cap: usize) -> Result<HwModule> {
    let dom = check_dominance(weight);
    if let Some((i, j)) = dom.first_violation {
        return Err(Error::Weight(format!(
            "dominance fails at ({i},{j}): lambda_i - lambda_j - k(i-j) = {}",
            dom.violations[0].value
        )));
    }
    let m = weight.shifted();
    let dim = weyl_dimension(&m)?;
    if dim > dim_cap as u128 {
        return Err(Error::Resource(format!("module dimension {dim} exceeds cap {dim_cap}")));
    }
    let basis = GtBasis::new(&m);
    if basis.len() as u128 != dim {
        return Err(Error::Numerical(format!("pattern count {} differs from Weyl dimension {dim}", basis.len())));
    }
    let t = weight.trunc;
    let k = weight.level as f64;
    let mut rho = basis.generators()?;
    let id = SparseMatrix::identity(basis.len());
    for i in t.labels() {
        let p = t.pos(i);
        let idx = p * t.dim() + p;
        if i != 0 && k != 0.0 {
            rho[idx] = rho[idx].add_scaled(re(k * i as f64), &id);
        }
    }
    Ok(HwModule { weight: weight.clone(), basis, rho })
}

impl HwModule {
    pub fn weight(&self) -> &Weight {
        &self.weight
    }

    pub fn trunc(&self) -> Truncation {
        self.weight.trunc
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &GtBasis {
        &self.basis
    }

    pub fn rho(&self, i: i64, j: i64) -> &SparseMatrix {
        let t = self.trunc();
        &self.rho[t.pos(i) * t.dim() + t.pos(j)]
    }

    pub fn highest_weight_vector(&self) -> Vec<C64> {
        let mut v = vec![C64::new(0.0, 0.0); self.dim()];
        v[HW_INDEX] = re(1.0);
        v
    }

    /// Eigenvalues of `rho(e_ii)` on basis vector `a`, window order.
    pub fn weight_of(&self, a: usize) -> Vec<i64> {
        self.trunc().labels().map(|i| self.rho(i, i).get(a, a).re.round() as i64).collect()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PositivityWitness {
    pub norm_sq: f64,
    pub expected: f64,
    pub deviation: f64,
}

pub const POSITIVITY_TOL: f64 = 1e-9;

/// `||rho(e_ji) v_hw||^2` against `lambda_i - lambda_j + k(j - i)` (`i < j`) or `lambda_i^2` (`i = j`).
pub fn positivity_witness(module: &HwModule, i: i64, j: i64) -> Result<PositivityWitness> {
    let t = module.trunc();
    if !t.contains(i) || !t.contains(j) || i > j {
        return Err(Error::Precondition(format!("positivity witness needs i <= j in window, got ({i},{j})")));
    }
    let v = module.rho(j, i).matvec(&module.highest_weight_vector());
    let norm_sq: f64 = v.iter().map(|z| z.norm_sqr()).sum();
    let w = &module.weight;
    let expected = if i == j {
        (w.lambda_at(i) as f64).powi(2)
    } else {
        (w.lambda_at(i) - w.lambda_at(j) + w.level * (j - i)) as f64
    };
    Ok(PositivityWitness { norm_sq, expected, deviation: (norm_sq - expected).abs() })
}

pub const COMMUTATOR_TOL: f64 = 1e-9;
pub const UNITARITY_TOL: f64 = 1e-10;
pub const ANNIHILATION_TOL: f64 = 1e-10;
/// Generator pairs sampled when the full grid is skipped.
pub const SAMPLED_PAIRS: usize = 200;

/// Module invariants; `full_grid` selects all `(2N+1)^4` pairs instead of a sample.
pub fn check_module<R: Rng + ?Sized>(module: &HwModule, full_grid: bool, rng: &mut R) -> VerifyReport {
    let t = module.trunc();
    let k = module.weight.level as f64;
    let dim = module.dim();
    let id = SparseMatrix::identity(dim);
    let labels: Vec<i64> = t.labels().collect();
    let mut report = VerifyReport::new();

    let mut pairs: Vec<(i64, i64, i64, i64)> = Vec::new();
    if full_grid {
        for &i in &labels {
            for &j in &labels {
                for &l in &labels {
                    for &m in &labels {
                        pairs.push((i, j, l, m));
                    }
                }
            }
        }
    } else {
        let pick = |rng: &mut R| labels[rng.gen_range(0..labels.len())];
        for _ in 0..SAMPLED_PAIRS {
            let (i, j, l) = (pick(rng), pick(rng), pick(rng));
            // Alternate between central-term pairs and generic ones.
            let m = if rng.gen_bool(0.5) { i } else { pick(rng) };
            pairs.push((i, j, l, m));
        }
    }
    let mut comm = 0.0f64;
    for &(i, j, l, m) in &pairs {
        let lhs = module.rho(i, j).commutator(module.rho(l, m));
        let mut rhs = SparseMatrix::zeros(dim, dim);
        if j == l {
            rhs = rhs.add(module.rho(i, m));
        }
        if i == m {
            rhs = rhs.sub(module.rho(l, j));
        }
        if j == l && i == m {
            rhs = rhs.add_scaled(re(k * (l - i) as f64), &id);
        }
        comm = comm.max(lhs.max_abs_diff(&rhs));
    }
    report.record("module_commutator_grid", comm, COMMUTATOR_TOL);

    let mut unit = 0.0f64;
    let mut ann = 0.0f64;
    let mut hw_weight = 0.0f64;
    let v = module.highest_weight_vector();
    for &i in &labels {
        for &j in &labels {
            unit = unit.max(module.rho(i, j).adjoint().max_abs_diff(module.rho(j, i)));
            let img = module.rho(i, j).matvec(&v);
            if i < j {
                ann = ann.max(crate::linalg::scalar::norm(&img));
            }
            if i == j {
                let lam = module.weight.lambda_at(i) as f64;
                let dev = img.iter().zip(&v).map(|(a, b)| (a - b * lam).norm()).fold(0.0, f64::max);
                hw_weight = hw_weight.max(dev);
            }
        }
    }
    report.record("module_unitarity", unit, UNITARITY_TOL);
    report.record("highest_weight_annihilation", ann, ANNIHILATION_TOL);
    report.record("highest_weight_eigenvalue", hw_weight, ANNIHILATION_TOL);
    let weyl = weyl_dimension(&module.weight.shifted()).unwrap_or(0);
    report.record_bool("dimension_matches_weyl", weyl == dim as u128);
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn t(n: usize) -> Truncation {
        Truncation::new(n).unwrap()
    }

    fn module(n: usize, lambda: Vec<i64>, k: i64) -> HwModule {
        build_module(&Weight::new(t(n), lambda, k).unwrap(), DEFAULT_DIM_CAP).unwrap()
    }

    #[test]
    fn basic_module_n1() {
        let m = module(1, vec![0; 3], 1);
        assert_eq!(m.dim(), 8);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let r = check_module(&m, true, &mut rng);
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn trivial_module() {
        let m = module(1, vec![0; 3], 0);
        assert_eq!(m.dim(), 1);
        for i in -1..=1 {
            for j in -1..=1 {
                assert_eq!(m.rho(i, j).max_abs(), 0.0);
            }
        }
    }

    #[test]
    fn other_weights_n1() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for (lambda, k, dim) in [(vec![0, 0, 0], 2, 27), (vec![0, 0, -1], 1, 15), (vec![1, 0, 0], 0, 3)] {
            let m = module(1, lambda, k);
            assert_eq!(m.dim(), dim);
            assert!(check_module(&m, true, &mut rng).passed());
        }
    }

    #[test]
    fn basic_module_n2_sampled() {
        let m = module(2, vec![0; 5], 1);
        assert_eq!(m.dim(), 1024);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let r = check_module(&m, false, &mut rng);
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn positivity_examples() {
        let m = module(1, vec![0; 3], 1);
        let w = positivity_witness(&m, 0, 1).unwrap();
        assert!((w.norm_sq - 1.0).abs() < 1e-12);
        let w = positivity_witness(&m, 0, 0).unwrap();
        assert_eq!(w.norm_sq, 0.0);
        let m = module(1, vec![0, 0, -1], 1);
        let w = positivity_witness(&m, -1, 1).unwrap();
        assert!((w.norm_sq - 3.0).abs() < 1e-12);
        assert!(w.deviation < POSITIVITY_TOL);
        let m = module(1, vec![2, 1, 1], 0);
        let w = positivity_witness(&m, 1, 1).unwrap();
        assert!((w.norm_sq - 1.0).abs() < 1e-12);
        assert!(positivity_witness(&m, 1, 0).is_err());
    }

    #[test]
    fn non_dominant_and_capped() {
        let w = Weight::new(t(1), vec![0, 0, 1], 0).unwrap();
        assert!(matches!(build_module(&w, DEFAULT_DIM_CAP), Err(Error::Weight(_))));
        let w = Weight::zero(t(2), 1).unwrap();
        assert!(matches!(build_module(&w, 1000), Err(Error::Resource(_))));
    }
}
