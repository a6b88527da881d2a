use std::sync::OnceLock;

use crate::linalg::scalar::axpy;
use crate::linalg::LinearMap;
use crate::{re, ComplexMatrix, SparseMatrix, C64};

/// `left ⊗ right`; a missing factor is the identity.
#[derive(Clone, Debug)]
pub struct KronTerm {
    pub left: Option<SparseMatrix>,
    pub right: Option<SparseMatrix>,
}

impl KronTerm {
    fn adjoint(&self) -> Self {
        Self {
            left: self.left.as_ref().map(SparseMatrix::adjoint),
            right: self.right.as_ref().map(SparseMatrix::adjoint),
        }
    }

    fn scaled(mut self, c: C64) -> Self {
        match (&mut self.right, &mut self.left) {
            (Some(r), _) => *r = r.scale(c),
            (None, Some(l)) => *l = l.scale(c),
            (None, None) => unreachable!("identity terms are stored with an explicit factor"),
        }
        self
    }
}

/// Operator on `V ⊗ S` as a sum of Kronecker products, applied without materializing.
///
/// Vectors are indexed `a * dim_right + f` (module index major, Fock index minor).
#[derive(Clone, Debug)]
pub struct WeilOperator {
    dim_left: usize,
    dim_right: usize,
    terms: Vec<KronTerm>,
    self_adjoint: bool,
    adjoint: OnceLock<Vec<KronTerm>>,
    columns: OnceLock<Vec<KronTerm>>,
}

impl WeilOperator {
    pub fn zero(dim_left: usize, dim_right: usize) -> Self {
        Self::from_terms(dim_left, dim_right, Vec::new(), true)
    }

    pub fn identity(dim_left: usize, dim_right: usize) -> Self {
        Self::right_only(dim_left, SparseMatrix::identity(dim_right), true)
    }

    pub fn from_terms(dim_left: usize, dim_right: usize, terms: Vec<KronTerm>, self_adjoint: bool) -> Self {
        for t in &terms {
            if let Some(l) = &t.left {
                assert_eq!((l.rows(), l.cols()), (dim_left, dim_left), "left factor shape");
            }
            if let Some(r) = &t.right {
                assert_eq!((r.rows(), r.cols()), (dim_right, dim_right), "right factor shape");
            }
            assert!(t.left.is_some() || t.right.is_some(), "term needs a factor");
        }
        let mut op = Self {
            dim_left,
            dim_right,
            terms: Vec::new(),
            self_adjoint,
            adjoint: OnceLock::new(),
            columns: OnceLock::new(),
        };
        let mut left_only: Option<SparseMatrix> = None;
        let mut right_only: Option<SparseMatrix> = None;
        for t in terms {
            match (t.left, t.right) {
                (Some(l), None) => left_only = Some(left_only.map_or(l.clone(), |a| a.add(&l))),
                (None, Some(r)) => right_only = Some(right_only.map_or(r.clone(), |a| a.add(&r))),
                (Some(l), Some(r)) => {
                    if l.nnz() > 0 && r.nnz() > 0 {
                        op.terms.push(KronTerm { left: Some(l), right: Some(r) });
                    }
                }
                (None, None) => unreachable!(),
            }
        }
        if let Some(l) = left_only.filter(|l| l.nnz() > 0) {
            op.terms.push(KronTerm { left: Some(l), right: None });
        }
        if let Some(r) = right_only.filter(|r| r.nnz() > 0) {
            op.terms.push(KronTerm { left: None, right: Some(r) });
        }
        op
    }

    pub fn left_only(m: SparseMatrix, dim_right: usize, self_adjoint: bool) -> Self {
        let d = m.rows();
        Self::from_terms(d, dim_right, vec![KronTerm { left: Some(m), right: None }], self_adjoint)
    }

    pub fn right_only(dim_left: usize, m: SparseMatrix, self_adjoint: bool) -> Self {
        let d = m.rows();
        Self::from_terms(dim_left, d, vec![KronTerm { left: None, right: Some(m) }], self_adjoint)
    }

    pub fn dim_left(&self) -> usize {
        self.dim_left
    }

    pub fn dim_right(&self) -> usize {
        self.dim_right
    }

    pub fn terms(&self) -> &[KronTerm] {
        &self.terms
    }

    /// Whether the operator was constructed as self-adjoint; verify with probes.
    pub fn is_self_adjoint(&self) -> bool {
        self.self_adjoint
    }

    pub fn with_self_adjoint(mut self, flag: bool) -> Self {
        self.self_adjoint = flag;
        self.adjoint = OnceLock::new();
        self
    }

    pub fn scale(&self, c: C64) -> Self {
        let terms = self.terms.iter().cloned().map(|t| t.scaled(c)).collect();
        Self::from_terms(self.dim_left, self.dim_right, terms, self.self_adjoint && c.im == 0.0)
    }

    /// `self + c * other`; the self-adjoint flag survives only for real `c`.
    pub fn add_scaled(&self, c: C64, other: &Self) -> Self {
        assert_eq!((self.dim_left, self.dim_right), (other.dim_left, other.dim_right));
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned().map(|t| t.scaled(c)));
        let sa = self.self_adjoint && other.self_adjoint && c.im == 0.0;
        Self::from_terms(self.dim_left, self.dim_right, terms, sa)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.add_scaled(re(1.0), other)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add_scaled(re(-1.0), other)
    }

    /// Sum of Kronecker products materialized as one sparse matrix.
    pub fn to_sparse(&self) -> SparseMatrix {
        let mut acc = SparseMatrix::zeros(self.dim(), self.dim());
        let il = SparseMatrix::identity(self.dim_left);
        let ir = SparseMatrix::identity(self.dim_right);
        for t in &self.terms {
            let l = t.left.as_ref().unwrap_or(&il);
            let r = t.right.as_ref().unwrap_or(&ir);
            acc = acc.add(&SparseMatrix::kron(l, r));
        }
        acc
    }

    pub fn to_dense(&self) -> ComplexMatrix {
        self.to_sparse().to_dense()
    }

    /// Upper bound on the operator 1-norm.
    pub fn norm_one_bound(&self) -> f64 {
        let one = |m: &SparseMatrix| {
            let mut col = vec![0.0f64; m.cols()];
            for (_, j, v) in m.triplets() {
                col[j] += v.norm();
            }
            col.into_iter().fold(0.0, f64::max)
        };
        self.terms.iter().map(|t| t.left.as_ref().map_or(1.0, one) * t.right.as_ref().map_or(1.0, one)).sum()
    }

    fn adjoint_terms(&self) -> &[KronTerm] {
        self.adjoint.get_or_init(|| self.terms.iter().map(KronTerm::adjoint).collect())
    }

    /// Transposed factors, so that rows of the stored matrices are columns of the originals.
    fn column_terms(&self) -> &[KronTerm] {
        self.columns.get_or_init(|| {
            self.terms
                .iter()
                .map(|t| KronTerm {
                    left: t.left.as_ref().map(SparseMatrix::transpose),
                    right: t.right.as_ref().map(SparseMatrix::transpose),
                })
                .collect()
        })
    }

    /// Appends the nonzero entries of column `col` as `(row, value)`; rows may repeat.
    pub fn column_entries(&self, col: usize, out: &mut Vec<(usize, C64)>) {
        let dr = self.dim_right;
        let (a, f) = (col / dr, col % dr);
        for t in self.column_terms() {
            match (&t.left, &t.right) {
                (Some(l), Some(r)) => {
                    for (b, lv) in l.row_entries(a) {
                        for (g, rv) in r.row_entries(f) {
                            out.push((b * dr + g, lv * rv));
                        }
                    }
                }
                (Some(l), None) => out.extend(l.row_entries(a).map(|(b, lv)| (b * dr + f, lv))),
                (None, Some(r)) => out.extend(r.row_entries(f).map(|(g, rv)| (a * dr + g, rv))),
                (None, None) => unreachable!(),
            }
        }
    }

    fn apply_terms(&self, terms: &[KronTerm], x: &[C64], y: &mut [C64]) {
        let (dl, dr) = (self.dim_left, self.dim_right);
        assert_eq!(x.len(), dl * dr, "vector length");
        assert_eq!(y.len(), dl * dr, "vector length");
        y.fill(C64::new(0.0, 0.0));
        let one = re(1.0);
        let mut tmp: Vec<C64> = Vec::new();
        for t in terms {
            match (&t.left, &t.right) {
                (None, Some(r)) => {
                    for a in 0..dl {
                        r.matvec_add(one, &x[a * dr..(a + 1) * dr], &mut y[a * dr..(a + 1) * dr]);
                    }
                }
                (Some(l), None) => {
                    for b in 0..dl {
                        let yb = &mut y[b * dr..(b + 1) * dr];
                        for (a, lv) in l.row_entries(b) {
                            axpy(lv, &x[a * dr..(a + 1) * dr], yb);
                        }
                    }
                }
                (Some(l), Some(r)) => {
                    tmp.resize(dl * dr, C64::new(0.0, 0.0));
                    tmp.fill(C64::new(0.0, 0.0));
                    for a in 0..dl {
                        r.matvec_add(one, &x[a * dr..(a + 1) * dr], &mut tmp[a * dr..(a + 1) * dr]);
                    }
                    for b in 0..dl {
                        let yb = &mut y[b * dr..(b + 1) * dr];
                        for (a, lv) in l.row_entries(b) {
                            axpy(lv, &tmp[a * dr..(a + 1) * dr], yb);
                        }
                    }
                }
                (None, None) => unreachable!(),
            }
        }
    }
}

impl LinearMap<f64> for WeilOperator {
    fn dim(&self) -> usize {
        self.dim_left * self.dim_right
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        self.apply_terms(&self.terms, x, y);
    }

    fn apply_adjoint(&self, x: &[C64], y: &mut [C64]) {
        if self.self_adjoint {
            self.apply_terms(&self.terms, x, y);
        } else {
            self.apply_terms(self.adjoint_terms(), x, y);
        }
    }

    fn materialize(&self) -> ComplexMatrix {
        self.to_dense()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::linear_map::adjointness_defect;
    use crate::linalg::random::random_matrix;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn kron_sum_matches_dense_assembly() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = SparseMatrix::from_dense(&random_matrix(3, &mut rng), 0.0);
        let b = SparseMatrix::from_dense(&random_matrix(4, &mut rng), 0.0);
        let c = SparseMatrix::from_dense(&random_matrix(3, &mut rng), 0.0);
        let op = WeilOperator::from_terms(
            3,
            4,
            vec![
                KronTerm { left: Some(a.clone()), right: Some(b.clone()) },
                KronTerm { left: Some(c.clone()), right: None },
                KronTerm { left: None, right: Some(b.clone()) },
            ],
            false,
        );
        let dense = SparseMatrix::kron(&a, &b)
            .add(&SparseMatrix::kron(&c, &SparseMatrix::identity(4)))
            .add(&SparseMatrix::kron(&SparseMatrix::identity(3), &b))
            .to_dense();
        assert!(op.materialize().max_abs_diff(&dense) < 1e-14);
        assert!(adjointness_defect(&op, 3, &mut rng) < 1e-13);
        let mut col = Vec::new();
        op.column_entries(5, &mut col);
        let mut v = [C64::new(0.0, 0.0); 12];
        for (r, z) in col {
            v[r] += z;
        }
        for (r, z) in v.iter().enumerate() {
            assert!((z - dense[(r, 5)]).norm() < 1e-14);
        }
        assert!(op.norm_one_bound() >= dense.norm_one() - 1e-12);
    }
}
