//! Fermionic Fock model of the spin module: off-diagonal modes `(i, j)`, `j < i`, carry the
//! exterior algebra factor; paired diagonal modes `k = 1..N` carry the spinor factor.

use rand::Rng;
use serde::Serialize;

use crate::liealg::Truncation;
use crate::linalg::random::random_vector;
use crate::linalg::scalar::diff_norm;
use crate::report::VerifyReport;
use crate::{re, Error, Result, SparseMatrix, C64, I};

/// Largest cutoff whose spin module is built explicitly (`2^M = 4096` at `N = 2`).
pub const MAX_SPIN_N: usize = 2;

/// Fixed mode order: off-diagonal `(i, j)` lexicographic, then paired modes `k = 1..N`.
#[derive(Clone, Debug, Serialize)]
pub struct ModeTable {
    trunc: Truncation,
    off: Vec<(i64, i64)>,
    #[serde(skip)]
    off_lookup: Vec<Option<usize>>,
}

impl ModeTable {
    pub fn new(trunc: Truncation) -> Self {
        let mut off = Vec::new();
        for i in trunc.labels() {
            for j in trunc.labels() {
                if j < i {
                    off.push((i, j));
                }
            }
        }
        let n = trunc.dim();
        let mut off_lookup = vec![None; n * n];
        for (m, &(i, j)) in off.iter().enumerate() {
            off_lookup[trunc.pos(i) * n + trunc.pos(j)] = Some(m);
        }
        Self { trunc, off, off_lookup }
    }

    pub fn trunc(&self) -> Truncation {
        self.trunc
    }

    pub fn off_count(&self) -> usize {
        self.off.len()
    }

    /// `M = N(2N+1) + N`
    pub fn mode_count(&self) -> usize {
        self.off.len() + self.trunc.n()
    }

    pub fn fock_dim(&self) -> usize {
        1usize << self.mode_count()
    }

    pub fn off_modes(&self) -> &[(i64, i64)] {
        &self.off
    }

    /// Mode of `(i, j)`, `i > j`.
    pub fn off_mode(&self, i: i64, j: i64) -> usize {
        let n = self.trunc.dim();
        self.off_lookup[self.trunc.pos(i) * n + self.trunc.pos(j)].expect("off-diagonal mode needs i > j")
    }

    /// Mode of the pair `(k, -k)`, `k >= 1`.
    pub fn paired_mode(&self, k: usize) -> usize {
        debug_assert!(k >= 1 && k <= self.trunc.n());
        self.off.len() + k - 1
    }

    pub fn off_mask(&self) -> usize {
        (1usize << self.off.len()) - 1
    }
}

#[inline]
fn jw_sign(state: usize, mode: usize) -> f64 {
    if (state & ((1usize << mode) - 1)).count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

#[inline]
fn occupied(state: usize, mode: usize) -> bool {
    state >> mode & 1 == 1
}

/// Spin module with all generators materialized as sparse matrices.
#[derive(Clone, Debug)]
pub struct SpinModule {
    table: ModeTable,
    gammas: Vec<SparseMatrix>,
    spins: Vec<SparseMatrix>,
}

/// Phase convention of the zero-mode generator, recorded in reports.
pub const GAMMA00_PHASE: &str = "+i^{N(2N-1)}";

impl SpinModule {
    pub fn new(trunc: Truncation) -> Result<Self> {
        if trunc.n() > MAX_SPIN_N {
            return Err(Error::Resource(format!(
                "spin module at N={} has dimension 2^{}; limit is N={MAX_SPIN_N}",
                trunc.n(),
                ModeTable::new(trunc).mode_count()
            )));
        }
        let table = ModeTable::new(trunc);
        let n = trunc.dim();
        let dim = table.fock_dim();
        let mut gammas = Vec::with_capacity(n * n);
        for i in trunc.labels() {
            for j in trunc.labels() {
                let t: Vec<_> =
                    (0..dim).filter_map(|s| gamma_action(&table, i, j, s).map(|(c, s2)| (s2, s, c))).collect();
                gammas.push(SparseMatrix::from_triplets(dim, dim, t));
            }
        }
        let mut module = Self { table, gammas, spins: Vec::new() };
        let mut spins = Vec::with_capacity(n * n);
        for i in trunc.labels() {
            for j in trunc.labels() {
                spins.push(module.build_spin(i, j));
            }
        }
        module.spins = spins;
        Ok(module)
    }

    pub fn table(&self) -> &ModeTable {
        &self.table
    }

    pub fn trunc(&self) -> Truncation {
        self.table.trunc
    }

    pub fn dim(&self) -> usize {
        self.table.fock_dim()
    }

    fn idx(&self, i: i64, j: i64) -> usize {
        let t = self.table.trunc;
        t.pos(i) * t.dim() + t.pos(j)
    }

    fn check_indices(&self, i: i64, j: i64) -> Result<()> {
        let t = self.table.trunc;
        if !t.contains(i) || !t.contains(j) {
            return Err(Error::Precondition(format!("index ({i},{j}) outside window [-{0},{0}]", t.n())));
        }
        Ok(())
    }

    pub fn gamma(&self, i: i64, j: i64) -> &SparseMatrix {
        &self.gammas[self.idx(i, j)]
    }

    pub fn spin(&self, i: i64, j: i64) -> &SparseMatrix {
        &self.spins[self.idx(i, j)]
    }

    pub fn gamma_apply(&self, i: i64, j: i64, v: &[C64]) -> Result<Vec<C64>> {
        self.check_indices(i, j)?;
        self.check_len(v)?;
        Ok(self.gamma(i, j).matvec(v))
    }

    pub fn spin_apply(&self, i: i64, j: i64, v: &[C64]) -> Result<Vec<C64>> {
        self.check_indices(i, j)?;
        self.check_len(v)?;
        Ok(self.spin(i, j).matvec(v))
    }

    fn check_len(&self, v: &[C64]) -> Result<()> {
        if v.len() != self.dim() {
            return Err(Error::Dimension(format!(
                "spin vector has length {}, module has dimension {}",
                v.len(),
                self.dim()
            )));
        }
        Ok(())
    }

    fn build_spin(&self, i: i64, j: i64) -> SparseMatrix {
        let t = self.table.trunc;
        let dim = self.dim();
        if i != j {
            let mut acc = SparseMatrix::zeros(dim, dim);
            for l in t.labels() {
                acc = acc.add_scaled(re(0.5), &self.gamma(i, l).matmul(self.gamma(l, j)));
            }
            acc
        } else {
            let d: Vec<C64> = (0..dim).map(|s| re(spin_diagonal(&self.table, i, s) as f64)).collect();
            SparseMatrix::from_diagonal(&d)
        }
    }

    /// `s_ii` eigenvalue on a basis state.
    pub fn weight_of(&self, i: i64, state: usize) -> i64 {
        spin_diagonal(&self.table, i, state)
    }

    /// `(s_ii)_{i}` weight vector of a basis state, window order.
    pub fn weight_vector(&self, state: usize) -> Vec<i64> {
        self.table.trunc.labels().map(|i| self.weight_of(i, state)).collect()
    }

    /// `(-1)^(off-diagonal occupation)`
    pub fn off_parity(&self) -> SparseMatrix {
        let mask = self.table.off_mask();
        let d: Vec<C64> =
            (0..self.dim()).map(|s| re(if (s & mask).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 })).collect();
        SparseMatrix::from_diagonal(&d)
    }
}

/// `s_ii = sum_{l<i} n_(i,l) - sum_{l>i} n_(l,i)`
fn spin_diagonal(table: &ModeTable, i: i64, state: usize) -> i64 {
    let mut w = 0i64;
    for l in table.trunc.labels() {
        if l < i && occupied(state, table.off_mode(i, l)) {
            w += 1;
        } else if l > i && occupied(state, table.off_mode(l, i)) {
            w -= 1;
        }
    }
    w
}

/// Image `(coefficient, state')` of a basis state under `gamma_ij`, or `None` when zero.
pub fn gamma_action(table: &ModeTable, i: i64, j: i64, state: usize) -> Option<(C64, usize)> {
    let sqrt2 = std::f64::consts::SQRT_2;
    if i > j {
        let m = table.off_mode(i, j);
        if occupied(state, m) {
            return None;
        }
        return Some((re(sqrt2 * jw_sign(state, m)), state | 1 << m));
    }
    if i < j {
        let m = table.off_mode(j, i);
        if !occupied(state, m) {
            return None;
        }
        return Some((re(sqrt2 * jw_sign(state, m)), state & !(1 << m)));
    }
    if i == 0 {
        let n = table.trunc.n();
        let mut sign = if (n * n).is_multiple_of(2) { 1.0 } else { -1.0 };
        for k in 1..=n {
            if !occupied(state, table.paired_mode(k)) {
                sign = -sign;
            }
        }
        if (state & table.off_mask()).count_ones() % 2 == 1 {
            sign = -sign;
        }
        return Some((re(sign), state));
    }
    let k = i.unsigned_abs() as usize;
    let m = table.paired_mode(k);
    let s = jw_sign(state, m);
    let flipped = state ^ (1 << m);
    let occ = occupied(state, m);
    if i > 0 {
        // d + d^dagger
        Some((re(s), flipped))
    } else {
        // i (d - d^dagger)
        Some((I * re(if occ { s } else { -s }), flipped))
    }
}

/// States with no off-diagonal occupation; `2^N` of them.
pub fn vacuum_sector_basis(trunc: Truncation) -> Vec<usize> {
    let table = ModeTable::new(trunc);
    let base = table.off_count();
    (0..1usize << trunc.n()).map(|b| b << base).collect()
}

/// Central term of `[s_ij, s_ji]`: the scalar `c` with `[s_ij, s_ji] - s_ii + s_jj = c Id`,
/// and the distance of the left side from `c Id`.
pub fn central_term(module: &SpinModule, i: i64, j: i64) -> Result<(C64, f64)> {
    module.check_indices(i, j)?;
    let dim = module.dim();
    let mut d = module.spin(i, j).commutator(module.spin(j, i));
    if i != j {
        d = d.sub(module.spin(i, i)).add(module.spin(j, j));
    }
    let c = d.get(0, 0);
    Ok((c, d.add_scaled(-c, &SparseMatrix::identity(dim)).max_abs()))
}

/// Central terms `j - i` on the window of `small`, evaluated in both modules.
pub fn check_central_terms(small: &SpinModule, large: &SpinModule) -> Result<VerifyReport> {
    let t = small.trunc();
    let mut formula = 0.0f64;
    let mut scalar = 0.0f64;
    let mut across = 0.0f64;
    for i in t.labels() {
        for j in t.labels() {
            let (a, ra) = central_term(small, i, j)?;
            let (b, rb) = central_term(large, i, j)?;
            let expected = re((j - i) as f64);
            formula = formula.max((a - expected).norm()).max((b - expected).norm());
            scalar = scalar.max(ra).max(rb);
            across = across.max((a - b).norm());
        }
    }
    let mut report = VerifyReport::new();
    report.record("spin_central_term_formula", formula, SPIN_TOL);
    report.record("spin_central_term_scalar", scalar, SPIN_TOL);
    report.record("spin_central_term_n_independent", across, SPIN_TOL);
    Ok(report)
}

pub const CLIFFORD_DENSE_TOL: f64 = 1e-12;
pub const CLIFFORD_PROBE_TOL: f64 = 1e-10;
pub const CLIFFORD_PROBES: usize = 20;

/// Clifford relations and `gamma_ij^* = gamma_ji`; full grid at `N = 1`, probes above.
pub fn check_clifford<R: Rng + ?Sized>(module: &SpinModule, rng: &mut R) -> VerifyReport {
    let t = module.trunc();
    let dim = module.dim();
    let mut report = VerifyReport::new();
    let mut worst = 0.0f64;
    let mut adj = 0.0f64;
    let id = SparseMatrix::identity(dim);
    let dense = t.n() == 1;
    let probes: Vec<Vec<C64>> =
        if dense { Vec::new() } else { (0..CLIFFORD_PROBES).map(|_| random_vector(dim, rng)).collect() };
    for i in t.labels() {
        for j in t.labels() {
            let g = module.gamma(i, j);
            adj = adj.max(g.adjoint().max_abs_diff(module.gamma(j, i)));
            for k in t.labels() {
                for l in t.labels() {
                    let h = module.gamma(k, l);
                    let delta = if i == l && j == k { 2.0 } else { 0.0 };
                    if dense {
                        let dev = g.anticommutator(h).add_scaled(re(-delta), &id).max_abs();
                        worst = worst.max(dev);
                    } else {
                        for v in &probes {
                            let mut lhs = g.matvec(&h.matvec(v));
                            h.matvec_add(re(1.0), &g.matvec(v), &mut lhs);
                            let rhs: Vec<C64> = v.iter().map(|z| z * delta).collect();
                            worst = worst.max(diff_norm(&lhs, &rhs) / crate::linalg::scalar::norm(v));
                        }
                    }
                }
            }
        }
    }
    let tol = if dense { CLIFFORD_DENSE_TOL } else { CLIFFORD_PROBE_TOL };
    report.record("clifford_anticommutator", worst, tol);
    report.record("gamma_adjoint", adj, CLIFFORD_DENSE_TOL);
    report
}

pub const SPIN_TOL: f64 = 1e-10;

/// Spin-operator identities: level-one commutators, `[s, gamma]`, the cubic-term relation,
/// adjointness, vacuum annihilation and the zero vacuum weight.
pub fn check_spin(module: &SpinModule) -> VerifyReport {
    let t = module.trunc();
    let dim = module.dim();
    let id = SparseMatrix::identity(dim);
    let mut report = VerifyReport::new();

    let mut comm = 0.0f64;
    let mut sg = 0.0f64;
    let mut adj = 0.0f64;
    for i in t.labels() {
        for j in t.labels() {
            let s = module.spin(i, j);
            adj = adj.max(s.adjoint().max_abs_diff(module.spin(j, i)));
            for l in t.labels() {
                for m in t.labels() {
                    let mut rhs = SparseMatrix::zeros(dim, dim);
                    if j == l {
                        rhs = rhs.add(module.spin(i, m));
                    }
                    if i == m {
                        rhs = rhs.sub(module.spin(l, j));
                    }
                    if j == l && i == m {
                        rhs = rhs.add_scaled(re((l - i) as f64), &id);
                    }
                    comm = comm.max(s.commutator(module.spin(l, m)).max_abs_diff(&rhs));

                    let mut rg = SparseMatrix::zeros(dim, dim);
                    if j == l {
                        rg = rg.add(module.gamma(i, m));
                    }
                    if i == m {
                        rg = rg.sub(module.gamma(l, j));
                    }
                    sg = sg.max(s.commutator(module.gamma(l, m)).max_abs_diff(&rg));
                }
            }
        }
    }
    report.record("spin_commutator_level_one", comm, SPIN_TOL);
    report.record("spin_gamma_commutator", sg, SPIN_TOL);
    report.record("spin_adjoint", adj, SPIN_TOL);

    let mut cubic = SparseMatrix::zeros(dim, dim);
    for l in t.labels() {
        for m in t.labels() {
            cubic = cubic.add(&module.spin(l, m).matmul(module.gamma(m, l)));
        }
    }
    let mut cub = 0.0f64;
    for i in t.labels() {
        for j in t.labels() {
            let lhs = module.spin(i, j).commutator(&cubic);
            let rhs = module.gamma(i, j).scale(re((j - i) as f64));
            cub = cub.max(lhs.max_abs_diff(&rhs));
        }
    }
    report.record("spin_cubic_relation", cub, SPIN_TOL);

    let vac = vacuum_sector_basis(t);
    let mut ann = 0.0f64;
    for &v in &vac {
        let mut e = vec![C64::new(0.0, 0.0); dim];
        e[v] = re(1.0);
        for i in t.labels() {
            for j in t.labels() {
                if i < j {
                    ann = ann.max(crate::linalg::scalar::norm(&module.gamma(i, j).matvec(&e)));
                }
                if i <= j {
                    ann = ann.max(crate::linalg::scalar::norm(&module.spin(i, j).matvec(&e)));
                }
            }
        }
    }
    report.record("vacuum_annihilation", ann, SPIN_TOL);

    let parity = module.off_parity();
    let mut par = 0.0f64;
    for i in t.labels() {
        for j in t.labels() {
            let g = module.gamma(i, j);
            let dev = if i == j { parity.commutator(g).max_abs() } else { parity.anticommutator(g).max_abs() };
            par = par.max(dev);
        }
    }
    report.record("off_parity_grading", par, SPIN_TOL);
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn module(n: usize) -> SpinModule {
        SpinModule::new(Truncation::new(n).unwrap()).unwrap()
    }

    #[test]
    fn mode_counts() {
        for n in 1..=4usize {
            let t = ModeTable::new(Truncation::new(n).unwrap());
            assert_eq!(t.mode_count(), n * (2 * n + 1) + n);
        }
        let t = ModeTable::new(Truncation::new(1).unwrap());
        assert_eq!(t.off_modes(), &[(0, -1), (1, -1), (1, 0)]);
        assert_eq!(t.fock_dim(), 16);
    }

    #[test]
    fn anticommutator_of_12_21_is_two() {
        let m = module(1);
        let ac = m.gamma(1, 0).anticommutator(m.gamma(0, 1));
        assert!(ac.max_abs_diff(&SparseMatrix::identity(16).scale(re(2.0))) < 1e-14);
        let ac = m.gamma(1, 1).anticommutator(m.gamma(1, 0));
        assert_eq!(ac.nnz(), 0);
    }

    #[test]
    fn central_terms_agree_across_cutoffs() {
        let rep = check_central_terms(&module(1), &module(2)).unwrap();
        assert!(rep.passed(), "{rep:?}");
        let (c, r) = central_term(&module(2), -2, 1).unwrap();
        assert!((c - re(3.0)).norm() < 1e-12 && r < 1e-12);
        assert!(central_term(&module(1), 2, 0).is_err());
    }

    #[test]
    fn clifford_grid_dense_and_probe() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let r1 = check_clifford(&module(1), &mut rng);
        assert!(r1.passed(), "{r1:?}");
        let r2 = check_clifford(&module(2), &mut rng);
        assert!(r2.passed(), "{r2:?}");
    }

    #[test]
    fn gamma00_matches_literal_product() {
        for n in 1..=2usize {
            let m = module(n);
            let dim = m.dim();
            let mut prod = SparseMatrix::identity(dim);
            for k in 1..=n as i64 {
                prod = prod.matmul(m.gamma(k, k)).matmul(m.gamma(-k, -k));
            }
            prod = prod.matmul(&m.off_parity());
            let e = n * (2 * n - 1);
            let phase = [re(1.0), I, re(-1.0), -I][e % 4];
            let literal = prod.scale(phase);
            assert!(literal.max_abs_diff(m.gamma(0, 0)) < 1e-14);
            let g = m.gamma(0, 0);
            assert!(g.matmul(g).max_abs_diff(&SparseMatrix::identity(dim)) < 1e-14);
            assert!(g.adjoint().max_abs_diff(g) < 1e-14);
        }
    }

    #[test]
    fn spin_identities_n1_n2() {
        let r = check_spin(&module(1));
        assert!(r.passed(), "{r:?}");
        let r = check_spin(&module(2));
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn spin_12_21_central_term() {
        let m = module(2);
        let lhs = m.spin(1, 2).commutator(m.spin(2, 1));
        let rhs = m.spin(1, 1).sub(m.spin(2, 2)).add(&SparseMatrix::identity(m.dim()));
        assert!(lhs.max_abs_diff(&rhs) < 1e-12);
    }

    #[test]
    fn diagonal_spin_matches_gamma_formula() {
        let m = module(1);
        let t = m.trunc();
        for i in t.labels() {
            let mut acc = SparseMatrix::zeros(m.dim(), m.dim());
            for l in t.labels() {
                if l < i {
                    acc = acc.add_scaled(re(0.5), &m.gamma(i, l).matmul(m.gamma(l, i)));
                } else if l > i {
                    acc = acc.add_scaled(re(-0.5), &m.gamma(l, i).matmul(m.gamma(i, l)));
                }
            }
            assert!(acc.max_abs_diff(m.spin(i, i)) < 1e-14);
        }
    }

    #[test]
    fn vacuum_sector() {
        for n in 1..=2usize {
            let t = Truncation::new(n).unwrap();
            let vac = vacuum_sector_basis(t);
            assert_eq!(vac.len(), 1 << n);
            let m = module(n);
            for &s in &vac {
                assert!(m.weight_vector(s).iter().all(|&w| w == 0));
            }
        }
    }

    #[test]
    fn out_of_window_rejected() {
        let m = module(1);
        let v = vec![C64::new(0.0, 0.0); 16];
        assert!(m.gamma_apply(2, 0, &v).is_err());
        assert!(m.spin_apply(0, -2, &v).is_err());
        assert!(SpinModule::new(Truncation::new(3).unwrap()).is_err());
    }
}
