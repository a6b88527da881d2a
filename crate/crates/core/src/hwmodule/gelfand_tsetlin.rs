//! Orthonormal Gelfand–Tsetlin realization of gl(n) irreducibles.
//!
//! A pattern is stored row by row from the top row (length `n`) down to the bottom row
//! (length 1). Row `r` (1-based length) starts at offset `sum_{s>r} s`.

use std::collections::HashMap;

use crate::{re, Error, Result, SparseMatrix, C64};

#[derive(Clone, Debug)]
pub struct GtBasis {
    n: usize,
    patterns: Vec<Vec<i64>>,
    lookup: HashMap<Vec<i64>, usize>,
}

fn row_offset(n: usize, r: usize) -> usize {
    // rows n, n-1, ..., r+1 precede row r
    (r + 1..=n).sum()
}

impl GtBasis {
    /// All patterns with top row `top`; the top-aligned pattern comes first.
    pub fn new(top: &[i64]) -> Self {
        let n = top.len();
        let mut patterns = Vec::new();
        let mut cur = top.to_vec();
        enumerate(top, &mut cur, &mut patterns);
        let lookup = patterns.iter().enumerate().map(|(a, p)| (p.clone(), a)).collect();
        Self { n, patterns, lookup }
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    pub fn pattern(&self, a: usize) -> &[i64] {
        &self.patterns[a]
    }

    /// Row `r` (length `r`) of pattern `a`.
    pub fn row(&self, a: usize, r: usize) -> &[i64] {
        let o = row_offset(self.n, r);
        &self.patterns[a][o..o + r]
    }

    fn row_sum(&self, a: usize, r: usize) -> i64 {
        if r == 0 {
            0
        } else {
            self.row(a, r).iter().sum()
        }
    }

    /// Diagonal generator `E_rr` (1-based): row-sum difference.
    pub fn cartan(&self, r: usize) -> SparseMatrix {
        let d: Vec<C64> = (0..self.len()).map(|a| re((self.row_sum(a, r) - self.row_sum(a, r - 1)) as f64)).collect();
        SparseMatrix::from_diagonal(&d)
    }

    /// Raising generator `E_{r,r+1}` (1-based).
    pub fn raising(&self, r: usize) -> Result<SparseMatrix> {
        let dim = self.len();
        let mut t = Vec::new();
        let off = row_offset(self.n, r);
        for a in 0..dim {
            let l = |row: usize, i: usize| self.row(a, row)[i - 1] - i as i64 + 1;
            for i in 1..=r {
                let lki = l(r, i);
                let mut num: f64 = -(1..=r + 1).map(|j| (lki - l(r + 1, j)) as f64).product::<f64>();
                if r > 1 {
                    num *= (1..r).map(|j| (lki - l(r - 1, j) + 1) as f64).product::<f64>();
                }
                let den: f64 =
                    (1..=r).filter(|&j| j != i).map(|j| ((lki - l(r, j)) * (lki - l(r, j) + 1)) as f64).product();
                let mut q = self.patterns[a].clone();
                q[off + i - 1] += 1;
                if let Some(&b) = self.lookup.get(&q) {
                    let v = num / den;
                    if !(v.is_finite() && v >= -1e-12) {
                        return Err(Error::Numerical(format!("Gelfand-Tsetlin coefficient {v} at row {r}, entry {i}")));
                    }
                    if v > 0.0 {
                        t.push((b, a, re(v.sqrt())));
                    }
                }
            }
        }
        Ok(SparseMatrix::from_triplets(dim, dim, t))
    }

    /// All `E_pq` (0-based positions) as a row-major `n x n` table.
    pub fn generators(&self) -> Result<Vec<SparseMatrix>> {
        let n = self.n;
        let mut e: Vec<Option<SparseMatrix>> = vec![None; n * n];
        for r in 1..=n {
            e[(r - 1) * n + (r - 1)] = Some(self.cartan(r));
        }
        for r in 1..n {
            let up = self.raising(r)?;
            e[r * n + (r - 1)] = Some(up.adjoint());
            e[(r - 1) * n + r] = Some(up);
        }
        for gap in 2..n {
            for p in 0..n - gap {
                let q = p + gap;
                let get = |a: usize, b: usize| e[a * n + b].as_ref().expect("built at smaller gap");
                let upper = get(p, p + 1).commutator(get(p + 1, q));
                let lower = get(q, q - 1).commutator(get(q - 1, p));
                e[p * n + q] = Some(upper);
                e[q * n + p] = Some(lower);
            }
        }
        Ok(e.into_iter().map(|m| m.expect("all generators built")).collect())
    }
}

fn enumerate(top: &[i64], cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
    let len = top.len();
    if len == 1 {
        out.push(cur.clone());
        return;
    }
    let mut row = vec![0i64; len - 1];
    fill(top, 0, &mut row, cur, out);
}

fn fill(above: &[i64], i: usize, row: &mut Vec<i64>, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
    if i == row.len() {
        let base = cur.len();
        cur.extend_from_slice(row);
        let next = row.clone();
        enumerate(&next, cur, out);
        cur.truncate(base);
        return;
    }
    let mut v = above[i];
    while v >= above[i + 1] {
        row[i] = v;
        fill(above, i + 1, row, cur, out);
        v -= 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pattern_counts_match_weyl() {
        assert_eq!(GtBasis::new(&[1, 0, -1]).len(), 8);
        assert_eq!(GtBasis::new(&[2, 1, 0, -1, -2]).len(), 1024);
        assert_eq!(GtBasis::new(&[1, 0, 0]).len(), 3);
    }

    #[test]
    fn first_pattern_is_top_aligned() {
        let b = GtBasis::new(&[3, 1, 0]);
        assert_eq!(b.pattern(0), &[3, 1, 0, 3, 1, 3]);
        assert_eq!(b.row(0, 2), &[3, 1]);
    }

    #[test]
    fn gl3_relations() {
        let b = GtBasis::new(&[2, 0, -1]);
        let e = b.generators().unwrap();
        let n = 3;
        for p in 0..n {
            for q in 0..n {
                for r in 0..n {
                    for s in 0..n {
                        let lhs = e[p * n + q].commutator(&e[r * n + s]);
                        let mut rhs = SparseMatrix::zeros(b.len(), b.len());
                        if q == r {
                            rhs = rhs.add(&e[p * n + s]);
                        }
                        if p == s {
                            rhs = rhs.sub(&e[r * n + q]);
                        }
                        assert!(lhs.max_abs_diff(&rhs) < 1e-10);
                    }
                }
            }
        }
    }
}
