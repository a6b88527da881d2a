use serde::{Deserialize, Serialize};

use crate::liealg::Truncation;
use crate::{Error, Result};

/// Integral highest weight `lambda` (window order) at level `k >= 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Weight {
    pub trunc: Truncation,
    pub lambda: Vec<i64>,
    pub level: i64,
}

impl Weight {
    pub fn new(trunc: Truncation, lambda: Vec<i64>, level: i64) -> Result<Self> {
        if lambda.len() != trunc.dim() {
            return Err(Error::Dimension(format!("weight has {} entries, window needs {}", lambda.len(), trunc.dim())));
        }
        if level < 0 {
            return Err(Error::Weight(format!("negative level {level}")));
        }
        Ok(Self { trunc, lambda, level })
    }

    pub fn zero(trunc: Truncation, level: i64) -> Result<Self> {
        Self::new(trunc, vec![0; trunc.dim()], level)
    }

    pub fn lambda_at(&self, i: i64) -> i64 {
        self.lambda[self.trunc.pos(i)]
    }

    /// `m_i = lambda_i - k i`, the shifted gl(2N+1) highest weight.
    pub fn shifted(&self) -> Vec<i64> {
        self.trunc.labels().zip(&self.lambda).map(|(i, &l)| l - self.level * i).collect()
    }
}

/// One failing pair `i < j` with its value `lambda_i - lambda_j - k(i - j)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub i: i64,
    pub j: i64,
    pub value: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dominance {
    pub accepted: bool,
    pub first_violation: Option<(i64, i64)>,
    pub violations: Vec<Violation>,
}

/// Checks `lambda_i - lambda_j - k(i - j) >= 0` for `i <= j`.
///
/// Pairs are scanned by gap `j - i` ascending, then `i` ascending; `first_violation` is the
/// first failing pair in that order.
pub fn check_dominance(w: &Weight) -> Dominance {
    let n = w.trunc.n() as i64;
    let mut violations = Vec::new();
    for gap in 1..=2 * n {
        for i in -n..=n - gap {
            let j = i + gap;
            let value = w.lambda_at(i) - w.lambda_at(j) - w.level * (i - j);
            if value < 0 {
                violations.push(Violation { i, j, value });
            }
        }
    }
    Dominance { accepted: violations.is_empty(), first_violation: violations.first().map(|v| (v.i, v.j)), violations }
}

fn gcd(a: u128, b: u128) -> u128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// `prod_{i<j} (m_i - m_j + j - i) / (j - i)` in exact integer arithmetic.
pub fn weyl_dimension(m: &[i64]) -> Result<u128> {
    let n = m.len();
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 0..n {
        for j in i + 1..n {
            if m[i] < m[j] {
                return Err(Error::Weight(format!("shifted weight not weakly decreasing at positions {i}, {j}")));
            }
            let a = (m[i] - m[j]) as u128 + (j - i) as u128;
            let b = (j - i) as u128;
            num = num.checked_mul(a).ok_or_else(|| Error::Resource("Weyl dimension overflow".into()))?;
            den *= b;
            let g = gcd(num, den);
            num /= g;
            den /= g;
        }
    }
    debug_assert_eq!(den, 1);
    Ok(num / den)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(n: usize) -> Truncation {
        Truncation::new(n).unwrap()
    }

    #[test]
    fn dominance_examples() {
        assert!(check_dominance(&Weight::zero(t(2), 1).unwrap()).accepted);
        assert!(check_dominance(&Weight::zero(t(2), 0).unwrap()).accepted);
        let w = Weight::new(t(1), vec![0, 0, 1], 0).unwrap();
        let d = check_dominance(&w);
        assert!(!d.accepted);
        assert_eq!(d.first_violation, Some((0, 1)));
        assert_eq!(d.violations.len(), 2);
    }

    #[test]
    fn negative_level_rejected() {
        assert!(matches!(Weight::zero(t(1), -1), Err(Error::Weight(_))));
    }

    #[test]
    fn weyl_examples() {
        assert_eq!(weyl_dimension(&[1, 0, -1]).unwrap(), 8);
        assert_eq!(weyl_dimension(&[0, 0, 0]).unwrap(), 1);
        assert_eq!(weyl_dimension(&[2, 1, 0, -1, -2]).unwrap(), 1024);
        assert!(weyl_dimension(&[0, 1]).is_err());
    }

    #[test]
    fn shifted_weight() {
        let w = Weight::new(t(1), vec![0, 0, -1], 1).unwrap();
        assert_eq!(w.shifted(), vec![1, 0, -2]);
    }
}
