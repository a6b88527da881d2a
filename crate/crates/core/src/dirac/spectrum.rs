use std::collections::BTreeMap;

use serde::Serialize;

use super::gauge::GaugeField;
use super::operator::WeilOperator;
use super::WeilSpace;
use crate::linalg::{
    hermitian_eigvals, lanczos_extremal, Extremal, LanczosOptions, Squared, DEFAULT_MATERIALIZATION_THRESHOLD,
};
use crate::{Error, Result};

/// One eigenvalue of `D_A²` for diagonal `A`, carried by the product vectors of `t_ii`-weight `weight`.
#[derive(Clone, Debug, Serialize)]
pub struct PredictedLevel {
    pub value: f64,
    pub weight: Vec<i64>,
    /// `weight - λ`, the total lowering shift.
    pub shift: Vec<i64>,
    pub multiplicity: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct PredictedSpectrum {
    /// Ascending by value.
    pub levels: Vec<PredictedLevel>,
    pub vacuum_value: f64,
}

impl PredictedSpectrum {
    /// All values with multiplicity, ascending.
    pub fn values(&self) -> Vec<f64> {
        let mut v = Vec::new();
        for l in &self.levels {
            v.extend(std::iter::repeat_n(l.value, l.multiplicity));
        }
        v
    }

    pub fn total_multiplicity(&self) -> usize {
        self.levels.iter().map(|l| l.multiplicity).sum()
    }

    /// Levels with value at most `max`.
    pub fn window(&self, max: f64) -> Vec<&PredictedLevel> {
        self.levels.iter().filter(|l| l.value <= max).collect()
    }
}

fn weight_counts(weights: impl Iterator<Item = Vec<i64>>) -> BTreeMap<Vec<i64>, usize> {
    let mut m = BTreeMap::new();
    for w in weights {
        *m.entry(w).or_insert(0) += 1;
    }
    m
}

/// `D_A²` eigenvalues for `A = diag(μ)`:
/// `Σ(λ_i + (k+1)μ_i)² + 2(k+1) Σ_l (l + μ_l)(ν_l - λ_l)` on each `t_ii`-weight `ν`.
///
/// Each lowering step `(i_s, j_s)`, `i_s > j_s`, shifts `ν` by `e_{i_s} - e_{j_s}`, so the sum over
/// steps is a function of `ν` alone and multiplicities are the weight multiplicities of `V_λ ⊗ S`.
pub fn predicted_spectrum(space: &WeilSpace, mu: &[f64]) -> Result<PredictedSpectrum> {
    let t = space.trunc();
    if mu.len() != t.dim() {
        return Err(Error::Dimension(format!("mu has {} entries, window has {}", mu.len(), t.dim())));
    }
    let k1 = (space.level() + 1) as f64;
    let lambda = space.lambda();
    let vacuum_value: f64 = lambda.iter().zip(mu).map(|(&l, m)| (l as f64 + k1 * m).powi(2)).sum();
    let module = weight_counts((0..space.dim_module()).map(|a| space.module().weight_of(a)));
    let fock = weight_counts((0..space.dim_fock()).map(|f| space.spin().weight_vector(f)));
    let mut total: BTreeMap<Vec<i64>, usize> = BTreeMap::new();
    for (wm, cm) in &module {
        for (wf, cf) in &fock {
            let w: Vec<i64> = wm.iter().zip(wf).map(|(a, b)| a + b).collect();
            *total.entry(w).or_insert(0) += cm * cf;
        }
    }
    let mut levels: Vec<PredictedLevel> = total
        .into_iter()
        .map(|(weight, multiplicity)| {
            let shift: Vec<i64> = weight.iter().zip(lambda).map(|(n, l)| n - l).collect();
            let value = vacuum_value
                + 2.0 * k1 * t.labels().zip(&shift).map(|(l, &s)| (l as f64 + mu[t.pos(l)]) * s as f64).sum::<f64>();
            PredictedLevel { value, weight, shift, multiplicity }
        })
        .collect();
    levels.sort_by(|a, b| a.value.total_cmp(&b.value).then_with(|| a.weight.cmp(&b.weight)));
    Ok(PredictedSpectrum { levels, vacuum_value })
}

/// Largest pairwise deviation of two sorted multisets.
pub fn compare_multisets(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::Dimension(format!("multisets have sizes {} and {}", a.len(), b.len())));
    }
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort_by(f64::total_cmp);
    y.sort_by(f64::total_cmp);
    Ok(x.iter().zip(&y).fold(0.0f64, |m, (p, q)| m.max((p - q).abs())))
}

#[derive(Clone, Debug)]
pub struct SpectrumOptions {
    pub dense_threshold: usize,
    /// Number of lowest `D_A²` eigenvalues on the matrix-free path.
    pub window: usize,
    pub lanczos: LanczosOptions<f64>,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        Self { dense_threshold: DEFAULT_MATERIALIZATION_THRESHOLD, window: 8, lanczos: LanczosOptions::default() }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumReport {
    pub method: String,
    pub dim: usize,
    /// Signed eigenvalues of `D_A`, ascending; dense path only.
    pub eigenvalues: Option<Vec<f64>>,
    /// Eigenvalues of `D_A²`, ascending (all on the dense path, the lowest window otherwise).
    pub squared: Vec<f64>,
    pub min_abs: f64,
    pub gauge_mu: Option<Vec<f64>>,
    pub dense_threshold: usize,
    pub lanczos_tol: Option<f64>,
}

pub fn spectrum(op: &WeilOperator, gauge: Option<&GaugeField>, opts: &SpectrumOptions) -> Result<SpectrumReport> {
    if !op.is_self_adjoint() {
        return Err(Error::Precondition("spectrum needs a self-adjoint operator".into()));
    }
    let dim = crate::linalg::LinearMap::dim(op);
    let gauge_mu = gauge.and_then(|g| g.mu.clone());
    if dim <= opts.dense_threshold {
        let vals = hermitian_eigvals(&op.to_dense().hermitian_part())?;
        let mut squared: Vec<f64> = vals.iter().map(|x| x * x).collect();
        squared.sort_by(f64::total_cmp);
        let min_abs = vals.iter().fold(f64::INFINITY, |m, x| m.min(x.abs()));
        return Ok(SpectrumReport {
            method: "dense".into(),
            dim,
            eigenvalues: Some(vals),
            squared,
            min_abs,
            gauge_mu,
            dense_threshold: opts.dense_threshold,
            lanczos_tol: None,
        });
    }
    let pairs = lanczos_extremal(&Squared::new(op), opts.window.min(dim), Extremal::Lowest, &opts.lanczos)?;
    let squared: Vec<f64> = pairs.iter().map(|p| p.value).collect();
    let min_abs = squared.first().map_or(f64::INFINITY, |x| x.max(0.0).sqrt());
    Ok(SpectrumReport {
        method: "lanczos".into(),
        dim,
        eigenvalues: None,
        squared,
        min_abs,
        gauge_mu,
        dense_threshold: opts.dense_threshold,
        lanczos_tol: Some(opts.lanczos.tol),
    })
}

/// `hermitian_eig` of the dense square, independent of the eigenvalues of `D_A` itself.
pub fn square_spectrum_dense(op: &WeilOperator) -> Result<Vec<f64>> {
    let s = op.to_sparse();
    let sq = s.matmul(&s).to_dense().hermitian_part();
    let mut v = hermitian_eigvals(&sq)?;
    v.sort_by(f64::total_cmp);
    Ok(v)
}
