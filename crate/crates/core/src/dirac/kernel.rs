use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::build::{couple, gamma_operator, t_operator};
use super::gauge::{gauge_diagonalize, GaugeDiagonalization, GaugeField};
use super::operator::WeilOperator;
use super::WeilSpace;
use crate::linalg::random::random_vector;
use crate::linalg::scalar::{axpy, dot, norm};
use crate::linalg::{hermitian_eig, hermitian_eigvals, LinearMap, DEFAULT_MATERIALIZATION_THRESHOLD};
use crate::{re, ComplexMatrix, Error, Result, C64};

#[derive(Clone, Debug)]
pub struct KernelOptions {
    pub dense_threshold: usize,
    /// `τ = tau_rel · (1 + spectral scale)`
    pub tau_rel: f64,
    /// Two `t_ii` expectation vectors closer than this belong to one block.
    pub weight_tol: f64,
    /// A sector is scalar for `D_A²` when `||D_A² v - ρ v|| <= scalar_tol (1 + ρ) ||v||`.
    pub scalar_tol: f64,
    /// Largest non-scalar sector handled by dense diagonalization.
    pub sector_dense_limit: usize,
    pub seed: u64,
}

impl Default for KernelOptions {
    fn default() -> Self {
        Self {
            dense_threshold: DEFAULT_MATERIALIZATION_THRESHOLD,
            tau_rel: 1e-8,
            weight_tol: 1e-6,
            scalar_tol: 1e-9,
            sector_dense_limit: 2048,
            seed: 0x6b65726e,
        }
    }
}

/// Common `t_ii`-eigenspace inside the kernel.
#[derive(Clone, Debug, Serialize)]
pub struct WeightBlock {
    pub weight: Vec<f64>,
    pub dim: usize,
    /// `max ||(1 - P) γ_ii v||` over block vectors `v` and window `i`.
    pub closure_defect: f64,
    /// Dimension of the commutant of the `γ_ii` restricted to the block.
    pub commutant_dim: usize,
    pub summands: usize,
    pub irreducible: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct KernelReport {
    pub method: String,
    pub dim: usize,
    pub threshold: f64,
    pub spectral_scale: f64,
    /// Smallest `|eigenvalue|` above the threshold.
    pub gap: f64,
    #[serde(skip)]
    pub basis: Vec<Vec<C64>>,
    pub blocks: Vec<WeightBlock>,
    pub summands: usize,
    /// Block weights closer than the grouping tolerance allows, or block dimensions off the `2^N` grid.
    pub ambiguous: bool,
    /// `min_v ||P_vac v||²` with `P_vac` onto `v_hw ⊗ S_0`.
    pub vacuum_overlap: Option<f64>,
    /// Present when `A` was not diagonal; the basis is then the kernel of `D_{A^g}`.
    pub gauge: Option<GaugeDiagonalization>,
    pub sectors: usize,
    pub non_scalar_sectors: usize,
}

pub const CLOSURE_TOL: f64 = 1e-8;
pub const COMMUTANT_TOL: f64 = 1e-8;

pub fn kernel(space: &WeilSpace, dirac: &WeilOperator, a: &GaugeField, opts: &KernelOptions) -> Result<KernelReport> {
    let (field, gauge) = if a.is_diagonal() {
        (a.clone(), None)
    } else {
        let gd = gauge_diagonalize(a)?;
        (GaugeField::diagonal(a.trunc, &gd.mu)?, Some(gd))
    };
    let op = couple(space, dirac, &field)?;
    let raw =
        if space.dim() <= opts.dense_threshold { dense_kernel(&op, opts)? } else { sector_kernel(space, &op, opts)? };
    let (blocks, ambiguous, basis) = decompose(space, raw.basis, opts)?;
    let summands = blocks.iter().map(|b| b.summands).sum();
    let ambiguous = ambiguous || blocks.iter().any(|b| b.dim % (1usize << space.trunc().n()) != 0);
    let vacuum_overlap = if basis.is_empty() {
        None
    } else {
        let vac = space.vacuum_sector();
        Some(basis.iter().map(|v| vac.iter().map(|&i| v[i].norm_sqr()).sum::<f64>()).fold(f64::INFINITY, f64::min))
    };
    Ok(KernelReport {
        method: raw.method,
        dim: basis.len(),
        threshold: raw.threshold,
        spectral_scale: raw.scale,
        gap: raw.gap,
        basis,
        blocks,
        summands,
        ambiguous,
        vacuum_overlap,
        gauge,
        sectors: raw.sectors,
        non_scalar_sectors: raw.non_scalar,
    })
}

struct RawKernel {
    method: String,
    basis: Vec<Vec<C64>>,
    threshold: f64,
    scale: f64,
    gap: f64,
    sectors: usize,
    non_scalar: usize,
}

fn dense_kernel(op: &WeilOperator, opts: &KernelOptions) -> Result<RawKernel> {
    let e = hermitian_eig(&op.to_dense().hermitian_part())?;
    let scale = e.values.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let tau = opts.tau_rel * (1.0 + scale);
    let mut basis = Vec::new();
    let mut gap = f64::INFINITY;
    for (j, x) in e.values.iter().enumerate() {
        if x.abs() < tau {
            basis.push(e.vector(j));
        } else {
            gap = gap.min(x.abs());
        }
    }
    Ok(RawKernel { method: "dense".into(), basis, threshold: tau, scale, gap, sectors: 1, non_scalar: 0 })
}

/// Sector id of every product basis vector; `D_A` with diagonal `A` commutes with every `t_ii`.
fn sectors(space: &WeilSpace) -> (Vec<u32>, usize) {
    let mut module_ids: HashMap<Vec<i64>, usize> = HashMap::new();
    let m_of: Vec<usize> = (0..space.dim_module())
        .map(|a| {
            let n = module_ids.len();
            *module_ids.entry(space.module().weight_of(a)).or_insert(n)
        })
        .collect();
    let mut fock_ids: HashMap<Vec<i64>, usize> = HashMap::new();
    let f_of: Vec<usize> = (0..space.dim_fock())
        .map(|f| {
            let n = fock_ids.len();
            *fock_ids.entry(space.spin().weight_vector(f)).or_insert(n)
        })
        .collect();
    let mut mw = vec![Vec::new(); module_ids.len()];
    for (w, i) in module_ids {
        mw[i] = w;
    }
    let mut fw = vec![Vec::new(); fock_ids.len()];
    for (w, i) in fock_ids {
        fw[i] = w;
    }
    let mut total: HashMap<Vec<i64>, u32> = HashMap::new();
    let mut pair = vec![0u32; mw.len() * fw.len()];
    for (i, a) in mw.iter().enumerate() {
        for (j, b) in fw.iter().enumerate() {
            let w: Vec<i64> = a.iter().zip(b).map(|(x, y)| x + y).collect();
            let n = total.len() as u32;
            pair[i * fw.len() + j] = *total.entry(w).or_insert(n);
        }
    }
    let nf = fw.len();
    let mut ids = Vec::with_capacity(space.dim());
    for &m in &m_of {
        for &f in &f_of {
            ids.push(pair[m * nf + f]);
        }
    }
    (ids, total.len())
}

/// Exact restriction of `op` to a sector, assembled from columns.
fn sector_matrix(op: &WeilOperator, members: &[usize], pos: &HashMap<usize, usize>) -> Result<ComplexMatrix> {
    let n = members.len();
    let mut m = ComplexMatrix::zeros(n, n);
    let mut col = Vec::new();
    for (c, &idx) in members.iter().enumerate() {
        col.clear();
        op.column_entries(idx, &mut col);
        for &(r, v) in &col {
            let Some(&p) = pos.get(&r) else {
                return Err(Error::Numerical(format!("operator column {idx} leaves its weight sector")));
            };
            m[(p, c)] += v;
        }
    }
    Ok(m)
}

fn sector_kernel(space: &WeilSpace, op: &WeilOperator, opts: &KernelOptions) -> Result<RawKernel> {
    let (ids, count) = sectors(space);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let v = random_vector::<f64, _>(space.dim(), &mut rng);
    let w = op.apply_vec(&v);
    let u = op.apply_vec(&w);
    let mut nv = vec![0.0f64; count];
    let mut nw = vec![0.0f64; count];
    for (i, &s) in ids.iter().enumerate() {
        nv[s as usize] += v[i].norm_sqr();
        nw[s as usize] += w[i].norm_sqr();
    }
    drop(w);
    let rho: Vec<f64> = nw.iter().zip(&nv).map(|(a, b)| a / b).collect();
    let mut res = vec![0.0f64; count];
    for (i, &s) in ids.iter().enumerate() {
        res[s as usize] += (u[i] - v[i] * rho[s as usize]).norm_sqr();
    }
    drop(u);
    let scalar: Vec<bool> =
        (0..count).map(|s| res[s].sqrt() <= opts.scalar_tol * (1.0 + rho[s]) * nv[s].sqrt()).collect();
    let scale = rho.iter().fold(0.0f64, |m, r| m.max(r.sqrt()));
    let tau = opts.tau_rel * (1.0 + scale);
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); count];
    for (i, &s) in ids.iter().enumerate() {
        members[s as usize].push(i);
    }
    let mut basis = Vec::new();
    let mut gap = f64::INFINITY;
    let mut non_scalar = 0;
    for s in 0..count {
        if scalar[s] {
            let ev = rho[s].sqrt();
            if ev < tau {
                for &i in &members[s] {
                    let mut e = space.zero_vector();
                    e[i] = re(1.0);
                    basis.push(e);
                }
            } else {
                gap = gap.min(ev);
            }
            continue;
        }
        non_scalar += 1;
        let mem = &members[s];
        if mem.len() > opts.sector_dense_limit {
            return Err(Error::Resource(format!(
                "non-scalar sector of dimension {} exceeds the dense limit {}",
                mem.len(),
                opts.sector_dense_limit
            )));
        }
        let pos: HashMap<usize, usize> = mem.iter().enumerate().map(|(p, &i)| (i, p)).collect();
        let m = sector_matrix(op, mem, &pos)?.hermitian_part();
        let e = hermitian_eig(&m)?;
        for (j, x) in e.values.iter().enumerate() {
            if x.abs() < tau {
                let mut full = space.zero_vector();
                for (p, &i) in mem.iter().enumerate() {
                    full[i] = e.vectors[(p, j)];
                }
                basis.push(full);
            } else {
                gap = gap.min(x.abs());
            }
        }
    }
    Ok(RawKernel { method: "sectors".into(), basis, threshold: tau, scale, gap, sectors: count, non_scalar })
}

fn decompose(
    space: &WeilSpace,
    basis: Vec<Vec<C64>>,
    opts: &KernelOptions,
) -> Result<(Vec<WeightBlock>, bool, Vec<Vec<C64>>)> {
    let kd = basis.len();
    if kd == 0 {
        return Ok((Vec::new(), false, basis));
    }
    let t = space.trunc();
    let tops: Vec<WeilOperator> = t.labels().map(|i| t_operator(space, i, i)).collect::<Result<_>>()?;
    // Projected Cartan generators M_i = K* t_ii K.
    let proj = |op: &WeilOperator, vecs: &[Vec<C64>]| -> ComplexMatrix {
        let images: Vec<Vec<C64>> = vecs.iter().map(|v| op.apply_vec(v)).collect();
        ComplexMatrix::from_fn(vecs.len(), vecs.len(), |r, c| dot(&vecs[r], &images[c]))
    };
    let ms: Vec<ComplexMatrix> = tops.iter().map(|op| proj(op, &basis)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x77);
    let mut h = ComplexMatrix::zeros(kd, kd);
    for m in &ms {
        h = &h + &m.scale_real(rng.gen_range(0.5..1.5));
    }
    let e = hermitian_eig(&h.hermitian_part())?;
    let u = &e.vectors;
    let rotated: Vec<Vec<C64>> = (0..kd)
        .map(|c| {
            let mut x = space.zero_vector();
            for (r, b) in basis.iter().enumerate() {
                let z = u[(r, c)];
                if z.norm() > 0.0 {
                    axpy(z, b, &mut x);
                }
            }
            x
        })
        .collect();
    drop(basis);
    let mut ambiguous = false;
    let mut weights: Vec<Vec<f64>> = vec![Vec::new(); kd];
    for m in &ms {
        let d = u.adjoint().matmul(m).matmul(u);
        for r in 0..kd {
            weights[r].push(d[(r, r)].re);
            for c in 0..kd {
                if r != c && d[(r, c)].norm() > opts.weight_tol {
                    ambiguous = true;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..kd).collect();
    order.sort_by(|&a, &b| {
        weights[a]
            .iter()
            .zip(&weights[b])
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let sep = |a: usize, b: usize| weights[a].iter().zip(&weights[b]).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for &i in &order {
        match groups.iter_mut().find(|g| sep(g[0], i) < opts.weight_tol) {
            Some(g) => g.push(i),
            None => groups.push(vec![i]),
        }
    }
    for (x, gx) in groups.iter().enumerate() {
        for gy in &groups[x + 1..] {
            if sep(gx[0], gy[0]) < 1e2 * opts.weight_tol {
                ambiguous = true;
            }
        }
    }
    let gammas: Vec<WeilOperator> = t.labels().map(|i| gamma_operator(space, i, i)).collect::<Result<_>>()?;
    let irrep = 1usize << t.n();
    let mut blocks = Vec::with_capacity(groups.len());
    for g in &groups {
        let q: Vec<&Vec<C64>> = g.iter().map(|&i| &rotated[i]).collect();
        let d = q.len();
        let mut closure = 0.0f64;
        let mut restricted = Vec::with_capacity(gammas.len());
        for op in &gammas {
            let mut gm = ComplexMatrix::zeros(d, d);
            for (c, v) in q.iter().enumerate() {
                let mut w = op.apply_vec(v);
                for (r, b) in q.iter().enumerate() {
                    let z = dot(b, &w);
                    gm[(r, c)] = z;
                    axpy(-z, b, &mut w);
                }
                closure = closure.max(norm(&w));
            }
            restricted.push(gm);
        }
        let commutant_dim = commutant_dimension(&restricted)?;
        let summands = d / irrep;
        let weight = weights[g[0]].clone();
        blocks.push(WeightBlock {
            weight,
            dim: d,
            closure_defect: closure,
            commutant_dim,
            summands,
            irreducible: d == irrep && commutant_dim == 1 && closure < CLOSURE_TOL,
        });
        if closure >= CLOSURE_TOL {
            ambiguous = true;
        }
    }
    Ok((blocks, ambiguous, rotated))
}

/// Null-space dimension of `M ↦ ([G_a, M])_a` on `d × d` matrices.
fn commutant_dimension(gens: &[ComplexMatrix]) -> Result<usize> {
    let d = gens.first().map_or(0, |g| g.rows());
    if d == 0 {
        return Ok(0);
    }
    let n = d * d;
    // Column (p, q) of ad_G holds [G, E_pq].
    let mut gram = ComplexMatrix::zeros(n, n);
    for g in gens {
        let mut cols: Vec<ComplexMatrix> = Vec::with_capacity(n);
        for p in 0..d {
            for q in 0..d {
                let mut e = ComplexMatrix::zeros(d, d);
                e[(p, q)] = re(1.0);
                cols.push(g.commutator(&e));
            }
        }
        for a in 0..n {
            for b in 0..n {
                let s: C64 = cols[a].as_slice().iter().zip(cols[b].as_slice()).map(|(x, y)| x.conj() * y).sum();
                gram[(a, b)] += s;
            }
        }
    }
    let vals = hermitian_eigvals(&gram.hermitian_part())?;
    Ok(vals.iter().filter(|x| x.abs() < COMMUTANT_TOL).count())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dirac::build_dirac;
    use crate::hwmodule::Weight;
    use crate::liealg::Truncation;

    fn space(lambda: Vec<i64>, k: i64) -> WeilSpace {
        let t = Truncation::new(1).unwrap();
        WeilSpace::new(&Weight::new(t, lambda, k).unwrap(), 10_000).unwrap()
    }

    #[test]
    fn kernel_examples_dense_and_sectors() {
        let cases: [(Vec<i64>, [f64; 3], usize, usize); 3] = [
            (vec![0, 0, 0], [0.0; 3], 2, 1),
            (vec![0, 0, -1], [0.0, 0.0, 0.5], 2, 1),
            (vec![0, 0, -1], [0.0, 0.0, 0.49], 0, 0),
        ];
        for (lambda, mu, dim, summands) in cases {
            let s = space(lambda, 1);
            let d = build_dirac(&s);
            let a = GaugeField::diagonal(s.trunc(), &mu).unwrap();
            for threshold in [usize::MAX, 0] {
                let opts = KernelOptions { dense_threshold: threshold, ..Default::default() };
                let r = kernel(&s, &d, &a, &opts).unwrap();
                assert_eq!(r.dim, dim, "{mu:?} {}", r.method);
                assert_eq!(r.summands, summands);
                assert!(!r.ambiguous);
                assert_eq!(r.non_scalar_sectors, 0);
                if dim > 0 {
                    assert_eq!(r.blocks.len(), 1);
                    assert!(r.blocks[0].irreducible);
                    assert!(r.vacuum_overlap.unwrap() > 1.0 - 1e-9);
                } else {
                    assert!(r.gap > 0.01);
                }
            }
        }
    }

    #[test]
    fn non_diagonal_field_goes_through_gauge() {
        let s = space(vec![0, 0, 0], 1);
        let d = build_dirac(&s);
        let t = s.trunc();
        let a = GaugeField::new(t, (&t.unit(1, 0) + &t.unit(0, 1)).scale_real(0.05)).unwrap();
        let r = kernel(&s, &d, &a, &KernelOptions::default()).unwrap();
        assert!(r.gauge.is_some());
        let direct = dense_kernel(&couple(&s, &d, &a).unwrap(), &KernelOptions::default()).unwrap();
        assert_eq!(r.dim, direct.basis.len());
    }
}
