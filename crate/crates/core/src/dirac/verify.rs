use rand::Rng;

use super::build::{
    build_dirac, casimir, casimir_vacuum_value, dirac_square_closed_form, gamma_operator, t_operator,
    ClosedFormConvention,
};
use super::operator::WeilOperator;
use super::WeilSpace;
use crate::linalg::random::{random_complex, random_vector};
use crate::linalg::scalar::{diff_norm, dot, norm};
use crate::linalg::LinearMap;
use crate::report::VerifyReport;
use crate::{re, Result, SparseMatrix, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckMode {
    /// Entrywise on assembled sparse matrices.
    Dense,
    /// Random unit probes against random combinations of generators.
    Probes(usize),
}

pub const DENSE_TOL: f64 = 1e-10;
pub const PROBE_TOL: f64 = 1e-9;

/// Every operator identity of the Dirac operator on `space`.
pub fn check_dirac<R: Rng + ?Sized>(space: &WeilSpace, mode: CheckMode, rng: &mut R) -> Result<VerifyReport> {
    let dirac = build_dirac(space);
    let mut rep = match mode {
        CheckMode::Dense => dense_checks(space, &dirac)?,
        CheckMode::Probes(p) => probe_checks(space, &dirac, p, rng)?,
    };
    rep.extend(vacuum_checks(space, &dirac)?);
    Ok(rep)
}

fn dense_checks(space: &WeilSpace, dirac: &WeilOperator) -> Result<VerifyReport> {
    let t = space.trunc();
    let k1 = (space.level() + 1) as f64;
    let d = dirac.to_sparse();
    let d2 = d.matmul(&d);
    let mut rep = VerifyReport::default();
    rep.record("dirac.self_adjoint", d.max_abs_diff(&d.adjoint()), DENSE_TOL);
    let c = casimir(space, dirac).to_sparse();
    let (mut anti, mut comm, mut sq_g, mut sq_t, mut cas, mut tadj) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let ts: Vec<Vec<SparseMatrix>> = t
        .labels()
        .map(|i| t.labels().map(|j| t_operator(space, i, j).map(|o| o.to_sparse())).collect::<Result<_>>())
        .collect::<Result<_>>()?;
    for i in t.labels() {
        for j in t.labels() {
            let g = gamma_operator(space, i, j)?.to_sparse();
            let tij = &ts[t.pos(i)][t.pos(j)];
            let f = (i - j) as f64 * k1;
            anti = anti.max(d.anticommutator(&g).max_abs_diff(&tij.scale(re(2.0))));
            comm = comm.max(d.commutator(tij).max_abs_diff(&g.scale(re(f))));
            sq_g = sq_g.max(d2.commutator(&g).max_abs_diff(&g.scale(re(2.0 * f))));
            sq_t = sq_t.max(d2.commutator(tij).max_abs_diff(&tij.scale(re(2.0 * f))));
            cas = cas.max(c.commutator(&g).max_abs()).max(c.commutator(tij).max_abs());
            tadj = tadj.max(tij.adjoint().max_abs_diff(&ts[t.pos(j)][t.pos(i)]));
        }
    }
    rep.record("dirac.anticommutator_gamma", anti, DENSE_TOL);
    rep.record("dirac.commutator_t", comm, DENSE_TOL);
    rep.record("dirac.square_commutator_gamma", sq_g, DENSE_TOL);
    rep.record("dirac.square_commutator_t", sq_t, DENSE_TOL);
    rep.record("dirac.casimir_commutes", cas, DENSE_TOL);
    rep.record("dirac.t_adjoint", tadj, DENSE_TOL);
    let lc = dirac_square_closed_form(space, ClosedFormConvention::LevelCorrected).to_sparse();
    rep.record("dirac.closed_form_level_corrected", d2.max_abs_diff(&lc), DENSE_TOL);
    let lit = dirac_square_closed_form(space, ClosedFormConvention::AsStated).to_sparse();
    // `lc - lit = k · Id ⊗ Σ i :γγ:`
    let defect = lc.sub(&lit);
    rep.record("dirac.closed_form_as_stated_defect_structure", d2.sub(&lit).max_abs_diff(&defect), DENSE_TOL);
    Ok(rep)
}

/// Caches `D v` and `D² v` for one probe.
struct Probe {
    v: Vec<C64>,
    dv: Vec<C64>,
    d2v: Vec<C64>,
}

fn probe_checks<R: Rng + ?Sized>(
    space: &WeilSpace,
    dirac: &WeilOperator,
    probes: usize,
    rng: &mut R,
) -> Result<VerifyReport> {
    let t = space.trunc();
    let k1 = (space.level() + 1) as f64;
    let (dm, df) = (space.dim_module(), space.dim_fock());
    let lc = dirac_square_closed_form(space, ClosedFormConvention::LevelCorrected);
    let cas = casimir(space, dirac);
    let mut rep = VerifyReport::default();
    let (mut sa, mut anti, mut comm, mut sq_g, mut sq_t, mut cf, mut cas_g, mut cas_t, mut tadj) =
        (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..probes {
        // Random combinations Γ_c = Σ c_ij γ_ij, T_c = Σ c_ij t_ij and their (i-j)-weighted versions.
        let mut gc = WeilOperator::zero(dm, df);
        let mut gw = WeilOperator::zero(dm, df);
        let mut tc = WeilOperator::zero(dm, df);
        let mut tw = WeilOperator::zero(dm, df);
        let mut tcs = WeilOperator::zero(dm, df);
        for i in t.labels() {
            for j in t.labels() {
                let c: C64 = random_complex(rng);
                let g = gamma_operator(space, i, j)?;
                let tij = t_operator(space, i, j)?;
                let w = (i - j) as f64;
                gc = gc.add_scaled(c, &g);
                gw = gw.add_scaled(c * w, &g);
                tc = tc.add_scaled(c, &tij);
                tw = tw.add_scaled(c * w, &tij);
                tcs = tcs.add_scaled(c.conj(), &t_operator(space, j, i)?);
            }
        }
        let mut v = random_vector::<f64, R>(space.dim(), rng);
        let n = norm(&v);
        v.iter_mut().for_each(|z| *z /= n);
        let dv = dirac.apply_vec(&v);
        let p = Probe { d2v: dirac.apply_vec(&dv), dv, v };
        let u = {
            let mut u = random_vector::<f64, R>(space.dim(), rng);
            let n = norm(&u);
            u.iter_mut().for_each(|z| *z /= n);
            u
        };
        sa = sa.max((dot(&u, &p.dv) - dot(&dirac.apply_vec(&u), &p.v)).norm());
        let corr_v = cas.correction.apply_vec(&p.v);
        for (x, xw, scale_anti, is_gamma) in [(&gc, &gw, 2.0, true), (&tc, &tw, 0.0, false)] {
            let xv = x.apply_vec(&p.v);
            let dxv = dirac.apply_vec(&xv);
            let d2xv = dirac.apply_vec(&dxv);
            let xdv = x.apply_vec(&p.dv);
            let xd2v = x.apply_vec(&p.d2v);
            let wv = xw.apply_vec(&p.v);
            let sq: Vec<C64> = d2xv.iter().zip(&xd2v).map(|(a, b)| a - b).collect();
            let sq_target: Vec<C64> = wv.iter().map(|z| z * (2.0 * k1)).collect();
            let corr_xv = cas.correction.apply_vec(&xv);
            let x_corr_v = x.apply_vec(&corr_v);
            let c_comm: Vec<C64> = sq.iter().zip(&corr_xv).zip(&x_corr_v).map(|((s, a), b)| s - a + b).collect();
            let c_dev = norm(&c_comm);
            if is_gamma {
                let a: Vec<C64> = dxv.iter().zip(&xdv).map(|(p, q)| p + q).collect();
                let tcv = tc.apply_vec(&p.v);
                let target: Vec<C64> = tcv.iter().map(|z| z * scale_anti).collect();
                anti = anti.max(diff_norm(&a, &target));
                sq_g = sq_g.max(diff_norm(&sq, &sq_target));
                cas_g = cas_g.max(c_dev);
            } else {
                let cm: Vec<C64> = dxv.iter().zip(&xdv).map(|(p, q)| p - q).collect();
                let gwv = gw.apply_vec(&p.v);
                let target: Vec<C64> = gwv.iter().map(|z| z * k1).collect();
                comm = comm.max(diff_norm(&cm, &target));
                sq_t = sq_t.max(diff_norm(&sq, &sq_target));
                cas_t = cas_t.max(c_dev);
            }
        }
        cf = cf.max(diff_norm(&p.d2v, &lc.apply_vec(&p.v)));
        // <u, T_c v> = <(Σ conj(c_ij) t_ji) u, v> checks t_ij† = t_ji.
        tadj = tadj.max((dot(&u, &tc.apply_vec(&p.v)) - dot(&tcs.apply_vec(&u), &p.v)).norm());
    }
    rep.record("dirac.self_adjoint", sa, PROBE_TOL);
    rep.record("dirac.anticommutator_gamma", anti, PROBE_TOL);
    rep.record("dirac.commutator_t", comm, PROBE_TOL);
    rep.record("dirac.square_commutator_gamma", sq_g, PROBE_TOL);
    rep.record("dirac.square_commutator_t", sq_t, PROBE_TOL);
    rep.record("dirac.casimir_commutes", cas_g.max(cas_t), PROBE_TOL);
    rep.record("dirac.t_adjoint", tadj, PROBE_TOL);
    rep.record("dirac.closed_form_level_corrected", cf, PROBE_TOL);
    Ok(rep)
}

/// Actions on `v_hw ⊗ w` for vacuum-sector `w`.
fn vacuum_checks(space: &WeilSpace, dirac: &WeilOperator) -> Result<VerifyReport> {
    let t = space.trunc();
    let mut rep = VerifyReport::default();
    let lambda = space.lambda();
    let mut lam_gamma = WeilOperator::zero(space.dim_module(), space.dim_fock());
    for i in t.labels() {
        lam_gamma = lam_gamma.add_scaled(re(lambda[t.pos(i)] as f64), &gamma_operator(space, i, i)?);
    }
    let mut dev_d = 0.0f64;
    let mut dev_d2 = 0.0f64;
    let lam2: f64 = lambda.iter().map(|&l| (l * l) as f64).sum();
    for idx in space.vacuum_sector() {
        let mut e = space.zero_vector();
        e[idx] = re(1.0);
        let de = dirac.apply_vec(&e);
        dev_d = dev_d.max(diff_norm(&de, &lam_gamma.apply_vec(&e)));
        let d2e = dirac.apply_vec(&de);
        let target: Vec<C64> = e.iter().map(|z| z * lam2).collect();
        dev_d2 = dev_d2.max(diff_norm(&d2e, &target));
    }
    rep.record("dirac.vacuum_action", dev_d, DENSE_TOL);
    rep.record("dirac.vacuum_square", dev_d2, DENSE_TOL);
    let hv = space.hw_vacuum();
    let mut dev_t = 0.0f64;
    for i in t.labels() {
        let w = t_operator(space, i, i)?.apply_vec(&hv);
        let target: Vec<C64> = hv.iter().map(|z| z * lambda[t.pos(i)] as f64).collect();
        dev_t = dev_t.max(diff_norm(&w, &target));
    }
    rep.record("dirac.t_vacuum_weight", dev_t, DENSE_TOL);
    let c = casimir(space, dirac).apply_vec(&hv);
    let cv = casimir_vacuum_value(space);
    let target: Vec<C64> = hv.iter().map(|z| z * cv).collect();
    rep.record("dirac.casimir_vacuum_value", diff_norm(&c, &target), DENSE_TOL);
    Ok(rep)
}
