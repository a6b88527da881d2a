//! The `verify` suites, in fixed order. Each suite draws from its own ChaCha stream of the run seed.

use cubic_weil::centralext::check_extension;
use cubic_weil::dirac::equivariance::{EQUIVARIANCE_PROBES, EXPONENTIATED_TOL, INFINITESIMAL_TOL};
use cubic_weil::dirac::{
    self, build_dirac, check_dirac, check_equivariance, compare_multisets, couple, kernel, predicted_spectrum,
    verify_ktheory_conditions, CheckMode, GaugeField, KTheoryReport, KernelOptions, KernelReport, WeilSpace,
};
use cubic_weil::groupoid::{check_groupoid, GroupoidSuiteOptions, GroupoidSummary};
use cubic_weil::hwmodule::{build_module, check_module, positivity_witness, Weight, POSITIVITY_TOL};
use cubic_weil::liealg::{
    check_jacobi, coboundary_gap, lundberg_doubling, omega, LieMatrix, LundbergReport, Role, Truncation,
};
use cubic_weil::linalg::random::random_skew_hermitian;
use cubic_weil::linalg::scalar::{diff_norm, dot, norm};
use cubic_weil::linalg::LinearMap;
use cubic_weil::report::VerifyReport;
use cubic_weil::spinrep::{check_central_terms, check_clifford, check_spin, SpinModule};
use cubic_weil::{ComplexMatrix, Error, Result, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::RunConfig;
use crate::report::{Clock, SuiteResult};

pub const SUITES: [&str; 6] = ["liealg", "spinrep", "hwmodule", "dirac", "centralext", "groupoid"];

pub const JACOBI_TRIPLES: usize = 20;
pub const JACOBI_TOL: f64 = 1e-10;
pub const SKEW_TOL: f64 = 1e-12;
pub const COCYCLE_IDENTITY_TOL: f64 = 1e-10;
pub const LUNDBERG_N: usize = 6;
pub const LUNDBERG_SUPPORT: i64 = 3;
pub const LUNDBERG_PAIRS: usize = 10;
pub const LUNDBERG_TOL: f64 = 1e-9;
pub const COBOUNDARY_NS: [u64; 4] = [2, 4, 8, 16];
pub const SPECTRAL_SAMPLES: usize = 5;
pub const VACUUM_TOL: f64 = 1e-10;
pub const KERNEL_OVERLAP_TOL: f64 = 1e-9;
pub const EMPTY_KERNEL_GAP: f64 = 0.01;
pub const EQUIVARIANCE_X: usize = 3;
pub const EQUIVARIANCE_T: f64 = 0.3;
pub const RANDOM_GAUGE_SCALE: f64 = 0.3;
pub const EXTENSION_SAMPLES: usize = 20;
pub const BCH_PAIRS: usize = 5;
pub const FULL_GRID_MAX_DIM: usize = 500;

/// Independent stream `index` of the run seed.
pub fn suite_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct VerifyDetails {
    pub lundberg: Vec<LundbergReport>,
    pub coboundary_gaps: Vec<(u64, u64)>,
    pub kernel_vacuum: Option<KernelReport>,
    pub kernel_examples: Vec<KernelExample>,
    pub ktheory: Option<KTheoryReport>,
    pub groupoid: Option<GroupoidSummary>,
    /// Window on which the dense-only dirac checks ran.
    pub dirac_aux_n: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct KernelExample {
    pub lambda: Vec<i64>,
    pub mu: Vec<f64>,
    pub expected_dim: usize,
    pub expected_summands: usize,
    pub dense: KernelReport,
    pub sectors: KernelReport,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyBody {
    pub suites: Vec<SuiteResult>,
    pub details: VerifyDetails,
}

pub struct VerifyOutcome {
    pub body: VerifyBody,
    pub exit_code: i32,
}

/// Runs every suite; an erroring suite is reported and the rest still run.
pub fn run_verify(cfg: &RunConfig, clock: &mut Clock, progress: &mut dyn FnMut(&SuiteResult)) -> VerifyOutcome {
    let mut details = VerifyDetails::default();
    let mut suites = Vec::with_capacity(SUITES.len());
    let mut error_code = None;
    for (index, name) in SUITES.iter().enumerate() {
        let mut rng = suite_rng(cfg.seed, index as u64);
        let res = clock.time(name, || match *name {
            "liealg" => liealg_suite(cfg, &mut details, &mut rng),
            "spinrep" => spinrep_suite(&mut rng),
            "hwmodule" => hwmodule_suite(cfg, &mut rng),
            "dirac" => dirac_suite(cfg, &mut details, &mut rng),
            "centralext" => check_extension(cfg.trunc(), EXTENSION_SAMPLES, BCH_PAIRS, &mut rng),
            "groupoid" => groupoid_suite(cfg, &mut details, &mut rng),
            _ => unreachable!("fixed suite list"),
        });
        let result = match res {
            Ok(rep) => SuiteResult::from_checks(name, rep),
            Err(e) => {
                error_code.get_or_insert(e.exit_code());
                SuiteResult::from_error(name, e.to_string())
            }
        };
        progress(&result);
        suites.push(result);
    }
    let exit_code = match error_code {
        Some(c) => c,
        None if suites.iter().all(SuiteResult::passed) => 0,
        None => 1,
    };
    VerifyOutcome { body: VerifyBody { suites, details }, exit_code }
}

fn skew<R: Rng + ?Sized>(t: Truncation, rng: &mut R) -> Result<LieMatrix> {
    LieMatrix::new(t, Role::Algebra, random_skew_hermitian::<f64, R>(t.dim(), 1.0, rng))
}

/// Random skew-Hermitian matrix supported on `|i| <= r`, Frobenius norm 1.
pub fn interior_skew<R: Rng + ?Sized>(t: Truncation, r: i64, rng: &mut R) -> Result<LieMatrix> {
    let full = random_skew_hermitian::<f64, R>(t.dim(), 1.0, rng);
    let m = ComplexMatrix::from_fn(t.dim(), t.dim(), |p, q| {
        if t.label(p).abs() <= r && t.label(q).abs() <= r {
            full[(p, q)]
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let f = m.frobenius_norm();
    LieMatrix::new(t, Role::Algebra, m.scale_real(1.0 / f))
}

/// `min_λ max_{|i| <= N} |λ - i|` by scanning `λ` on a half-integer grid.
fn brute_coboundary_gap(n: u64) -> u64 {
    let n = n as i64;
    (-4 * n..=4 * n)
        .map(|twice| (-n..=n).map(|i| (twice - 2 * i).unsigned_abs()).max().unwrap_or(0))
        .min()
        .map_or(0, |m| m / 2)
}

fn lie(t: Truncation, m: ComplexMatrix) -> Result<LieMatrix> {
    LieMatrix::new(t, Role::Algebra, m)
}

fn liealg_suite<R: Rng + ?Sized>(cfg: &RunConfig, details: &mut VerifyDetails, rng: &mut R) -> Result<VerifyReport> {
    let t = cfg.trunc();
    let mut rep = VerifyReport::new();
    let (mut jac, mut anti, mut real, mut cyc) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..JACOBI_TRIPLES {
        let (x, y, z) = (skew(t, rng)?, skew(t, rng)?, skew(t, rng)?);
        jac = jac.max(check_jacobi(&x, &y, &z)?);
        let w = omega(&x, &y, 1)?;
        anti = anti.max((w + omega(&y, &x, 1)?).norm());
        real = real.max(w.re.abs());
        // ω([X,Y],Z) + ω([Y,Z],X) + ω([Z,X],Y) = 0
        let c = omega(&lie(t, x.matrix.commutator(&y.matrix))?, &z, 1)?
            + omega(&lie(t, y.matrix.commutator(&z.matrix))?, &x, 1)?
            + omega(&lie(t, z.matrix.commutator(&x.matrix))?, &y, 1)?;
        cyc = cyc.max(c.norm());
    }
    rep.record("liealg.jacobi", jac, JACOBI_TOL);
    rep.record("liealg.omega_antisymmetric", anti, SKEW_TOL);
    rep.record("liealg.omega_imaginary_on_skew", real, SKEW_TOL);
    rep.record("liealg.omega_cocycle_identity", cyc, COCYCLE_IDENTITY_TOL);

    let big = Truncation::new(LUNDBERG_N)?;
    let margin = LUNDBERG_N - LUNDBERG_SUPPORT as usize;
    let (mut dbl, mut quarter, mut plain) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..LUNDBERG_PAIRS {
        let x = interior_skew(big, LUNDBERG_SUPPORT, rng)?;
        let y = interior_skew(big, LUNDBERG_SUPPORT, rng)?;
        let r = lundberg_doubling(&x, &y, margin)?;
        let dev = |v: Option<f64>, want: f64| v.map_or(f64::INFINITY, |v| (v - want).abs());
        dbl = dbl.max(dev(r.ratio, 2.0));
        quarter = quarter.max(dev(r.quarter_to_half_ratio, -1.0));
        plain = plain.max(dev(r.plain_to_half_ratio, -2.0));
        details.lundberg.push(r);
    }
    rep.record("liealg.lundberg_doubling", dbl, LUNDBERG_TOL);
    rep.record("liealg.lundberg_quarter_form_ratio", quarter, LUNDBERG_TOL);
    rep.record("liealg.lundberg_plain_form_ratio", plain, LUNDBERG_TOL);

    let mut gap_dev = 0u64;
    for n in COBOUNDARY_NS {
        let g = coboundary_gap(n)?;
        gap_dev = gap_dev.max(g.abs_diff(n)).max(g.abs_diff(brute_coboundary_gap(n)));
        details.coboundary_gaps.push((n, g));
    }
    rep.record("liealg.coboundary_gap_linear", gap_dev as f64, 0.0);
    Ok(rep)
}

fn spinrep_suite<R: Rng + ?Sized>(rng: &mut R) -> Result<VerifyReport> {
    let s1 = SpinModule::new(Truncation::new(1)?)?;
    let s2 = SpinModule::new(Truncation::new(2)?)?;
    let mut rep = VerifyReport::new();
    for s in [&s1, &s2] {
        let n = s.trunc().n();
        let mut r = check_clifford(s, rng);
        r.extend(check_spin(s));
        rep.extend(prefixed(&format!("spinrep.n{n}"), r));
    }
    rep.extend(prefixed("spinrep", check_central_terms(&s1, &s2)?));
    Ok(rep)
}

fn prefixed(prefix: &str, r: VerifyReport) -> VerifyReport {
    VerifyReport {
        checks: r
            .checks
            .into_iter()
            .map(|c| {
                if c.name.starts_with(prefix) {
                    c
                } else {
                    cubic_weil::report::Check { name: format!("{prefix}.{}", c.name), ..c }
                }
            })
            .collect(),
    }
}

fn hwmodule_suite<R: Rng + ?Sized>(cfg: &RunConfig, rng: &mut R) -> Result<VerifyReport> {
    let module = build_module(&weight(cfg)?, cfg.module_dim_cap)?;
    let mut rep = prefixed("hwmodule", check_module(&module, module.dim() <= FULL_GRID_MAX_DIM, rng));
    let t = cfg.trunc();
    let mut dev = 0.0f64;
    let mut nonneg = true;
    for i in t.labels() {
        for j in t.labels().filter(|&j| j >= i) {
            let w = positivity_witness(&module, i, j)?;
            dev = dev.max(w.deviation);
            nonneg &= w.expected >= 0.0;
        }
    }
    rep.record("hwmodule.positivity_witness", dev, POSITIVITY_TOL);
    rep.record_bool("hwmodule.positivity_constraints_nonnegative", nonneg);
    Ok(rep)
}

fn weight(cfg: &RunConfig) -> Result<Weight> {
    Weight::new(cfg.trunc(), cfg.lambda_vec(), cfg.k)
}

fn config_error(e: crate::config::ConfigError) -> Error {
    Error::Precondition(e.to_string())
}

/// The configured weight restricted to the `N=1` window.
fn restricted_weight(cfg: &RunConfig) -> Result<Weight> {
    let t1 = Truncation::new(1)?;
    let lambda = t1.labels().map(|i| cfg.lambda.get(&i).copied().unwrap_or(0)).collect();
    Weight::new(t1, lambda, cfg.k)
}

/// The three kernel configurations at `N=1`, `k=1`: `(λ, μ, dim, summands)`.
pub fn kernel_example_cases() -> [(Vec<i64>, Vec<f64>, usize, usize); 3] {
    [
        (vec![0, 0, 0], vec![0.0; 3], 2, 1),
        (vec![0, 0, -1], vec![0.0, 0.0, 0.5], 2, 1),
        (vec![0, 0, -1], vec![0.0, 0.0, 0.49], 0, 0),
    ]
}

pub fn kernel_options(cfg: &RunConfig, dense_threshold: usize) -> KernelOptions {
    KernelOptions {
        dense_threshold,
        tau_rel: cfg.tolerances.kernel_tau_rel,
        weight_tol: cfg.tolerances.weight_tol,
        ..KernelOptions::default()
    }
}

fn dirac_suite<R: Rng + ?Sized>(cfg: &RunConfig, details: &mut VerifyDetails, rng: &mut R) -> Result<VerifyReport> {
    let space = WeilSpace::new(&weight(cfg)?, cfg.module_dim_cap)?;
    let dense = space.dim() <= cfg.dense_threshold;
    let mode = if dense { CheckMode::Dense } else { CheckMode::Probes(cfg.probes) };
    let mut rep = check_dirac(&space, mode, rng)?;

    // Dense-only checks run on the N=1 restriction when the configured space is too large.
    let aux = if dense { space.clone() } else { WeilSpace::new(&restricted_weight(cfg)?, cfg.module_dim_cap)? };
    details.dirac_aux_n = Some(aux.trunc().n());
    let aux_dirac = build_dirac(&aux);
    let k1 = (aux.level() + 1) as f64;
    let t1 = aux.trunc();

    // Spectral formula on random diagonal μ.
    let (mut spec, mut vac, mut vac_eig) = (0.0f64, 0.0f64, 0.0f64);
    let vacuum = aux.hw_vacuum();
    for _ in 0..SPECTRAL_SAMPLES {
        let mu: Vec<f64> = (0..t1.dim()).map(|_| rng.gen_range(-0.5..0.5)).collect();
        let a = GaugeField::diagonal(t1, &mu)?;
        let da = couple(&aux, &aux_dirac, &a)?;
        let computed = dirac::spectrum::square_spectrum_dense(&da)?;
        let predicted = predicted_spectrum(&aux, &mu)?;
        spec = spec.max(compare_multisets(&computed, &predicted.values())?);
        let want: f64 = t1
            .labels()
            .map(|i| {
                let p = t1.pos(i);
                (aux.lambda()[p] as f64 + k1 * mu[p]).powi(2)
            })
            .sum();
        // `v_hw ⊗ |0>` is an eigenvector of D_A², with Rayleigh quotient ||D_A v||².
        let dv = da.apply_vec(&vacuum);
        let d2v = da.apply_vec(&dv);
        let rayleigh = dot(&vacuum, &d2v).re;
        vac = vac.max((rayleigh - want).abs()).max((predicted.vacuum_value - want).abs());
        let resid: Vec<C64> = vacuum.iter().map(|v| v.scale(want)).collect();
        vac_eig = vac_eig.max(diff_norm(&d2v, &resid) / norm(&vacuum));
    }
    rep.record("dirac.spectral_formula", spec, cfg.tolerances.spectrum_match);
    rep.record("dirac.vacuum_eigenvalue", vac, VACUUM_TOL);
    rep.record("dirac.vacuum_is_eigenvector", vac_eig, VACUUM_TOL);

    // Kernel examples: dense against the sector path.
    let t_one = Truncation::new(1)?;
    let (mut dims_ok, mut blocks_ok, mut agree) = (true, true, true);
    let mut overlap = 0.0f64;
    let mut gap = f64::INFINITY;
    for (lambda, mu, dim, summands) in kernel_example_cases() {
        let s = WeilSpace::new(&Weight::new(t_one, lambda.clone(), 1)?, cfg.module_dim_cap)?;
        let d = build_dirac(&s);
        let a = GaugeField::diagonal(t_one, &mu)?;
        let kd = kernel(&s, &d, &a, &kernel_options(cfg, usize::MAX))?;
        let ks = kernel(&s, &d, &a, &kernel_options(cfg, 0))?;
        for r in [&kd, &ks] {
            dims_ok &= r.dim == dim && r.summands == summands && !r.ambiguous;
            blocks_ok &= r.blocks.iter().all(|b| b.irreducible);
            if dim > 0 {
                overlap = overlap.max(1.0 - r.vacuum_overlap.unwrap_or(0.0));
            } else {
                gap = gap.min(r.gap);
            }
        }
        agree &= kd.dim == ks.dim && kd.summands == ks.summands;
        details.kernel_examples.push(KernelExample {
            lambda,
            mu,
            expected_dim: dim,
            expected_summands: summands,
            dense: kd,
            sectors: ks,
        });
    }
    rep.record_bool("dirac.kernel_examples_dim_and_summands", dims_ok);
    rep.record_bool("dirac.kernel_examples_blocks_irreducible", blocks_ok);
    rep.record_bool("dirac.kernel_examples_dense_matches_sectors", agree);
    rep.record("dirac.kernel_examples_vacuum_overlap_defect", overlap, KERNEL_OVERLAP_TOL);
    rep.record_bool("dirac.kernel_examples_empty_gap", gap > EMPTY_KERNEL_GAP);

    // λ ≡ 0, k = 1, A = 0 at the configured window: dim 2^N inside the vacuum sector.
    let t = cfg.trunc();
    let s0 = WeilSpace::new(&Weight::zero(t, 1)?, cfg.module_dim_cap)?;
    let k0 = kernel(&s0, &build_dirac(&s0), &GaugeField::zero(t), &kernel_options(cfg, cfg.dense_threshold))?;
    rep.record_bool("dirac.kernel_vacuum_dim", k0.dim == 1 << t.n());
    rep.record("dirac.kernel_vacuum_overlap_defect", 1.0 - k0.vacuum_overlap.unwrap_or(0.0), KERNEL_OVERLAP_TOL);
    details.kernel_vacuum = Some(k0);

    // Equivariance and the K-theory conditions at the configured gauge field and a random one.
    let a_cfg = if dense { cfg.gauge_field().map_err(config_error)? } else { GaugeField::zero(t1) };
    let a_rand = GaugeField::random(t1, RANDOM_GAUGE_SCALE, rng);
    let (mut inf, mut ex) = (0.0f64, 0.0f64);
    for _ in 0..EQUIVARIANCE_X {
        let x = skew(t1, rng)?;
        let r = check_equivariance(&aux, &aux_dirac, &a_rand, &x, EQUIVARIANCE_T, EQUIVARIANCE_PROBES, rng)?;
        inf = inf.max(r.infinitesimal);
        ex = ex.max(r.exponentiated);
    }
    rep.record("dirac.equivariance_infinitesimal", inf, INFINITESIMAL_TOL);
    rep.record("dirac.equivariance_exponentiated", ex, EXPONENTIATED_TOL);
    let kt = verify_ktheory_conditions(
        &aux,
        &aux_dirac,
        &[a_cfg, a_rand],
        EQUIVARIANCE_X,
        EQUIVARIANCE_T,
        &kernel_options(cfg, cfg.dense_threshold),
        rng,
    )?;
    rep.record_bool("dirac.ktheory_conditions", kt.passed);
    details.ktheory = Some(kt);
    Ok(rep)
}

fn groupoid_suite<R: Rng + ?Sized>(cfg: &RunConfig, details: &mut VerifyDetails, rng: &mut R) -> Result<VerifyReport> {
    let t = Truncation::new(cfg.n.max(2))?;
    let opts = GroupoidSuiteOptions { quadrature: cfg.quadrature_order, ..GroupoidSuiteOptions::default() };
    let (rep, summary) = check_groupoid(t, &opts, rng)?;
    details.groupoid = Some(summary);
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brute_gap_is_n() {
        for n in 1..=16 {
            assert_eq!(brute_coboundary_gap(n), n);
        }
    }

    #[test]
    fn streams_are_independent_and_reproducible() {
        let a: u64 = suite_rng(1, 0).gen();
        let b: u64 = suite_rng(1, 1).gen();
        assert_ne!(a, b);
        assert_eq!(a, suite_rng(1, 0).gen::<u64>());
    }
}
