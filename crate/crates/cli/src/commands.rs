//! One function per subcommand. Each writes its reports under the output directory and returns the exit code.

use std::fmt::Write as _;
use std::path::Path;

use cubic_weil::centralext::{bch_phase_check, check_extension, BchEstimate, BCH_REL_TOL, DEFAULT_BCH_STEPS};
use cubic_weil::dirac::gauge::ISOTROPY_TOL;
use cubic_weil::dirac::{
    build_dirac, couple, gauge_diagonalize, isotropy, kernel, predicted_spectrum, spectrum, IsotropyReport,
    KernelReport, SpectrumOptions, SpectrumReport, WeilSpace,
};
use cubic_weil::groupoid::{check_groupoid, GroupoidSuiteOptions, GroupoidSummary};
use cubic_weil::liealg::{LieMatrix, Role, Truncation};
use cubic_weil::linalg::random::random_skew_hermitian;
use cubic_weil::report::VerifyReport;
use serde::Serialize;

use crate::config::RunConfig;
use crate::report::{fmt_float, write_json, Clock, ConventionPins, Document, SCHEMA};
use crate::suites::{kernel_options, run_verify, suite_rng, BCH_PAIRS, EXTENSION_SAMPLES};
use crate::{Command, EXIT_FAIL, EXIT_PASS};

/// Stream indices past the verify suites.
const COCYCLE_STREAM: u64 = 16;
const EXTENSION_STREAM: u64 = 17;

/// Frobenius norm of the random BCH pairs.
pub const BCH_PAIR_NORM: f64 = 0.8;

pub fn dispatch(command: Command, cfg: &RunConfig, quiet: bool) -> i32 {
    let out = Output { dir: &cfg.output.dir, quiet };
    let code = match command {
        Command::Verify => verify(cfg, &out),
        Command::Spectrum => spectrum_cmd(cfg, &out),
        Command::Kernel => kernel_cmd(cfg, &out),
        Command::Cocycle => cocycle_cmd(cfg, &out),
        Command::Extension => extension_cmd(cfg, &out),
    };
    code.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        e.exit_code()
    })
}

struct Output<'a> {
    dir: &'a Path,
    quiet: bool,
}

impl Output<'_> {
    fn say(&self, line: impl AsRef<str>) {
        if !self.quiet {
            println!("{}", line.as_ref());
        }
    }

    fn write<T: Serialize>(&self, name: &str, doc: &T) -> cubic_weil::Result<()> {
        match write_json(self.dir, name, doc) {
            Ok(p) => {
                self.say(format!("wrote {}", p.display()));
                Ok(())
            }
            Err(e) => {
                Err(cubic_weil::Error::Resource(format!("cannot write {name} under {}: {e}", self.dir.display())))
            }
        }
    }

    fn write_text(&self, name: &str, text: &str) -> cubic_weil::Result<()> {
        let path = self.dir.join(name);
        std::fs::create_dir_all(self.dir)
            .and_then(|_| std::fs::write(&path, text))
            .map_err(|e| cubic_weil::Error::Resource(format!("cannot write {}: {e}", path.display())))?;
        self.say(format!("wrote {}", path.display()));
        Ok(())
    }
}

fn document<T: Serialize>(
    command: Command,
    cfg: &RunConfig,
    exit_code: i32,
    pattern: &str,
    body: T,
    clock: Clock,
) -> Document<T> {
    Document {
        schema: SCHEMA,
        command: command.name().into(),
        passed: exit_code == EXIT_PASS,
        exit_code,
        config: cfg.clone(),
        conventions: ConventionPins::new(pattern),
        body,
        timestamp: clock.finish(),
    }
}

const DEFAULT_PATTERN: &str = "alternating";

fn pass_code(passed: bool) -> i32 {
    if passed {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}

fn print_checks(out: &Output, rep: &VerifyReport) {
    for c in &rep.checks {
        out.say(format!(
            "  {:<4} {:<52} {:.3e} (tol {:.1e})",
            if c.passed { "ok" } else { "FAIL" },
            c.name,
            c.max_deviation,
            c.tolerance
        ));
    }
}

fn verify(cfg: &RunConfig, out: &Output) -> cubic_weil::Result<i32> {
    let mut clock = Clock::start();
    let outcome = run_verify(cfg, &mut clock, &mut |s| {
        let status = if s.passed() {
            "pass"
        } else if s.error.is_some() {
            "ERROR"
        } else {
            "FAIL"
        };
        out.say(format!(
            "{:<10} {:<5} worst {:.3e} (tol {:.1e}) {}",
            s.name,
            status,
            s.max_deviation,
            s.tolerance,
            s.error.as_deref().or(s.worst_check.as_deref()).unwrap_or("")
        ));
        if !s.passed() {
            for c in s.checks.iter().filter(|c| !c.passed) {
                out.say(format!("    failed {} {:.3e} > {:.1e}", c.name, c.max_deviation, c.tolerance));
            }
        }
    });
    let pattern = outcome.body.details.groupoid.as_ref().map_or(DEFAULT_PATTERN.to_string(), |g| g.convention.clone());
    let code = outcome.exit_code;
    let doc = document(Command::Verify, cfg, code, &pattern, outcome.body, clock);
    out.write("verify.json", &doc)?;
    out.say(if code == EXIT_PASS { "verify: pass".to_string() } else { format!("verify: exit {code}") });
    Ok(code)
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumRow {
    pub index: usize,
    pub eigenvalue: f64,
    pub predicted: Option<f64>,
    pub delta: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumBody {
    /// `eigenvalue` column: signed eigenvalues of D_A (dense) or lowest eigenvalues of D_A² (matrix-free).
    pub quantity: &'static str,
    /// Where `μ` of the prediction came from: the diagonal field itself or its gauge diagonalization.
    pub predicted_from: Option<&'static str>,
    pub predicted_mu: Option<Vec<f64>>,
    pub max_delta: Option<f64>,
    pub tolerance: f64,
    /// `|eigenvalue| < τ`, `τ = kernel_tau_rel (1 + max |eigenvalue|)`.
    pub near_zero_count: Option<usize>,
    pub report: SpectrumReport,
    pub rows: Vec<SpectrumRow>,
}

/// Pairs predicted `D_A²` values with computed eigenvalues in order of `e²`; the square root takes the sign of `e`.
pub fn spectrum_rows(eigs: &[f64], squared_input: bool, predicted: Option<&[f64]>) -> Vec<SpectrumRow> {
    let mut rows: Vec<SpectrumRow> = eigs
        .iter()
        .enumerate()
        .map(|(index, &eigenvalue)| SpectrumRow { index, eigenvalue, predicted: None, delta: None })
        .collect();
    if let Some(pred) = predicted {
        let mut pred = pred.to_vec();
        pred.sort_by(f64::total_cmp);
        let sq = |e: f64| if squared_input { e } else { e * e };
        let mut order: Vec<usize> = (0..eigs.len()).collect();
        order.sort_by(|&a, &b| sq(eigs[a]).total_cmp(&sq(eigs[b])).then(a.cmp(&b)));
        for (rank, &i) in order.iter().enumerate() {
            if let Some(&p) = pred.get(rank) {
                let e = eigs[i];
                let val = if squared_input { p } else { p.max(0.0).sqrt().copysign(e) };
                rows[i].predicted = Some(val);
                rows[i].delta = Some((e - val).abs());
            }
        }
    }
    rows
}

pub fn spectrum_csv(rows: &[SpectrumRow]) -> String {
    let with_pred = rows.iter().any(|r| r.predicted.is_some());
    let mut s = String::from(if with_pred { "index,eigenvalue,predicted,delta\n" } else { "index,eigenvalue\n" });
    for r in rows {
        let _ = write!(s, "{},{}", r.index, fmt_float(r.eigenvalue));
        if with_pred {
            let f = |x: Option<f64>| x.map(fmt_float).unwrap_or_default();
            let _ = write!(s, ",{},{}", f(r.predicted), f(r.delta));
        }
        s.push('\n');
    }
    s
}

fn space_of(cfg: &RunConfig) -> cubic_weil::Result<WeilSpace> {
    WeilSpace::new(&cfg.weight().map_err(|e| cubic_weil::Error::Precondition(e.to_string()))?, cfg.module_dim_cap)
}

fn gauge_of(cfg: &RunConfig) -> cubic_weil::Result<cubic_weil::dirac::GaugeField> {
    cfg.gauge_field().map_err(|e| cubic_weil::Error::Precondition(e.to_string()))
}

fn spectrum_cmd(cfg: &RunConfig, out: &Output) -> cubic_weil::Result<i32> {
    let clock = Clock::start();
    let space = space_of(cfg)?;
    let a = gauge_of(cfg)?;
    let da = couple(&space, &build_dirac(&space), &a)?;
    let opts = SpectrumOptions { dense_threshold: cfg.dense_threshold, ..SpectrumOptions::default() };
    let report = spectrum(&da, Some(&a), &opts)?;
    let (mu, from) = match &a.mu {
        Some(m) => (m.clone(), "diagonal"),
        None => (gauge_diagonalize(&a)?.mu, "gauge_diagonalized"),
    };
    let predicted = predicted_spectrum(&space, &mu)?.values();
    let (eigs, squared_input, quantity) = match &report.eigenvalues {
        Some(v) => (v.clone(), false, "eigenvalue of D_A"),
        None => (report.squared.clone(), true, "eigenvalue of D_A^2"),
    };
    let rows = spectrum_rows(&eigs, squared_input, Some(&predicted));
    let max_delta = rows.iter().filter_map(|r| r.delta).fold(None, |m: Option<f64>, d| Some(m.map_or(d, |m| m.max(d))));
    let near_zero_count = (!squared_input).then(|| {
        let tau = cfg.tolerances.kernel_tau_rel * (1.0 + eigs.iter().fold(0.0f64, |m, e| m.max(e.abs())));
        eigs.iter().filter(|e| e.abs() < tau).count()
    });
    let tolerance = cfg.tolerances.spectrum_match;
    let code = pass_code(max_delta.is_none_or(|d| d <= tolerance));
    out.say(format!(
        "spectrum: dim {} via {}, min |eigenvalue| {:.6e}, max delta {}",
        report.dim,
        report.method,
        report.min_abs,
        max_delta.map_or("n/a".into(), |d| format!("{d:.3e}"))
    ));
    out.write_text("spectrum.csv", &spectrum_csv(&rows))?;
    let body = SpectrumBody {
        quantity,
        predicted_from: Some(from),
        predicted_mu: Some(mu),
        max_delta,
        tolerance,
        near_zero_count,
        report,
        rows,
    };
    out.write("spectrum.json", &document(Command::Spectrum, cfg, code, DEFAULT_PATTERN, body, clock))?;
    Ok(code)
}

#[derive(Clone, Debug, Serialize)]
pub struct KernelBody {
    pub kernel: KernelReport,
    pub isotropy: IsotropyReport,
}

fn kernel_cmd(cfg: &RunConfig, out: &Output) -> cubic_weil::Result<i32> {
    let clock = Clock::start();
    let space = space_of(cfg)?;
    let a = gauge_of(cfg)?;
    let k = kernel(&space, &build_dirac(&space), &a, &kernel_options(cfg, cfg.dense_threshold))?;
    let mu = match (&a.mu, &k.gauge) {
        (Some(m), _) => m.clone(),
        (None, Some(g)) => g.mu.clone(),
        (None, None) => gauge_diagonalize(&a)?.mu,
    };
    let iso = isotropy(space.trunc(), &mu, ISOTROPY_TOL)?;
    let code = pass_code(!k.ambiguous);
    out.say(format!(
        "kernel: dim {} ({} summands, {}), gap {:.3e}; isotropy: {}",
        k.dim, k.summands, k.method, k.gap, iso.summary
    ));
    let body = KernelBody { kernel: k, isotropy: iso };
    out.write("kernel.json", &document(Command::Kernel, cfg, code, DEFAULT_PATTERN, body, clock))?;
    Ok(code)
}

#[derive(Clone, Debug, Serialize)]
pub struct CocycleBody {
    pub checks: VerifyReport,
    pub summary: GroupoidSummary,
}

fn cocycle_cmd(cfg: &RunConfig, out: &Output) -> cubic_weil::Result<i32> {
    let clock = Clock::start();
    let mut rng = suite_rng(cfg.seed, COCYCLE_STREAM);
    let opts = GroupoidSuiteOptions { quadrature: cfg.quadrature_order, ..GroupoidSuiteOptions::default() };
    let (checks, summary) = check_groupoid(cfg.trunc(), &opts, &mut rng)?;
    let code = pass_code(checks.passed());
    print_checks(out, &checks);
    let pattern = summary.convention.clone();
    let body = CocycleBody { checks, summary };
    out.write("cocycle.json", &document(Command::Cocycle, cfg, code, &pattern, body, clock))?;
    Ok(code)
}

#[derive(Clone, Debug, Serialize)]
pub struct ExtensionBody {
    pub checks: VerifyReport,
    /// Rows at levels 1, 2 and the configured level; target `½ k tr X[D,Y]`.
    pub bch_table: Vec<BchEstimate>,
}

fn bch_levels(k: i64) -> Vec<i64> {
    let mut v = vec![1, 2];
    if k > 2 {
        v.push(k);
    }
    v
}

fn extension_cmd(cfg: &RunConfig, out: &Output) -> cubic_weil::Result<i32> {
    let clock = Clock::start();
    let mut rng = suite_rng(cfg.seed, EXTENSION_STREAM);
    let mut checks = check_extension(cfg.trunc(), EXTENSION_SAMPLES, BCH_PAIRS, &mut rng)?;
    let t = Truncation::new(cfg.n.max(2))?;
    let mut table = Vec::new();
    for level in bch_levels(cfg.k) {
        for _ in 0..BCH_PAIRS {
            let mut pair =
                || LieMatrix::new(t, Role::Algebra, random_skew_hermitian::<f64, _>(t.dim(), BCH_PAIR_NORM, &mut rng));
            let (x, y) = (pair()?, pair()?);
            table.push(bch_phase_check(&x, &y, &DEFAULT_BCH_STEPS, level)?);
        }
    }
    let worst = table.iter().fold(0.0f64, |m, r| m.max(r.relative_error));
    checks.record("extension.bch_table", worst, BCH_REL_TOL);
    let code = pass_code(checks.passed());
    print_checks(out, &checks);
    let body = ExtensionBody { checks, bch_table: table };
    out.write("extension.json", &document(Command::Extension, cfg, code, DEFAULT_PATTERN, body, clock))?;
    Ok(code)
}
