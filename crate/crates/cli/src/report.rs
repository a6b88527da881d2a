//! Versioned JSON reports. Every field except `timestamp` is a function of the configuration.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use cubic_weil::report::{Check, VerifyReport};
use serde::Serialize;

use crate::config::RunConfig;

pub const SCHEMA: u32 = 1;

/// Conventions needed to read the numbers without the code.
#[derive(Clone, Debug, Serialize)]
pub struct ConventionPins {
    pub gamma00_phase: &'static str,
    pub lundberg_ratio: &'static str,
    pub cocycle_sign_pattern: String,
    pub dirac_square_closed_form: &'static str,
    pub group_representation: &'static str,
    pub bch_phase: &'static str,
    pub product_basis_order: &'static str,
}

impl ConventionPins {
    pub fn new(cocycle_sign_pattern: impl Into<String>) -> Self {
        Self {
            gamma00_phase: cubic_weil::spinrep::GAMMA00_PHASE,
            lundberg_ratio: "omega_L = -1/2 tr(ad_X [eps, ad_Y]) = 2 tr X[D,Y]; 1/4 tr(eps [eps, ad_X] [eps, ad_Y]) = -omega_L; tr(ad_X [eps, ad_Y]) = -2 omega_L",
            cocycle_sign_pattern: cocycle_sign_pattern.into(),
            dirac_square_closed_form: "level_corrected: sum :rho(e_ij) rho(e_ji): + (k+1) sum_ij i :gamma_ij gamma_ji:",
            group_representation: "T(X) = sum conj(X_ij) t_ij, g = exp(T(X)) acting against A^g = g^-1 A g + g^-1 [D,g]",
            bch_phase: "c(t) = i (arg phase(psi(e^tX) psi(e^tY)) - arg phase(psi(e^tX e^tY)))",
            product_basis_order: "module index major, Fock index minor",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteResult {
    pub name: String,
    pub status: Status,
    /// Deviation of the check with the largest deviation-to-tolerance ratio.
    pub max_deviation: f64,
    pub tolerance: f64,
    pub worst_check: Option<String>,
    pub error: Option<String>,
    pub checks: Vec<Check>,
}

impl SuiteResult {
    pub fn from_checks(name: &str, report: VerifyReport) -> Self {
        let worst = report.checks.iter().max_by(|a, b| ratio(a).total_cmp(&ratio(b))).cloned();
        Self {
            name: name.into(),
            status: if report.passed() { Status::Pass } else { Status::Fail },
            max_deviation: worst.as_ref().map_or(0.0, |c| c.max_deviation),
            tolerance: worst.as_ref().map_or(0.0, |c| c.tolerance),
            worst_check: worst.map(|c| c.name),
            error: None,
            checks: report.checks,
        }
    }

    pub fn from_error(name: &str, error: String) -> Self {
        Self {
            name: name.into(),
            status: Status::Error,
            max_deviation: f64::NAN,
            tolerance: f64::NAN,
            worst_check: None,
            error: Some(error),
            checks: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        matches!(self.status, Status::Pass)
    }
}

/// Deviation over tolerance; boolean checks (tolerance 0) map to 0 or infinity.
fn ratio(c: &Check) -> f64 {
    if c.tolerance > 0.0 {
        c.max_deviation / c.tolerance
    } else if c.max_deviation > 0.0 {
        f64::INFINITY
    } else {
        0.0
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Timestamp {
    pub unix_seconds: u64,
    pub wall_time_s: f64,
    pub phase_wall_time_s: BTreeMap<String, f64>,
}

/// Wall-clock bookkeeping, kept apart from the deterministic body.
#[derive(Debug)]
pub struct Clock {
    start: Instant,
    unix: u64,
    phases: BTreeMap<String, f64>,
}

impl Clock {
    pub fn start() -> Self {
        let unix = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
        Self { start: Instant::now(), unix, phases: BTreeMap::new() }
    }

    pub fn time<T>(&mut self, name: &str, f: impl FnOnce() -> T) -> T {
        let t = Instant::now();
        let out = f();
        self.phases.insert(name.to_string(), t.elapsed().as_secs_f64());
        out
    }

    pub fn finish(self) -> Timestamp {
        Timestamp {
            unix_seconds: self.unix,
            wall_time_s: self.start.elapsed().as_secs_f64(),
            phase_wall_time_s: self.phases,
        }
    }
}

/// Top-level document; `timestamp` is serialized last.
#[derive(Clone, Debug, Serialize)]
pub struct Document<T: Serialize> {
    pub schema: u32,
    pub command: String,
    pub passed: bool,
    pub exit_code: i32,
    pub config: RunConfig,
    pub conventions: ConventionPins,
    pub body: T,
    pub timestamp: Timestamp,
}

pub fn write_json<T: Serialize>(dir: &Path, name: &str, doc: &T) -> std::io::Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    let mut text = serde_json::to_string_pretty(doc).map_err(std::io::Error::other)?;
    text.push('\n');
    std::fs::write(&path, text)?;
    Ok(path)
}

/// 17 significant digits.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}
