//! Run configuration: a single JSON file, overridden by command-line flags, validated before use.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use cubic_weil::dirac::GaugeField;
use cubic_weil::hwmodule::{check_dominance, Weight};
use cubic_weil::liealg::Truncation;
use cubic_weil::spinrep::MAX_SPIN_N;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("cannot parse config {path}: {source}")]
    Parse { path: PathBuf, source: serde_json::Error },
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GaugeSpec {
    Zero,
    /// `μ` in window order `-N..N`.
    Diagonal {
        values: Vec<f64>,
    },
    /// Random Hermitian with Frobenius norm `scale`.
    Random {
        seed: u64,
        scale: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Kernel threshold `τ = kernel_tau_rel (1 + max |e|)`.
    pub kernel_tau_rel: f64,
    /// Grouping tolerance of `t_ii` expectation vectors.
    pub weight_tol: f64,
    /// Predicted against computed `D_A²` eigenvalues.
    pub spectrum_match: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { kernel_tau_rel: 1e-8, weight_tol: 1e-6, spectrum_match: 1e-8 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputPaths {
    pub dir: PathBuf,
}

impl Default for OutputPaths {
    fn default() -> Self {
        Self { dir: PathBuf::from("out") }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub n: usize,
    pub k: i64,
    /// Nonzero entries of `λ` by window index; missing indices are 0.
    pub lambda: BTreeMap<i64, i64>,
    pub gauge: GaugeSpec,
    /// Largest dimension handled by dense diagonalization.
    pub dense_threshold: usize,
    pub module_dim_cap: usize,
    /// Random probes per identity when the space is above `dense_threshold`.
    pub probes: usize,
    pub tolerances: Tolerances,
    pub quadrature_order: usize,
    pub seed: u64,
    pub output: OutputPaths,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            n: 1,
            k: 1,
            lambda: BTreeMap::new(),
            gauge: GaugeSpec::Zero,
            dense_threshold: 4096,
            module_dim_cap: 100_000,
            probes: 3,
            tolerances: Tolerances::default(),
            quadrature_order: 12,
            seed: 1,
            output: OutputPaths::default(),
        }
    }
}

/// Values given on the command line; `None` keeps the file value.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub n: Option<usize>,
    pub k: Option<i64>,
}

impl RunConfig {
    pub fn load(path: Option<&Path>, overrides: &Overrides) -> Result<Self, ConfigError> {
        let mut cfg = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|source| ConfigError::Io { path: p.into(), source })?;
                serde_json::from_str(&text).map_err(|source| ConfigError::Parse { path: p.into(), source })?
            }
            None => RunConfig::default(),
        };
        if let Some(s) = overrides.seed {
            cfg.seed = s;
        }
        if let Some(o) = &overrides.out {
            cfg.output.dir = o.clone();
        }
        if let Some(n) = overrides.n {
            cfg.n = n;
        }
        if let Some(k) = overrides.k {
            cfg.k = k;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: String| Err(ConfigError::Invalid(m));
        if self.n == 0 || self.n > MAX_SPIN_N {
            return bad(format!("n must be in 1..={MAX_SPIN_N}, got {}", self.n));
        }
        if self.k < 0 {
            return bad(format!("level k must be non-negative, got {}", self.k));
        }
        let t = self.trunc();
        if let Some(i) = self.lambda.keys().find(|i| !t.contains(**i)) {
            return bad(format!("lambda index {i} outside window [-{0},{0}]", self.n));
        }
        let w = self.weight()?;
        let dom = check_dominance(&w);
        if let Some(v) = dom.violations.first() {
            return bad(format!(
                "lambda is not dominant at ({},{}): lambda_i - lambda_j - k(i-j) = {}",
                v.i, v.j, v.value
            ));
        }
        match &self.gauge {
            GaugeSpec::Zero => {}
            GaugeSpec::Diagonal { values } => {
                if values.len() != t.dim() {
                    return bad(format!("gauge has {} values, window needs {}", values.len(), t.dim()));
                }
                if values.iter().any(|x| !x.is_finite()) {
                    return bad("gauge values must be finite".into());
                }
            }
            GaugeSpec::Random { scale, .. } => {
                if !(scale.is_finite() && *scale >= 0.0) {
                    return bad(format!("gauge scale must be finite and non-negative, got {scale}"));
                }
            }
        }
        if self.probes == 0 {
            return bad("probes must be positive".into());
        }
        if self.quadrature_order == 0 || self.quadrature_order > 64 {
            return bad(format!("quadrature_order must be in 1..=64, got {}", self.quadrature_order));
        }
        let tol = &self.tolerances;
        for (name, v) in [
            ("kernel_tau_rel", tol.kernel_tau_rel),
            ("weight_tol", tol.weight_tol),
            ("spectrum_match", tol.spectrum_match),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return bad(format!("tolerance {name} must be positive, got {v}"));
            }
        }
        Ok(())
    }

    pub fn trunc(&self) -> Truncation {
        Truncation::new(self.n).expect("validated n")
    }

    pub fn lambda_vec(&self) -> Vec<i64> {
        self.trunc().labels().map(|i| self.lambda.get(&i).copied().unwrap_or(0)).collect()
    }

    pub fn weight(&self) -> Result<Weight, ConfigError> {
        Weight::new(self.trunc(), self.lambda_vec(), self.k).map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    pub fn gauge_field(&self) -> Result<GaugeField, ConfigError> {
        let t = self.trunc();
        match &self.gauge {
            GaugeSpec::Zero => Ok(GaugeField::zero(t)),
            GaugeSpec::Diagonal { values } => {
                GaugeField::diagonal(t, values).map_err(|e| ConfigError::Invalid(e.to_string()))
            }
            GaugeSpec::Random { seed, scale } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                Ok(GaugeField::random(t, *scale, &mut rng))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        let c = RunConfig::default();
        c.validate().unwrap();
        assert_eq!(c.lambda_vec(), vec![0, 0, 0]);
    }

    #[test]
    fn parses_sparse_lambda_and_gauge() {
        let c: RunConfig =
            serde_json::from_str(r#"{"lambda": {"1": -1}, "gauge": {"kind": "diagonal", "values": [0, 0, 0.5]}}"#)
                .unwrap();
        c.validate().unwrap();
        assert_eq!(c.lambda_vec(), vec![0, 0, -1]);
        assert_eq!(c.gauge_field().unwrap().mu, Some(vec![0.0, 0.0, 0.5]));
    }

    #[test]
    fn non_dominant_lambda_rejected() {
        let c: RunConfig = serde_json::from_str(r#"{"k": 0, "lambda": {"1": 1}}"#).unwrap();
        let e = c.validate().unwrap_err().to_string();
        assert!(e.contains("(0,1)"), "{e}");
    }

    #[test]
    fn unknown_keys_and_bad_values_rejected() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"nn": 1}"#).is_err());
        for bad in [r#"{"n": 0}"#, r#"{"n": 3}"#, r#"{"k": -1}"#, r#"{"lambda": {"5": 0}}"#, r#"{"probes": 0}"#] {
            let c: RunConfig = serde_json::from_str(bad).unwrap();
            assert!(c.validate().is_err(), "{bad}");
        }
        let c: RunConfig = serde_json::from_str(r#"{"gauge": {"kind": "diagonal", "values": [1.0]}}"#).unwrap();
        assert!(c.validate().is_err());
    }

    #[test]
    fn overrides_apply() {
        let o = Overrides { seed: Some(9), out: Some("x".into()), n: Some(2), k: Some(0) };
        let c = RunConfig::load(None, &o).unwrap();
        assert_eq!((c.seed, c.n, c.k), (9, 2, 0));
        assert_eq!(c.output.dir, PathBuf::from("x"));
    }

    #[test]
    fn repository_configs_load() {
        let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
        let mut seen = 0;
        for entry in std::fs::read_dir(&dir).unwrap() {
            let path = entry.unwrap().path();
            if path.extension().is_some_and(|e| e == "json") {
                RunConfig::load(Some(&path), &Overrides::default()).unwrap_or_else(|e| panic!("{e}"));
                seen += 1;
            }
        }
        assert!(seen >= 5);
        let d = RunConfig::load(Some(&dir.join("default.json")), &Overrides::default()).unwrap();
        assert_eq!(d, RunConfig::default());
    }
}
