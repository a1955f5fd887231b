//! Experiment configuration: the JSON schema and its validation.

use std::path::PathBuf;

use gradcs::basis1d::{BasisFamily, Density};
use gradcs::index_sets::hyperbolic_cross;
use gradcs::measurement::SamplingMode;
use gradcs::recovery::TestFunction;
use gradcs::solver::SolverConfig;
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

/// Points in the default cost grid.
pub const DEFAULT_GRID_POINTS: usize = 8;

/// One sweep: every mode × θ × cost × trial.
///
/// ```json
/// {
///   "schema_version": 1,
///   "function": "f3",
///   "family": "legendre",
///   "density": "match",
///   "d": 4,
///   "s": 10,
///   "modes": ["unaugmented", "full", "fractional:0.5"],
///   "thetas": [1.0],
///   "costs": [40, 80, 160],
///   "trials": 10,
///   "seed": 1,
///   "eta": 1e-12
/// }
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    /// `f1`, `f2` or `f3`.
    pub function: String,
    /// `legendre`, `chebyshev` or `jacobi(a,b)`.
    pub family: String,
    /// `match`, `chebyshev` or `uniform`.
    #[serde(default = "default_density")]
    pub density: String,
    pub d: usize,
    pub s: usize,
    /// `unaugmented`, `full`, `independent` or `fractional:<p>`.
    pub modes: Vec<String>,
    #[serde(default = "default_thetas")]
    pub thetas: Vec<f64>,
    /// Target costs `m̃`; geometric in `[N/4, 4N]` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub costs: Option<Vec<usize>>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_eta")]
    pub eta: f64,
    /// Error-grid size; `4|Λ|` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_size: Option<usize>,
    #[serde(default, skip_serializing_if = "SolverOverrides::is_empty")]
    pub solver: SolverOverrides,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iterations: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub feasibility_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optimality_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub root_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polish: Option<bool>,
}

impl SolverOverrides {
    fn is_empty(&self) -> bool {
        *self == SolverOverrides::default()
    }

    pub fn apply(&self, base: SolverConfig) -> SolverConfig {
        SolverConfig {
            max_iterations: self.max_iterations.unwrap_or(base.max_iterations),
            feasibility_tol: self.feasibility_tol.unwrap_or(base.feasibility_tol),
            optimality_tol: self.optimality_tol.unwrap_or(base.optimality_tol),
            root_tol: self.root_tol.unwrap_or(base.root_tol),
            polish: self.polish.unwrap_or(base.polish),
        }
    }
}

fn default_density() -> String {
    "match".into()
}

fn default_thetas() -> Vec<f64> {
    vec![1.0]
}

fn default_trials() -> usize {
    10
}

fn default_eta() -> f64 {
    gradcs::recovery::DEFAULT_ETA
}

/// A validated configuration with every string resolved.
#[derive(Debug, Clone)]
pub struct Plan {
    pub config: ExperimentConfig,
    pub function: TestFunction,
    pub family: BasisFamily,
    pub density: Density,
    pub modes: Vec<SamplingMode>,
    /// `N = |Λ|`.
    pub n: usize,
    pub costs: Vec<usize>,
    pub grid_size: usize,
    pub solver: SolverConfig,
}

impl ExperimentConfig {
    /// Parses JSON text; syntax and type errors carry the offending line.
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config {
            line: Some(e.line()),
            msg: e.to_string(),
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Checks every field and resolves names. `source` is the original text,
    /// used to point diagnostics at the line holding the offending key.
    pub fn resolve(&self, source: Option<&str>) -> Result<Plan, CliError> {
        let fail = |key: &str, msg: String| CliError::Config {
            line: source.and_then(|t| key_line(t, key)),
            msg: format!("{key}: {msg}"),
        };
        if self.schema_version != SCHEMA_VERSION {
            return Err(fail(
                "schema_version",
                format!("expected {SCHEMA_VERSION}, found {}", self.schema_version),
            ));
        }
        let function: TestFunction = self
            .function
            .parse()
            .map_err(|e| fail("function", format!("{e}")))?;
        let family: BasisFamily = self
            .family
            .parse()
            .map_err(|e| fail("family", format!("{e}")))?;
        if family.is_fourier() {
            return Err(fail(
                "family",
                "experiments use real Jacobi families; fourier is not supported".into(),
            ));
        }
        let density: Density = self
            .density
            .parse()
            .map_err(|e| fail("density", format!("{e}")))?;
        if self.d == 0 {
            return Err(fail("d", "must be at least 1".into()));
        }
        if function == TestFunction::F2 && !self.d.is_multiple_of(2) {
            return Err(fail("d", format!("f2 needs an even dimension, got {}", self.d)));
        }
        if self.s == 0 {
            return Err(fail("s", "must be at least 1".into()));
        }
        let n = hyperbolic_cross(self.d, self.s)
            .map_err(|e| fail("s", format!("{e}")))?
            .len();
        if self.modes.is_empty() {
            return Err(fail("modes", "at least one sampling mode is required".into()));
        }
        let modes = self
            .modes
            .iter()
            .map(|m| m.parse::<SamplingMode>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| fail("modes", format!("{e}")))?;
        if self.thetas.is_empty() {
            return Err(fail("thetas", "at least one θ is required".into()));
        }
        if let Some(bad) = self.thetas.iter().find(|t| !t.is_finite()) {
            return Err(fail("thetas", format!("θ must be finite, got {bad}")));
        }
        let costs = match &self.costs {
            Some(c) if c.is_empty() => return Err(fail("costs", "empty cost grid".into())),
            Some(c) => c.clone(),
            None => default_costs(n),
        };
        for &cost in &costs {
            for mode in &modes {
                if samples_for_cost(*mode, cost).is_none() {
                    return Err(fail(
                        "costs",
                        format!("cost {cost} buys no sample point in mode {}", mode.label()),
                    ));
                }
            }
        }
        if self.trials == 0 {
            return Err(fail("trials", "must be at least 1".into()));
        }
        if !(self.eta >= 0.0 && self.eta.is_finite()) {
            return Err(fail("eta", format!("must be finite and nonnegative, got {}", self.eta)));
        }
        let grid_size = self.grid_size.unwrap_or(4 * n);
        if grid_size == 0 {
            return Err(fail("grid_size", "must be at least 1".into()));
        }
        let solver = self.solver.apply(SolverConfig::default());
        solver
            .validate()
            .map_err(|e| fail("solver", format!("{e}")))?;
        Ok(Plan {
            config: self.clone(),
            function,
            family,
            density,
            modes,
            n,
            costs,
            grid_size,
            solver,
        })
    }
}

/// First line (1-based) holding `"key"`.
fn key_line(text: &str, key: &str) -> Option<usize> {
    let needle = format!("\"{key}\"");
    text.lines().position(|l| l.contains(&needle)).map(|i| i + 1)
}

/// `DEFAULT_GRID_POINTS` costs spaced geometrically over `[N/4, 4N]`, rounded
/// to even numbers so every mode can spend them exactly.
pub fn default_costs(n: usize) -> Vec<usize> {
    let lo = (n as f64 / 4.0).max(2.0);
    let hi = (4 * n) as f64;
    let k = DEFAULT_GRID_POINTS;
    let mut out: Vec<usize> = (0..k)
        .map(|i| {
            let c = lo * (hi / lo).powf(i as f64 / (k - 1) as f64);
            (2.0 * (c / 2.0).round()).max(2.0) as usize
        })
        .collect();
    out.dedup();
    out
}

/// Largest number of points `m` with `m + m_g(m) ≤ cost`, if any.
pub fn samples_for_cost(mode: SamplingMode, cost: usize) -> Option<usize> {
    // m + m_g(m) is nondecreasing in m, so search down from the upper end
    let mut m = cost;
    while m >= 1 {
        if m + mode.gradient_count(m) <= cost {
            return Some(m);
        }
        m -= 1;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal() -> &'static str {
        r#"{
  "schema_version": 1,
  "function": "f3",
  "family": "legendre",
  "d": 2,
  "s": 3,
  "modes": ["full"],
  "costs": [16],
  "trials": 1
}"#
    }

    #[test]
    fn defaults_fill_in() {
        let cfg = ExperimentConfig::from_json(minimal()).unwrap();
        assert_eq!(cfg.density, "match");
        assert_eq!(cfg.thetas, vec![1.0]);
        assert_eq!(cfg.eta, 1e-12);
        let plan = cfg.resolve(None).unwrap();
        assert_eq!(plan.n, 8);
        assert_eq!(plan.grid_size, 32);
    }

    #[test]
    fn bad_field_points_at_its_line() {
        let text = minimal().replace("\"f3\"", "\"f9\"");
        let cfg = ExperimentConfig::from_json(&text).unwrap();
        match cfg.resolve(Some(&text)) {
            Err(CliError::Config { line, msg }) => {
                assert_eq!(line, Some(3));
                assert!(msg.starts_with("function"));
            }
            other => panic!("unexpected {other:?}"),
        }
        let broken = minimal().replace("\"d\": 2,", "\"d\": two,");
        match ExperimentConfig::from_json(&broken) {
            Err(CliError::Config { line, .. }) => assert_eq!(line, Some(5)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_keys_rejected() {
        let text = minimal().replace("\"trials\": 1", "\"trials\": 1, \"colour\": 3");
        assert!(ExperimentConfig::from_json(&text).is_err());
    }

    #[test]
    fn cost_splitting() {
        assert_eq!(samples_for_cost(SamplingMode::Unaugmented, 7), Some(7));
        assert_eq!(samples_for_cost(SamplingMode::FullGradient, 7), Some(3));
        assert_eq!(samples_for_cost(SamplingMode::FullGradient, 1), None);
        // m + ⌈m/4⌉ ≤ 20 → m = 16
        assert_eq!(samples_for_cost(SamplingMode::FractionalGradient(0.25), 20), Some(16));
    }

    #[test]
    fn default_grid_spans_quarter_to_four_n() {
        let g = default_costs(100);
        assert_eq!(g.len(), 8);
        assert_eq!((g[0], g[7]), (26, 400));
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert!(g.iter().all(|c| c % 2 == 0));
    }
}
