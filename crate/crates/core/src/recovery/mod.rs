//! End-to-end recovery: sample, assemble, solve weighted BPDN, rescale.

mod approximant;
mod complexity;
mod functions;
mod metrics;

use crate::basis1d::{BasisFamily, Density};
use crate::error::{Error, Result};
use crate::index_sets::{hyperbolic_cross, intrinsic_weights, IndexSet};
use crate::measurement::{
    assemble, q_scaling, sample_points, AssemblyOptions, SampleOracle, SamplingMode,
};
use crate::rng::derive_seed;
use crate::solver::{solve_bpdn, BpdnProblem, SolverConfig, SolverStatus};

pub use approximant::Approximant;
pub use complexity::{
    sample_complexity_estimate, ComplexityEstimate, ComplexityQuery, ComplexitySetting,
};
pub use functions::{f1_peak, test_function, FunctionOracle, TestFunction, GRADIENT_CHECK_TOL};
pub use metrics::{
    error_report, h1_error, h1_error_estimate, h1_error_on, linf_error, linf_error_on,
    ErrorReport, Estimate,
};

/// Default residual bound used in the experiments.
pub const DEFAULT_ETA: f64 = 1e-12;

/// Bookkeeping from one recovery.
#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryDiagnostics {
    /// Function samples `m_o`.
    pub function_samples: usize,
    /// Gradient samples `m_g`.
    pub gradient_samples: usize,
    /// `m̃ = m_o + m_g`.
    pub cost: usize,
    pub rows: usize,
    pub status: SolverStatus,
    pub iterations: usize,
    pub residual_norm: f64,
    /// `‖ẑ‖_{1,w}`.
    pub objective: f64,
    pub points_seed: u64,
}

/// The parts of a recovery that do not depend on the samples: `Λ`, the
/// weights `w_n = max(u_n^θ, 1)` and `Q`.
#[derive(Debug, Clone)]
pub struct RecoverySetup {
    pub family: BasisFamily,
    pub mu: Density,
    pub index_set: IndexSet,
    pub weights: Vec<f64>,
    pub q: Vec<f64>,
    pub theta: f64,
}

impl RecoverySetup {
    /// `Λ = hyperbolic_cross(d, s)`.
    pub fn new(family: BasisFamily, mu: Density, d: usize, s: usize, theta: f64) -> Result<Self> {
        if s == 0 {
            return Err(Error::Domain("s must be at least 1".into()));
        }
        Self::with_index_set(family, mu, hyperbolic_cross(d, s)?, theta)
    }

    pub fn with_index_set(
        family: BasisFamily,
        mu: Density,
        index_set: IndexSet,
        theta: f64,
    ) -> Result<Self> {
        family.validate()?;
        if family.is_fourier() {
            return Err(Error::Unsupported(
                "recovery of real targets covers the Jacobi families only".into(),
            ));
        }
        if !theta.is_finite() {
            return Err(Error::Domain(format!("θ must be finite, got {theta}")));
        }
        let u = intrinsic_weights(&family, &mu, &index_set)?.to_vec(&index_set)?;
        let weights = u.iter().map(|&v| v.powf(theta).max(1.0)).collect();
        let q = q_scaling(&family, &index_set);
        Ok(RecoverySetup {
            family,
            mu,
            index_set,
            weights,
            q,
            theta,
        })
    }

    pub fn len(&self) -> usize {
        self.index_set.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index_set.is_empty()
    }

    /// Samples `m` points (seeded from `seed`), solves and returns
    /// `f̂ = Σ x̂_n φ_n` with `x̂ = Q⁻¹ẑ`.
    pub fn recover(
        &self,
        oracle: &dyn SampleOracle<f64>,
        m: usize,
        mode: SamplingMode,
        eta: f64,
        seed: u64,
        solver: &SolverConfig,
    ) -> Result<(Approximant, RecoveryDiagnostics)> {
        if m == 0 {
            return Err(Error::Domain("m must be at least 1".into()));
        }
        mode.validate()?;
        let d = self.index_set.dim();
        let points_seed = derive_seed(seed, "recovery-points", 0);
        let points = sample_points(&self.family, &self.mu, d, m, points_seed)?;
        let ens = assemble::<f64>(
            &self.index_set,
            &points,
            oracle,
            mode,
            &AssemblyOptions::default(),
        )?;
        let problem = BpdnProblem::new(&ens.matrix, &ens.rhs, &self.weights, eta)?;
        let sol = solve_bpdn(&problem, solver)?;
        let x: Vec<f64> = sol.z.iter().zip(&ens.q).map(|(z, q)| z / q).collect();
        let approx = Approximant::new(self.family, self.index_set.clone(), x)?;
        let diag = RecoveryDiagnostics {
            function_samples: ens.function_samples,
            gradient_samples: ens.gradient_samples,
            cost: ens.cost(),
            rows: ens.rows(),
            status: sol.status,
            iterations: sol.iterations,
            residual_norm: sol.residual_norm,
            objective: crate::solver::weighted_l1_norm(sol.z.as_slice(), &self.weights),
            points_seed,
        };
        Ok((approx, diag))
    }
}

/// One-shot recovery with default solver settings.
#[allow(clippy::too_many_arguments)]
pub fn recover(
    oracle: &dyn SampleOracle<f64>,
    family: BasisFamily,
    mu: Density,
    d: usize,
    s: usize,
    m: usize,
    mode: SamplingMode,
    theta: f64,
    eta: f64,
    seed: u64,
) -> Result<(Approximant, RecoveryDiagnostics)> {
    RecoverySetup::new(family, mu, d, s, theta)?.recover(
        oracle,
        m,
        mode,
        eta,
        seed,
        &SolverConfig::default(),
    )
}

/// `‖x̂ − x‖₂` for target coefficients `x` aligned with the approximant's index set.
pub fn coefficient_error(approx: &Approximant, target: &[f64]) -> f64 {
    approx
        .coefficients()
        .iter()
        .zip(target)
        .map(|(a, b)| (a - b).powi(2))
        .sum::<f64>()
        .sqrt()
}
