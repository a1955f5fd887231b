//! Monte Carlo error estimates between a target and its approximant.

use rayon::prelude::*;

use crate::basis1d::Density;
use crate::error::{Error, Result};
use crate::measurement::{sample_points, tau_unchecked, SampleSet};

use super::approximant::Approximant;
use super::functions::FunctionOracle;

/// Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
}

/// Errors of one approximant, or the mean over several trials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorReport {
    pub h1_error: f64,
    pub linf_error: f64,
    pub grid_size: usize,
    pub seed: u64,
    pub trials: usize,
}

impl ErrorReport {
    /// Mean of per-trial reports; the seed is taken from the first.
    pub fn mean(reports: &[ErrorReport]) -> Option<ErrorReport> {
        let first = reports.first()?;
        let k = reports.len() as f64;
        Some(ErrorReport {
            h1_error: reports.iter().map(|r| r.h1_error).sum::<f64>() / k,
            linf_error: reports.iter().map(|r| r.linf_error).sum::<f64>() / k,
            grid_size: first.grid_size,
            seed: first.seed,
            trials: reports.iter().map(|r| r.trials).sum(),
        })
    }
}

fn check(oracle: &FunctionOracle, approx: &Approximant, grid_size: usize) -> Result<()> {
    if grid_size == 0 {
        return Err(Error::Domain("error grids need at least one point".into()));
    }
    if oracle.dim() != approx.dim() {
        return Err(Error::Dimension(format!(
            "oracle has dimension {}, approximant {}",
            oracle.dim(),
            approx.dim()
        )));
    }
    Ok(())
}

/// `‖f − f̂‖_{H̃¹}` estimated from `grid_size` points drawn from `μ`.
///
/// Each point contributes `Σ_{k=0..d} τ_k(y)|∂_k(f − f̂)(y)|²` (with `∂_0` the
/// identity), whose expectation under `μ` is the squared norm. The standard
/// error follows from the delta method.
pub fn h1_error_estimate(
    oracle: &FunctionOracle,
    approx: &Approximant,
    mu: &Density,
    grid_size: usize,
    seed: u64,
) -> Result<Estimate> {
    check(oracle, approx, grid_size)?;
    let points = sample_points(approx.family(), mu, approx.dim(), grid_size, seed)?;
    h1_error_on(oracle, approx, &points)
}

/// Point estimate of [`h1_error_estimate`].
pub fn h1_error(
    oracle: &FunctionOracle,
    approx: &Approximant,
    mu: &Density,
    grid_size: usize,
    seed: u64,
) -> Result<f64> {
    h1_error_estimate(oracle, approx, mu, grid_size, seed).map(|e| e.value)
}

/// [`h1_error_estimate`] on a given point set, weighted by its density.
pub fn h1_error_on(
    oracle: &FunctionOracle,
    approx: &Approximant,
    points: &SampleSet,
) -> Result<Estimate> {
    check(oracle, approx, points.len())?;
    let family = *approx.family();
    let mu = points.density;
    let d = approx.dim();
    let terms = (0..points.len())
        .into_par_iter()
        .map(|i| {
            let y = points.point(i);
            let mut gf = vec![0.0; d];
            let mut ga = vec![0.0; d];
            oracle.eval_gradient(y, &mut gf);
            let diff0 = oracle.eval(y) - approx.value_and_gradient(y, &mut ga)?;
            let mut t = tau_unchecked(&family, &mu, y, 0) * diff0 * diff0;
            for k in 0..d {
                let dk = gf[k] - ga[k];
                t += tau_unchecked(&family, &mu, y, k + 1) * dk * dk;
            }
            Ok(t)
        })
        .collect::<Result<Vec<f64>>>()?;
    let m = terms.len() as f64;
    let mean = terms.iter().sum::<f64>() / m;
    let var = if terms.len() > 1 {
        terms.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / (m - 1.0)
    } else {
        0.0
    };
    let value = mean.sqrt();
    // se(√X̄) ≈ se(X̄) / (2√X̄)
    let std_error = if value > 0.0 {
        (var / m).sqrt() / (2.0 * value)
    } else {
        0.0
    };
    Ok(Estimate { value, std_error })
}

/// `max_i |f(y_i) − f̂(y_i)|` over `grid_size` uniform random points.
///
/// Grids for the same seed are nested: a larger grid extends a smaller one,
/// so the estimate never decreases with `grid_size`.
pub fn linf_error(
    oracle: &FunctionOracle,
    approx: &Approximant,
    grid_size: usize,
    seed: u64,
) -> Result<f64> {
    check(oracle, approx, grid_size)?;
    let points = sample_points(approx.family(), &Density::Uniform, approx.dim(), grid_size, seed)?;
    linf_error_on(oracle, approx, &points)
}

pub fn linf_error_on(
    oracle: &FunctionOracle,
    approx: &Approximant,
    points: &SampleSet,
) -> Result<f64> {
    check(oracle, approx, points.len())?;
    let devs = (0..points.len())
        .into_par_iter()
        .map(|i| {
            let y = points.point(i);
            Ok((oracle.eval(y) - approx.value(y)?).abs())
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(devs.into_iter().fold(0.0, f64::max))
}

/// Both errors on grids of `grid_size` points: `μ`-distributed for H̃¹ and
/// uniform for L∞.
pub fn error_report(
    oracle: &FunctionOracle,
    approx: &Approximant,
    mu: &Density,
    grid_size: usize,
    seed: u64,
) -> Result<ErrorReport> {
    Ok(ErrorReport {
        h1_error: h1_error(oracle, approx, mu, grid_size, seed)?,
        linf_error: linf_error(oracle, approx, grid_size, seed)?,
        grid_size,
        seed,
        trials: 1,
    })
}
