//! Weighted ℓ¹ basis pursuit denoising,
//! `min ‖z‖_{1,w} s.t. ‖Az − y‖₂ ≤ η`.
//!
//! [`solve_bpdn`] runs Newton's method on the Pareto curve
//! `φ(τ) = ‖A z_τ − y‖₂ − η`, where `z_τ` solves the weighted LASSO over the
//! ball `‖z‖_{1,w} ≤ τ` (see [`solve_weighted_lasso`]). Since
//! `φ'(τ) = −‖A* r‖_* / ‖r‖` with `‖·‖_*` the weighted dual norm, each Newton
//! step costs one LASSO solve, warm-started from the previous one. Once the
//! root is bracketed closely, an active-set step solves the optimality system
//! on the identified support exactly.

mod projection;
mod spg;

use std::collections::HashSet;
use std::io::Write;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub use projection::{project_weighted_l1_ball, weighted_dual_norm, weighted_l1_norm};

use spg::{real_dot, spg, Stop};

const MAX_PARETO_STEPS: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub max_iterations: usize,
    /// Relative to `max(1, ‖y‖)`.
    pub feasibility_tol: f64,
    /// Relative duality gap of the LASSO subproblems.
    pub optimality_tol: f64,
    /// Relative to `max(1, ‖y‖)`.
    pub root_tol: f64,
    /// Try the active-set refinement after root finding.
    pub polish: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_iterations: 10_000,
            feasibility_tol: 1e-9,
            optimality_tol: 1e-8,
            root_tol: 1e-8,
            polish: true,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("feasibility_tol", self.feasibility_tol),
            ("optimality_tol", self.optimality_tol),
            ("root_tol", self.root_tol),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Domain(format!("{name} must be positive, got {v}")));
            }
        }
        if self.max_iterations == 0 {
            return Err(Error::Domain("max_iterations must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct BpdnProblem<'a, T: Scalar> {
    pub a: &'a DMatrix<T>,
    pub y: &'a DVector<T>,
    pub w: &'a [f64],
    pub eta: f64,
}

impl<'a, T: Scalar> BpdnProblem<'a, T> {
    pub fn new(a: &'a DMatrix<T>, y: &'a DVector<T>, w: &'a [f64], eta: f64) -> Result<Self> {
        if a.nrows() != y.len() {
            return Err(Error::Dimension(format!(
                "matrix has {} rows but y has length {}",
                a.nrows(),
                y.len()
            )));
        }
        if a.ncols() != w.len() {
            return Err(Error::Dimension(format!(
                "matrix has {} columns but {} weights were given",
                a.ncols(),
                w.len()
            )));
        }
        if let Some(bad) = w.iter().find(|&&v| !(v >= 1.0 && v.is_finite())) {
            return Err(Error::Domain(format!(
                "weights must be finite and ≥ 1, got {bad}"
            )));
        }
        if !(eta >= 0.0 && eta.is_finite()) {
            return Err(Error::Domain(format!(
                "η must be finite and nonnegative, got {eta}"
            )));
        }
        Ok(Self { a, y, w, eta })
    }

    fn scale(&self) -> f64 {
        self.y.norm().max(1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverStatus {
    Optimal,
    IterationLimit,
    Infeasible,
}

impl SolverStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Optimal => "optimal",
            Self::IterationLimit => "iteration_limit",
            Self::Infeasible => "infeasible",
        }
    }
}

/// One Newton step on the Pareto curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParetoPoint {
    pub tau: f64,
    pub residual: f64,
    pub phi: f64,
    pub objective: f64,
    /// Cumulative SPG iterations after this subproblem.
    pub iterations: usize,
}

#[derive(Debug, Clone)]
pub struct SolverResult<T: Scalar> {
    pub z: DVector<T>,
    pub residual_norm: f64,
    pub objective: f64,
    pub iterations: usize,
    pub status: SolverStatus,
    pub polished: bool,
    pub trace: Vec<ParetoPoint>,
}

/// Writes the Pareto trace as `iteration,tau,residual,objective`.
pub fn write_trace_csv(trace: &[ParetoPoint], mut out: impl Write) -> Result<()> {
    writeln!(out, "iteration,tau,residual,objective")?;
    for p in trace {
        writeln!(
            out,
            "{},{:.17e},{:.17e},{:.17e}",
            p.iterations, p.tau, p.residual, p.objective
        )?;
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct LassoSolution<T: Scalar> {
    pub z: DVector<T>,
    pub residual_norm: f64,
    /// Duality gap relative to `½‖r‖²` (floored at `10⁻¹²·½‖y‖²`).
    pub relative_gap: f64,
    pub iterations: usize,
    pub status: SolverStatus,
}

/// `min ‖Az − y‖₂ s.t. ‖z‖_{1,w} ≤ τ` by spectral projected gradient, from
/// `z = 0`.
pub fn solve_weighted_lasso<T: Scalar>(
    a: &DMatrix<T>,
    y: &DVector<T>,
    w: &[f64],
    tau: f64,
    cfg: &SolverConfig,
) -> Result<LassoSolution<T>> {
    BpdnProblem::new(a, y, w, 0.0)?;
    cfg.validate()?;
    if !(tau >= 0.0 && tau.is_finite()) {
        return Err(Error::Domain(format!(
            "τ must be finite and nonnegative, got {tau}"
        )));
    }
    let out = spg(
        a,
        y,
        w,
        tau,
        DVector::zeros(a.ncols()),
        cfg.max_iterations,
        Stop {
            opt_tol: cfg.optimality_tol,
            eta: None,
            feas: None,
            loose: 0.0,
        },
    );
    Ok(LassoSolution {
        residual_norm: out.r.norm(),
        relative_gap: out.rel_gap,
        iterations: out.iterations,
        status: if out.converged {
            SolverStatus::Optimal
        } else {
            SolverStatus::IterationLimit
        },
        z: out.x,
    })
}

pub fn solve_bpdn<T: Scalar>(
    problem: &BpdnProblem<'_, T>,
    cfg: &SolverConfig,
) -> Result<SolverResult<T>> {
    cfg.validate()?;
    let BpdnProblem { a, y, w, eta } = *problem;
    let n = a.ncols();
    let ynorm = y.norm();
    let scale = problem.scale();
    let feas_abs = cfg.feasibility_tol * scale;
    let zero = |status| SolverResult {
        z: DVector::zeros(n),
        residual_norm: ynorm,
        objective: 0.0,
        iterations: 0,
        status,
        polished: false,
        trace: Vec::new(),
    };
    if ynorm <= eta {
        return Ok(zero(SolverStatus::Optimal));
    }
    // bound on |a_j* r| / w_j per unit residual, used to detect a vanishing slope
    let col_scale = (0..n)
        .map(|j| a.column(j).norm() / w[j])
        .fold(0.0, f64::max);
    if col_scale == 0.0 {
        return Ok(zero(SolverStatus::Infeasible));
    }

    let certify_tol = 100.0 * cfg.optimality_tol;
    // with η ≈ 0 every τ ≥ τ* has a zero residual, so φ cannot reveal an overshoot
    let flat_right = eta <= cfg.root_tol * scale;
    let mut tau = 0.0f64;
    let (mut lo, mut hi) = (0.0f64, f64::INFINITY);
    let mut x = DVector::zeros(n);
    let mut iterations = 0;
    let mut trace: Vec<ParetoPoint> = Vec::new();
    let mut root_found = false;
    let mut infeasible = false;
    let mut polished = false;
    // last iterate below the root with the dual lower bound on τ* it implies
    let mut below: Option<(DVector<T>, f64)> = None;
    let mut safe = false;
    let mut restarted = f64::NEG_INFINITY;
    let stop = |safe: bool| Stop {
        opt_tol: cfg.optimality_tol,
        eta: Some(eta),
        feas: flat_right.then_some(feas_abs),
        // careful steps need accurate slopes and bounds
        loose: if safe { 1e-3 } else { 0.1 },
    };
    // with η ≈ 0 a subproblem past the root converges sublinearly; cap each
    // one so the root finder can change course
    let step_budget = if flat_right {
        (cfg.max_iterations / 20).max(200)
    } else {
        usize::MAX
    };

    let mut steps = 0;
    while iterations < cfg.max_iterations && steps < MAX_PARETO_STEPS {
        steps += 1;
        let budget = step_budget.min(cfg.max_iterations - iterations);
        let out = spg(a, y, w, tau, x, budget, stop(safe));
        iterations += out.iterations;
        x = out.x;
        let rnorm = out.r.norm();
        let phi = rnorm - eta;
        let objective = weighted_l1_norm(x.as_slice(), w);
        let stalled = out.iterations <= 1
            && trace
                .last()
                .is_some_and(|p| (p.residual - rnorm).abs() <= 1e-12 * scale && p.tau == tau);
        trace.push(ParetoPoint {
            tau,
            residual: rnorm,
            phi,
            objective,
            iterations,
        });
        let dragging = flat_right && !out.converged && out.iterations == budget;
        if cfg.polish {
            // a stuck exact fit usually carries the right support among many
            // small entries, which only the full polish can strip
            if let Some((k, z)) = polish(problem, &x, cfg, !dragging) {
                if k <= certify_tol {
                    x = z;
                    polished = true;
                    root_found = true;
                    break;
                }
            }
        }
        if stalled {
            // the subproblem no longer moves: SPG has hit its accuracy floor
            break;
        }
        // an inactive ball at a feasible point means τ overshot the root:
        // the iterate itself shows the optimal value is at most its norm
        let inactive = objective < tau * (1.0 - 1e-9);
        let near_root = phi.abs() <= cfg.root_tol * scale;
        if (near_root && phi <= feas_abs && out.converged && !inactive) || dragging {
            let open = hi.min(tau) - lo > cfg.root_tol * tau;
            match (&below, flat_right && open) {
                (Some((bx, bound)), true) if *bound < tau && bound.max(lo) > restarted => {
                    // possibly past the root; approach again from below with
                    // steps that cannot overshoot
                    if !dragging {
                        hi = hi.min(tau);
                    }
                    safe = true;
                    x = bx.clone();
                    tau = bound.max(lo);
                    restarted = tau;
                    continue;
                }
                _ if !dragging => {
                    root_found = true;
                    break;
                }
                _ => {}
            }
        }
        let dual = weighted_dual_norm(out.g.as_slice(), w);
        if phi > feas_abs
            && (dual <= 1e-12 * col_scale * rnorm || (inactive && dual <= 1e-6 * col_scale * rnorm))
        {
            // residual orthogonal to every column, or the ball no longer
            // binds: least squares itself cannot reach η
            infeasible = out.converged;
            break;
        }
        if phi <= feas_abs {
            hi = hi.min(if inactive { objective } else { tau });
        } else {
            // the dual objective at r is a line below ½‖r_τ'‖² for every τ';
            // where it meets ½η² bounds τ* from below, converged or not
            let d0 = real_dot(y, &out.r) - 0.5 * rnorm * rnorm;
            let bound = (d0 - 0.5 * eta * eta) / dual;
            lo = lo.max(bound.min(hi));
            if out.converged {
                lo = lo.max(tau);
            }
            below = Some((x.clone(), bound));
        }
        let newton = tau + phi * rnorm / dual;
        // accurate slopes make Newton safe on the convex curve; the dual
        // bound still guards against what inaccuracy remains
        let guess = match &below {
            Some((_, bound)) if safe => newton.max(*bound),
            _ => newton,
        };
        let next = if guess.is_finite() && guess >= lo && guess < hi {
            guess
        } else if hi.is_finite() {
            0.5 * (lo + hi)
        } else {
            2.0 * tau.max(1e-300)
        };
        if (next - tau).abs() <= 4.0 * f64::EPSILON * tau && out.converged {
            // the curve is resolved to rounding; polish decides the rest
            break;
        }
        tau = next;
    }

    if cfg.polish && !infeasible && !polished {
        if let Some((_, z)) = polish(problem, &x, cfg, false) {
            x = z;
            polished = true;
        }
    }
    let residual_norm = (y - a * &x).norm();
    let feasible = residual_norm <= eta + feas_abs;
    let status = if infeasible {
        SolverStatus::Infeasible
    } else if feasible && (root_found || (polished && kkt_residual(problem, &x) <= certify_tol)) {
        SolverStatus::Optimal
    } else {
        SolverStatus::IterationLimit
    };
    Ok(SolverResult {
        objective: weighted_l1_norm(x.as_slice(), w),
        z: x,
        residual_norm,
        iterations,
        status,
        polished,
        trace,
    })
}

/// Unit-modulus sign of a nonzero scalar.
fn phase<T: Scalar>(v: T) -> T {
    v.unscale(v.modulus())
}

/// Solves the optimality system of BPDN on a fixed support and sign pattern:
/// `A_S* A_S z = A_S* y − λ W_S s` with λ ≥ 0 chosen so that `‖A_S z − y‖ = η`
/// (λ = 0 when the least-squares residual already meets η). Returns `None`
/// when `A_S` is rank deficient or `η` is below the least-squares residual.
pub(crate) fn support_solution<T: Scalar>(
    problem: &BpdnProblem<'_, T>,
    support: &[usize],
    signs: &[T],
) -> Option<DVector<T>> {
    let BpdnProblem { a, y, w, eta } = *problem;
    let k = support.len();
    if k == 0 || k > a.nrows() {
        return None;
    }
    let a_s = a.select_columns(support);
    let gram = a_s.ad_mul(&a_s);
    let chol = gram.clone().cholesky()?;
    let z0 = chol.solve(&a_s.ad_mul(y));
    let r0 = y - &a_s * &z0;
    let r0n = r0.norm();
    let ws = DVector::from_fn(k, |i, _| signs[i].scale(w[support[i]]));
    let d = chol.solve(&ws);
    let q = (&a_s * &d).norm_squared();
    let lambda = if eta > r0n && q > 0.0 {
        ((eta * eta - r0n * r0n) / q).sqrt()
    } else {
        0.0
    };
    let zs = z0 - d.scale(lambda);
    if zs.iter().any(|v| !v.is_finite()) {
        return None;
    }
    let mut z = DVector::zeros(a.ncols());
    for (i, &j) in support.iter().enumerate() {
        z[j] = zs[i];
    }
    Some(z)
}

/// Active-set refinement of `x`: solves the optimality system on candidate
/// supports derived from `x` and returns the feasible candidate with the
/// smallest KKT residual, if it improves on `x`. The quick variant tries only
/// the exact nonzero pattern.
fn polish<T: Scalar>(
    problem: &BpdnProblem<'_, T>,
    x: &DVector<T>,
    cfg: &SolverConfig,
    quick: bool,
) -> Option<(f64, DVector<T>)> {
    let BpdnProblem { a, y, eta, .. } = *problem;
    let feas_abs = cfg.feasibility_tol * problem.scale();
    let peak = x.iter().map(|v| v.modulus()).fold(0.0, f64::max);
    if peak == 0.0 {
        return None;
    }
    let nnz = x.iter().filter(|v| **v != T::zero()).count();
    if quick && nnz > a.nrows() {
        return None;
    }
    let mut best: Option<(f64, DVector<T>)> = None;
    let current = if quick {
        f64::INFINITY
    } else {
        kkt_residual(problem, x)
    };
    let thresholds: &[f64] = if quick {
        &[0.0]
    } else {
        &[0.0, 1e-12, 1e-10, 1e-8, 1e-6, 1e-4, 1e-3]
    };
    let mut candidates: Vec<Vec<usize>> = thresholds
        .iter()
        .map(|rel| {
            (0..x.len())
                .filter(|&j| x[j].modulus() > rel * peak)
                .collect()
        })
        .collect();
    // the largest entries, when the nonzero pattern is wider than the system
    if nnz > a.nrows() {
        let mut by_size: Vec<usize> = (0..x.len()).filter(|&j| x[j] != T::zero()).collect();
        by_size.sort_by(|&i, &j| x[j].modulus().total_cmp(&x[i].modulus()));
        by_size.truncate(a.nrows());
        by_size.sort_unstable();
        candidates.push(by_size);
    }
    candidates.dedup();
    let certify_tol = 100.0 * cfg.optimality_tol;
    let mut seen: HashSet<Vec<(usize, bool)>> = HashSet::new();
    // feasible candidates are ranked with the cheap certificate; the linear
    // program is saved for the two finalists
    let mut cheapest: Option<(f64, DVector<T>)> = None;
    let mut consider = |z: &DVector<T>| {
        let key: Vec<(usize, bool)> = (0..z.len())
            .filter(|&j| z[j] != T::zero())
            .map(|j| (j, z[j].real() > 0.0))
            .collect();
        // a real support and sign pattern determines the candidate
        let repeat = !T::IS_COMPLEX && !seen.insert(key);
        if repeat || (y - a * z).norm() > eta + feas_abs {
            return false;
        }
        let k = kkt_with(problem, z, false);
        if best.as_ref().is_none_or(|(b, _)| k < *b) {
            best = Some((k, z.clone()));
        }
        let obj = weighted_l1_norm(z.as_slice(), problem.w);
        if cheapest.as_ref().is_none_or(|(o, _)| obj < *o) {
            cheapest = Some((obj, z.clone()));
        }
        k <= certify_tol
    };
    'starts: for start in candidates {
        // alternate between refreshing the sign pattern and pruning entries
        // whose sign flipped; every feasible iterate is scored by its KKT residual
        let mut support = start;
        let mut signs: Vec<T> = support.iter().map(|&j| phase(x[j])).collect();
        for round in 0..8 {
            let Some(z) = support_solution(problem, &support, &signs) else {
                break;
            };
            if consider(&z) {
                break 'starts;
            }
            let flipped: Vec<bool> = support
                .iter()
                .zip(&signs)
                .map(|(&j, &s)| (s.conjugate() * z[j]).real() <= 0.0)
                .collect();
            if !flipped.contains(&true) {
                break;
            }
            let keep: Vec<(usize, T)> = support
                .iter()
                .zip(&flipped)
                .filter(|&(&j, &f)| z[j] != T::zero() && (round % 2 == 0 || !f))
                .map(|(&j, _)| (j, phase(z[j])))
                .collect();
            if keep.is_empty() {
                break;
            }
            support = keep.iter().map(|p| p.0).collect();
            signs = keep.iter().map(|p| p.1).collect();
        }
    }
    let (k, z) = best?;
    if k <= certify_tol || quick {
        return (k < current).then_some((k, z));
    }
    let mut finalists = vec![z];
    finalists.extend(cheapest.map(|c| c.1).filter(|c| *c != finalists[0]));
    finalists
        .into_iter()
        .map(|z| (kkt_residual(problem, &z), z))
        .filter(|(k, _)| *k < current)
        .min_by(|p, q| p.0.total_cmp(&q.0))
}

/// Violation of the BPDN optimality conditions at `z`, as the largest of
///
/// * the feasibility excess `max(0, ‖r‖ − η) / max(1, ‖y‖)`,
/// * dual infeasibility `max(0, max_i |(A* v)_i| / w_i − 1)`,
/// * complementary slackness `max_{i ∈ supp z} |(A* v)_i / w_i − sgn z_i|`,
///
/// where `v` is the dual certificate: the residual rescaled to best match
/// `W sgn z` on the support when η > 0, or the minimum-norm solution of
/// `A_S* v = W_S sgn z_S` when η is negligible. When η > 0 and `z ≠ 0` a slack
/// constraint `‖r‖ < η` also counts as a violation.
pub fn kkt_residual<T: Scalar>(problem: &BpdnProblem<'_, T>, z: &DVector<T>) -> f64 {
    kkt_with(problem, z, true)
}

/// `exact` allows the linear program for the certificate when η is negligible;
/// without it the minimum-norm certificate stands, an upper bound.
fn kkt_with<T: Scalar>(problem: &BpdnProblem<'_, T>, z: &DVector<T>, exact: bool) -> f64 {
    let BpdnProblem { a, y, w, eta } = *problem;
    let scale = problem.scale();
    let r = y - a * z;
    let rnorm = r.norm();
    let feas = (rnorm - eta).max(0.0) / scale;
    let support: Vec<usize> = (0..z.len()).filter(|&j| z[j] != T::zero()).collect();
    if support.is_empty() {
        // zero is optimal exactly when it is feasible
        return feas;
    }
    let signs: Vec<T> = support.iter().map(|&j| phase(z[j])).collect();
    let ws = DVector::from_fn(support.len(), |i, _| signs[i].scale(w[support[i]]));

    let mut slack = 0.0;
    let v = if eta > 1e-8 * scale && rnorm > 0.0 {
        slack = (eta - rnorm).max(0.0) / scale;
        let g = a.ad_mul(&r);
        let gs = DVector::from_fn(support.len(), |i, _| g[support[i]]);
        let rho = real_dot(&ws, &gs) / ws.norm_squared();
        if rho <= 0.0 {
            return f64::INFINITY;
        }
        r.unscale(rho)
    } else {
        let a_s = a.select_columns(&support).adjoint();
        let Ok(v) = a_s.svd(true, true).solve(&ws, 1e-12) else {
            return f64::INFINITY;
        };
        // with fewer support columns than rows the certificate is not unique;
        // the minimum-norm one may violate the bound off the support
        let off = weighted_dual_norm(a.ad_mul(&v).as_slice(), w);
        if exact && off > 1.0 && support.len() < a.nrows() && !T::IS_COMPLEX {
            best_certificate(a, w, &support, &ws).unwrap_or(v)
        } else {
            v
        }
    };
    let g = a.ad_mul(&v);
    let dual = (weighted_dual_norm(g.as_slice(), w) - 1.0).max(0.0);
    let comp = support
        .iter()
        .zip(&signs)
        .map(|(&j, &s)| (g[j].unscale(w[j]) - s).modulus())
        .fold(0.0, f64::max);
    feas.max(dual).max(comp).max(slack)
}

/// The certificate `v` with `A_S* v = W_S s` minimising `max_j |(A* v)_j| / w_j`,
/// found as a linear program. Real data only.
fn best_certificate<T: Scalar>(
    a: &DMatrix<T>,
    w: &[f64],
    support: &[usize],
    ws: &DVector<T>,
) -> Option<DVector<T>> {
    use minilp::{ComparisonOp, OptimizationDirection, Problem};
    let m = a.nrows();
    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let v: Vec<_> = (0..m)
        .map(|_| lp.add_var(0.0, (f64::NEG_INFINITY, f64::INFINITY)))
        .collect();
    let t = lp.add_var(1.0, (0.0, f64::INFINITY));
    let mut on_support = vec![false; a.ncols()];
    for (k, &j) in support.iter().enumerate() {
        on_support[j] = true;
        let row: Vec<_> = (0..m).map(|i| (v[i], a[(i, j)].real())).collect();
        lp.add_constraint(row.as_slice(), ComparisonOp::Eq, ws[k].real());
    }
    for j in (0..a.ncols()).filter(|&j| !on_support[j]) {
        let mut row: Vec<_> = (0..m).map(|i| (v[i], a[(i, j)].real())).collect();
        row.push((t, -w[j]));
        lp.add_constraint(row.as_slice(), ComparisonOp::Le, 0.0);
        row.last_mut().unwrap().1 = w[j];
        lp.add_constraint(row.as_slice(), ComparisonOp::Ge, 0.0);
    }
    let sol = lp.solve().ok()?;
    Some(DVector::from_fn(m, |i, _| T::from_real(sol[v[i]])))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> SolverConfig {
        SolverConfig::default()
    }

    #[test]
    fn trivial_cases() {
        let a = DMatrix::<f64>::identity(2, 2);
        let y = DVector::from_vec(vec![1.0, 0.0]);
        let w = [1.0, 1.0];
        let p = BpdnProblem::new(&a, &y, &w, 2.0).unwrap();
        let res = solve_bpdn(&p, &cfg()).unwrap();
        assert_eq!(res.z, DVector::zeros(2));
        assert_eq!(kkt_residual(&p, &res.z), 0.0);

        let p = BpdnProblem::new(&a, &y, &w, 0.0).unwrap();
        let res = solve_bpdn(&p, &cfg()).unwrap();
        assert_eq!(res.status, SolverStatus::Optimal);
        assert!((&res.z - &y).norm() < 1e-9);
    }

    #[test]
    fn weighted_vertex() {
        let a = DMatrix::from_row_slice(1, 2, &[1.0, 1.0]);
        let y = DVector::from_vec(vec![1.0]);
        let w = [1.0, 2.0];
        let p = BpdnProblem::new(&a, &y, &w, 0.0).unwrap();
        let res = solve_bpdn(&p, &cfg()).unwrap();
        assert_eq!(res.status, SolverStatus::Optimal);
        assert!(
            (res.z[0] - 1.0).abs() < 1e-9 && res.z[1].abs() < 1e-9,
            "{} {:?}",
            res.z,
            res.trace
        );
        assert!(kkt_residual(&p, &res.z) < 1e-9);
    }

    #[test]
    fn zero_matrix_is_infeasible() {
        let a = DMatrix::<f64>::zeros(2, 3);
        let y = DVector::from_vec(vec![1.0, 0.0]);
        let w = [1.0; 3];
        let p = BpdnProblem::new(&a, &y, &w, 0.5).unwrap();
        assert_eq!(
            solve_bpdn(&p, &cfg()).unwrap().status,
            SolverStatus::Infeasible
        );
    }

    #[test]
    fn lasso_examples() {
        let a = DMatrix::<f64>::identity(2, 2);
        let y = DVector::from_vec(vec![1.0, 0.0]);
        let w = [1.0, 1.0];
        let z = solve_weighted_lasso(&a, &y, &w, 0.5, &cfg()).unwrap().z;
        assert!((z[0] - 0.5).abs() < 1e-12 && z[1] == 0.0);
        let z = solve_weighted_lasso(&a, &y, &w, 0.0, &cfg()).unwrap().z;
        assert_eq!(z, DVector::zeros(2));
    }

    #[test]
    fn bad_problems_are_rejected() {
        let a = DMatrix::<f64>::identity(2, 2);
        let y = DVector::from_vec(vec![1.0, 0.0]);
        assert!(BpdnProblem::new(&a, &y, &[1.0, 0.5], 0.0).is_err());
        assert!(BpdnProblem::new(&a, &y, &[1.0], 0.0).is_err());
        assert!(BpdnProblem::new(&a, &y, &[1.0, 1.0], -1.0).is_err());
    }
}
