//! Spectral projected gradient for `min ½‖Az − y‖² s.t. ‖z‖_{1,w} ≤ τ`.

use std::collections::VecDeque;

use nalgebra::{DMatrix, DVector};

use crate::scalar::Scalar;

use super::projection::{project_in_place, weighted_dual_norm};

const HISTORY: usize = 10;
const SUFFICIENT_DECREASE: f64 = 1e-4;
const STEP_MIN: f64 = 1e-16;
const STEP_MAX: f64 = 1e5;
const MAX_BACKTRACKS: usize = 50;
/// Iterations a sign pattern must persist before jumping along its face.
const FACE_PERIOD: usize = 10;
const FACE_DROPS: usize = 8;

pub(crate) struct SpgOutcome<T: Scalar> {
    pub x: DVector<T>,
    /// `y − A x`
    pub r: DVector<T>,
    /// `A* r`
    pub g: DVector<T>,
    pub rel_gap: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// When to stop the inner solve: the duality gap relative to the objective
/// `f = ½‖r‖²` falls below `opt_tol`, with `f` floored at `10⁻¹²·½‖y‖²` so the
/// test stays scale invariant and meaningful for exact fits. Inside the root
/// finder it is also enough for the gap's bound on the residual error
/// (`gap / ‖r‖`) to fall under a fraction `loose` of the Pareto misfit
/// `|‖r‖ − η|`: far from the root a rough subproblem serves Newton fine.
/// With `feas` set (η ≈ 0), reaching `‖r‖ ≤ η + feas` also ends the solve,
/// since every larger τ has the same zero residual.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Stop {
    pub opt_tol: f64,
    pub eta: Option<f64>,
    pub feas: Option<f64>,
    /// fraction of the misfit the gap bound must fall under
    pub loose: f64,
}

pub(crate) fn real_dot<T: Scalar>(a: &DVector<T>, b: &DVector<T>) -> f64 {
    a.dotc(b).real()
}

fn duality_gap<T: Scalar>(
    r: &DVector<T>,
    y: &DVector<T>,
    g: &DVector<T>,
    w: &[f64],
    tau: f64,
) -> f64 {
    // primal ½‖r‖², dual ⟨y,r⟩ − ½‖r‖² − τ‖A*r‖_*
    real_dot(r, r) - real_dot(r, y) + tau * weighted_dual_norm(g.as_slice(), w)
}

pub(crate) fn spg<T: Scalar>(
    a: &DMatrix<T>,
    y: &DVector<T>,
    w: &[f64],
    tau: f64,
    mut x: DVector<T>,
    budget: usize,
    stop: Stop,
) -> SpgOutcome<T> {
    project_in_place(x.as_mut_slice(), w, tau);
    let mut r = y - a * &x;
    let mut g = a.ad_mul(&r);
    let mut f = 0.5 * r.norm_squared();
    let f_floor = (1e-12 * 0.5 * y.norm_squared()).max(f64::MIN_POSITIVE);
    let mut history: VecDeque<f64> = VecDeque::with_capacity(HISTORY);
    history.push_back(f);

    // first step: exact minimiser along the steepest descent ray
    let ag = a * &g;
    let agn = ag.norm_squared();
    let mut step = if agn > 0.0 {
        (g.norm_squared() / agn).clamp(STEP_MIN, STEP_MAX)
    } else {
        1.0
    };

    let mut best = (f, x.clone(), r.clone(), g.clone());
    let mut x_new = x.clone();
    let mut r_new = r.clone();
    let mut iterations = 0;
    let mut converged = false;
    let mut rel_gap = f64::INFINITY;
    let mut last_pattern: Vec<i8> = Vec::new();
    let mut stable = 0;

    while iterations < budget {
        let gap = duality_gap(&r, y, &g, w, tau).abs();
        rel_gap = gap / f.max(f_floor);
        let loose = stop.eta.is_some_and(|eta| {
            let rn = r.norm();
            gap <= stop.loose * rn * (rn - eta).abs() || stop.feas.is_some_and(|t| rn <= eta + t)
        });
        if rel_gap <= stop.opt_tol || loose {
            converged = true;
            break;
        }
        iterations += 1;

        // curvilinear search along the projection arc keeps exact zeros
        let fmax = history.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut alpha = step;
        let mut accepted = false;
        for _ in 0..MAX_BACKTRACKS {
            x_new.copy_from(&x);
            x_new.axpy(T::from_real(alpha), &g, T::one());
            project_in_place(x_new.as_mut_slice(), w, tau);
            let s = &x_new - &x;
            // directional derivative of f along s is −Re⟨g, s⟩
            let gts = real_dot(&g, &s);
            if s.norm_squared() == 0.0 {
                break;
            }
            r_new.copy_from(y);
            r_new.gemv(-T::one(), a, &x_new, T::one());
            let f_new = 0.5 * r_new.norm_squared();
            if f_new <= fmax - SUFFICIENT_DECREASE * gts {
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if !accepted {
            // no descent possible within rounding: treat as stationary
            converged = rel_gap <= stop.opt_tol.sqrt();
            break;
        }

        let g_new = a.ad_mul(&r_new);
        let s = &x_new - &x;
        // gradients are −g, so the curvature pair uses g_old − g_new
        let yv = &g - &g_new;
        let sts = s.norm_squared();
        let sty = real_dot(&s, &yv);
        step = if sty <= 0.0 {
            STEP_MAX
        } else {
            (sts / sty).clamp(STEP_MIN, STEP_MAX)
        };

        std::mem::swap(&mut x, &mut x_new);
        std::mem::swap(&mut r, &mut r_new);
        g = g_new;
        f = 0.5 * r.norm_squared();
        let pattern: Vec<i8> = x.iter().map(|v| sign_code(*v)).collect();
        if pattern == last_pattern {
            stable += 1;
        } else {
            stable = 0;
            last_pattern = pattern;
        }
        if stable == FACE_PERIOD {
            stable = 0;
            if let Some((xf, rf)) = face_minimiser(a, y, w, tau, &x) {
                let ff = 0.5 * rf.norm_squared();
                if ff < f {
                    x = xf;
                    r = rf;
                    g = a.ad_mul(&r);
                    f = ff;
                }
            }
        }
        if history.len() == HISTORY {
            history.pop_front();
        }
        history.push_back(f);
        if f < best.0 {
            best = (f, x.clone(), r.clone(), g.clone());
        }
    }

    // the nonmonotone search may end above the best value seen
    if best.0 < f {
        let (_, bx, br, bg) = best;
        x = bx;
        r = br;
        g = bg;
        f = 0.5 * r.norm_squared();
        rel_gap = duality_gap(&r, y, &g, w, tau).abs() / f.max(f_floor);
    }
    SpgOutcome {
        x,
        r,
        g,
        rel_gap,
        iterations,
        converged,
    }
}

/// Descent along the face of the ball holding `x`: the support and signs of
/// `x` fixed and `Σ w_i s_i z_i = τ`. Moves toward the least-squares minimiser
/// on that face, stopping at the first entry that would change sign and
/// dropping it, as an active-set method would. Projected gradient identifies
/// the face long before it converges on it, so on ill-conditioned problems
/// these jumps save most of the iterations. Real data only.
fn face_minimiser<T: Scalar>(
    a: &DMatrix<T>,
    y: &DVector<T>,
    w: &[f64],
    tau: f64,
    x: &DVector<T>,
) -> Option<(DVector<T>, DVector<T>)> {
    if T::IS_COMPLEX {
        return None;
    }
    let mut z = x.clone();
    let mut moved = false;
    for _ in 0..FACE_DROPS {
        let support: Vec<usize> = (0..z.len()).filter(|&j| z[j] != T::zero()).collect();
        let k = support.len();
        if k == 0 {
            break;
        }
        let c: Vec<f64> = support
            .iter()
            .map(|&j| z[j].real().signum() * w[j])
            .collect();
        // bordered system [AᵀA c; cᵀ 0][z; μ] = [Aᵀy; τ]
        let a_s = a.select_columns(&support);
        let gram = a_s.ad_mul(&a_s);
        let rhs_top = a_s.ad_mul(y);
        let kkt = DMatrix::from_fn(k + 1, k + 1, |i, j| match (i < k, j < k) {
            (true, true) => gram[(i, j)].real(),
            (true, false) => c[i],
            (false, true) => c[j],
            _ => 0.0,
        });
        let rhs = DVector::from_fn(k + 1, |i, _| if i < k { rhs_top[i].real() } else { tau });
        let Some(sol) = kkt.lu().solve(&rhs) else {
            break;
        };
        if sol.iter().any(|v| !v.is_finite()) {
            break;
        }
        // longest step toward the face minimiser that keeps every sign
        let (mut t, mut blocking) = (1.0f64, None);
        for (i, &j) in support.iter().enumerate() {
            let (from, to) = (z[j].real(), sol[i]);
            if to * from <= 0.0 {
                let ti = from / (from - to);
                if ti < t {
                    t = ti;
                    blocking = Some(j);
                }
            }
        }
        for (i, &j) in support.iter().enumerate() {
            let v = z[j].real();
            z[j] = T::from_real(v + t * (sol[i] - v));
        }
        moved = true;
        match blocking {
            Some(j) => z[j] = T::zero(),
            None => break,
        }
    }
    if !moved {
        return None;
    }
    // the face point must lie in the ball up to rounding
    project_in_place(z.as_mut_slice(), w, tau);
    let r = y - a * &z;
    Some((z, r))
}

fn sign_code<T: Scalar>(v: T) -> i8 {
    if v == T::zero() {
        0
    } else if T::IS_COMPLEX {
        2
    } else if v.real() > 0.0 {
        1
    } else {
        -1
    }
}
