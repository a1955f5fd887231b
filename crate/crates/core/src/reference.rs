//! Brute-force BPDN by support enumeration, for validating the solver.
//!
//! A minimiser of `‖z‖_{1,w}` subject to `‖Az − y‖ ≤ η` can be taken with a
//! support `S` on which `A_S` has full column rank. There it satisfies
//! `z_S = z_0 − λ G⁻¹ W_S s` with `G = A_SᵀA_S`, `z_0` the least-squares
//! solution, `s = sgn z_S` and λ ≥ 0 fixing `‖r‖ = η`. Enumerating every
//! support and sign pattern and keeping the sign-consistent feasible
//! candidates therefore finds the optimum. Real data only; cost grows like
//! `3^N`.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

pub const MAX_ENUMERATION_COLUMNS: usize = 16;

#[derive(Debug, Clone)]
pub struct EnumeratedOptimum {
    pub z: DVector<f64>,
    pub objective: f64,
    pub candidates: usize,
}

pub fn enumerate_bpdn(
    a: &DMatrix<f64>,
    y: &DVector<f64>,
    w: &[f64],
    eta: f64,
) -> Result<EnumeratedOptimum> {
    let (m, n) = a.shape();
    if n > MAX_ENUMERATION_COLUMNS {
        return Err(Error::ResourceLimit {
            what: "enumeration columns",
            requested: n,
            limit: MAX_ENUMERATION_COLUMNS,
        });
    }
    if y.len() != m || w.len() != n {
        return Err(Error::Dimension(
            "enumeration inputs disagree in size".into(),
        ));
    }
    let tol = 1e-10 * y.norm().max(1.0);
    let mut best = if y.norm() <= eta {
        Some((0.0, DVector::zeros(n)))
    } else {
        None
    };
    let mut candidates = 0;
    let mut consider = |z: DVector<f64>, best: &mut Option<(f64, DVector<f64>)>| {
        let obj: f64 = z.iter().zip(w).map(|(v, wi)| wi * v.abs()).sum();
        candidates += 1;
        if best.as_ref().is_none_or(|(b, _)| obj < *b) {
            *best = Some((obj, z));
        }
    };

    for mask in 1u32..(1 << n) {
        let k = mask.count_ones() as usize;
        if k > m {
            continue;
        }
        let support: Vec<usize> = (0..n).filter(|&j| mask >> j & 1 == 1).collect();
        let a_s = a.select_columns(&support);
        let gram = a_s.transpose() * &a_s;
        // skip numerically singular supports
        let svals = gram.singular_values();
        if svals.min() <= 1e-12 * svals.max() {
            continue;
        }
        let Some(chol) = gram.clone().cholesky() else {
            continue;
        };
        let z0 = chol.solve(&(a_s.transpose() * y));
        let r0 = (y - &a_s * &z0).norm();
        if r0 > eta + tol {
            continue;
        }
        let place = |zs: &DVector<f64>| {
            let mut z = DVector::zeros(n);
            for (i, &j) in support.iter().enumerate() {
                z[j] = zs[i];
            }
            z
        };
        let slack2 = eta * eta - r0 * r0;
        if slack2 <= tol * tol {
            // the constraint is tight at the least-squares point itself
            consider(place(&z0), &mut best);
            continue;
        }
        let gw = chol.inverse()
            * DMatrix::from_fn(k, k, |i, j| if i == j { w[support[i]] } else { 0.0 });
        let mut s = DVector::zeros(k);
        for pattern in 0u32..(1 << k) {
            for i in 0..k {
                s[i] = if pattern >> i & 1 == 1 { -1.0 } else { 1.0 };
            }
            let d = &gw * &s;
            let q = (&a_s * &d).norm_squared();
            let lambda = (slack2 / q).sqrt();
            let zs = &z0 - d * lambda;
            if (0..k).all(|i| zs[i] * s[i] > 0.0) {
                consider(place(&zs), &mut best);
            }
        }
    }
    let (objective, z) = best.ok_or_else(|| {
        Error::Domain("no feasible point: η is below the least-squares residual".into())
    })?;
    Ok(EnumeratedOptimum {
        z,
        objective,
        candidates,
    })
}

/// A small random BPDN instance for solver/oracle comparisons.
#[derive(Debug, Clone)]
pub struct OracleInstance {
    pub a: DMatrix<f64>,
    pub y: DVector<f64>,
    pub w: Vec<f64>,
    pub eta: f64,
}

/// Gaussian `A` (scaled by `1/√m`) and `y`, with `2 ≤ N ≤ 12`, `1 ≤ m ≤ min(8, N)`,
/// weights uniform in `[1, 3]` and η drawn from `{0, 0.1}`.
pub fn random_instance(seed: u64) -> OracleInstance {
    let mut rng = rng_from_seed(seed);
    let n = rng.random_range(2..=12usize);
    let m = rng.random_range(1..=n.min(8));
    let scale = 1.0 / (m as f64).sqrt();
    let a = DMatrix::from_fn(m, n, |_, _| scale * rng.sample::<f64, _>(StandardNormal));
    let y = DVector::from_fn(m, |_, _| rng.sample::<f64, _>(StandardNormal));
    let w = (0..n).map(|_| rng.random_range(1.0..=3.0)).collect();
    let eta = if rng.random_bool(0.5) { 0.0 } else { 0.1 };
    OracleInstance { a, y, w, eta }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_example() {
        let a = DMatrix::from_row_slice(1, 2, &[1.0, 1.0]);
        let y = DVector::from_vec(vec![1.0]);
        let opt = enumerate_bpdn(&a, &y, &[1.0, 2.0], 0.0).unwrap();
        assert_eq!(opt.z, DVector::from_vec(vec![1.0, 0.0]));
        assert_eq!(opt.objective, 1.0);
    }

    #[test]
    fn denoising_shrinks_toward_zero() {
        // identity A: the optimum soft-thresholds y onto the ball of radius η
        let a = DMatrix::<f64>::identity(2, 2);
        let y = DVector::from_vec(vec![3.0, 0.0]);
        let opt = enumerate_bpdn(&a, &y, &[1.0, 1.0], 1.0).unwrap();
        assert!((opt.z[0] - 2.0).abs() < 1e-12 && opt.z[1] == 0.0);
    }

    #[test]
    fn infeasible_is_an_error() {
        let a = DMatrix::from_row_slice(2, 1, &[1.0, 0.0]);
        let y = DVector::from_vec(vec![0.0, 1.0]);
        assert!(enumerate_bpdn(&a, &y, &[1.0], 0.5).is_err());
    }
}
