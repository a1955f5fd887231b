//! Numerical estimates of the local coherences `Υ`, `Γ₁` and `Γ₂`.
//!
//! For a point `y`, let `B(y)` be the `N × (d+1)` matrix with entries
//! `sqrt(τ_k(y)) conj(∂_k φ_n(y)) / sqrt(1+λ_n)`. Then
//!
//! - `Υ = sup_y ‖P_Δ B B* P_Δ‖₂`,
//! - `Γ₁ = sup_y ‖W⁻¹ B B* P_Δ W‖_∞`,
//! - `Γ₂ = sup_{‖z‖_∞=1} max_j E |(W⁻¹ B B* P_Δ W z)_j|²`.
//!
//! Suprema over `y` use a tensor grid plus random draws from `μ`; the
//! expectation in `Γ₂` is a Monte Carlo average, and the supremum over `z` is
//! taken by enumeration of sign vectors when that is cheap and by
//! coordinate ascent from random starts otherwise. Every estimate is a lower
//! bound on the true quantity.

use nalgebra::DMatrix;
use rand::Rng;

use crate::basis1d::{BasisFamily, Density};
use crate::error::{Error, Result};
use crate::index_sets::{IndexSet, WeightVector};
use crate::rng::{derive_seed, rng_from_seed};
use crate::scalar::Scalar;
use crate::tensor::TensorBasis;

use super::{q_scaling, sample_points, tau_unchecked};

const MAX_DELTA: usize = 20;
const EXHAUSTIVE_SIGNS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coherence {
    Upsilon,
    Gamma1,
    Gamma2,
}

#[derive(Debug, Clone)]
pub struct CoherenceBudget {
    /// Grid nodes per coordinate at the coarse level (the fine level doubles it).
    pub grid_points: usize,
    /// Extra random points from `μ` for the suprema over `y`.
    pub random_points: usize,
    /// Monte Carlo samples for the expectation in `Γ₂`.
    pub mc_samples: usize,
    /// Random starts for the coordinate ascent over `z`.
    pub restarts: usize,
    /// Upper limit on point evaluations for one grid level.
    pub max_evaluations: usize,
    pub seed: u64,
}

impl Default for CoherenceBudget {
    fn default() -> Self {
        CoherenceBudget {
            grid_points: 64,
            random_points: 2000,
            mc_samples: 20_000,
            restarts: 32,
            max_evaluations: 1 << 20,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherenceEstimate {
    pub value: f64,
    /// False when the budget ran out before the estimate settled.
    pub converged: bool,
}

struct Setup {
    family: BasisFamily,
    mu: Density,
    basis: TensorBasis,
    inv_q: Vec<f64>,
    delta_pos: Vec<usize>,
    weights: Vec<f64>,
    dim: usize,
}

impl Setup {
    /// The scaled rows `g_{jk} = sqrt(τ_k) ∂_k φ_j / sqrt(1+λ_j)`, indexed `[k][j]`.
    fn scaled<T: Scalar>(&self, y: &[f64]) -> Result<Vec<Vec<T>>> {
        let mut out = vec![Vec::new(); self.dim + 1];
        self.basis.values_and_gradients::<T>(y, &mut out)?;
        for (k, row) in out.iter_mut().enumerate() {
            let t = tau_unchecked(&self.family, &self.mu, y, k).sqrt();
            for (v, iq) in row.iter_mut().zip(&self.inv_q) {
                *v *= T::from_real(t * iq);
            }
        }
        Ok(out)
    }

    /// `(B B*)_{j,l}` for all `j ∈ Λ` and `l ∈ Δ`, as an `N × |Δ|` matrix.
    fn gram_block<T: Scalar>(&self, g: &[Vec<T>]) -> DMatrix<T> {
        let n = self.inv_q.len();
        DMatrix::from_fn(n, self.delta_pos.len(), |j, c| {
            let l = self.delta_pos[c];
            g.iter()
                .map(|row| row[j].conjugate() * row[l])
                .fold(T::zero(), |a, b| a + b)
        })
    }

    fn upsilon_at<T: Scalar>(&self, y: &[f64]) -> Result<f64> {
        let g = self.scaled::<T>(y)?;
        let rows: Vec<usize> = self.delta_pos.clone();
        let block = DMatrix::from_fn(rows.len(), rows.len(), |a, b| {
            g.iter()
                .map(|row| row[rows[a]].conjugate() * row[rows[b]])
                .fold(T::zero(), |x, y| x + y)
        });
        Ok(block
            .symmetric_eigenvalues()
            .iter()
            .fold(0.0f64, |acc, v| acc.max(v.abs())))
    }

    fn gamma1_at<T: Scalar>(&self, y: &[f64]) -> Result<f64> {
        let g = self.scaled::<T>(y)?;
        let bb = self.gram_block::<T>(&g);
        let mut best = 0.0f64;
        for j in 0..bb.nrows() {
            let s: f64 = (0..bb.ncols())
                .map(|c| bb[(j, c)].modulus() * self.weights[self.delta_pos[c]])
                .sum();
            best = best.max(s / self.weights[j]);
        }
        Ok(best)
    }
}

fn grid_nodes(family: &BasisFamily, count: usize) -> Vec<f64> {
    if family.is_fourier() {
        (0..count)
            .map(|i| -1.0 + 2.0 * (i as f64 + 0.5) / count as f64)
            .collect()
    } else {
        (0..count)
            .map(|i| (std::f64::consts::PI * (i as f64 + 0.5) / count as f64).cos())
            .collect()
    }
}

fn tensor_sup(
    family: &BasisFamily,
    dim: usize,
    per_dim: usize,
    f: &mut dyn FnMut(&[f64]) -> Result<f64>,
) -> Result<f64> {
    let nodes = grid_nodes(family, per_dim);
    let total = per_dim.pow(dim as u32);
    let mut y = vec![0.0; dim];
    let mut best = 0.0f64;
    for code in 0..total {
        let mut c = code;
        for yk in y.iter_mut() {
            *yk = nodes[c % per_dim];
            c /= per_dim;
        }
        best = best.max(f(&y)?);
    }
    Ok(best)
}

/// Numerical estimate of a local coherence of the gradient-augmented
/// ensemble for `Δ ⊂ Λ` and weights `w` on `Λ`.
pub fn local_coherence<T: Scalar>(
    family: &BasisFamily,
    mu: &Density,
    lambda: &IndexSet,
    delta: &IndexSet,
    which: Coherence,
    w: &WeightVector,
    budget: &CoherenceBudget,
) -> Result<CoherenceEstimate> {
    if delta.len() > MAX_DELTA {
        return Err(Error::ResourceLimit {
            what: "coherence support size",
            requested: delta.len(),
            limit: MAX_DELTA,
        });
    }
    let delta_pos = delta
        .iter()
        .map(|n| {
            lambda
                .position(n)
                .ok_or_else(|| Error::Domain(format!("{n} is in Δ but not in Λ")))
        })
        .collect::<Result<Vec<usize>>>()?;
    let setup = Setup {
        family: *family,
        mu: *mu,
        basis: TensorBasis::new(*family, lambda)?,
        inv_q: q_scaling(family, lambda).iter().map(|q| 1.0 / q).collect(),
        delta_pos,
        weights: w.to_vec(lambda)?,
        dim: lambda.dim(),
    };
    match which {
        Coherence::Upsilon => sup_over_points(&setup, budget, |s, y| s.upsilon_at::<T>(y)),
        Coherence::Gamma1 => sup_over_points(&setup, budget, |s, y| s.gamma1_at::<T>(y)),
        Coherence::Gamma2 => gamma2::<T>(&setup, budget),
    }
}

fn sup_over_points(
    setup: &Setup,
    budget: &CoherenceBudget,
    f: impl Fn(&Setup, &[f64]) -> Result<f64>,
) -> Result<CoherenceEstimate> {
    let d = setup.dim;
    let fits = |g: usize| {
        g.checked_pow(d as u32)
            .is_some_and(|t| t <= budget.max_evaluations)
    };
    let coarse = budget.grid_points.max(1);
    let fine = 2 * coarse;
    let mut eval = |y: &[f64]| f(setup, y);
    let pts = sample_points(
        &setup.family,
        &setup.mu,
        d,
        budget.random_points,
        derive_seed(budget.seed, "coherence-sup", 0),
    )?;
    let mut random_best = 0.0f64;
    for y in pts.iter() {
        random_best = random_best.max(eval(y)?);
    }
    if !fits(fine) {
        let mut g = coarse;
        while g > 1 && !fits(g) {
            g -= 1;
        }
        let value = tensor_sup(&setup.family, d, g, &mut eval)?.max(random_best);
        return Ok(CoherenceEstimate {
            value,
            converged: false,
        });
    }
    let a = tensor_sup(&setup.family, d, coarse, &mut eval)?.max(random_best);
    let b = tensor_sup(&setup.family, d, fine, &mut eval)?.max(a);
    Ok(CoherenceEstimate {
        value: b,
        converged: (b - a) <= 1e-3 * b.max(1e-300),
    })
}

fn gamma2<T: Scalar>(setup: &Setup, budget: &CoherenceBudget) -> Result<CoherenceEstimate> {
    let n = setup.inv_q.len();
    let r = setup.delta_pos.len();
    let samples = budget.mc_samples.max(2);
    let pts = sample_points(
        &setup.family,
        &setup.mu,
        setup.dim,
        samples,
        derive_seed(budget.seed, "coherence-mc", 0),
    )?;
    // second moments E[conj(a_j) a_j^T] of the rows a_j = (W⁻¹ B B* P_Δ W)_{j,Δ}
    let mut half: Vec<DMatrix<T>> = vec![DMatrix::zeros(r, r); n];
    let mut full: Vec<DMatrix<T>> = vec![DMatrix::zeros(r, r); n];
    for (i, y) in pts.iter().enumerate() {
        let g = setup.scaled::<T>(y)?;
        let bb = setup.gram_block::<T>(&g);
        for j in 0..n {
            let a: Vec<T> = (0..r)
                .map(|c| {
                    bb[(j, c)] * T::from_real(setup.weights[setup.delta_pos[c]] / setup.weights[j])
                })
                .collect();
            let target = &mut full[j];
            for p in 0..r {
                for q in 0..r {
                    target[(p, q)] += a[p].conjugate() * a[q];
                }
            }
        }
        if i + 1 == samples / 2 {
            half.clone_from(&full);
        }
    }
    let scale_full = T::from_real(1.0 / samples as f64);
    let scale_half = T::from_real(1.0 / (samples / 2) as f64);
    let mut rng = rng_from_seed(derive_seed(budget.seed, "coherence-signs", 0));
    let mut value = 0.0f64;
    let mut value_half = 0.0f64;
    let mut settled = true;
    for j in 0..n {
        let gf = &full[j] * scale_full;
        let gh = &half[j] * scale_half;
        let (vf, ok) = max_quadratic_form(&gf, budget.restarts, &mut rng);
        let (vh, _) = max_quadratic_form(&gh, budget.restarts, &mut rng);
        settled &= ok;
        value = value.max(vf);
        value_half = value_half.max(vh);
    }
    let stable = (value - value_half).abs() <= 0.05 * value.max(1e-300);
    Ok(CoherenceEstimate {
        value,
        converged: settled && stable,
    })
}

/// `max z* G z` over `|z_l| = 1` for Hermitian PSD `G`.
///
/// Real problems of small size enumerate sign vectors; otherwise coordinate
/// ascent runs from `restarts` random starts and the result is considered
/// settled when the best value was reached at least twice.
fn max_quadratic_form<T: Scalar, R: Rng>(
    g: &DMatrix<T>,
    restarts: usize,
    rng: &mut R,
) -> (f64, bool) {
    let r = g.nrows();
    if r == 0 {
        return (0.0, true);
    }
    let form = |z: &[T]| -> f64 {
        let mut acc = T::zero();
        for p in 0..r {
            for q in 0..r {
                acc += z[p].conjugate() * g[(p, q)] * z[q];
            }
        }
        acc.real()
    };
    if !T::IS_COMPLEX && r <= EXHAUSTIVE_SIGNS {
        let mut best = 0.0f64;
        let mut z = vec![T::one(); r];
        // z and -z give the same value, so fix the first sign
        for code in 0..(1usize << (r - 1)) {
            for (l, zl) in z.iter_mut().enumerate().skip(1) {
                *zl = if code >> (l - 1) & 1 == 1 {
                    -T::one()
                } else {
                    T::one()
                };
            }
            best = best.max(form(&z));
        }
        return (best, true);
    }
    let mut best = 0.0f64;
    let mut hits = 0usize;
    for _ in 0..restarts.max(1) {
        let mut z: Vec<T> = (0..r)
            .map(|_| {
                if T::IS_COMPLEX {
                    let t = std::f64::consts::TAU * rng.random::<f64>();
                    T::from_complex(num_complex::Complex64::from_polar(1.0, t))
                } else if rng.random::<bool>() {
                    T::one()
                } else {
                    -T::one()
                }
            })
            .collect();
        let mut current = form(&z);
        for _ in 0..200 {
            for l in 0..r {
                let mut s = T::zero();
                for q in 0..r {
                    if q != l {
                        s += g[(l, q)] * z[q];
                    }
                }
                let m = s.modulus();
                if m > 0.0 {
                    z[l] = s * T::from_real(1.0 / m);
                }
            }
            let next = form(&z);
            if next <= current * (1.0 + 1e-13) {
                current = current.max(next);
                break;
            }
            current = next;
        }
        if current > best * (1.0 + 1e-9) {
            best = current;
            hits = 1;
        } else if current >= best * (1.0 - 1e-9) {
            hits += 1;
        }
    }
    (best, hits >= 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index_sets::{hyperbolic_cross, MultiIndex};
    use num_complex::Complex64;

    fn small_budget() -> CoherenceBudget {
        CoherenceBudget {
            grid_points: 24,
            random_points: 200,
            mc_samples: 4000,
            restarts: 8,
            ..Default::default()
        }
    }

    #[test]
    fn fourier_constant_has_unit_coherence() {
        let set = IndexSet::new(1, [MultiIndex::zero(1)]).unwrap();
        let w = WeightVector::ones(&set);
        for which in [Coherence::Upsilon, Coherence::Gamma1, Coherence::Gamma2] {
            let e = local_coherence::<Complex64>(
                &BasisFamily::Fourier,
                &Density::Uniform,
                &set,
                &set,
                which,
                &w,
                &small_budget(),
            )
            .unwrap();
            assert!((e.value - 1.0).abs() < 1e-12, "{which:?}: {}", e.value);
        }
    }

    #[test]
    fn gamma1_is_at_least_one() {
        let lambda = hyperbolic_cross(2, 3).unwrap();
        let delta = hyperbolic_cross(2, 1).unwrap();
        let w = WeightVector::from_fn(&lambda, |n| 1.0 + n.degree() as f64);
        let e = local_coherence::<f64>(
            &BasisFamily::LEGENDRE,
            &Density::MatchOrthogonality,
            &lambda,
            &delta,
            Coherence::Gamma1,
            &w,
            &small_budget(),
        )
        .unwrap();
        assert!(e.value >= 1.0 - 1e-6);
    }

    #[test]
    fn support_must_lie_in_lambda() {
        let lambda = hyperbolic_cross(2, 1).unwrap();
        let delta = IndexSet::new(2, [MultiIndex::from([3, 0])]).unwrap();
        let w = WeightVector::ones(&lambda);
        assert!(local_coherence::<f64>(
            &BasisFamily::LEGENDRE,
            &Density::MatchOrthogonality,
            &lambda,
            &delta,
            Coherence::Upsilon,
            &w,
            &small_budget(),
        )
        .is_err());
    }

    #[test]
    fn quadratic_form_search() {
        let g = DMatrix::from_row_slice(2, 2, &[1.0, -0.5, -0.5, 1.0]);
        let mut rng = rng_from_seed(1);
        let (v, ok) = max_quadratic_form::<f64, _>(&g, 4, &mut rng);
        assert!(ok && (v - 3.0).abs() < 1e-12);
        let gc: DMatrix<Complex64> = g.map(|x| Complex64::new(x, 0.0));
        let (vc, _) = max_quadratic_form::<Complex64, _>(&gc, 8, &mut rng);
        assert!((vc - 3.0).abs() < 1e-9);
    }
}
