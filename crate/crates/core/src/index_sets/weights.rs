//! Intrinsic weights `u_n` and the derivative quantities `κ_n`.
//!
//! Both are suprema over `[-1, 1]` of one-dimensional functions, computed on
//! Chebyshev-distributed grids that are doubled until two successive values
//! agree to a relative `1e-6`. Around the best grid point a short
//! golden-section search sharpens interior maxima. Tensor structure gives the
//! multivariate values: `u` is a product and `κ` a sum over coordinates.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::basis1d::{
    chi_over_mu, jacobi_orthonormal_scale, jacobi_p, jacobi_tables, nu_over_mu, ratio_bounded,
    BasisFamily, Density,
};
use crate::error::{Error, Result};

use super::{IndexSet, MultiIndex, WeightVector};

const INITIAL_POINTS: usize = 1 << 12;
const MAX_POINTS: usize = 1 << 19;
const SUP_RTOL: f64 = 1e-6;

/// Per-degree `u_n` and `κ_n` for one `(family, μ)` pair, indexed by `|n|`.
#[derive(Debug, Clone)]
pub struct IntrinsicTable {
    pub u: Vec<f64>,
    pub kappa: Vec<f64>,
}

type CacheKey = (u64, u64, bool, Density);

fn cache() -> &'static Mutex<HashMap<CacheKey, Arc<IntrinsicTable>>> {
    static CACHE: OnceLock<Mutex<HashMap<CacheKey, Arc<IntrinsicTable>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn cache_key(family: &BasisFamily, mu: &Density) -> CacheKey {
    match *family {
        BasisFamily::Jacobi { alpha, beta } => (alpha.to_bits(), beta.to_bits(), false, *mu),
        BasisFamily::Fourier => (0, 0, true, *mu),
    }
}

/// Tables of `u_n` and `κ_n` for `0 ≤ n ≤ nmax`, cached per `(family, μ)`.
pub fn intrinsic_table(
    family: &BasisFamily,
    mu: &Density,
    nmax: usize,
) -> Result<Arc<IntrinsicTable>> {
    family.validate()?;
    let key = cache_key(family, mu);
    if let Some(t) = cache().lock().expect("weight cache poisoned").get(&key) {
        if t.u.len() > nmax {
            return Ok(Arc::clone(t));
        }
    }
    let table = Arc::new(compute_table(family, mu, nmax)?);
    cache()
        .lock()
        .expect("weight cache poisoned")
        .insert(key, Arc::clone(&table));
    Ok(table)
}

fn compute_table(family: &BasisFamily, mu: &Density, nmax: usize) -> Result<IntrinsicTable> {
    let endpoints = ratio_bounded(family, mu);
    let divergent = |what: &str, n: usize| {
        Error::Divergent(format!(
            "{what} for {} with {} sampling, n = {n}",
            family.label(),
            mu.label()
        ))
    };
    match *family {
        BasisFamily::Fourier => {
            let ratio = grid_sup(
                0,
                endpoints,
                |y, out| {
                    out.clear();
                    out.push(nu_over_mu(family, mu, y).sqrt());
                },
                |_, y| nu_over_mu(family, mu, y).sqrt(),
            )
            .map_err(|n| divergent("intrinsic weight", n))?[0];
            let chi = grid_sup(
                0,
                endpoints,
                |y, out| {
                    out.clear();
                    out.push(chi_over_mu(family, mu, y));
                },
                |_, y| chi_over_mu(family, mu, y),
            )
            .map_err(|n| divergent("derivative weight", n))?[0];
            let pi2 = std::f64::consts::PI * std::f64::consts::PI;
            let u = vec![ratio; nmax + 1];
            let kappa = (0..=nmax)
                .map(|n| chi * pi2 * (n * n) as f64 / (ratio * ratio))
                .collect();
            Ok(IntrinsicTable { u, kappa })
        }
        BasisFamily::Jacobi { alpha, beta } => {
            let mut derivs = Vec::new();
            let u = grid_sup(
                nmax,
                endpoints,
                |y, out| {
                    jacobi_tables(alpha, beta, nmax, y, out, &mut derivs);
                    let r = nu_over_mu(family, mu, y).sqrt();
                    out.iter_mut().for_each(|v| *v = r * v.abs());
                },
                |n, y| {
                    nu_over_mu(family, mu, y).sqrt()
                        * (jacobi_orthonormal_scale(alpha, beta, n) * jacobi_p(alpha, beta, n, y))
                            .abs()
                },
            )
            .map_err(|n| divergent("intrinsic weight", n))?;
            let mut vals = Vec::new();
            let chi_endpoints = {
                let (ma, mb) = mu.exponents(family);
                alpha + 1.0 - ma >= 0.0 && beta + 1.0 - mb >= 0.0
            };
            let sup_chi = grid_sup(
                nmax,
                chi_endpoints,
                |y, out| {
                    jacobi_tables(alpha, beta, nmax, y, &mut vals, out);
                    let r = chi_over_mu(family, mu, y);
                    out.iter_mut().for_each(|v| *v = r * *v * *v);
                },
                |n, y| {
                    if n == 0 {
                        return 0.0;
                    }
                    let d = jacobi_orthonormal_scale(alpha, beta, n)
                        * 0.5
                        * (n as f64 + alpha + beta + 1.0)
                        * jacobi_p(alpha + 1.0, beta + 1.0, n - 1, y);
                    chi_over_mu(family, mu, y) * d * d
                },
            )
            .map_err(|n| divergent("derivative weight", n))?;
            let kappa = sup_chi.iter().zip(&u).map(|(s, u)| s / (u * u)).collect();
            Ok(IntrinsicTable { u, kappa })
        }
    }
}

/// Suprema of `g_0, …, g_nmax` on `[-1, 1]`.
///
/// `eval_all` fills all values at one point, `eval_one` evaluates a single
/// function (used by the local refinement). On failure returns the first
/// index whose supremum was still moving at the finest grid.
fn grid_sup(
    nmax: usize,
    include_endpoints: bool,
    mut eval_all: impl FnMut(f64, &mut Vec<f64>),
    eval_one: impl Fn(usize, f64) -> f64,
) -> std::result::Result<Vec<f64>, usize> {
    let mut buf = Vec::with_capacity(nmax + 1);
    let mut previous: Option<Vec<f64>> = None;
    let mut unsettled = None;
    let mut points = INITIAL_POINTS;
    while points <= MAX_POINTS {
        let mut nodes: Vec<f64> = (0..points)
            .map(|j| (std::f64::consts::PI * (j as f64 + 0.5) / points as f64).cos())
            .collect();
        if include_endpoints {
            nodes.insert(0, 1.0);
            nodes.push(-1.0);
        }
        let mut best = vec![f64::NEG_INFINITY; nmax + 1];
        let mut arg = vec![0usize; nmax + 1];
        for (j, &y) in nodes.iter().enumerate() {
            eval_all(y, &mut buf);
            for n in 0..=nmax {
                if buf[n] > best[n] {
                    best[n] = buf[n];
                    arg[n] = j;
                }
            }
        }
        for n in 0..=nmax {
            let j = arg[n];
            if j == 0 || j + 1 == nodes.len() {
                continue;
            }
            // nodes are descending
            let polished = golden_max(|y| eval_one(n, y), nodes[j + 1], nodes[j - 1]);
            best[n] = best[n].max(polished);
        }
        if let Some(prev) = &previous {
            unsettled = (0..=nmax)
                .find(|&n| (best[n] - prev[n]).abs() > SUP_RTOL * best[n].abs().max(1e-300));
            if unsettled.is_none() {
                return Ok(best);
            }
        }
        previous = Some(best);
        points *= 2;
    }
    Err(unsettled.unwrap_or(0))
}

fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..60 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = f(x1);
        }
    }
    f1.max(f2)
}

fn coordinate_degrees(family: &BasisFamily, n: &MultiIndex) -> Result<Vec<usize>> {
    if !family.is_fourier() && !n.is_nonnegative() {
        return Err(Error::Domain(format!(
            "negative multi-index {n} for {}",
            family.label()
        )));
    }
    Ok(n.entries()
        .iter()
        .map(|e| e.unsigned_abs() as usize)
        .collect())
}

/// `u_n = Π_k u_{n_k}`.
pub fn intrinsic_weight(family: &BasisFamily, mu: &Density, n: &MultiIndex) -> Result<f64> {
    let degs = coordinate_degrees(family, n)?;
    let table = intrinsic_table(family, mu, degs.iter().copied().max().unwrap_or(0))?;
    Ok(degs.iter().map(|&k| table.u[k]).product())
}

/// Intrinsic weights for every member of `set`.
pub fn intrinsic_weights(
    family: &BasisFamily,
    mu: &Density,
    set: &IndexSet,
) -> Result<WeightVector> {
    let table = intrinsic_table(family, mu, set.max_coordinate())?;
    let mut w = WeightVector::new();
    for n in set {
        let degs = coordinate_degrees(family, n)?;
        w.insert(n.clone(), degs.iter().map(|&k| table.u[k]).product());
    }
    Ok(w)
}

/// One-dimensional `κ_n = u_n⁻² sup (χ/μ)|φ'_n|²`.
pub fn kappa_1d(family: &BasisFamily, mu: &Density, n: i64) -> Result<f64> {
    if n < 0 && !family.is_fourier() {
        return Err(Error::Domain(format!(
            "negative degree {n} for {}",
            family.label()
        )));
    }
    let k = n.unsigned_abs() as usize;
    Ok(intrinsic_table(family, mu, k)?.kappa[k])
}

/// `κ_n = Σ_k κ_{n_k}`.
pub fn kappa(family: &BasisFamily, mu: &Density, n: &MultiIndex) -> Result<f64> {
    let degs = coordinate_degrees(family, n)?;
    let table = intrinsic_table(family, mu, degs.iter().copied().max().unwrap_or(0))?;
    Ok(degs.iter().map(|&k| table.kappa[k]).sum())
}
