//! Searches over lower sets: `K(s)` and best lower `s`-term approximations.

use std::collections::{HashMap, HashSet};

use crate::basis1d::{BasisFamily, Density};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::weights::intrinsic_table;
use super::{hyperbolic_cross, IndexSet, MultiIndex, WeightVector};

/// Maximum number of distinct lower sets visited by the exact `K(s)` search.
pub const K_SEARCH_CAP: usize = 10_000_000;

/// Visit budget for the exact best lower `s`-term search before falling back to greedy.
pub const BEST_LOWER_EXACT_CAP: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KMode {
    /// Exhaustive search over lower sets.
    Exact,
    /// Closed-form upper bound, where one is known.
    PaperBound,
}

/// Depth-first enumeration of the lower subsets of a finite lower universe.
struct LowerSearch<'a> {
    preds: &'a [Vec<usize>],
    values: &'a [f64],
    limit: usize,
    cap: usize,
    seen: HashSet<Vec<u64>>,
    best: f64,
    best_set: Vec<u64>,
}

impl LowerSearch<'_> {
    fn has(bits: &[u64], i: usize) -> bool {
        bits[i / 64] >> (i % 64) & 1 == 1
    }

    fn run(&mut self) -> Result<()> {
        let mut bits = vec![0u64; self.values.len().div_ceil(64).max(1)];
        self.best = 0.0;
        self.best_set = bits.clone();
        self.descend(&mut bits, 0, 0.0)
    }

    fn descend(&mut self, bits: &mut Vec<u64>, size: usize, sum: f64) -> Result<()> {
        if sum > self.best {
            self.best = sum;
            self.best_set.clone_from(bits);
        }
        if size == self.limit {
            return Ok(());
        }
        for i in 0..self.values.len() {
            if Self::has(bits, i) || !self.preds[i].iter().all(|&p| Self::has(bits, p)) {
                continue;
            }
            bits[i / 64] |= 1 << (i % 64);
            if self.seen.insert(bits.clone()) {
                if self.seen.len() > self.cap {
                    return Err(Error::ResourceLimit {
                        what: "lower-set search visits",
                        requested: self.seen.len(),
                        limit: self.cap,
                    });
                }
                self.descend(bits, size + 1, sum + self.values[i])?;
            }
            bits[i / 64] &= !(1 << (i % 64));
        }
        Ok(())
    }
}

fn predecessor_table(universe: &IndexSet) -> Vec<Vec<usize>> {
    universe
        .iter()
        .map(|n| {
            n.predecessors()
                .map(|p| universe.position(&p).expect("universe must be lower"))
                .collect()
        })
        .collect()
}

/// Largest `values`-mass over lower subsets of `universe` with at most `limit` members.
fn max_lower_mass(
    universe: &IndexSet,
    values: &[f64],
    limit: usize,
    cap: usize,
) -> Result<(f64, Vec<usize>)> {
    let preds = predecessor_table(universe);
    let mut search = LowerSearch {
        preds: &preds,
        values,
        limit,
        cap,
        seen: HashSet::new(),
        best: 0.0,
        best_set: Vec::new(),
    };
    search.run()?;
    let members = (0..values.len())
        .filter(|&i| LowerSearch::has(&search.best_set, i))
        .collect();
    Ok((search.best, members))
}

/// `K(s)`: the largest `Σ_{n∈Δ} u_n²` over lower sets `Δ ⊂ ℕ₀^d` with `|Δ| ≤ s`.
pub fn k_of_s(family: &BasisFamily, mu: &Density, d: usize, s: usize, mode: KMode) -> Result<f64> {
    match mode {
        KMode::Exact => k_of_s_exact_with_cap(family, mu, d, s, K_SEARCH_CAP),
        KMode::PaperBound => k_paper_bound(family, mu, d, s),
    }
}

pub fn k_of_s_exact_with_cap(
    family: &BasisFamily,
    mu: &Density,
    d: usize,
    s: usize,
    cap: usize,
) -> Result<f64> {
    check_ds(d, s)?;
    let table = intrinsic_table(family, mu, s - 1)?;
    let u0sq = table.u[0] * table.u[0];
    if family.is_fourier() {
        // all intrinsic weights coincide
        return Ok(s as f64 * u0sq.powi(d as i32));
    }
    if s == 1 {
        return Ok(u0sq.powi(d as i32));
    }
    // A lower set of size s has at most s-1 active coordinates, and the
    // weights are symmetric in the coordinates.
    let d_eff = d.min(s - 1);
    let universe = hyperbolic_cross(d_eff, s - 1)?;
    let values: Vec<f64> = universe
        .iter()
        .map(|n| {
            n.entries()
                .iter()
                .map(|&k| table.u[k as usize].powi(2))
                .product()
        })
        .collect();
    let (best, _) = max_lower_mass(&universe, &values, s, cap)?;
    Ok(best * u0sq.powi((d - d_eff) as i32))
}

fn check_ds(d: usize, s: usize) -> Result<()> {
    if d == 0 || s == 0 {
        return Err(Error::Domain(format!(
            "K(s) needs d >= 1 and s >= 1, got d={d}, s={s}"
        )));
    }
    Ok(())
}

fn is_whole(x: f64) -> bool {
    x >= 0.0 && x.fract() == 0.0
}

fn k_paper_bound(family: &BasisFamily, mu: &Density, d: usize, s: usize) -> Result<f64> {
    check_ds(d, s)?;
    let sf = s as f64;
    let unsupported = || {
        Error::Unsupported(format!(
            "no closed-form K(s) bound for {} with {} sampling; closed forms cover \
             Jacobi α,β ∈ ℕ₀, α = β with 2α+1 ∈ ℕ, Chebyshev, and Legendre under \
             Chebyshev sampling",
            family.label(),
            mu.label()
        ))
    };
    let (alpha, beta) = family.jacobi_params().ok_or_else(unsupported)?;
    if family.is_legendre() && *mu == Density::ChebyshevArcsine {
        let df = d as f64;
        let a = 2f64.powf(df) * sf;
        let b = (std::f64::consts::PI / 2.0).powf(df)
            * sf.powf((1.0 + 4.0 / std::f64::consts::PI).ln() / 2f64.ln());
        return Ok(a.min(b));
    }
    if !mu.matches(family) {
        return Err(unsupported());
    }
    if family.is_chebyshev() {
        return Ok(sf.powf(3f64.ln() / 2f64.ln()));
    }
    if is_whole(alpha) && is_whole(beta) {
        return Ok(sf.powf(2.0 * alpha.max(beta) + 2.0));
    }
    let two_a1 = 2.0 * alpha + 1.0;
    if alpha == beta && two_a1 >= 1.0 && two_a1.fract() == 0.0 {
        return Ok(sf.powf(2.0 * alpha + 2.0));
    }
    Err(unsupported())
}

/// Result of a best lower `s`-term selection.
#[derive(Debug, Clone)]
pub struct BestLowerTerm {
    pub set: IndexSet,
    /// `‖x − x_Δ‖_{1,v}`.
    pub sigma: f64,
    /// False when the greedy fallback produced the set.
    pub exact: bool,
}

struct Support {
    dim: usize,
    indices: Vec<MultiIndex>,
    mass: Vec<f64>,
    total: f64,
}

fn weighted_support<T: Scalar>(x: &HashMap<MultiIndex, T>, v: &WeightVector) -> Result<Support> {
    let mut indices: Vec<MultiIndex> = x
        .iter()
        .filter(|(_, c)| c.modulus() > 0.0)
        .map(|(n, _)| n.clone())
        .collect();
    indices.sort_by(super::graded_cmp);
    let dim = indices.first().map_or(1, MultiIndex::dim);
    if let Some(bad) = indices.iter().find(|n| n.dim() != dim) {
        return Err(Error::Dimension(format!(
            "coefficient index {bad} does not have dimension {dim}"
        )));
    }
    let mass = indices
        .iter()
        .map(|n| Ok(v.get(n)? * x[n].modulus()))
        .collect::<Result<Vec<f64>>>()?;
    let total = mass.iter().sum();
    Ok(Support {
        dim,
        indices,
        mass,
        total,
    })
}

/// Lower set `Δ`, `|Δ| ≤ s`, minimizing `‖x − x_Δ‖_{1,v}`.
///
/// Exhaustive over the lower subsets of the closure of `supp(x)` when that
/// search stays within [`BEST_LOWER_EXACT_CAP`] visits, greedy otherwise.
pub fn best_lower_s_term<T: Scalar>(
    x: &HashMap<MultiIndex, T>,
    v: &WeightVector,
    s: usize,
) -> Result<BestLowerTerm> {
    best_lower_s_term_with_cap(x, v, s, BEST_LOWER_EXACT_CAP)
}

pub fn best_lower_s_term_with_cap<T: Scalar>(
    x: &HashMap<MultiIndex, T>,
    v: &WeightVector,
    s: usize,
    cap: usize,
) -> Result<BestLowerTerm> {
    let supp = weighted_support(x, v)?;
    let universe = IndexSet::new(supp.dim, supp.indices.iter().cloned())?.lower_closure();
    let mut values = vec![0.0; universe.len()];
    for (n, m) in supp.indices.iter().zip(&supp.mass) {
        values[universe.position(n).expect("closure contains support")] = *m;
    }
    match max_lower_mass(&universe, &values, s, cap) {
        Ok((kept, members)) => Ok(BestLowerTerm {
            set: IndexSet::new(
                supp.dim,
                members.iter().map(|&i| universe.as_slice()[i].clone()),
            )?,
            sigma: (supp.total - kept).max(0.0),
            exact: true,
        }),
        Err(Error::ResourceLimit { .. }) => greedy(&supp, s),
        Err(e) => Err(e),
    }
}

/// Greedy heuristic: repeatedly add the support index whose missing lower
/// closure brings the most weighted mass per added member.
pub fn best_lower_s_term_greedy<T: Scalar>(
    x: &HashMap<MultiIndex, T>,
    v: &WeightVector,
    s: usize,
) -> Result<BestLowerTerm> {
    greedy(&weighted_support(x, v)?, s)
}

fn greedy(supp: &Support, s: usize) -> Result<BestLowerTerm> {
    let mass: HashMap<&MultiIndex, f64> =
        supp.indices.iter().zip(supp.mass.iter().copied()).collect();
    let mut delta: HashSet<MultiIndex> = HashSet::new();
    let mut kept = 0.0;
    loop {
        let mut choice: Option<(f64, Vec<MultiIndex>, f64)> = None;
        for n in &supp.indices {
            if delta.contains(n) {
                continue;
            }
            let missing = missing_closure(n, &delta);
            if delta.len() + missing.len() > s {
                continue;
            }
            let gain: f64 = missing
                .iter()
                .map(|m| mass.get(m).copied().unwrap_or(0.0))
                .sum();
            let ratio = gain / missing.len() as f64;
            if choice.as_ref().is_none_or(|c| ratio > c.0) {
                choice = Some((ratio, missing, gain));
            }
        }
        match choice {
            Some((ratio, missing, gain)) if ratio > 0.0 => {
                kept += gain;
                delta.extend(missing);
            }
            _ => break,
        }
    }
    Ok(BestLowerTerm {
        set: IndexSet::new(supp.dim, delta)?,
        sigma: (supp.total - kept).max(0.0),
        exact: false,
    })
}

fn missing_closure(n: &MultiIndex, delta: &HashSet<MultiIndex>) -> Vec<MultiIndex> {
    let mut out = HashSet::new();
    let mut stack = vec![n.clone()];
    while let Some(m) = stack.pop() {
        if delta.contains(&m) || out.contains(&m) {
            continue;
        }
        stack.extend(m.predecessors());
        out.insert(m);
    }
    out.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index_sets::is_lower;

    fn coeffs(entries: &[([i32; 2], f64)]) -> HashMap<MultiIndex, f64> {
        entries
            .iter()
            .map(|(n, c)| (MultiIndex::from(*n), *c))
            .collect()
    }

    fn unit_weights(x: &HashMap<MultiIndex, f64>) -> WeightVector {
        let mut w = WeightVector::new();
        let keys = IndexSet::new(2, x.keys().cloned()).unwrap().lower_closure();
        for n in &keys {
            w.insert(n.clone(), 1.0);
        }
        w
    }

    #[test]
    fn single_term_budget() {
        for family in [BasisFamily::LEGENDRE, BasisFamily::CHEBYSHEV] {
            let k = k_of_s(&family, &Density::MatchOrthogonality, 3, 1, KMode::Exact).unwrap();
            assert!((k - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn two_term_budget() {
        let m = Density::MatchOrthogonality;
        let cheb = k_of_s(&BasisFamily::CHEBYSHEV, &m, 3, 2, KMode::Exact).unwrap();
        assert!((cheb - 3.0).abs() < 1e-6);
        let leg = k_of_s(&BasisFamily::LEGENDRE, &m, 3, 2, KMode::Exact).unwrap();
        assert!((leg - 4.0).abs() < 1e-9);
        let bound = k_of_s(&BasisFamily::CHEBYSHEV, &m, 3, 2, KMode::PaperBound).unwrap();
        assert!((bound - 3.0).abs() < 1e-12);
    }

    #[test]
    fn bound_coverage() {
        let m = Density::MatchOrthogonality;
        let b = |f: BasisFamily| k_of_s(&f, &m, 2, 3, KMode::PaperBound);
        assert_eq!(b(BasisFamily::LEGENDRE).unwrap(), 9.0);
        assert_eq!(b(BasisFamily::jacobi(1.0, 0.0).unwrap()).unwrap(), 81.0);
        assert_eq!(b(BasisFamily::jacobi(0.5, 0.5).unwrap()).unwrap(), 27.0);
        assert!(matches!(
            b(BasisFamily::jacobi(0.3, 0.0).unwrap()),
            Err(Error::Unsupported(_))
        ));
        assert!(matches!(
            b(BasisFamily::Fourier),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn search_cap_is_enforced() {
        let err = k_of_s_exact_with_cap(
            &BasisFamily::LEGENDRE,
            &Density::MatchOrthogonality,
            3,
            8,
            10,
        )
        .unwrap_err();
        assert!(matches!(err, Error::ResourceLimit { .. }));
    }

    #[test]
    fn best_lower_example() {
        let x = coeffs(&[([0, 0], 5.0), ([1, 0], 3.0), ([1, 1], 4.0)]);
        let w = unit_weights(&x);
        let r = best_lower_s_term(&x, &w, 2).unwrap();
        assert!(r.exact);
        assert!((r.sigma - 4.0).abs() < 1e-12);
        assert_eq!(
            r.set,
            IndexSet::new(2, [MultiIndex::from([0, 0]), MultiIndex::from([1, 0])]).unwrap()
        );
    }

    #[test]
    fn lower_support_is_kept_entirely() {
        let x = coeffs(&[([0, 0], 1.0)]);
        let r = best_lower_s_term(&x, &unit_weights(&x), 1).unwrap();
        assert_eq!(r.sigma, 0.0);
        assert_eq!(r.set.len(), 1);

        let x = coeffs(&[([0, 0], 1.0), ([0, 1], -2.0), ([1, 0], 0.5)]);
        let r = best_lower_s_term(&x, &unit_weights(&x), 5).unwrap();
        assert_eq!(r.sigma, 0.0);
    }

    #[test]
    fn greedy_fallback_is_flagged() {
        let x = coeffs(&[([0, 0], 5.0), ([1, 0], 3.0), ([1, 1], 4.0), ([0, 3], 1.0)]);
        let w = unit_weights(&x);
        let r = best_lower_s_term_with_cap(&x, &w, 4, 2).unwrap();
        assert!(!r.exact);
        assert!(is_lower(&r.set));
        assert!(r.set.len() <= 4);
    }

    #[test]
    fn missing_weight_is_an_error() {
        let x = coeffs(&[([0, 0], 1.0), ([2, 0], 1.0)]);
        let mut w = WeightVector::new();
        w.insert(MultiIndex::from([0, 0]), 1.0);
        assert!(matches!(
            best_lower_s_term(&x, &w, 2),
            Err(Error::MissingWeight(_))
        ));
    }
}
