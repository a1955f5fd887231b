//! Multi-indices, hyperbolic crosses and lower sets.

mod lower;
mod text;
mod weights;

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

pub use lower::{
    best_lower_s_term, best_lower_s_term_greedy, best_lower_s_term_with_cap, k_of_s,
    k_of_s_exact_with_cap, BestLowerTerm, KMode, BEST_LOWER_EXACT_CAP, K_SEARCH_CAP,
};
pub use text::{parse_index_set, write_index_set};
pub use weights::{
    intrinsic_table, intrinsic_weight, intrinsic_weights, kappa, kappa_1d, IntrinsicTable,
};

/// Default cap on the cardinality of an enumerated hyperbolic cross.
pub const DEFAULT_CARDINALITY_CAP: usize = 2_000_000;

/// A multi-index `n ∈ ℕ₀^d` (or `ℤ^d` for the Fourier family).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex(Vec<i32>);

impl MultiIndex {
    pub fn new(entries: Vec<i32>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Dimension("a multi-index needs d >= 1".into()));
        }
        Ok(MultiIndex(entries))
    }

    pub fn zero(d: usize) -> Self {
        MultiIndex(vec![0; d.max(1)])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[i32] {
        &self.0
    }

    /// Total degree `Σ |n_k|`.
    pub fn degree(&self) -> i64 {
        self.0.iter().map(|&e| (e as i64).abs()).sum()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.0.iter().all(|&e| e >= 0)
    }

    /// `Π (|n_k| + 1)`.
    pub fn hc_product(&self) -> u64 {
        self.0
            .iter()
            .map(|&e| e.unsigned_abs() as u64 + 1)
            .product()
    }

    /// Indices obtained by moving one coordinate one step towards zero.
    pub fn predecessors(&self) -> impl Iterator<Item = MultiIndex> + '_ {
        (0..self.0.len()).filter_map(move |k| {
            let e = self.0[k];
            if e == 0 {
                return None;
            }
            let mut v = self.0.clone();
            v[k] = e - e.signum();
            Some(MultiIndex(v))
        })
    }
}

impl From<&[i32]> for MultiIndex {
    fn from(entries: &[i32]) -> Self {
        assert!(!entries.is_empty(), "a multi-index needs d >= 1");
        MultiIndex(entries.to_vec())
    }
}

impl<const D: usize> From<[i32; D]> for MultiIndex {
    fn from(entries: [i32; D]) -> Self {
        assert!(D >= 1, "a multi-index needs d >= 1");
        MultiIndex(entries.to_vec())
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

/// Graded ordering: ascending total degree, ties broken by descending
/// lexicographic order, so `(1,0)` precedes `(0,1)`. Negative entries sort
/// after positive ones of equal magnitude.
pub fn graded_cmp(a: &MultiIndex, b: &MultiIndex) -> Ordering {
    a.degree().cmp(&b.degree()).then_with(|| {
        for (x, y) in a.0.iter().zip(&b.0) {
            let key = |e: i32| (e.abs(), e > 0);
            match key(*y).cmp(&key(*x)) {
                Ordering::Equal => continue,
                other => return other,
            }
        }
        Ordering::Equal
    })
}

/// A finite, ordered set of distinct multi-indices of a common dimension.
#[derive(Debug, Clone)]
pub struct IndexSet {
    dim: usize,
    indices: Vec<MultiIndex>,
    position: HashMap<MultiIndex, usize>,
}

impl PartialEq for IndexSet {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.indices == other.indices
    }
}

impl IndexSet {
    /// Builds a set from arbitrary indices; duplicates are dropped and the
    /// result is put in graded order.
    pub fn new(dim: usize, indices: impl IntoIterator<Item = MultiIndex>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Dimension("index sets need d >= 1".into()));
        }
        let mut v: Vec<MultiIndex> = indices.into_iter().collect();
        if let Some(bad) = v.iter().find(|n| n.dim() != dim) {
            return Err(Error::Dimension(format!(
                "multi-index {bad} has dimension {}, expected {dim}",
                bad.dim()
            )));
        }
        v.sort_by(graded_cmp);
        v.dedup();
        Ok(Self::from_sorted(dim, v))
    }

    fn from_sorted(dim: usize, indices: Vec<MultiIndex>) -> Self {
        let position = indices
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), i))
            .collect();
        IndexSet {
            dim,
            indices,
            position,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, MultiIndex> {
        self.indices.iter()
    }

    pub fn as_slice(&self) -> &[MultiIndex] {
        &self.indices
    }

    pub fn get(&self, i: usize) -> Option<&MultiIndex> {
        self.indices.get(i)
    }

    pub fn position(&self, n: &MultiIndex) -> Option<usize> {
        self.position.get(n).copied()
    }

    pub fn contains(&self, n: &MultiIndex) -> bool {
        self.position.contains_key(n)
    }

    /// Largest `|n_k|` over all members and coordinates.
    pub fn max_coordinate(&self) -> usize {
        self.indices
            .iter()
            .flat_map(|n| n.0.iter())
            .map(|e| e.unsigned_abs() as usize)
            .max()
            .unwrap_or(0)
    }

    pub fn has_negative_entries(&self) -> bool {
        self.indices.iter().any(|n| !n.is_nonnegative())
    }

    /// Smallest lower set containing every member.
    pub fn lower_closure(&self) -> IndexSet {
        let mut seen: HashMap<MultiIndex, ()> = HashMap::new();
        let mut stack: Vec<MultiIndex> = self.indices.clone();
        while let Some(n) = stack.pop() {
            if seen.insert(n.clone(), ()).is_none() {
                stack.extend(n.predecessors());
            }
        }
        let mut v: Vec<MultiIndex> = seen.into_keys().collect();
        v.sort_by(graded_cmp);
        Self::from_sorted(self.dim, v)
    }
}

impl<'a> IntoIterator for &'a IndexSet {
    type Item = &'a MultiIndex;
    type IntoIter = std::slice::Iter<'a, MultiIndex>;

    fn into_iter(self) -> Self::IntoIter {
        self.indices.iter()
    }
}

/// The hyperbolic cross `{ n ∈ ℕ₀^d : Π (n_k+1) ≤ s+1 }`.
pub fn hyperbolic_cross(d: usize, s: usize) -> Result<IndexSet> {
    hyperbolic_cross_capped(d, s, DEFAULT_CARDINALITY_CAP)
}

pub fn hyperbolic_cross_capped(d: usize, s: usize, cap: usize) -> Result<IndexSet> {
    hc_enumerate(d, s, cap, false)
}

/// Signed hyperbolic cross `{ n ∈ ℤ^d : Π (|n_k|+1) ≤ s+1 }`, used with the Fourier basis.
pub fn hyperbolic_cross_signed(d: usize, s: usize) -> Result<IndexSet> {
    hc_enumerate(d, s, DEFAULT_CARDINALITY_CAP, true)
}

fn hc_enumerate(d: usize, s: usize, cap: usize, signed: bool) -> Result<IndexSet> {
    if d == 0 || s == 0 {
        return Err(Error::Domain(format!(
            "hyperbolic cross needs d >= 1 and s >= 1, got d={d}, s={s}"
        )));
    }
    let budget = s as u64 + 1;
    let count = hc_count(d, budget, signed, cap);
    if count > cap {
        return Err(Error::ResourceLimit {
            what: "hyperbolic cross cardinality",
            requested: count,
            limit: cap,
        });
    }
    let mut out = Vec::with_capacity(count);
    let mut current = vec![0i32; d];
    hc_descend(0, budget, signed, &mut current, &mut out);
    out.sort_by(graded_cmp);
    Ok(IndexSet::from_sorted(d, out))
}

/// Counts members, stopping once the count passes `cap`.
fn hc_count(d: usize, budget: u64, signed: bool, cap: usize) -> usize {
    if d == 0 {
        return 1;
    }
    let mut total = 0usize;
    let mut n = 0u64;
    while n < budget {
        let mult = if signed && n > 0 { 2 } else { 1 };
        total += mult * hc_count(d - 1, budget / (n + 1), signed, cap);
        if total > cap {
            return total;
        }
        n += 1;
    }
    total
}

fn hc_descend(k: usize, budget: u64, signed: bool, cur: &mut Vec<i32>, out: &mut Vec<MultiIndex>) {
    if k == cur.len() {
        out.push(MultiIndex(cur.clone()));
        return;
    }
    let mut n = 0u64;
    while n < budget {
        let rest = budget / (n + 1);
        cur[k] = n as i32;
        hc_descend(k + 1, rest, signed, cur, out);
        if signed && n > 0 {
            cur[k] = -(n as i32);
            hc_descend(k + 1, rest, signed, cur, out);
        }
        n += 1;
    }
    cur[k] = 0;
}

/// True iff every member's coordinatewise-dominated indices are members.
///
/// Checking single-step predecessors suffices by induction on the degree.
pub fn is_lower(set: &IndexSet) -> bool {
    set.iter()
        .all(|n| n.predecessors().all(|p| set.contains(&p)))
}

/// Positive weights indexed by multi-index.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct WeightVector {
    map: HashMap<MultiIndex, f64>,
}

impl WeightVector {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn ones(set: &IndexSet) -> Self {
        Self::from_fn(set, |_| 1.0)
    }

    pub fn from_fn(set: &IndexSet, mut f: impl FnMut(&MultiIndex) -> f64) -> Self {
        WeightVector {
            map: set.iter().map(|n| (n.clone(), f(n))).collect(),
        }
    }

    pub fn insert(&mut self, n: MultiIndex, w: f64) {
        self.map.insert(n, w);
    }

    pub fn get(&self, n: &MultiIndex) -> Result<f64> {
        self.map
            .get(n)
            .copied()
            .ok_or_else(|| Error::MissingWeight(n.to_string()))
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Weights in the order of `set`.
    pub fn to_vec(&self, set: &IndexSet) -> Result<Vec<f64>> {
        set.iter().map(|n| self.get(n)).collect()
    }

    /// Entrywise map, e.g. `w ↦ max(w^θ, 1)`.
    pub fn map(&self, mut f: impl FnMut(f64) -> f64) -> Self {
        WeightVector {
            map: self.map.iter().map(|(n, &w)| (n.clone(), f(w))).collect(),
        }
    }
}

/// `Σ_{n ∈ set} w_n²`.
pub fn weighted_cardinality(set: &IndexSet, w: &WeightVector) -> Result<f64> {
    set.iter().map(|n| w.get(n).map(|x| x * x)).sum()
}
