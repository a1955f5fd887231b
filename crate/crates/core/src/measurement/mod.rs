//! Random sampling and assembly of the gradient-augmented linear system.
//!
//! Rows are grouped in blocks: block 0 holds function values and block
//! `k = 1..d` holds the partial derivatives `∂_k`. Every entry of block `k`
//! at point `y_i` is scaled by `sqrt(τ_k(y_i) / m)`, where `m` is the number
//! of function samples, and every column by `1/sqrt(1+λ_n)` when derivative
//! rows are present. With these scalings `E(A*A) = I`.

mod coherence;
mod export;

use nalgebra::{DMatrix, DVector};
use rand::seq::index::sample as sample_indices;
use rayon::prelude::*;

use crate::basis1d::{
    chi_over_mu, eigenvalue_unchecked, nu_over_mu, sample_1d, BasisFamily, Density,
};
use crate::error::{Error, Result};
use crate::index_sets::IndexSet;
use crate::rng::{derive_seed, rng_from_seed};
use crate::scalar::Scalar;
use crate::tensor::TensorBasis;

pub use coherence::{local_coherence, Coherence, CoherenceBudget, CoherenceEstimate};
pub use export::{read_binary, write_binary, write_csv, EnsembleDump, EnsembleHeader};

/// Default cap on the bytes held by an assembled matrix.
pub const DEFAULT_MEMORY_BUDGET: usize = 4 << 30;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SamplingMode {
    Unaugmented,
    FullGradient,
    /// Gradients at a fraction `p` of the points.
    FractionalGradient(f64),
    /// Gradients at a second, independently drawn point set.
    IndependentGradient,
}

impl SamplingMode {
    pub fn validate(&self) -> Result<()> {
        if let SamplingMode::FractionalGradient(p) = *self {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Domain(format!(
                    "gradient fraction {p} outside [0, 1]"
                )));
            }
        }
        Ok(())
    }

    pub fn label(&self) -> String {
        match self {
            SamplingMode::Unaugmented => "unaugmented".into(),
            SamplingMode::FullGradient => "full".into(),
            SamplingMode::FractionalGradient(p) => format!("fractional:{p}"),
            SamplingMode::IndependentGradient => "independent".into(),
        }
    }

    /// Number of gradient samples taken alongside `m` function samples.
    pub fn gradient_count(&self, m: usize) -> usize {
        match *self {
            SamplingMode::Unaugmented => 0,
            SamplingMode::FullGradient | SamplingMode::IndependentGradient => m,
            SamplingMode::FractionalGradient(p) => (p * m as f64 - 1e-9).ceil().max(0.0) as usize,
        }
    }
}

impl std::str::FromStr for SamplingMode {
    type Err = Error;

    /// Parses the forms produced by [`SamplingMode::label`].
    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase();
        let mode = match key.as_str() {
            "unaugmented" => SamplingMode::Unaugmented,
            "full" => SamplingMode::FullGradient,
            "independent" => SamplingMode::IndependentGradient,
            _ => {
                let p = key
                    .strip_prefix("fractional:")
                    .and_then(|p| p.parse::<f64>().ok())
                    .ok_or_else(|| {
                        Error::Domain(format!(
                            "unknown sampling mode `{s}` (expected unaugmented, full, \
                             independent or fractional:<p>)"
                        ))
                    })?;
                SamplingMode::FractionalGradient(p)
            }
        };
        mode.validate()?;
        Ok(mode)
    }
}

/// Points in `(-1, 1)^d` drawn i.i.d. from a tensor density.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    dim: usize,
    coords: Vec<f64>,
    pub family: BasisFamily,
    pub density: Density,
    pub seed: u64,
}

impl SampleSet {
    /// Wraps explicit points (row-major, `d` coordinates each).
    pub fn from_points(
        family: BasisFamily,
        density: Density,
        dim: usize,
        coords: Vec<f64>,
        seed: u64,
    ) -> Result<Self> {
        if dim == 0 || !coords.len().is_multiple_of(dim) {
            return Err(Error::Dimension(format!(
                "{} coordinates do not form points of dimension {dim}",
                coords.len()
            )));
        }
        Ok(SampleSet {
            dim,
            coords,
            family,
            density,
            seed,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> std::slice::Chunks<'_, f64> {
        self.coords.chunks(self.dim)
    }

    /// The first `count` points.
    pub fn prefix(&self, count: usize) -> SampleSet {
        SampleSet {
            coords: self.coords[..count.min(self.len()) * self.dim].to_vec(),
            ..self.clone()
        }
    }
}

/// Draws `m` points from `μ^{⊗d}`, deterministically in `seed`.
pub fn sample_points(
    family: &BasisFamily,
    mu: &Density,
    d: usize,
    m: usize,
    seed: u64,
) -> Result<SampleSet> {
    if d == 0 {
        return Err(Error::Dimension("sample points need d >= 1".into()));
    }
    let mut rng = rng_from_seed(seed);
    let coords = sample_1d(family, mu, m * d, &mut rng)?;
    SampleSet::from_points(*family, *mu, d, coords, seed)
}

fn check_interior(family: &BasisFamily, y: &[f64]) -> Result<()> {
    let ok = |v: f64| {
        if family.is_fourier() {
            (-1.0..1.0).contains(&v)
        } else {
            v > -1.0 && v < 1.0
        }
    };
    if y.iter().all(|&v| ok(v)) {
        Ok(())
    } else {
        Err(Error::Domain(format!("point {y:?} is not interior")))
    }
}

/// `τ_0(y) = ν(y)/μ(y)` and `τ_k(y) = χ(y_k) Π_{j≠k} ν(y_j) / μ(y)`.
pub fn tau_k(family: &BasisFamily, mu: &Density, y: &[f64], k: usize) -> Result<f64> {
    family.validate()?;
    check_interior(family, y)?;
    if k > y.len() {
        return Err(Error::Domain(format!(
            "block index {k} exceeds dimension {}",
            y.len()
        )));
    }
    Ok(tau_unchecked(family, mu, y, k))
}

pub(crate) fn tau_unchecked(family: &BasisFamily, mu: &Density, y: &[f64], k: usize) -> f64 {
    y.iter()
        .enumerate()
        .map(|(j, &v)| {
            if j + 1 == k {
                chi_over_mu(family, mu, v)
            } else {
                nu_over_mu(family, mu, v)
            }
        })
        .product()
}

/// `(sqrt(1+λ_n))_{n∈Λ}`.
pub fn q_scaling(family: &BasisFamily, set: &IndexSet) -> Vec<f64> {
    set.iter()
        .map(|n| {
            let lambda: f64 = n
                .entries()
                .iter()
                .map(|&e| eigenvalue_unchecked(family, e as i64))
                .sum();
            (1.0 + lambda).sqrt()
        })
        .collect()
}

/// Function and gradient evaluations of the target.
pub trait SampleOracle<T: Scalar>: Sync {
    fn value(&self, y: &[f64]) -> Result<T>;

    /// Writes `∂_k f(y)` into `out[k-1]`.
    fn gradient(&self, _y: &[f64], _out: &mut [T]) -> Result<()> {
        Err(Error::Oracle("no gradient available".into()))
    }
}

/// Contiguous rows of one block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RowBlock {
    /// 0 for function values, `k` for `∂_k`.
    pub k: usize,
    pub start: usize,
    pub len: usize,
}

#[derive(Debug, Clone)]
pub struct AssemblyOptions {
    pub memory_budget: usize,
    /// Pick the fractional-gradient points at random instead of taking the first ones.
    pub random_fractional_subset: bool,
}

impl Default for AssemblyOptions {
    fn default() -> Self {
        AssemblyOptions {
            memory_budget: DEFAULT_MEMORY_BUDGET,
            random_fractional_subset: false,
        }
    }
}

/// The scaled system `A = Ā Q⁻¹`, its right-hand side and bookkeeping.
#[derive(Debug, Clone)]
pub struct MeasurementEnsemble<T: Scalar> {
    /// `A = Ā Q⁻¹`.
    pub matrix: DMatrix<T>,
    /// The unscaled system `Ā`.
    pub a_bar: DMatrix<T>,
    pub rhs: DVector<T>,
    /// Diagonal of `Q`.
    pub q: Vec<f64>,
    pub mode: SamplingMode,
    pub index_set: IndexSet,
    pub family: BasisFamily,
    pub density: Density,
    pub blocks: Vec<RowBlock>,
    /// Function samples `m_o`.
    pub function_samples: usize,
    /// Gradient samples `m_g`.
    pub gradient_samples: usize,
    pub seed: u64,
}

impl<T: Scalar> MeasurementEnsemble<T> {
    /// Cost `m̃ = m_o + m_g`.
    pub fn cost(&self) -> usize {
        self.function_samples + self.gradient_samples
    }

    pub fn rows(&self) -> usize {
        self.matrix.nrows()
    }
}

struct PointRows<T> {
    point: usize,
    /// `(block, row entries, rhs)`.
    rows: Vec<(usize, Vec<T>, T)>,
}

enum Rhs<'a, T: Scalar> {
    None,
    Oracle(&'a dyn SampleOracle<T>),
}

/// Assembles `A` and the right-hand side from function and gradient oracles.
pub fn assemble<T: Scalar>(
    set: &IndexSet,
    points: &SampleSet,
    oracle: &dyn SampleOracle<T>,
    mode: SamplingMode,
    options: &AssemblyOptions,
) -> Result<MeasurementEnsemble<T>> {
    assemble_inner(set, points, Rhs::Oracle(oracle), mode, options)
}

/// Assembles `A` only; the right-hand side is zero.
pub fn assemble_matrix<T: Scalar>(
    set: &IndexSet,
    points: &SampleSet,
    mode: SamplingMode,
    options: &AssemblyOptions,
) -> Result<MeasurementEnsemble<T>> {
    assemble_inner(set, points, Rhs::None, mode, options)
}

fn assemble_inner<T: Scalar>(
    set: &IndexSet,
    points: &SampleSet,
    rhs_source: Rhs<'_, T>,
    mode: SamplingMode,
    options: &AssemblyOptions,
) -> Result<MeasurementEnsemble<T>> {
    mode.validate()?;
    let family = points.family;
    let mu = points.density;
    if set.is_empty() {
        return Err(Error::Domain("index set is empty".into()));
    }
    if set.dim() != points.dim() {
        return Err(Error::Dimension(format!(
            "index set has dimension {}, points have {}",
            set.dim(),
            points.dim()
        )));
    }
    let basis = TensorBasis::new(family, set)?;
    let d = set.dim();
    let n = set.len();
    let m = points.len();
    let mg = mode.gradient_count(m);

    let gradient_points: Option<SampleSet> = match mode {
        SamplingMode::Unaugmented => None,
        SamplingMode::FullGradient => Some(points.clone()),
        SamplingMode::FractionalGradient(_) => {
            if options.random_fractional_subset {
                let mut rng = rng_from_seed(derive_seed(points.seed, "fractional-subset", 0));
                let mut chosen = sample_indices(&mut rng, m, mg).into_vec();
                chosen.sort_unstable();
                let coords = chosen
                    .iter()
                    .flat_map(|&i| points.point(i).to_vec())
                    .collect();
                Some(SampleSet::from_points(family, mu, d, coords, points.seed)?)
            } else {
                Some(points.prefix(mg))
            }
        }
        SamplingMode::IndependentGradient => Some(sample_points(
            &family,
            &mu,
            d,
            m,
            derive_seed(points.seed, "gradient-points", 0),
        )?),
    };
    let grad_rows = gradient_points.as_ref().map_or(0, |g| g.len() * d);
    let total_rows = m + grad_rows;
    let bytes = total_rows
        .saturating_mul(n)
        .saturating_mul(2 * std::mem::size_of::<T>());
    if bytes > options.memory_budget {
        return Err(Error::ResourceLimit {
            what: "measurement matrix bytes",
            requested: bytes,
            limit: options.memory_budget,
        });
    }

    let has_derivative_rows = grad_rows > 0;
    let q = if has_derivative_rows {
        q_scaling(&family, set)
    } else {
        vec![1.0; n]
    };
    let scale = 1.0 / (m.max(1) as f64).sqrt();

    // Points of the value block are 0..m; gradient points follow.
    let value_point = |i: usize| points.point(i);
    let oracle = match rhs_source {
        Rhs::Oracle(o) => Some(o),
        Rhs::None => None,
    };

    let value_rows: Vec<PointRows<T>> = (0..m)
        .into_par_iter()
        .map(|i| -> Result<PointRows<T>> {
            let y = value_point(i);
            check_interior(&family, y)?;
            let mut vals = Vec::with_capacity(n);
            basis.values::<T>(y, &mut vals)?;
            let w = scale * tau_unchecked(&family, &mu, y, 0).sqrt();
            for v in vals.iter_mut() {
                *v *= T::from_real(w);
            }
            let r = match oracle {
                Some(o) => o.value(y)? * T::from_real(w),
                None => T::zero(),
            };
            Ok(PointRows {
                point: i,
                rows: vec![(0, vals, r)],
            })
        })
        .collect::<Result<_>>()?;

    let grad_rows_per_point: Vec<PointRows<T>> = match &gradient_points {
        None => Vec::new(),
        Some(gp) => (0..gp.len())
            .into_par_iter()
            .map(|i| -> Result<PointRows<T>> {
                let y = gp.point(i);
                check_interior(&family, y)?;
                let mut out = vec![Vec::with_capacity(n); d + 1];
                basis.values_and_gradients::<T>(y, &mut out)?;
                let mut grad = vec![T::zero(); d];
                if let Some(o) = oracle {
                    o.gradient(y, &mut grad)?;
                }
                let rows = (1..=d)
                    .map(|k| {
                        let w = scale * tau_unchecked(&family, &mu, y, k).sqrt();
                        let row: Vec<T> = out[k].iter().map(|&v| v * T::from_real(w)).collect();
                        (k, row, grad[k - 1] * T::from_real(w))
                    })
                    .collect();
                Ok(PointRows { point: i, rows })
            })
            .collect::<Result<_>>()?,
    };

    let mut a_bar = DMatrix::<T>::zeros(total_rows, n);
    let mut rhs = DVector::<T>::zeros(total_rows);
    let mut blocks = vec![RowBlock {
        k: 0,
        start: 0,
        len: m,
    }];
    let gp_len = gradient_points.as_ref().map_or(0, SampleSet::len);
    if has_derivative_rows {
        for k in 1..=d {
            blocks.push(RowBlock {
                k,
                start: m + (k - 1) * gp_len,
                len: gp_len,
            });
        }
    }
    for pr in value_rows.iter().chain(&grad_rows_per_point) {
        for (k, row, r) in &pr.rows {
            let idx = blocks[*k].start + pr.point;
            for (j, v) in row.iter().enumerate() {
                a_bar[(idx, j)] = *v;
            }
            rhs[idx] = *r;
        }
    }
    let mut matrix = a_bar.clone();
    if has_derivative_rows {
        for (j, mut col) in matrix.column_iter_mut().enumerate() {
            col.scale_mut(1.0 / q[j]);
        }
    }

    Ok(MeasurementEnsemble {
        matrix,
        a_bar,
        rhs,
        q,
        mode,
        index_set: set.clone(),
        family,
        density: mu,
        blocks,
        function_samples: m,
        gradient_samples: mg,
        seed: points.seed,
    })
}

/// Deviation of `A*A` from the identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsotropyDeviation {
    /// Spectral norm `‖A*A − I‖₂`.
    pub spectral: f64,
    /// `max_{ij} |(A*A − I)_{ij}|`.
    pub max_entry: f64,
}

/// Draws `m` fresh points and measures `A*A − I`.
pub fn isotropy_deviation<T: Scalar>(
    family: &BasisFamily,
    mu: &Density,
    set: &IndexSet,
    mode: SamplingMode,
    m: usize,
    seed: u64,
) -> Result<IsotropyDeviation> {
    let points = sample_points(family, mu, set.dim(), m, seed)?;
    let ens = assemble_matrix::<T>(set, &points, mode, &AssemblyOptions::default())?;
    Ok(gram_deviation(&ens.matrix))
}

pub fn gram_deviation<T: Scalar>(a: &DMatrix<T>) -> IsotropyDeviation {
    let mut g = a.ad_mul(a);
    for i in 0..g.nrows() {
        g[(i, i)] -= T::one();
    }
    let max_entry = g.iter().map(|v| v.modulus()).fold(0.0, f64::max);
    let spectral = g
        .symmetric_eigenvalues()
        .iter()
        .map(|v| v.abs())
        .fold(0.0, f64::max);
    IsotropyDeviation {
        spectral,
        max_entry,
    }
}
