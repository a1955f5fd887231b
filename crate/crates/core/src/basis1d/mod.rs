//! One-dimensional Sturm–Liouville eigenfunction bases.
//!
//! The Jacobi family `P_n^{(α,β)}` is orthogonal on `(-1, 1)` for the weight
//! `(1-y)^α (1+y)^β`. We work with the probability density
//! `ν(y) = (1-y)^α (1+y)^β / c^{(α,β)}` and the orthonormal functions
//!
//! ```text
//! φ_n(y) = sqrt(c^{(α,β)} / κ_n^{(α,β)}) · P_n^{(α,β)}(y)
//! ```
//!
//! where `κ_n^{(α,β)}` is the squared norm of `P_n^{(α,β)}` under the
//! unnormalized weight. This gives `φ_n = sqrt(2n+1) P_n` for Legendre.
//! The Sturm–Liouville weight is `χ(y) = (1-y)^{α+1}(1+y)^{β+1} / c^{(α,β)}` and
//! the eigenvalues are `λ_n = n(n+α+β+1)`, so that
//! `∫ χ φ'_n φ'_m = λ_n δ_{nm}`.
//!
//! The Fourier family `φ_n(y) = exp(iπny)`, `n ∈ ℤ`, lives on the torus
//! `[-1, 1)` with `ν = χ = 1/2` and `λ_n = n²π²`.

pub mod quadrature;

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Beta, Distribution};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Distance from `±1` at which singular densities are clamped.
pub const ENDPOINT_CLAMP: f64 = 1e-12;

/// A one-dimensional orthonormal basis family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BasisFamily {
    Jacobi { alpha: f64, beta: f64 },
    Fourier,
}

impl BasisFamily {
    pub const LEGENDRE: BasisFamily = BasisFamily::Jacobi {
        alpha: 0.0,
        beta: 0.0,
    };
    pub const CHEBYSHEV: BasisFamily = BasisFamily::Jacobi {
        alpha: -0.5,
        beta: -0.5,
    };

    /// Jacobi family with parameter validation (`α, β > -1`).
    pub fn jacobi(alpha: f64, beta: f64) -> Result<Self> {
        let family = BasisFamily::Jacobi { alpha, beta };
        family.validate()?;
        Ok(family)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            BasisFamily::Jacobi { alpha, beta } => {
                if !(alpha > -1.0 && beta > -1.0) || !alpha.is_finite() || !beta.is_finite() {
                    return Err(Error::Domain(format!(
                        "Jacobi parameters must satisfy alpha, beta > -1 (got {alpha}, {beta})"
                    )));
                }
                Ok(())
            }
            BasisFamily::Fourier => Ok(()),
        }
    }

    pub fn is_fourier(&self) -> bool {
        matches!(self, BasisFamily::Fourier)
    }

    pub fn is_legendre(&self) -> bool {
        matches!(*self, BasisFamily::Jacobi { alpha, beta } if alpha == 0.0 && beta == 0.0)
    }

    pub fn is_chebyshev(&self) -> bool {
        matches!(*self, BasisFamily::Jacobi { alpha, beta } if alpha == -0.5 && beta == -0.5)
    }

    /// Jacobi parameters, or `None` for Fourier.
    pub fn jacobi_params(&self) -> Option<(f64, f64)> {
        match *self {
            BasisFamily::Jacobi { alpha, beta } => Some((alpha, beta)),
            BasisFamily::Fourier => None,
        }
    }

    /// Short human readable label, e.g. `legendre` or `jacobi(1,0)`.
    pub fn label(&self) -> String {
        if self.is_legendre() {
            "legendre".to_string()
        } else if self.is_chebyshev() {
            "chebyshev".to_string()
        } else {
            match *self {
                BasisFamily::Jacobi { alpha, beta } => format!("jacobi({alpha},{beta})"),
                BasisFamily::Fourier => "fourier".to_string(),
            }
        }
    }

    fn check_index(&self, n: i64) -> Result<()> {
        if !self.is_fourier() && n < 0 {
            return Err(Error::Domain(format!(
                "polynomial degree must be nonnegative (got {n})"
            )));
        }
        Ok(())
    }
}

impl fmt::Display for BasisFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Parses the labels produced by [`BasisFamily::label`].
impl FromStr for BasisFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        match t.as_str() {
            "legendre" => return Ok(BasisFamily::LEGENDRE),
            "chebyshev" => return Ok(BasisFamily::CHEBYSHEV),
            "fourier" => return Ok(BasisFamily::Fourier),
            _ => {}
        }
        let bad = || Error::Domain(format!("unknown basis family `{s}`"));
        let inner = t
            .strip_prefix("jacobi(")
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(bad)?;
        let (a, b) = inner.split_once(',').ok_or_else(bad)?;
        let alpha = a.trim().parse().map_err(|_| bad())?;
        let beta = b.trim().parse().map_err(|_| bad())?;
        BasisFamily::jacobi(alpha, beta)
    }
}

/// Sampling density on `(-1, 1)`, resolved against a basis family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Density {
    /// The orthogonality density `ν` of the basis family.
    MatchOrthogonality,
    /// The arcsine law `1 / (π sqrt(1-y²))`.
    ChebyshevArcsine,
    /// The uniform density `1/2`, also the torus density for Fourier.
    Uniform,
}

impl Density {
    pub fn label(&self) -> &'static str {
        match self {
            Density::MatchOrthogonality => "match",
            Density::ChebyshevArcsine => "chebyshev",
            Density::Uniform => "uniform",
        }
    }

    /// Exponents `(a, b)` of `(1-y)^a (1+y)^b` for this density under `family`.
    pub fn exponents(&self, family: &BasisFamily) -> (f64, f64) {
        match (self, family) {
            (Density::MatchOrthogonality, BasisFamily::Jacobi { alpha, beta }) => (*alpha, *beta),
            (Density::MatchOrthogonality, BasisFamily::Fourier) => (0.0, 0.0),
            (Density::ChebyshevArcsine, _) => (-0.5, -0.5),
            (Density::Uniform, _) => (0.0, 0.0),
        }
    }

    /// True when this density coincides with the orthogonality density of `family`.
    pub fn matches(&self, family: &BasisFamily) -> bool {
        let (a, b) = self.exponents(family);
        let (na, nb) = orthogonality_exponents(family);
        a == na && b == nb
    }

    /// Pointwise probability density.
    pub fn pdf(&self, family: &BasisFamily, y: f64) -> f64 {
        let (a, b) = self.exponents(family);
        jacobi_weight_pdf(a, b, y)
    }
}

impl fmt::Display for Density {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Density {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "match" => Ok(Density::MatchOrthogonality),
            "chebyshev" | "arcsine" => Ok(Density::ChebyshevArcsine),
            "uniform" => Ok(Density::Uniform),
            _ => Err(Error::Domain(format!(
                "unknown sampling density `{s}` (expected match, chebyshev or uniform)"
            ))),
        }
    }
}

fn orthogonality_exponents(family: &BasisFamily) -> (f64, f64) {
    match *family {
        BasisFamily::Jacobi { alpha, beta } => (alpha, beta),
        BasisFamily::Fourier => (0.0, 0.0),
    }
}

/// `ln c^{(a,b)}` with `c^{(a,b)} = ∫ (1-y)^a (1+y)^b dy = 2^{a+b+1} B(a+1, b+1)`.
pub fn ln_weight_mass(a: f64, b: f64) -> f64 {
    (a + b + 1.0) * std::f64::consts::LN_2 + libm::lgamma(a + 1.0) + libm::lgamma(b + 1.0)
        - libm::lgamma(a + b + 2.0)
}

fn clamp_open(y: f64) -> f64 {
    y.clamp(-1.0 + ENDPOINT_CLAMP, 1.0 - ENDPOINT_CLAMP)
}

/// `(1-y)^a (1+y)^b`, exact at the endpoints for nonnegative exponents.
fn endpoint_power(a: f64, b: f64, y: f64) -> f64 {
    let y = if (a < 0.0 && y >= 1.0 - ENDPOINT_CLAMP) || (b < 0.0 && y <= -1.0 + ENDPOINT_CLAMP) {
        clamp_open(y)
    } else {
        y.clamp(-1.0, 1.0)
    };
    let left = if a == 0.0 { 1.0 } else { (1.0 - y).powf(a) };
    let right = if b == 0.0 { 1.0 } else { (1.0 + y).powf(b) };
    left * right
}

fn jacobi_weight_pdf(a: f64, b: f64, y: f64) -> f64 {
    endpoint_power(a, b, y) * (-ln_weight_mass(a, b)).exp()
}

/// Orthogonality density `ν(y)`.
pub fn density_nu(family: &BasisFamily, y: f64) -> f64 {
    match *family {
        BasisFamily::Jacobi { alpha, beta } => jacobi_weight_pdf(alpha, beta, y),
        BasisFamily::Fourier => 0.5,
    }
}

/// Sturm–Liouville weight `χ(y)`.
pub fn weight_chi(family: &BasisFamily, y: f64) -> f64 {
    match *family {
        BasisFamily::Jacobi { alpha, beta } => {
            endpoint_power(alpha + 1.0, beta + 1.0, y) * (-ln_weight_mass(alpha, beta)).exp()
        }
        BasisFamily::Fourier => 0.5,
    }
}

/// `ν(y) / μ(y)` evaluated through exponent differences, so that bounded
/// ratios are exact at the endpoints.
pub fn nu_over_mu(family: &BasisFamily, mu: &Density, y: f64) -> f64 {
    let (na, nb) = orthogonality_exponents(family);
    let (ma, mb) = mu.exponents(family);
    let ln_const = match family {
        BasisFamily::Jacobi { .. } => ln_weight_mass(ma, mb) - ln_weight_mass(na, nb),
        BasisFamily::Fourier => ln_weight_mass(ma, mb) - 2f64.ln(),
    };
    endpoint_power(na - ma, nb - mb, y) * ln_const.exp()
}

/// `χ(y) / μ(y)`.
pub fn chi_over_mu(family: &BasisFamily, mu: &Density, y: f64) -> f64 {
    match family {
        BasisFamily::Jacobi { alpha, beta } => {
            let (ma, mb) = mu.exponents(family);
            let ln_const = ln_weight_mass(ma, mb) - ln_weight_mass(*alpha, *beta);
            endpoint_power(alpha + 1.0 - ma, beta + 1.0 - mb, y) * ln_const.exp()
        }
        BasisFamily::Fourier => nu_over_mu(family, mu, y),
    }
}

/// Whether `sqrt(ν/μ)` is bounded at both endpoints.
pub fn ratio_bounded(family: &BasisFamily, mu: &Density) -> bool {
    let (na, nb) = orthogonality_exponents(family);
    let (ma, mb) = mu.exponents(family);
    na - ma >= 0.0 && nb - mb >= 0.0
}

/// Eigenvalue `λ_n`.
pub fn eigenvalue(family: &BasisFamily, n: i64) -> Result<f64> {
    family.validate()?;
    family.check_index(n)?;
    Ok(eigenvalue_unchecked(family, n))
}

#[inline]
pub(crate) fn eigenvalue_unchecked(family: &BasisFamily, n: i64) -> f64 {
    match *family {
        BasisFamily::Jacobi { alpha, beta } => {
            let n = n as f64;
            n * (n + alpha + beta + 1.0)
        }
        BasisFamily::Fourier => {
            let n = n as f64;
            n * n * PI * PI
        }
    }
}

/// `ln κ_n^{(α,β)}`.
pub fn ln_jacobi_norm_const(alpha: f64, beta: f64, n: usize) -> f64 {
    if n == 0 {
        return ln_weight_mass(alpha, beta);
    }
    let nf = n as f64;
    (alpha + beta + 1.0) * std::f64::consts::LN_2 - (2.0 * nf + alpha + beta + 1.0).ln()
        + libm::lgamma(nf + alpha + 1.0)
        + libm::lgamma(nf + beta + 1.0)
        - libm::lgamma(nf + 1.0)
        - libm::lgamma(nf + alpha + beta + 1.0)
}

/// Squared norm `κ_n^{(α,β)}` of `P_n^{(α,β)}` under `(1-y)^α (1+y)^β`.
pub fn jacobi_norm_const(alpha: f64, beta: f64, n: i64) -> Result<f64> {
    BasisFamily::jacobi(alpha, beta)?;
    if n < 0 {
        return Err(Error::Domain(format!(
            "degree must be nonnegative (got {n})"
        )));
    }
    Ok(ln_jacobi_norm_const(alpha, beta, n as usize).exp())
}

/// Scale factor mapping `P_n^{(α,β)}` to the orthonormal `φ_n`.
#[inline]
pub fn jacobi_orthonormal_scale(alpha: f64, beta: f64, n: usize) -> f64 {
    (0.5 * (ln_weight_mass(alpha, beta) - ln_jacobi_norm_const(alpha, beta, n))).exp()
}

/// Classical (unnormalized) Jacobi polynomials `P_0..=P_nmax` at `y`, written into `out`.
pub fn jacobi_p_all(alpha: f64, beta: f64, nmax: usize, y: f64, out: &mut Vec<f64>) {
    out.clear();
    out.push(1.0);
    if nmax == 0 {
        return;
    }
    let ab = alpha + beta;
    out.push(0.5 * (alpha - beta) + 0.5 * (ab + 2.0) * y);
    let a2b2 = alpha * alpha - beta * beta;
    for n in 2..=nmax {
        let nf = n as f64;
        let c = 2.0 * nf + ab;
        let a1 = 2.0 * nf * (nf + ab) * (c - 2.0);
        let a2 = (c - 1.0) * a2b2;
        let a3 = (c - 2.0) * (c - 1.0) * c;
        let a4 = 2.0 * (nf + alpha - 1.0) * (nf + beta - 1.0) * c;
        let p = ((a2 + a3 * y) * out[n - 1] - a4 * out[n - 2]) / a1;
        out.push(p);
    }
}

/// Unnormalized `P_n^{(α,β)}(y)`.
pub fn jacobi_p(alpha: f64, beta: f64, n: usize, y: f64) -> f64 {
    let mut buf = Vec::with_capacity(n + 1);
    jacobi_p_all(alpha, beta, n, y, &mut buf);
    buf[n]
}

/// Orthonormal values `φ_0..=φ_nmax` and derivatives `φ'_0..=φ'_nmax` for a Jacobi family.
///
/// Derivatives use `P'_n^{(α,β)} = (n+α+β+1)/2 · P_{n-1}^{(α+1,β+1)}`.
pub fn jacobi_tables(
    alpha: f64,
    beta: f64,
    nmax: usize,
    y: f64,
    values: &mut Vec<f64>,
    derivs: &mut Vec<f64>,
) {
    jacobi_p_all(alpha, beta, nmax, y, values);
    let mut shifted = Vec::with_capacity(nmax);
    if nmax > 0 {
        jacobi_p_all(alpha + 1.0, beta + 1.0, nmax - 1, y, &mut shifted);
    }
    derivs.clear();
    for n in 0..=nmax {
        let scale = jacobi_orthonormal_scale(alpha, beta, n);
        values[n] *= scale;
        let d = if n == 0 {
            0.0
        } else {
            0.5 * (n as f64 + alpha + beta + 1.0) * shifted[n - 1]
        };
        derivs.push(scale * d);
    }
}

fn check_point(family: &BasisFamily, y: f64) -> Result<()> {
    if !y.is_finite() || !(-1.0..=1.0).contains(&y) {
        return Err(Error::Domain(format!(
            "evaluation point {y} outside [-1, 1] for {}",
            family.label()
        )));
    }
    Ok(())
}

fn complex_required<T: Scalar>(family: &BasisFamily) -> Result<()> {
    if family.is_fourier() && !T::IS_COMPLEX {
        return Err(Error::Unsupported(
            "the Fourier basis requires complex scalars".into(),
        ));
    }
    Ok(())
}

/// Orthonormal basis function `φ_n(y)`.
pub fn eval_basis<T: Scalar>(family: &BasisFamily, n: i64, y: f64) -> Result<T> {
    family.validate()?;
    family.check_index(n)?;
    check_point(family, y)?;
    complex_required::<T>(family)?;
    Ok(match *family {
        BasisFamily::Jacobi { alpha, beta } => {
            let n = n as usize;
            T::from_real(jacobi_orthonormal_scale(alpha, beta, n) * jacobi_p(alpha, beta, n, y))
        }
        BasisFamily::Fourier => T::from_complex(fourier_value(n, y)),
    })
}

/// Derivative `φ'_n(y)`.
pub fn eval_basis_deriv<T: Scalar>(family: &BasisFamily, n: i64, y: f64) -> Result<T> {
    family.validate()?;
    family.check_index(n)?;
    check_point(family, y)?;
    complex_required::<T>(family)?;
    Ok(match *family {
        BasisFamily::Jacobi { alpha, beta } => {
            let n = n as usize;
            if n == 0 {
                return Ok(T::from_real(0.0));
            }
            let shifted = jacobi_p(alpha + 1.0, beta + 1.0, n - 1, y);
            T::from_real(
                jacobi_orthonormal_scale(alpha, beta, n)
                    * 0.5
                    * (n as f64 + alpha + beta + 1.0)
                    * shifted,
            )
        }
        BasisFamily::Fourier => T::from_complex(fourier_deriv(n, y)),
    })
}

#[inline]
pub(crate) fn fourier_value(n: i64, y: f64) -> Complex64 {
    Complex64::from_polar(1.0, PI * n as f64 * y)
}

#[inline]
pub(crate) fn fourier_deriv(n: i64, y: f64) -> Complex64 {
    Complex64::new(0.0, PI * n as f64) * fourier_value(n, y)
}

/// Draws `count` i.i.d. points from `density` (resolved against `family`).
///
/// Uniform draws use an affine map of unit uniforms, the arcsine law uses
/// `cos(πU)` and general Jacobi densities use a Beta variate.
pub fn sample_1d<R: Rng + ?Sized>(
    family: &BasisFamily,
    density: &Density,
    count: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    family.validate()?;
    let (a, b) = density.exponents(family);
    let torus = family.is_fourier() && a == 0.0 && b == 0.0;
    let beta_dist = if a == 0.0 && b == 0.0 || a == -0.5 && b == -0.5 {
        None
    } else {
        Some(
            Beta::new(b + 1.0, a + 1.0)
                .map_err(|e| Error::Domain(format!("invalid sampling density: {e}")))?,
        )
    };
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let y = if a == 0.0 && b == 0.0 {
            2.0 * rng.random::<f64>() - 1.0
        } else if a == -0.5 && b == -0.5 {
            (PI * rng.random::<f64>()).cos()
        } else {
            2.0 * beta_dist.as_ref().expect("beta sampler").sample(rng) - 1.0
        };
        let inside = if torus {
            (-1.0..1.0).contains(&y)
        } else {
            y > -1.0 && y < 1.0
        };
        if inside {
            out.push(y);
        }
    }
    Ok(out)
}
