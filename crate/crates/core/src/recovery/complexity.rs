//! Sample-complexity estimates with the universal constant set to 1.

use std::fmt;
use std::str::FromStr;

use crate::basis1d::{eigenvalue, BasisFamily, Density};
use crate::error::{Error, Result};
use crate::index_sets::{hyperbolic_cross, k_of_s, kappa, KMode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ComplexitySetting {
    /// `max_Λ (1+κ_n)/(1+λ_n) · K(s) · L` for gradient-augmented sampling.
    GradientAugmented,
    /// `K(s) · log(1/ε) · L` for function samples only.
    Unaugmented,
    /// `s^γ · log(2d) · log²(s/ε)` for Jacobi families with a known `K(s)` exponent.
    JacobiClosedForm,
    /// Legendre sampled from the Chebyshev density.
    LegendrePreconditioned,
    /// `s · (log(N/ε) + log s · log(s/ε))` for the Fourier basis.
    FourierCase,
}

impl ComplexitySetting {
    pub const ALL: [ComplexitySetting; 5] = [
        ComplexitySetting::GradientAugmented,
        ComplexitySetting::Unaugmented,
        ComplexitySetting::JacobiClosedForm,
        ComplexitySetting::LegendrePreconditioned,
        ComplexitySetting::FourierCase,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            ComplexitySetting::GradientAugmented => "gradient-augmented",
            ComplexitySetting::Unaugmented => "unaugmented",
            ComplexitySetting::JacobiClosedForm => "jacobi-closed-form",
            ComplexitySetting::LegendrePreconditioned => "legendre-preconditioned",
            ComplexitySetting::FourierCase => "fourier",
        }
    }
}

impl fmt::Display for ComplexitySetting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for ComplexitySetting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase();
        ComplexitySetting::ALL
            .into_iter()
            .find(|c| c.label() == key)
            .ok_or_else(|| Error::Domain(format!("unknown complexity setting `{s}`")))
    }
}

/// `value = coherence_factor · k_factor · log_factor`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexityEstimate {
    pub setting: ComplexitySetting,
    pub value: f64,
    /// `K(s)` or its closed-form replacement.
    pub k_factor: f64,
    /// `max_{n∈Λ} (1+κ_n)/(1+λ_n)`, or 1 where the bound has no such term.
    pub coherence_factor: f64,
    pub log_factor: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexityQuery {
    pub family: BasisFamily,
    pub mu: Density,
    pub d: usize,
    pub s: usize,
    pub eps: f64,
    pub k_mode: KMode,
    /// `N = |Λ|`, used by the Fourier case only; defaults to the hyperbolic
    /// cross size.
    pub n: Option<usize>,
}

pub fn sample_complexity_estimate(
    q: &ComplexityQuery,
    setting: ComplexitySetting,
) -> Result<ComplexityEstimate> {
    let ComplexityQuery {
        family,
        mu,
        d,
        s,
        eps,
        k_mode,
        n,
    } = *q;
    family.validate()?;
    if d == 0 || s == 0 {
        return Err(Error::Domain(format!("need d, s >= 1, got d={d}, s={s}")));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Domain(format!("ε must lie in (0, 1), got {eps}")));
    }
    let (df, sf) = (d as f64, s as f64);
    let jacobi_only = |what: &str| -> Result<()> {
        if family.is_fourier() {
            Err(Error::Unsupported(format!("the {what} bound covers Jacobi families only")))
        } else {
            Ok(())
        }
    };

    let (k_factor, coherence_factor, log_factor) = match setting {
        ComplexitySetting::GradientAugmented => {
            jacobi_only("gradient-augmented")?;
            let k = k_of_s(&family, &mu, d, s, k_mode)?;
            let mut coh = 1.0f64;
            for idx in hyperbolic_cross(d, s)?.iter() {
                let lambda: f64 = idx
                    .entries()
                    .iter()
                    .map(|&e| eigenvalue(&family, e as i64))
                    .sum::<Result<f64>>()?;
                coh = coh.max((1.0 + kappa(&family, &mu, idx)?) / (1.0 + lambda));
            }
            let ls = (sf / eps).ln();
            let l = (df + ls).min((2.0 * df).ln() * ls) + k.ln() * (k / eps).ln();
            (k, coh, l)
        }
        ComplexitySetting::Unaugmented => {
            jacobi_only("unaugmented")?;
            let k = k_of_s(&family, &mu, d, s, k_mode)?;
            let l2s = (2.0 * sf).ln();
            let l = (l2s + df).min((2.0 * df).ln() * l2s) + k.ln();
            (k, 1.0, (1.0 / eps).ln() * l)
        }
        ComplexitySetting::JacobiClosedForm => {
            jacobi_only("closed-form Jacobi")?;
            let (alpha, beta) = family.jacobi_params().expect("Jacobi family");
            if !mu.matches(&family) || alpha < -0.5 || beta < -0.5 {
                return Err(Error::Unsupported(format!(
                    "the closed form needs α, β ≥ −1/2 and μ = ν, got {} with {} sampling",
                    family.label(),
                    mu.label()
                )));
            }
            // s^γ is the closed-form K(s) bound for these parameters
            let k = k_of_s(&family, &Density::MatchOrthogonality, d, s, KMode::PaperBound)?;
            (k, 1.0, (2.0 * df).ln() * (sf / eps).ln().powi(2))
        }
        ComplexitySetting::LegendrePreconditioned => {
            if !family.is_legendre() {
                return Err(Error::Unsupported(format!(
                    "preconditioned bound is for Legendre, got {}",
                    family.label()
                )));
            }
            if mu != Density::ChebyshevArcsine {
                return Err(Error::Unsupported(format!(
                    "preconditioned bound needs arcsine sampling, got {}",
                    mu.label()
                )));
            }
            let k = k_of_s(&family, &Density::ChebyshevArcsine, d, s, KMode::PaperBound)?;
            (k, 1.0, (df + sf.ln()) * (df + (sf / eps).ln()))
        }
        ComplexitySetting::FourierCase => {
            if !family.is_fourier() {
                return Err(Error::Unsupported(format!(
                    "Fourier bound requested for {}",
                    family.label()
                )));
            }
            let n = match n {
                Some(n) => n,
                None => crate::index_sets::hyperbolic_cross_signed(d, s)?.len(),
            };
            if n == 0 {
                return Err(Error::Domain("N must be positive".into()));
            }
            (sf, 1.0, (n as f64 / eps).ln() + sf.ln() * (sf / eps).ln())
        }
    };
    Ok(ComplexityEstimate {
        setting,
        value: coherence_factor * k_factor * log_factor,
        k_factor,
        coherence_factor,
        log_factor,
    })
}
