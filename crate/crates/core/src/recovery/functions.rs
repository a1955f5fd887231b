//! Target functions with analytic gradients.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::Rng;

use crate::basis1d::BasisFamily;
use crate::error::{Error, Result};
use crate::index_sets::{IndexSet, MultiIndex};
use crate::measurement::SampleOracle;
use crate::rng::rng_from_seed;

use super::approximant::Approximant;

/// Largest gradient/finite-difference gap accepted for a built-in oracle.
pub const GRADIENT_CHECK_TOL: f64 = 1e-5;
const GRADIENT_PROBES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TestFunction {
    /// `Π_j (d/4) / (d/4 + (y_j − a_j)²)` with `a_j = (−1)^j / (j+1)`.
    F1,
    /// `Π_{j>d/2} cos(16 y_j / 2^j) / Π_{j≤d/2} (1 − y_j / 4^j)`.
    F2,
    /// `exp(−Σ_j y_j / (2d))`.
    F3,
}

impl TestFunction {
    pub fn label(&self) -> &'static str {
        match self {
            TestFunction::F1 => "f1",
            TestFunction::F2 => "f2",
            TestFunction::F3 => "f3",
        }
    }
}

impl fmt::Display for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for TestFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "f1" => Ok(TestFunction::F1),
            "f2" => Ok(TestFunction::F2),
            "f3" => Ok(TestFunction::F3),
            _ => Err(Error::Domain(format!("unknown test function `{s}`"))),
        }
    }
}

type ValueFn = dyn Fn(&[f64]) -> f64 + Send + Sync;
type GradientFn = dyn Fn(&[f64], &mut [f64]) + Send + Sync;

/// A real target `f : (−1, 1)^d → ℝ` with its gradient.
///
/// Without an analytic gradient, partials come from central differences.
#[derive(Clone)]
pub struct FunctionOracle {
    dim: usize,
    name: String,
    value: Arc<ValueFn>,
    gradient: Option<Arc<GradientFn>>,
}

impl fmt::Debug for FunctionOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FunctionOracle")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("analytic_gradient", &self.gradient.is_some())
            .finish()
    }
}

impl FunctionOracle {
    pub fn new(
        name: impl Into<String>,
        dim: usize,
        value: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        gradient: impl Fn(&[f64], &mut [f64]) + Send + Sync + 'static,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Dimension("oracle needs d >= 1".into()));
        }
        Ok(FunctionOracle {
            dim,
            name: name.into(),
            value: Arc::new(value),
            gradient: Some(Arc::new(gradient)),
        })
    }

    /// An oracle whose gradient is approximated by central differences.
    pub fn from_value(
        name: impl Into<String>,
        dim: usize,
        value: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Dimension("oracle needs d >= 1".into()));
        }
        Ok(FunctionOracle {
            dim,
            name: name.into(),
            value: Arc::new(value),
            gradient: None,
        })
    }

    /// The basis function `φ_n` itself, for exact-recovery checks.
    pub fn basis_function(family: BasisFamily, n: MultiIndex) -> Result<Self> {
        let set = IndexSet::new(n.dim(), [n.clone()])?;
        let mut oracle = Self::from_approximant(Approximant::new(family, set, vec![1.0])?);
        oracle.name = format!("phi{n}");
        Ok(oracle)
    }

    /// The polynomial `f̂` as a target, for in-span recovery checks.
    pub fn from_approximant(approx: Approximant) -> Self {
        let d = approx.dim();
        let a = Arc::new(approx);
        let b = Arc::clone(&a);
        FunctionOracle {
            dim: d,
            name: "approximant".into(),
            value: Arc::new(move |y| a.value(y).unwrap_or(f64::NAN)),
            gradient: Some(Arc::new(move |y, g| {
                if b.value_and_gradient(y, g).is_err() {
                    g.fill(f64::NAN);
                }
            })),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn has_analytic_gradient(&self) -> bool {
        self.gradient.is_some()
    }

    pub fn eval(&self, y: &[f64]) -> f64 {
        (self.value)(y)
    }

    /// Writes `∂_k f(y)` into `out[k]`, `k = 0..d`.
    pub fn eval_gradient(&self, y: &[f64], out: &mut [f64]) {
        match &self.gradient {
            Some(g) => g(y, out),
            None => central_difference(&*self.value, y, out),
        }
    }

    /// Largest absolute gap between the gradient and central differences
    /// of the value, over `probes` points drawn uniformly from
    /// `[−0.95, 0.95]^d`.
    pub fn gradient_check(&self, probes: usize, seed: u64) -> f64 {
        let mut rng = rng_from_seed(seed);
        let mut y = vec![0.0; self.dim];
        let mut exact = vec![0.0; self.dim];
        let mut approx = vec![0.0; self.dim];
        let mut worst = 0.0f64;
        for _ in 0..probes {
            y.iter_mut().for_each(|v| *v = rng.random_range(-0.95..0.95));
            self.eval_gradient(&y, &mut exact);
            central_difference(&*self.value, &y, &mut approx);
            for (a, b) in exact.iter().zip(&approx) {
                worst = worst.max((a - b).abs());
            }
        }
        worst
    }
}

fn central_difference(f: &ValueFn, y: &[f64], out: &mut [f64]) {
    let mut p = y.to_vec();
    for k in 0..y.len() {
        // step near the cube root of machine epsilon, kept inside the domain
        let h = (1e-5f64).min(0.5 * (1.0 - y[k].abs())).max(1e-12);
        p[k] = y[k] + h;
        let up = f(&p);
        p[k] = y[k] - h;
        let down = f(&p);
        p[k] = y[k];
        out[k] = (up - down) / (2.0 * h);
    }
}

impl SampleOracle<f64> for FunctionOracle {
    fn value(&self, y: &[f64]) -> Result<f64> {
        let v = self.eval(y);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Oracle(format!("{} is not finite at {y:?}", self.name)))
        }
    }

    fn gradient(&self, y: &[f64], out: &mut [f64]) -> Result<()> {
        self.eval_gradient(y, out);
        if out.iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(Error::Oracle(format!(
                "gradient of {} is not finite at {y:?}",
                self.name
            )))
        }
    }
}

/// One of the three benchmark targets in dimension `d`, with its analytic
/// gradient checked against finite differences.
pub fn test_function(id: TestFunction, d: usize) -> Result<FunctionOracle> {
    if d == 0 {
        return Err(Error::Dimension("test functions need d >= 1".into()));
    }
    let oracle = match id {
        TestFunction::F1 => f1(d)?,
        TestFunction::F2 => {
            if !d.is_multiple_of(2) {
                return Err(Error::Domain(format!("f2 splits the coordinates in half; d={d} is odd")));
            }
            f2(d)?
        }
        TestFunction::F3 => f3(d)?,
    };
    let gap = oracle.gradient_check(GRADIENT_PROBES, 0x5eed ^ d as u64);
    if gap > GRADIENT_CHECK_TOL {
        return Err(Error::Oracle(format!(
            "{} gradient disagrees with finite differences by {gap:e}",
            oracle.name
        )));
    }
    Ok(oracle)
}

/// Peak locations `a_j = (−1)^j / (j+1)`, `j = 1..=d`.
pub fn f1_peak(d: usize) -> Vec<f64> {
    (1..=d)
        .map(|j| if j % 2 == 0 { 1.0 } else { -1.0 } / (j as f64 + 1.0))
        .collect()
}

fn f1(d: usize) -> Result<FunctionOracle> {
    let a = f1_peak(d);
    let b = a.clone();
    let c = d as f64 / 4.0;
    FunctionOracle::new(
        "f1",
        d,
        move |y| y.iter().zip(&a).map(|(v, aj)| c / (c + (v - aj).powi(2))).product(),
        move |y, g| {
            let f: f64 = y.iter().zip(&b).map(|(v, aj)| c / (c + (v - aj).powi(2))).product();
            for (k, (v, aj)) in y.iter().zip(&b).enumerate() {
                let t = v - aj;
                g[k] = -2.0 * t / (c + t * t) * f;
            }
        },
    )
}

fn f2(d: usize) -> Result<FunctionOracle> {
    let half = d / 2;
    // coordinate j (1-based) has rate 16/2^j in the cosine and 1/4^j in the pole
    let rate = |j: usize| 16.0 / 2f64.powi(j as i32);
    let pole = |j: usize| 4f64.powi(-(j as i32));
    let factors = move |y: &[f64], k: usize| -> (f64, f64) {
        let j = k + 1;
        if j <= half {
            let den = 1.0 - y[k] * pole(j);
            (1.0 / den, pole(j) / (den * den))
        } else {
            let c = rate(j);
            ((c * y[k]).cos(), -c * (c * y[k]).sin())
        }
    };
    FunctionOracle::new(
        "f2",
        d,
        move |y| (0..y.len()).map(|k| factors(y, k).0).product(),
        move |y, g| {
            let vals: Vec<(f64, f64)> = (0..y.len()).map(|k| factors(y, k)).collect();
            for (k, gk) in g.iter_mut().enumerate().take(y.len()) {
                // product rule without dividing by a possibly zero cosine
                *gk = vals
                    .iter()
                    .enumerate()
                    .map(|(j, &(v, dv))| if j == k { dv } else { v })
                    .product();
            }
        },
    )
}

fn f3(d: usize) -> Result<FunctionOracle> {
    let scale = 1.0 / (2.0 * d as f64);
    FunctionOracle::new(
        "f3",
        d,
        move |y| (-scale * y.iter().sum::<f64>()).exp(),
        move |y, g| {
            let f = (-scale * y.iter().sum::<f64>()).exp();
            g.fill(-scale * f);
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn landmark_values() {
        for d in [1, 2, 4, 7] {
            assert_eq!(test_function(TestFunction::F3, d).unwrap().eval(&vec![0.0; d]), 1.0);
        }
        let f1 = test_function(TestFunction::F1, 4).unwrap();
        assert_eq!(f1.eval(&f1_peak(4)), 1.0);
        assert_eq!(f1_peak(3), vec![-0.5, 1.0 / 3.0, -0.25]);
        let f2 = test_function(TestFunction::F2, 2).unwrap();
        // cos(16·0.5/4) / (1 − 0.2/4)
        let want = (2.0f64).cos() / (1.0 - 0.05);
        assert!((f2.eval(&[0.2, 0.5]) - want).abs() < 1e-15);
    }

    #[test]
    fn odd_dimension_rejected_for_f2() {
        assert!(test_function(TestFunction::F2, 3).is_err());
        assert!(test_function(TestFunction::F2, 0).is_err());
    }

    #[test]
    fn finite_difference_fallback() {
        let f = FunctionOracle::from_value("sq", 2, |y| y[0] * y[0] + 3.0 * y[1]).unwrap();
        assert!(!f.has_analytic_gradient());
        let mut g = [0.0; 2];
        f.eval_gradient(&[0.5, -0.2], &mut g);
        assert!((g[0] - 1.0).abs() < 1e-8 && (g[1] - 3.0).abs() < 1e-8);
    }

    #[test]
    fn names_parse() {
        for id in [TestFunction::F1, TestFunction::F2, TestFunction::F3] {
            assert_eq!(id.label().parse::<TestFunction>().unwrap(), id);
        }
    }
}
