use std::fmt::Write as _;

use crate::basis1d::BasisFamily;
use crate::error::{Error, Result};
use crate::index_sets::{IndexSet, MultiIndex};
use crate::tensor::TensorBasis;

/// A polynomial `f̂ = Σ_{n∈Λ} x̂_n φ_n`.
#[derive(Debug, Clone)]
pub struct Approximant {
    family: BasisFamily,
    index_set: IndexSet,
    coefficients: Vec<f64>,
    basis: TensorBasis,
}

impl PartialEq for Approximant {
    fn eq(&self, other: &Self) -> bool {
        self.family == other.family
            && self.index_set == other.index_set
            && self.coefficients == other.coefficients
    }
}

impl Approximant {
    pub fn new(family: BasisFamily, index_set: IndexSet, coefficients: Vec<f64>) -> Result<Self> {
        if family.is_fourier() {
            return Err(Error::Unsupported(
                "real approximants cover the Jacobi families only".into(),
            ));
        }
        if coefficients.len() != index_set.len() {
            return Err(Error::Dimension(format!(
                "{} coefficients for an index set of size {}",
                coefficients.len(),
                index_set.len()
            )));
        }
        if let Some(bad) = coefficients.iter().find(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("coefficient {bad} is not finite")));
        }
        let basis = TensorBasis::new(family, &index_set)?;
        Ok(Approximant {
            family,
            index_set,
            coefficients,
            basis,
        })
    }

    pub fn family(&self) -> &BasisFamily {
        &self.family
    }

    pub fn index_set(&self) -> &IndexSet {
        &self.index_set
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn dim(&self) -> usize {
        self.index_set.dim()
    }

    pub fn value(&self, y: &[f64]) -> Result<f64> {
        let mut phi = Vec::with_capacity(self.coefficients.len());
        self.basis.values::<f64>(y, &mut phi)?;
        Ok(dot(&phi, &self.coefficients))
    }

    /// `f̂(y)` and `∂_k f̂(y)` in `grad[k]`, `k = 0..d`.
    pub fn value_and_gradient(&self, y: &[f64], grad: &mut [f64]) -> Result<f64> {
        let d = self.dim();
        if grad.len() != d {
            return Err(Error::Dimension(format!(
                "gradient buffer has length {}, expected {d}",
                grad.len()
            )));
        }
        let mut rows = vec![Vec::with_capacity(self.coefficients.len()); d + 1];
        self.basis.values_and_gradients::<f64>(y, &mut rows)?;
        for k in 0..d {
            grad[k] = dot(&rows[k + 1], &self.coefficients);
        }
        Ok(dot(&rows[0], &self.coefficients))
    }

    /// Text form: `family=<label>`, `d=<d>`, then one `n_1 … n_d coefficient`
    /// line per index in index-set order.
    pub fn to_text(&self) -> String {
        let mut out = format!("family={}\nd={}\n", self.family, self.dim());
        for (n, c) in self.index_set.iter().zip(&self.coefficients) {
            for e in n.entries() {
                let _ = write!(out, "{e} ");
            }
            let _ = writeln!(out, "{c:.16e}");
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let parse_err = |line: usize, msg: String| Error::Parse { line, msg };

        let (ln, first) = lines
            .next()
            .ok_or_else(|| parse_err(1, "missing family line".into()))?;
        let family: BasisFamily = first
            .strip_prefix("family=")
            .ok_or_else(|| parse_err(ln, format!("expected `family=`, found `{first}`")))?
            .parse()
            .map_err(|e| parse_err(ln, format!("{e}")))?;

        let (ln, second) = lines
            .next()
            .ok_or_else(|| parse_err(ln + 1, "missing dimension line".into()))?;
        let d: usize = second
            .strip_prefix("d=")
            .and_then(|v| v.trim().parse().ok())
            .filter(|&d| d > 0)
            .ok_or_else(|| parse_err(ln, format!("expected `d=<positive int>`, found `{second}`")))?;

        let mut indices = Vec::new();
        let mut coefficients = Vec::new();
        for (ln, line) in lines {
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != d + 1 {
                return Err(parse_err(
                    ln,
                    format!("expected {} fields, found {}", d + 1, fields.len()),
                ));
            }
            let entries = fields[..d]
                .iter()
                .map(|f| f.parse::<i32>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| parse_err(ln, format!("bad index: {e}")))?;
            let c: f64 = fields[d]
                .parse()
                .map_err(|e| parse_err(ln, format!("bad coefficient: {e}")))?;
            indices.push(MultiIndex::new(entries).map_err(|e| parse_err(ln, format!("{e}")))?);
            coefficients.push(c);
        }
        let set = IndexSet::new(d, indices.iter().cloned())?;
        if set.len() != indices.len() {
            return Err(Error::Domain("duplicate multi-indices".into()));
        }
        // IndexSet may reorder; realign coefficients
        let mut aligned = vec![0.0; set.len()];
        for (n, c) in indices.iter().zip(coefficients) {
            let pos = set.position(n).expect("index was inserted");
            aligned[pos] = c;
        }
        Approximant::new(family, set, aligned)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index_sets::hyperbolic_cross;

    #[test]
    fn text_round_trip_is_exact() {
        let set = hyperbolic_cross(2, 3).unwrap();
        let coefs: Vec<f64> = (0..set.len()).map(|i| (i as f64 + 0.1).sin() / 3.0).collect();
        for family in [
            BasisFamily::LEGENDRE,
            BasisFamily::CHEBYSHEV,
            BasisFamily::jacobi(1.0, 0.0).unwrap(),
        ] {
            let a = Approximant::new(family, set.clone(), coefs.clone()).unwrap();
            let b = Approximant::from_text(&a.to_text()).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn rejects_malformed_text() {
        assert!(Approximant::from_text("family=legendre\nd=2\n0 0\n").is_err());
        assert!(Approximant::from_text("d=2\n0 0 1.0\n").is_err());
        assert!(Approximant::from_text("family=fourier\nd=1\n0 1.0\n").is_err());
    }

    #[test]
    fn constant_term_evaluates() {
        let set = hyperbolic_cross(3, 2).unwrap();
        let mut coefs = vec![0.0; set.len()];
        coefs[set.position(&MultiIndex::zero(3)).unwrap()] = 2.5;
        let a = Approximant::new(BasisFamily::LEGENDRE, set, coefs).unwrap();
        let mut g = [1.0; 3];
        assert_eq!(a.value_and_gradient(&[0.3, -0.1, 0.9], &mut g).unwrap(), 2.5);
        assert_eq!(g, [0.0; 3]);
    }
}
