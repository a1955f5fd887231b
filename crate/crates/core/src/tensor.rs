//! Evaluation of tensor-product basis functions over an index set.

use crate::basis1d::{fourier_deriv, fourier_value, jacobi_tables, BasisFamily};
use crate::error::{Error, Result};
use crate::index_sets::IndexSet;
use crate::scalar::Scalar;

/// Evaluates `φ_n` and `∂_k φ_n` for every `n` in an index set at one point,
/// reusing per-coordinate one-dimensional tables.
#[derive(Debug, Clone)]
pub struct TensorBasis {
    family: BasisFamily,
    dim: usize,
    max_degree: usize,
    slots: Vec<Vec<usize>>,
}

impl TensorBasis {
    pub fn new(family: BasisFamily, set: &IndexSet) -> Result<Self> {
        family.validate()?;
        if set.is_empty() {
            return Err(Error::Domain("index set is empty".into()));
        }
        if set.has_negative_entries() && !family.is_fourier() {
            return Err(Error::Domain(format!(
                "negative multi-indices are only valid for the Fourier basis, not {}",
                family.label()
            )));
        }
        let max_degree = set.max_coordinate();
        let offset = if family.is_fourier() {
            max_degree as i64
        } else {
            0
        };
        let slots = set
            .iter()
            .map(|n| {
                n.entries()
                    .iter()
                    .map(|&e| (e as i64 + offset) as usize)
                    .collect()
            })
            .collect();
        Ok(TensorBasis {
            family,
            dim: set.dim(),
            max_degree,
            slots,
        })
    }

    pub fn family(&self) -> &BasisFamily {
        &self.family
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    /// Per-coordinate tables of values and derivatives at `y`.
    fn tables<T: Scalar>(&self, y: &[f64]) -> (Vec<Vec<T>>, Vec<Vec<T>>) {
        let mut vals = Vec::with_capacity(self.dim);
        let mut ders = Vec::with_capacity(self.dim);
        match self.family {
            BasisFamily::Jacobi { alpha, beta } => {
                let mut v = Vec::new();
                let mut dv = Vec::new();
                for &yk in y {
                    jacobi_tables(alpha, beta, self.max_degree, yk, &mut v, &mut dv);
                    vals.push(v.iter().map(|&x| T::from_real(x)).collect());
                    ders.push(dv.iter().map(|&x| T::from_real(x)).collect());
                }
            }
            BasisFamily::Fourier => {
                let m = self.max_degree as i64;
                for &yk in y {
                    vals.push(
                        (-m..=m)
                            .map(|n| T::from_complex(fourier_value(n, yk)))
                            .collect(),
                    );
                    ders.push(
                        (-m..=m)
                            .map(|n| T::from_complex(fourier_deriv(n, yk)))
                            .collect(),
                    );
                }
            }
        }
        (vals, ders)
    }

    fn check_point(&self, y: &[f64]) -> Result<()> {
        if y.len() != self.dim {
            return Err(Error::Dimension(format!(
                "point has {} coordinates, basis has dimension {}",
                y.len(),
                self.dim
            )));
        }
        if y.iter()
            .any(|v| !v.is_finite() || !(-1.0..=1.0).contains(v))
        {
            return Err(Error::Domain(format!("point {y:?} outside [-1, 1]^d")));
        }
        Ok(())
    }

    /// Values `φ_n(y)` in index-set order.
    pub fn values<T: Scalar>(&self, y: &[f64], out: &mut Vec<T>) -> Result<()> {
        self.check_point(y)?;
        complex_check::<T>(&self.family)?;
        let (vals, _) = self.tables::<T>(y);
        out.clear();
        for slot in &self.slots {
            let mut p = T::one();
            for (k, &s) in slot.iter().enumerate() {
                p *= vals[k][s];
            }
            out.push(p);
        }
        Ok(())
    }

    /// Values in `out[0]` and partial derivatives `∂_k φ_n(y)` in `out[k]`, `k = 1..=d`.
    pub fn values_and_gradients<T: Scalar>(&self, y: &[f64], out: &mut [Vec<T>]) -> Result<()> {
        self.check_point(y)?;
        complex_check::<T>(&self.family)?;
        assert_eq!(out.len(), self.dim + 1, "need d+1 output rows");
        let (vals, ders) = self.tables::<T>(y);
        for row in out.iter_mut() {
            row.clear();
        }
        for slot in &self.slots {
            let mut p = T::one();
            for (k, &s) in slot.iter().enumerate() {
                p *= vals[k][s];
            }
            out[0].push(p);
            for k in 0..self.dim {
                let mut g = ders[k][slot[k]];
                for (j, &s) in slot.iter().enumerate() {
                    if j != k {
                        g *= vals[j][s];
                    }
                }
                out[k + 1].push(g);
            }
        }
        Ok(())
    }
}

fn complex_check<T: Scalar>(family: &BasisFamily) -> Result<()> {
    if family.is_fourier() && !T::IS_COMPLEX {
        return Err(Error::Unsupported(
            "the Fourier basis requires complex scalars".into(),
        ));
    }
    Ok(())
}
