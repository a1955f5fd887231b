//! Gauss quadrature rules on `[-1, 1]`.

use nalgebra::{DMatrix, SymmetricEigen};

use super::{jacobi_p_all, ln_weight_mass};

/// A quadrature rule: nodes and weights.
#[derive(Debug, Clone)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Gauss–Legendre rule with `n` nodes, by Newton iteration on the roots of `P_n`.
pub fn gauss_legendre(n: usize) -> Rule {
    assert!(n >= 1, "quadrature needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let mut buf = Vec::with_capacity(n + 1);
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        for _ in 0..100 {
            jacobi_p_all(0.0, 0.0, n, x, &mut buf);
            let dp = nf * (x * buf[n] - buf[n - 1]) / (x * x - 1.0);
            let dx = buf[n] / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        jacobi_p_all(0.0, 0.0, n, x, &mut buf);
        let dp = nf * (x * buf[n] - buf[n - 1]) / (x * x - 1.0);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        weights[i] = w;
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Rule { nodes, weights }
}

/// Gauss–Jacobi rule for `∫ (1-y)^a (1+y)^b g(y) dy`, via the Golub–Welsch eigenproblem.
pub fn gauss_jacobi(n: usize, a: f64, b: f64) -> Rule {
    assert!(n >= 1, "quadrature needs at least one node");
    assert!(a > -1.0 && b > -1.0, "Jacobi exponents must exceed -1");
    let mut jac = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        let kf = k as f64;
        let s = 2.0 * kf + a + b;
        let diag = if k == 0 {
            (b - a) / (a + b + 2.0)
        } else {
            (b * b - a * a) / (s * (s + 2.0))
        };
        jac[(k, k)] = diag;
        if k + 1 < n {
            let j = kf + 1.0;
            let s = 2.0 * j + a + b;
            let off2 = if j == 1.0 {
                4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + a + b).powi(2) * (3.0 + a + b))
            } else {
                4.0 * j * (j + a) * (j + b) * (j + a + b) / (s * s * (s + 1.0) * (s - 1.0))
            };
            let off = off2.sqrt();
            jac[(k, k + 1)] = off;
            jac[(k + 1, k)] = off;
        }
    }
    let eig = SymmetricEigen::new(jac);
    let mass = ln_weight_mass(a, b).exp();
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            (eig.eigenvalues[i], mass * v0 * v0)
        })
        .collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    Rule {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn legendre_rule_integrates_polynomials() {
        let rule = gauss_legendre(10);
        assert_relative_eq!(rule.weights.iter().sum::<f64>(), 2.0, epsilon = 1e-14);
        // exact up to degree 19
        assert_relative_eq!(rule.integrate(|x| x.powi(18)), 2.0 / 19.0, epsilon = 1e-14);
        assert_relative_eq!(rule.integrate(|x| x.powi(7)), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn legendre_and_jacobi_rules_agree() {
        let gl = gauss_legendre(12);
        let gj = gauss_jacobi(12, 0.0, 0.0);
        for (a, b) in gl.nodes.iter().zip(&gj.nodes) {
            assert_relative_eq!(a, b, epsilon = 1e-13);
        }
        for (a, b) in gl.weights.iter().zip(&gj.weights) {
            assert_relative_eq!(a, b, epsilon = 1e-13);
        }
    }

    #[test]
    fn chebyshev_rule_weights_are_equal() {
        let rule = gauss_jacobi(8, -0.5, -0.5);
        for w in &rule.weights {
            assert_relative_eq!(*w, std::f64::consts::PI / 8.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn quadrature_of_squared_legendre() {
        // ∫ P_2² = 2/5
        let rule = gauss_legendre(6);
        let v = rule.integrate(|x| {
            let p = 0.5 * (3.0 * x * x - 1.0);
            p * p
        });
        assert_relative_eq!(v, 0.4, epsilon = 1e-14);
    }
}
