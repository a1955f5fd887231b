use gradcs::basis1d::quadrature::{gauss_jacobi, gauss_legendre};
use gradcs::basis1d::{
    eval_basis, eval_basis_deriv, jacobi_norm_const, jacobi_p, jacobi_tables, BasisFamily,
};

const FAMILIES: [(f64, f64); 5] = [
    (0.0, 0.0),
    (-0.5, -0.5),
    (1.0, 0.0),
    (0.0, 1.0),
    (1.0, -0.5),
];

/// Richardson-extrapolated central difference of `f` at `y`.
fn richardson_derivative(f: impl Fn(f64) -> f64, y: f64, h0: f64) -> f64 {
    let central = |h: f64| (f(y + h) - f(y - h)) / (2.0 * h);
    let levels = 4;
    let mut table = vec![vec![0.0; levels]; levels];
    for (i, row) in table.iter_mut().enumerate() {
        row[0] = central(h0 / 2f64.powi(i as i32));
    }
    for j in 1..levels {
        let factor = 4f64.powi(j as i32);
        for i in j..levels {
            table[i][j] = (factor * table[i][j - 1] - table[i - 1][j - 1]) / (factor - 1.0);
        }
    }
    table[levels - 1][levels - 1]
}

#[test]
fn orthonormality_under_nu() {
    for (a, b) in FAMILIES {
        let rule = gauss_jacobi(30, a, b);
        let c = gradcs::basis1d::ln_weight_mass(a, b).exp();
        let mut vals = Vec::new();
        let mut ders = Vec::new();
        let tables: Vec<Vec<f64>> = rule
            .nodes
            .iter()
            .map(|&y| {
                jacobi_tables(a, b, 20, y, &mut vals, &mut ders);
                vals.clone()
            })
            .collect();
        for n in 0..=20 {
            for m in 0..=20 {
                let ip: f64 = rule
                    .weights
                    .iter()
                    .zip(&tables)
                    .map(|(w, t)| w / c * t[n] * t[m])
                    .sum();
                let expect = if n == m { 1.0 } else { 0.0 };
                assert!((ip - expect).abs() < 1e-8, "({a},{b}) n={n} m={m}: {ip}");
            }
        }
    }
}

#[test]
fn derivatives_are_orthogonal_under_chi() {
    for (a, b) in FAMILIES {
        let family = BasisFamily::jacobi(a, b).unwrap();
        // χ = (1-y)^{a+1}(1+y)^{b+1} / c
        let rule = gauss_jacobi(30, a + 1.0, b + 1.0);
        let c = gradcs::basis1d::ln_weight_mass(a, b).exp();
        let mut vals = Vec::new();
        let mut ders = Vec::new();
        let tables: Vec<Vec<f64>> = rule
            .nodes
            .iter()
            .map(|&y| {
                jacobi_tables(a, b, 20, y, &mut vals, &mut ders);
                ders.clone()
            })
            .collect();
        for n in 0..=20i64 {
            let lambda = gradcs::basis1d::eigenvalue(&family, n).unwrap();
            for m in 0..=20 {
                let ip: f64 = rule
                    .weights
                    .iter()
                    .zip(&tables)
                    .map(|(w, t)| w / c * t[n as usize] * t[m])
                    .sum();
                let expect = if n as usize == m { lambda } else { 0.0 };
                assert!(
                    (ip - expect).abs() < 1e-6 * expect.max(1.0),
                    "({a},{b}) n={n} m={m}: {ip} vs {expect}"
                );
            }
        }
    }
}

#[test]
fn fourier_orthonormality() {
    let rule = gauss_legendre(64);
    let family = BasisFamily::Fourier;
    for n in -6i64..=6 {
        for m in -6i64..=6 {
            let ip: num_complex::Complex64 = rule
                .nodes
                .iter()
                .zip(&rule.weights)
                .map(|(&y, &w)| {
                    let a: num_complex::Complex64 = eval_basis(&family, n, y).unwrap();
                    let b: num_complex::Complex64 = eval_basis(&family, m, y).unwrap();
                    a * b.conj() * (0.5 * w)
                })
                .sum();
            let expect = if n == m { 1.0 } else { 0.0 };
            assert!((ip.re - expect).abs() < 1e-10 && ip.im.abs() < 1e-10);
        }
    }
}

#[test]
fn reflection_property() {
    for (a, b) in FAMILIES {
        for n in 0..=15usize {
            for i in 0..1000 {
                let y = -1.0 + 2.0 * (i as f64 + 0.5) / 1000.0;
                let lhs = jacobi_p(a, b, n, y);
                let rhs = if n % 2 == 0 { 1.0 } else { -1.0 } * jacobi_p(b, a, n, -y);
                assert!(
                    (lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0),
                    "({a},{b}) n={n} y={y}"
                );
            }
        }
    }
}

fn binom_real(top: f64, n: usize) -> f64 {
    (libm::lgamma(top + 1.0) - libm::lgamma(n as f64 + 1.0) - libm::lgamma(top - n as f64 + 1.0))
        .exp()
}

#[test]
fn sup_norm_attained_at_endpoint() {
    for (a, b) in FAMILIES {
        let q = a.max(b);
        for n in 0..=20usize {
            let mut sup: f64 = 0.0;
            for i in 0..=4000 {
                let y = -1.0 + 2.0 * i as f64 / 4000.0;
                sup = sup.max(jacobi_p(a, b, n, y).abs());
            }
            let expect = binom_real(n as f64 + q, n);
            assert!(
                (sup - expect).abs() < 1e-8 * expect.max(1.0),
                "({a},{b}) n={n}: {sup} vs {expect}"
            );
        }
    }
}

#[test]
fn derivative_matches_richardson_differences() {
    for (a, b) in FAMILIES {
        let family = BasisFamily::jacobi(a, b).unwrap();
        for n in 0..=20i64 {
            for i in 1..20 {
                let y = -0.95 + 1.9 * i as f64 / 20.0;
                let exact: f64 = eval_basis_deriv(&family, n, y).unwrap();
                let fd =
                    richardson_derivative(|t| eval_basis::<f64>(&family, n, t).unwrap(), y, 1e-2);
                assert!(
                    (exact - fd).abs() <= 1e-6 * exact.abs().max(1.0),
                    "({a},{b}) n={n} y={y}: {exact} vs {fd}"
                );
            }
        }
    }
}

#[test]
fn legendre_derivative_at_endpoint_by_extrapolation() {
    // one-sided Richardson at y = 1 using points inside the interval
    let f = |t: f64| eval_basis::<f64>(&BasisFamily::LEGENDRE, 2, t).unwrap();
    let one_sided = |h: f64| (3.0 * f(1.0) - 4.0 * f(1.0 - h) + f(1.0 - 2.0 * h)) / (2.0 * h);
    let h = 1e-3;
    let est = (4.0 * one_sided(h / 2.0) - one_sided(h)) / 3.0;
    let exact: f64 = eval_basis_deriv(&BasisFamily::LEGENDRE, 2, 1.0).unwrap();
    assert!((est - exact).abs() < 1e-6);
    assert!((exact - 6.708203932499369).abs() < 1e-12);
}

#[test]
fn norm_constants_match_quadrature() {
    for (a, b) in FAMILIES {
        let rule = gauss_jacobi(40, a, b);
        for n in 0..=25usize {
            let quad = rule.integrate(|y| jacobi_p(a, b, n, y).powi(2));
            let formula = jacobi_norm_const(a, b, n as i64).unwrap();
            assert!(
                (quad - formula).abs() < 1e-10 * formula,
                "({a},{b}) n={n}: {quad} vs {formula}"
            );
        }
    }
}
