use gradcs::reference::{enumerate_bpdn, random_instance};
use gradcs::rng::rng_from_seed;
use gradcs::solver::{
    kkt_residual, project_weighted_l1_ball, solve_bpdn, solve_weighted_lasso, weighted_l1_norm,
    BpdnProblem, SolverConfig, SolverStatus,
};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;

// Independent oracle: bisection on the threshold θ.
fn bisection_projection(z: &[f64], w: &[f64], tau: f64) -> Vec<f64> {
    let norm_at = |theta: f64| -> f64 {
        z.iter()
            .zip(w)
            .map(|(v, wi)| wi * (v.abs() - theta * wi).max(0.0))
            .sum()
    };
    if norm_at(0.0) <= tau {
        return z.to_vec();
    }
    let (mut lo, mut hi) = (
        0.0,
        z.iter()
            .zip(w)
            .map(|(v, wi)| v.abs() / wi)
            .fold(0.0, f64::max),
    );
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if norm_at(mid) > tau {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let theta = 0.5 * (lo + hi);
    z.iter()
        .zip(w)
        .map(|(v, wi)| v.signum() * (v.abs() - theta * wi).max(0.0))
        .collect()
}

fn vec_and_weights() -> impl Strategy<Value = (Vec<f64>, Vec<f64>, f64)> {
    (1usize..=10).prop_flat_map(|n| {
        (
            prop::collection::vec(-5.0f64..5.0, n),
            prop::collection::vec(1.0f64..3.0, n),
            0.0f64..6.0,
        )
    })
}

proptest! {
    #[test]
    fn projection_matches_bisection((z, w, tau) in vec_and_weights()) {
        let fast = project_weighted_l1_ball(&z, &w, tau);
        let slow = bisection_projection(&z, &w, tau);
        for (a, b) in fast.iter().zip(&slow) {
            prop_assert!((a - b).abs() < 1e-9, "{fast:?} vs {slow:?}");
        }
        prop_assert!(weighted_l1_norm(&fast, &w) <= tau * (1.0 + 1e-12) + 1e-15);
    }

    #[test]
    fn projection_is_idempotent((z, w, tau) in vec_and_weights()) {
        let once = project_weighted_l1_ball(&z, &w, tau);
        let twice = project_weighted_l1_ball(&once, &w, tau);
        prop_assert_eq!(once, twice);
    }
}

#[test]
fn projection_beats_random_feasible_points() {
    let mut rng = rng_from_seed(77);
    for _ in 0..20 {
        let n = rng.random_range(1..=10);
        let z: Vec<f64> = (0..n).map(|_| rng.random_range(-4.0..4.0)).collect();
        let w: Vec<f64> = (0..n).map(|_| rng.random_range(1.0..3.0)).collect();
        let tau = rng.random_range(0.1..3.0);
        let p = project_weighted_l1_ball(&z, &w, tau);
        let infeasible = weighted_l1_norm(&z, &w) > tau;
        let dist = |v: &[f64]| {
            v.iter()
                .zip(&z)
                .map(|(a, b)| (a - b).powi(2))
                .sum::<f64>()
                .sqrt()
        };
        let dp = dist(&p);
        for _ in 0..10_000 {
            // random direction scaled to a random radius inside the ball
            let mut v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let norm = weighted_l1_norm(&v, &w);
            let radius = tau * rng.random::<f64>();
            v.iter_mut().for_each(|x| *x *= radius / norm);
            let dv = dist(&v);
            if infeasible {
                assert!(dp < dv, "{dp} vs {dv}");
            } else {
                assert!(dp <= dv);
            }
        }
    }
}

#[test]
fn solver_matches_enumeration() {
    let cfg = SolverConfig::default();
    for seed in 0..50 {
        let inst = random_instance(1000 + seed);
        let p = BpdnProblem::new(&inst.a, &inst.y, &inst.w, inst.eta).unwrap();
        let res = solve_bpdn(&p, &cfg).unwrap();
        let opt = enumerate_bpdn(&inst.a, &inst.y, &inst.w, inst.eta).unwrap();
        assert_eq!(res.status, SolverStatus::Optimal, "seed {seed}");
        assert!(
            (res.objective - opt.objective).abs() <= 1e-5,
            "seed {seed}: {} vs {}",
            res.objective,
            opt.objective
        );
        let kkt = kkt_residual(&p, &res.z);
        assert!(kkt <= 1e-6, "seed {seed}: kkt {kkt}");
        assert!(res.residual_norm <= inst.eta + 1e-9 * inst.y.norm().max(1.0));
    }
}

#[test]
fn perturbed_optimum_is_flagged() {
    let cfg = SolverConfig::default();
    let mut flagged = 0;
    for seed in 0..20 {
        let inst = random_instance(5000 + seed);
        let p = BpdnProblem::new(&inst.a, &inst.y, &inst.w, inst.eta).unwrap();
        let mut z = solve_bpdn(&p, &cfg).unwrap().z;
        z[0] += 0.05;
        if kkt_residual(&p, &z) > 1e-3 {
            flagged += 1;
        }
    }
    assert_eq!(flagged, 20);
}

#[test]
fn scaling_equivariance() {
    let cfg = SolverConfig::default();
    for seed in 0..10 {
        let inst = random_instance(300 + seed);
        let p = BpdnProblem::new(&inst.a, &inst.y, &inst.w, inst.eta).unwrap();
        let base = solve_bpdn(&p, &cfg).unwrap();
        for c in [0.01, 7.5] {
            let a = &inst.a * c;
            let y = &inst.y * c;
            let q = BpdnProblem::new(&a, &y, &inst.w, inst.eta * c).unwrap();
            let scaled = solve_bpdn(&q, &cfg).unwrap();
            let diff = (&scaled.z - &base.z).norm();
            assert!(
                diff <= 1e-6 * base.z.norm().max(1.0),
                "seed {seed}, c {c}: {diff}"
            );
        }
    }
}

#[test]
fn pareto_trace_is_monotone() {
    let cfg = SolverConfig::default();
    for seed in 0..20 {
        let inst = random_instance(700 + seed);
        let p = BpdnProblem::new(&inst.a, &inst.y, &inst.w, inst.eta).unwrap();
        let mut trace = solve_bpdn(&p, &cfg).unwrap().trace;
        trace.sort_by(|a, b| a.tau.total_cmp(&b.tau));
        for pair in trace.windows(2) {
            assert!(pair[1].phi <= pair[0].phi + 1e-12, "seed {seed}: {pair:?}");
        }
    }
}

#[test]
fn lasso_recovers_least_squares_for_orthonormal_columns() {
    // Q factor of a random matrix has orthonormal columns
    let mut rng = rng_from_seed(3);
    let m = DMatrix::from_fn(6, 3, |_, _| rng.random_range(-1.0..1.0));
    let q = m.qr().q();
    let y = DVector::from_fn(6, |_, _| rng.random_range(-1.0..1.0));
    let ls = q.transpose() * &y;
    let w = [1.0, 2.0, 1.5];
    let tau = weighted_l1_norm(ls.as_slice(), &w) * 1.5;
    let sol = solve_weighted_lasso(&q, &y, &w, tau, &SolverConfig::default()).unwrap();
    assert_eq!(sol.status, SolverStatus::Optimal);
    assert!((&sol.z - &ls).norm() < 1e-6);
}

#[test]
fn complex_problems_are_solved() {
    let mut rng = rng_from_seed(9);
    let (m, n) = (6, 10);
    let a = DMatrix::from_fn(m, n, |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) / (m as f64).sqrt()
    });
    let mut x = DVector::zeros(n);
    x[2] = Complex64::new(1.0, -0.5);
    x[7] = Complex64::new(0.0, 0.8);
    let y = &a * &x;
    let w = vec![1.0; n];
    let p = BpdnProblem::new(&a, &y, &w, 0.0).unwrap();
    let res = solve_bpdn(&p, &SolverConfig::default()).unwrap();
    assert_eq!(res.status, SolverStatus::Optimal);
    assert!(res.objective <= weighted_l1_norm(x.as_slice(), &w) + 1e-8);
    assert!(kkt_residual(&p, &res.z) < 1e-6);
}

fn gaussian(rows: usize, cols: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = rng_from_seed(seed);
    DMatrix::from_fn(rows, cols, |_, _| {
        rng.sample::<f64, _>(rand_distr::StandardNormal) / (rows as f64).sqrt()
    })
}

#[test]
fn sparse_vectors_are_recovered_with_a_certificate() {
    // fewer support columns than rows: the certificate needs the linear program
    let (m, n) = (40, 120);
    let a = gaussian(m, n, 11);
    let mut x = DVector::zeros(n);
    for (k, j) in [3usize, 17, 40, 41, 77, 100, 118].into_iter().enumerate() {
        x[j] = if k % 2 == 0 { 1.0 + k as f64 } else { -0.5 };
    }
    let y = &a * &x;
    let w: Vec<f64> = (0..n).map(|j| 1.0 + (j % 5) as f64 * 0.1).collect();
    let p = BpdnProblem::new(&a, &y, &w, 0.0).unwrap();
    let res = solve_bpdn(&p, &SolverConfig::default()).unwrap();
    assert_eq!(res.status, SolverStatus::Optimal);
    assert!((&res.z - &x).norm() <= 1e-8, "{}", (&res.z - &x).norm());
    assert!(kkt_residual(&p, &res.z) <= 1e-6);
}

#[test]
fn unreachable_eta_ends_at_least_squares() {
    let (m, n) = (90, 30);
    let a = gaussian(m, n, 12);
    let mut rng = rng_from_seed(13);
    let y = DVector::from_fn(m, |_, _| rng.random_range(-1.0..1.0));
    let ls = a.clone().svd(true, true).solve(&y, 1e-14).unwrap();
    let w = vec![1.0; n];
    let p = BpdnProblem::new(&a, &y, &w, 1e-12).unwrap();
    let res = solve_bpdn(&p, &SolverConfig::default()).unwrap();
    assert_eq!(res.status, SolverStatus::Infeasible);
    assert!((&res.z - &ls).norm() <= 1e-5 * ls.norm());
}
