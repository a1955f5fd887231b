use std::collections::{BTreeSet, HashMap};

use gradcs::basis1d::{eigenvalue, nu_over_mu, BasisFamily, Density};
use gradcs::index_sets::{
    best_lower_s_term, best_lower_s_term_greedy, hyperbolic_cross, intrinsic_table,
    intrinsic_weight, is_lower, k_of_s, parse_index_set, write_index_set, IndexSet, KMode,
    MultiIndex, WeightVector,
};
use proptest::prelude::*;

fn brute_force_cross(d: usize, s: usize) -> BTreeSet<Vec<i32>> {
    let mut out = BTreeSet::new();
    let side = s as i32 + 1;
    let total = (side as usize).pow(d as u32);
    for code in 0..total {
        let mut c = code;
        let mut n = Vec::with_capacity(d);
        for _ in 0..d {
            n.push((c % side as usize) as i32);
            c /= side as usize;
        }
        if n.iter().map(|&e| (e + 1) as usize).product::<usize>() <= s + 1 {
            out.insert(n);
        }
    }
    out
}

fn as_set(set: &IndexSet) -> BTreeSet<Vec<i32>> {
    set.iter().map(|n| n.entries().to_vec()).collect()
}

#[test]
fn cross_matches_brute_force() {
    for d in 1..=3 {
        for s in 1..=8 {
            let hc = hyperbolic_cross(d, s).unwrap();
            assert_eq!(as_set(&hc), brute_force_cross(d, s), "d={d} s={s}");
        }
    }
    let n = hyperbolic_cross(3, 5).unwrap().len() as f64;
    let bound =
        (2.0 * 125.0 * 64.0f64).min(std::f64::consts::E.powi(2) * 5f64.powf(2.0 + 3f64.log2()));
    assert!(n <= bound);
}

#[test]
fn crosses_are_lower() {
    for d in 1..=4 {
        for s in 1..=10 {
            assert!(is_lower(&hyperbolic_cross(d, s).unwrap()));
        }
    }
}

/// All lower sets of size `size` inside `{0..=max}^d`, by growing from `{0}`.
fn all_lower_sets(d: usize, size: usize) -> Vec<BTreeSet<Vec<i32>>> {
    let mut level: BTreeSet<BTreeSet<Vec<i32>>> = BTreeSet::new();
    level.insert(BTreeSet::from([vec![0; d]]));
    let mut all: Vec<BTreeSet<Vec<i32>>> = level.iter().cloned().collect();
    for _ in 1..size {
        let mut next = BTreeSet::new();
        for set in &level {
            for n in set {
                for k in 0..d {
                    let mut m = n.clone();
                    m[k] += 1;
                    if set.contains(&m) {
                        continue;
                    }
                    let lower = (0..d).all(|j| {
                        if m[j] == 0 {
                            return true;
                        }
                        let mut p = m.clone();
                        p[j] -= 1;
                        set.contains(&p)
                    });
                    if lower {
                        let mut grown = set.clone();
                        grown.insert(m);
                        next.insert(grown);
                    }
                }
            }
        }
        all.extend(next.iter().cloned());
        level = next;
    }
    all
}

#[test]
fn cross_is_union_of_lower_sets() {
    // {Π(n_k+1) ≤ s+1} collects every lower set with at most s+1 members
    for d in 1..=3 {
        for s in 1..=6 {
            let union: BTreeSet<Vec<i32>> =
                all_lower_sets(d, s + 1).into_iter().flatten().collect();
            assert_eq!(
                as_set(&hyperbolic_cross(d, s).unwrap()),
                union,
                "d={d} s={s}"
            );
        }
    }
}

#[test]
fn intrinsic_weights_are_multiplicative() {
    let cases = [
        (BasisFamily::LEGENDRE, Density::MatchOrthogonality),
        (BasisFamily::CHEBYSHEV, Density::MatchOrthogonality),
        (BasisFamily::LEGENDRE, Density::ChebyshevArcsine),
        (
            BasisFamily::jacobi(1.0, 0.0).unwrap(),
            Density::MatchOrthogonality,
        ),
    ];
    let grid: Vec<f64> = (0..=400).map(|i| -1.0 + 2.0 * i as f64 / 400.0).collect();
    for (family, mu) in cases {
        let (a, b) = family.jacobi_params().unwrap();
        for n1 in 0..=5i32 {
            for n2 in 0..=5i32 {
                let n = MultiIndex::from([n1, n2]);
                let product = intrinsic_weight(&family, &mu, &n).unwrap();
                let mut sup: f64 = 0.0;
                for &y1 in &grid {
                    let f1 = nu_over_mu(&family, &mu, y1).sqrt()
                        * gradcs::basis1d::eval_basis::<f64>(&family, n1 as i64, y1)
                            .unwrap()
                            .abs();
                    for &y2 in &grid {
                        let f2 = nu_over_mu(&family, &mu, y2).sqrt()
                            * gradcs::basis1d::eval_basis::<f64>(&family, n2 as i64, y2)
                                .unwrap()
                                .abs();
                        sup = sup.max(f1 * f2);
                    }
                }
                // on a tensor grid the 2D sup factorizes; the adaptive 1D sup may only exceed it
                let grid_1d = |k: i32| {
                    grid.iter()
                        .map(|&y| {
                            nu_over_mu(&family, &mu, y).sqrt()
                                * gradcs::basis1d::eval_basis::<f64>(&family, k as i64, y)
                                    .unwrap()
                                    .abs()
                        })
                        .fold(0.0, f64::max)
                };
                assert!((sup - grid_1d(n1) * grid_1d(n2)).abs() < 1e-8 * sup.max(1.0));
                assert!(
                    sup <= product * (1.0 + 1e-8),
                    "({a},{b}) {n}: {sup} > {product}"
                );
                assert!(
                    sup >= product * (1.0 - 2e-3),
                    "({a},{b}) {n}: {sup} << {product}"
                );
            }
        }
    }
}

#[test]
fn kappa_is_dominated_by_eigenvalue() {
    for a in [-0.5, 0.0, 1.0] {
        for b in [-0.5, 0.0, 1.0] {
            let family = BasisFamily::jacobi(a, b).unwrap();
            let t = intrinsic_table(&family, &Density::MatchOrthogonality, 50).unwrap();
            let ratios: Vec<f64> = (1..=50)
                .map(|n| t.kappa[n] / eigenvalue(&family, n as i64).unwrap().max(1.0))
                .collect();
            let max = ratios.iter().cloned().fold(0.0, f64::max);
            assert!(max <= 5.0, "({a},{b}) max ratio {max}");
            let first: f64 = ratios[..10].iter().sum::<f64>() / 10.0;
            let last: f64 = ratios[40..].iter().sum::<f64>() / 10.0;
            assert!(last <= 1.1 * first, "({a},{b}) {first} -> {last}");
        }
    }
}

#[test]
fn exact_k_respects_closed_forms() {
    let m = Density::MatchOrthogonality;
    let cases = [
        (BasisFamily::LEGENDRE, m),
        (BasisFamily::CHEBYSHEV, m),
        (BasisFamily::jacobi(1.0, 0.0).unwrap(), m),
        (BasisFamily::jacobi(0.5, 0.5).unwrap(), m),
        (BasisFamily::LEGENDRE, Density::ChebyshevArcsine),
    ];
    for (family, mu) in cases {
        for d in 1..=4 {
            for s in 1..=12 {
                let exact = k_of_s(&family, &mu, d, s, KMode::Exact).unwrap();
                let bound = k_of_s(&family, &mu, d, s, KMode::PaperBound).unwrap();
                assert!(
                    exact <= bound * (1.0 + 1e-9),
                    "{} {:?} d={d} s={s}: {exact} > {bound}",
                    family.label(),
                    mu
                );
            }
        }
    }
}

#[test]
fn k_grows_with_s() {
    let mut prev = 0.0;
    for s in 1..=8 {
        let k = k_of_s(
            &BasisFamily::LEGENDRE,
            &Density::MatchOrthogonality,
            2,
            s,
            KMode::Exact,
        )
        .unwrap();
        assert!(k >= prev + 1.0 - 1e-9);
        prev = k;
    }
}

fn arb_coefficients() -> impl Strategy<Value = HashMap<MultiIndex, f64>> {
    prop::collection::vec(((0i32..4, 0i32..4), -5.0f64..5.0), 1..7).prop_map(|v| {
        v.into_iter()
            .map(|((a, b), c)| (MultiIndex::from([a, b]), c))
            .collect()
    })
}

fn weights_for(x: &HashMap<MultiIndex, f64>, scale: f64) -> WeightVector {
    let set = IndexSet::new(2, x.keys().cloned()).unwrap();
    WeightVector::from_fn(&set, |n| 1.0 + scale * n.degree() as f64)
}

proptest! {
    #[test]
    fn exact_selection_beats_greedy(x in arb_coefficients(), s in 1usize..6, scale in 0.0f64..2.0) {
        let v = weights_for(&x, scale);
        let exact = best_lower_s_term(&x, &v, s).unwrap();
        let greedy = best_lower_s_term_greedy(&x, &v, s).unwrap();
        prop_assert!(exact.exact);
        prop_assert!(!greedy.exact);
        prop_assert!(exact.sigma <= greedy.sigma + 1e-12);
        prop_assert!(is_lower(&exact.set) && is_lower(&greedy.set));
        prop_assert!(exact.set.len() <= s && greedy.set.len() <= s);
        let total: f64 = x.iter().map(|(n, c)| v.get(n).unwrap() * c.abs()).sum();
        prop_assert!(exact.sigma <= total + 1e-12);
    }

    #[test]
    fn text_format_round_trips(d in 1usize..4, s in 1usize..12) {
        let hc = hyperbolic_cross(d, s).unwrap();
        prop_assert_eq!(parse_index_set(&write_index_set(&hc)).unwrap(), hc);
    }

    #[test]
    fn closure_is_lower_and_minimal(x in arb_coefficients()) {
        let set = IndexSet::new(2, x.keys().cloned()).unwrap();
        let closure = set.lower_closure();
        prop_assert!(is_lower(&closure));
        for n in &set {
            prop_assert!(closure.contains(n));
        }
        for n in &closure {
            let dominated = set.iter().any(|m| {
                m.entries().iter().zip(n.entries()).all(|(a, b)| b <= a)
            });
            prop_assert!(dominated);
        }
    }
}
