//! Named invariant suites, each reporting measured value against threshold.

use std::fmt;
use std::io::Write;

use gradcs::basis1d::quadrature::gauss_jacobi;
use gradcs::basis1d::{eigenvalue, jacobi_tables, ln_weight_mass, BasisFamily, Density};
use gradcs::index_sets::{hyperbolic_cross, intrinsic_table, k_of_s, KMode};
use gradcs::measurement::{isotropy_deviation, SamplingMode};
use gradcs::recovery::{
    coefficient_error, h1_error_estimate, recover, Approximant, FunctionOracle, DEFAULT_ETA,
};
use gradcs::reference::{enumerate_bpdn, random_instance};
use gradcs::rng::rng_from_seed;
use gradcs::solver::{kkt_residual, solve_bpdn, BpdnProblem, SolverConfig};
use rand::Rng;

use crate::config::ExperimentConfig;
use crate::experiment::{aggregate, run_plan, AggregateRow, RunOptions};
use crate::CliError;

/// One line of a validation report.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl Check {
    /// Passes when `measured ≤ threshold`.
    pub fn at_most(name: impl Into<String>, measured: f64, threshold: f64) -> Self {
        Check {
            name: name.into(),
            measured,
            threshold,
            pass: measured <= threshold,
        }
    }

    /// Passes when `measured ≥ threshold`.
    pub fn at_least(name: impl Into<String>, measured: f64, threshold: f64) -> Self {
        Check {
            name: name.into(),
            measured,
            threshold,
            pass: measured >= threshold,
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{},{:.6e},{:.6e},{}",
            self.name,
            self.measured,
            self.threshold,
            if self.pass { "pass" } else { "fail" }
        )
    }
}

pub const SUITES: [&str; 9] = [
    "orthonormality",
    "isotropy",
    "k-bounds",
    "kappa-ratio",
    "solver-oracle",
    "exact-recovery",
    "parseval",
    "gradient-benefit",
    "fractional-gradient",
];

/// Suites run by `validate all`: everything but the two sweeps.
pub const QUICK_SUITES: [&str; 7] = [
    "orthonormality",
    "isotropy",
    "k-bounds",
    "kappa-ratio",
    "solver-oracle",
    "exact-recovery",
    "parseval",
];

pub fn run_suite(name: &str) -> Result<Vec<Check>, CliError> {
    match name {
        "orthonormality" => orthonormality(),
        "isotropy" => isotropy(),
        "k-bounds" => k_bounds(),
        "kappa-ratio" => kappa_ratio(),
        "solver-oracle" => solver_oracle(),
        "exact-recovery" => exact_recovery(),
        "parseval" => parseval(),
        "gradient-benefit" => gradient_benefit(0),
        "fractional-gradient" => fractional_gradient(0),
        "all" => {
            let mut out = Vec::new();
            for s in QUICK_SUITES {
                out.extend(run_suite(s)?);
            }
            Ok(out)
        }
        _ => Err(CliError::Input(format!(
            "unknown suite `{name}`; available: all, {}",
            SUITES.join(", ")
        ))),
    }
}

pub fn write_report(mut out: impl Write, checks: &[Check]) -> std::io::Result<()> {
    writeln!(out, "name,measured,threshold,pass")?;
    for c in checks {
        writeln!(out, "{c}")?;
    }
    Ok(())
}

const ORTHO_FAMILIES: [(&str, f64, f64); 3] = [
    ("legendre", 0.0, 0.0),
    ("chebyshev", -0.5, -0.5),
    ("jacobi(1,0)", 1.0, 0.0),
];
const ORTHO_DEGREE: usize = 20;

/// `∫φ_nφ_m ν = δ_nm` and `∫χφ'_nφ'_m = λ_nδ_nm` for `n, m ≤ 20`, by
/// Gauss–Jacobi quadrature exact for these degrees.
pub fn orthonormality() -> Result<Vec<Check>, CliError> {
    let mut out = Vec::new();
    for (label, a, b) in ORTHO_FAMILIES {
        let mass = ln_weight_mass(a, b).exp();
        let (mut vals, mut ders) = (Vec::new(), Vec::new());
        let mut gram = |rule: &gradcs::basis1d::quadrature::Rule, derivs: bool| {
            let tables: Vec<Vec<f64>> = rule
                .nodes
                .iter()
                .map(|&y| {
                    jacobi_tables(a, b, ORTHO_DEGREE, y, &mut vals, &mut ders);
                    if derivs {
                        ders.clone()
                    } else {
                        vals.clone()
                    }
                })
                .collect();
            let mut worst = 0.0f64;
            for n in 0..=ORTHO_DEGREE {
                // λ_n = n(n + α + β + 1)
                let nf = n as f64;
                let lambda = nf * (nf + a + b + 1.0);
                for m in 0..=ORTHO_DEGREE {
                    let ip: f64 = rule
                        .weights
                        .iter()
                        .zip(&tables)
                        .map(|(w, t)| w / mass * t[n] * t[m])
                        .sum();
                    let want = match (n == m, derivs) {
                        (false, _) => 0.0,
                        (true, false) => 1.0,
                        (true, true) => lambda,
                    };
                    worst = worst.max((ip - want).abs());
                }
            }
            worst
        };
        let nu_rule = gauss_jacobi(ORTHO_DEGREE + 2, a, b);
        out.push(Check::at_most(
            format!("orthonormality/{label}/values"),
            gram(&nu_rule, false),
            1e-8,
        ));
        // χ = (1−y)^{α+1}(1+y)^{β+1} / mass
        let chi_rule = gauss_jacobi(ORTHO_DEGREE + 2, a + 1.0, b + 1.0);
        out.push(Check::at_most(
            format!("orthonormality/{label}/derivatives"),
            gram(&chi_rule, true),
            1e-6,
        ));
    }
    Ok(out)
}

/// Legendre d=2 on the s=3 cross, full gradients, m=10⁵: max-entry deviation
/// of `A*A` from `I` below 0.05 in at least 18 of 20 draws.
pub fn isotropy() -> Result<Vec<Check>, CliError> {
    let set = hyperbolic_cross(2, 3)?;
    let mut good = 0;
    let mut worst = 0.0f64;
    for seed in 0..20 {
        let dev = isotropy_deviation::<f64>(
            &BasisFamily::LEGENDRE,
            &Density::MatchOrthogonality,
            &set,
            SamplingMode::FullGradient,
            100_000,
            seed,
        )?;
        worst = worst.max(dev.max_entry);
        if dev.max_entry < 0.05 {
            good += 1;
        }
    }
    Ok(vec![
        Check::at_least("isotropy/draws-within-0.05", good as f64, 18.0),
        Check::at_most("isotropy/worst-max-entry", worst, f64::INFINITY),
    ])
}

/// Exhaustive `K(s)` for `s ≤ 12`, `d ≤ 4` against `s²` (Legendre) and
/// `s^{log 3/log 2}` (Chebyshev), with equality at `s = 2`.
pub fn k_bounds() -> Result<Vec<Check>, CliError> {
    let mu = Density::MatchOrthogonality;
    let gamma_cheb = 3f64.ln() / 2f64.ln();
    let mut out = Vec::new();
    for (label, family, gamma, at_two) in [
        ("legendre", BasisFamily::LEGENDRE, 2.0, 4.0),
        ("chebyshev", BasisFamily::CHEBYSHEV, gamma_cheb, 3.0),
    ] {
        let mut worst_ratio = 0.0f64;
        let mut worst_two = 0.0f64;
        for d in 1..=4 {
            for s in 1..=12 {
                let k = k_of_s(&family, &mu, d, s, KMode::Exact)?;
                worst_ratio = worst_ratio.max(k / (s as f64).powf(gamma));
                if s == 2 {
                    worst_two = worst_two.max((k - at_two).abs());
                }
            }
        }
        out.push(Check::at_most(
            format!("k-bounds/{label}/max-K-over-bound"),
            worst_ratio,
            1.0 + 1e-12,
        ));
        out.push(Check::at_most(
            format!("k-bounds/{label}/K(2)-equality"),
            worst_two,
            1e-9,
        ));
    }
    Ok(out)
}

/// `κ_n / max(λ_n, 1)` for Jacobi α, β ∈ {−1/2, 0, 1}, μ = ν, `1 ≤ n ≤ 50`:
/// bounded by 5 and not growing (last-10 mean ≤ 1.1 × first-10 mean).
pub fn kappa_ratio() -> Result<Vec<Check>, CliError> {
    let params = [-0.5, 0.0, 1.0];
    let mut out = Vec::new();
    for &a in &params {
        for &b in &params {
            let family = BasisFamily::jacobi(a, b)?;
            // one table up to degree 50 instead of 50 growing ones
            let table = intrinsic_table(&family, &Density::MatchOrthogonality, 50)?;
            let ratios = (1..=50usize)
                .map(|n| Ok(table.kappa[n] / eigenvalue(&family, n as i64)?.max(1.0)))
                .collect::<Result<Vec<f64>, gradcs::Error>>()?;
            let max = ratios.iter().copied().fold(0.0, f64::max);
            let first: f64 = ratios[..10].iter().sum::<f64>() / 10.0;
            let last: f64 = ratios[40..].iter().sum::<f64>() / 10.0;
            out.push(Check::at_most(format!("kappa-ratio/({a},{b})/max"), max, 5.0));
            out.push(Check::at_most(
                format!("kappa-ratio/({a},{b})/last-over-first"),
                last / first,
                1.1,
            ));
        }
    }
    Ok(out)
}

/// `solve_bpdn` against support enumeration on 50 random small instances.
pub fn solver_oracle() -> Result<Vec<Check>, CliError> {
    let cfg = SolverConfig::default();
    let (mut gap, mut kkt) = (0.0f64, 0.0f64);
    for seed in 0..50 {
        let inst = random_instance(seed);
        let p = BpdnProblem::new(&inst.a, &inst.y, &inst.w, inst.eta)?;
        let res = solve_bpdn(&p, &cfg)?;
        let opt = enumerate_bpdn(&inst.a, &inst.y, &inst.w, inst.eta)?;
        gap = gap.max((res.objective - opt.objective).abs());
        kkt = kkt.max(kkt_residual(&p, &res.z));
    }
    Ok(vec![
        Check::at_most("solver-oracle/objective-gap", gap, 1e-5),
        Check::at_most("solver-oracle/kkt-residual", kkt, 1e-6),
    ])
}

/// Legendre d=2, s=3 (N=8), target φ_{n₀}, full gradients, m=8, η=10⁻¹²:
/// coefficient error ≤ 10⁻⁶ in at least 9 of 10 seeds.
pub fn exact_recovery() -> Result<Vec<Check>, CliError> {
    let set = hyperbolic_cross(2, 3)?;
    let mut good = 0;
    let mut worst = 0.0f64;
    for seed in 0..10u64 {
        let pos = seed as usize % set.len();
        let n0 = set.get(pos).expect("position in range").clone();
        let oracle = FunctionOracle::basis_function(BasisFamily::LEGENDRE, n0)?;
        let (approx, _) = recover(
            &oracle,
            BasisFamily::LEGENDRE,
            Density::MatchOrthogonality,
            2,
            3,
            8,
            SamplingMode::FullGradient,
            1.0,
            DEFAULT_ETA,
            seed,
        )?;
        let mut target = vec![0.0; set.len()];
        target[pos] = 1.0;
        let err = coefficient_error(&approx, &target);
        worst = worst.max(err);
        if err <= 1e-6 {
            good += 1;
        }
    }
    Ok(vec![
        Check::at_least("exact-recovery/seeds-within-1e-6", good as f64, 9.0),
        Check::at_most("exact-recovery/worst-error", worst, f64::INFINITY),
    ])
}

/// Monte Carlo H̃¹ norm of a random expansion on the d=2, s=3 cross with
/// M=10⁵, against `sqrt(Σ(1+λ_n)x_n²)`, in units of the standard error.
pub fn parseval() -> Result<Vec<Check>, CliError> {
    let set = hyperbolic_cross(2, 3)?;
    let zero = FunctionOracle::new("zero", 2, |_| 0.0, |_, g| g.fill(0.0))?;
    let mut rng = rng_from_seed(7);
    let mut out = Vec::new();
    for (label, family, (a, b)) in [
        ("legendre", BasisFamily::LEGENDRE, (0.0, 0.0)),
        ("chebyshev", BasisFamily::CHEBYSHEV, (-0.5, -0.5)),
    ] {
        let x: Vec<f64> = (0..set.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let exact = set
            .iter()
            .zip(&x)
            .map(|(n, c)| {
                let lambda: f64 = n
                    .entries()
                    .iter()
                    .map(|&k| {
                        let k = k as f64;
                        k * (k + a + b + 1.0)
                    })
                    .sum();
                (1.0 + lambda) * c * c
            })
            .sum::<f64>()
            .sqrt();
        let approx = Approximant::new(family, set.clone(), x)?;
        let est = h1_error_estimate(&zero, &approx, &Density::MatchOrthogonality, 100_000, 11)?;
        out.push(Check::at_most(
            format!("parseval/{label}/deviation-in-std-errors"),
            (est.value - exact).abs() / est.std_error,
            3.0,
        ));
    }
    Ok(out)
}

/// Five even costs spaced geometrically over `[N/2, 3N]`.
pub fn trend_costs(n: usize) -> Vec<usize> {
    (0..5)
        .map(|i| {
            let c = 0.5 * n as f64 * 6f64.powf(i as f64 / 4.0);
            2 * (c / 2.0).round() as usize
        })
        .collect()
}

fn trend_config(modes: &[&str], seed: u64) -> ExperimentConfig {
    let n = hyperbolic_cross(4, 10).expect("small cross").len();
    ExperimentConfig {
        schema_version: crate::config::SCHEMA_VERSION,
        function: "f3".into(),
        family: "legendre".into(),
        density: "match".into(),
        d: 4,
        s: 10,
        modes: modes.iter().map(|m| m.to_string()).collect(),
        thetas: vec![1.0],
        costs: Some(trend_costs(n)),
        trials: 10,
        seed,
        eta: DEFAULT_ETA,
        grid_size: None,
        solver: Default::default(),
        output: None,
    }
}

fn run_trend(modes: &[&str], seed: u64) -> Result<Vec<AggregateRow>, CliError> {
    let plan = trend_config(modes, seed).resolve(None)?;
    let (rows, err) = run_plan(&plan, RunOptions::default());
    if let Some(e) = err {
        return Err(e);
    }
    Ok(aggregate(&rows))
}

fn medians<'a>(agg: &'a [AggregateRow], mode: &str) -> Vec<&'a AggregateRow> {
    agg.iter().filter(|a| a.mode == mode).collect()
}

/// F3, d=4, s=10, θ=1, 10 trials: full-gradient median error at most the
/// unaugmented one at ≥ 4 of 5 costs in H̃¹ and ≥ 3 of 5 in L∞.
pub fn gradient_benefit(seed: u64) -> Result<Vec<Check>, CliError> {
    let agg = run_trend(&["unaugmented", "full"], seed)?;
    let (plain, full) = (medians(&agg, "unaugmented"), medians(&agg, "full"));
    let wins = |pick: fn(&AggregateRow) -> f64| {
        plain
            .iter()
            .zip(&full)
            .filter(|(p, f)| p.m_tilde == f.m_tilde && pick(f) <= pick(p))
            .count() as f64
    };
    Ok(vec![
        Check::at_least("gradient-benefit/h1-wins", wins(|a| a.h1_median), 4.0),
        Check::at_least("gradient-benefit/linf-wins", wins(|a| a.linf_median), 3.0),
    ])
}

pub const FRACTIONS: [&str; 4] = ["fractional:0", "fractional:0.25", "fractional:0.5", "fractional:1"];

/// Same protocol over p ∈ {0, 1/4, 1/2, 1}: at each cost the median H̃¹
/// error should not increase with p; at most one inversion over the grid.
pub fn fractional_gradient(seed: u64) -> Result<Vec<Check>, CliError> {
    let agg = run_trend(&FRACTIONS, seed)?;
    let series: Vec<Vec<&AggregateRow>> = FRACTIONS.iter().map(|m| medians(&agg, m)).collect();
    let mut inversions = 0;
    for i in 0..series[0].len() {
        for w in series.windows(2) {
            if w[1][i].h1_median > w[0][i].h1_median {
                inversions += 1;
            }
        }
    }
    Ok(vec![Check::at_most(
        "fractional-gradient/inversions",
        inversions as f64,
        1.0,
    )])
}
