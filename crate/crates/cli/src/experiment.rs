//! Sweep execution and the CSV outputs.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use gradcs::basis1d::Density;
use gradcs::measurement::{sample_points, SamplingMode, SampleSet};
use gradcs::recovery::{
    h1_error_on, linf_error_on, test_function, FunctionOracle, RecoverySetup,
};
use gradcs::rng::derive_seed;
use rayon::prelude::*;

use crate::config::{samples_for_cost, Plan, SCHEMA_VERSION};
use crate::CliError;

/// Column names of `results.csv`, in [`ResultRow`] field order.
pub const RESULT_COLUMNS: [&str; 22] = [
    "schema_version",
    "function",
    "family",
    "density",
    "d",
    "s",
    "n",
    "mode",
    "theta",
    "eta",
    "master_seed",
    "trial",
    "trial_seed",
    "m",
    "m_o",
    "m_g",
    "m_tilde",
    "h1_error",
    "linf_error",
    "status",
    "iterations",
    "wall_time",
];

pub const AGGREGATE_COLUMNS: [&str; 16] = [
    "schema_version",
    "function",
    "family",
    "density",
    "d",
    "s",
    "n",
    "mode",
    "theta",
    "m_tilde",
    "trials",
    "optimal",
    "h1_median",
    "h1_mean",
    "linf_median",
    "linf_mean",
];

pub const PLOT_COLUMNS: [&str; 3] = ["series", "m_tilde", "median_error"];

/// One recovery in a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub schema_version: u32,
    pub function: String,
    pub family: String,
    pub density: String,
    pub d: usize,
    pub s: usize,
    pub n: usize,
    pub mode: String,
    pub theta: f64,
    pub eta: f64,
    pub master_seed: u64,
    pub trial: usize,
    pub trial_seed: u64,
    /// Sample points.
    pub m: usize,
    pub m_o: usize,
    pub m_g: usize,
    /// `m_o + m_g`.
    pub m_tilde: usize,
    pub h1_error: f64,
    pub linf_error: f64,
    pub status: String,
    pub iterations: usize,
    /// Seconds, when timing is recorded.
    pub wall_time: Option<f64>,
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

impl ResultRow {
    pub fn record(&self) -> Vec<String> {
        vec![
            self.schema_version.to_string(),
            self.function.clone(),
            self.family.clone(),
            self.density.clone(),
            self.d.to_string(),
            self.s.to_string(),
            self.n.to_string(),
            self.mode.clone(),
            fmt_float(self.theta),
            fmt_float(self.eta),
            self.master_seed.to_string(),
            self.trial.to_string(),
            self.trial_seed.to_string(),
            self.m.to_string(),
            self.m_o.to_string(),
            self.m_g.to_string(),
            self.m_tilde.to_string(),
            fmt_float(self.h1_error),
            fmt_float(self.linf_error),
            self.status.clone(),
            self.iterations.to_string(),
            self.wall_time.map_or_else(|| "NA".into(), fmt_float),
        ]
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Worker threads; 0 lets rayon decide.
    pub jobs: usize,
    pub record_timing: bool,
}

#[derive(Debug, Clone, Copy)]
struct Job {
    mode: SamplingMode,
    theta_idx: usize,
    cost: usize,
    trial: usize,
}

struct Shared {
    oracle: FunctionOracle,
    setups: Vec<RecoverySetup>,
    h1_grid: SampleSet,
    linf_grid: SampleSet,
}

/// Rows in config order (mode, θ, cost, trial). On a failure the rows before
/// it are returned along with the error.
pub fn run_plan(plan: &Plan, opts: RunOptions) -> (Vec<ResultRow>, Option<CliError>) {
    let shared = match prepare(plan) {
        Ok(s) => s,
        Err(e) => return (Vec::new(), Some(e)),
    };
    let mut jobs = Vec::new();
    for &mode in &plan.modes {
        for theta_idx in 0..plan.config.thetas.len() {
            for &cost in &plan.costs {
                for trial in 0..plan.config.trials {
                    jobs.push(Job {
                        mode,
                        theta_idx,
                        cost,
                        trial,
                    });
                }
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs)
        .build()
        .expect("thread pool");
    let results: Vec<Result<ResultRow, CliError>> = pool.install(|| {
        jobs.par_iter()
            .map(|job| run_job(plan, &shared, job, opts.record_timing))
            .collect()
    });
    let mut rows = Vec::with_capacity(results.len());
    for r in results {
        match r {
            Ok(row) => rows.push(row),
            Err(e) => return (rows, Some(e)),
        }
    }
    (rows, None)
}

fn prepare(plan: &Plan) -> Result<Shared, CliError> {
    let cfg = &plan.config;
    let oracle = test_function(plan.function, cfg.d)?;
    let setups = cfg
        .thetas
        .iter()
        .map(|&t| RecoverySetup::new(plan.family, plan.density, cfg.d, cfg.s, t))
        .collect::<Result<Vec<_>, _>>()?;
    // one grid for the whole batch
    let grid_seed = derive_seed(cfg.seed, "error-grid", 0);
    let h1_grid = sample_points(&plan.family, &plan.density, cfg.d, plan.grid_size, grid_seed)?;
    let linf_grid =
        sample_points(&plan.family, &Density::Uniform, cfg.d, plan.grid_size, grid_seed)?;
    Ok(Shared {
        oracle,
        setups,
        h1_grid,
        linf_grid,
    })
}

fn run_job(plan: &Plan, shared: &Shared, job: &Job, timing: bool) -> Result<ResultRow, CliError> {
    let cfg = &plan.config;
    let start = Instant::now();
    let m = samples_for_cost(job.mode, job.cost).expect("costs validated");
    // trials share points across modes and θ: common random numbers
    let trial_seed = derive_seed(cfg.seed, "trial", job.trial as u64);
    let setup = &shared.setups[job.theta_idx];
    let (approx, diag) = setup.recover(&shared.oracle, m, job.mode, cfg.eta, trial_seed, &plan.solver)?;
    let h1 = h1_error_on(&shared.oracle, &approx, &shared.h1_grid)?.value;
    let linf = linf_error_on(&shared.oracle, &approx, &shared.linf_grid)?;
    Ok(ResultRow {
        schema_version: SCHEMA_VERSION,
        function: plan.function.label().into(),
        family: plan.family.to_string(),
        density: plan.density.to_string(),
        d: cfg.d,
        s: cfg.s,
        n: plan.n,
        mode: job.mode.label(),
        theta: setup.theta,
        eta: cfg.eta,
        master_seed: cfg.seed,
        trial: job.trial,
        trial_seed,
        m,
        m_o: diag.function_samples,
        m_g: diag.gradient_samples,
        m_tilde: diag.cost,
        h1_error: h1,
        linf_error: linf,
        status: diag.status.as_str().into(),
        iterations: diag.iterations,
        wall_time: timing.then(|| start.elapsed().as_secs_f64()),
    })
}

/// Per-(mode, θ, m̃) summary across trials.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateRow {
    pub mode: String,
    pub theta: f64,
    pub m_tilde: usize,
    pub trials: usize,
    pub optimal: usize,
    pub h1_median: f64,
    pub h1_mean: f64,
    pub linf_median: f64,
    pub linf_mean: f64,
}

impl AggregateRow {
    pub fn series(&self) -> String {
        format!("{} theta={}", self.mode, self.theta)
    }
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let k = v.len();
    if k == 0 {
        f64::NAN
    } else if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    }
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Groups rows by (mode, θ, m̃), keeping first-appearance order.
pub fn aggregate(rows: &[ResultRow]) -> Vec<AggregateRow> {
    let mut order: Vec<(String, u64, usize)> = Vec::new();
    let mut groups: BTreeMap<(String, u64, usize), Vec<&ResultRow>> = BTreeMap::new();
    for r in rows {
        let key = (r.mode.clone(), r.theta.to_bits(), r.m_tilde);
        groups
            .entry(key.clone())
            .or_insert_with(|| {
                order.push(key);
                Vec::new()
            })
            .push(r);
    }
    order
        .into_iter()
        .map(|key| {
            let g = &groups[&key];
            let h1: Vec<f64> = g.iter().map(|r| r.h1_error).collect();
            let linf: Vec<f64> = g.iter().map(|r| r.linf_error).collect();
            AggregateRow {
                mode: key.0,
                theta: f64::from_bits(key.1),
                m_tilde: key.2,
                trials: g.len(),
                optimal: g.iter().filter(|r| r.status == "optimal").count(),
                h1_median: median(&h1),
                h1_mean: mean(&h1),
                linf_median: median(&linf),
                linf_mean: mean(&linf),
            }
        })
        .collect()
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>, CliError> {
    Ok(csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)?)
}

/// Writes `results.csv`, `aggregate.csv`, `plot_h1.csv` and `plot_linf.csv`
/// into `dir`, plus the resolved configuration as `config.json`.
pub fn write_outputs(plan: &Plan, rows: &[ResultRow], dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir)?;
    let mut w = csv_writer(&dir.join("results.csv"))?;
    w.write_record(RESULT_COLUMNS)?;
    for r in rows {
        w.write_record(r.record())?;
    }
    w.flush()?;

    let agg = aggregate(rows);
    let cfg = &plan.config;
    let mut w = csv_writer(&dir.join("aggregate.csv"))?;
    w.write_record(AGGREGATE_COLUMNS)?;
    for a in &agg {
        w.write_record([
            SCHEMA_VERSION.to_string(),
            plan.function.label().into(),
            plan.family.to_string(),
            plan.density.to_string(),
            cfg.d.to_string(),
            cfg.s.to_string(),
            plan.n.to_string(),
            a.mode.clone(),
            fmt_float(a.theta),
            a.m_tilde.to_string(),
            a.trials.to_string(),
            a.optimal.to_string(),
            fmt_float(a.h1_median),
            fmt_float(a.h1_mean),
            fmt_float(a.linf_median),
            fmt_float(a.linf_mean),
        ])?;
    }
    w.flush()?;

    for (name, pick) in [
        ("plot_h1.csv", (|a: &AggregateRow| a.h1_median) as fn(&AggregateRow) -> f64),
        ("plot_linf.csv", |a: &AggregateRow| a.linf_median),
    ] {
        let mut w = csv_writer(&dir.join(name))?;
        w.write_record(PLOT_COLUMNS)?;
        for a in &agg {
            w.write_record([a.series(), a.m_tilde.to_string(), fmt_float(pick(a))])?;
        }
        w.flush()?;
    }

    let mut f = fs::File::create(dir.join("config.json"))?;
    writeln!(f, "{}", plan.config.to_json())?;
    Ok(())
}
