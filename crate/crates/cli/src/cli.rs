//! Argument parsing and subcommand dispatch.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use gradcs::basis1d::{BasisFamily, Density};
use gradcs::index_sets::KMode;
use gradcs::recovery::{ComplexityQuery, ComplexitySetting};

use crate::config::ExperimentConfig;
use crate::experiment::{run_plan, write_outputs, RunOptions};
use crate::validate::{run_suite, write_report};
use crate::{theory, CliError, OUT_DIR_ENV};

#[derive(Parser, Debug)]
#[command(name = "gradcs", version, about = "Gradient-augmented sparse polynomial recovery experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run an experiment sweep from a JSON config.
    Run {
        config: PathBuf,
        /// Override the master seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads (0 = all cores).
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        /// Output directory.
        #[arg(long, env = OUT_DIR_ENV)]
        out: Option<PathBuf>,
        /// Record per-run wall time instead of NA (output is then not reproducible).
        #[arg(long)]
        record_timing: bool,
    },
    /// Print sample-complexity estimates.
    Theory {
        /// legendre, chebyshev or jacobi(a,b); fourier for the Fourier case.
        #[arg(long)]
        family: String,
        /// match, chebyshev or uniform.
        #[arg(long, default_value = "match")]
        density: String,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        s: usize,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        /// Restrict to these settings (repeatable); all applicable ones by default.
        #[arg(long = "setting")]
        settings: Vec<String>,
        #[arg(long, value_enum, default_value_t = KModeArg::Bound)]
        k_mode: KModeArg,
        /// Index-set size N for the Fourier case.
        #[arg(long)]
        n: Option<usize>,
        /// Also write the table as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Run a validation suite and print one line per invariant.
    Validate {
        suite: String,
        /// Worker threads (0 = all cores).
        #[arg(long, default_value_t = 0)]
        jobs: usize,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum KModeArg {
    /// Exhaustive search over lower sets.
    Exact,
    /// Closed-form bound.
    Bound,
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(command: Command) -> Result<i32, CliError> {
    match command {
        Command::Run {
            config,
            seed,
            jobs,
            out,
            record_timing,
        } => {
            let text = fs::read_to_string(&config)
                .map_err(|e| CliError::Input(format!("cannot read {}: {e}", config.display())))?;
            let mut cfg = ExperimentConfig::from_json(&text)?;
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            let plan = cfg.resolve(Some(&text))?;
            let dir = out
                .or_else(|| plan.config.output.clone())
                .unwrap_or_else(|| PathBuf::from("results"));
            let (rows, err) = run_plan(&plan, RunOptions { jobs, record_timing });
            // flush whatever finished, even after a failure
            write_outputs(&plan, &rows, &dir)?;
            eprintln!("wrote {} rows to {}", rows.len(), dir.display());
            match err {
                Some(e) => Err(CliError::Failed(format!("run aborted: {e}"))),
                None => Ok(0),
            }
        }
        Command::Theory {
            family,
            density,
            d,
            s,
            eps,
            settings,
            k_mode,
            n,
            csv,
        } => {
            let family: BasisFamily = family.parse().map_err(|e| CliError::Input(format!("{e}")))?;
            let mu: Density = density.parse().map_err(|e| CliError::Input(format!("{e}")))?;
            let settings = settings
                .iter()
                .map(|s| s.parse::<ComplexitySetting>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| CliError::Input(format!("{e}")))?;
            let query = ComplexityQuery {
                family,
                mu,
                d,
                s,
                eps,
                k_mode: match k_mode {
                    KModeArg::Exact => KMode::Exact,
                    KModeArg::Bound => KMode::PaperBound,
                },
                n,
            };
            let rows = theory::theory_table(&query, &settings)?;
            theory::write_table(io::stdout().lock(), &query, &rows)?;
            if let Some(path) = csv {
                theory::write_csv(&path, &query, &rows)?;
            }
            Ok(0)
        }
        Command::Validate { suite, jobs } => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(jobs)
                .build()
                .expect("thread pool");
            let checks = pool.install(|| run_suite(&suite))?;
            let mut out = io::stdout().lock();
            write_report(&mut out, &checks)?;
            out.flush()?;
            Ok(if checks.iter().all(|c| c.pass) { 0 } else { 1 })
        }
    }
}
