//! Sample-complexity tables.

use std::io::Write;
use std::path::Path;

use gradcs::index_sets::KMode;
use gradcs::recovery::{
    sample_complexity_estimate, ComplexityEstimate, ComplexityQuery, ComplexitySetting,
};
use gradcs::Error;

use crate::experiment::fmt_float;
use crate::CliError;

pub const THEORY_COLUMNS: [&str; 6] = [
    "setting",
    "k_mode",
    "k_factor",
    "coherence_factor",
    "log_factor",
    "estimate",
];

/// Estimates for each requested setting. With `settings` empty every setting
/// is tried and the unsupported ones are skipped; an explicit unsupported
/// setting, or nothing supported at all, is an input error.
pub fn theory_table(
    query: &ComplexityQuery,
    settings: &[ComplexitySetting],
) -> Result<Vec<ComplexityEstimate>, CliError> {
    let explicit = !settings.is_empty();
    let list: &[ComplexitySetting] = if explicit {
        settings
    } else {
        &ComplexitySetting::ALL
    };
    let mut out = Vec::new();
    let mut skipped = Vec::new();
    for &setting in list {
        match sample_complexity_estimate(query, setting) {
            Ok(est) => out.push(est),
            Err(e @ (Error::Unsupported(_) | Error::Domain(_))) if !explicit => {
                skipped.push(format!("{setting}: {e}"))
            }
            Err(e) => return Err(CliError::Input(format!("{setting}: {e}"))),
        }
    }
    if out.is_empty() {
        return Err(CliError::Input(format!(
            "no setting covers these parameters:\n  {}",
            skipped.join("\n  ")
        )));
    }
    Ok(out)
}

pub fn k_mode_label(mode: KMode) -> &'static str {
    match mode {
        KMode::Exact => "exact",
        KMode::PaperBound => "bound",
    }
}

/// Aligned text table.
pub fn write_table(
    mut out: impl Write,
    query: &ComplexityQuery,
    rows: &[ComplexityEstimate],
) -> std::io::Result<()> {
    writeln!(
        out,
        "family={} density={} d={} s={} eps={}",
        query.family, query.mu, query.d, query.s, query.eps
    )?;
    writeln!(
        out,
        "{:<24} {:>14} {:>12} {:>14} {:>16}",
        "setting", "K(s)", "coherence", "log factor", "m estimate"
    )?;
    for r in rows {
        writeln!(
            out,
            "{:<24} {:>14.6} {:>12.6} {:>14.6} {:>16.6}",
            r.setting.label(),
            r.k_factor,
            r.coherence_factor,
            r.log_factor,
            r.value
        )?;
    }
    Ok(())
}

pub fn write_csv(path: &Path, query: &ComplexityQuery, rows: &[ComplexityEstimate]) -> Result<(), CliError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)?;
    w.write_record(THEORY_COLUMNS)?;
    for r in rows {
        w.write_record([
            r.setting.label().to_string(),
            k_mode_label(query.k_mode).into(),
            fmt_float(r.k_factor),
            fmt_float(r.coherence_factor),
            fmt_float(r.log_factor),
            fmt_float(r.value),
        ])?;
    }
    w.flush()?;
    Ok(())
}
