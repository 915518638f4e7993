//! Command-line front end: configuration files, experiment dispatch, CSV
//! and SVG output, and the oracle check.

pub mod config;
pub mod error;
pub mod output;
pub mod plot;

use std::io::Write;

use loctemp::experiments::{
    correlation_scan, locality_sweep, phase_transition_scan, subsystem_report,
    temperature_profile, ExperimentConfig, Kind, SummaryRow,
};
use loctemp::oracle::suite;

pub use config::parse_config;
pub use error::CliError;
pub use output::{emit_csv, emit_summary, OutputPaths};
pub use plot::{render_plot, PlotSpec};

/// Default worker count when neither the file nor `--threads` sets one.
pub const THREADS_ENV: &str = "LOCTEMP_THREADS";

/// Runs one experiment and writes its row table, summary table and the
/// effective configuration into the configured output directory.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<SummaryRow>, CliError> {
    let paths = OutputPaths::prepare(cfg)?;
    let kind = cfg.kind;
    let summary = match kind {
        Kind::Locality => {
            let r = locality_sweep(cfg)?;
            emit_csv(kind, &r.rows, &paths.rows)?;
            r.summary()
        }
        Kind::Profile => {
            let r = temperature_profile(cfg)?;
            emit_csv(kind, &r.rows, &paths.rows)?;
            r.summary()
        }
        Kind::Phase => {
            let r = phase_transition_scan(cfg)?;
            emit_csv(kind, &r.rows, &paths.rows)?;
            r.summary()
        }
        Kind::Correlations => {
            let r = correlation_scan(cfg)?;
            emit_csv(kind, &r.rows, &paths.rows)?;
            r.summary()
        }
        Kind::Subsystems => {
            let r = subsystem_report(cfg)?;
            emit_csv(kind, &r.rows, &paths.rows)?;
            r.summary()
        }
    };
    emit_summary(kind, &summary, &paths.summary)?;
    Ok(summary)
}

/// Prints the oracle comparison table; fails if any check is out of
/// tolerance.
pub fn verify(out: &mut impl Write) -> Result<(), CliError> {
    let report = suite::run()?;
    let stdout_err = |e| CliError::io(std::path::Path::new("<stdout>"), e);
    for c in &report.checks {
        writeln!(out, "{c}").map_err(stdout_err)?;
    }
    let failed = report.failures().count();
    writeln!(
        out,
        "{} checks, {} failed, max error {:.2e} (tolerance {:.0e})",
        report.checks.len(),
        failed,
        report.max_error(),
        suite::TOLERANCE
    )
    .map_err(stdout_err)?;
    if failed > 0 {
        return Err(CliError::Verify(failed));
    }
    Ok(())
}
