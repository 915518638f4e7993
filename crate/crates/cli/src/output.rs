//! CSV tables and the echoed configuration written next to them.

use std::fs::{self, File};
use std::io::Write;
use std::path::{Path, PathBuf};

use loctemp::experiments::{ExperimentConfig, Kind, Row, SummaryRow, SCHEMA_VERSION};

use crate::error::CliError;

/// First line of every table; `plot` reads the kind back from it.
pub fn schema_line(kind: Kind, table: &str) -> String {
    format!("# loctemp {kind} {table} schema v{SCHEMA_VERSION}")
}

/// Writes `rows` under the fixed header of their kind.
pub fn emit_csv<R: Row>(kind: Kind, rows: &[R], path: &Path) -> Result<(), CliError> {
    write_table(path, &schema_line(kind, "rows"), R::header(), rows.iter().map(Row::record))
}

pub fn emit_summary(kind: Kind, rows: &[SummaryRow], path: &Path) -> Result<(), CliError> {
    write_table(path, &schema_line(kind, "summary"), SummaryRow::header(), rows.iter().map(SummaryRow::record))
}

fn write_table(
    path: &Path,
    comment: &str,
    header: &[&str],
    records: impl Iterator<Item = Vec<String>>,
) -> Result<(), CliError> {
    let mut file = File::create(path).map_err(|e| CliError::io(path, e))?;
    writeln!(file, "{comment}").map_err(|e| CliError::io(path, e))?;
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(file);
    w.write_record(header).map_err(|e| CliError::csv(path, e))?;
    for r in records {
        w.write_record(&r).map_err(|e| CliError::csv(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

/// Where one run puts its files.
#[derive(Debug, Clone)]
pub struct OutputPaths {
    pub rows: PathBuf,
    pub summary: PathBuf,
    pub config: PathBuf,
}

impl OutputPaths {
    /// Creates the directory and writes the effective configuration, so
    /// path problems surface before any computation.
    pub fn prepare(cfg: &ExperimentConfig) -> Result<Self, CliError> {
        let dir = &cfg.output;
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        let kind = cfg.kind;
        let paths = Self {
            rows: dir.join(format!("{kind}.csv")),
            summary: dir.join(format!("{kind}_summary.csv")),
            config: dir.join(format!("{kind}.conf")),
        };
        let text = format!("# effective configuration\n{}", cfg.to_text());
        fs::write(&paths.config, text).map_err(|e| CliError::io(&paths.config, e))?;
        for p in [&paths.rows, &paths.summary] {
            File::create(p).map_err(|e| CliError::io(p, e))?;
        }
        Ok(paths)
    }
}
