use std::path::{Path, PathBuf};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] loctemp::Error),

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },

    #[error("{0} oracle checks exceeded the tolerance")]
    Verify(usize),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.to_path_buf(), source }
    }

    pub fn csv(path: &Path, source: csv::Error) -> Self {
        if source.is_io_error() {
            if let csv::ErrorKind::Io(e) = source.into_kind() {
                return CliError::io(path, e);
            }
            unreachable!("checked for an I/O error")
        }
        CliError::Csv { path: path.to_path_buf(), source }
    }

    /// 0 success, 1 configuration, 2 numerical failure, 3 I/O.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::Core(e) if e.is_numerical() => 2,
            CliError::Core(_) => 1,
            CliError::Verify(_) => 2,
            CliError::Io { .. } => 3,
            // malformed CSV handed to `plot`
            CliError::Csv { .. } => 1,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Config("x".into()).exit_code(), 1);
        assert_eq!(CliError::Core(loctemp::Error::Bracket(1.0)).exit_code(), 2);
        assert_eq!(CliError::Core(loctemp::Error::BadLattice(3)).exit_code(), 1);
        let io = std::io::Error::new(std::io::ErrorKind::NotFound, "gone");
        assert_eq!(CliError::io(Path::new("a"), io).exit_code(), 3);
        assert_eq!(CliError::Verify(2).exit_code(), 2);
    }
}
