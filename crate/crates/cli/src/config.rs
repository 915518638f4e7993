//! Flat `key = value` files with `[section]` headers.
//!
//! ```text
//! [lattice]
//! L0 = 100
//! LBC = 6..
//! [temperature]
//! T = 0.6,2.6,4.6
//! ```
//!
//! `#` starts a comment. Keys must appear under their own section, and each
//! key may be given once per file. Overrides use `key=value` or
//! `section.key=value` and are applied after the file.

use std::fs;
use std::path::Path;

use loctemp::experiments::{ExperimentConfig, Kind, KEYS};

use crate::error::CliError;

/// The bare message, without the core error's own prefix.
fn message(e: loctemp::Error) -> String {
    match e {
        loctemp::Error::Config(m) => m,
        other => other.to_string(),
    }
}

pub fn parse_config(
    path: Option<&Path>,
    kind: Kind,
    overrides: &[String],
) -> Result<ExperimentConfig, CliError> {
    let mut cfg = ExperimentConfig::defaults(kind);
    if let Ok(v) = std::env::var(crate::THREADS_ENV) {
        cfg.set("threads", &v)
            .map_err(|e| CliError::Config(format!("{}: {}", crate::THREADS_ENV, message(e))))?;
    }
    if let Some(path) = path {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        apply_text(&mut cfg, &text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    }
    for o in overrides {
        let (k, v) = o
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("override `{o}` is not key=value")))?;
        cfg.set(k.trim(), v)
            .map_err(|e| CliError::Config(format!("override `{o}`: {}", message(e))))?;
    }
    cfg.validate().map_err(|e| CliError::Config(message(e)))?;
    Ok(cfg)
}

/// Applies every assignment in `text`; errors carry the line number.
pub fn apply_text(cfg: &mut ExperimentConfig, text: &str) -> Result<(), String> {
    let mut section: Option<String> = None;
    let mut seen: Vec<(String, String)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            let name = name.trim();
            if !KEYS.iter().any(|(s, _)| *s == name) {
                return Err(format!("line {line_no}: unknown section [{name}]"));
            }
            section = Some(name.to_string());
            continue;
        }
        let (key, value) =
            line.split_once('=').ok_or_else(|| format!("line {line_no}: expected key = value"))?;
        let key = key.trim();
        let Some(sec) = &section else {
            return Err(format!("line {line_no}: key `{key}` appears before any [section]"));
        };
        if !KEYS.contains(&(sec.as_str(), key)) {
            return Err(match KEYS.iter().find(|(_, k)| *k == key) {
                Some((home, _)) => format!("line {line_no}: key `{key}` belongs in [{home}]"),
                None => format!("line {line_no}: unknown key `{key}`"),
            });
        }
        if seen.iter().any(|(s, k)| s == sec && k == key) {
            return Err(format!("line {line_no}: key `{key}` given twice"));
        }
        seen.push((sec.clone(), key.to_string()));
        cfg.set(key, value).map_err(|e| format!("line {line_no}: {}", message(e)))?;
    }
    Ok(())
}
