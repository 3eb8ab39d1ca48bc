//! Scenario files: TOML text to a validated [`Scenario`].

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use farm_sentinel_core::scenario::Issue;
use farm_sentinel_core::Scenario;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyntaxError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
    }
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: {err}", path.display())]
    Syntax { path: PathBuf, err: SyntaxError },
    #[error("{}: {} problem(s)", path.display(), issues.len())]
    Invalid { path: PathBuf, issues: Vec<Issue> },
}

impl LoadError {
    /// One line per problem, each prefixed with the file name.
    pub fn details(&self) -> Vec<String> {
        match self {
            LoadError::Invalid { path, issues } => issues.iter().map(|i| format!("{}: {i}", path.display())).collect(),
            other => vec![other.to_string()],
        }
    }

    pub fn is_runtime(&self) -> bool {
        matches!(self, LoadError::Io { .. })
    }
}

/// 1-based line and column of a byte offset.
fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

/// Parses without validating.
pub fn parse_scenario(text: &str) -> Result<Scenario, SyntaxError> {
    toml::from_str(text).map_err(|e| {
        let (line, column) = e.span().map_or((1, 1), |s| line_col(text, s.start));
        SyntaxError { line, column, message: e.message().trim_end().to_string() }
    })
}

pub fn to_toml(scenario: &Scenario) -> String {
    toml::to_string(scenario).expect("scenario serializes")
}

/// Reads, parses and validates; every validation problem is reported at once.
pub fn load_scenario(path: &Path) -> Result<Scenario, LoadError> {
    let text = fs::read_to_string(path).map_err(|source| LoadError::Io { path: path.into(), source })?;
    let scenario = parse_scenario(&text).map_err(|err| LoadError::Syntax { path: path.into(), err })?;
    scenario.validate().map_err(|issues| LoadError::Invalid { path: path.into(), issues })?;
    Ok(scenario)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "[seeds]\nmaster = 7\n\n[farm]\nzones = [{ id = 1, base = [0.0, 0.0, 0.0] }]\n";

    #[test]
    fn minimal_document() {
        let s = parse_scenario(MINIMAL).unwrap();
        assert_eq!(s.seeds.master, 7);
        assert_eq!(s.farm.zones.len(), 1);
        assert!(s.validate().is_ok());
    }

    #[test]
    fn syntax_error_has_line() {
        let text = "[seeds]\nmaster = 7\n\n[farm]\nzones = [\n  { id = 1, base = [0.0, 0.0 }\n]\n";
        let err = parse_scenario(text).unwrap_err();
        assert_eq!(err.line, 6);
    }

    #[test]
    fn unknown_field_has_line() {
        let text = format!("{MINIMAL}\n[fleet]\nuavs = 2\nwings = 4\n");
        let err = parse_scenario(&text).unwrap_err();
        assert_eq!(err.line, 9);
        assert!(err.message.contains("wings"), "{}", err.message);
    }

    #[test]
    fn round_trip() {
        let mut s = Scenario::line_farm(3, 2, 400.0);
        s.fleet.transit_speed = f64::INFINITY;
        let back = parse_scenario(&to_toml(&s)).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn line_col_counts() {
        assert_eq!(line_col("ab\ncd", 4), (2, 2));
        assert_eq!(line_col("ab", 0), (1, 1));
    }
}
