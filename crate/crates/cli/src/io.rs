//! Input parsing and atomic output.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use tempfile::NamedTempFile;

use crate::error::{CliError, CliResult};

/// Parse newline-delimited decimal observations. Blank lines are skipped;
/// line numbers in errors are 1-based.
pub fn parse_observations(text: &str, path: &Path) -> CliResult<Vec<f64>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let token = raw.trim();
        if token.is_empty() {
            continue;
        }
        let err = |message: String| CliError::Input { path: path.to_path_buf(), line: i + 1, message };
        let v: f64 = token.parse().map_err(|_| err(format!("not a number: {token:?}")))?;
        if !v.is_finite() {
            return Err(err(format!("value is not finite: {token:?}")));
        }
        out.push(v);
    }
    if out.is_empty() {
        return Err(CliError::Validation(format!("{}: no observations found", path.display())));
    }
    Ok(out)
}

pub fn read_observations(path: &Path) -> CliResult<Vec<f64>> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(format!("reading {}", path.display()), e))?;
    parse_observations(&text, path)
}

/// Fixed-format float for CSV: 17 significant digits, '.' decimal point.
pub fn csv_float(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn csv_opt(v: Option<f64>) -> String {
    v.map(csv_float).unwrap_or_default()
}

pub fn to_json<T: Serialize>(value: &T) -> CliResult<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| CliError::Validation(format!("serialising output: {e}")))?;
    bytes.push(b'\n');
    Ok(bytes)
}

/// Write `bytes` to `path` through a temporary file in the same directory
/// and an atomic rename, or to stdout when no path is given.
pub fn emit(path: Option<&Path>, bytes: &[u8]) -> CliResult<()> {
    let Some(path) = path else {
        let mut stdout = std::io::stdout().lock();
        return stdout
            .write_all(bytes)
            .and_then(|_| stdout.flush())
            .map_err(|e| CliError::io("writing to stdout", e));
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let context = || format!("writing {}", path.display());
    let mut tmp = NamedTempFile::new_in(dir).map_err(|e| CliError::io(context(), e))?;
    tmp.write_all(bytes).map_err(|e| CliError::io(context(), e))?;
    tmp.as_file().sync_all().map_err(|e| CliError::io(context(), e))?;
    tmp.persist(path).map_err(|e| CliError::io(context(), e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_values_and_skips_blank_lines() {
        let v = parse_observations("1.5\n\n -2e-3 \n4\n", Path::new("x")).unwrap();
        assert_eq!(v, vec![1.5, -2e-3, 4.0]);
    }

    #[test]
    fn reports_the_offending_line() {
        let text = "1\n2\n3\n4\n5\n6\nabc\n8\n";
        match parse_observations(text, Path::new("data.txt")) {
            Err(CliError::Input { line, .. }) => assert_eq!(line, 7),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_observations("1\nNaN\n", Path::new("d")), Err(CliError::Input { line: 2, .. })));
    }

    #[test]
    fn empty_input_is_rejected() {
        assert!(matches!(parse_observations("\n  \n", Path::new("d")), Err(CliError::Validation(_))));
    }

    #[test]
    fn csv_floats_round_trip() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 123456789.123] {
            assert_eq!(csv_float(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.json");
        emit(Some(&path), b"first").unwrap();
        emit(Some(&path), b"second").unwrap();
        assert_eq!(fs::read(&path).unwrap(), b"second");
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
