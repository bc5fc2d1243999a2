//! Dataset sources: a file path or a bundled dataset.

use crate::error::CliError;
use llfit_core::dataset::insulating_fluid;
use llfit_core::Sample;
use std::path::{Path, PathBuf};
use std::str::FromStr;

#[derive(Debug, Clone, PartialEq)]
pub enum DatasetSource {
    Path(PathBuf),
    InsulatingFluid,
}

impl FromStr for DatasetSource {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.strip_prefix("builtin:") {
            Some("insulating-fluid") => Ok(DatasetSource::InsulatingFluid),
            Some(other) => Err(format!("unknown builtin dataset '{other}' (available: insulating-fluid)")),
            None => Ok(DatasetSource::Path(PathBuf::from(s))),
        }
    }
}

impl DatasetSource {
    pub fn load(&self) -> Result<Sample, CliError> {
        match self {
            DatasetSource::InsulatingFluid => Ok(insulating_fluid()),
            DatasetSource::Path(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
                parse_values(path, &text)
            }
        }
    }
}

/// One positive value per record. Records are lines of a CSV file (only the
/// first field is read) or of a whitespace-delimited file; `#` starts a
/// comment and a non-numeric first record is taken as a header.
pub fn parse_values(path: &Path, text: &str) -> Result<Sample, CliError> {
    let records = if text.contains(',') { csv_records(path, text)? } else { plain_records(text) };
    let mut values = Vec::with_capacity(records.len());
    for (i, (line, field)) in records.iter().enumerate() {
        let bad = |message: String| CliError::Record { path: path.to_path_buf(), line: *line, message };
        match field.parse::<f64>() {
            Ok(v) if v > 0.0 && v.is_finite() => values.push(v),
            Ok(v) => return Err(bad(format!("value {v} is not a positive finite number"))),
            Err(_) if i == 0 => continue,
            Err(_) => return Err(bad(format!("'{field}' is not a number"))),
        }
    }
    if values.len() < 2 {
        return Err(CliError::Input(format!(
            "{}: need at least two observations, found {}",
            path.display(),
            values.len()
        )));
    }
    Sample::new(values).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn csv_records(path: &Path, text: &str) -> Result<Vec<(u64, String)>, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            CliError::Record { path: path.to_path_buf(), line, message: e.to_string() }
        })?;
        let line = record.position().map_or(0, |p| p.line());
        match record.get(0) {
            Some(f) if !f.is_empty() => out.push((line, f.to_string())),
            _ => {}
        }
    }
    Ok(out)
}

fn plain_records(text: &str) -> Vec<(u64, String)> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let content = line.split('#').next().unwrap_or("");
        for token in content.split_whitespace() {
            out.push((i as u64 + 1, token.to_string()));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Sample, CliError> {
        parse_values(Path::new("data.txt"), text)
    }

    #[test]
    fn builtin_source() {
        assert_eq!("builtin:insulating-fluid".parse::<DatasetSource>().unwrap(), DatasetSource::InsulatingFluid);
        assert!("builtin:nope".parse::<DatasetSource>().is_err());
        assert_eq!(DatasetSource::InsulatingFluid.load().unwrap().len(), 19);
    }

    #[test]
    fn formats() {
        assert_eq!(parse("time\n1.5\n2.5\n").unwrap().values(), &[1.5, 2.5]);
        assert_eq!(parse("1.5 2.5\n  3.5 # note\n").unwrap().values(), &[1.5, 2.5, 3.5]);
        assert_eq!(parse("t,unit\n1.5,min\n\"2.5\",min\n").unwrap().values(), &[1.5, 2.5]);
    }

    #[test]
    fn errors_cite_lines() {
        let e = parse("1.0\n2.0\n-3.0\n").unwrap_err().to_string();
        assert!(e.contains("data.txt:3"), "{e}");
        let e = parse("t,x\n1.0,a\nfoo,b\n").unwrap_err().to_string();
        assert!(e.contains("data.txt:3"), "{e}");
        assert!(parse("1.0\n").is_err());
        assert!(parse("1.0\n0\n").unwrap_err().to_string().contains(":2"));
    }
}
