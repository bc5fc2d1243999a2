use crate::error::CliError;
use llfit_core::{Diagnostics, EstimateResult};
use std::io::Write;
use std::str::FromStr;

/// Decimal places for printed numbers, or the shortest representation that
/// parses back to the same `f64`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Precision {
    Fixed(usize),
    Full,
}

impl FromStr for Precision {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "full" {
            return Ok(Precision::Full);
        }
        match s.parse::<usize>() {
            Ok(p) if p <= 17 => Ok(Precision::Fixed(p)),
            _ => Err(format!("expected 0..=17 or 'full', got '{s}'")),
        }
    }
}

impl Precision {
    pub fn fmt(&self, x: f64) -> String {
        match *self {
            Precision::Fixed(p) => format!("{x:.p$}"),
            Precision::Full => format!("{x}"),
        }
    }

    pub fn digits(&self) -> usize {
        match *self {
            Precision::Fixed(p) => p,
            Precision::Full => 17,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Table,
    Csv,
    Json,
}

pub fn diagnostics_summary(d: &Diagnostics, prec: Precision) -> String {
    match d {
        Diagnostics::Mle { iterations, score_norm, solver } => {
            let solver = match solver {
                llfit_core::estimators::MleSolver::Newton => "newton",
                llfit_core::estimators::MleSolver::SimplexThenNewton => "simplex+newton",
            };
            format!("iterations={iterations} score_norm={score_norm:.1e} solver={solver}")
        }
        Diagnostics::Percentile { pair, t_low, t_high } => {
            format!("l={} h={} t_low={} t_high={}", pair.low(), pair.high(), prec.fmt(*t_low), prec.fmt(*t_high))
        }
        Diagnostics::Regression { line } => {
            format!("slope={} intercept={}", prec.fmt(line.slope), prec.fmt(line.intercept))
        }
        Diagnostics::LocationScale { location, scale } => {
            format!("location={} scale={}", prec.fmt(*location), prec.fmt(*scale))
        }
    }
}

/// Columns holding only numbers are right-aligned, the rest left-aligned.
pub fn write_aligned(out: &mut impl Write, header: &[String], rows: &[Vec<String>]) -> std::io::Result<()> {
    let cols = header.len();
    let mut width = header.iter().map(|h| h.chars().count()).collect::<Vec<_>>();
    let mut numeric = vec![!rows.is_empty(); cols];
    for row in rows {
        for (i, cell) in row.iter().enumerate().take(cols) {
            width[i] = width[i].max(cell.chars().count());
            numeric[i] &= cell.parse::<f64>().is_ok() || cell == "NA";
        }
    }
    let line = |cells: &[String]| -> String {
        let mut s = String::new();
        for (i, cell) in cells.iter().enumerate().take(cols) {
            if i > 0 {
                s.push_str("  ");
            }
            let pad = width[i] - cell.chars().count();
            if !numeric[i] {
                s.push_str(cell);
                s.push_str(&" ".repeat(pad));
            } else {
                s.push_str(&" ".repeat(pad));
                s.push_str(cell);
            }
        }
        s.trim_end().to_string()
    };
    writeln!(out, "{}", line(header))?;
    for row in rows {
        writeln!(out, "{}", line(row))?;
    }
    Ok(())
}

pub fn write_csv(out: impl Write, header: &[String], rows: &[Vec<String>]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush().map_err(|e| CliError::Output(e.to_string()))?;
    Ok(())
}

pub fn fit_rows(results: &[EstimateResult], prec: Precision) -> (Vec<String>, Vec<Vec<String>>) {
    let header = ["method", "alpha", "beta", "diagnostics"].map(String::from).to_vec();
    let rows = results
        .iter()
        .map(|r| {
            vec![
                r.method.tag().to_string(),
                prec.fmt(r.alpha()),
                prec.fmt(r.beta()),
                diagnostics_summary(&r.diagnostics, prec),
            ]
        })
        .collect();
    (header, rows)
}
