//! Comma-separated tables with a `#` header and 12 significant digits.

use std::fmt;

use crate::error::{CliError, Result};

/// Significant digits kept in numeric cells.
pub const SIGNIFICANT_DIGITS: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Text(String),
    Empty,
}

impl Cell {
    /// A numeric cell rounded to [`SIGNIFICANT_DIGITS`], so that emitting
    /// and parsing it again is lossless.
    pub fn num(v: f64) -> Self {
        Cell::Num(round_significant(v))
    }

    pub fn opt(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::num)
    }

    pub fn text(s: impl Into<String>) -> Self {
        Cell::Text(s.into())
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Int(i) => Some(*i as f64),
            Cell::Num(v) => Some(*v),
            _ => None,
        }
    }

    fn parse(s: &str) -> Self {
        if s.is_empty() {
            Cell::Empty
        } else if let Ok(i) = s.parse::<i64>() {
            Cell::Int(i)
        } else if let Ok(v) = s.parse::<f64>() {
            Cell::Num(v)
        } else {
            Cell::Text(s.to_string())
        }
    }
}

pub fn round_significant(v: f64) -> f64 {
    if !v.is_finite() || v == 0.0 {
        return v;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, v)
        .parse()
        .expect("formatted float parses")
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Int(i) => write!(f, "{i}"),
            Cell::Num(v) if v.is_nan() => f.write_str("nan"),
            Cell::Num(v) if *v == 0.0 => f.write_str("0.0"),
            // Shortest round-trip form of the rounded value; exponent
            // notation only far from unity.
            Cell::Num(v) if (1e-4..1e12).contains(&v.abs()) => write!(f, "{v:?}"),
            Cell::Num(v) => write!(f, "{v:e}"),
            Cell::Text(s) => f.write_str(s),
            Cell::Empty => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    /// Free-form `#` lines written above the column line.
    pub comments: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            comments: Vec::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Numeric values of one column; non-numeric cells become `None`.
    pub fn values(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let k = self.column(name)?;
        Some(self.rows.iter().map(|r| r[k].as_f64()).collect())
    }

    pub fn emit(&self) -> String {
        let mut out = String::new();
        for c in &self.comments {
            out.push_str("# ");
            out.push_str(c);
            out.push('\n');
        }
        out.push_str("# ");
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::to_string).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    /// Inverse of [`Table::emit`]: the last `#` line before the data names
    /// the columns.
    pub fn parse(text: &str) -> Result<Self> {
        let mut comments: Vec<String> = Vec::new();
        let mut rows = Vec::new();
        let mut columns: Option<Vec<String>> = None;
        for (i, line) in text.lines().enumerate() {
            if let Some(rest) = line.strip_prefix('#') {
                if columns.is_some() {
                    return Err(CliError::Csv {
                        line: i + 1,
                        message: "comment after data".into(),
                    });
                }
                comments.push(rest.strip_prefix(' ').unwrap_or(rest).to_string());
                continue;
            }
            if line.is_empty() {
                continue;
            }
            let names = match &columns {
                Some(c) => c,
                None => {
                    let last = comments.pop().ok_or(CliError::Csv {
                        line: i + 1,
                        message: "missing header".into(),
                    })?;
                    columns.insert(last.split(',').map(str::to_string).collect())
                }
            };
            let row: Vec<Cell> = line.split(',').map(Cell::parse).collect();
            if row.len() != names.len() {
                return Err(CliError::Csv {
                    line: i + 1,
                    message: format!("{} cells, expected {}", row.len(), names.len()),
                });
            }
            rows.push(row);
        }
        let columns = match columns {
            Some(c) => c,
            None => comments
                .pop()
                .map(|h| h.split(',').map(str::to_string).collect())
                .ok_or(CliError::Csv {
                    line: 0,
                    message: "missing header".into(),
                })?,
        };
        Ok(Self {
            comments,
            columns,
            rows,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_keeps_twelve_digits() {
        assert_eq!(round_significant(0.268_941_421_369_995_1), 0.268941421370);
        assert_eq!(round_significant(-1234.56789012345), -1234.56789012);
        assert_eq!(Cell::num(1.0 / 3.0).to_string(), "0.333333333333");
        assert_eq!(Cell::num(2.0).to_string(), "2.0");
        assert_eq!(Cell::num(1.5e-7).to_string(), "1.5e-7");
    }

    #[test]
    fn emit_parse_round_trip() {
        let mut t = Table::new(&["n", "x", "status", "note"]);
        t.comments.push("generated by a test".into());
        t.push(vec![
            Cell::Int(3),
            Cell::num(std::f64::consts::PI),
            Cell::text("ok"),
            Cell::Empty,
        ]);
        t.push(vec![
            Cell::Int(4),
            Cell::num(-2.5e-9),
            Cell::text("infeasible"),
            Cell::num(f64::INFINITY),
        ]);
        t.push(vec![
            Cell::Int(5),
            Cell::num(0.0),
            Cell::text("ok"),
            Cell::num(1e13 / 3.0),
        ]);
        let text = t.emit();
        assert!(text.starts_with("# generated by a test\n# n,x,status,note\n"));
        assert_eq!(Table::parse(&text).unwrap(), t);
    }

    #[test]
    fn parse_rejects_ragged_rows() {
        assert!(Table::parse("# a,b\n1,2\n3\n").is_err());
        assert!(Table::parse("1,2\n").is_err());
    }
}
