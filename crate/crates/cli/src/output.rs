//! Number formatting and CSV tables.

use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use crate::CliError;

pub const SIGNIFICANT_DIGITS: usize = 12;

/// Twelve significant digits, dot decimal separator; scientific outside `[1e-5, 1e15)`.
pub fn num(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-5..15).contains(&exp) {
        return format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    }
    let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exp).max(0) as usize;
    let s = format!("{x:.decimals$}");
    // rounding can carry into a new leading digit
    let digits = s.chars().filter(|c| c.is_ascii_digit()).collect::<String>();
    if digits.trim_start_matches('0').len() > SIGNIFICANT_DIGITS && decimals > 0 {
        format!("{:.*}", decimals - 1, x)
    } else {
        s
    }
}

pub fn masses(m: &[f64]) -> String {
    m.iter().map(|&x| num(x)).collect::<Vec<_>>().join(";")
}

pub fn counts(c: &[u64]) -> String {
    c.iter().map(u64::to_string).collect::<Vec<_>>().join(";")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Self {
        Table { header, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write_to(&self, w: impl Write) -> Result<(), CliError> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(&self.header)?;
        for r in &self.rows {
            out.write_record(r)?;
        }
        out.flush()?;
        Ok(())
    }

    /// Writes to `path`, or stdout when absent.
    pub fn emit(&self, path: Option<&Path>) -> Result<(), CliError> {
        match path {
            Some(p) => {
                let f = File::create(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
                self.write_to(f)
            }
            None => self.write_to(io::stdout().lock()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_digits() {
        assert_eq!(num(0.4), "0.400000000000");
        assert_eq!(num(1.0), "1.00000000000");
        assert_eq!(num(-0.0439453125), "-0.0439453125000");
        assert_eq!(num(123.456), "123.456000000");
        assert_eq!(num(0.9999999999999), "1.00000000000");
        assert_eq!(num(1e-7), "1.00000000000e-7");
        assert_eq!(num(0.0), "0");
        assert_eq!(num(f64::INFINITY), "inf");
        assert_eq!(masses(&[0.5, 0.0]), "0.500000000000;0");
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new(vec!["n", "M", "exact_error"]);
        t.push(vec!["1".into(), "1".into(), num(0.4)]);
        let mut buf = Vec::new();
        t.write_to(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "n,M,exact_error\n1,1,0.400000000000\n");
    }
}
