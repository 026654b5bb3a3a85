//! Self-describing result records printed by the command-line tool.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

/// One record per invocation. Reals are stored as decimal strings with 15
/// significant digits, integers exactly.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub schema_version: u32,
    pub command: String,
    pub parameters: BTreeMap<String, String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub summary: BTreeMap<String, String>,
    pub notes: Vec<String>,
    pub violations: Vec<String>,
}

impl OutputRecord {
    pub fn new(command: impl Into<String>) -> Self {
        OutputRecord {
            schema_version: SCHEMA_VERSION,
            command: command.into(),
            ..Default::default()
        }
    }

    pub fn param(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.parameters.insert(key.to_string(), value.to_string());
        self
    }

    pub fn columns(&mut self, names: &[&str]) -> &mut Self {
        self.columns = names.iter().map(|s| s.to_string()).collect();
        self
    }

    pub fn row(&mut self, cells: Vec<String>) -> &mut Self {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(cells);
        self
    }

    pub fn summary(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.summary.insert(key.to_string(), value.to_string());
        self
    }

    pub fn note(&mut self, note: impl Into<String>) -> &mut Self {
        self.notes.push(note.into());
        self
    }

    pub fn violation(&mut self, what: impl Into<String>) -> &mut Self {
        self.violations.push(what.into());
        self
    }

    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("records always serialize")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    /// Plain-text rendering: parameters, an aligned table, summary, notes.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.command);
        for (k, v) in &self.parameters {
            let _ = writeln!(out, "  {k} = {v}");
        }
        if !self.columns.is_empty() {
            let mut widths: Vec<usize> = self.columns.iter().map(|c| c.chars().count()).collect();
            for row in &self.rows {
                for (w, cell) in widths.iter_mut().zip(row) {
                    *w = (*w).max(cell.chars().count());
                }
            }
            let line = |cells: &[String]| {
                let padded: Vec<String> = cells
                    .iter()
                    .zip(&widths)
                    .map(|(c, &w)| format!("{c:<w$}"))
                    .collect();
                padded.join("  ").trim_end().to_string()
            };
            let _ = writeln!(out);
            let _ = writeln!(out, "{}", line(&self.columns));
            for row in &self.rows {
                let _ = writeln!(out, "{}", line(row));
            }
        }
        if !self.summary.is_empty() {
            let _ = writeln!(out);
            for (k, v) in &self.summary {
                let _ = writeln!(out, "{k}: {v}");
            }
        }
        for note in &self.notes {
            let _ = writeln!(out, "note: {note}");
        }
        for v in &self.violations {
            let _ = writeln!(out, "VIOLATION: {v}");
        }
        out
    }
}

/// 15 significant digits, fixed notation for moderate magnitudes and
/// scientific notation otherwise.
pub fn real(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0.00000000000000".to_string();
    }
    // The exponent of the rounded scientific form accounts for carries
    // such as 9.999… → 10.0….
    let sci = format!("{x:.14e}");
    let exponent: i32 = sci
        .rsplit('e')
        .next()
        .and_then(|e| e.parse().ok())
        .expect("scientific formatting has an exponent");
    if (-5..15).contains(&exponent) {
        let decimals = (14 - exponent) as usize;
        format!("{x:.decimals$}")
    } else {
        sci
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fifteen_significant_digits() {
        assert_eq!(real(std::f64::consts::SQRT_2), "1.41421356237310");
        assert_eq!(real(1.0), "1.00000000000000");
        assert_eq!(real(359.99925), "359.999250000000");
        assert_eq!(real(0.0), "0.00000000000000");
        assert_eq!(real(-2.5), "-2.50000000000000");
        assert_eq!(real(0.001234), "0.00123400000000000");
        assert_eq!(real(9.999999999999999), "10.0000000000000");
        assert_eq!(real(1e-20), "1.00000000000000e-20");
    }

    #[test]
    fn json_round_trip() {
        let mut rec = OutputRecord::new("rho");
        rec.param("k", 2).param("n", 4).columns(&["lambda", "rho"]);
        rec.row(vec!["1".into(), real(std::f64::consts::SQRT_2)]);
        rec.summary("method", "closed-form").note("domain x > 2");
        let back = OutputRecord::from_json(&rec.to_json()).unwrap();
        assert_eq!(back, rec);
        assert_eq!(back.schema_version, SCHEMA_VERSION);
    }

    #[test]
    fn text_rendering_aligns_columns() {
        let mut rec = OutputRecord::new("demo");
        rec.columns(&["a", "bbb"]);
        rec.row(vec!["xxxx".into(), "1".into()]);
        let text = rec.render_text();
        assert!(text.contains("a     bbb\nxxxx  1\n"), "{text}");
    }
}
