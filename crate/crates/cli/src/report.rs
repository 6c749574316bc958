//! CSV report with a `#` header block.

use std::fmt::Write as _;

/// Reals are written with 17 significant digits.
pub fn real(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:.16e}")
    }
}

pub fn opt_real(v: Option<f64>) -> String {
    v.map(real).unwrap_or_default()
}

fn quote(field: &str) -> String {
    if field.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", field.replace('"', "\"\"").replace(['\n', '\r'], " "))
    } else {
        field.to_string()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    header: Vec<(String, String)>,
    shadow_reasons: Vec<String>,
    columns: Vec<&'static str>,
    rows: Vec<Vec<String>>,
    /// Rows whose `error` column is filled, plus failed spot checks.
    pub row_errors: usize,
}

impl Report {
    pub fn new(header: Vec<(&'static str, String)>, columns: &[&'static str]) -> Self {
        Report {
            header: header.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
            shadow_reasons: Vec::new(),
            columns: columns.to_vec(),
            rows: Vec::new(),
            row_errors: 0,
        }
    }

    pub fn note(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.header.push((key.into(), value.into()));
    }

    /// Record a failed asymptotic-regime precondition. Duplicates are dropped.
    pub fn shadow(&mut self, reason: impl Into<String>) {
        let reason = reason.into();
        if !self.shadow_reasons.contains(&reason) {
            self.shadow_reasons.push(reason);
        }
    }

    pub fn is_shadow(&self) -> bool {
        !self.shadow_reasons.is_empty()
    }

    pub fn shadow_reasons(&self) -> &[String] {
        &self.shadow_reasons
    }

    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.columns.len(), "row width does not match the columns");
        self.rows.push(row);
    }

    /// A row whose last column is the error message; other cells stay blank
    /// unless given in `lead`.
    pub fn push_error(&mut self, lead: Vec<String>, err: impl std::fmt::Display) {
        let mut row = lead;
        row.resize(self.columns.len() - 1, String::new());
        row.push(err.to_string());
        self.rows.push(row);
        self.row_errors += 1;
    }

    pub fn rows(&self) -> &[Vec<String>] {
        &self.rows
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| *c == name)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("# nufactor report\n");
        for (k, v) in &self.header {
            writeln!(out, "# {k} = {v}").unwrap();
        }
        let regime = if self.is_shadow() { "shadow" } else { "asymptotic" };
        writeln!(out, "# regime = {regime}").unwrap();
        for r in &self.shadow_reasons {
            writeln!(out, "# shadow_reason = {r}").unwrap();
        }
        writeln!(out, "{}", self.columns.join(",")).unwrap();
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|c| quote(c)).collect();
            writeln!(out, "{}", cells.join(",")).unwrap();
        }
        out
    }
}
