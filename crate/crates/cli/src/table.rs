//! Numeric tables and their CSV/JSON renderings.

use std::fmt::Write as _;

use serde_json::{Map, Value};

use crate::config::Format;

/// Column-named table of floats.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

/// Nine significant digits.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.8e}")
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self { columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&x| fmt_num(x)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    /// Object of column arrays. Non-finite values become `null`.
    pub fn to_json(&self) -> String {
        let mut obj = Map::new();
        for (j, name) in self.columns.iter().enumerate() {
            let col: Vec<Value> = self.rows.iter().map(|r| json_num(r[j])).collect();
            obj.insert((*name).to_string(), Value::Array(col));
        }
        let mut s = serde_json::to_string_pretty(&Value::Object(obj)).expect("table serializes");
        s.push('\n');
        s
    }

    /// File name and contents for `stem` in the given format.
    pub fn render(&self, stem: &str, format: Format) -> (String, String) {
        match format {
            Format::Csv => (format!("{stem}.csv"), self.to_csv()),
            Format::Json => (format!("{stem}.json"), self.to_json()),
        }
    }
}

/// Round-trippable JSON number, `null` if not finite.
pub fn json_num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
}

/// Flat JSON object of named scalars, keys in the given order.
pub fn scalars_json(pairs: &[(&str, f64)]) -> String {
    let mut obj = Map::new();
    for (k, v) in pairs {
        obj.insert((*k).to_string(), json_num(*v));
    }
    let mut s = serde_json::to_string_pretty(&Value::Object(obj)).expect("scalars serialize");
    s.push('\n');
    s
}

/// CSV with a leading numeric column, named numeric columns and a trailing
/// free-text column. Text cells are quoted when needed.
pub fn mixed_csv(header: &[String], rows: &[(Vec<f64>, String)]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for (nums, text) in rows {
        for x in nums {
            let _ = write!(out, "{},", fmt_num(*x));
        }
        out.push_str(&csv_text(text));
        out.push('\n');
    }
    out
}

fn csv_text(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(fmt_num(0.123456789123), "1.23456789e-1");
        assert_eq!(fmt_num(-2.0), "-2.00000000e0");
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new(&["a", "b"]);
        t.push(vec![1.0, 0.5]);
        assert_eq!(t.to_csv(), "a,b\n1.00000000e0,5.00000000e-1\n");
    }

    #[test]
    fn json_nan_is_null() {
        let mut t = Table::new(&["x"]);
        t.push(vec![f64::NAN]);
        let v: Value = serde_json::from_str(&t.to_json()).unwrap();
        assert_eq!(v["x"][0], Value::Null);
    }

    #[test]
    fn text_is_quoted() {
        let s = mixed_csv(&["v".into(), "error".into()], &[(vec![1.0], "a, \"b\"".into())]);
        assert!(s.ends_with("1.00000000e0,\"a, \"\"b\"\"\"\n"), "{s}");
    }
}
