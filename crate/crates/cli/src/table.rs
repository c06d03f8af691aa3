//! Fixed-schema tables with CSV and JSON emitters.
//!
//! CSV: one header row, comma separator, `.` decimal point, integers
//! unquoted, `\n` line endings. JSON: a single object
//! `{"config": {...}, "rows": [[...], ...]}` with the column names inside
//! the config block. Both emitters walk the same cell values, so the two
//! formats carry identical numeric content.

use std::fmt::Write as _;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    U(u64),
    I(i64),
    F(f64),
    S(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::U(v) => v.to_string(),
            Cell::I(v) => v.to_string(),
            Cell::F(v) => format_float(*v),
            Cell::S(s) => {
                debug_assert!(!s.contains(',') && !s.contains('"') && !s.contains('\n'));
                s.clone()
            }
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            Cell::U(v) => serde_json::Value::from(*v),
            Cell::I(v) => serde_json::Value::from(*v),
            Cell::F(v) => serde_json::Number::from_f64(*v)
                .map(serde_json::Value::Number)
                .unwrap_or(serde_json::Value::Null),
            Cell::S(s) => serde_json::Value::from(s.as_str()),
        }
    }
}

fn format_float(v: f64) -> String {
    if v == v.trunc() && v.abs() < 1e15 {
        // keep a decimal point so float columns stay recognizably float
        format!("{v:.1}")
    } else {
        format!("{v}")
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: Vec<S>) -> Table {
        Table {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row arity mismatch");
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.columns.join(","));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }

    pub fn to_json(&self, config: serde_json::Value) -> String {
        let mut config = config;
        if let serde_json::Value::Object(map) = &mut config {
            map.insert(
                "columns".to_string(),
                serde_json::Value::from(self.columns.clone()),
            );
        }
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|row| serde_json::Value::from(row.iter().map(Cell::json).collect::<Vec<_>>()))
            .collect();
        let doc = serde_json::json!({
            "config": config,
            "rows": rows,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("tables serialize");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_shape() {
        let mut t = Table::new(vec!["a", "b"]);
        t.push(vec![Cell::U(1), Cell::F(0.5)]);
        t.push(vec![Cell::I(-2), Cell::S("x".into())]);
        assert_eq!(t.to_csv(), "a,b\n1,0.5\n-2,x\n");
    }

    #[test]
    fn float_formatting_keeps_point() {
        assert_eq!(format_float(8000.0), "8000.0");
        assert_eq!(format_float(0.25), "0.25");
    }

    #[test]
    fn json_carries_columns_and_rows() {
        let mut t = Table::new(vec!["a"]);
        t.push(vec![Cell::U(7)]);
        let s = t.to_json(serde_json::json!({"subcommand": "demo"}));
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["config"]["columns"][0], "a");
        assert_eq!(v["rows"][0][0], 7);
    }
}
