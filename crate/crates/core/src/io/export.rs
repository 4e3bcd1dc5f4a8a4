use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Map, Value};

use super::config::{OutputFormat, RunConfig};
use crate::dynamics::TimeSeries;
use crate::error::Result;
use crate::lattice::BoundStateRecord;
use crate::bic_subspace::PStateEntry;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format_float(*v),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => json!(v),
            Cell::Float(v) if v.is_finite() => json!(v),
            Cell::Float(v) => json!(v.to_string()),
            Cell::Text(s) => json!(s),
        }
    }
}

/// 17 significant digits, enough to round-trip any f64.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// Named columns plus rows, written as CSV or JSON.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<String>) -> Self {
        Table { columns, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn csv_body(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    fn json_rows(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    let obj: Map<String, Value> = self
                        .columns
                        .iter()
                        .zip(row)
                        .map(|(c, v)| (c.clone(), v.json()))
                        .collect();
                    Value::Object(obj)
                })
                .collect(),
        )
    }
}

/// Version and fully resolved configuration carried by every output file.
pub fn header(config: &RunConfig) -> Result<Value> {
    Ok(json!({
        "artifact": "giantbic",
        "version": VERSION,
        "config": serde_json::to_value(config)?,
    }))
}

fn csv_header(config: &RunConfig) -> Result<String> {
    Ok(format!(
        "# giantbic {VERSION}\n# config: {}\n",
        serde_json::to_string(config)?
    ))
}

/// Write `table` into `dir` as `<stem>.csv` or `<stem>.json`.
pub fn write_table(dir: &Path, stem: &str, table: &Table, config: &RunConfig) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    match config.format {
        OutputFormat::Csv => {
            let path = dir.join(format!("{stem}.csv"));
            let mut f = fs::File::create(&path)?;
            f.write_all(csv_header(config)?.as_bytes())?;
            f.write_all(table.csv_body().as_bytes())?;
            Ok(path)
        }
        OutputFormat::Json => {
            let path = dir.join(format!("{stem}.json"));
            let doc = json!({ "header": header(config)?, "columns": table.columns, "data": table.json_rows() });
            write_json_value(&path, &doc)?;
            Ok(path)
        }
    }
}

/// Write a structured report as `<stem>.json` with the standard header.
pub fn write_report<T: Serialize>(dir: &Path, stem: &str, report: &T, config: &RunConfig) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(format!("{stem}.json"));
    let doc = json!({ "header": header(config)?, "data": serde_json::to_value(report)? });
    write_json_value(&path, &doc)?;
    Ok(path)
}

fn write_json_value(path: &Path, doc: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(doc)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

pub fn spectrum_table(records: &[BoundStateRecord]) -> Table {
    let mut t = Table::new(["index", "energy", "emitter_prob", "kind"].map(String::from).to_vec());
    for r in records {
        t.push(vec![
            Cell::Int(r.index as i64),
            Cell::Float(r.energy),
            Cell::Float(r.emitter_probability),
            Cell::Text(r.kind.as_str().into()),
        ]);
    }
    t
}

pub fn timeseries_table(ts: &TimeSeries) -> Table {
    let mut columns: Vec<String> = ["t", "prob_atom", "leakage"].map(String::from).to_vec();
    columns.extend(ts.site_indices.iter().map(|n| format!("prob_site_{n}")));
    let mut t = Table::new(columns);
    for (i, (&time, &p)) in ts.times.iter().zip(&ts.prob_atom).enumerate() {
        let leak = ts.leakage.as_ref().map_or(0.0, |l| l[i]);
        let mut row = vec![Cell::Float(time), Cell::Float(p), Cell::Float(leak)];
        if let Some(sites) = &ts.prob_sites {
            row.extend(sites[i].iter().map(|&v| Cell::Float(v)));
        }
        t.push(row);
    }
    t
}

pub fn pstate_table(entries: &[PStateEntry]) -> Table {
    let mut t = Table::new(["site", "re", "im", "amplitude", "phase"].map(String::from).to_vec());
    for e in entries {
        t.push(vec![
            Cell::Int(e.site as i64),
            Cell::Float(e.re),
            Cell::Float(e.im),
            Cell::Float(e.amplitude),
            Cell::Float(e.phase),
        ]);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_round_trip() {
        for v in [0.1, 1.0 / 3.0, -2.0021825183e-7, f64::MAX, f64::MIN_POSITIVE] {
            assert_eq!(format_float(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn csv_and_json_agree() {
        let dir = tempfile::tempdir().unwrap();
        let mut t = Table::new(vec!["a".into(), "b".into()]);
        t.push(vec![Cell::Int(1), Cell::Float(0.5)]);
        let mut cfg = RunConfig::default();
        let csv = write_table(dir.path(), "x", &t, &cfg).unwrap();
        let text = fs::read_to_string(csv).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with("# giantbic"));
        assert!(lines[1].starts_with("# config: {"));
        assert_eq!(lines[2], "a,b");
        assert_eq!(lines[3], "1,5.0000000000000000e-1");
        cfg.format = OutputFormat::Json;
        let js = write_table(dir.path(), "x", &t, &cfg).unwrap();
        let v: Value = serde_json::from_str(&fs::read_to_string(js).unwrap()).unwrap();
        assert_eq!(v["data"][0]["b"], json!(0.5));
        assert_eq!(v["header"]["config"]["format"], json!("json"));
    }

    #[test]
    fn unwritable_destination() {
        let dir = tempfile::tempdir().unwrap();
        let blocker = dir.path().join("file");
        fs::write(&blocker, "").unwrap();
        let t = Table::new(vec!["a".into()]);
        let err = write_table(&blocker.join("sub"), "x", &t, &RunConfig::default()).unwrap_err();
        assert!(matches!(err, crate::Error::Io(_)));
    }
}
