//! Tabular results with a provenance header, written as CSV or JSON.

use std::io::Write;
use std::str::FromStr;

use serde::Serialize;
use serde_json::{Map, Value};

use super::config::ExperimentConfig;
use crate::error::{Error, Result};

/// Bumped whenever a column is added, removed, renamed or reordered.
pub const SCHEMA_VERSION: u32 = 1;

pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Bool(bool),
    Empty,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Empty, Into::into)
    }
}

impl Cell {
    /// CSV text. Floats use the shortest representation that round-trips.
    fn text(&self) -> String {
        match self {
            Cell::Num(v) => format!("{v:?}"),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(v) => serde_json::Number::from_f64(*v).map_or(Value::Null, Value::Number),
            Cell::Int(v) => Value::from(*v),
            Cell::Text(s) => Value::from(s.as_str()),
            Cell::Bool(b) => Value::from(*b),
            Cell::Empty => Value::Null,
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match *self {
            Cell::Num(v) => Some(v),
            Cell::Int(v) => Some(v as f64),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    columns: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table { columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width does not match the header");
        self.rows.push(row);
    }

    pub fn columns(&self) -> &[&'static str] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    pub fn column(&self, name: &str) -> Option<Vec<&Cell>> {
        let i = self.columns.iter().position(|c| *c == name)?;
        Some(self.rows.iter().map(|r| &r[i]).collect())
    }

    /// Numeric column; non-numeric cells become NaN.
    pub fn numbers(&self, name: &str) -> Option<Vec<f64>> {
        Some(self.column(name)?.into_iter().map(|c| c.as_f64().unwrap_or(f64::NAN)).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub schema_version: u32,
    pub experiment: String,
    pub engine_version: &'static str,
    pub config_hash: String,
    pub dt: Option<f64>,
    #[serde(rename = "d_F")]
    pub d_f: Option<usize>,
    pub quadrature_order: Option<usize>,
    pub warnings: Vec<String>,
}

impl Provenance {
    pub fn new(cfg: &ExperimentConfig) -> Self {
        Provenance {
            schema_version: SCHEMA_VERSION,
            experiment: cfg.experiment.name().to_string(),
            engine_version: ENGINE_VERSION,
            config_hash: cfg.hash(),
            dt: None,
            d_f: None,
            quadrature_order: None,
            warnings: Vec::new(),
        }
    }
}

/// Output of one experiment run.
#[derive(Debug, Clone)]
pub struct Report {
    pub config: ExperimentConfig,
    pub provenance: Provenance,
    pub table: Table,
    /// Set when a gating check failed; the table is still complete.
    pub failure: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::Config(format!("unknown format `{s}` (csv or json)"))),
        }
    }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(|| "n/a".to_string(), |x| x.to_string())
}

impl Report {
    pub fn write<W: Write>(&self, format: Format, out: W) -> Result<()> {
        match format {
            Format::Csv => self.write_csv(out),
            Format::Json => self.write_json(out),
        }
    }

    pub fn to_bytes(&self, format: Format) -> Result<Vec<u8>> {
        let mut buf = Vec::new();
        self.write(format, &mut buf)?;
        Ok(buf)
    }

    fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let p = &self.provenance;
        writeln!(out, "# schema_version: {}", p.schema_version)?;
        writeln!(out, "# experiment: {}", p.experiment)?;
        writeln!(out, "# engine_version: phasekick {}", p.engine_version)?;
        writeln!(out, "# config_hash: sha256:{}", p.config_hash)?;
        writeln!(out, "# dt: {}", opt(p.dt.map(|v| format!("{v:?}"))))?;
        writeln!(out, "# d_F: {}", opt(p.d_f))?;
        writeln!(out, "# quadrature_order: {}", opt(p.quadrature_order))?;
        for (k, v) in self.config.params() {
            writeln!(out, "# config: {k} = {v:?}")?;
        }
        for w in &p.warnings {
            writeln!(out, "# warning: {w}")?;
        }
        let mut wtr = csv::Writer::from_writer(out);
        let to_io = |e: csv::Error| Error::Io(std::io::Error::other(e));
        wtr.write_record(self.table.columns()).map_err(to_io)?;
        for row in self.table.rows() {
            wtr.write_record(row.iter().map(Cell::text)).map_err(to_io)?;
        }
        wtr.flush()?;
        Ok(())
    }

    fn write_json<W: Write>(&self, mut out: W) -> Result<()> {
        let records: Vec<Value> = self
            .table
            .rows()
            .iter()
            .map(|row| {
                let obj: Map<String, Value> =
                    self.table.columns().iter().zip(row).map(|(k, c)| (k.to_string(), c.json())).collect();
                Value::Object(obj)
            })
            .collect();
        let mut config = Map::new();
        config.insert("experiment".into(), Value::from(self.config.experiment.name()));
        for (k, v) in self.config.params() {
            config.insert(k.clone(), serde_json::to_value(v).map_err(|e| Error::Invariant(e.to_string()))?);
        }
        let mut doc = Map::new();
        doc.insert("config".into(), Value::Object(config));
        doc.insert("provenance".into(), serde_json::to_value(&self.provenance).map_err(|e| Error::Invariant(e.to_string()))?);
        doc.insert("records".into(), Value::Array(records));
        serde_json::to_writer_pretty(&mut out, &Value::Object(doc)).map_err(|e| Error::Io(e.into()))?;
        writeln!(out)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::config::Experiment;

    fn report() -> Report {
        let cfg = ExperimentConfig::defaults(Experiment::Convergence);
        let mut table = Table::new(&["name", "x", "n", "ok", "missing"]);
        table.push(vec!["a,b".into(), 0.1.into(), 3usize.into(), true.into(), Cell::Empty]);
        table.push(vec!["c".into(), 1e-7.into(), 4usize.into(), false.into(), Some(2.5).into()]);
        let mut provenance = Provenance::new(&cfg);
        provenance.dt = Some(1e-3);
        Report { config: cfg, provenance, table, failure: None }
    }

    #[test]
    fn csv_layout() {
        let text = String::from_utf8(report().to_bytes(Format::Csv).unwrap()).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# schema_version: 1");
        assert!(lines.iter().any(|l| *l == "# dt: 0.001"));
        assert!(lines.iter().any(|l| *l == "# d_F: n/a"));
        let body: Vec<&str> = lines.iter().copied().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(body, vec!["name,x,n,ok,missing", "\"a,b\",0.1,3,true,", "c,1e-7,4,false,2.5"]);
    }

    #[test]
    fn json_layout() {
        let v: Value = serde_json::from_slice(&report().to_bytes(Format::Json).unwrap()).unwrap();
        assert_eq!(v["config"]["experiment"], "convergence");
        assert_eq!(v["provenance"]["schema_version"], 1);
        assert_eq!(v["records"][1]["x"], 1e-7);
        assert!(v["records"][0]["missing"].is_null());
        let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
        assert_eq!(keys, vec!["config", "provenance", "records"]);
    }

    #[test]
    fn shortest_round_trip() {
        for x in [0.1, 1.0 / 3.0, 2.5e-300, 123456789.125, -0.0] {
            let s = Cell::Num(x).text();
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
    }
}
