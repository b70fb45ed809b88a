//! Report assembly. Reports hold no timings or paths so that a fixed
//! configuration always serializes to the same bytes.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::Value;

#[derive(Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    Below,
    Above,
}

#[derive(Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub bound: Bound,
    pub tol: f64,
    pub pass: bool,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub seed: u64,
    pub config: BTreeMap<String, Value>,
    pub checks: Vec<Check>,
    pub data: BTreeMap<String, Value>,
    pub pass: bool,
}

/// One row of an energy or area table.
#[derive(Debug, Serialize)]
pub struct TableRow {
    #[serde(rename = "R")]
    pub r: f64,
    pub grid: usize,
    pub value: f64,
    pub refinement_ratio: f64,
}

impl Report {
    pub fn new(command: impl Into<String>, seed: u64) -> Self {
        Report { command: command.into(), seed, config: BTreeMap::new(), checks: Vec::new(), data: BTreeMap::new(), pass: true }
    }

    pub fn config(&mut self, key: &str, v: impl Serialize) {
        self.config.insert(key.into(), serde_json::to_value(v).expect("serializable"));
    }

    pub fn data(&mut self, key: &str, v: impl Serialize) {
        self.data.insert(key.into(), serde_json::to_value(v).expect("serializable"));
    }

    /// value < tol
    pub fn below(&mut self, name: &str, value: f64, tol: f64) {
        self.push(name, value, Bound::Below, tol, value < tol);
    }

    /// value > tol
    pub fn above(&mut self, name: &str, value: f64, tol: f64) {
        self.push(name, value, Bound::Above, tol, value > tol);
    }

    /// Boolean verdict recorded as 1 or 0 against the bound 0.5.
    pub fn holds(&mut self, name: &str, ok: bool) {
        self.push(name, if ok { 1.0 } else { 0.0 }, Bound::Above, 0.5, ok);
    }

    fn push(&mut self, name: &str, value: f64, bound: Bound, tol: f64, pass: bool) {
        self.pass &= pass;
        self.checks.push(Check { name: name.into(), value, bound, tol, pass });
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    pub fn summary(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let op = match c.bound {
                Bound::Below => "<",
                Bound::Above => ">",
            };
            out.push_str(&format!("{} {:<40} {:.3e} {op} {:.1e}\n", if c.pass { "ok  " } else { "FAIL" }, c.name, c.value, c.tol));
        }
        out.push_str(&format!("{}: {}\n", self.command, if self.pass { "pass" } else { "fail" }));
        out
    }

    pub fn write(&self, dir: &Path, tables: &[(&str, &[TableRow])]) -> Result<()> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        fs::write(dir.join("report.json"), self.to_json() + "\n")?;
        for (name, rows) in tables {
            let mut w = csv::Writer::from_path(dir.join(format!("{name}.csv")))?;
            for row in *rows {
                w.serialize(row)?;
            }
            w.flush()?;
        }
        Ok(())
    }
}
