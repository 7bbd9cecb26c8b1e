//! Command reports, rendered as text or JSON from the same data.

use std::fmt::Write as _;

use serde_json::{Map, Value};
use wmp_core::{Matrix, ToleranceConfig};

use crate::bundle::{matrix_to_json, number};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    Default,
    Bundle,
    Flag,
}

impl Source {
    fn name(self) -> &'static str {
        match self {
            Source::Default => "default",
            Source::Bundle => "bundle",
            Source::Flag => "flag",
        }
    }
}

/// Tolerances in effect and where each came from.
#[derive(Debug, Clone)]
pub struct Provenance {
    pub config: ToleranceConfig,
    pub rank_rtol: Source,
    pub inv_cond_max: Source,
    pub verify_atol: Source,
    pub verify_rtol: Source,
}

#[derive(Debug, Clone)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

#[derive(Debug, Clone)]
pub enum Cell {
    Num(f64),
    Int(usize),
    Bool(bool),
    Text(String),
    Missing,
}

#[derive(Debug, Clone)]
pub enum Item {
    Num(f64),
    Int(usize),
    Bool(bool),
    Text(String),
    Matrix(Matrix),
    Table(Table),
}

#[derive(Debug, Clone)]
pub struct Report {
    pub command: String,
    pub entries: Vec<(String, Item)>,
    /// Set when the command ran but its check failed; printed with the
    /// report and mapped to exit code 2.
    pub failure: Option<String>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report {
            command: command.to_string(),
            entries: Vec::new(),
            failure: None,
        }
    }

    pub fn num(&mut self, key: &str, v: f64) -> &mut Self {
        self.push(key, Item::Num(v))
    }

    pub fn int(&mut self, key: &str, v: usize) -> &mut Self {
        self.push(key, Item::Int(v))
    }

    pub fn flag(&mut self, key: &str, v: bool) -> &mut Self {
        self.push(key, Item::Bool(v))
    }

    pub fn text(&mut self, key: &str, v: impl Into<String>) -> &mut Self {
        self.push(key, Item::Text(v.into()))
    }

    pub fn matrix(&mut self, key: &str, m: &Matrix) -> &mut Self {
        self.push(key, Item::Matrix(m.clone()))
    }

    pub fn table(&mut self, key: &str, t: Table) -> &mut Self {
        self.push(key, Item::Table(t))
    }

    fn push(&mut self, key: &str, item: Item) -> &mut Self {
        self.entries.push((key.to_string(), item));
        self
    }

    pub fn fail(&mut self, message: impl Into<String>) {
        self.failure = Some(message.into());
    }

    /// Matrices in the report, in order, for `--out`.
    pub fn matrices(&self) -> impl Iterator<Item = (&str, &Matrix)> {
        self.entries.iter().filter_map(|(k, v)| match v {
            Item::Matrix(m) => Some((k.as_str(), m)),
            _ => None,
        })
    }

    pub fn to_text(&self, tol: &Provenance) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "== {} ==", self.command);
        for (key, item) in &self.entries {
            match item {
                Item::Num(v) => _ = writeln!(s, "{key}: {}", fmt_num(*v)),
                Item::Int(v) => _ = writeln!(s, "{key}: {v}"),
                Item::Bool(v) => _ = writeln!(s, "{key}: {v}"),
                Item::Text(v) => _ = writeln!(s, "{key}: {v}"),
                Item::Matrix(m) => {
                    let _ = writeln!(s, "{key} ({}x{}):", m.rows(), m.cols());
                    s.push_str(&matrix_text(m));
                }
                Item::Table(t) => {
                    let _ = writeln!(s, "{key}:");
                    s.push_str(&table_text(t));
                }
            }
        }
        let c = &tol.config;
        let rank = c.rank_rtol.map_or("max(m,n)*eps".to_string(), fmt_num);
        let _ = writeln!(
            s,
            "tolerances: rank_rtol={rank} ({}), inv_cond_max={} ({}), verify_atol={} ({}), verify_rtol={} ({})",
            tol.rank_rtol.name(),
            fmt_num(c.inv_cond_max),
            tol.inv_cond_max.name(),
            fmt_num(c.verify_atol),
            tol.verify_atol.name(),
            fmt_num(c.verify_rtol),
            tol.verify_rtol.name(),
        );
        if let Some(f) = &self.failure {
            let _ = writeln!(s, "FAILED: {f}");
        }
        s
    }

    pub fn to_json(&self, tol: &Provenance) -> Value {
        let results: Map<String, Value> = self
            .entries
            .iter()
            .map(|(k, item)| (k.clone(), item_json(item)))
            .collect();
        let entry = |v: Option<f64>, src: Source| {
            let mut m = Map::new();
            m.insert("value".into(), v.map_or(Value::Null, number));
            m.insert("source".into(), Value::from(src.name()));
            Value::Object(m)
        };
        let c = &tol.config;
        let mut tolerances = Map::new();
        tolerances.insert("rank_rtol".into(), entry(c.rank_rtol, tol.rank_rtol));
        tolerances.insert("inv_cond_max".into(), entry(Some(c.inv_cond_max), tol.inv_cond_max));
        tolerances.insert("verify_atol".into(), entry(Some(c.verify_atol), tol.verify_atol));
        tolerances.insert("verify_rtol".into(), entry(Some(c.verify_rtol), tol.verify_rtol));

        let mut out = Map::new();
        out.insert("command".into(), Value::from(self.command.clone()));
        out.insert("ok".into(), Value::Bool(self.failure.is_none()));
        if let Some(f) = &self.failure {
            out.insert("failure".into(), Value::from(f.clone()));
        }
        out.insert("results".into(), Value::Object(results));
        out.insert("tolerances".into(), Value::Object(tolerances));
        Value::Object(out)
    }
}

fn item_json(item: &Item) -> Value {
    match item {
        Item::Num(v) => number(*v),
        Item::Int(v) => Value::from(*v),
        Item::Bool(v) => Value::Bool(*v),
        Item::Text(v) => Value::from(v.clone()),
        Item::Matrix(m) => matrix_to_json(m),
        Item::Table(t) => {
            let mut obj = Map::new();
            obj.insert("columns".into(), Value::from(t.columns.clone()));
            let rows = t
                .rows
                .iter()
                .map(|r| Value::Array(r.iter().map(cell_json).collect()))
                .collect();
            obj.insert("rows".into(), Value::Array(rows));
            Value::Object(obj)
        }
    }
}

fn cell_json(c: &Cell) -> Value {
    match c {
        Cell::Num(v) => number(*v),
        Cell::Int(v) => Value::from(*v),
        Cell::Bool(v) => Value::Bool(*v),
        Cell::Text(v) => Value::from(v.clone()),
        Cell::Missing => Value::Null,
    }
}

fn fmt_num(v: f64) -> String {
    format!("{v:.6e}")
}

fn fmt_entry(re: f64, im: f64, complex: bool) -> String {
    // Zero out the sign of -0.0 so printed matrices compare cleanly.
    let re = if re == 0.0 { 0.0 } else { re };
    if !complex {
        return format!("{re:>21.13e}");
    }
    let sign = if im.is_sign_negative() { '-' } else { '+' };
    format!("{re:>21.13e}{sign}{:.13e}i", im.abs())
}

/// Matrix rows with 14 significant digits per entry.
pub fn matrix_text(m: &Matrix) -> String {
    let complex = !m.is_real();
    let mut s = String::new();
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            let z = m.get(i, j);
            s.push_str(&fmt_entry(z.re, z.im, complex));
        }
        s.push('\n');
    }
    s
}

fn table_text(t: &Table) -> String {
    let cells: Vec<Vec<String>> = t
        .rows
        .iter()
        .map(|r| {
            r.iter()
                .map(|c| match c {
                    Cell::Num(v) => format!("{v:.6e}"),
                    Cell::Int(v) => v.to_string(),
                    Cell::Bool(v) => v.to_string(),
                    Cell::Text(v) => v.clone(),
                    Cell::Missing => "-".into(),
                })
                .collect()
        })
        .collect();
    let widths: Vec<usize> = (0..t.columns.len())
        .map(|j| {
            cells
                .iter()
                .map(|r| r[j].len())
                .chain([t.columns[j].len()])
                .max()
                .unwrap_or(0)
        })
        .collect();
    let line = |vals: &[String]| {
        let parts: Vec<String> = vals.iter().zip(&widths).map(|(v, w)| format!("{v:>w$}")).collect();
        format!("  {}\n", parts.join("  "))
    };
    let mut s = line(&t.columns);
    for r in &cells {
        s.push_str(&line(r));
    }
    s
}
