//! JSON problem bundles.
//!
//! A bundle is one JSON object. Every key except the reserved ones names a
//! matrix role and maps to `{"rows": r, "cols": c, "re": [...], "im": [...]}`
//! with entries in row-major order and `im` optional. Reserved keys:
//!
//! - `tolerances`: any of `rank_rtol`, `inv_cond_max`, `verify_atol`, `verify_rtol`
//! - `schedule`: an explicit list of parameters, or `"a:b"` for one point per decade
//! - `terms`: perturbation terms `{"n": k, "A": .., "M": .., "N": ..}`; missing
//!   roles fall back to the base problem

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use serde_json::{Map, Number, Value};
use wmp_core::{schedule, Matrix};

use crate::error::{CliError, Result};

pub const RESERVED: [&str; 3] = ["tolerances", "schedule", "terms"];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ToleranceOverrides {
    pub rank_rtol: Option<f64>,
    pub inv_cond_max: Option<f64>,
    pub verify_atol: Option<f64>,
    pub verify_rtol: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct Term {
    pub n: usize,
    pub roles: BTreeMap<String, Matrix>,
}

#[derive(Debug, Clone, Default)]
pub struct Bundle {
    pub matrices: BTreeMap<String, Matrix>,
    pub tolerances: ToleranceOverrides,
    pub schedule: Option<Vec<f64>>,
    pub terms: Option<Vec<Term>>,
}

impl Bundle {
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text).map_err(|message| CliError::parse(path, message))
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let value: Value = serde_json::from_str(text).map_err(|e| e.to_string())?;
        let Value::Object(map) = value else {
            return Err("bundle must be a JSON object".into());
        };
        let mut bundle = Bundle::default();
        for (key, v) in &map {
            match key.as_str() {
                "tolerances" => bundle.tolerances = tolerances_from_json(v)?,
                "schedule" => bundle.schedule = Some(schedule_from_json(v)?),
                "terms" => bundle.terms = Some(terms_from_json(v)?),
                role => {
                    let m = matrix_from_json(v).map_err(|e| format!("role `{role}`: {e}"))?;
                    bundle.matrices.insert(role.to_string(), m);
                }
            }
        }
        Ok(bundle)
    }
}

/// Parses `a:b` into one point per decade between the endpoints.
pub fn parse_schedule(arg: &str) -> Result<Vec<f64>, String> {
    let (a, b) = arg
        .split_once(':')
        .ok_or_else(|| format!("schedule must look like `a:b`, got `{arg}`"))?;
    let parse = |s: &str| s.trim().parse::<f64>().map_err(|_| format!("bad schedule endpoint `{s}`"));
    schedule::by_decades(parse(a)?, parse(b)?).map_err(|e| e.to_string())
}

/// JSON number with 17 significant digits; non-finite values become `null`.
pub fn number(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    Value::Number(Number::from_str(&format!("{x:.16e}")).expect("formatted float is valid JSON"))
}

pub fn matrix_to_json(m: &Matrix) -> Value {
    let entries = m.to_row_major();
    let mut obj = Map::new();
    obj.insert("rows".into(), Value::from(m.rows()));
    obj.insert("cols".into(), Value::from(m.cols()));
    obj.insert("re".into(), Value::Array(entries.iter().map(|z| number(z.re)).collect()));
    if !m.is_real() {
        obj.insert("im".into(), Value::Array(entries.iter().map(|z| number(z.im)).collect()));
    }
    Value::Object(obj)
}

/// Serializes named matrices as a bundle.
pub fn write_matrices<'a>(matrices: impl IntoIterator<Item = (&'a str, &'a Matrix)>) -> String {
    let obj: Map<String, Value> = matrices
        .into_iter()
        .map(|(k, m)| (k.to_string(), matrix_to_json(m)))
        .collect();
    let mut s = serde_json::to_string_pretty(&Value::Object(obj)).expect("JSON values serialize");
    s.push('\n');
    s
}

fn as_f64(v: &Value, what: &str) -> Result<f64, String> {
    v.as_f64().ok_or_else(|| format!("{what} must be a number, got {v}"))
}

fn as_usize(v: Option<&Value>, what: &str) -> Result<usize, String> {
    v.and_then(Value::as_u64)
        .map(|x| x as usize)
        .ok_or_else(|| format!("`{what}` must be a non-negative integer"))
}

fn numbers(v: Option<&Value>, what: &str) -> Result<Vec<f64>, String> {
    let Some(Value::Array(items)) = v else {
        return Err(format!("`{what}` must be an array of numbers"));
    };
    items.iter().map(|x| as_f64(x, what)).collect()
}

pub fn matrix_from_json(v: &Value) -> Result<Matrix, String> {
    let obj = v.as_object().ok_or("matrix must be an object")?;
    if let Some(extra) = obj.keys().find(|k| !["rows", "cols", "re", "im"].contains(&k.as_str())) {
        return Err(format!("unexpected matrix key `{extra}`"));
    }
    let rows = as_usize(obj.get("rows"), "rows")?;
    let cols = as_usize(obj.get("cols"), "cols")?;
    let re = numbers(obj.get("re"), "re")?;
    let im = match obj.get("im") {
        Some(_) => Some(numbers(obj.get("im"), "im")?),
        None => None,
    };
    Matrix::from_parts(rows, cols, &re, im.as_deref()).map_err(|e| e.to_string())
}

fn tolerances_from_json(v: &Value) -> Result<ToleranceOverrides, String> {
    let obj = v.as_object().ok_or("`tolerances` must be an object")?;
    let mut t = ToleranceOverrides::default();
    for (k, x) in obj {
        let slot = match k.as_str() {
            "rank_rtol" => &mut t.rank_rtol,
            "inv_cond_max" => &mut t.inv_cond_max,
            "verify_atol" => &mut t.verify_atol,
            "verify_rtol" => &mut t.verify_rtol,
            other => return Err(format!("unknown tolerance `{other}`")),
        };
        *slot = Some(as_f64(x, k)?);
    }
    Ok(t)
}

fn schedule_from_json(v: &Value) -> Result<Vec<f64>, String> {
    match v {
        Value::String(s) => parse_schedule(s),
        Value::Array(_) => numbers(Some(v), "schedule"),
        _ => Err("`schedule` must be an array of numbers or an `a:b` string".into()),
    }
}

fn terms_from_json(v: &Value) -> Result<Vec<Term>, String> {
    let items = v.as_array().ok_or("`terms` must be an array")?;
    items
        .iter()
        .enumerate()
        .map(|(i, item)| {
            let obj = item.as_object().ok_or_else(|| format!("term {i} must be an object"))?;
            let n = as_usize(obj.get("n"), "n").map_err(|e| format!("term {i}: {e}"))?;
            let roles = obj
                .iter()
                .filter(|(k, _)| k.as_str() != "n")
                .map(|(k, m)| {
                    let m = matrix_from_json(m).map_err(|e| format!("term {i}, role `{k}`: {e}"))?;
                    Ok((k.clone(), m))
                })
                .collect::<Result<_, String>>()?;
            Ok(Term { n, roles })
        })
        .collect()
}
