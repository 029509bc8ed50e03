//! Report rendering. Reports are JSON values; maps keep sorted keys, so both
//! formats are deterministic.

use crate::rational::{self, Q};
use crate::surface::{ChowModel, DivisorClass};
use serde_json::{Map, Value};
use std::fmt::Write;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Table,
    Machine,
}

pub fn q(v: &Q) -> Value {
    Value::String(rational::render(v))
}

pub fn qs(vs: &[Q]) -> Value {
    Value::Array(vs.iter().map(q).collect())
}

/// A class as a map from basis name to coefficient; zero entries included.
pub fn class(c: &DivisorClass, chow: &ChowModel) -> Value {
    let m: Map<String, Value> = chow
        .names()
        .iter()
        .zip(c.coeffs())
        .map(|(n, v)| (n.clone(), q(v)))
        .collect();
    Value::Object(m)
}

pub fn status(ok: bool) -> Value {
    Value::String(if ok { "PASS" } else { "FAIL" }.into())
}

pub fn render(report: &Value, format: Format) -> String {
    match format {
        Format::Machine => {
            let mut s = serde_json::to_string_pretty(report).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Table => {
            // the input echo is only useful in machine form
            let mut v = report.clone();
            if let Value::Object(m) = &mut v {
                m.remove("scenario");
            }
            let mut s = String::new();
            table(&v, 0, &mut s);
            s
        }
    }
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("-".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        Value::Object(m) if m.is_empty() => Some("{}".into()),
        Value::Array(a) if a.iter().all(|x| !x.is_object() && !x.is_array()) => Some(format!(
            "[{}]",
            a.iter().filter_map(scalar).collect::<Vec<_>>().join(", ")
        )),
        _ => None,
    }
}

fn table(v: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(m) => {
            let width = m
                .iter()
                .filter(|(_, x)| scalar(x).is_some())
                .map(|(k, _)| k.len())
                .max()
                .unwrap_or(0);
            for (k, x) in m {
                match scalar(x) {
                    Some(s) => writeln!(out, "{pad}{k:<width$}  {s}").unwrap(),
                    None => {
                        writeln!(out, "{pad}{k}:").unwrap();
                        table(x, indent + 1, out);
                    }
                }
            }
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                match scalar(x) {
                    Some(s) => writeln!(out, "{pad}- {s}").unwrap(),
                    None => {
                        writeln!(out, "{pad}[{i}]").unwrap();
                        table(x, indent + 1, out);
                    }
                }
            }
        }
        other => writeln!(out, "{pad}{}", scalar(other).unwrap_or_default()).unwrap(),
    }
}
