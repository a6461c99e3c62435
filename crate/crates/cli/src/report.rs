//! Flat reports written as `key=value` lines or a one-line JSON object.
//! Floats carry 17 significant digits so they round-trip exactly.

use std::str::FromStr;

use serde_json::{Map, Number, Value};

#[derive(Debug, Clone, PartialEq)]
pub enum Field {
    Float(f64),
    Int(u64),
    Bool(bool),
    Text(String),
}

impl From<f64> for Field {
    fn from(v: f64) -> Self {
        Field::Float(v)
    }
}

impl From<usize> for Field {
    fn from(v: usize) -> Self {
        Field::Int(v as u64)
    }
}

impl From<u64> for Field {
    fn from(v: u64) -> Self {
        Field::Int(v)
    }
}

impl From<bool> for Field {
    fn from(v: bool) -> Self {
        Field::Bool(v)
    }
}

impl From<&str> for Field {
    fn from(v: &str) -> Self {
        Field::Text(v.to_string())
    }
}

impl From<String> for Field {
    fn from(v: String) -> Self {
        Field::Text(v)
    }
}

pub fn format_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

#[derive(Debug, Default, Clone)]
pub struct Report {
    entries: Vec<(String, Field)>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, key: &str, value: impl Into<Field>) -> &mut Self {
        self.entries.push((key.to_string(), value.into()));
        self
    }

    /// `None` is written as the marker `n/a`.
    pub fn push_opt(&mut self, key: &str, value: Option<impl Into<Field>>) -> &mut Self {
        match value {
            Some(v) => self.push(key, v),
            None => self.push(key, "n/a"),
        }
    }

    pub fn render(&self, json: bool) -> String {
        if json {
            self.render_json()
        } else {
            self.render_lines()
        }
    }

    fn render_lines(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            let text = match v {
                Field::Float(f) => format_float(*f),
                Field::Int(i) => i.to_string(),
                Field::Bool(b) => b.to_string(),
                Field::Text(s) => s.clone(),
            };
            out.push_str(k);
            out.push('=');
            out.push_str(&text);
            out.push('\n');
        }
        out
    }

    fn render_json(&self) -> String {
        let mut map = Map::new();
        for (k, v) in &self.entries {
            let value = match v {
                Field::Float(f) if f.is_finite() => {
                    Value::Number(Number::from_str(&format_float(*f)).expect("valid JSON number"))
                }
                Field::Float(_) => Value::Null,
                Field::Int(i) => Value::Number((*i).into()),
                Field::Bool(b) => Value::Bool(*b),
                Field::Text(s) => Value::String(s.clone()),
            };
            map.insert(k.clone(), value);
        }
        let mut s = Value::Object(map).to_string();
        s.push('\n');
        s
    }
}
