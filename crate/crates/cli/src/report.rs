//! Versioned JSON reports with fixed float formatting.

use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use serde_json::{Map, Number, Value};

use crate::config::Tolerances;
use crate::error::CliResult;

pub const SCHEMA: &str = "sun-phase/1";

/// 17 significant digits in scientific notation, so equal inputs give
/// byte-equal output. Non-finite values become `null`.
pub fn num(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    let s = format!("{x:.16e}");
    Value::Number(s.parse::<Number>().expect("formatted float is valid JSON"))
}

/// Same formatting as [`num`], as text for CSV cells.
pub fn fmt(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "nan".into()
    }
}

pub fn nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| num(x)).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    /// `None` when nothing was evaluated.
    pub max_residual: Option<f64>,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    /// Largest of `residuals` against `tolerance`; NaN counts as failure.
    pub fn max_of(name: &str, residuals: impl IntoIterator<Item = f64>, tolerance: f64) -> Self {
        let mut max: Option<f64> = None;
        let mut nan = false;
        for r in residuals {
            if r.is_nan() {
                nan = true;
                continue;
            }
            max = Some(max.map_or(r, |m: f64| m.max(r)));
        }
        let pass = !nan && max.is_some_and(|m| m <= tolerance);
        Self {
            name: name.into(),
            max_residual: if nan { Some(f64::NAN) } else { max },
            tolerance,
            pass,
        }
    }

    pub fn single(name: &str, residual: f64, tolerance: f64) -> Self {
        Self::max_of(name, [residual], tolerance)
    }

    fn to_value(&self) -> Value {
        let mut m = Map::new();
        m.insert("name".into(), Value::String(self.name.clone()));
        m.insert(
            "max_residual".into(),
            self.max_residual.map_or(Value::Null, num),
        );
        m.insert("tolerance".into(), num(self.tolerance));
        m.insert("pass".into(), Value::Bool(self.pass));
        Value::Object(m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Pass => "pass",
            Self::Fail => "fail",
            Self::Inconclusive => "inconclusive",
        }
    }

    pub fn exit_code(self) -> ExitCode {
        ExitCode::from(match self {
            Self::Pass => 0,
            Self::Fail => 1,
            Self::Inconclusive => 3,
        })
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub command: String,
    pub seed: Option<u64>,
    pub config: Map<String, Value>,
    pub checks: Vec<Check>,
    pub diagnostics: Map<String, Value>,
    pub notes: Vec<String>,
    pub points: Option<Vec<Value>>,
    /// Set when the sweep could not reach a verdict.
    pub inconclusive: Option<String>,
}

impl Report {
    pub fn new(command: &str, seed: Option<u64>) -> Self {
        Self {
            command: command.into(),
            seed,
            config: Map::new(),
            checks: Vec::new(),
            diagnostics: Map::new(),
            notes: Vec::new(),
            points: None,
            inconclusive: None,
        }
    }

    pub fn config(&mut self, key: &str, value: Value) -> &mut Self {
        self.config.insert(key.into(), value);
        self
    }

    pub fn tolerances(&mut self, tol: &Tolerances) -> &mut Self {
        let m: Map<String, Value> = tol.iter().map(|(k, v)| (k.clone(), num(*v))).collect();
        self.config("tolerances", Value::Object(m))
    }

    pub fn diagnostic(&mut self, key: &str, value: Value) -> &mut Self {
        self.diagnostics.insert(key.into(), value);
        self
    }

    pub fn status(&self) -> Status {
        if self.inconclusive.is_some() {
            Status::Inconclusive
        } else if !self.checks.is_empty() && self.checks.iter().all(|c| c.pass) {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn to_value(&self) -> Value {
        let status = self.status();
        let mut m = Map::new();
        m.insert("schema".into(), Value::String(SCHEMA.into()));
        m.insert("command".into(), Value::String(self.command.clone()));
        m.insert(
            "version".into(),
            Value::String(env!("CARGO_PKG_VERSION").into()),
        );
        m.insert(
            "seed".into(),
            self.seed.map_or(Value::Null, |s| Value::Number(s.into())),
        );
        m.insert("config".into(), Value::Object(self.config.clone()));
        m.insert("status".into(), Value::String(status.as_str().into()));
        m.insert("pass".into(), Value::Bool(status == Status::Pass));
        if let Some(reason) = &self.inconclusive {
            m.insert("inconclusive_reason".into(), Value::String(reason.clone()));
        }
        m.insert(
            "checks".into(),
            Value::Array(self.checks.iter().map(Check::to_value).collect()),
        );
        m.insert(
            "diagnostics".into(),
            Value::Object(self.diagnostics.clone()),
        );
        m.insert(
            "notes".into(),
            Value::Array(self.notes.iter().cloned().map(Value::String).collect()),
        );
        if let Some(points) = &self.points {
            m.insert("points".into(), Value::Array(points.clone()));
        }
        Value::Object(m)
    }

    pub fn to_json(&self) -> CliResult<String> {
        let mut s = serde_json::to_string_pretty(&self.to_value())?;
        s.push('\n');
        Ok(s)
    }

    /// Write to `out`, or stdout when `None`.
    pub fn emit(&self, out: Option<&Path>) -> CliResult<()> {
        let text = self.to_json()?;
        match out {
            Some(path) => std::fs::write(path, text)?,
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout.write_all(text.as_bytes())?;
                stdout.flush()?;
            }
        }
        Ok(())
    }
}
