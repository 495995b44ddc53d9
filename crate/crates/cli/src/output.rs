use std::fmt;
use std::io::Write;

use p2sheaf::Error;
use serde_json::Value;

#[derive(Debug)]
pub enum CliError {
    /// Exit code 2.
    Usage(String),
    /// Exit code 3.
    Unsupported(String),
    /// Exit code 1.
    Failure(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Failure(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Unsupported(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(s) | CliError::Unsupported(s) | CliError::Failure(s) => f.write_str(s),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let s = e.to_string();
        match e {
            Error::Parse(_) => CliError::Usage(s),
            Error::NonPositiveRank(_)
            | Error::NoRealIntersection(_)
            | Error::ControllingNotFound(_)
            | Error::NotGeneric(_)
            | Error::OutOfRange(_)
            | Error::UnsupportedRank(_)
            | Error::UnsupportedN(..)
            | Error::Infeasible(_) => CliError::Unsupported(s),
            Error::NotAnExceptionalPair(..)
            | Error::InternalInconsistency(_)
            | Error::NotPure
            | Error::NotGenericMatrix(_)
            | Error::NotAComplex
            | Error::RetryWithNewSeed(_) => CliError::Failure(s),
        }
    }
}

/// One output record: a JSON object and its text rendering.
pub struct Line {
    pub json: Value,
    pub text: String,
    pub ok: bool,
}

impl Line {
    pub fn new(json: Value, text: String) -> Self {
        Line { json, text, ok: true }
    }

    pub fn check(json: Value, text: String, ok: bool) -> Self {
        let mut json = json;
        if let Value::Object(m) = &mut json {
            m.insert("pass".into(), Value::Bool(ok));
        }
        Line { json, text, ok }
    }

    pub fn set_timing(&mut self, ms: f64) {
        let ms = (ms * 1000.0).round() / 1000.0;
        if let Value::Object(m) = &mut self.json {
            m.insert("elapsed_ms".into(), ms.into());
        }
        self.text.push_str(&format!("\n  elapsed: {ms} ms"));
    }
}

/// Prints every line and reports whether all of them passed.
pub fn emit(lines: &[Line], json: bool) -> bool {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    for l in lines {
        let s = if json { l.json.to_string() } else { l.text.clone() };
        // a closed pipe is not an error worth reporting
        if writeln!(out, "{s}").is_err() {
            break;
        }
    }
    lines.iter().all(|l| l.ok)
}
