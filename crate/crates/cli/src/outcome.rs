//! Exit codes, failures and the text/JSON pair every command produces.

use std::fs;
use std::path::Path;

use crnf::curve::CurveJet;
use crnf::format::{self, GermFile};
use crnf::{Error, Scalar, WSeries};
use serde_json::{json, Value};

pub const OK: u8 = 0;
pub const INEQUIVALENT: u8 = 1;
pub const PARSE: u8 = 2;
pub const TYPE_UNDETERMINED: u8 = 3;
pub const PRECONDITION: u8 = 4;
pub const UNDECIDED: u8 = 5;
pub const WRONG_CASE: u8 = 6;

/// What a command prints: human-readable text and the matching record.
pub struct Outcome {
    pub code: u8,
    pub text: String,
    pub json: Value,
}

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn new(code: u8, message: impl Into<String>) -> Self {
        Failure { code, message: message.into() }
    }

    fn in_file(path: &Path, e: Error) -> Self {
        let mut f = Failure::from(e);
        f.message = format!("{}: {}", path.display(), f.message);
        f
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Parse(_) => PARSE,
            Error::InfiniteTypeToWeight(_) => TYPE_UNDETERMINED,
            Error::NotT2(_) | Error::ClassMismatch(_) => WRONG_CASE,
            _ => PRECONDITION,
        };
        Failure { code, message: e.to_string() }
    }
}

pub type CmdResult = Result<Outcome, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::new(PARSE, format!("{}: {e}", path.display())))
}

pub fn write(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| Failure::new(PRECONDITION, format!("{}: {e}", path.display())))
}

pub fn read_germ(path: &Path) -> Result<GermFile, Failure> {
    format::parse_germ(&read(path)?).map_err(|e| Failure::in_file(path, e))
}

pub fn read_curve(path: &Path) -> Result<CurveJet, Failure> {
    format::parse_curve(&read(path)?).map_err(|e| Failure::in_file(path, e))
}

/// Parses a command-line rational (`p/q` or an integer).
pub fn rational_arg(name: &str, s: &str) -> Result<crnf::Rational, Failure> {
    crnf::scalar::parse_rational(s.trim()).map_err(|e| Failure::new(PARSE, format!("--{name}: {e}")))
}

/// Parses `a/b,c/d` as `a/b + i c/d`.
pub fn scalar_arg(name: &str, s: &str) -> Result<Scalar, Failure> {
    let (re, im) = s.split_once(',').ok_or_else(|| Failure::new(PARSE, format!("--{name}: expected `re,im`, found `{s}`")))?;
    Ok(Scalar::new(rational_arg(name, re)?, rational_arg(name, im)?))
}

/// Terms of a series as records with exact rational strings.
pub fn terms_json(s: &WSeries) -> Value {
    Value::Array(
        s.terms()
            .iter()
            .map(|(i, c)| json!({ "a": i.a, "b": i.b, "m": i.m, "re": c.re.to_string(), "im": c.im.to_string() }))
            .collect(),
    )
}

pub fn scalar_json(c: &Scalar) -> Value {
    json!({ "re": c.re.to_string(), "im": c.im.to_string() })
}
