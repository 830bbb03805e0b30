use serde_json::{Map, Value};

use liesym::kernel::Atom;
use liesym::prolong::VectorField;
use liesym::Error;

/// A finished report: JSON and text renderings plus the exit code.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub json: Value,
    pub text: String,
    pub code: u8,
}

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Math(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Math(_) => 1,
            Failure::Usage(_) => 2,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Math(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::Syntax { .. }
            | Error::UnknownIdentifier { .. }
            | Error::UnsupportedRadical(_)
            | Error::NotAnAtom(_)
            | Error::InvalidBinding(_)
            | Error::InvalidEquation(_)
            | Error::InvalidField(_)
            | Error::UnknownEquation(_)
            | Error::IrrationalEigenvalue(_)
            | Error::RepeatedRoot
            | Error::SingularParameters(_) => Failure::Usage(msg),
            Error::DivisionByZero
            | Error::JetOrderOverflow { .. }
            | Error::NotEvaluable(_)
            | Error::NonAutonomous(_)
            | Error::NotStabilized(_)
            | Error::NotReducible(_)
            | Error::NotClosed(..) => Failure::Math(msg),
        }
    }
}

/// Components keyed `xi_<var>` and `eta`.
pub fn field_json(f: &VectorField) -> Value {
    let mut m = Map::new();
    for (atom, c) in f.components() {
        let key = match atom {
            Atom::Var(v) => format!("xi_{}", v.letter()),
            _ => "eta".to_string(),
        };
        m.insert(key, Value::String(c.to_string()));
    }
    Value::Object(m)
}

pub fn indent(text: &str) -> String {
    text.lines().map(|l| format!("  {l}\n")).collect()
}
