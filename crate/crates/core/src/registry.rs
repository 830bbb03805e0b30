//! Named equations available to the command line and the tests.

use std::fmt;

use crate::error::{Error, Result};
use crate::jet::{make_heat, make_hpz, EvolutionPDE, StationaryEquation};
use crate::kernel::Expr;
use crate::reduction::{reduce_by_generator, reduce_time};

#[derive(Debug, Clone, PartialEq)]
pub enum Equation {
    Evolution(EvolutionPDE),
    Stationary(StationaryEquation),
}

impl Equation {
    pub fn as_evolution(&self) -> Option<&EvolutionPDE> {
        match self {
            Equation::Evolution(p) => Some(p),
            Equation::Stationary(_) => None,
        }
    }
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Equation::Evolution(p) => p.fmt(f),
            Equation::Stationary(s) => s.fmt(f),
        }
    }
}

/// Registry names with the generator that produces each reduced equation.
pub const NAMES: &[(&str, Option<&str>)] = &[
    ("hpz", None),
    ("heat", None),
    ("reduced-3.2", Some("delta3")),
    ("reduced-3.5", Some("delta4")),
    ("reduced-3.7", Some("delta5")),
    ("reduced-3.9", Some("delta6")),
    ("stationary-2.6", None),
];

pub fn names() -> Vec<&'static str> {
    NAMES.iter().map(|(n, _)| *n).collect()
}

pub fn lookup(name: &str) -> Result<Equation> {
    match name {
        "hpz" => Ok(Equation::Evolution(make_hpz())),
        "heat" => Ok(Equation::Evolution(make_heat())),
        "stationary-2.6" => Ok(Equation::Stationary(reduce_time(&make_hpz(), &Expr::param(crate::kernel::Param::R))?)),
        _ => {
            let generator = NAMES
                .iter()
                .find(|(n, _)| *n == name)
                .and_then(|(_, g)| *g)
                .ok_or_else(|| Error::UnknownEquation(format!("{name} (known: {})", names().join(", "))))?;
            let (reduced, _) = reduce_by_generator(&make_hpz(), generator, None)?;
            Ok(Equation::Evolution(reduced.pde))
        }
    }
}
