//! Exact parameter bindings.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::{Signed, Zero};
use serde::Serialize;

use super::atom::{Atom, Param};
use super::expr::{evaluate, ExactValue, Expr};
use super::poly::Q;
use crate::error::{Error, Result};

/// Rational values for some of R, S, V, W, with `omega` derived from them
/// when `R^2 - 4S` is a rational square.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ParameterBinding {
    params: BTreeMap<Param, Q>,
    omega: Option<Q>,
}

fn rational_sqrt(v: &Q) -> Option<Q> {
    if v.is_negative() {
        return None;
    }
    let (n, d) = (v.numer(), v.denom());
    let (rn, rd) = (n.sqrt(), d.sqrt());
    if &(&rn * &rn) == n && &(&rd * &rd) == d {
        Some(Q::new(rn, rd))
    } else {
        None
    }
}

impl ParameterBinding {
    /// Builds a binding from parameter values. If both R and S are bound,
    /// `R^2 - 4S` must be nonnegative; `omega` is its exact square root when
    /// that is rational.
    pub fn new(values: impl IntoIterator<Item = (Param, Q)>) -> Result<Self> {
        let params: BTreeMap<Param, Q> = values.into_iter().collect();
        let mut b = ParameterBinding { params, omega: None };
        if let Some(d) = b.discriminant() {
            if d.is_negative() {
                return Err(Error::InvalidBinding(format!(
                    "R^2 - 4*S = {d} is negative"
                )));
            }
            b.omega = rational_sqrt(&d);
        }
        Ok(b)
    }

    pub fn full(r: i64, s: i64, v: i64, w: i64) -> Result<Self> {
        ParameterBinding::new([
            (Param::R, Q::from_integer(r.into())),
            (Param::S, Q::from_integer(s.into())),
            (Param::V, Q::from_integer(v.into())),
            (Param::W, Q::from_integer(w.into())),
        ])
    }

    pub fn get(&self, p: Param) -> Option<&Q> {
        self.params.get(&p)
    }

    pub fn omega(&self) -> Option<&Q> {
        self.omega.as_ref()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    pub fn is_complete(&self) -> bool {
        Param::ALL.iter().all(|p| self.params.contains_key(p))
    }

    pub fn discriminant(&self) -> Option<Q> {
        let r = self.params.get(&Param::R)?;
        let s = self.params.get(&Param::S)?;
        Some(r * r - Q::from_integer(4.into()) * s)
    }

    /// Requirements for discovery: every parameter bound and `omega` rational.
    pub fn require_discovery(&self) -> Result<()> {
        if !self.is_complete() {
            return Err(Error::InvalidBinding(
                "discovery needs values for all of R, S, V, W".to_string(),
            ));
        }
        if self.omega.is_none() {
            return Err(Error::InvalidBinding(format!(
                "R^2 - 4*S = {} is not a rational square; choose a perfect-square discriminant",
                self.discriminant().expect("complete binding")
            )));
        }
        Ok(())
    }

    /// Requirement for reductions: `R*V + W != 0` when it can be evaluated.
    pub fn require_nonsingular(&self) -> Result<()> {
        if let (Some(r), Some(v), Some(w)) = (
            self.params.get(&Param::R),
            self.params.get(&Param::V),
            self.params.get(&Param::W),
        ) {
            if (r * v + w).is_zero() {
                return Err(Error::SingularParameters("R*V + W = 0".to_string()));
            }
        }
        Ok(())
    }

    /// Substitutes the bound values; `omega` is replaced first so no
    /// surd rewrite can reintroduce R or S afterwards.
    pub fn apply(&self, e: &Expr) -> Result<Expr> {
        let mut pairs = Vec::new();
        if let Some(w) = &self.omega {
            pairs.push((Atom::Omega, Expr::Num(w.clone())));
        } else if (self.params.contains_key(&Param::R) || self.params.contains_key(&Param::S))
            && e.mentions(&Atom::Omega)
        {
            return Err(Error::InvalidBinding(
                "expression contains omega but R^2 - 4*S is not a rational square".to_string(),
            ));
        }
        for (p, v) in &self.params {
            pairs.push((Atom::Param(*p), Expr::Num(v.clone())));
        }
        e.substitute_all(&pairs)
    }

    /// The atom map used by exact evaluation.
    pub fn atom_map(&self) -> BTreeMap<Atom, Q> {
        let mut m: BTreeMap<Atom, Q> = self
            .params
            .iter()
            .map(|(p, v)| (Atom::Param(*p), v.clone()))
            .collect();
        if let Some(w) = &self.omega {
            m.insert(Atom::Omega, w.clone());
        }
        m
    }

    /// Exact value of `e` under this binding and extra atom values.
    pub fn evaluate(&self, e: &Expr, extra: &BTreeMap<Atom, Q>) -> Result<ExactValue> {
        let mut m = self.atom_map();
        m.extend(extra.iter().map(|(a, v)| (a.clone(), v.clone())));
        evaluate(e, &m)
    }
}

impl FromStr for ParameterBinding {
    type Err = Error;

    /// Parses `R=5,S=4,V=1,W=1`; values may be fractions like `-3/2`.
    /// An `omega=` entry is accepted only if it equals the derived root.
    fn from_str(s: &str) -> Result<Self> {
        let mut values = Vec::new();
        let mut omega = None;
        for item in s.split(',').map(str::trim).filter(|i| !i.is_empty()) {
            let (name, value) = item
                .split_once('=')
                .ok_or_else(|| Error::InvalidBinding(format!("expected name=value, got `{item}`")))?;
            let value: Q = value
                .trim()
                .parse()
                .map_err(|_| Error::InvalidBinding(format!("`{}` is not a rational", value.trim())))?;
            match name.trim() {
                "R" => values.push((Param::R, value)),
                "S" => values.push((Param::S, value)),
                "V" => values.push((Param::V, value)),
                "W" => values.push((Param::W, value)),
                "omega" => omega = Some(value),
                other => {
                    return Err(Error::InvalidBinding(format!(
                        "unknown parameter `{other}` (expected R, S, V, W, omega)"
                    )))
                }
            }
        }
        let b = ParameterBinding::new(values)?;
        if let Some(w) = omega {
            if b.omega.as_ref() != Some(&w) {
                return Err(Error::InvalidBinding(format!(
                    "omega = {w} is inconsistent with omega^2 = R^2 - 4*S"
                )));
            }
        }
        Ok(b)
    }
}

impl fmt::Display for ParameterBinding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .params
            .iter()
            .map(|(p, v)| format!("{}={}", p.name(), v))
            .collect();
        write!(f, "{}", parts.join(","))
    }
}

impl Serialize for ParameterBinding {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = s.serialize_map(None)?;
        for (p, v) in &self.params {
            map.serialize_entry(p.name(), &v.to_string())?;
        }
        if let Some(w) = &self.omega {
            map.serialize_entry("omega", &w.to_string())?;
        }
        map.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::parse::parse;

    #[test]
    fn standard_binding() {
        let b: ParameterBinding = "R=5,S=4,V=1,W=1".parse().unwrap();
        assert_eq!(b.omega(), Some(&Q::from_integer(3.into())));
        b.require_discovery().unwrap();
        b.require_nonsingular().unwrap();
        assert_eq!(b.to_string(), "R=5,S=4,V=1,W=1");
    }

    #[test]
    fn discriminant_checks() {
        assert!(matches!(
            "R=1,S=1".parse::<ParameterBinding>(),
            Err(Error::InvalidBinding(_))
        ));
        let b: ParameterBinding = "R=3,S=1,V=1,W=1".parse().unwrap();
        assert!(b.omega().is_none());
        assert!(b.require_discovery().is_err());
        assert!("R=5,S=4,omega=-3".parse::<ParameterBinding>().is_err());
        let singular: ParameterBinding = "R=1,S=0,V=1,W=-1".parse().unwrap();
        assert!(matches!(
            singular.require_nonsingular(),
            Err(Error::SingularParameters(_))
        ));
        let half: ParameterBinding = "R=5/2,S=1".parse().unwrap();
        assert_eq!(half.omega(), Some(&"3/2".parse::<Q>().unwrap()));
    }

    #[test]
    fn apply_binding() {
        let b: ParameterBinding = "R=5,S=4".parse().unwrap();
        assert_eq!(b.apply(&parse("R^2 - 4*S").unwrap()).unwrap(), Expr::int(9));
        let e = parse("omega*x + omega^2").unwrap();
        assert_eq!(b.apply(&e).unwrap(), parse("3*x + 9").unwrap());
    }
}
