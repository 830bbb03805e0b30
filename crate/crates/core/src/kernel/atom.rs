//! Atoms: the leaves of an expression that are not numbers.

use std::fmt;

use crate::error::{Error, Result};

/// Highest total order a jet variable may carry.
pub const JET_ORDER_CAP: u8 = 3;

/// Independent variables. `r` is the invariant used by reduced (1+1) equations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum IndVar {
    T,
    X,
    Y,
    R,
}

impl IndVar {
    pub const ALL: [IndVar; 4] = [IndVar::T, IndVar::X, IndVar::Y, IndVar::R];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn letter(self) -> char {
        match self {
            IndVar::T => 't',
            IndVar::X => 'x',
            IndVar::Y => 'y',
            IndVar::R => 'r',
        }
    }

    pub fn from_letter(c: char) -> Option<IndVar> {
        match c {
            't' => Some(IndVar::T),
            'x' => Some(IndVar::X),
            'y' => Some(IndVar::Y),
            'r' => Some(IndVar::R),
            _ => None,
        }
    }
}

/// The constant parameters of the equation family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Param {
    R,
    S,
    V,
    W,
}

impl Param {
    pub const ALL: [Param; 4] = [Param::R, Param::S, Param::V, Param::W];

    pub fn name(self) -> &'static str {
        match self {
            Param::R => "R",
            Param::S => "S",
            Param::V => "V",
            Param::W => "W",
        }
    }
}

/// Dependent symbol: `u` for the (1+2) equation, `z` for reduced ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Dep {
    U,
    Z,
}

impl Dep {
    pub fn letter(self) -> char {
        match self {
            Dep::U => 'u',
            Dep::Z => 'z',
        }
    }
}

/// A derivative coordinate `u_J`: the dependent symbol with a multi-index
/// of derivative counts over (t, x, y, r). Mixed partials commute because the
/// index is stored as counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct JetVar {
    pub dep: Dep,
    counts: [u8; 4],
}

impl JetVar {
    pub fn base(dep: Dep) -> Self {
        JetVar {
            dep,
            counts: [0; 4],
        }
    }

    /// Builds the jet from a list of differentiation variables.
    pub fn new(dep: Dep, vars: &[IndVar]) -> Result<Self> {
        let mut jet = JetVar::base(dep);
        for &v in vars {
            jet = jet.derive(v)?;
        }
        Ok(jet)
    }

    pub fn count(&self, v: IndVar) -> u8 {
        self.counts[v.index()]
    }

    pub fn counts(&self) -> [u8; 4] {
        self.counts
    }

    pub fn order(&self) -> u8 {
        self.counts.iter().sum()
    }

    pub fn time_order(&self) -> u8 {
        self.counts[IndVar::T.index()]
    }

    /// The jet with the time derivatives stripped off.
    pub fn spatial_part(&self) -> JetVar {
        let mut counts = self.counts;
        counts[IndVar::T.index()] = 0;
        JetVar {
            dep: self.dep,
            counts,
        }
    }

    pub fn derive(self, v: IndVar) -> Result<JetVar> {
        if self.order() >= JET_ORDER_CAP {
            return Err(Error::JetOrderOverflow {
                jet: self.to_string(),
                var: v.letter().to_string(),
                cap: JET_ORDER_CAP,
            });
        }
        let mut counts = self.counts;
        counts[v.index()] += 1;
        Ok(JetVar {
            dep: self.dep,
            counts,
        })
    }

    /// The variables of the multi-index in canonical order (t before x before y before r).
    pub fn vars(&self) -> Vec<IndVar> {
        IndVar::ALL
            .iter()
            .flat_map(|&v| std::iter::repeat_n(v, self.count(v) as usize))
            .collect()
    }

    /// Parses names like `u`, `u_x`, `z_rr`, `u_tx`. Subscript letters may come
    /// in any order; they are stored canonically.
    pub fn parse(name: &str) -> Option<JetVar> {
        let mut chars = name.chars();
        let dep = match chars.next()? {
            'u' => Dep::U,
            'z' => Dep::Z,
            _ => return None,
        };
        let rest: &str = chars.as_str();
        if rest.is_empty() {
            return Some(JetVar::base(dep));
        }
        let sub = rest.strip_prefix('_')?;
        if sub.is_empty() {
            return None;
        }
        let mut vars = Vec::new();
        for c in sub.chars() {
            vars.push(IndVar::from_letter(c)?);
        }
        JetVar::new(dep, &vars).ok()
    }
}

impl fmt::Display for JetVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.dep.letter())?;
        if self.order() > 0 {
            write!(f, "_")?;
            for v in self.vars() {
                write!(f, "{}", v.letter())?;
            }
        }
        Ok(())
    }
}

/// An undetermined function of `t` (and its `order`-th derivative), used by
/// symmetry ansatz coefficients.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FuncAtom {
    pub name: String,
    pub order: u32,
}

impl fmt::Display for FuncAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.order {
            0 => write!(f, "{}(t)", self.name),
            1..=3 => write!(f, "{}{}(t)", self.name, "'".repeat(self.order as usize)),
            n => write!(f, "{}^({})(t)", self.name, n),
        }
    }
}

/// Leaf symbols. The variant order fixes the order factors print in.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    Param(Param),
    /// The surd `omega = sqrt(R^2 - 4*S)`.
    Omega,
    Const(String),
    Func(FuncAtom),
    Var(IndVar),
    Jet(JetVar),
}

impl Atom {
    pub fn is_parameter_like(&self) -> bool {
        matches!(self, Atom::Param(_) | Atom::Omega | Atom::Const(_))
    }

    pub fn func(name: &str, order: u32) -> Atom {
        Atom::Func(FuncAtom {
            name: name.to_string(),
            order,
        })
    }

    pub fn u() -> Atom {
        Atom::Jet(JetVar::base(Dep::U))
    }

    pub fn z() -> Atom {
        Atom::Jet(JetVar::base(Dep::Z))
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Param(p) => write!(f, "{}", p.name()),
            Atom::Omega => write!(f, "omega"),
            Atom::Const(name) => write!(f, "{name}"),
            Atom::Func(func) => write!(f, "{func}"),
            Atom::Var(v) => write!(f, "{}", v.letter()),
            Atom::Jet(j) => write!(f, "{j}"),
        }
    }
}

pub const RESERVED_NAMES: &[&str] = &[
    "t", "x", "y", "r", "z", "u", "R", "S", "V", "W", "omega", "exp", "sqrt",
];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jet_names_are_canonical() {
        let j = JetVar::parse("u_yx").unwrap();
        assert_eq!(j.to_string(), "u_xy");
        assert_eq!(JetVar::parse("z_rr").unwrap().order(), 2);
        assert_eq!(JetVar::parse("u").unwrap().order(), 0);
        assert!(JetVar::parse("u_").is_none());
        assert!(JetVar::parse("u_q").is_none());
        assert!(JetVar::parse("v_x").is_none());
    }

    #[test]
    fn order_cap_is_enforced() {
        let j = JetVar::parse("u_xxy").unwrap();
        let err = j.derive(IndVar::X).unwrap_err();
        assert!(matches!(err, Error::JetOrderOverflow { .. }));
        assert!(err.to_string().contains("u_xxy"));
    }

    #[test]
    fn func_atom_display() {
        assert_eq!(Atom::func("a", 0).to_string(), "a(t)");
        assert_eq!(Atom::func("a", 2).to_string(), "a''(t)");
        assert_eq!(Atom::func("b1", 5).to_string(), "b1^(5)(t)");
    }
}
