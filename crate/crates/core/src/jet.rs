//! Total derivatives on jet space and evolution equations `u_t = F`.

use std::fmt;

use crate::error::{Error, Result};
use crate::kernel::{Atom, Dep, Expr, IndVar, JetVar, ParameterBinding, Parser, RatFunc};

/// A scalar evolution equation `dep_t = rhs`. The first independent
/// variable is always `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionPDE {
    vars: Vec<IndVar>,
    dep: Dep,
    rhs: Expr,
}

impl EvolutionPDE {
    /// Checks that `rhs` only involves spatial jets of `dep` up to order two
    /// and no variables outside `vars`.
    pub fn new(vars: Vec<IndVar>, dep: Dep, rhs: Expr) -> Result<Self> {
        if vars.first() != Some(&IndVar::T) {
            return Err(Error::InvalidEquation("first variable must be t".into()));
        }
        for atom in rhs.atoms() {
            match &atom {
                Atom::Jet(j) => {
                    if j.dep != dep {
                        return Err(Error::InvalidEquation(format!(
                            "right-hand side mentions `{j}` but the unknown is {}",
                            dep.letter()
                        )));
                    }
                    if j.time_order() > 0 {
                        return Err(Error::InvalidEquation(format!(
                            "right-hand side must be free of time derivatives, found `{j}`"
                        )));
                    }
                    if j.order() > 2 {
                        return Err(Error::InvalidEquation(format!("`{j}` is above second order")));
                    }
                    if j.vars().iter().any(|v| !vars.contains(v)) {
                        return Err(Error::InvalidEquation(format!("`{j}` uses a foreign variable")));
                    }
                }
                Atom::Var(v) if !vars.contains(v) => {
                    return Err(Error::InvalidEquation(format!(
                        "variable `{}` is not an independent variable here",
                        v.letter()
                    )))
                }
                Atom::Func(_) => {
                    return Err(Error::InvalidEquation("undetermined functions are not allowed".into()))
                }
                _ => {}
            }
        }
        Ok(EvolutionPDE { vars, dep, rhs })
    }

    /// Parses `rhs` for `dep_t = rhs` in the given variables.
    pub fn parse(vars: Vec<IndVar>, dep: Dep, rhs: &str) -> Result<Self> {
        EvolutionPDE::new(vars, dep, Parser::new().parse(rhs)?)
    }

    pub fn vars(&self) -> &[IndVar] {
        &self.vars
    }

    pub fn spatial_vars(&self) -> &[IndVar] {
        &self.vars[1..]
    }

    pub fn dep(&self) -> Dep {
        self.dep
    }

    pub fn rhs(&self) -> &Expr {
        &self.rhs
    }

    pub fn time_order(&self) -> u8 {
        1
    }

    pub fn spatial_order(&self) -> u8 {
        self.rhs
            .atoms()
            .iter()
            .filter_map(|a| match a {
                Atom::Jet(j) => Some(j.order()),
                _ => None,
            })
            .max()
            .unwrap_or(0)
    }

    pub fn is_autonomous(&self) -> bool {
        !self.rhs.mentions(&Atom::Var(IndVar::T))
    }

    pub fn with_binding(&self, binding: &ParameterBinding) -> Result<Self> {
        EvolutionPDE::new(self.vars.clone(), self.dep, binding.apply(&self.rhs)?)
    }

    /// `u_t`, or `z_t`.
    pub fn time_jet(&self) -> JetVar {
        JetVar::base(self.dep).derive(IndVar::T).expect("order one")
    }

    /// All jets of order 1..=2 over the spatial variables, graded then
    /// lexicographic.
    pub fn spatial_jets(&self) -> Vec<JetVar> {
        let base = JetVar::base(self.dep);
        let mut out = Vec::new();
        for &v in self.spatial_vars() {
            out.push(base.derive(v).expect("order one"));
        }
        for (i, &v) in self.spatial_vars().iter().enumerate() {
            for &w in &self.spatial_vars()[i..] {
                out.push(base.derive(v).and_then(|j| j.derive(w)).expect("order two"));
            }
        }
        out
    }
}

impl fmt::Display for EvolutionPDE {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.time_jet(), self.rhs)
    }
}

/// A time-independent equation `lhs = 0` in the spatial variables.
#[derive(Debug, Clone, PartialEq)]
pub struct StationaryEquation {
    pub vars: Vec<IndVar>,
    pub dep: Dep,
    pub lhs: Expr,
}

impl fmt::Display for StationaryEquation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = 0", self.lhs)
    }
}

/// The constant-coefficient equation in (t, x, y):
/// `u_t = R*u - x*u_y + R*x*u_x + S*y*u_x + V*u_xy + W*u_xx`.
pub fn make_hpz() -> EvolutionPDE {
    EvolutionPDE::parse(
        vec![IndVar::T, IndVar::X, IndVar::Y],
        Dep::U,
        "R*u - x*u_y + R*x*u_x + S*y*u_x + V*u_xy + W*u_xx",
    )
    .expect("built-in equation is valid")
}

/// The heat equation `u_t = u_xx` in (t, x).
pub fn make_heat() -> EvolutionPDE {
    EvolutionPDE::parse(vec![IndVar::T, IndVar::X], Dep::U, "u_xx").expect("built-in equation is valid")
}

fn jets_of(f: &RatFunc) -> Vec<JetVar> {
    f.atoms()
        .into_iter()
        .filter_map(|a| match a {
            Atom::Jet(j) => Some(j),
            _ => None,
        })
        .collect()
}

/// `D_v f = df/dv + sum_J jet_{J+v} * df/d(jet_J)`.
pub(crate) fn total_derivative_rf(f: &RatFunc, v: IndVar) -> Result<RatFunc> {
    let mut out = f.differentiate(&Atom::Var(v));
    for j in jets_of(f) {
        let partial = f.differentiate(&Atom::Jet(j));
        if partial.is_zero() {
            continue;
        }
        let next = j.derive(v)?;
        out = out.add(&partial.mul(&RatFunc::atom(Atom::Jet(next))));
    }
    Ok(out)
}

/// Replaces every time-derivative jet by its value on the solution manifold:
/// `u_t` first, then mixed jets such as `u_tx`, `u_ty`, then `u_tt`.
pub(crate) fn eliminate_time_jets_rf(f: &RatFunc, pde: &EvolutionPDE) -> Result<RatFunc> {
    let rhs = pde.rhs.to_ratfunc()?;
    let mut f = f.clone();
    loop {
        let mut time_jets: Vec<JetVar> = jets_of(&f)
            .into_iter()
            .filter(|j| j.dep == pde.dep && j.time_order() > 0)
            .collect();
        if time_jets.is_empty() {
            return Ok(f);
        }
        time_jets.sort_by_key(|j| (j.time_order(), j.order(), *j));
        let j = time_jets[0];
        // u_J = D_{J - t} F
        let mut rest = j.vars();
        let t_pos = rest.iter().position(|&v| v == IndVar::T).expect("has a t");
        rest.remove(t_pos);
        let mut value = rhs.clone();
        for v in rest.iter().rev() {
            value = total_derivative_rf(&value, *v)?;
        }
        f = f.substitute(&Atom::Jet(j), &value)?;
    }
}

/// Total derivative with respect to `v`. With a `pde`, time-derivative jets
/// in the result are eliminated on the solution manifold.
pub fn total_derivative(e: &Expr, v: IndVar, pde: Option<&EvolutionPDE>) -> Result<Expr> {
    let d = total_derivative_rf(&e.to_ratfunc()?, v)?;
    Ok(match pde {
        Some(p) => eliminate_time_jets_rf(&d, p)?.into(),
        None => d.into(),
    })
}

pub fn eliminate_time_jets(e: &Expr, pde: &EvolutionPDE) -> Result<Expr> {
    Ok(eliminate_time_jets_rf(&e.to_ratfunc()?, pde)?.into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::parse;

    #[test]
    fn hpz_renders() {
        let p = make_hpz();
        assert_eq!(
            p.to_string(),
            "u_t = R*x*u_x + R*u + S*y*u_x + V*u_xy + W*u_xx - x*u_y"
        );
        assert_eq!(p.spatial_order(), 2);
        assert_eq!(p.time_order(), 1);
        assert_eq!(make_heat().to_string(), "u_t = u_xx");
    }

    #[test]
    fn hpz_with_zero_parameters() {
        let b: ParameterBinding = "R=0,S=0,V=0".parse().unwrap();
        let p = make_hpz().with_binding(&b).unwrap();
        assert_eq!(p.rhs(), &parse("-x*u_y + W*u_xx").unwrap());
    }

    #[test]
    fn simple_total_derivatives() {
        let u = parse("u").unwrap();
        assert_eq!(total_derivative(&u, IndVar::X, None).unwrap(), parse("u_x").unwrap());
        let xu = parse("x*u").unwrap();
        assert_eq!(total_derivative(&xu, IndVar::Y, None).unwrap(), parse("x*u_y").unwrap());
        assert_eq!(total_derivative(&xu, IndVar::X, None).unwrap(), parse("u + x*u_x").unwrap());
    }

    #[test]
    fn time_derivative_on_the_solution_manifold() {
        let hpz = make_hpz();
        let ux = parse("u_x").unwrap();
        let d = total_derivative(&ux, IndVar::T, Some(&hpz)).unwrap();
        let expected = parse(
            "2*R*u_x + R*x*u_xx - x*u_xy + S*y*u_xx - u_y + V*u_xxy + W*u_xxx",
        )
        .unwrap();
        assert_eq!(d, expected);
    }

    #[test]
    fn order_overflow_names_variable() {
        let e = parse("u_xxy").unwrap();
        match total_derivative(&e, IndVar::Y, None) {
            Err(Error::JetOrderOverflow { var, .. }) => assert_eq!(var, "y"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rejects_bad_equations() {
        assert!(EvolutionPDE::parse(vec![IndVar::T, IndVar::X], Dep::U, "u_t").is_err());
        assert!(EvolutionPDE::parse(vec![IndVar::T, IndVar::X], Dep::U, "u_y").is_err());
        assert!(EvolutionPDE::parse(vec![IndVar::T, IndVar::X], Dep::U, "u_xxx").is_err());
        assert!(EvolutionPDE::parse(vec![IndVar::T, IndVar::X], Dep::U, "y*u").is_err());
    }
}
