//! Point vector fields, their second prolongation, and determining equations.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::jet::{eliminate_time_jets_rf, total_derivative_rf, EvolutionPDE};
use crate::kernel::{Atom, Dep, Expr, IndVar, JetVar, Monomial, Parser, RatFunc};

/// `sum_i xi^i d/dx^i + eta d/du`. Coefficients are functions of the
/// independent variables and the dependent symbol only.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    vars: Vec<IndVar>,
    dep: Dep,
    xi: Vec<Expr>,
    eta: Expr,
}

impl VectorField {
    pub fn new(vars: Vec<IndVar>, dep: Dep, xi: Vec<Expr>, eta: Expr) -> Result<Self> {
        if xi.len() != vars.len() {
            return Err(Error::InvalidField(format!(
                "{} coefficients for {} variables",
                xi.len(),
                vars.len()
            )));
        }
        for c in xi.iter().chain(std::iter::once(&eta)) {
            for a in c.atoms() {
                match a {
                    Atom::Jet(j) if j.order() > 0 || j.dep != dep => {
                        return Err(Error::InvalidField(format!("coefficient depends on the jet `{j}`")))
                    }
                    Atom::Var(v) if !vars.contains(&v) => {
                        return Err(Error::InvalidField(format!(
                            "coefficient depends on `{}`, which is not a variable here",
                            v.letter()
                        )))
                    }
                    _ => {}
                }
            }
        }
        Ok(VectorField { vars, dep, xi, eta })
    }

    /// The field for the (t, x, y) equation with dependent symbol `u`.
    pub fn txy(xi_t: Expr, xi_x: Expr, xi_y: Expr, eta: Expr) -> Result<Self> {
        VectorField::new(vec![IndVar::T, IndVar::X, IndVar::Y], Dep::U, vec![xi_t, xi_x, xi_y], eta)
    }

    pub fn zero(vars: Vec<IndVar>, dep: Dep) -> Self {
        let xi = vec![Expr::zero(); vars.len()];
        VectorField { vars, dep, xi, eta: Expr::zero() }
    }

    /// Parses `xi_t=...; xi_x=...; xi_y=...; eta=...`. Omitted fields are
    /// zero, and a zero component for a variable outside `vars` is ignored.
    pub fn parse(text: &str, vars: &[IndVar], dep: Dep, parser: &Parser) -> Result<Self> {
        let mut xi = vec![Expr::zero(); vars.len()];
        let mut eta = Expr::zero();
        let mut seen = Vec::new();
        for item in text.split(';').map(str::trim).filter(|s| !s.is_empty()) {
            let (name, value) = item
                .split_once('=')
                .ok_or_else(|| Error::InvalidField(format!("expected name=expression, got `{item}`")))?;
            let name = name.trim();
            if seen.contains(&name.to_string()) {
                return Err(Error::InvalidField(format!("`{name}` given twice")));
            }
            seen.push(name.to_string());
            let e = parser.parse(value)?;
            if name == "eta" {
                eta = e;
                continue;
            }
            let letter = name.strip_prefix("xi_").and_then(|v| {
                let mut c = v.chars();
                match (c.next(), c.next()) {
                    (Some(l), None) => IndVar::from_letter(l),
                    _ => None,
                }
            });
            if letter.is_some_and(|v| !vars.contains(&v)) && e.is_zero() {
                continue;
            }
            let var = letter.and_then(|v| vars.iter().position(|&w| w == v)).ok_or_else(|| {
                let names: Vec<String> = vars.iter().map(|v| format!("xi_{}", v.letter())).collect();
                Error::InvalidField(format!("unknown field `{name}` (expected {}, eta)", names.join(", ")))
            })?;
            xi[var] = e;
        }
        VectorField::new(vars.to_vec(), dep, xi, eta)
    }

    pub fn vars(&self) -> &[IndVar] {
        &self.vars
    }

    pub fn dep(&self) -> Dep {
        self.dep
    }

    pub fn xi(&self) -> &[Expr] {
        &self.xi
    }

    pub fn xi_of(&self, v: IndVar) -> Expr {
        self.vars
            .iter()
            .position(|&w| w == v)
            .map_or_else(Expr::zero, |i| self.xi[i].clone())
    }

    pub fn eta(&self) -> &Expr {
        &self.eta
    }

    /// Coordinates of the field: the independent variables then the
    /// dependent symbol, with their coefficients.
    pub fn components(&self) -> Vec<(Atom, Expr)> {
        let mut out: Vec<(Atom, Expr)> = self
            .vars
            .iter()
            .zip(&self.xi)
            .map(|(v, c)| (Atom::Var(*v), c.clone()))
            .collect();
        out.push((Atom::Jet(JetVar::base(self.dep)), self.eta.clone()));
        out
    }

    fn same_space(&self, other: &VectorField) -> Result<()> {
        if self.vars != other.vars || self.dep != other.dep {
            return Err(Error::InvalidField("fields live on different spaces".into()));
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.eta.is_zero() && self.xi.iter().all(Expr::is_zero)
    }

    pub fn scale(&self, k: &Expr) -> VectorField {
        VectorField {
            vars: self.vars.clone(),
            dep: self.dep,
            xi: self.xi.iter().map(|c| k * c).collect(),
            eta: k * &self.eta,
        }
    }

    pub fn add(&self, other: &VectorField) -> Result<VectorField> {
        self.same_space(other)?;
        Ok(VectorField {
            vars: self.vars.clone(),
            dep: self.dep,
            xi: self.xi.iter().zip(&other.xi).map(|(a, b)| a + b).collect(),
            eta: &self.eta + &other.eta,
        })
    }

    pub fn map_coefficients(&self, f: impl Fn(&Expr) -> Result<Expr>) -> Result<VectorField> {
        VectorField::new(
            self.vars.clone(),
            self.dep,
            self.xi.iter().map(&f).collect::<Result<_>>()?,
            f(&self.eta)?,
        )
    }

    /// The derivation `X(f) = sum_i xi^i df/dx^i + eta df/du`.
    pub fn apply(&self, f: &Expr) -> Result<Expr> {
        let f = f.to_ratfunc()?;
        let mut out = RatFunc::zero();
        for (atom, c) in self.components() {
            let d = f.differentiate(&atom);
            if !d.is_zero() {
                out = out.add(&c.to_ratfunc()?.mul(&d));
            }
        }
        Ok(out.into())
    }

    /// Lie bracket `[X, Y]` with components `X(Y^c) - Y(X^c)`.
    pub fn commutator(&self, other: &VectorField) -> Result<VectorField> {
        self.same_space(other)?;
        let mut xi = Vec::with_capacity(self.vars.len());
        for i in 0..self.vars.len() {
            xi.push(&self.apply(&other.xi[i])? - &other.apply(&self.xi[i])?);
        }
        let eta = &self.apply(&other.eta)? - &other.apply(&self.eta)?;
        Ok(VectorField { vars: self.vars.clone(), dep: self.dep, xi, eta })
    }

    /// Characteristic `Q = eta - sum_i xi^i u_i`.
    fn characteristic(&self) -> Result<RatFunc> {
        let mut q = self.eta.to_ratfunc()?;
        for (v, c) in self.vars.iter().zip(&self.xi) {
            let ui = JetVar::base(self.dep).derive(*v)?;
            q = q.sub(&c.to_ratfunc()?.mul(&RatFunc::atom(Atom::Jet(ui))));
        }
        Ok(q)
    }

    /// `eta^J = D_J(Q) + sum_i xi^i u_{J+i}`.
    fn extended_coefficient(&self, q: &RatFunc, jet: JetVar) -> Result<RatFunc> {
        let mut d = q.clone();
        for v in jet.vars() {
            d = total_derivative_rf(&d, v)?;
        }
        for (v, c) in self.vars.iter().zip(&self.xi) {
            let next = jet.derive(*v)?;
            d = d.add(&c.to_ratfunc()?.mul(&RatFunc::atom(Atom::Jet(next))));
        }
        Ok(d)
    }

    /// Extended coefficients `eta^J` for every jet of order one and two.
    pub fn prolong2(&self) -> Result<BTreeMap<JetVar, Expr>> {
        let q = self.characteristic()?;
        let mut jets = Vec::new();
        let base = JetVar::base(self.dep);
        for (i, &v) in self.vars.iter().enumerate() {
            jets.push(base.derive(v)?);
            for &w in &self.vars[i..] {
                jets.push(base.derive(v)?.derive(w)?);
            }
        }
        let mut out = BTreeMap::new();
        for j in jets {
            out.insert(j, self.extended_coefficient(&q, j)?.into());
        }
        Ok(out)
    }

    pub(crate) fn residual_rf(&self, pde: &EvolutionPDE) -> Result<RatFunc> {
        if self.vars != pde.vars() || self.dep != pde.dep() {
            return Err(Error::InvalidField(format!(
                "field variables do not match the equation `{pde}`"
            )));
        }
        let q = self.characteristic()?;
        let f = pde.rhs().to_ratfunc()?;
        let mut res = self.extended_coefficient(&q, pde.time_jet())?;
        for (v, c) in self.vars.iter().zip(&self.xi) {
            let d = f.differentiate(&Atom::Var(*v));
            if !d.is_zero() {
                res = res.sub(&c.to_ratfunc()?.mul(&d));
            }
        }
        let du = f.differentiate(&Atom::Jet(JetVar::base(self.dep)));
        if !du.is_zero() {
            res = res.sub(&self.eta.to_ratfunc()?.mul(&du));
        }
        for j in pde.spatial_jets() {
            let d = f.differentiate(&Atom::Jet(j));
            if !d.is_zero() {
                res = res.sub(&self.extended_coefficient(&q, j)?.mul(&d));
            }
        }
        eliminate_time_jets_rf(&res, pde)
    }

    /// The prolonged field applied to `u_t - F`, restricted to solutions.
    /// Zero exactly when the field is a point symmetry.
    pub fn residual(&self, pde: &EvolutionPDE) -> Result<Expr> {
        Ok(self.residual_rf(pde)?.into())
    }
}

/// Residuals of many fields, computed concurrently, in input order.
pub fn residuals(fields: &[VectorField], pde: &EvolutionPDE) -> Vec<Result<Expr>> {
    fields.par_iter().map(|f| f.residual(pde)).collect()
}

impl fmt::Display for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (v, c) in self.vars.iter().zip(&self.xi) {
            write!(f, "xi_{}={}; ", v.letter(), c)?;
        }
        write!(f, "eta={}", self.eta)
    }
}

/// A product of derivative jets, ordered by total derivative order and
/// then lexicographically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JetMonomial(pub Vec<(JetVar, i32)>);

impl JetMonomial {
    fn degree(&self) -> u32 {
        self.0.iter().map(|(j, e)| j.order() as u32 * *e as u32).sum()
    }
}

impl Ord for JetMonomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.degree(), &self.0).cmp(&(other.degree(), &other.0))
    }
}

impl PartialOrd for JetMonomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for JetMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(j, e)| if *e == 1 { j.to_string() } else { format!("{j}^{e}") })
            .collect();
        write!(f, "{}", parts.join("*"))
    }
}

/// One determining equation: the coefficient of `jet * monomial` in the
/// residual, which must vanish.
#[derive(Debug, Clone, PartialEq)]
pub struct DeterminingEquation {
    pub jet: JetMonomial,
    pub monomial: Expr,
    pub coefficient: Expr,
}

/// The residual split by jet monomial and then by monomials in the
/// spatial variables and the dependent symbol.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DeterminingSystem {
    pub equations: Vec<DeterminingEquation>,
}

impl DeterminingSystem {
    pub fn is_zero(&self) -> bool {
        self.equations.is_empty()
    }

    pub fn len(&self) -> usize {
        self.equations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.equations.is_empty()
    }
}

/// Collects the residual of `ansatz` into determining equations. Every
/// coefficient must be free of the spatial variables and jets.
pub fn determining_equations(ansatz: &VectorField, pde: &EvolutionPDE) -> Result<DeterminingSystem> {
    let res = ansatz.residual_rf(pde)?;
    let spatial: Vec<IndVar> = pde.spatial_vars().to_vec();
    let base = JetVar::base(pde.dep());
    let is_split_atom = |a: &Atom| match a {
        Atom::Var(v) => spatial.contains(v),
        Atom::Jet(j) => *j == base,
        _ => false,
    };
    let groups = res.collect_by(|m: &Monomial| {
        let (jets, rest) = m.partition(|a| matches!(a, Atom::Jet(j) if j.order() > 0), false);
        let (split, coeff) = rest.partition(is_split_atom, false);
        let jet_key: Vec<(JetVar, i32)> = jets
            .factors()
            .iter()
            .map(|(a, e)| match a {
                Atom::Jet(j) => (*j, *e),
                _ => unreachable!("partitioned on jets"),
            })
            .collect();
        ((JetMonomial(jet_key), split), coeff)
    });
    let mut equations = Vec::with_capacity(groups.len());
    for ((jet, split), coeff) in groups {
        let c: Expr = coeff.into();
        let bad = c.atoms().into_iter().find(|a| is_split_atom(a) || matches!(a, Atom::Jet(_)));
        if let Some(a) = bad {
            return Err(Error::InvalidField(format!(
                "determining equation coefficient is not polynomial in `{a}`"
            )));
        }
        equations.push(DeterminingEquation {
            jet,
            monomial: RatFunc::from_poly(crate::kernel::Poly::from_monomial(split, crate::kernel::poly::q(1))).into(),
            coefficient: c,
        });
    }
    Ok(DeterminingSystem { equations })
}

/// The six generators of the (t, x, y) equation with their coefficient
/// functions, plus the rejected reading of the ambiguous coefficients.
#[derive(Debug, Clone)]
pub struct SymmetryFixture {
    pub coefficients: Vec<(String, Expr)>,
    pub generators: Vec<(String, VectorField)>,
    pub alternatives: Vec<(String, VectorField)>,
}

const COEFFICIENTS: &[(&str, &str)] = &[
    ("A2", "exp(-1/2*(R + omega)*t)"),
    ("A1", "-1/2*(R + omega)*exp(-1/2*(R + omega)*t)"),
    ("B2", "exp(1/2*(-R + omega)*t)"),
    ("B1", "1/2*(-R + omega)*exp(1/2*(-R + omega)*t)"),
    ("C", "exp(-1/2*(-R + omega)*t)/(2*(R*V + W))"),
    ("C1", "(R - omega)*W"),
    ("C2", "2*(R*V + W)"),
    ("C3", "R*(-R + omega)"),
    ("C4", "-2*R*S"),
    ("E", "exp(1/2*(R + omega)*t)/(2*(R*V + W))"),
    ("E1", "(R + omega)*W"),
    ("E2", "2*(R*V + W)"),
    ("E3", "R*(-R - omega)"),
    ("E4", "-2*R*S"),
];

impl SymmetryFixture {
    pub fn reference() -> Self {
        let p = Parser::new();
        let coefficients: Vec<(String, Expr)> = COEFFICIENTS
            .iter()
            .map(|(n, t)| (n.to_string(), p.parse(t).expect("fixture coefficient parses")))
            .collect();
        let c = |name: &str| -> Expr {
            coefficients
                .iter()
                .find(|(n, _)| n == name)
                .map(|(_, e)| e.clone())
                .expect("known coefficient")
        };
        let x = Expr::var(IndVar::X);
        let y = Expr::var(IndVar::Y);
        let u = Expr::dep(Dep::U);
        let zero = Expr::zero;
        let field = |xt: Expr, xx: Expr, xy: Expr, eta: Expr| {
            VectorField::txy(xt, xx, xy, eta).expect("fixture field is jet-free")
        };
        let family = |k: &str, k1: Expr, k2: &str, k3: &str, k4: &str| {
            let amp = c(k);
            field(
                zero(),
                &amp * &k1,
                &amp * &c(k2),
                &amp * &(&(&(&c(k3) * &x) + &(&c(k4) * &y)) * &u),
            )
        };
        let generators = vec![
            ("delta1".to_string(), field(Expr::one(), zero(), zero(), u.clone())),
            ("delta2".to_string(), field(zero(), zero(), zero(), u.clone())),
            ("delta3".to_string(), field(zero(), c("A1"), c("A2"), zero())),
            ("delta4".to_string(), field(zero(), c("B1"), c("B2"), zero())),
            ("delta5".to_string(), family("C", c("C1"), "C2", "C3", "C4")),
            ("delta6".to_string(), family("E", c("E1"), "E2", "E3", "E4")),
        ];
        let alternatives = vec![
            (
                "delta5 with C1 = R - omega*W".to_string(),
                family("C", p.parse("R - omega*W").expect("parses"), "C2", "C3", "C4"),
            ),
            (
                "delta6 with E1 = R + omega*W".to_string(),
                family("E", p.parse("R + omega*W").expect("parses"), "E2", "E3", "E4"),
            ),
        ];
        SymmetryFixture { coefficients, generators, alternatives }
    }

    pub fn get(&self, name: &str) -> Option<&VectorField> {
        self.generators.iter().find(|(n, _)| n == name).map(|(_, f)| f)
    }

    pub fn fields(&self) -> Vec<VectorField> {
        self.generators.iter().map(|(_, f)| f.clone()).collect()
    }
}
