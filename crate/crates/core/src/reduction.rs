//! Symmetry reduction of the (t, x, y) equation to (1+1) equations in
//! `(t, r)`, and the time reduction to a stationary equation.

use crate::error::{Error, Result};
use crate::jet::{EvolutionPDE, StationaryEquation};
use crate::kernel::{Atom, Dep, Expr, IndVar, JetVar, ParameterBinding, Parser, RatFunc};
use crate::prolong::{SymmetryFixture, VectorField};

/// `r = alpha*x + beta*y` and `u = z(t, r) * exp(q1*x*y + q2*y^2 + q3*x^2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReductionMap {
    pub alpha: Expr,
    pub beta: Expr,
    pub q1: Expr,
    pub q2: Expr,
    pub q3: Expr,
}

impl ReductionMap {
    pub fn invariant(&self) -> Expr {
        &(&self.alpha * &Expr::var(IndVar::X)) + &(&self.beta * &Expr::var(IndVar::Y))
    }

    pub fn multiplier_exponent(&self) -> Expr {
        let (x, y) = (Expr::var(IndVar::X), Expr::var(IndVar::Y));
        &(&(&self.q1 * &(&x * &y)) + &(&self.q2 * &(&y * &y))) + &(&self.q3 * &(&x * &x))
    }
}

fn is_constant(e: &Expr) -> bool {
    e.atoms().iter().all(Atom::is_parameter_like)
}

fn require_txy(vars: &[IndVar], dep: Dep) -> Result<()> {
    if vars != [IndVar::T, IndVar::X, IndVar::Y] || dep != Dep::U {
        return Err(Error::NotReducible(
            "reduction needs an equation in (t, x, y) with two spatial variables".into(),
        ));
    }
    Ok(())
}

/// Invariant and multiplier for a field `c(t) (p d/dx + q d/dy + (m x + n y) u d/du)`.
/// If `hint` is a constant multiple of the computed invariant it is used
/// instead, so the reduced equation matches a preferred normalization.
pub fn invariants_for(vf: &VectorField, hint: Option<&Expr>) -> Result<ReductionMap> {
    require_txy(vf.vars(), vf.dep())?;
    if !vf.xi_of(IndVar::T).is_zero() {
        return Err(Error::NotReducible("the generator has a d/dt component".into()));
    }
    let (xi_x, xi_y) = (vf.xi_of(IndVar::X), vf.xi_of(IndVar::Y));
    let scale = if xi_y.is_zero() { xi_x.clone() } else { xi_y.clone() };
    if scale.is_zero() {
        return Err(Error::NotReducible("the generator has no spatial component".into()));
    }
    if [IndVar::X, IndVar::Y].iter().any(|&v| scale.mentions(&Atom::Var(v))) || scale.mentions(&Atom::u()) {
        return Err(Error::NotReducible(format!("`{vf}` has a spatial factor in front of its d/dx, d/dy part")));
    }
    let p = xi_x.try_div(&scale)?;
    let q = xi_y.try_div(&scale)?;
    let u = Expr::dep(Dep::U);
    let lin = vf.eta().try_div(&(&scale * &u))?;
    let (x, y) = (Expr::var(IndVar::X), Expr::var(IndVar::Y));
    let m = lin.differentiate(&x)?;
    let n = lin.differentiate(&y)?;
    let outside = |e: &Expr| !is_constant(e);
    if outside(&p) || outside(&q) || outside(&m) || outside(&n) || !(&(&lin - &(&m * &x)) - &(&n * &y)).is_zero() {
        return Err(Error::NotReducible(format!(
            "`{vf}` is not of the form c(t)(p d/dx + q d/dy + (m x + n y) u d/du)"
        )));
    }
    let computed = &(&q * &x) - &(&p * &y);
    let r = match hint {
        Some(h) => {
            let k = if q.is_zero() { h.differentiate(&y)?.try_div(&(-&p))? } else { h.differentiate(&x)?.try_div(&q)? };
            if !k.is_zero() && is_constant(&k) && (h - &(&k * &computed)).is_zero() {
                h.clone()
            } else {
                computed
            }
        }
        None => computed,
    };
    if !vf.apply(&r)?.is_zero() {
        return Err(Error::NotReducible(format!("`{r}` is not invariant")));
    }
    let two = Expr::int(2);
    let (q1, q2, q3) = if !q.is_zero() {
        let q1 = m.try_div(&q)?;
        let q2 = (&n - &(&p * &q1)).try_div(&(&two * &q))?;
        (q1, q2, Expr::zero())
    } else {
        let q1 = n.try_div(&p)?;
        let q3 = m.try_div(&(&two * &p))?;
        (q1, Expr::zero(), q3)
    };
    let map = ReductionMap {
        alpha: r.differentiate(&x)?,
        beta: r.differentiate(&y)?,
        q1,
        q2,
        q3,
    };
    // the multiplier condition p Q_x + q Q_y = m x + n y
    let big_q = map.multiplier_exponent();
    let lhs = &(&p * &big_q.differentiate(&x)?) + &(&q * &big_q.differentiate(&y)?);
    if !(&lhs - &(&(&m * &x) + &(&n * &y))).is_zero() {
        return Err(Error::NotReducible("multiplier condition has no quadratic solution".into()));
    }
    Ok(map)
}

/// A reduced (1+1) equation stored with `z_t` coefficient -1.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedEquation {
    pub map: ReductionMap,
    pub pde: EvolutionPDE,
    /// The `z_t` coefficient of the raw substituted equation.
    pub raw_time_coefficient: Expr,
}

impl ReducedEquation {
    /// The stored form as `lhs = 0` with `z_t` coefficient -1.
    pub fn lhs(&self) -> Expr {
        self.pde.rhs() - &Expr::jet(self.pde.time_jet())
    }

    /// Coefficients of `z`, `z_r`, `z_rr`, `z_t` in `factor * lhs`.
    pub fn coefficients(&self, factor: &Expr) -> Vec<(JetVar, Expr)> {
        let lhs = factor * &self.lhs();
        reduced_jets().into_iter().map(|j| (j, lhs.coefficient_of(&Atom::Jet(j)))).collect()
    }
}

fn reduced_jets() -> Vec<JetVar> {
    ["z", "z_r", "z_rr", "z_t"]
        .iter()
        .map(|s| JetVar::parse(s).expect("valid jet"))
        .collect()
}

/// `D_v` of an expression in x, y, t and z-jets over (t, r), with
/// `r = alpha x + beta y`.
fn chain_derivative(f: &RatFunc, v: IndVar, alpha: &RatFunc, beta: &RatFunc) -> Result<RatFunc> {
    let mut out = f.differentiate(&Atom::Var(v));
    for a in f.atoms() {
        let Atom::Jet(j) = a else { continue };
        let partial = f.differentiate(&Atom::Jet(j));
        let (next, factor) = match v {
            IndVar::T => (j.derive(IndVar::T)?, RatFunc::one()),
            IndVar::X => (j.derive(IndVar::R)?, alpha.clone()),
            IndVar::Y => (j.derive(IndVar::R)?, beta.clone()),
            IndVar::R => unreachable!("r is not an original variable"),
        };
        out = out.add(&partial.mul(&factor).mul(&RatFunc::atom(Atom::Jet(next))));
    }
    Ok(out)
}

/// Substitutes `u = z(t, r) exp(Q)`, divides out `exp(Q)`, rewrites x and y
/// through `r`, and fails if either survives.
pub fn reduce(pde: &EvolutionPDE, map: &ReductionMap) -> Result<ReducedEquation> {
    require_txy(pde.vars(), pde.dep())?;
    let alpha = map.alpha.to_ratfunc()?;
    let beta = map.beta.to_ratfunc()?;
    let big_q = map.multiplier_exponent().to_ratfunc()?;
    let base = RatFunc::atom(Atom::z()).mul(&RatFunc::exp(big_q.clone()));
    let rhs = pde.rhs().to_ratfunc()?;
    let mut substituted = rhs.clone();
    for a in rhs.atoms() {
        let Atom::Jet(j) = a else { continue };
        let mut value = base.clone();
        for v in j.vars() {
            value = chain_derivative(&value, v, &alpha, &beta)?;
        }
        substituted = substituted.substitute(&Atom::Jet(j), &value)?;
    }
    let ut = chain_derivative(&base, IndVar::T, &alpha, &beta)?;
    let raw = substituted.sub(&ut).mul(&RatFunc::exp(big_q.neg()));
    let (x, y) = (Atom::Var(IndVar::X), Atom::Var(IndVar::Y));
    let r = RatFunc::atom(Atom::Var(IndVar::R));
    let eliminated = if !alpha.is_zero() {
        let xv = r.sub(&beta.mul(&RatFunc::atom(y.clone()))).div(&alpha)?;
        raw.substitute(&x, &xv)?
    } else {
        let yv = r.sub(&alpha.mul(&RatFunc::atom(x.clone()))).div(&beta)?;
        raw.substitute(&y, &yv)?
    };
    if eliminated.mentions(&x) || eliminated.mentions(&y) {
        return Err(Error::NotReducible(format!(
            "x or y survives the change of variables: {}",
            Expr::from(eliminated)
        )));
    }
    let zt = Atom::Jet(JetVar::parse("z_t").expect("valid jet"));
    let c = eliminated.differentiate(&zt);
    if c.is_zero() || c.mentions(&Atom::Var(IndVar::R)) || c.atoms().iter().any(|a| matches!(a, Atom::Jet(_))) {
        return Err(Error::NotReducible("reduced equation is not of evolution type".into()));
    }
    let normalized = eliminated.div(&c.neg())?;
    let rhs = normalized.add(&RatFunc::atom(zt));
    let pde = EvolutionPDE::new(vec![IndVar::T, IndVar::R], Dep::Z, rhs.into())?;
    Ok(ReducedEquation { map: map.clone(), pde, raw_time_coefficient: c.into() })
}

/// Substitutes `u = exp(c t / 2) z` for the generator `2 d/dt + c u d/du`
/// and returns the stationary equation for `z`.
pub fn reduce_time(pde: &EvolutionPDE, c: &Expr) -> Result<StationaryEquation> {
    if !pde.is_autonomous() {
        return Err(Error::NonAutonomous(pde.to_string()));
    }
    let mut rhs = pde.rhs().clone();
    for a in pde.rhs().atoms() {
        if let Atom::Jet(j) = a {
            let mut zj = JetVar::base(Dep::Z);
            for v in j.vars() {
                zj = zj.derive(v)?;
            }
            rhs = rhs.substitute(&Expr::jet(j), &Expr::jet(zj))?;
        }
    }
    let lhs = &rhs - &(&(&Expr::rational(1, 2) * c) * &Expr::dep(Dep::Z));
    Ok(StationaryEquation { vars: pde.spatial_vars().to_vec(), dep: Dep::Z, lhs })
}

/// Refuses parameter values where the generators degenerate.
pub fn check_parameters(binding: &ParameterBinding) -> Result<()> {
    if binding.discriminant().is_some_and(|d| num_traits::Zero::is_zero(&d)) {
        return Err(Error::RepeatedRoot);
    }
    binding.require_nonsingular()
}

/// `K1`, `K2`, `K3` of the reductions by the last two generators.
pub fn k_constants() -> Vec<(&'static str, Expr)> {
    let p = Parser::new();
    vec![
        ("K1", p.parse("(R - omega)/(2*(R*V + W))").expect("parses")),
        ("K2", p.parse("S/(R*V + W)").expect("parses")),
        ("K3", p.parse("(R + omega)/(2*(R*V + W))").expect("parses")),
    ]
}

fn parse_with_k(text: &str) -> Expr {
    let p = Parser::new().with_constants(["K1", "K2", "K3"]);
    let subs: Vec<(Atom, Expr)> = k_constants()
        .into_iter()
        .map(|(n, e)| (Atom::Const(n.to_string()), e))
        .collect();
    p.parse(text)
        .and_then(|e| e.substitute_all(&subs))
        .expect("reference text parses")
}

/// Reference form of one reduction: invariant, multiplier exponent, and
/// the reduced equation in reference form (`lhs = 0`, with its own overall factor).
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceReduction {
    pub generator: &'static str,
    pub registry_name: &'static str,
    pub invariant: Expr,
    pub multiplier_exponent: Expr,
    pub equation: Expr,
}

impl ReferenceReduction {
    /// The overall factor carried by the reference form: minus its `z_t` coefficient.
    pub fn factor(&self) -> Expr {
        -&self.equation.coefficient_of(&Atom::Jet(JetVar::parse("z_t").expect("valid jet")))
    }
}

const REFERENCE: &[(&str, &str, &str, &str, &str)] = &[
    (
        "delta3",
        "reduced-3.2",
        "(R + omega)*y + 2*x",
        "0",
        "R*z + 1/2*(R - omega)*r*z_r + 2*(V*(R + omega) + 2*W)*z_rr - z_t",
    ),
    (
        "delta4",
        "reduced-3.5",
        "(-R + omega)*y - 2*x",
        "0",
        "R*z + 1/2*(R + omega)*r*z_r + 2*(V*(R - omega) + 2*W)*z_rr - z_t",
    ),
    (
        "delta5",
        "reduced-3.7",
        "K1*W*y - x",
        "(K1*W*y - x)*R*K1*y - 1/2*R*(K1^2*W + K2)*y^2",
        "R*(r^2*(R - omega) + V*(R + omega) + 2*W)*z + r*(V*(R^2 + R*omega) + W*(3*R - omega))*z_r \
         + (V*W*(R + omega) + 2*W^2)*z_rr - 2*(R*V + W)*z_t",
    ),
    (
        "delta6",
        "reduced-3.9",
        "K3*W*y - x",
        "(K3*W*y - x)*R*K3*y - 1/2*R*(K3^2*W + K2)*y^2",
        "R*(r^2*(R + omega) + V*(R - omega) + 2*W)*z + r*(V*(R^2 - R*omega) + W*(3*R + omega))*z_r \
         + (V*W*(R - omega) + 2*W^2)*z_rr - 2*(R*V + W)*z_t",
    ),
];

pub fn reference_reductions() -> Vec<ReferenceReduction> {
    REFERENCE
        .iter()
        .map(|(g, name, r, q, eq)| ReferenceReduction {
            generator: g,
            registry_name: name,
            invariant: parse_with_k(r),
            multiplier_exponent: parse_with_k(q),
            equation: parse_with_k(eq),
        })
        .collect()
}

pub fn reference_reduction(generator: &str) -> Option<ReferenceReduction> {
    reference_reductions().into_iter().find(|r| r.generator == generator)
}

/// The reference stationary equation obtained with `u = exp(R t / 2) z(x, y)`.
pub fn reference_stationary() -> Expr {
    Parser::new()
        .parse("1/2*R*z - x*z_y + R*x*z_x + S*y*z_x + V*z_xy + W*z_xx")
        .expect("reference text parses")
}

/// One row of a term-by-term comparison against the reference form.
#[derive(Debug, Clone, PartialEq)]
pub struct TermComparison {
    pub term: String,
    pub derived: Expr,
    pub expected: Expr,
    pub agrees: bool,
}

pub fn compare_with_reference(reduced: &ReducedEquation, reference: &ReferenceReduction) -> Vec<TermComparison> {
    let factor = reference.factor();
    reduced
        .coefficients(&factor)
        .into_iter()
        .map(|(j, derived)| {
            let expected = reference.equation.coefficient_of(&Atom::Jet(j));
            let agrees = (&derived - &expected).is_zero();
            TermComparison { term: j.to_string(), derived, expected, agrees }
        })
        .collect()
}

/// Reduces the (t, x, y) equation by one of the reference generators,
/// normalizing the invariant as in the reference table. With a binding, both the
/// equation and the generator are evaluated first.
pub fn reduce_by_generator(
    pde: &EvolutionPDE,
    generator: &str,
    binding: Option<&ParameterBinding>,
) -> Result<(ReducedEquation, ReferenceReduction)> {
    let reference = reference_reduction(generator)
        .ok_or_else(|| Error::NotReducible(format!("no reduction is defined for `{generator}`")))?;
    let fixture = SymmetryFixture::reference();
    let field = fixture
        .get(generator)
        .ok_or_else(|| Error::NotReducible(format!("unknown generator `{generator}`")))?;
    let (pde, field, hint) = match binding {
        Some(b) => {
            check_parameters(b)?;
            (
                pde.with_binding(b)?,
                field.map_coefficients(|c| b.apply(c))?,
                b.apply(&reference.invariant)?,
            )
        }
        None => (pde.clone(), field.clone(), reference.invariant.clone()),
    };
    let map = invariants_for(&field, Some(&hint))?;
    Ok((reduce(&pde, &map)?, reference))
}
