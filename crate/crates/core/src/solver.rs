//! Discovery of point symmetries for linear evolution equations at a
//! rational parameter binding.
//!
//! The ansatz turns the determining system into linear ODEs with constant
//! coefficients for unknown functions of `t`. Their exponents are the
//! eigenvalues of the derivative map on the stabilized solution jet, and
//! each exponent contributes `exp(lambda*t) * polynomial` solutions found
//! by an exact nullspace computation.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::jet::EvolutionPDE;
use crate::kernel::poly::q;
use crate::kernel::{Atom, Expr, IndVar, Monomial, ParameterBinding, RatFunc, Q};
use crate::linalg::{charpoly, nullspace, rank, rational_roots, solve, Matrix};
use crate::prolong::{determining_equations, VectorField};

/// Highest power of `t` multiplying each exponential in trial solutions.
pub const DEFAULT_DEGREE_CAP: usize = 2;

/// How far past the highest derivative order the jet is extended while
/// looking for stabilization.
const STABILIZATION_LIMIT: usize = 8;

/// Shape of the candidate generators: `xi^t = a(t)`, spatial components
/// polynomial of degree `spatial_degree` in the spatial variables, and
/// `eta = u * f` with `f` of degree `multiplier_degree`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ansatz {
    pub spatial_degree: u32,
    pub multiplier_degree: u32,
    pub degree_cap: usize,
}

impl Default for Ansatz {
    fn default() -> Self {
        Ansatz { spatial_degree: 1, multiplier_degree: 2, degree_cap: DEFAULT_DEGREE_CAP }
    }
}

/// Monomials in `vars` of total degree at most `deg`, graded.
fn monomials(vars: &[IndVar], deg: u32) -> Vec<Vec<IndVar>> {
    let mut out: Vec<Vec<IndVar>> = vec![Vec::new()];
    let mut layer: Vec<Vec<IndVar>> = vec![Vec::new()];
    for _ in 0..deg {
        let mut next = Vec::new();
        for m in &layer {
            let start = m.last().map_or(0, |l| vars.iter().position(|v| v == l).expect("known var"));
            for &v in &vars[start..] {
                let mut n = m.clone();
                n.push(v);
                next.push(n);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

fn monomial_name(m: &[IndVar]) -> String {
    if m.is_empty() {
        "1".to_string()
    } else {
        m.iter().map(|v| v.letter()).collect()
    }
}

fn monomial_expr(m: &[IndVar]) -> Expr {
    m.iter().fold(Expr::one(), |acc, v| &acc * &Expr::var(*v))
}

/// An ansatz field over undetermined functions of `t`, and their names.
pub fn ansatz_field(pde: &EvolutionPDE, ansatz: &Ansatz) -> Result<(VectorField, Vec<String>)> {
    let spatial = pde.spatial_vars().to_vec();
    let mut names = vec!["a".to_string()];
    let mut xi = vec![Expr::atom(Atom::func("a", 0))];
    for v in &spatial {
        let mut c = Expr::zero();
        for m in monomials(&spatial, ansatz.spatial_degree) {
            let name = format!("xi{}_{}", v.letter(), monomial_name(&m));
            c = &c + &(&Expr::atom(Atom::func(&name, 0)) * &monomial_expr(&m));
            names.push(name);
        }
        xi.push(c);
    }
    let mut f = Expr::zero();
    for m in monomials(&spatial, ansatz.multiplier_degree) {
        let name = format!("f_{}", monomial_name(&m));
        f = &f + &(&Expr::atom(Atom::func(&name, 0)) * &monomial_expr(&m));
        names.push(name);
    }
    let eta = &f * &Expr::dep(pde.dep());
    Ok((VectorField::new(pde.vars().to_vec(), pde.dep(), xi, eta)?, names))
}

/// A linear form `sum c * f_k^(j)` in the unknown functions.
type LinearForm = BTreeMap<(usize, usize), Q>;

fn linear_forms(pde: &EvolutionPDE, field: &VectorField, names: &[String]) -> Result<Vec<LinearForm>> {
    let system = determining_equations(field, pde)?;
    let index: BTreeMap<&str, usize> = names.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
    let mut forms = Vec::new();
    for eq in &system.equations {
        let f = eq.coefficient.to_ratfunc()?;
        if !f.is_polynomial() {
            return Err(Error::InvalidEquation(format!(
                "determining equation `{}` has a symbolic denominator",
                eq.coefficient
            )));
        }
        let mut form = LinearForm::new();
        for (m, c) in f.numerator().terms() {
            if m.exp_arg().is_some() || m.factors().len() != 1 || m.factors()[0].1 != 1 {
                let culprit = Expr::from(RatFunc::from_poly(crate::kernel::Poly::from_monomial(m.clone(), c.clone())));
                if m.factors().iter().any(|(a, _)| *a == Atom::Var(IndVar::T)) {
                    return Err(Error::NonAutonomous(culprit.to_string()));
                }
                return Err(Error::InvalidEquation(format!(
                    "determining equation term `{culprit}` is not linear with constant coefficients"
                )));
            }
            match &m.factors()[0].0 {
                Atom::Func(func) => {
                    let k = *index
                        .get(func.name.as_str())
                        .ok_or_else(|| Error::InvalidEquation(format!("unknown function {func}")))?;
                    *form.entry((k, func.order as usize)).or_insert_with(Q::zero) += c;
                }
                Atom::Var(IndVar::T) => return Err(Error::NonAutonomous(eq.coefficient.to_string())),
                other => {
                    return Err(Error::InvalidEquation(format!(
                        "determining equation depends on `{other}`; bind all parameters first"
                    )))
                }
            }
        }
        form.retain(|_, c| !c.is_zero());
        if !form.is_empty() {
            forms.push(form);
        }
    }
    Ok(forms)
}

/// The equations and their derivatives whose order stays within `n`, as
/// rows over the jet coordinates `(k, j)` for `j <= n`.
fn prolonged_rows(forms: &[LinearForm], unknowns: usize, n: usize) -> Matrix<Q> {
    let width = unknowns * (n + 1);
    let mut rows = Vec::new();
    for form in forms {
        let top = form.keys().map(|(_, j)| *j).max().unwrap_or(0);
        if top > n {
            continue;
        }
        for s in 0..=(n - top) {
            let mut row = vec![Q::zero(); width];
            for ((k, j), c) in form {
                row[k * (n + 1) + j + s] = c.clone();
            }
            rows.push(row);
        }
    }
    rows
}

/// The solution jet at order `n` and the derivative map acting on it.
struct StableJet {
    dimension: usize,
    derivative: Matrix<Q>,
}

fn stabilize(forms: &[LinearForm], unknowns: usize) -> Result<StableJet> {
    let top = forms
        .iter()
        .flat_map(|f| f.keys().map(|(_, j)| *j))
        .max()
        .unwrap_or(0);
    for n in top..=top + STABILIZATION_LIMIT {
        let (w0, w1) = (unknowns * (n + 1), unknowns * (n + 2));
        let low = |k: usize, j: usize| k * (n + 1) + j;
        let high = |k: usize, j: usize| k * (n + 2) + j;
        let e0 = prolonged_rows(forms, unknowns, n);
        let e1 = prolonged_rows(forms, unknowns, n + 1);
        let basis = nullspace(&e0, w0);
        let d1 = w1 - rank(&e1, w1);
        if d1 != basis.len() {
            continue;
        }
        // projection L_{n+1} -> L_n must be injective
        let mut kernel_rows = e1.clone();
        for k in 0..unknowns {
            for j in 0..=n {
                let mut r = vec![Q::zero(); w1];
                r[high(k, j)] = Q::one();
                kernel_rows.push(r);
            }
        }
        if rank(&kernel_rows, w1) != w1 {
            continue;
        }
        // derivative map: lift each basis vector, shift, re-express
        let projection: Matrix<Q> = kernel_rows[e1.len()..].to_vec();
        let mut system = e1.clone();
        system.extend(projection);
        let transposed: Matrix<Q> = (0..w0)
            .map(|c| basis.iter().map(|b| b[c].clone()).collect())
            .collect();
        let mut columns = Vec::with_capacity(basis.len());
        let mut consistent = true;
        for b in &basis {
            let mut rhs = vec![Q::zero(); e1.len()];
            for k in 0..unknowns {
                for j in 0..=n {
                    rhs.push(b[low(k, j)].clone());
                }
            }
            let Some(lift) = solve(&system, &rhs, w1) else {
                consistent = false;
                break;
            };
            let mut shifted = vec![Q::zero(); w0];
            for k in 0..unknowns {
                for j in 0..=n {
                    shifted[low(k, j)] = lift[high(k, j + 1)].clone();
                }
            }
            match solve(&transposed, &shifted, basis.len()) {
                Some(coords) => columns.push(coords),
                None => {
                    consistent = false;
                    break;
                }
            }
        }
        if !consistent {
            continue;
        }
        let d = basis.len();
        let derivative: Matrix<Q> = (0..d).map(|i| (0..d).map(|j| columns[j][i].clone()).collect()).collect();
        return Ok(StableJet { dimension: d, derivative });
    }
    Err(Error::NotStabilized(format!(
        "solution jet did not stabilize within {STABILIZATION_LIMIT} extra orders"
    )))
}

fn render_poly(coeffs: &[Q]) -> String {
    let terms: Vec<String> = coeffs
        .iter()
        .enumerate()
        .rev()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| match i {
            0 => format!("{c}"),
            1 => format!("{c}*x"),
            _ => format!("{c}*x^{i}"),
        })
        .collect();
    terms.join(" + ")
}

/// Matrix of `(D + lambda)` on coefficient vectors of polynomials of
/// degree at most `cap`.
fn shifted_derivative(lambda: &Q, cap: usize) -> Matrix<Q> {
    let n = cap + 1;
    let mut m = vec![vec![Q::zero(); n]; n];
    for e in 0..n {
        m[e][e] = lambda.clone();
        if e + 1 < n {
            m[e][e + 1] = q(e as i64 + 1);
        }
    }
    m
}

/// Solutions `exp(lambda*t) * p_k(t)` with `deg p_k <= cap`, as
/// coefficient vectors indexed `k * (cap + 1) + degree`.
fn trial_solutions(forms: &[LinearForm], unknowns: usize, lambda: &Q, cap: usize) -> Vec<Vec<Q>> {
    let n = cap + 1;
    let step = shifted_derivative(lambda, cap);
    let top = forms.iter().flat_map(|f| f.keys().map(|(_, j)| *j)).max().unwrap_or(0);
    let mut powers: Vec<Matrix<Q>> = vec![(0..n)
        .map(|i| (0..n).map(|j| if i == j { Q::one() } else { Q::zero() }).collect())
        .collect()];
    for _ in 0..top {
        let next = crate::linalg::matmul(&step, powers.last().expect("nonempty"));
        powers.push(next);
    }
    let width = unknowns * n;
    let mut rows = Vec::new();
    for form in forms {
        for e in 0..n {
            let mut row = vec![Q::zero(); width];
            for ((k, j), c) in form {
                for d in 0..n {
                    let m = &powers[*j][e][d];
                    if !m.is_zero() {
                        row[k * n + d] += c * m;
                    }
                }
            }
            if row.iter().any(|x| !x.is_zero()) {
                rows.push(row);
            }
        }
    }
    nullspace(&rows, width)
}

/// Scales to a primitive integer vector whose first nonzero entry is positive.
fn primitive(v: &[Q]) -> Vec<Q> {
    let lcm = v.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = v.iter().map(|c| (c * Q::from_integer(lcm.clone())).to_integer()).collect();
    let mut g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    if let Some(first) = ints.iter().find(|c| !c.is_zero()) {
        if first.is_negative() {
            g = -g;
        }
    }
    if g.is_zero() {
        return v.to_vec();
    }
    ints.into_iter().map(|c| Q::new(c, g.clone())).collect()
}

/// An exponent found in the solution space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Exponent {
    pub value: Q,
    pub multiplicity: usize,
    pub solutions: usize,
}

#[derive(Debug, Clone)]
pub struct SymmetryBasis {
    pub equation: EvolutionPDE,
    pub binding: ParameterBinding,
    pub generators: Vec<VectorField>,
    pub residual_checks: Vec<bool>,
    /// Dimension of the stabilized solution jet of the determining system;
    /// equals `generators.len()` when the degree cap is large enough.
    pub jet_dimension: usize,
    pub exponents: Vec<Exponent>,
    pub characteristic_polynomial: String,
}

impl SymmetryBasis {
    pub fn dimension(&self) -> usize {
        self.generators.len()
    }
}

/// Finds the finite point symmetries within the ansatz at a rational binding.
pub fn solve_determining(pde: &EvolutionPDE, ansatz: &Ansatz, binding: &ParameterBinding) -> Result<SymmetryBasis> {
    let has_params = pde.rhs().atoms().iter().any(Atom::is_parameter_like);
    if has_params {
        binding.require_discovery()?;
    }
    let bound = if binding.is_empty() { pde.clone() } else { pde.with_binding(binding)? };
    if !bound.is_autonomous() {
        return Err(Error::NonAutonomous(bound.to_string()));
    }
    let (field, names) = ansatz_field(&bound, ansatz)?;
    let forms = linear_forms(&bound, &field, &names)?;
    let unknowns = names.len();
    let jet = stabilize(&forms, unknowns)?;
    let poly = charpoly(&jet.derivative);
    let (roots, rest) = rational_roots(&poly);
    if rest.len() > 1 {
        return Err(Error::IrrationalEigenvalue(render_poly(&rest)));
    }
    let cap = ansatz.degree_cap;
    let per_root: Vec<(Q, usize, Vec<Vec<Q>>)> = roots
        .par_iter()
        .map(|(lambda, mult)| (lambda.clone(), *mult, trial_solutions(&forms, unknowns, lambda, cap)))
        .collect();
    let t = Expr::var(IndVar::T);
    let mut generators = Vec::new();
    let mut exponents = Vec::new();
    for (lambda, mult, sols) in per_root {
        exponents.push(Exponent { value: lambda.clone(), multiplicity: mult, solutions: sols.len() });
        let e = Expr::exp(&Expr::Num(lambda.clone()) * &t);
        for sol in sols {
            let sol = primitive(&sol);
            let mut subs = Vec::with_capacity(unknowns);
            for (k, name) in names.iter().enumerate() {
                let mut p = Expr::zero();
                for d in 0..=cap {
                    let c = &sol[k * (cap + 1) + d];
                    if !c.is_zero() {
                        p = &p + &(&Expr::Num(c.clone()) * &t.pow(d as i64)?);
                    }
                }
                subs.push((Atom::func(name, 0), &e * &p));
            }
            generators.push(field.map_coefficients(|c| c.substitute_all(&subs))?);
        }
    }
    let residual_checks: Vec<bool> = generators
        .par_iter()
        .map(|g| g.residual(&bound).map(|r| r.is_zero()).unwrap_or(false))
        .collect();
    Ok(SymmetryBasis {
        equation: bound,
        binding: binding.clone(),
        generators,
        residual_checks,
        jet_dimension: jet.dimension,
        exponents,
        characteristic_polynomial: render_poly(&poly),
    })
}

/// Rows of rational coefficients of each field over a shared basis of
/// (component, monomial) pairs. Fails if a coefficient is not rational.
pub fn coefficient_matrix(fields: &[VectorField]) -> Result<Matrix<Q>> {
    let rows: Vec<Vec<Expr>> = fields
        .iter()
        .map(|f| f.components().into_iter().map(|(_, c)| c).collect())
        .collect();
    expression_matrix(&rows)
}

fn expression_matrix(rows: &[Vec<Expr>]) -> Result<Matrix<Q>> {
    let mut keyed: Vec<BTreeMap<(usize, Monomial), Q>> = Vec::new();
    for components in rows {
        let mut row = BTreeMap::new();
        for (i, c) in components.iter().enumerate() {
            let r = c.to_ratfunc()?;
            if !r.is_polynomial() {
                return Err(Error::InvalidField(format!("coefficient `{c}` has a symbolic denominator")));
            }
            for (m, v) in r.numerator().terms() {
                if m.factors().iter().any(|(a, _)| a.is_parameter_like()) {
                    return Err(Error::InvalidField(format!("coefficient `{c}` is not numeric")));
                }
                row.insert((i, m.clone()), v.clone());
            }
        }
        keyed.push(row);
    }
    let mut keys: Vec<(usize, Monomial)> = keyed.iter().flat_map(|r| r.keys().cloned()).collect();
    keys.sort();
    keys.dedup();
    Ok(keyed
        .iter()
        .map(|r| keys.iter().map(|k| r.get(k).cloned().unwrap_or_else(Q::zero)).collect())
        .collect())
}

/// Rank of the fields as vectors over the constants.
pub fn span_rank(fields: &[VectorField]) -> Result<usize> {
    let m = coefficient_matrix(fields)?;
    let width = m.first().map_or(0, Vec::len);
    Ok(rank(&m, width))
}

/// Per-generator shape of a symmetry of a (1+1) evolution equation:
/// `xi^t = a(t)`, `xi^r = b(t) + a'(t) r / 2`, `eta = f z` with `f(t, 0)`
/// the `r`-free part.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorProfile {
    pub a: Expr,
    pub b: Expr,
    pub f: Expr,
    pub time_only_a: bool,
    pub b_free_of_r: bool,
    pub linear_in_dep: bool,
}

impl GeneratorProfile {
    pub fn matches(&self) -> bool {
        self.time_only_a && self.b_free_of_r && self.linear_in_dep
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymmetryProfile {
    pub generators: Vec<GeneratorProfile>,
    /// Dimensions of the spans of `a`, of `b` where `a = 0`, and of `f`
    /// where `a = b = 0`: the orders of the linear ODEs they satisfy.
    pub a_order: usize,
    pub b_order: usize,
    pub f_order: usize,
    pub with_time: usize,
    pub without_time: usize,
}

fn function_rank(fs: &[Expr]) -> Result<usize> {
    let rows: Vec<Vec<Expr>> = fs.iter().map(|f| vec![f.clone()]).collect();
    let m = expression_matrix(&rows)?;
    let width = m.first().map_or(0, Vec::len);
    Ok(rank(&m, width))
}

pub fn profile_generator(g: &VectorField) -> Result<GeneratorProfile> {
    if g.vars().len() != 2 {
        return Err(Error::InvalidField("profiles need exactly one spatial variable".into()));
    }
    let t = IndVar::T;
    let s = g.vars()[1];
    let dep = Atom::Jet(crate::kernel::JetVar::base(g.dep()));
    let a = g.xi_of(t);
    let time_only_a = a.atoms().iter().all(|x| !matches!(x, Atom::Var(v) if *v != t) && *x != dep);
    let da = a.differentiate(&Expr::var(t))?;
    let svar = Expr::var(s);
    let b = &g.xi_of(s) - &(&(&Expr::rational(1, 2) * &da) * &svar);
    let b_free_of_r = !b.mentions(&Atom::Var(s)) && !b.mentions(&dep);
    let depx = Expr::atom(dep.clone());
    let eta = g.eta();
    let ratio = eta.try_div(&depx).unwrap_or_else(|_| Expr::zero());
    let linear_in_dep = !ratio.mentions(&dep) && (&(&ratio * &depx) - eta).is_zero();
    let f = ratio.substitute(&svar, &Expr::zero())?;
    Ok(GeneratorProfile { a, b, f, time_only_a, b_free_of_r, linear_in_dep })
}

/// Profiles every generator and counts the orders of the `a`, `b`, `f`
/// equations.
pub fn profile_basis(basis: &[VectorField]) -> Result<SymmetryProfile> {
    let generators: Vec<GeneratorProfile> = basis.iter().map(profile_generator).collect::<Result<_>>()?;
    let a: Vec<Expr> = generators.iter().map(|g| g.a.clone()).collect();
    let b: Vec<Expr> = generators.iter().filter(|g| g.a.is_zero()).map(|g| g.b.clone()).collect();
    let f: Vec<Expr> = generators
        .iter()
        .filter(|g| g.a.is_zero() && g.b.is_zero())
        .map(|g| g.f.clone())
        .collect();
    let with_time = generators.iter().filter(|g| !g.a.is_zero()).count();
    Ok(SymmetryProfile {
        a_order: function_rank(&a)?,
        b_order: function_rank(&b)?,
        f_order: function_rank(&f)?,
        with_time,
        without_time: generators.len() - with_time,
        generators,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::{make_heat, make_hpz};
    use crate::kernel::{Dep, Parser};
    use crate::prolong::SymmetryFixture;

    #[test]
    fn monomial_lists() {
        let m = monomials(&[IndVar::X, IndVar::Y], 2);
        let names: Vec<String> = m.iter().map(|x| monomial_name(x)).collect();
        assert_eq!(names, vec!["1", "x", "y", "xx", "xy", "yy"]);
    }

    #[test]
    fn heat_has_six() {
        let b = solve_determining(&make_heat(), &Ansatz::default(), &ParameterBinding::default()).unwrap();
        assert_eq!(b.dimension(), 6);
        assert_eq!(b.jet_dimension, 6);
        assert!(b.residual_checks.iter().all(|&c| c));
        let p = profile_basis(&b.generators).unwrap();
        assert!(p.generators.iter().all(GeneratorProfile::matches));
        assert_eq!((p.a_order, p.b_order, p.f_order), (3, 2, 1));
    }

    #[test]
    fn hpz_has_six_spanning_the_fixture() {
        let binding = ParameterBinding::full(5, 4, 1, 1).unwrap();
        let b = solve_determining(&make_hpz(), &Ansatz::default(), &binding).unwrap();
        assert_eq!(b.dimension(), 6);
        assert!(b.residual_checks.iter().all(|&c| c));
        let values: Vec<Q> = b.exponents.iter().map(|e| e.value.clone()).collect();
        for l in [-4, -1, 0, 1, 4] {
            assert!(values.contains(&q(l)), "{l}");
        }
        let reference: Vec<VectorField> = SymmetryFixture::reference()
            .fields()
            .iter()
            .map(|f| f.map_coefficients(|c| binding.apply(c)).unwrap())
            .collect();
        let mut stacked = b.generators.clone();
        stacked.extend(reference.iter().cloned());
        assert_eq!(span_rank(&reference).unwrap(), 6);
        assert_eq!(span_rank(&stacked).unwrap(), 6);
    }

    #[test]
    fn irrational_binding_is_rejected() {
        let binding: ParameterBinding = "R=3,S=1,V=1,W=1".parse().unwrap();
        assert!(matches!(
            solve_determining(&make_hpz(), &Ansatz::default(), &binding),
            Err(Error::InvalidBinding(_))
        ));
    }

    #[test]
    fn non_autonomous_is_rejected() {
        let pde = EvolutionPDE::new(
            vec![IndVar::T, IndVar::X],
            Dep::U,
            Parser::new().parse("u_xx + t*u").unwrap(),
        )
        .unwrap();
        assert!(matches!(
            solve_determining(&pde, &Ansatz::default(), &ParameterBinding::default()),
            Err(Error::NonAutonomous(_))
        ));
    }

    #[test]
    fn small_cap_returns_subspace() {
        let ansatz = Ansatz { degree_cap: 1, ..Ansatz::default() };
        let b = solve_determining(&make_heat(), &ansatz, &ParameterBinding::default()).unwrap();
        assert_eq!(b.jet_dimension, 6);
        assert_eq!(b.dimension(), 5);
    }

    #[test]
    fn profile_examples() {
        let p = Parser::new();
        let f = |s: &str| VectorField::parse(s, &[IndVar::T, IndVar::R], Dep::Z, &p).unwrap();
        let dt = profile_generator(&f("xi_t=1")).unwrap();
        assert!(dt.matches());
        assert_eq!((dt.a.clone(), dt.b.clone(), dt.f.clone()), (Expr::one(), Expr::zero(), Expr::zero()));
        let sc = profile_generator(&f("eta=z")).unwrap();
        assert!(sc.matches());
        assert_eq!(sc.f, Expr::one());
        let bad = profile_generator(&f("xi_t=r")).unwrap();
        assert!(!bad.matches());
    }
}
