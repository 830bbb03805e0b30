use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use super::atom::{Atom, Dep, IndVar, JetVar, Param};
use super::poly::{q, Monomial, Poly, RatFunc, Q};
use crate::error::{Error, Result};

/// Symbolic expression tree. Values produced by [`Expr::simplify`] (and by the
/// arithmetic operators, which simplify eagerly) are in canonical form:
/// flattened, sorted, fully expanded, coefficient first in every product,
/// at most linear in `omega`, exponentials merged.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Expr {
    Num(Q),
    Atom(Atom),
    Sum(Vec<Expr>),
    Product(Vec<Expr>),
    Pow(Box<Expr>, i64),
    Exp(Box<Expr>),
}

/// Outcome of a symbolic equality test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Truth {
    True,
    False,
    Unknown,
}

impl Expr {
    pub fn zero() -> Expr {
        Expr::Num(Q::zero())
    }

    pub fn one() -> Expr {
        Expr::Num(Q::one())
    }

    pub fn int(n: i64) -> Expr {
        Expr::Num(q(n))
    }

    pub fn rational(n: i64, d: i64) -> Expr {
        Expr::Num(super::poly::q2(n, d))
    }

    pub fn atom(a: Atom) -> Expr {
        Expr::Atom(a)
    }

    pub fn var(v: IndVar) -> Expr {
        Expr::Atom(Atom::Var(v))
    }

    pub fn param(p: Param) -> Expr {
        Expr::Atom(Atom::Param(p))
    }

    pub fn omega() -> Expr {
        Expr::Atom(Atom::Omega)
    }

    pub fn jet(j: JetVar) -> Expr {
        Expr::Atom(Atom::Jet(j))
    }

    pub fn dep(d: Dep) -> Expr {
        Expr::jet(JetVar::base(d))
    }

    pub fn constant(name: &str) -> Expr {
        Expr::Atom(Atom::Const(name.to_string()))
    }

    pub fn exp(arg: Expr) -> Expr {
        RatFunc::exp(arg.to_ratfunc_unchecked()).into()
    }

    pub fn pow(&self, k: i64) -> Result<Expr> {
        Ok(self.to_ratfunc()?.pow(k)?.into())
    }

    pub fn try_div(&self, other: &Expr) -> Result<Expr> {
        Ok(self.to_ratfunc()?.div(&other.to_ratfunc()?)?.into())
    }

    /// Converts the tree into the internal normal form.
    pub fn to_ratfunc(&self) -> Result<RatFunc> {
        Ok(match self {
            Expr::Num(c) => RatFunc::constant(c.clone()),
            Expr::Atom(a) => RatFunc::atom(a.clone()),
            Expr::Sum(terms) => {
                let mut acc = RatFunc::zero();
                for t in terms {
                    acc = acc.add(&t.to_ratfunc()?);
                }
                acc
            }
            Expr::Product(factors) => {
                let mut acc = RatFunc::one();
                for f in factors {
                    acc = acc.mul(&f.to_ratfunc()?);
                }
                acc
            }
            Expr::Pow(base, k) => base.to_ratfunc()?.pow(*k)?,
            Expr::Exp(arg) => RatFunc::exp(arg.to_ratfunc()?),
        })
    }

    /// For trees built by this crate, which are always well-defined.
    pub(crate) fn to_ratfunc_unchecked(&self) -> RatFunc {
        self.to_ratfunc()
            .expect("expression built from canonical parts is well-defined")
    }

    pub fn simplify(&self) -> Result<Expr> {
        Ok(self.to_ratfunc()?.into())
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Expr::Num(c) if c.is_zero())
    }

    pub fn as_rational(&self) -> Option<Q> {
        match self {
            Expr::Num(c) => Some(c.clone()),
            _ => None,
        }
    }

    /// Decides `self == other` by reducing the difference to normal form.
    pub fn equals(&self, other: &Expr) -> Truth {
        match (self.to_ratfunc(), other.to_ratfunc()) {
            (Ok(a), Ok(b)) => {
                let d = a.sub(&b);
                if d.is_zero() {
                    Truth::True
                } else if d.is_exotic() || a.is_exotic() || b.is_exotic() {
                    Truth::Unknown
                } else {
                    Truth::False
                }
            }
            _ => Truth::Unknown,
        }
    }

    /// Partial derivative with respect to an atom expression. All other
    /// atoms are constants, except that `omega` follows `R` and `S` and
    /// undetermined functions of `t` follow `t`.
    pub fn differentiate(&self, var: &Expr) -> Result<Expr> {
        let atom = match var {
            Expr::Atom(a) => a,
            other => return Err(Error::NotAnAtom(other.to_string())),
        };
        Ok(self.to_ratfunc()?.differentiate(atom).into())
    }

    /// Replaces every occurrence of an atom (including jet variables) and
    /// simplifies.
    pub fn substitute(&self, target: &Expr, replacement: &Expr) -> Result<Expr> {
        let atom = match target {
            Expr::Atom(a) => a,
            other => return Err(Error::NotAnAtom(other.to_string())),
        };
        Ok(self
            .to_ratfunc()?
            .substitute(atom, &replacement.to_ratfunc()?)?
            .into())
    }

    pub fn substitute_all(&self, pairs: &[(Atom, Expr)]) -> Result<Expr> {
        let mut f = self.to_ratfunc()?;
        for (a, e) in pairs {
            f = f.substitute(a, &e.to_ratfunc()?)?;
        }
        Ok(f.into())
    }

    pub fn mentions(&self, atom: &Atom) -> bool {
        match self {
            Expr::Num(_) => false,
            Expr::Atom(a) => a == atom,
            Expr::Sum(v) | Expr::Product(v) => v.iter().any(|e| e.mentions(atom)),
            Expr::Pow(b, _) => b.mentions(atom),
            Expr::Exp(a) => a.mentions(atom),
        }
    }

    pub fn atoms(&self) -> std::collections::BTreeSet<Atom> {
        let mut out = std::collections::BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut std::collections::BTreeSet<Atom>) {
        match self {
            Expr::Num(_) => {}
            Expr::Atom(a) => {
                out.insert(a.clone());
            }
            Expr::Sum(v) | Expr::Product(v) => v.iter().for_each(|e| e.collect_atoms(out)),
            Expr::Pow(b, _) => b.collect_atoms(out),
            Expr::Exp(a) => a.collect_atoms(out),
        }
    }

    /// Coefficient of a jet variable in an expression that is linear in it.
    pub fn coefficient_of(&self, atom: &Atom) -> Expr {
        let f = self.to_ratfunc_unchecked();
        f.differentiate(atom)
            .substitute(atom, &RatFunc::zero())
            .expect("substituting zero cannot divide by zero")
            .into()
    }

    fn is_negative_term(&self) -> bool {
        match self {
            Expr::Num(c) => c.is_negative(),
            Expr::Product(f) => matches!(f.first(), Some(Expr::Num(c)) if c.is_negative()),
            _ => false,
        }
    }

    fn negated_term(&self) -> Expr {
        match self {
            Expr::Num(c) => Expr::Num(-c),
            Expr::Product(f) => {
                let mut f = f.clone();
                if let Some(Expr::Num(c)) = f.first() {
                    let c = -c;
                    if c.is_one() {
                        f.remove(0);
                    } else {
                        f[0] = Expr::Num(c);
                    }
                }
                if f.len() == 1 {
                    f.pop().expect("one factor")
                } else {
                    Expr::Product(f)
                }
            }
            other => other.clone(),
        }
    }
}

fn monomial_to_expr(m: &Monomial, c: &Q) -> Expr {
    let mut factors = Vec::new();
    for (a, e) in m.factors() {
        if *e == 1 {
            factors.push(Expr::Atom(a.clone()));
        } else {
            factors.push(Expr::Pow(Box::new(Expr::Atom(a.clone())), *e as i64));
        }
    }
    if let Some(arg) = m.exp_arg() {
        factors.push(Expr::Exp(Box::new(arg.clone().into())));
    }
    if !c.is_one() || factors.is_empty() {
        factors.insert(0, Expr::Num(c.clone()));
    }
    if factors.len() == 1 {
        factors.pop().expect("one factor")
    } else {
        Expr::Product(factors)
    }
}

/// Print order of the terms of a sum: by atoms, higher powers first,
/// constant term last.
fn term_key(m: &Monomial) -> (bool, Vec<(Atom, i32)>, &Monomial) {
    let key = m.factors().iter().map(|(a, e)| (a.clone(), -e)).collect();
    (m.factors().is_empty(), key, m)
}

fn poly_to_expr(p: &Poly) -> Expr {
    let mut terms: Vec<(&Monomial, &Q)> = p.terms().collect();
    terms.sort_by(|a, b| term_key(a.0).cmp(&term_key(b.0)));
    let mut terms: Vec<Expr> = terms.into_iter().map(|(m, c)| monomial_to_expr(m, c)).collect();
    match terms.len() {
        0 => Expr::zero(),
        1 => terms.pop().expect("one term"),
        _ => Expr::Sum(terms),
    }
}

impl From<RatFunc> for Expr {
    fn from(f: RatFunc) -> Expr {
        let num = poly_to_expr(f.numerator());
        if f.denominator().is_empty() {
            return num;
        }
        let mut lead = Vec::new();
        let mut rest = Vec::new();
        match num {
            Expr::Product(v) => {
                for e in v {
                    if matches!(e, Expr::Num(_)) {
                        lead.push(e);
                    } else {
                        rest.push(e);
                    }
                }
            }
            Expr::Num(c) if c.is_one() => {}
            n @ Expr::Num(_) => lead.push(n),
            other => rest.push(other),
        }
        for (p, k) in f.denominator() {
            rest.push(Expr::Pow(Box::new(poly_to_expr(p)), -(*k as i64)));
        }
        lead.extend(rest);
        if lead.len() == 1 {
            lead.pop().expect("one factor")
        } else {
            Expr::Product(lead)
        }
    }
}

impl From<&RatFunc> for Expr {
    fn from(f: &RatFunc) -> Expr {
        f.clone().into()
    }
}

fn binop(a: &Expr, b: &Expr, op: impl Fn(&RatFunc, &RatFunc) -> RatFunc) -> Expr {
    op(&a.to_ratfunc_unchecked(), &b.to_ratfunc_unchecked()).into()
}

impl Add for &Expr {
    type Output = Expr;
    fn add(self, rhs: &Expr) -> Expr {
        binop(self, rhs, RatFunc::add)
    }
}

impl Sub for &Expr {
    type Output = Expr;
    fn sub(self, rhs: &Expr) -> Expr {
        binop(self, rhs, RatFunc::sub)
    }
}

impl Mul for &Expr {
    type Output = Expr;
    fn mul(self, rhs: &Expr) -> Expr {
        binop(self, rhs, RatFunc::mul)
    }
}

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        self.to_ratfunc_unchecked().neg().into()
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr {
                (&self).$m(rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -&self
    }
}

fn fmt_rational(c: &Q) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(c) => write!(f, "{}", fmt_rational(c)),
            Expr::Atom(a) => write!(f, "{a}"),
            Expr::Sum(terms) => {
                for (i, t) in terms.iter().enumerate() {
                    if i == 0 {
                        write!(f, "{t}")?;
                    } else if t.is_negative_term() {
                        write!(f, " - {}", t.negated_term())?;
                    } else {
                        write!(f, " + {t}")?;
                    }
                }
                Ok(())
            }
            Expr::Product(factors) => {
                let mut first = true;
                for (i, x) in factors.iter().enumerate() {
                    if i == 0 {
                        if let Expr::Num(c) = x {
                            if *c == -Q::one() && factors.len() > 1 {
                                write!(f, "-")?;
                                continue;
                            }
                        }
                    }
                    if !first {
                        write!(f, "*")?;
                    }
                    first = false;
                    match x {
                        Expr::Sum(_) => write!(f, "({x})")?,
                        _ => write!(f, "{x}")?,
                    }
                }
                Ok(())
            }
            Expr::Pow(base, k) => match base.as_ref() {
                Expr::Atom(_) | Expr::Exp(_) => write!(f, "{base}^{k}"),
                Expr::Num(c) if c.is_integer() && !c.is_negative() => write!(f, "{base}^{k}"),
                _ => write!(f, "({base})^{k}"),
            },
            Expr::Exp(arg) => write!(f, "exp({arg})"),
        }
    }
}

/// Exact values for evaluation: finite sums `sum_q c_q * e^q` over rational
/// exponents `q`. Distinct `e^q` are linearly independent over the
/// rationals, so equality of such sums is decidable.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ExactValue {
    terms: BTreeMap<Q, Q>,
}

impl ExactValue {
    pub fn rational(c: Q) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Q::zero(), c);
        }
        ExactValue { terms }
    }

    fn exp(q: Q) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(q, Q::one());
        ExactValue { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The value as a plain rational, if it has no exponential part.
    pub fn as_rational(&self) -> Option<Q> {
        match self.terms.len() {
            0 => Some(Q::zero()),
            1 => self.terms.get(&Q::zero()).cloned(),
            _ => None,
        }
    }

    fn add(&self, other: &ExactValue) -> ExactValue {
        let mut terms = self.terms.clone();
        for (k, v) in &other.terms {
            let s = terms.get(k).cloned().unwrap_or_else(Q::zero) + v;
            if s.is_zero() {
                terms.remove(k);
            } else {
                terms.insert(k.clone(), s);
            }
        }
        ExactValue { terms }
    }

    fn mul(&self, other: &ExactValue) -> ExactValue {
        let mut out = ExactValue::default();
        for (k1, v1) in &self.terms {
            for (k2, v2) in &other.terms {
                let mut t = BTreeMap::new();
                t.insert(k1 + k2, v1 * v2);
                out = out.add(&ExactValue { terms: t });
            }
        }
        out
    }

    fn inv(&self) -> Result<ExactValue> {
        match self.terms.len() {
            0 => Err(Error::DivisionByZero),
            1 => {
                let (k, v) = self.terms.iter().next().expect("one term");
                let mut t = BTreeMap::new();
                t.insert(-k, Q::one() / v);
                Ok(ExactValue { terms: t })
            }
            _ => Err(Error::NotEvaluable(
                "division by a sum of exponentials".to_string(),
            )),
        }
    }

    fn pow(&self, k: i64) -> Result<ExactValue> {
        let base = if k < 0 { self.inv()? } else { self.clone() };
        let mut out = ExactValue::rational(Q::one());
        for _ in 0..k.unsigned_abs() {
            out = out.mul(&base);
        }
        Ok(out)
    }
}

/// Evaluates an expression exactly under a complete binding of its atoms.
pub fn evaluate(e: &Expr, binding: &BTreeMap<Atom, Q>) -> Result<ExactValue> {
    Ok(match e {
        Expr::Num(c) => ExactValue::rational(c.clone()),
        Expr::Atom(a) => ExactValue::rational(
            binding
                .get(a)
                .cloned()
                .ok_or_else(|| Error::NotEvaluable(format!("unbound atom {a}")))?,
        ),
        Expr::Sum(v) => {
            let mut acc = ExactValue::default();
            for t in v {
                acc = acc.add(&evaluate(t, binding)?);
            }
            acc
        }
        Expr::Product(v) => {
            let mut acc = ExactValue::rational(Q::one());
            for t in v {
                acc = acc.mul(&evaluate(t, binding)?);
            }
            acc
        }
        Expr::Pow(b, k) => evaluate(b, binding)?.pow(*k)?,
        Expr::Exp(arg) => {
            let a = evaluate(arg, binding)?;
            let q = a
                .as_rational()
                .ok_or_else(|| Error::NotEvaluable(format!("exp({arg})")))?;
            ExactValue::exp(q)
        }
    })
}
