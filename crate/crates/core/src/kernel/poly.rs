//! Normal form used behind [`Expr`](super::Expr): expanded Laurent polynomials
//! with exponential factors, over a product of normalized denominator factors.
//!
//! Invariants maintained by every constructor:
//! * no zero coefficients, no zero exponents;
//! * `omega` occurs with exponent 0 or 1 only (`omega^2` is rewritten to `R^2 - 4*S`);
//! * `exp(a) * exp(b)` is merged into `exp(a + b)`, `exp(0)` is dropped;
//! * denominator factors are free of `omega`, have at least two terms, carry no
//!   monomial content and have leading coefficient 1, and do not divide the
//!   numerator.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::atom::{Atom, IndVar, Param};
use crate::error::{Error, Result};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q2(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial {
    factors: Vec<(Atom, i32)>,
    exp: Option<Box<RatFunc>>,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn atom(atom: Atom, e: i32) -> Self {
        if e == 0 {
            return Monomial::one();
        }
        Monomial {
            factors: vec![(atom, e)],
            exp: None,
        }
    }

    pub fn exp_of(arg: RatFunc) -> Self {
        if arg.is_zero() {
            return Monomial::one();
        }
        Monomial {
            factors: Vec::new(),
            exp: Some(Box::new(arg)),
        }
    }

    pub fn factors(&self) -> &[(Atom, i32)] {
        &self.factors
    }

    pub fn exp_arg(&self) -> Option<&RatFunc> {
        self.exp.as_deref()
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty() && self.exp.is_none()
    }

    pub fn exponent(&self, atom: &Atom) -> i32 {
        self.factors
            .iter()
            .find(|(a, _)| a == atom)
            .map_or(0, |(_, e)| *e)
    }

    pub fn has_omega(&self) -> bool {
        self.exponent(&Atom::Omega) != 0
    }

    /// Product of two monomials. The flag reports an `omega^2` that the caller
    /// must expand.
    fn mul(&self, other: &Monomial) -> (Monomial, bool) {
        let mut factors = Vec::with_capacity(self.factors.len() + other.factors.len());
        let (mut i, mut j) = (0, 0);
        while i < self.factors.len() || j < other.factors.len() {
            let take_left = match (self.factors.get(i), other.factors.get(j)) {
                (Some(a), Some(b)) => {
                    if a.0 == b.0 {
                        let e = a.1 + b.1;
                        if e != 0 {
                            factors.push((a.0.clone(), e));
                        }
                        i += 1;
                        j += 1;
                        continue;
                    }
                    a.0 < b.0
                }
                (Some(_), None) => true,
                _ => false,
            };
            if take_left {
                factors.push(self.factors[i].clone());
                i += 1;
            } else {
                factors.push(other.factors[j].clone());
                j += 1;
            }
        }
        let mut omega_sq = false;
        if let Some(pos) = factors.iter().position(|(a, _)| *a == Atom::Omega) {
            let e = factors[pos].1;
            debug_assert!(e == 1 || e == 2, "omega exponent {e}");
            if e == 2 {
                factors.remove(pos);
                omega_sq = true;
            }
        }
        let exp = match (&self.exp, &other.exp) {
            (None, None) => None,
            (Some(a), None) | (None, Some(a)) => Some(a.clone()),
            (Some(a), Some(b)) => {
                let s = a.add(b);
                if s.is_zero() {
                    None
                } else {
                    Some(Box::new(s))
                }
            }
        };
        (Monomial { factors, exp }, omega_sq)
    }

    /// Inverse for monomials without `omega`.
    fn inverse(&self) -> Monomial {
        debug_assert!(!self.has_omega());
        Monomial {
            factors: self.factors.iter().map(|(a, e)| (a.clone(), -e)).collect(),
            exp: self.exp.as_ref().map(|a| Box::new(a.neg())),
        }
    }

    fn without_exp(&self) -> Monomial {
        Monomial {
            factors: self.factors.clone(),
            exp: None,
        }
    }

    fn without_omega(&self) -> Monomial {
        Monomial {
            factors: self
                .factors
                .iter()
                .filter(|(a, _)| *a != Atom::Omega)
                .cloned()
                .collect(),
            exp: self.exp.clone(),
        }
    }

    fn collect_atoms(&self, out: &mut BTreeSet<Atom>) {
        for (a, _) in &self.factors {
            out.insert(a.clone());
        }
        if let Some(arg) = &self.exp {
            arg.collect_atoms(out);
        }
    }
}

fn rho() -> Poly {
    let r2 = Poly::from_monomial(Monomial::atom(Atom::Param(Param::R), 2), q(1));
    let s = Poly::from_monomial(Monomial::atom(Atom::Param(Param::S), 1), q(-4));
    r2.add(&s)
}

/// Expanded sum of `coefficient * monomial` terms.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, Q>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::constant(q(1))
    }

    pub fn constant(c: Q) -> Self {
        Poly::from_monomial(Monomial::one(), c)
    }

    pub fn from_monomial(m: Monomial, c: Q) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    /// `atom^e` for `e >= 0`, with `omega` powers reduced.
    pub fn atom_pow(atom: Atom, e: u32) -> Self {
        if atom == Atom::Omega {
            let mut p = rho().pow(e / 2);
            if e % 2 == 1 {
                p = p.mul(&Poly::from_monomial(Monomial::atom(Atom::Omega, 1), q(1)));
            }
            return p;
        }
        Poly::from_monomial(Monomial::atom(atom, e as i32), q(1))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Q)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_constant(&self) -> Option<Q> {
        match self.terms.len() {
            0 => Some(Q::zero()),
            1 => {
                let (m, c) = self.terms.iter().next()?;
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    fn add_term(&mut self, m: Monomial, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get() + &c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let (mut big, small) = if self.len() >= other.len() {
            (self.clone(), other)
        } else {
            (other.clone(), self)
        };
        for (m, c) in &small.terms {
            big.add_term(m.clone(), c.clone());
        }
        big
    }

    pub fn neg(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: &Q) -> Poly {
        if k.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c * k))
                .collect(),
        }
    }

    fn mul_term(&self, m: &Monomial, c: &Q) -> Poly {
        let mut out = Poly::zero();
        for (m2, c2) in &self.terms {
            let (prod, omega_sq) = m2.mul(m);
            let coeff = c2 * c;
            if omega_sq {
                let (r2, _) = prod.mul(&Monomial::atom(Atom::Param(Param::R), 2));
                let (s1, _) = prod.mul(&Monomial::atom(Atom::Param(Param::S), 1));
                out.add_term(r2, coeff.clone());
                out.add_term(s1, coeff * q(-4));
            } else {
                out.add_term(prod, coeff);
            }
        }
        out
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let (long, short) = if self.len() >= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut out = Poly::zero();
        for (m, c) in &short.terms {
            let part = long.mul_term(m, c);
            if out.is_zero() {
                out = part;
            } else {
                for (m2, c2) in part.terms {
                    out.add_term(m2, c2);
                }
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut result = Poly::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Splits `self = a + b*omega` with `a`, `b` free of `omega`.
    pub fn omega_split(&self) -> (Poly, Poly) {
        let mut a = Poly::zero();
        let mut b = Poly::zero();
        for (m, c) in &self.terms {
            if m.has_omega() {
                b.add_term(m.without_omega(), c.clone());
            } else {
                a.add_term(m.clone(), c.clone());
            }
        }
        (a, b)
    }

    pub fn has_exp(&self) -> bool {
        self.terms.keys().any(|m| m.exp.is_some())
    }

    pub fn collect_atoms(&self, out: &mut BTreeSet<Atom>) {
        for m in self.terms.keys() {
            m.collect_atoms(out);
        }
    }

    /// Smallest exponent of every atom across all terms (the Laurent content),
    /// plus a shared exponential factor if every term has the same one.
    fn monomial_content(&self) -> Monomial {
        let mut atoms: BTreeSet<Atom> = BTreeSet::new();
        for m in self.terms.keys() {
            for (a, _) in &m.factors {
                atoms.insert(a.clone());
            }
        }
        let mut factors = Vec::new();
        for a in atoms {
            let min = self
                .terms
                .keys()
                .map(|m| m.exponent(&a))
                .min()
                .unwrap_or(0);
            if min != 0 {
                factors.push((a, min));
            }
        }
        let mut exps = self.terms.keys().map(|m| &m.exp);
        let exp = match exps.next() {
            Some(Some(first)) if exps.all(|e| e.as_ref() == Some(first)) => Some(first.clone()),
            _ => None,
        };
        Monomial { factors, exp }
    }

    fn div_monomial(&self, m: &Monomial) -> Poly {
        let inv = m.inverse();
        self.mul_term(&inv, &q(1))
    }

    /// Exact quotient `self / p` when `p` divides `self`, for `p` free of
    /// `omega` and exponentials.
    fn exact_div(&self, p: &Poly) -> Option<Poly> {
        if p.has_exp() || p.terms.keys().any(|m| m.has_omega()) {
            return None;
        }
        let mut groups: BTreeMap<(Option<Box<RatFunc>>, bool), Poly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let key = (m.exp.clone(), m.has_omega());
            let bare = m.without_exp().without_omega();
            groups.entry(key).or_default().add_term(bare, c.clone());
        }
        let mut quotient = Poly::zero();
        for ((exp, omega), group) in groups {
            let content = group.monomial_content();
            let shifted = group.div_monomial(&content);
            let qpart = dense_exact_div(&shifted, p)?;
            let mut restore = content;
            restore.exp = exp;
            let mut part = qpart.mul_term(&restore, &q(1));
            if omega {
                part = part.mul(&Poly::atom_pow(Atom::Omega, 1));
            }
            quotient = quotient.add(&part);
        }
        Some(quotient)
    }

    /// Partial derivative with respect to `atom`. Exponential arguments may
    /// carry denominators, so the result is a rational function.
    pub fn differentiate(&self, atom: &Atom) -> RatFunc {
        let mut plain = Poly::zero();
        let mut extra = RatFunc::zero();
        for (m, c) in &self.terms {
            for (f, e) in &m.factors {
                match atom_derivative(f, atom) {
                    AtomDerivative::Zero => {}
                    AtomDerivative::One => {
                        let (reduced, _) = m.mul(&Monomial::atom(f.clone(), -1));
                        plain.add_term(reduced, c * q(*e as i64));
                    }
                    AtomDerivative::Atom(g) => {
                        let (reduced, _) = m.mul(&Monomial::atom(f.clone(), -1));
                        let (shifted, _) = reduced.mul(&Monomial::atom(g, 1));
                        plain.add_term(shifted, c * q(*e as i64));
                    }
                    AtomDerivative::Expr(d) => {
                        let (reduced, _) = m.mul(&Monomial::atom(f.clone(), -1));
                        let base = RatFunc::from_poly(Poly::from_monomial(reduced, c * q(*e as i64)));
                        extra = extra.add(&base.mul(&d));
                    }
                }
            }
            if let Some(arg) = &m.exp {
                let darg = arg.differentiate(atom);
                if !darg.is_zero() {
                    let base = RatFunc::from_poly(Poly::from_monomial(m.clone(), c.clone()));
                    extra = extra.add(&base.mul(&darg));
                }
            }
        }
        RatFunc::from_poly(plain).add(&extra)
    }

    pub fn substitute(&self, target: &Atom, replacement: &RatFunc) -> Result<RatFunc> {
        let mut out = RatFunc::zero();
        let mut untouched = Poly::zero();
        for (m, c) in &self.terms {
            let touches = m.factors.iter().any(|(a, _)| a == target)
                || m.exp.as_ref().is_some_and(|arg| arg.mentions(target));
            if !touches {
                untouched.add_term(m.clone(), c.clone());
                continue;
            }
            let mut term = RatFunc::constant(c.clone());
            for (a, e) in &m.factors {
                let factor = if a == target {
                    replacement.pow(*e as i64)?
                } else {
                    RatFunc::atom_pow(a.clone(), *e)?
                };
                term = term.mul(&factor);
            }
            if let Some(arg) = &m.exp {
                let new_arg = arg.substitute(target, replacement)?;
                term = term.mul(&RatFunc::exp(new_arg));
            }
            out = out.add(&term);
        }
        Ok(out.add(&RatFunc::from_poly(untouched)))
    }

    pub(crate) fn mentions(&self, atom: &Atom) -> bool {
        self.terms.keys().any(|m| {
            m.factors.iter().any(|(a, _)| a == atom)
                || m.exp.as_ref().is_some_and(|arg| arg.mentions(atom))
        })
    }
}

enum AtomDerivative {
    Zero,
    One,
    Atom(Atom),
    Expr(RatFunc),
}

fn atom_derivative(f: &Atom, by: &Atom) -> AtomDerivative {
    if f == by {
        return AtomDerivative::One;
    }
    match (f, by) {
        (Atom::Func(func), Atom::Var(IndVar::T)) => AtomDerivative::Atom(Atom::func(&func.name, func.order + 1)),
        // omega = sqrt(R^2 - 4S): d/dR = R/omega, d/dS = -2/omega.
        (Atom::Omega, Atom::Param(Param::R)) => {
            let r = RatFunc::atom(Atom::Param(Param::R));
            let inv = RatFunc::atom(Atom::Omega).inv().expect("omega is nonzero");
            AtomDerivative::Expr(r.mul(&inv))
        }
        (Atom::Omega, Atom::Param(Param::S)) => {
            let inv = RatFunc::atom(Atom::Omega).inv().expect("omega is nonzero");
            AtomDerivative::Expr(inv.mul(&RatFunc::constant(q(-2))))
        }
        _ => AtomDerivative::Zero,
    }
}

/// Exact division in the ordinary polynomial ring (nonnegative exponents,
/// no `omega`, no exponentials) using lex order on dense exponent vectors.
fn dense_exact_div(num: &Poly, den: &Poly) -> Option<Poly> {
    let mut atoms: BTreeSet<Atom> = BTreeSet::new();
    num.collect_atoms(&mut atoms);
    den.collect_atoms(&mut atoms);
    let atoms: Vec<Atom> = atoms.into_iter().collect();
    let to_dense = |p: &Poly| -> Option<BTreeMap<Vec<i32>, Q>> {
        let mut out = BTreeMap::new();
        for (m, c) in &p.terms {
            if m.exp.is_some() {
                return None;
            }
            let v: Vec<i32> = atoms.iter().map(|a| m.exponent(a)).collect();
            if v.iter().any(|&e| e < 0) {
                return None;
            }
            out.insert(v, c.clone());
        }
        Some(out)
    };
    let mut rem = to_dense(num)?;
    let d = to_dense(den)?;
    let (lead_e, lead_c) = d.iter().next_back().map(|(e, c)| (e.clone(), c.clone()))?;
    let mut quot: BTreeMap<Vec<i32>, Q> = BTreeMap::new();
    while let Some((e, c)) = rem.iter().next_back().map(|(e, c)| (e.clone(), c.clone())) {
        if e.iter().zip(&lead_e).any(|(a, b)| a < b) {
            return None;
        }
        let qe: Vec<i32> = e.iter().zip(&lead_e).map(|(a, b)| a - b).collect();
        let qc = &c / &lead_c;
        for (de, dc) in &d {
            let key: Vec<i32> = de.iter().zip(&qe).map(|(a, b)| a + b).collect();
            let val = rem.get(&key).cloned().unwrap_or_else(Q::zero) - dc * &qc;
            if val.is_zero() {
                rem.remove(&key);
            } else {
                rem.insert(key, val);
            }
        }
        quot.insert(qe, qc);
    }
    let mut out = Poly::zero();
    for (e, c) in quot {
        let factors: Vec<(Atom, i32)> = atoms
            .iter()
            .zip(&e)
            .filter(|(_, &k)| k != 0)
            .map(|(a, &k)| (a.clone(), k))
            .collect();
        out.add_term(Monomial { factors, exp: None }, c);
    }
    Some(out)
}

/// Normalizes an omega-free polynomial into `c * m * P` with `P` monic and
/// free of monomial content. Returns `None` for `P` when it is trivial.
fn split_denominator(p: &Poly) -> (Q, Monomial, Option<Poly>) {
    let content = p.monomial_content();
    let shifted = p.div_monomial(&content);
    let lead = shifted
        .terms
        .values()
        .next()
        .cloned()
        .unwrap_or_else(|| q(1));
    let primitive = shifted.scale(&(q(1) / &lead));
    if primitive.len() <= 1 {
        // single term: fold back entirely into the monomial
        let (m, c) = primitive
            .terms
            .into_iter()
            .next()
            .unwrap_or((Monomial::one(), q(1)));
        let (m2, _) = content.mul(&m);
        return (lead * c, m2, None);
    }
    (lead, content, Some(primitive))
}

/// Rational function `num / prod(den_i ^ k_i)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct RatFunc {
    num: Poly,
    den: Vec<(Poly, u32)>,
}

impl RatFunc {
    pub fn zero() -> Self {
        RatFunc::default()
    }

    pub fn one() -> Self {
        RatFunc::constant(q(1))
    }

    pub fn constant(c: Q) -> Self {
        RatFunc::from_poly(Poly::constant(c))
    }

    pub fn integer(n: i64) -> Self {
        RatFunc::constant(q(n))
    }

    pub fn from_poly(num: Poly) -> Self {
        RatFunc {
            num,
            den: Vec::new(),
        }
    }

    pub fn atom(atom: Atom) -> Self {
        RatFunc::from_poly(Poly::atom_pow(atom, 1))
    }

    pub fn atom_pow(atom: Atom, e: i32) -> Result<Self> {
        if e >= 0 {
            Ok(RatFunc::from_poly(Poly::atom_pow(atom, e as u32)))
        } else {
            RatFunc::atom(atom).pow(e as i64)
        }
    }

    pub fn exp(arg: RatFunc) -> Self {
        RatFunc::from_poly(Poly::from_monomial(Monomial::exp_of(arg), q(1)))
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &[(Poly, u32)] {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn as_constant(&self) -> Option<Q> {
        if self.den.is_empty() {
            self.num.as_constant()
        } else {
            None
        }
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_empty()
    }

    pub fn collect_atoms(&self, out: &mut BTreeSet<Atom>) {
        self.num.collect_atoms(out);
        for (p, _) in &self.den {
            p.collect_atoms(out);
        }
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    pub fn mentions(&self, atom: &Atom) -> bool {
        self.num.mentions(atom) || self.den.iter().any(|(p, _)| p.mentions(atom))
    }

    /// True when the normal form contains structures for which canonical
    /// identity is not known to decide equality (exponentials in
    /// denominators, nested exponentials).
    pub fn is_exotic(&self) -> bool {
        self.den.iter().any(|(p, _)| p.has_exp())
            || self
                .num
                .terms
                .keys()
                .any(|m| m.exp.as_ref().is_some_and(|a| a.num.has_exp() || a.is_exotic()))
    }

    fn den_product(&self) -> Poly {
        self.den
            .iter()
            .fold(Poly::one(), |acc, (p, k)| acc.mul(&p.pow(*k)))
    }

    /// Rewrites denominator factors divisible by a polynomial of `basis`
    /// as a product of that polynomial and the cofactor, so that equal
    /// factors coming from different sources line up.
    fn refine(mut self, basis: &[Poly]) -> Self {
        loop {
            let mut split = None;
            'search: for (i, (p, _)) in self.den.iter().enumerate() {
                for b in basis.iter().chain(self.den.iter().map(|(f, _)| f)) {
                    if b == p || b.len() > p.len() {
                        continue;
                    }
                    if let Some(r) = p.exact_div(b) {
                        if r.as_constant().is_none() {
                            split = Some((i, b.clone(), r));
                            break 'search;
                        }
                    }
                }
            }
            let Some((i, b, r)) = split else {
                return self;
            };
            let (_, k) = self.den.remove(i);
            let (c, m, prim) = split_denominator(&r);
            let unit = Poly::from_monomial(m.inverse(), q(1) / c).pow(k);
            self.num = self.num.mul(&unit);
            let mut den: BTreeMap<Poly, u32> = std::mem::take(&mut self.den).into_iter().collect();
            *den.entry(b).or_insert(0) += k;
            if let Some(prim) = prim {
                *den.entry(prim).or_insert(0) += k;
            }
            self.den = den.into_iter().collect();
        }
    }

    fn reduce(mut self) -> Self {
        if self.num.is_zero() {
            return RatFunc::zero();
        }
        let mut den = Vec::with_capacity(self.den.len());
        for (p, mut k) in std::mem::take(&mut self.den) {
            while k > 0 {
                match self.num.exact_div(&p) {
                    Some(quot) => {
                        self.num = quot;
                        k -= 1;
                    }
                    None => break,
                }
            }
            if k > 0 {
                den.push((p, k));
            }
        }
        self.den = den;
        self
    }

    pub fn add(&self, other: &RatFunc) -> RatFunc {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let basis_a: Vec<Poly> = self.den.iter().map(|(p, _)| p.clone()).collect();
        let basis_b: Vec<Poly> = other.den.iter().map(|(p, _)| p.clone()).collect();
        let a = self.clone().refine(&basis_b);
        let b = other.clone().refine(&basis_a);
        let (a, b) = if a.den == self.den && b.den == other.den {
            (a, b)
        } else {
            let ba: Vec<Poly> = a.den.iter().map(|(p, _)| p.clone()).collect();
            let bb: Vec<Poly> = b.den.iter().map(|(p, _)| p.clone()).collect();
            (a.refine(&bb), b.refine(&ba))
        };
        a.add_aligned(&b)
    }

    fn add_aligned(&self, other: &RatFunc) -> RatFunc {
        if self.den == other.den {
            return RatFunc {
                num: self.num.add(&other.num),
                den: self.den.clone(),
            }
            .reduce();
        }
        let mut lcm: BTreeMap<Poly, u32> = BTreeMap::new();
        for (p, k) in self.den.iter().chain(other.den.iter()) {
            let e = lcm.entry(p.clone()).or_insert(0);
            *e = (*e).max(*k);
        }
        let scale = |f: &RatFunc| -> Poly {
            let mut n = f.num.clone();
            for (p, k) in &lcm {
                let have = f
                    .den
                    .iter()
                    .find(|(fp, _)| fp == p)
                    .map_or(0, |(_, fk)| *fk);
                if *k > have {
                    n = n.mul(&p.pow(k - have));
                }
            }
            n
        };
        let num = scale(self).add(&scale(other));
        RatFunc {
            num,
            den: lcm.into_iter().collect(),
        }
        .reduce()
    }

    pub fn neg(&self) -> RatFunc {
        RatFunc {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, other: &RatFunc) -> RatFunc {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: &Q) -> RatFunc {
        if k.is_zero() {
            return RatFunc::zero();
        }
        RatFunc {
            num: self.num.scale(k),
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, other: &RatFunc) -> RatFunc {
        if self.is_zero() || other.is_zero() {
            return RatFunc::zero();
        }
        let num = self.num.mul(&other.num);
        if self.den.is_empty() && other.den.is_empty() {
            return RatFunc::from_poly(num);
        }
        let mut den: BTreeMap<Poly, u32> = BTreeMap::new();
        for (p, k) in self.den.iter().chain(other.den.iter()) {
            *den.entry(p.clone()).or_insert(0) += k;
        }
        RatFunc {
            num,
            den: den.into_iter().collect(),
        }
        .refine(&[])
        .reduce()
    }

    pub fn inv(&self) -> Result<RatFunc> {
        if self.num.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let den_prod = self.den_product();
        if self.num.len() == 1 {
            let (m, c) = self.num.terms.iter().next().expect("one term");
            if !m.has_omega() {
                let inv = Poly::from_monomial(m.inverse(), q(1) / c);
                return Ok(RatFunc::from_poly(den_prod.mul(&inv)));
            }
        }
        let (a, b) = self.num.omega_split();
        let (conj, norm) = if b.is_zero() {
            (Poly::one(), a)
        } else {
            let conj = a.sub(&b.mul(&Poly::atom_pow(Atom::Omega, 1)));
            let norm = self.num.mul(&conj);
            (conj, norm)
        };
        if norm.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let (c, m, primitive) = split_denominator(&norm);
        let content_inv = Poly::from_monomial(m.inverse(), q(1) / c);
        let num = den_prod.mul(&conj).mul(&content_inv);
        let den = primitive.map(|p| vec![(p, 1)]).unwrap_or_default();
        Ok(RatFunc { num, den }.reduce())
    }

    pub fn div(&self, other: &RatFunc) -> Result<RatFunc> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, e: i64) -> Result<RatFunc> {
        if e < 0 {
            return self.inv()?.pow(-e);
        }
        if self.den.is_empty() {
            return Ok(RatFunc::from_poly(self.num.pow(e as u32)));
        }
        let mut result = RatFunc::one();
        for _ in 0..e {
            result = result.mul(self);
        }
        Ok(result)
    }

    pub fn differentiate(&self, atom: &Atom) -> RatFunc {
        let dnum = self.num.differentiate(atom);
        if self.den.is_empty() {
            return dnum;
        }
        let den_inv = RatFunc {
            num: Poly::one(),
            den: self.den.clone(),
        };
        let mut log_derivative = RatFunc::zero();
        for (p, k) in &self.den {
            let dp = p.differentiate(atom);
            if dp.is_zero() {
                continue;
            }
            let pinv = RatFunc {
                num: Poly::one(),
                den: vec![(p.clone(), 1)],
            };
            log_derivative = log_derivative.add(&dp.mul(&pinv).scale(&-q(*k as i64)));
        }
        let num = RatFunc::from_poly(self.num.clone());
        dnum.mul(&den_inv)
            .add(&num.mul(&den_inv).mul(&log_derivative))
    }

    pub fn substitute(&self, target: &Atom, replacement: &RatFunc) -> Result<RatFunc> {
        if !self.mentions(target) {
            return Ok(self.clone());
        }
        let mut out = self.num.substitute(target, replacement)?;
        for (p, k) in &self.den {
            let sp = p.substitute(target, replacement)?;
            out = out.mul(&sp.pow(-(*k as i64))?);
        }
        Ok(out)
    }

    /// Splits the numerator into `a + b*omega` keeping the denominator.
    pub fn omega_split(&self) -> (RatFunc, RatFunc) {
        let (a, b) = self.num.omega_split();
        let wrap = |p: Poly| {
            RatFunc {
                num: p,
                den: self.den.clone(),
            }
            .reduce()
        };
        (wrap(a), wrap(b))
    }

    /// Collects the numerator as a sum over keys produced by `split`, which
    /// separates each monomial into a key part and a coefficient part.
    /// The denominator is attached to every coefficient.
    pub fn collect_by<K: Ord>(
        &self,
        mut split: impl FnMut(&Monomial) -> (K, Monomial),
    ) -> BTreeMap<K, RatFunc> {
        let mut groups: BTreeMap<K, Poly> = BTreeMap::new();
        for (m, c) in &self.num.terms {
            let (key, rest) = split(m);
            groups.entry(key).or_default().add_term(rest, c.clone());
        }
        groups
            .into_iter()
            .filter(|(_, p)| !p.is_zero())
            .map(|(k, p)| {
                (
                    k,
                    RatFunc {
                        num: p,
                        den: self.den.clone(),
                    }
                    .reduce(),
                )
            })
            .collect()
    }
}

impl Monomial {
    /// Splits the monomial into the factors selected by `pred` (and, if
    /// `exp_selected`, the exponential) versus the rest.
    pub fn partition(&self, pred: impl Fn(&Atom) -> bool, exp_selected: bool) -> (Monomial, Monomial) {
        let mut sel = Monomial::one();
        let mut rest = Monomial::one();
        for (a, e) in &self.factors {
            if pred(a) {
                sel.factors.push((a.clone(), *e));
            } else {
                rest.factors.push((a.clone(), *e));
            }
        }
        if exp_selected {
            sel.exp = self.exp.clone();
        } else {
            rest.exp = self.exp.clone();
        }
        (sel, rest)
    }
}

pub fn is_negative(c: &Q) -> bool {
    c.is_negative()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(a: Param) -> RatFunc {
        RatFunc::atom(Atom::Param(a))
    }

    fn var(v: IndVar) -> RatFunc {
        RatFunc::atom(Atom::Var(v))
    }

    #[test]
    fn omega_squared_rewrites() {
        let w = RatFunc::atom(Atom::Omega);
        let lhs = w.mul(&w);
        let rhs = p(Param::R).mul(&p(Param::R)).sub(&p(Param::S).scale(&q(4)));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn conjugate_product() {
        let w = RatFunc::atom(Atom::Omega);
        let r = p(Param::R);
        let prod = r.add(&w).mul(&r.sub(&w));
        assert_eq!(prod, p(Param::S).scale(&q(4)));
    }

    #[test]
    fn inverse_cancels() {
        let d = p(Param::R).mul(&p(Param::V)).add(&p(Param::W));
        let x = var(IndVar::X);
        let f = x.div(&d).unwrap();
        assert_eq!(f.mul(&d), x);
        assert_eq!(d.div(&d).unwrap(), RatFunc::one());
        assert!(f.denominator().len() == 1);
    }

    #[test]
    fn inverse_of_surd_expression_is_rationalized() {
        let w = RatFunc::atom(Atom::Omega);
        let r = p(Param::R);
        let f = r.add(&w).inv().unwrap();
        for (den, _) in f.denominator() {
            assert!(den.terms().all(|(m, _)| !m.has_omega()));
        }
        assert_eq!(f.mul(&r.add(&w)), RatFunc::one());
    }

    #[test]
    fn exponentials_merge() {
        let t = var(IndVar::T);
        let a = RatFunc::exp(t.clone());
        let b = RatFunc::exp(t.neg());
        assert_eq!(a.mul(&b), RatFunc::one());
        assert_eq!(RatFunc::exp(RatFunc::zero()), RatFunc::one());
    }

    #[test]
    fn derivative_of_quotient() {
        let x = var(IndVar::X);
        let d = x.add(&RatFunc::one());
        let f = RatFunc::one().div(&d).unwrap();
        let df = f.differentiate(&Atom::Var(IndVar::X));
        let expected = d.mul(&d).inv().unwrap().neg();
        assert!(df.sub(&expected).is_zero());
        assert_eq!(df, f.mul(&f).neg());
    }

    #[test]
    fn division_by_zero_is_an_error() {
        let w = RatFunc::atom(Atom::Omega);
        let z = w.sub(&w);
        assert_eq!(z.inv(), Err(Error::DivisionByZero));
    }

    #[test]
    fn dense_division_detects_non_divisibility() {
        let x = var(IndVar::X);
        let y = var(IndVar::Y);
        let num = x.mul(&x).sub(&y.mul(&y));
        let den = x.add(&y);
        let quotient = num.div(&den).unwrap();
        assert_eq!(quotient, x.sub(&y));
        let g = x.add(&RatFunc::one()).div(&den).unwrap();
        assert_eq!(g.denominator().len(), 1);
    }
}
