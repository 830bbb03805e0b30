#![allow(dead_code)]

use std::collections::BTreeMap;
use std::sync::OnceLock;

use liesym::jet::total_derivative;
use liesym::kernel::{evaluate, parse, Atom, Dep, Expr, IndVar, JetVar, Param, Q};
use liesym::prolong::{SymmetryFixture, VectorField};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

pub const CASES: u32 = 500;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(n.into(), d.into())
}

fn jet(name: &str) -> Expr {
    Expr::jet(JetVar::parse(name).expect("valid jet"))
}

pub fn arb_rational() -> impl Strategy<Value = Q> {
    (-9i64..=9, 1i64..=4).prop_map(|(n, d)| q(n, d))
}

fn leaf(with_jets: bool) -> BoxedStrategy<Expr> {
    let mut atoms = vec![
        Expr::var(IndVar::X),
        Expr::var(IndVar::Y),
        Expr::var(IndVar::T),
        Expr::param(Param::R),
        Expr::param(Param::S),
        Expr::param(Param::V),
        Expr::param(Param::W),
        Expr::omega(),
        Expr::dep(Dep::U),
    ];
    if with_jets {
        atoms.extend([jet("u_x"), jet("u_y")]);
    }
    prop_oneof![
        3 => proptest::sample::select(atoms),
        1 => arb_rational().prop_map(Expr::Num),
    ]
    .boxed()
}

/// Raw (unsimplified) trees over the symbols of the kernel.
pub fn arb_expr(with_jets: bool) -> BoxedStrategy<Expr> {
    leaf(with_jets)
        .prop_recursive(3, 24, 3, move |inner| {
            prop_oneof![
                3 => proptest::collection::vec(inner.clone(), 2..=3).prop_map(Expr::Sum),
                3 => proptest::collection::vec(inner.clone(), 2..=3).prop_map(Expr::Product),
                1 => (inner.clone(), 0i64..=3).prop_map(|(b, k)| Expr::Pow(Box::new(b), k)),
                1 => (-3i64..=3, proptest::sample::select(vec![IndVar::X, IndVar::T]))
                    .prop_map(|(c, v)| Expr::Exp(Box::new(Expr::Product(vec![Expr::int(c), Expr::var(v)])))),
            ]
        })
        .boxed()
}

/// Polynomials in x, y, u and first-order jets, for total-derivative checks.
pub fn arb_jet_poly() -> BoxedStrategy<Expr> {
    let atoms = vec![Expr::var(IndVar::X), Expr::var(IndVar::Y), Expr::dep(Dep::U), jet("u_x"), jet("u_y")];
    let term = (arb_rational(), proptest::collection::vec(proptest::sample::select(atoms), 0..=3))
        .prop_map(|(c, fs)| fs.into_iter().fold(Expr::Num(c), |acc, f| &acc * &f));
    proptest::collection::vec(term, 1..=4)
        .prop_map(|ts| ts.into_iter().fold(Expr::zero(), |acc, t| &acc + &t))
        .boxed()
}

/// A point binding of every symbol with a rational omega: S = (R^2 - omega^2)/4.
pub fn arb_binding() -> impl Strategy<Value = BTreeMap<Atom, Q>> {
    (
        arb_rational(),
        arb_rational(),
        arb_rational(),
        arb_rational(),
        proptest::collection::vec(arb_rational(), 5),
    )
        .prop_map(|(r, w, v, ww, vals)| {
            let s = (&r * &r - &w * &w) / q(4, 1);
            let mut m = BTreeMap::new();
            m.insert(Atom::Param(Param::R), r);
            m.insert(Atom::Param(Param::S), s);
            m.insert(Atom::Param(Param::V), v);
            m.insert(Atom::Param(Param::W), ww);
            m.insert(Atom::Omega, w);
            let names = [
                Atom::Var(IndVar::X),
                Atom::Var(IndVar::Y),
                Atom::Var(IndVar::T),
                Atom::u(),
                Atom::Jet(JetVar::parse("u_x").unwrap()),
            ];
            for (a, c) in names.into_iter().zip(vals) {
                m.insert(a, c);
            }
            m.insert(Atom::Jet(JetVar::parse("u_y").unwrap()), q(2, 3));
            m
        })
}

/// Point fields in (t, x, y, u) with polynomial coefficients.
pub fn arb_field() -> BoxedStrategy<VectorField> {
    let atoms = vec![Expr::var(IndVar::T), Expr::var(IndVar::X), Expr::var(IndVar::Y), Expr::dep(Dep::U)];
    let coeff = proptest::collection::vec(
        (arb_rational(), proptest::collection::vec(proptest::sample::select(atoms), 0..=2)),
        0..=2,
    )
    .prop_map(|ts| {
        ts.into_iter()
            .fold(Expr::zero(), |acc, (c, fs)| &acc + &fs.into_iter().fold(Expr::Num(c), |p, f| &p * &f))
    });
    proptest::collection::vec(coeff, 4)
        .prop_map(|cs| VectorField::txy(cs[0].clone(), cs[1].clone(), cs[2].clone(), cs[3].clone()).unwrap())
        .boxed()
}

fn check(cond: bool, what: impl FnOnce() -> String) -> Result<(), TestCaseError> {
    if cond {
        Ok(())
    } else {
        Err(TestCaseError::fail(what()))
    }
}

fn lift<T>(r: liesym::Result<T>) -> Result<T, TestCaseError> {
    r.map_err(|e| TestCaseError::fail(e.to_string()))
}

pub fn canonical_idempotent(e: &Expr) -> Result<(), TestCaseError> {
    let s = lift(e.simplify())?;
    check(lift(s.simplify())? == s, || format!("simplify is not idempotent on {e:?}"))?;
    let reparsed = lift(parse(&s.to_string()))?;
    check(reparsed == s, || format!("`{s}` does not round-trip"))
}

pub fn ring_laws(a: &Expr, b: &Expr, c: &Expr) -> Result<(), TestCaseError> {
    check((a + b) == (b + a), || "addition is not commutative".into())?;
    check((a * b) == (b * a), || "multiplication is not commutative".into())?;
    let lhs = a * &(b + c);
    let rhs = &(a * b) + &(a * c);
    check((&lhs - &rhs).is_zero(), || format!("distributivity fails: {lhs} vs {rhs}"))?;
    check((&(a + b) - b) == lift(a.simplify())?, || "subtraction does not cancel".into())
}

pub fn evaluation_consistent(e: &Expr, binding: &BTreeMap<Atom, Q>) -> Result<(), TestCaseError> {
    let raw = lift(evaluate(e, binding))?;
    let canonical = lift(evaluate(&lift(e.simplify())?, binding))?;
    check(raw == canonical, || format!("evaluation differs on {e}"))
}

pub fn total_derivatives_commute(f: &Expr) -> Result<(), TestCaseError> {
    let xy = lift(total_derivative(&lift(total_derivative(f, IndVar::X, None))?, IndVar::Y, None))?;
    let yx = lift(total_derivative(&lift(total_derivative(f, IndVar::Y, None))?, IndVar::X, None))?;
    check(xy == yx, || format!("D_x D_y != D_y D_x on {f}"))
}

pub fn leibniz(f: &Expr, g: &Expr) -> Result<(), TestCaseError> {
    for v in [IndVar::X, IndVar::Y] {
        let lhs = lift(total_derivative(&(f * g), v, None))?;
        let rhs = &(f * &lift(total_derivative(g, v, None))?) + &(g * &lift(total_derivative(f, v, None))?);
        check(lhs == rhs, || format!("Leibniz fails for {f} and {g}"))?;
    }
    Ok(())
}

pub fn prolongation_linear(x: &VectorField, y: &VectorField, a: &Q, b: &Q) -> Result<(), TestCaseError> {
    let (ea, eb) = (Expr::Num(a.clone()), Expr::Num(b.clone()));
    let combo = lift(x.scale(&ea).add(&y.scale(&eb)))?;
    let pc = lift(combo.prolong2())?;
    let px = lift(x.prolong2())?;
    let py = lift(y.prolong2())?;
    for (j, c) in &pc {
        let expected = &(&ea * &px[j]) + &(&eb * &py[j]);
        check(c == &expected, || format!("prolongation is not linear at {j}"))?;
    }
    Ok(())
}

pub fn commutator_antisymmetric_bilinear(i: usize, j: usize, k: usize, a: &Q, b: &Q) -> Result<(), TestCaseError> {
    static FIELDS: OnceLock<Vec<VectorField>> = OnceLock::new();
    let fields = FIELDS.get_or_init(|| SymmetryFixture::reference().fields());
    let (x, y, z) = (&fields[i], &fields[j], &fields[k]);
    let xy = lift(x.commutator(y))?;
    let yx = lift(y.commutator(x))?;
    check(lift(xy.add(&yx))?.is_zero(), || format!("[{i}, {j}] is not antisymmetric"))?;
    let (ea, eb) = (Expr::Num(a.clone()), Expr::Num(b.clone()));
    let lhs = lift(lift(x.scale(&ea).add(&y.scale(&eb)))?.commutator(z))?;
    let rhs = lift(lift(x.commutator(z))?.scale(&ea).add(&lift(y.commutator(z))?.scale(&eb)))?;
    check(lift(lhs.add(&rhs.scale(&Expr::int(-1))))?.is_zero(), || "commutator is not bilinear".into())
}
