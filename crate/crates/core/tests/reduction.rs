//! Pulls reduced solutions back to the (t, x, y) equation: for any z(t, r),
//! the residual of u = z(t, r) exp(Q) is the reduced residual times the
//! raw z_t coefficient and exp(Q).

use liesym::jet::make_hpz;
use liesym::kernel::{Atom, Dep, Expr, IndVar, ParameterBinding, Param, Q};
use liesym::reduction::{reduce_by_generator, ReducedEquation};
use proptest::prelude::*;

fn binding() -> impl Strategy<Value = ParameterBinding> {
    (-6i64..=6, 1i64..=6, -3i64..=3, -4i64..=4)
        .prop_filter("R*V + W must not vanish", |(r, _, v, w)| r * v + w != 0)
        .prop_map(|(r, omega, v, w)| {
            let q = |n: i64| Q::from_integer(n.into());
            let s = (q(r) * q(r) - q(omega) * q(omega)) / q(4);
            ParameterBinding::new([(Param::R, q(r)), (Param::S, s), (Param::V, q(v)), (Param::W, q(w))]).unwrap()
        })
}

/// Polynomials in t and r of low degree.
fn seed() -> impl Strategy<Value = Expr> {
    proptest::collection::vec((-5i64..=5, 0i64..=1, 0i64..=3), 1..=4).prop_map(|terms| {
        terms.into_iter().fold(Expr::zero(), |acc, (c, a, b)| {
            let t = Expr::var(IndVar::T).pow(a).unwrap();
            let r = Expr::var(IndVar::R).pow(b).unwrap();
            &acc + &(&Expr::int(c) * &(&t * &r))
        })
    })
}

fn d(e: &Expr, v: IndVar, times: usize) -> Expr {
    (0..times).fold(e.clone(), |acc, _| acc.differentiate(&Expr::var(v)).unwrap())
}

/// `F[z] - z_t` for the reduced equation with z given explicitly.
fn reduced_residual(red: &ReducedEquation, z: &Expr) -> Expr {
    let lhs = red.lhs();
    let subs: Vec<(Atom, Expr)> = lhs
        .atoms()
        .into_iter()
        .filter_map(|a| match &a {
            Atom::Jet(j) if j.dep == Dep::Z => {
                let value = j.vars().into_iter().fold(z.clone(), |acc, v| d(&acc, v, 1));
                Some((a.clone(), value))
            }
            _ => None,
        })
        .collect();
    lhs.substitute_all(&subs).unwrap()
}

/// `F[u] - u_t` for the (t, x, y) equation with u given explicitly.
fn full_residual(b: &ParameterBinding, u: &Expr) -> Expr {
    let pde = make_hpz().with_binding(b).unwrap();
    let rhs = pde.rhs();
    let subs: Vec<(Atom, Expr)> = rhs
        .atoms()
        .into_iter()
        .filter_map(|a| match &a {
            Atom::Jet(j) => Some((a.clone(), j.vars().into_iter().fold(u.clone(), |acc, v| d(&acc, v, 1)))),
            _ => None,
        })
        .collect();
    &rhs.substitute_all(&subs).unwrap() - &d(u, IndVar::T, 1)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn reduced_solutions_pull_back(
        b in binding(),
        g in proptest::sample::select(vec!["delta3", "delta4", "delta5", "delta6"]),
        z in seed(),
    ) {
        let (red, _) = reduce_by_generator(&make_hpz(), g, Some(&b)).unwrap();
        let r = red.map.invariant();
        let e = Expr::exp(red.map.multiplier_exponent());
        let u = &z.substitute(&Expr::var(IndVar::R), &r).unwrap() * &e;
        let reduced = reduced_residual(&red, &z).substitute(&Expr::var(IndVar::R), &r).unwrap();
        let expected = &(&(&Expr::int(-1) * &red.raw_time_coefficient) * &e) * &reduced;
        let diff = &full_residual(&b, &u) - &expected;
        prop_assert!(diff.is_zero(), "{g} at {b:?}: {diff}");
    }
}
