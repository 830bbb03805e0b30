mod common;

use common::*;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(CASES))]

    #[test]
    fn simplify_is_idempotent_and_round_trips(e in arb_expr(true)) {
        canonical_idempotent(&e)?;
    }

    #[test]
    fn addition_and_multiplication_laws(a in arb_expr(false), b in arb_expr(false), c in arb_expr(false)) {
        ring_laws(&a, &b, &c)?;
    }

    #[test]
    fn evaluation_agrees_before_and_after_simplify(e in arb_expr(true), binding in arb_binding()) {
        evaluation_consistent(&e, &binding)?;
    }

    #[test]
    fn total_derivatives_in_x_and_y_commute(f in arb_jet_poly()) {
        total_derivatives_commute(&f)?;
    }

    #[test]
    fn total_derivative_obeys_leibniz(f in arb_jet_poly(), g in arb_jet_poly()) {
        leibniz(&f, &g)?;
    }

    #[test]
    fn prolongation_is_linear(x in arb_field(), y in arb_field(), a in arb_rational(), b in arb_rational()) {
        prolongation_linear(&x, &y, &a, &b)?;
    }

    #[test]
    fn commutator_is_antisymmetric_and_bilinear(
        i in 0usize..6, j in 0usize..6, k in 0usize..6, a in arb_rational(), b in arb_rational()
    ) {
        commutator_antisymmetric_bilinear(i, j, k, &a, &b)?;
    }
}
