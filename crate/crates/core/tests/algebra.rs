use std::sync::OnceLock;

use liesym::algebra::{classify, structure_constants, AlgebraKind, StructureConstants};
use liesym::kernel::{ParameterBinding, RatFunc, Q};
use liesym::linalg::{rank, Matrix};
use liesym::prolong::SymmetryFixture;
use proptest::prelude::*;

fn full() -> StructureConstants {
    structure_constants(&SymmetryFixture::reference().fields()).unwrap().constants
}

/// The full algebra at R=5, S=4, V=1, W=1, with rational constants.
fn bound() -> &'static StructureConstants {
    static SC: OnceLock<StructureConstants> = OnceLock::new();
    SC.get_or_init(|| {
        let b = ParameterBinding::full(5, 4, 1, 1).unwrap();
        let fields: Vec<_> = SymmetryFixture::reference()
            .fields()
            .iter()
            .map(|f| f.map_coefficients(|c| b.apply(c)).unwrap())
            .collect();
        structure_constants(&fields).unwrap().constants
    })
}

fn w5() -> StructureConstants {
    structure_constants(&SymmetryFixture::reference().fields()[1..]).unwrap().constants
}

/// Unit lower times unit upper triangular: integer entries, determinant 1.
fn unimodular(n: usize) -> impl Strategy<Value = Matrix<Q>> {
    let entries = n * (n - 1) / 2;
    (proptest::collection::vec(-2i64..=2, entries), proptest::collection::vec(-2i64..=2, entries)).prop_map(
        move |(l, u)| {
            let tri = |vals: &[i64], lower: bool| {
                let mut m = vec![vec![Q::from_integer(0.into()); n]; n];
                let mut it = vals.iter();
                for i in 0..n {
                    m[i][i] = Q::from_integer(1.into());
                    for j in 0..i {
                        let v = Q::from_integer((*it.next().unwrap()).into());
                        if lower {
                            m[i][j] = v;
                        } else {
                            m[j][i] = v;
                        }
                    }
                }
                m
            };
            let (l, u) = (tri(&l, true), tri(&u, false));
            (0..n)
                .map(|i| (0..n).map(|j| (0..n).fold(Q::from_integer(0.into()), |acc, k| acc + &l[i][k] * &u[k][j])).collect())
                .collect()
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn classification_is_basis_independent(p in unimodular(6)) {
        let changed = bound().change_basis(&p).unwrap();
        prop_assert!(changed.jacobi_violations().is_empty());
        let (a, b) = (classify(bound()), classify(&changed));
        prop_assert_eq!(&a.name, &b.name);
        prop_assert_eq!(a.center_dim, b.center_dim);
        prop_assert_eq!(&a.derived_series, &b.derived_series);
        prop_assert_eq!(a.ideal_basis.len(), b.ideal_basis.len());
    }
}

#[test]
fn w5_bracket_pairs_the_quotient_nondegenerately() {
    let sc = w5();
    let center = sc.center();
    assert_eq!(center.len(), 1);
    assert_eq!(sc.derived(), center);
    // [e_i, e_j] = B_ij * delta2 with B of rank 4 on the four non-central generators
    let pivot = center[0].iter().position(|c| !c.is_zero()).unwrap();
    let b: Matrix<RatFunc> = (0..5)
        .map(|i| (0..5).map(|j| sc.basis_bracket(i, j)[pivot].div(&center[0][pivot]).unwrap()).collect())
        .collect();
    assert_eq!(rank(&b, 5), 4);
    for i in 0..5 {
        for j in 0..5 {
            assert_eq!(b[i][j], b[j][i].neg());
        }
    }
    assert!(sc.killing_form().iter().flatten().all(RatFunc::is_zero));
}

#[test]
fn full_algebra_is_a_one_dimensional_extension() {
    let v = classify(&full());
    assert_eq!(
        v.kind,
        AlgebraKind::Semidirect(Box::new(AlgebraKind::Abelian(1)), Box::new(AlgebraKind::Heisenberg(5)))
    );
    assert_eq!(v.mubarakzyanov_label.as_deref(), Some("A1 ⊕ₛ A5,4"));
    assert_eq!(v.derived_series, vec![6, 5, 1, 0]);
}
