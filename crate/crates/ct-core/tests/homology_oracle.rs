//! Cross-checks the reduction-based persistence diagram against the
//! brute-force persistent-Betti oracle on random small matrices.

#[path = "support/oracle.rs"]
mod oracle;

use std::collections::BTreeMap;

use ct_core::homology::{build_filtration, persistent_homology};
use oracle::{oracle_diagram, MatrixGen};

fn impl_diagram(b: &ct_core::matrix::BinaryMatrix) -> BTreeMap<(u32, u32), usize> {
    persistent_homology(&build_filtration(b))
        .multiplicities()
        .into_iter()
        .collect()
}

#[test]
fn oracle_agrees_on_hand_cases() {
    // hollow triangle: one class (1, 0)
    let b = ct_core::matrix::BinaryMatrix::new(
        vec![1, 1, 0, 0, 1, 1, 1, 0, 1],
        vec!["r0".into(), "r1".into(), "r2".into()],
        vec!["a".into(), "b".into(), "c".into()],
    )
    .unwrap();
    let d = oracle_diagram(&b);
    assert_eq!(d, BTreeMap::from([((1, 0), 1)]));
    assert_eq!(impl_diagram(&b), d);

    // filled triangle: one class (2, 1)
    let b = ct_core::matrix::BinaryMatrix::new(
        vec![1, 1, 0, 0, 1, 1, 1, 0, 1, 1, 1, 1],
        vec!["r0".into(), "r1".into(), "r2".into(), "r3".into()],
        vec!["a".into(), "b".into(), "c".into()],
    )
    .unwrap();
    let d = oracle_diagram(&b);
    assert_eq!(d, BTreeMap::from([((2, 1), 1)]));
    assert_eq!(impl_diagram(&b), d);
}

#[test]
fn oracle_equivalence_sweep() {
    let mut gen = MatrixGen::new(0x5EED);
    let mut nonempty = 0;
    for case in 0..600 {
        let b = gen.matrix(12, 6, 0.2, 0.6);
        let expected = oracle_diagram(&b);
        let got = impl_diagram(&b);
        assert_eq!(got, expected, "diagram mismatch on case {case}: {b:?}");
        if !expected.is_empty() {
            nonempty += 1;
        }
    }
    assert!(nonempty > 50, "sweep too sparse to be meaningful ({nonempty} nonempty)");
}
