//! Structural tests for the graded diagram complexes.

use csilink::cochain::{cohomology, delta_matrix};
use csilink::diagram::{enumerate_basis, EnumLimits, Flavor, Parity};
use csilink::differential::{contract, contractible_targets, delta, delta_sum};

const PARITIES: [Parity; 2] = [Parity::Odd, Parity::Even];
const FLAVORS: [Flavor; 2] = [Flavor::Link, Flavor::Braid];

/// delta o delta = 0 on every basis diagram up to order 3, checked with
/// exact rational arithmetic.
#[test]
fn delta_squared_vanishes_up_to_order_three() {
    let limits = EnumLimits::default();
    for m in 1..=2 {
        for parity in PARITIES {
            for flavor in FLAVORS {
                for order in 1..=3i64 {
                    for degree in 0..=(2 * order) {
                        let basis =
                            enumerate_basis(m, parity, flavor, order, degree, limits).unwrap();
                        for d in &basis {
                            let dd = delta_sum(&delta(d));
                            assert!(
                                dd.is_zero(),
                                "delta^2 != 0 for m={m} {parity} {flavor} o={order} d={degree}:\n{}",
                                d.to_text()
                            );
                        }
                    }
                }
            }
        }
    }
}

/// The same statement at the matrix level: consecutive coboundary matrices
/// compose to zero.
#[test]
fn delta_matrices_compose_to_zero() {
    let limits = EnumLimits::default();
    for m in 1..=2 {
        for parity in PARITIES {
            for flavor in FLAVORS {
                for order in 1..=3i64 {
                    for degree in 0..=(2 * order - 1) {
                        let a = enumerate_basis(m, parity, flavor, order, degree, limits).unwrap();
                        let b =
                            enumerate_basis(m, parity, flavor, order, degree + 1, limits).unwrap();
                        let c =
                            enumerate_basis(m, parity, flavor, order, degree + 2, limits).unwrap();
                        let m1 = delta_matrix(&a, &b).unwrap();
                        let m2 = delta_matrix(&b, &c).unwrap();
                        assert!(
                            m2.multiply(&m1).is_zero(),
                            "m={m} {parity} {flavor} o={order} d={degree}"
                        );
                    }
                }
            }
        }
    }
}

/// Contraction preserves order and raises degree by one.
#[test]
fn contraction_shifts_grading() {
    let limits = EnumLimits::default();
    for flavor in FLAVORS {
        for order in 1..=3i64 {
            let basis = enumerate_basis(2, Parity::Odd, flavor, order, 0, limits).unwrap();
            for d in &basis {
                let g = d.grading();
                for t in contractible_targets(d) {
                    let img = contract(d, t).unwrap();
                    let gi = img.grading();
                    assert_eq!(gi.order, g.order);
                    assert_eq!(gi.degree, g.degree + 1);
                }
            }
        }
    }
}

/// Permuting segment roles induces an isomorphism of complexes: swapping
/// the two segments of every basis diagram and canonicalizing permutes the
/// basis, so cohomology dimensions are invariant.
#[test]
fn segment_symmetry_of_cohomology() {
    use csilink::diagram::{Diagram, Edge, Vertex};
    let limits = EnumLimits::default();
    let swap_vertex = |v: Vertex| -> Vertex {
        match v {
            Vertex::Ext { segment, position } => Vertex::Ext {
                segment: 3 - segment,
                position,
            },
            other => other,
        }
    };
    for flavor in FLAVORS {
        for order in 1..=2i64 {
            for degree in 0..=2i64 {
                let basis = enumerate_basis(2, Parity::Odd, flavor, order, degree, limits).unwrap();
                let mut swapped: Vec<Diagram> = basis
                    .iter()
                    .map(|d| {
                        let edges: Vec<Edge> = d
                            .edges()
                            .iter()
                            .map(|e| Edge {
                                tail: swap_vertex(e.tail),
                                head: swap_vertex(e.head),
                                label: e.label,
                            })
                            .collect();
                        let raw = Diagram::new(
                            2,
                            Parity::Odd,
                            flavor,
                            vec![d.ext_counts()[1], d.ext_counts()[0]],
                            d.internal_count(),
                            edges,
                        )
                        .unwrap();
                        let c = raw.canonicalize();
                        assert!(!c.is_zero());
                        c.diagram
                    })
                    .collect();
                swapped.sort();
                swapped.dedup();
                assert_eq!(swapped, basis, "segment swap is not a basis bijection");
            }
        }
    }
}

/// Frozen small cohomology values derived by hand from the explicit
/// low-order complexes.
#[test]
fn frozen_h0_values() {
    let limits = EnumLimits::default();
    let h = |m, flavor, order| {
        cohomology(m, Parity::Odd, flavor, order, 0, limits)
            .unwrap()
            .dim_cohomology
    };
    assert_eq!(h(1, Flavor::Link, 1), 0);
    assert_eq!(h(2, Flavor::Braid, 1), 1);
    assert_eq!(h(1, Flavor::Link, 2), 1);
}
