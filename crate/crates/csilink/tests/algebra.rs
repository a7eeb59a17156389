//! Shuffle product identities and weight-system structure checks.

use csilink::diagram::{enumerate_basis, Diagram, DiagramSum, EnumLimits, Flavor, Parity};
use csilink::differential::shuffle;
use csilink::weights::{four_t_relations, stu_reduce, weight_space};
use num_rational::BigRational;
use num_traits::{One, Zero};

fn shuffle_sums(a: &DiagramSum, b: &DiagramSum) -> DiagramSum {
    let mut out = DiagramSum::new();
    for (d1, c1) in a.terms() {
        for (d2, c2) in b.terms() {
            let s = shuffle(d1, d2).unwrap();
            out.add_sum(&(c1 * c2), &s);
        }
    }
    out
}

fn small_diagrams(m: usize, parity: Parity, flavor: Flavor) -> Vec<Diagram> {
    let limits = EnumLimits::default();
    let mut v = vec![Diagram::empty(m, parity, flavor)];
    for degree in 0..=1 {
        v.extend(enumerate_basis(m, parity, flavor, 1, degree, limits).unwrap());
    }
    v
}

#[test]
fn shuffle_unit_left_and_right() {
    for parity in [Parity::Odd, Parity::Even] {
        let unit = Diagram::empty(1, parity, Flavor::Link);
        for d in small_diagrams(1, parity, Flavor::Link) {
            let l = shuffle(&unit, &d).unwrap();
            let r = shuffle(&d, &unit).unwrap();
            assert_eq!(l, DiagramSum::singleton(d.clone()));
            assert_eq!(r, DiagramSum::singleton(d.clone()));
        }
    }
}

#[test]
fn shuffle_is_associative_on_small_diagrams() {
    for parity in [Parity::Odd, Parity::Even] {
        let pool = small_diagrams(1, parity, Flavor::Link);
        for a in &pool {
            for b in &pool {
                for c in &pool {
                    let ab = shuffle(a, b).unwrap();
                    let bc = shuffle(b, c).unwrap();
                    let left = shuffle_sums(&ab, &DiagramSum::singleton(c.clone()));
                    let right = shuffle_sums(&DiagramSum::singleton(a.clone()), &bc);
                    assert_eq!(left, right, "associativity failed");
                }
            }
        }
    }
}

#[test]
fn shuffle_is_commutative_up_to_global_sign() {
    for parity in [Parity::Odd, Parity::Even] {
        let pool = small_diagrams(2, parity, Flavor::Link);
        for a in &pool {
            for b in &pool {
                let ab = shuffle(a, b).unwrap();
                let ba = shuffle(b, a).unwrap();
                if ab.is_zero() {
                    assert!(ba.is_zero());
                    continue;
                }
                let mut neg = ba.clone();
                neg.scale(&BigRational::from_integer((-1).into()));
                assert!(
                    ab == ba || ab == neg,
                    "shuffle not graded-commutative for a pair of small diagrams"
                );
            }
        }
    }
}

#[test]
fn shuffle_counts_interleavings() {
    // two single-chord diagrams on one segment: six (2,2)-shuffles, which
    // group into the three chord-pair patterns
    let d = enumerate_basis(1, Parity::Odd, Flavor::Link, 1, 0, EnumLimits::default())
        .unwrap()
        .remove(0);
    let s = shuffle(&d, &d).unwrap();
    let total_abs: BigRational = s
        .terms()
        .map(|(_, c)| if c < &BigRational::zero() { -c.clone() } else { c.clone() })
        .fold(BigRational::zero(), |a, b| a + b);
    assert_eq!(total_abs, BigRational::from_integer(6.into()));
}

/// STU reduction lands in chord diagrams and re-reduction is a fixed point
/// over the range where every internal vertex has a usable leg: links at
/// all tested orders, braids up to order two.
#[test]
fn stu_reduction_reaches_chords() {
    let limits = EnumLimits::default();
    for (m, flavor, max_order) in [
        (1usize, Flavor::Link, 3i64),
        (2, Flavor::Link, 3),
        (2, Flavor::Braid, 2),
    ] {
        for order in 2..=max_order {
            for d in enumerate_basis(m, Parity::Odd, flavor, order, 0, limits).unwrap() {
                if d.internal_count() == 0 {
                    continue;
                }
                let direct = stu_reduce(&d).unwrap();
                for (c, coeff) in direct.terms() {
                    assert!(csilink::weights::is_chord_diagram(c));
                    assert!(!coeff.is_zero());
                }
                // reduce again: chord sums are fixed points
                let mut again = DiagramSum::new();
                for (c, coeff) in direct.terms() {
                    again.add_sum(coeff, &stu_reduce(c).unwrap());
                }
                assert_eq!(again, direct);
            }
        }
    }
}

/// Some order-three braid diagrams concentrate a trivalent piece on one
/// strand; every STU face of such a piece dies under the braid relation and
/// the reduction reports that honestly instead of inventing an expansion.
#[test]
fn braid_order_three_has_irreducible_diagrams() {
    let limits = EnumLimits::default();
    let basis = enumerate_basis(2, Parity::Odd, Flavor::Braid, 3, 0, limits).unwrap();
    let mut irreducible = 0usize;
    for d in &basis {
        if d.internal_count() == 0 {
            continue;
        }
        match stu_reduce(d) {
            Ok(sum) => {
                for (c, _) in sum.terms() {
                    assert!(csilink::weights::is_chord_diagram(c));
                }
            }
            Err(csilink::error::Error::Irreducible(_)) => irreducible += 1,
            Err(e) => panic!("unexpected error: {e}"),
        }
    }
    assert!(irreducible > 0);
}

/// Weight systems annihilate every emitted relation, and the S = T - U
/// evaluation identity holds through the reduction.
#[test]
fn weight_systems_respect_stu() {
    for (m, k, flavor) in [(1usize, 2i64, Flavor::Link), (1, 3, Flavor::Link)] {
        let ws = weight_space(m, k, flavor).unwrap();
        let rels = four_t_relations(m, k, flavor);
        for w in &ws {
            for r in &rels {
                assert!(w.evaluate_sum(r).unwrap().is_zero());
            }
            // evaluating a trivalent diagram equals evaluating its chord
            // expansion term by term
            for d in enumerate_basis(m, Parity::Odd, flavor, k, 0, EnumLimits::default()).unwrap()
            {
                if d.internal_count() == 0 {
                    continue;
                }
                let reduced = stu_reduce(&d).unwrap();
                let direct = w.evaluate(&d).unwrap();
                let mut via = BigRational::zero();
                for (c, coeff) in reduced.terms() {
                    via += coeff * w.evaluate_chord(c);
                }
                assert_eq!(direct, via);
            }
        }
    }
}

/// The braid weight space at order one is spanned by the single chord with
/// value one.
#[test]
fn braid_order_one_weight_system() {
    let ws = weight_space(2, 1, Flavor::Braid).unwrap();
    assert_eq!(ws.len(), 1);
    let w = &ws[0];
    assert_eq!(w.values.len(), 1);
    assert!(w.values.values().next().unwrap().is_one());
}
