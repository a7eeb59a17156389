//! Finite-type machinery against the exact crossing-count oracle.

use csilink::diagram::Flavor;
use csilink::error::Result;
use csilink::geometry::LinkGeometry;
use csilink::integrator::{integrate, FormChoice, MCEstimate};
use csilink::projection::linking_number;
use csilink::vassiliev::{
    finite_type_defect, one_singular_braid_pair, realize_chord_diagram, two_singular_braid_pair,
    weight_of_invariant, SingularLink,
};
use csilink::weights::chord_diagrams;

/// Linking number through the crossing oracle, as an exact invariant
/// evaluator with zero error bars.
fn lk_oracle(link: &LinkGeometry, _seed: u64) -> Result<MCEstimate> {
    Ok(MCEstimate {
        value: linking_number(link, 1, 2)? as f64,
        std_error: 0.0,
        samples: 0,
        seed: 0,
    })
}

#[test]
fn defect_of_linking_number_is_exactly_zero() {
    let sl = two_singular_braid_pair();
    let defect = finite_type_defect(&lk_oracle, &sl, 1).unwrap();
    assert_eq!(defect.value, 0.0);
}

#[test]
fn constant_invariant_has_zero_defect() {
    let constant = |_: &LinkGeometry, _: u64| -> Result<MCEstimate> {
        Ok(MCEstimate {
            value: 42.0,
            std_error: 0.0,
            samples: 0,
            seed: 0,
        })
    };
    let sl = one_singular_braid_pair();
    let defect = finite_type_defect(&constant, &sl, 1).unwrap();
    assert_eq!(defect.value, 0.0);
}

#[test]
fn weight_of_linking_number_is_unit_on_the_chord() {
    let w = weight_of_invariant(&lk_oracle, 2, 1, Flavor::Braid, 0.05, 3).unwrap();
    assert_eq!(w.len(), 1);
    let (_, est) = &w[0];
    assert_eq!(est.value.abs(), 1.0);
}

/// The alternating sum over resolutions depends only on the chord diagram
/// of the singular link: two geometrically distinct realizers of the same
/// diagram agree.
#[test]
fn defect_depends_only_on_chord_diagram() {
    let chord = chord_diagrams(2, 1, Flavor::Braid).remove(0);
    let r1 = realize_chord_diagram(&chord, 0.05).unwrap();
    let r2 = realize_chord_diagram(&chord, 0.08).unwrap();
    let d1 = finite_type_defect(&lk_oracle, &r1, 1).unwrap();
    let d2 = finite_type_defect(&lk_oracle, &r2, 1).unwrap();
    assert_eq!(d1.value, d2.value);
    // and the one-singular dip geometry realizes the same diagram
    let dip = one_singular_braid_pair();
    assert_eq!(dip.chord_diagram().unwrap(), chord);
    let d3 = finite_type_defect(&lk_oracle, &dip, 1).unwrap();
    assert_eq!(d3.value, d1.value);
}

/// Monte Carlo round trip at order one: extracting the weight system of
/// the linking-number integral returns the unit weight within noise.
#[test]
fn weight_round_trip_through_monte_carlo() {
    let mc_lk = |link: &LinkGeometry, seed: u64| -> Result<MCEstimate> {
        let chord = chord_diagrams(2, 1, Flavor::Braid).remove(0);
        integrate(&chord, link, FormChoice::Uniform, 400_000, seed)
    };
    let w = weight_of_invariant(&mc_lk, 2, 1, Flavor::Braid, 0.05, 3).unwrap();
    let (_, est) = &w[0];
    assert!(
        (est.value.abs() - 1.0).abs() <= (3.0 * est.std_error).max(0.15),
        "weight {} +- {}",
        est.value,
        est.std_error
    );
}

/// Applying the singular displacements in reverse order yields identical
/// geometries for matching sign patterns.
#[test]
fn resolution_order_does_not_matter() {
    let sl = two_singular_braid_pair();
    let reversed = SingularLink::new(
        sl.base().clone(),
        sl.singularities().iter().rev().copied().collect(),
    )
    .unwrap();
    let a = sl.resolve().unwrap();
    let b = reversed.resolve().unwrap();
    assert_eq!(a.len(), b.len());
    // mask bit i refers to singularity i, so matching sign patterns live at
    // bit-reversed indices
    for (mask, (sign, link)) in a.iter().enumerate() {
        let swapped = ((mask & 1) << 1) | ((mask >> 1) & 1);
        let (sign2, link2) = &b[swapped];
        assert_eq!(sign, sign2);
        assert_eq!(link, link2);
    }
}
