//! Formal rational linear combinations of canonical diagrams.

use super::{Diagram, SignedDiagram};
use num_rational::BigRational;
use num_traits::Zero;
use std::collections::BTreeMap;

/// A finite rational linear combination of canonical diagrams.  Zero
/// coefficients are never stored; keys are canonical representatives.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct DiagramSum {
    terms: BTreeMap<Diagram, BigRational>,
}

impl DiagramSum {
    pub fn new() -> Self {
        DiagramSum {
            terms: BTreeMap::new(),
        }
    }

    pub fn singleton(d: Diagram) -> Self {
        let mut s = DiagramSum::new();
        s.add(BigRational::from_integer(1.into()), d);
        s
    }

    /// Add `coeff * d`, canonicalizing `d` first.
    pub fn add(&mut self, coeff: BigRational, d: Diagram) {
        if coeff.is_zero() {
            return;
        }
        let signed = d.canonicalize();
        self.add_signed(coeff, signed);
    }

    /// Add `coeff * signed` where `signed` is already canonical.
    pub fn add_signed(&mut self, coeff: BigRational, signed: SignedDiagram) {
        if signed.is_zero() || coeff.is_zero() {
            return;
        }
        let c = coeff * &signed.coefficient;
        use std::collections::btree_map::Entry;
        match self.terms.entry(signed.diagram) {
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
            Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    pub fn add_sum(&mut self, coeff: &BigRational, other: &DiagramSum) {
        for (d, c) in &other.terms {
            let signed = SignedDiagram {
                coefficient: c.clone(),
                diagram: d.clone(),
            };
            self.add_signed(coeff.clone(), signed);
        }
    }

    pub fn scale(&mut self, coeff: &BigRational) {
        if coeff.is_zero() {
            self.terms.clear();
            return;
        }
        for v in self.terms.values_mut() {
            *v *= coeff;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Diagram, &BigRational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, d: &Diagram) -> BigRational {
        self.terms.get(d).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Serialize in the diagram-sum text format.
    pub fn to_text(&self) -> String {
        super::text::serialize_sum(self)
    }
}

impl DiagramSum {
    pub fn negated(mut self) -> DiagramSum {
        let minus_one = BigRational::from_integer((-1).into());
        self.scale(&minus_one);
        self
    }
}
