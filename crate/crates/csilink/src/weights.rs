//! Trivalent diagrams, STU reduction to chord diagrams, the 4T/1T
//! relations, and the spaces of weight systems.
//!
//! Everything here lives in the odd complex (ambient dimension three).
//!
//! The STU rewriting resolves an internal vertex with a leg on a segment
//! into the two chord attachments of its remaining edges.  Signs come from
//! the coboundary structure: contracting the leg of the trivalent diagram
//! and contracting the new arc in either attachment all land on the same
//! degree-one diagram, and the three coefficients form a complete linear
//! relation (no other diagram can contract onto that target).  Rewriting
//! with those coefficients keeps weight-system extensions compatible with
//! the cochain complex.

use crate::diagram::{Diagram, DiagramSum, Edge, EdgeKind, Flavor, Parity, Vertex};
use crate::differential::delta;
use crate::error::{Error, Result};
use crate::ratmat::RationalMatrix;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::collections::{BTreeMap, BTreeSet};

/// A weight system of order `k`: a rational functional on canonical chord
/// diagrams vanishing on every emitted relation.
#[derive(Clone, PartialEq, Debug)]
pub struct WeightSystem {
    pub order: i64,
    pub values: BTreeMap<Diagram, BigRational>,
}

/// True iff every internal vertex is exactly trivalent, every external
/// vertex univalent (arcs do not count), and the degree is zero.  Such
/// diagrams carry no loops.
pub fn is_trivalent(d: &Diagram) -> bool {
    if d.grading().degree != 0 {
        return false;
    }
    for label in 1..=d.internal_count() {
        if d.valence(Vertex::Int { label }) != 3 {
            return false;
        }
    }
    for (i, &c) in d.ext_counts().iter().enumerate() {
        for position in 1..=c {
            if d.valence(Vertex::Ext {
                segment: i + 1,
                position,
            }) != 1
            {
                return false;
            }
        }
    }
    !d.edges().iter().any(|e| e.kind() == EdgeKind::Loop)
}

/// True iff the diagram is a chord diagram: no internal vertices and every
/// edge a chord pairing distinct external vertices.
pub fn is_chord_diagram(d: &Diagram) -> bool {
    d.internal_count() == 0
        && d.edges().iter().all(|e| e.kind() == EdgeKind::Chord)
        && d.external_count() == 2 * d.edges().len()
        && is_trivalent(d)
}

fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            let mut v = vec![first];
            v.append(&mut rest);
            out.push(v);
        }
    }
    out
}

fn perfect_matchings(points: &[usize]) -> Vec<Vec<(usize, usize)>> {
    if points.is_empty() {
        return vec![Vec::new()];
    }
    let first = points[0];
    let mut out = Vec::new();
    for i in 1..points.len() {
        let partner = points[i];
        let rest: Vec<usize> = points[1..]
            .iter()
            .copied()
            .filter(|&p| p != partner)
            .collect();
        for mut sub in perfect_matchings(&rest) {
            let mut m = vec![(first, partner)];
            m.append(&mut sub);
            out.push(m);
        }
    }
    out
}

/// All canonical chord diagrams of order `k`, in a deterministic order.
pub fn chord_diagrams(m: usize, k: i64, flavor: Flavor) -> Vec<Diagram> {
    let mut out: BTreeSet<Diagram> = BTreeSet::new();
    if k < 1 {
        return Vec::new();
    }
    let x = (2 * k) as usize;
    for ext_counts in compositions(x, m) {
        if ext_counts.contains(&0) {
            continue;
        }
        let template = Diagram::raw(m, Parity::Odd, flavor, ext_counts.clone(), 0, Vec::new());
        let points: Vec<usize> = (1..=x).collect();
        'matching: for matching in perfect_matchings(&points) {
            let mut edges = Vec::with_capacity(matching.len());
            for &(a, b) in &matching {
                let (ta, tb) = (template.vertex_at(a), template.vertex_at(b));
                if flavor == Flavor::Braid {
                    if let (
                        Vertex::Ext { segment: s1, .. },
                        Vertex::Ext { segment: s2, .. },
                    ) = (ta, tb)
                    {
                        if s1 == s2 {
                            continue 'matching;
                        }
                    }
                }
                edges.push(Edge {
                    tail: ta,
                    head: tb,
                    label: None,
                });
            }
            let d = Diagram::raw(m, Parity::Odd, flavor, ext_counts.clone(), 0, edges);
            let c = d.canonicalize();
            if !c.is_zero() {
                out.insert(c.diagram);
            }
        }
    }
    out.into_iter().collect()
}

/// All canonical trivalent diagrams of order `k` with exactly one internal
/// vertex: a tripod with `k - 2` spectator chords.
fn one_internal_trivalent(m: usize, k: i64, flavor: Flavor) -> Vec<Diagram> {
    let mut out: BTreeSet<Diagram> = BTreeSet::new();
    if k < 2 {
        return Vec::new();
    }
    let x = (2 * k - 1) as usize;
    for ext_counts in compositions(x, m) {
        if ext_counts.contains(&0) {
            continue;
        }
        let template = Diagram::raw(m, Parity::Odd, flavor, ext_counts.clone(), 1, Vec::new());
        for i in 1..=x {
            for j in i + 1..=x {
                for l in j + 1..=x {
                    let legs = [i, j, l];
                    let rest: Vec<usize> = (1..=x).filter(|p| !legs.contains(p)).collect();
                    'matching: for matching in perfect_matchings(&rest) {
                        let mut edges: Vec<Edge> = legs
                            .iter()
                            .map(|&p| Edge {
                                tail: template.vertex_at(p),
                                head: Vertex::Int { label: 1 },
                                label: None,
                            })
                            .collect();
                        for &(a, b) in &matching {
                            let (ta, tb) = (template.vertex_at(a), template.vertex_at(b));
                            if flavor == Flavor::Braid {
                                if let (
                                    Vertex::Ext { segment: s1, .. },
                                    Vertex::Ext { segment: s2, .. },
                                ) = (ta, tb)
                                {
                                    if s1 == s2 {
                                        continue 'matching;
                                    }
                                }
                            }
                            edges.push(Edge {
                                tail: ta,
                                head: tb,
                                label: None,
                            });
                        }
                        let d = Diagram::raw(
                            m,
                            Parity::Odd,
                            flavor,
                            ext_counts.clone(),
                            1,
                            edges,
                        );
                        if !d.is_valid() {
                            continue;
                        }
                        let c = d.canonicalize();
                        if !c.is_zero() {
                            out.insert(c.diagram);
                        }
                    }
                }
            }
        }
    }
    out.into_iter().collect()
}

/// One STU resolution step.  `d` must be trivalent with at least one
/// internal vertex.  Returns the rewriting of `d` as a sum over diagrams
/// with one internal vertex fewer.
fn stu_step(d: &Diagram) -> Result<DiagramSum> {
    // candidate legs: mixed edges, ordered by the external endpoint position
    let mut legs: Vec<usize> = (0..d.edges().len())
        .filter(|&i| d.edges()[i].kind() == EdgeKind::Mixed)
        .collect();
    legs.sort_by_key(|&i| {
        let e = d.edges()[i];
        let ext = if e.tail.is_external() { e.tail } else { e.head };
        d.global_position(ext)
    });
    if legs.is_empty() {
        return Err(Error::Irreducible(
            "no internal vertex is adjacent to a segment".into(),
        ));
    }
    for &leg in &legs {
        if let Some(sum) = resolve_leg(d, leg)? {
            return Ok(sum);
        }
    }
    Err(Error::Irreducible(
        "every leg resolution has a vanishing diagonal coefficient".into(),
    ))
}

/// Resolve the internal vertex at one mixed edge.  Returns `None` when the
/// relation does not involve `d` (vanishing diagonal coefficient).
fn resolve_leg(d: &Diagram, leg: usize) -> Result<Option<DiagramSum>> {
    let e = d.edges()[leg];
    let (u, z) = match (e.tail, e.head) {
        (t @ Vertex::Int { .. }, h @ Vertex::Ext { .. }) => (t, h),
        (t @ Vertex::Ext { .. }, h @ Vertex::Int { .. }) => (h, t),
        _ => return Err(Error::Irreducible("leg is not a mixed edge".into())),
    };
    let Vertex::Ext { segment, position } = z else {
        unreachable!()
    };
    let Vertex::Int { label: u_label } = u else {
        unreachable!()
    };
    // the other two edges at u
    let others: Vec<usize> = (0..d.edges().len())
        .filter(|&i| i != leg && (d.edges()[i].tail == u || d.edges()[i].head == u))
        .collect();
    if others.len() != 2 {
        return Err(Error::Irreducible(format!(
            "internal vertex u{u_label} is not trivalent"
        )));
    }

    // the shared contraction target
    let target = crate::differential::contract(d, crate::differential::Contractible::Edge(leg))?;
    let target_c = target.canonicalize();
    if target_c.is_zero() {
        // the face this leg would cancel against is already zero in the
        // quotient, so it yields no relation; another leg may work
        return Ok(None);
    }
    let delta_coeff = |x: &Diagram| -> BigRational { delta(x).coefficient(&target_c.diagram) };
    let a_s = delta_coeff(d);
    if a_s.is_zero() {
        return Ok(None);
    }

    // attachments: remove u and z, insert two externals at z's position,
    // rewire the two remaining edges in both orders
    let mut siblings: Vec<Diagram> = Vec::new();
    for swap in [false, true] {
        let (first, second) = if swap {
            (others[1], others[0])
        } else {
            (others[0], others[1])
        };
        let map_vertex = |v: Vertex| -> Vertex {
            match v {
                Vertex::Ext {
                    segment: s,
                    position: p,
                } if s == segment && p > position => Vertex::Ext {
                    segment: s,
                    position: p + 1,
                },
                Vertex::Int { label } if label > u_label => Vertex::Int { label: label - 1 },
                other => other,
            }
        };
        let z1 = Vertex::Ext { segment, position };
        let z2 = Vertex::Ext {
            segment,
            position: position + 1,
        };
        let mut edges: Vec<Edge> = Vec::with_capacity(d.edges().len() - 1);
        for (i, f) in d.edges().iter().enumerate() {
            if i == leg {
                continue;
            }
            let attach = |end: Vertex, at: Vertex| if end == u { at } else { map_vertex(end) };
            let (t, h) = if i == first {
                (attach(f.tail, z1), attach(f.head, z1))
            } else if i == second {
                (attach(f.tail, z2), attach(f.head, z2))
            } else {
                (map_vertex(f.tail), map_vertex(f.head))
            };
            edges.push(Edge {
                tail: t,
                head: h,
                label: None,
            });
        }
        let mut ext_counts = d.ext_counts().to_vec();
        ext_counts[segment - 1] += 1;
        siblings.push(Diagram::raw(
            d.m(),
            d.parity(),
            d.flavor(),
            ext_counts,
            d.internal_count() - 1,
            edges,
        ));
    }

    // assemble the complete relation a_s * d + sum_j r_j * sibling_j = 0
    let mut rewrite = DiagramSum::new();
    let mut sibling_classes: BTreeSet<Diagram> = BTreeSet::new();
    for s in &siblings {
        let c = s.canonicalize();
        if !c.is_zero() {
            sibling_classes.insert(c.diagram);
        }
    }
    for class in sibling_classes {
        let r = delta_coeff(&class);
        if r.is_zero() {
            continue;
        }
        let coeff = -(r / &a_s);
        rewrite.add(coeff, class);
    }
    Ok(Some(rewrite))
}

/// Repeatedly apply STU until only chord diagrams remain.  The result is a
/// sum over canonical chord diagrams.
pub fn stu_reduce(d: &Diagram) -> Result<DiagramSum> {
    if !is_trivalent(d) {
        return Err(Error::InvalidDiagram(
            "stu_reduce expects a trivalent diagram".into(),
        ));
    }
    if d.parity() != Parity::Odd {
        return Err(Error::Unsupported(
            "weight systems live in the odd complex".into(),
        ));
    }
    let mut current = DiagramSum::singleton(d.clone());
    loop {
        // find a term with internal vertices
        let next = current
            .terms()
            .find(|(t, _)| t.internal_count() > 0)
            .map(|(t, c)| (t.clone(), c.clone()));
        let Some((term, coeff)) = next else {
            return Ok(current);
        };
        let rewrite = stu_step(&term)?;
        let minus_one = BigRational::from_integer((-1).into());
        current.add(coeff.clone() * &minus_one, term.clone());
        let _ = term;
        current.add_sum(&coeff, &rewrite);
    }
}

/// The 4T generators (and, for links, the 1T generators) at order `k`.
///
/// Each 4T instance is the difference of the two chord expansions of a
/// one-internal-vertex trivalent diagram resolved at two different legs.
/// The 1T generators are the chord diagrams containing an isolated chord: a
/// chord whose endpoints are consecutive external vertices of one segment.
pub fn four_t_relations(m: usize, k: i64, flavor: Flavor) -> Vec<DiagramSum> {
    let mut out: Vec<DiagramSum> = Vec::new();
    let mut seen: BTreeSet<String> = BTreeSet::new();

    for s in one_internal_trivalent(m, k, flavor) {
        let legs: Vec<usize> = (0..s.edges().len())
            .filter(|&i| s.edges()[i].kind() == EdgeKind::Mixed)
            .collect();
        let mut expansions: Vec<DiagramSum> = Vec::new();
        for &leg in &legs {
            if let Ok(Some(rw)) = resolve_leg(&s, leg) {
                expansions.push(rw);
            }
        }
        for i in 0..expansions.len() {
            for j in i + 1..expansions.len() {
                let mut rel = expansions[i].clone();
                let minus_one = BigRational::from_integer((-1).into());
                let mut other = expansions[j].clone();
                other.scale(&minus_one);
                rel.add_sum(&BigRational::one(), &other);
                if rel.is_zero() {
                    continue;
                }
                let normalized = normalize_relation(rel);
                let key = normalized.to_text();
                if seen.insert(key) {
                    out.push(normalized);
                }
            }
        }
    }

    if flavor == Flavor::Link {
        for c in chord_diagrams(m, k, flavor) {
            if has_isolated_chord(&c) {
                let rel = DiagramSum::singleton(c);
                let key = rel.to_text();
                if seen.insert(key) {
                    out.push(rel);
                }
            }
        }
    }
    out
}

/// Scale a relation so its leading coefficient is +1.
fn normalize_relation(mut rel: DiagramSum) -> DiagramSum {
    let lead = rel.terms().next().map(|(_, c)| c.clone());
    if let Some(c) = lead {
        if !c.is_zero() {
            let inv = c.recip();
            rel.scale(&inv);
        }
    }
    rel
}

/// A chord whose endpoints are consecutive external vertices on a segment.
pub fn has_isolated_chord(d: &Diagram) -> bool {
    d.edges().iter().any(|e| match (e.tail, e.head) {
        (
            Vertex::Ext {
                segment: s1,
                position: p1,
            },
            Vertex::Ext {
                segment: s2,
                position: p2,
            },
        ) => s1 == s2 && (p1 as i64 - p2 as i64).abs() == 1,
        _ => false,
    })
}

/// A basis of the space of weight systems of order `k`: the annihilator of
/// the 4T (and 1T) relations inside the dual of the chord-diagram span.
pub fn weight_space(m: usize, k: i64, flavor: Flavor) -> Result<Vec<WeightSystem>> {
    let chords = chord_diagrams(m, k, flavor);
    let index: BTreeMap<&Diagram, usize> = chords.iter().enumerate().map(|(i, d)| (d, i)).collect();
    let relations = four_t_relations(m, k, flavor);
    let mut matrix = RationalMatrix::new(relations.len(), chords.len());
    for (r, rel) in relations.iter().enumerate() {
        for (d, c) in rel.terms() {
            let Some(&j) = index.get(d) else {
                return Err(Error::BasisMismatch(format!(
                    "relation term outside the chord basis:\n{}",
                    d.to_text()
                )));
            };
            matrix.set(r, j, c.clone());
        }
    }
    let nullspace = matrix.nullspace();
    Ok(nullspace
        .into_iter()
        .map(|v| WeightSystem {
            order: k,
            values: chords
                .iter()
                .cloned()
                .zip(v)
                .filter(|(_, c)| !c.is_zero())
                .collect(),
        })
        .collect())
}

impl WeightSystem {
    /// Evaluate on a chord diagram (zero off the stored support).
    pub fn evaluate_chord(&self, d: &Diagram) -> BigRational {
        self.values.get(d).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Evaluate on any trivalent diagram via STU reduction.
    pub fn evaluate(&self, d: &Diagram) -> Result<BigRational> {
        if is_chord_diagram(d) {
            return Ok(self.evaluate_chord(d));
        }
        let reduced = stu_reduce(d)?;
        let mut acc = BigRational::zero();
        for (c, coeff) in reduced.terms() {
            acc += coeff * self.evaluate_chord(c);
        }
        Ok(acc)
    }

    /// Evaluate on a diagram sum.
    pub fn evaluate_sum(&self, s: &DiagramSum) -> Result<BigRational> {
        let mut acc = BigRational::zero();
        for (d, coeff) in s.terms() {
            acc += coeff * self.evaluate(d)?;
        }
        Ok(acc)
    }
}
