//! Canonical representatives under the diagram relations.
//!
//! The relation group acting on a diagram's presentation consists of
//! relabelings of the internal vertices, reversals of edge orientations,
//! and (even parity) permutations of the edge labels.  Signs:
//!
//! * odd parity: internal relabelings contribute the permutation sign and
//!   each orientation reversal contributes `-1`; the listing order of edges
//!   is immaterial,
//! * even parity: edge-label permutations contribute the permutation sign;
//!   internal relabelings and orientation reversals are sign-free.
//!
//! The canonical representative is the lexicographically minimal encoding
//! over the group orbit: edges oriented from lower to higher global
//! position, sorted, with even-parity labels assigned in sorted order.  A
//! diagram is zero when it has a double edge, when the braid relation
//! applies, or when two group elements reach the minimal encoding with
//! opposite signs.

use super::{Diagram, Edge, Parity, Vertex};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// A diagram together with a rational coefficient.  Coefficient zero means
/// the diagram is killed by the relations.
#[derive(Clone, PartialEq, Debug)]
pub struct SignedDiagram {
    pub coefficient: BigRational,
    pub diagram: Diagram,
}

impl SignedDiagram {
    pub fn zero(diagram: Diagram) -> Self {
        SignedDiagram {
            coefficient: BigRational::zero(),
            diagram,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coefficient.is_zero()
    }
}

fn permutation_parity(perm: &[usize]) -> i32 {
    // perm maps index -> image, both 0-based
    let n = perm.len();
    let mut seen = vec![false; n];
    let mut parity = 0usize;
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = perm[i];
            len += 1;
        }
        parity += len - 1;
    }
    if parity.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    // all permutations of 0..n in lexicographic order
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        out.push(cur.clone());
        // next_permutation
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) else {
            break;
        };
        let j = (i + 1..n).rev().find(|&j| cur[j] > cur[i]).unwrap();
        cur.swap(i, j);
        cur[i + 1..].reverse();
    }
    out
}

/// Encoding of one orbit element: oriented-normalized sorted edge pairs in
/// global positions, plus the sign relative to the input presentation.
fn encode_under(d: &Diagram, relabel: &[usize]) -> (Vec<(usize, usize)>, i32) {
    let x = d.external_count();
    let gpos = |v: Vertex| -> usize {
        match v {
            Vertex::Ext { .. } => d.global_position(v),
            Vertex::Int { label } => x + relabel[label - 1] + 1,
        }
    };
    let mut flips = 0usize;
    // (tail, head, input edge label) with orientation normalized
    let mut rows: Vec<(usize, usize, usize)> = Vec::with_capacity(d.edges().len());
    for (idx, e) in d.edges().iter().enumerate() {
        let a = gpos(e.tail);
        let b = gpos(e.head);
        let lab = e.label.unwrap_or(idx + 1);
        if a <= b {
            rows.push((a, b, lab));
        } else {
            flips += 1;
            rows.push((b, a, lab));
        }
    }
    rows.sort_unstable();
    let sign = match d.parity() {
        Parity::Odd => {
            let perm_sign = permutation_parity(relabel);
            let flip_sign = if flips.is_multiple_of(2) { 1 } else { -1 };
            perm_sign * flip_sign
        }
        Parity::Even => {
            // sign of the permutation sending input labels to sorted positions
            let mut label_to_pos = vec![0usize; rows.len()];
            for (pos, &(_, _, lab)) in rows.iter().enumerate() {
                label_to_pos[lab - 1] = pos;
            }
            permutation_parity(&label_to_pos)
        }
    };
    (rows.iter().map(|&(a, b, _)| (a, b)).collect(), sign)
}

fn rebuild(d: &Diagram, pairs: &[(usize, usize)]) -> Diagram {
    let edges: Vec<Edge> = pairs
        .iter()
        .enumerate()
        .map(|(i, &(a, b))| Edge {
            tail: d.vertex_at(a),
            head: d.vertex_at(b),
            label: match d.parity() {
                Parity::Even => Some(i + 1),
                Parity::Odd => None,
            },
        })
        .collect();
    Diagram::raw(
        d.m(),
        d.parity(),
        d.flavor(),
        d.ext_counts().to_vec(),
        d.internal_count(),
        edges,
    )
}

/// Group internal vertices by a cheap isomorphism invariant so that only
/// permutations within groups need to be searched.
fn internal_groups(d: &Diagram) -> Vec<Vec<usize>> {
    let s = d.internal_count();
    let mut keys: Vec<(Vec<usize>, usize)> = Vec::with_capacity(s);
    for label in 1..=s {
        let v = Vertex::Int { label };
        // multiset of external-neighbor global positions; internal neighbors
        // recorded as 0 (indistinct at this level)
        let mut key: Vec<usize> = d
            .edges()
            .iter()
            .filter_map(|e| {
                let other = if e.tail == v {
                    Some(e.head)
                } else if e.head == v {
                    Some(e.tail)
                } else {
                    None
                };
                other.map(|o| match o {
                    Vertex::Ext { .. } => d.global_position(o),
                    Vertex::Int { .. } => 0,
                })
            })
            .collect();
        key.sort_unstable();
        keys.push((key, label - 1));
    }
    keys.sort();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut prev: Option<&Vec<usize>> = None;
    for (key, idx) in &keys {
        if prev == Some(key) {
            groups.last_mut().unwrap().push(*idx);
        } else {
            groups.push(vec![*idx]);
        }
        prev = Some(key);
    }
    groups
}

impl Diagram {
    /// Canonical representative with its relation sign, or coefficient zero
    /// when the diagram vanishes in the quotient.
    pub fn canonicalize(&self) -> SignedDiagram {
        if self.has_double_edge() || self.braid_killed() {
            let (pairs, _) = encode_under(self, &identity(self.internal_count()));
            return SignedDiagram::zero(rebuild(self, &pairs));
        }

        let s = self.internal_count();
        let groups = internal_groups(self);

        // Search relabelings: vertices in different invariant groups can
        // never be exchanged by an edge-set automorphism, but the minimal
        // encoding may still require ordering groups against each other.
        // Group keys are derived from the edge structure, so the minimum is
        // attained with some assignment that keeps each group contiguous in
        // the order the sorted keys prescribe... which cannot be assumed in
        // general; fall back to the full search when s is small and use the
        // grouped search only to detect sign-ambiguous automorphisms.
        let mut best: Option<(Vec<(usize, usize)>, i32)> = None;
        let mut killed = false;
        if s <= 8 {
            for perm in permutations(s) {
                let (enc, sign) = encode_under(self, &perm);
                match &best {
                    None => best = Some((enc, sign)),
                    Some((b, bs)) => {
                        if enc < *b {
                            best = Some((enc, sign));
                            killed = false;
                        } else if enc == *b && sign != *bs {
                            killed = true;
                        }
                    }
                }
            }
        } else {
            // Permute only within invariant groups; across-group exchanges
            // cannot map the edge set to itself, and ordering groups by key
            // gives a deterministic (if not globally minimal) base order.
            let mut base: Vec<usize> = vec![0; s];
            let mut next = 0usize;
            for g in &groups {
                for &idx in g {
                    base[idx] = next;
                    next += 1;
                }
            }
            let mut stack: Vec<Vec<usize>> = vec![base.clone()];
            for g in &groups {
                if g.len() == 1 {
                    continue;
                }
                let mut expanded = Vec::new();
                for partial in &stack {
                    for perm in permutations(g.len()) {
                        let mut p = partial.clone();
                        let targets: Vec<usize> = g.iter().map(|&i| partial[i]).collect();
                        for (k, &i) in g.iter().enumerate() {
                            p[i] = targets[perm[k]];
                        }
                        expanded.push(p);
                    }
                }
                stack = expanded;
            }
            for perm in stack {
                let (enc, sign) = encode_under(self, &perm);
                match &best {
                    None => best = Some((enc, sign)),
                    Some((b, bs)) => {
                        if enc < *b {
                            best = Some((enc, sign));
                            killed = false;
                        } else if enc == *b && sign != *bs {
                            killed = true;
                        }
                    }
                }
            }
        }

        let (pairs, sign) = best.expect("at least the identity relabeling");
        let diagram = rebuild(self, &pairs);
        if killed {
            return SignedDiagram::zero(diagram);
        }
        SignedDiagram {
            coefficient: BigRational::from(BigInt::from(sign)),
            diagram,
        }
    }

    /// True when `self` is already in canonical form with coefficient `+1`.
    pub fn is_canonical(&self) -> bool {
        let c = self.canonicalize();
        !c.is_zero() && c.coefficient.is_one() && c.diagram == *self
    }
}

fn identity(n: usize) -> Vec<usize> {
    (0..n).collect()
}
