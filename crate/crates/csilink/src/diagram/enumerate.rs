//! Exhaustive enumeration of canonical basis diagrams in a given bidegree.
//!
//! A diagram of order `o` and degree `d` has `|e| = o + s` edges and
//! `x = 2o - s - d` external vertices when it has `s` internal ones, so the
//! total vertex count is fixed at `2o - d`.  Skeletons are generated as edge
//! sets over the candidate pairs (plus loops in link flavor), pruned by the
//! valence constraints, then canonicalized and deduplicated.
//!
//! Bases are fully supported: every segment carries at least one external
//! vertex.  The contraction differential preserves the support of a diagram
//! exactly, so the graded complex splits over supports and the summand on a
//! strict subset of segments is a copy of the complex on fewer strands.
//! Enumerating the fully-supported summand keeps the degree-zero cohomology
//! in step with the chord-diagram weight spaces.

use super::{Diagram, Edge, Flavor, Parity, Vertex};
use crate::error::{Error, Result};
use std::collections::BTreeSet;

/// Resource limits for enumeration.
#[derive(Clone, Copy, Debug)]
pub struct EnumLimits {
    /// Maximum total vertex count `|v_ext| + |v_int|`.
    pub max_vertices: usize,
}

impl Default for EnumLimits {
    fn default() -> Self {
        EnumLimits { max_vertices: 12 }
    }
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

struct Search<'a> {
    candidates: &'a [(usize, usize)],
    target_edges: usize,
    valence: Vec<usize>,
    // minimum valence per vertex (3 internal, 1 external)
    min_valence: &'a [usize],
    // last candidate index incident to each vertex
    last_incident: &'a [usize],
    chosen: Vec<usize>,
    out: Vec<Vec<usize>>,
}

impl Search<'_> {
    fn deficit(&self) -> usize {
        self.valence
            .iter()
            .zip(self.min_valence)
            .map(|(&v, &m)| m.saturating_sub(v))
            .sum()
    }

    fn run(&mut self, from: usize) {
        let remaining = self.target_edges - self.chosen.len();
        if remaining == 0 {
            if self.deficit() == 0 {
                self.out.push(self.chosen.clone());
            }
            return;
        }
        if self.candidates.len() - from < remaining {
            return;
        }
        if self.deficit() > 2 * remaining {
            return;
        }
        // a vertex whose incidences are all behind `from` can no longer be
        // completed
        for v in 0..self.valence.len() {
            if self.valence[v] < self.min_valence[v] && self.last_incident[v] < from {
                return;
            }
        }
        // include candidate `from` or skip it
        let (a, b) = self.candidates[from];
        self.valence[a - 1] += 1;
        self.valence[b - 1] += 1;
        self.chosen.push(from);
        self.run(from + 1);
        self.chosen.pop();
        self.valence[a - 1] -= 1;
        self.valence[b - 1] -= 1;
        self.run(from + 1);
    }
}

/// All canonical diagrams with the given parameters and grading, in a
/// deterministic order.
pub fn enumerate_basis(
    m: usize,
    parity: Parity,
    flavor: Flavor,
    order: i64,
    degree: i64,
    limits: EnumLimits,
) -> Result<Vec<Diagram>> {
    if order < 1 || m < 1 {
        return Err(Error::InvalidDiagram(format!(
            "enumeration requires order >= 1 and m >= 1, got order={order}, m={m}"
        )));
    }
    if degree < 0 {
        // valence bounds force degree >= 0
        return Ok(Vec::new());
    }
    let total_vertices = 2 * order - degree;
    if total_vertices < 0 {
        return Ok(Vec::new());
    }
    let total_vertices = total_vertices as usize;
    if total_vertices > limits.max_vertices {
        return Err(Error::ResourceCap(format!(
            "bidegree (o={order}, d={degree}) needs {total_vertices} vertices, cap is {}",
            limits.max_vertices
        )));
    }

    let mut found: BTreeSet<Diagram> = BTreeSet::new();
    let s_max = (2 * order - degree).max(0) as usize;
    for s in 0..=s_max {
        let x = 2 * order - s as i64 - degree;
        if x < 0 {
            continue;
        }
        let x = x as usize;
        let e_count = (order + s as i64) as usize;
        // quick feasibility: handshake with minimum valences
        if 3 * s + x > 2 * e_count {
            continue;
        }
        if x < m {
            // full support is impossible
            continue;
        }
        for ext_counts in compositions(x, m) {
            if ext_counts.contains(&0) {
                continue;
            }
            collect_skeletons(
                m,
                parity,
                flavor,
                &ext_counts,
                s,
                e_count,
                &mut found,
            );
        }
    }
    Ok(found.into_iter().collect())
}

fn collect_skeletons(
    m: usize,
    parity: Parity,
    flavor: Flavor,
    ext_counts: &[usize],
    internal_count: usize,
    e_count: usize,
    found: &mut BTreeSet<Diagram>,
) {
    let x: usize = ext_counts.iter().sum();
    let n = x + internal_count;
    let template = Diagram::raw(
        m,
        parity,
        flavor,
        ext_counts.to_vec(),
        internal_count,
        Vec::new(),
    );
    // candidate unordered pairs in global positions (1-based)
    let mut candidates: Vec<(usize, usize)> = Vec::new();
    let same_segment = |a: usize, b: usize| -> bool {
        match (template.vertex_at(a), template.vertex_at(b)) {
            (Vertex::Ext { segment: s1, .. }, Vertex::Ext { segment: s2, .. }) => s1 == s2,
            _ => false,
        }
    };
    for a in 1..=n {
        for b in a..=n {
            if a == b {
                // loops only at external vertices, and never for braids
                if a <= x && flavor == Flavor::Link {
                    candidates.push((a, b));
                }
                continue;
            }
            if flavor == Flavor::Braid && same_segment(a, b) {
                continue;
            }
            candidates.push((a, b));
        }
    }
    if candidates.len() < e_count {
        return;
    }

    let mut min_valence = vec![0usize; n];
    for g in 1..=n {
        min_valence[g - 1] = if g <= x { 1 } else { 3 };
    }
    let mut last_incident = vec![0usize; n];
    for (i, &(a, b)) in candidates.iter().enumerate() {
        last_incident[a - 1] = i;
        last_incident[b - 1] = i;
    }
    // 0-based candidate index space; vertices with no candidates at all are
    // unsatisfiable
    if (0..n).any(|v| min_valence[v] > 0 && !candidates.iter().any(|&(a, b)| a == v + 1 || b == v + 1))
    {
        return;
    }

    let mut search = Search {
        candidates: &candidates,
        target_edges: e_count,
        valence: vec![0; n],
        min_valence: &min_valence,
        last_incident: &last_incident,
        chosen: Vec::new(),
        out: Vec::new(),
    };
    search.run(0);

    for chosen in search.out {
        let edges: Vec<Edge> = chosen
            .iter()
            .enumerate()
            .map(|(i, &ci)| {
                let (a, b) = candidates[ci];
                Edge {
                    tail: template.vertex_at(a),
                    head: template.vertex_at(b),
                    label: match parity {
                        Parity::Even => Some(i + 1),
                        Parity::Odd => None,
                    },
                }
            })
            .collect();
        let d = Diagram::raw(
            m,
            parity,
            flavor,
            ext_counts.to_vec(),
            internal_count,
            edges,
        );
        // the search enforces the valence bounds; this rejects skeletons
        // with components that never touch a segment
        if !d.is_valid() {
            continue;
        }
        let c = d.canonicalize();
        if !c.is_zero() {
            found.insert(c.diagram);
        }
    }
}
