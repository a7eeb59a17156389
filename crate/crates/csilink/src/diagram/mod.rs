//! Decorated graphs on `m` oriented segments.
//!
//! A diagram consists of external vertices sitting on the segments (in a
//! fixed linear order per segment), internal vertices off the segments, and
//! oriented edges between them.  Edges come in four kinds depending on
//! endpoint classification: internal (both endpoints internal), mixed,
//! chord (both external), and loop (a single external vertex).  In the even
//! variant edges additionally carry a labeling `1..=|e|`; in the odd variant
//! the orientations themselves carry sign information.
//!
//! Segment endpoint markers are structural sentinels: they are not stored,
//! not labeled, and do not count toward the external vertex count.

mod canonical;
mod enumerate;
mod sum;
mod text;

pub use canonical::SignedDiagram;
pub use enumerate::{enumerate_basis, EnumLimits};
pub use sum::DiagramSum;
pub use text::{parse_diagram, parse_diagram_sum};

use crate::error::{Error, Result};
use std::fmt;

/// Parity of the ambient dimension `n`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Parity {
    Even,
    Odd,
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Parity::Even => write!(f, "even"),
            Parity::Odd => write!(f, "odd"),
        }
    }
}

/// Whether the diagram lives in the link or the braid complex.
///
/// Braid diagrams additionally vanish when they contain a loop or a chord
/// with both endpoints on a single segment.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Flavor {
    Link,
    Braid,
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Flavor::Link => write!(f, "link"),
            Flavor::Braid => write!(f, "braid"),
        }
    }
}

/// A vertex of a diagram.  Externals are addressed by segment and position
/// along the segment, internals by label; all indices are 1-based.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Vertex {
    Ext { segment: usize, position: usize },
    Int { label: usize },
}

impl Vertex {
    pub fn is_external(&self) -> bool {
        matches!(self, Vertex::Ext { .. })
    }

    pub fn is_internal(&self) -> bool {
        matches!(self, Vertex::Int { .. })
    }
}

/// Edge kinds, determined by endpoint classification.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum EdgeKind {
    Internal,
    Mixed,
    Chord,
    Loop,
}

/// An oriented edge.  `label` is present exactly in even parity.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Edge {
    pub tail: Vertex,
    pub head: Vertex,
    pub label: Option<usize>,
}

impl Edge {
    pub fn kind(&self) -> EdgeKind {
        match (self.tail, self.head) {
            (Vertex::Int { .. }, Vertex::Int { .. }) => EdgeKind::Internal,
            (Vertex::Ext { .. }, Vertex::Ext { .. }) => {
                if self.tail == self.head {
                    EdgeKind::Loop
                } else {
                    EdgeKind::Chord
                }
            }
            _ => EdgeKind::Mixed,
        }
    }

    /// Unordered endpoint pair, used for double-edge detection.
    fn unordered(&self) -> (Vertex, Vertex) {
        if self.tail <= self.head {
            (self.tail, self.head)
        } else {
            (self.head, self.tail)
        }
    }
}

/// Order and degree of a diagram.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Grading {
    pub order: i64,
    pub degree: i64,
}

/// A single violation found by [`Diagram::violations`].
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Violation {
    InternalValence { label: usize, valence: usize },
    InternalSelfEdge { label: usize },
    IsolatedExternal { segment: usize, position: usize },
    UngroundedComponent { vertices: Vec<usize> },
    DanglingEndpoint(String),
    BraidLoop,
    BraidSingleSegmentChord,
    EdgeLabels(String),
    SegmentCount(String),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::InternalValence { label, valence } => {
                write!(f, "internal vertex u{label} valence {valence} < 3")
            }
            Violation::InternalSelfEdge { label } => {
                write!(f, "edge connects internal vertex u{label} to itself")
            }
            Violation::IsolatedExternal { segment, position } => {
                write!(f, "external vertex v{segment}_{position} has no edge")
            }
            Violation::UngroundedComponent { vertices } => {
                write!(
                    f,
                    "connected component {vertices:?} touches no segment"
                )
            }
            Violation::DanglingEndpoint(s) => write!(f, "edge endpoint out of range: {s}"),
            Violation::BraidLoop => write!(f, "braid diagram contains loop"),
            Violation::BraidSingleSegmentChord => {
                write!(f, "braid diagram contains single-segment chord")
            }
            Violation::EdgeLabels(s) => write!(f, "edge labels: {s}"),
            Violation::SegmentCount(s) => write!(f, "segments: {s}"),
        }
    }
}

/// A decorated graph on `m` oriented segments.
///
/// External vertices are implicit: segment `j` carries `ext_counts[j-1]`
/// of them, addressed as `Vertex::Ext { segment: j, position: 1.. }`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Diagram {
    m: usize,
    parity: Parity,
    flavor: Flavor,
    ext_counts: Vec<usize>,
    internal_count: usize,
    edges: Vec<Edge>,
}

impl Diagram {
    pub fn new(
        m: usize,
        parity: Parity,
        flavor: Flavor,
        ext_counts: Vec<usize>,
        internal_count: usize,
        edges: Vec<Edge>,
    ) -> Result<Self> {
        if m == 0 || ext_counts.len() != m {
            return Err(Error::InvalidDiagram(format!(
                "expected {m} segments, got {} external lists",
                ext_counts.len()
            )));
        }
        let d = Diagram {
            m,
            parity,
            flavor,
            ext_counts,
            internal_count,
            edges,
        };
        let violations = d.violations();
        if violations.is_empty() {
            Ok(d)
        } else {
            let msgs: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
            Err(Error::InvalidDiagram(msgs.join("; ")))
        }
    }

    /// Diagram with no vertices and no edges; the unit of the shuffle product.
    pub fn empty(m: usize, parity: Parity, flavor: Flavor) -> Self {
        Diagram {
            m,
            parity,
            flavor,
            ext_counts: vec![0; m],
            internal_count: 0,
            edges: Vec::new(),
        }
    }

    /// Construct without validating.  Used internally by operations that
    /// produce intermediate diagrams (e.g. contraction images, which may
    /// carry double edges until canonicalization kills them).
    pub(crate) fn raw(
        m: usize,
        parity: Parity,
        flavor: Flavor,
        ext_counts: Vec<usize>,
        internal_count: usize,
        edges: Vec<Edge>,
    ) -> Self {
        Diagram {
            m,
            parity,
            flavor,
            ext_counts,
            internal_count,
            edges,
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn ext_counts(&self) -> &[usize] {
        &self.ext_counts
    }

    pub fn internal_count(&self) -> usize {
        self.internal_count
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn external_count(&self) -> usize {
        self.ext_counts.iter().sum()
    }

    pub fn vertex_count(&self) -> usize {
        self.external_count() + self.internal_count
    }

    /// Global position of a vertex: externals of segment 1 in linear order,
    /// then segment 2, ..., then internal vertices in label order.  1-based.
    pub fn global_position(&self, v: Vertex) -> usize {
        match v {
            Vertex::Ext { segment, position } => {
                self.ext_counts[..segment - 1].iter().sum::<usize>() + position
            }
            Vertex::Int { label } => self.external_count() + label,
        }
    }

    /// Inverse of [`Self::global_position`].
    pub fn vertex_at(&self, global: usize) -> Vertex {
        let x = self.external_count();
        if global > x {
            return Vertex::Int { label: global - x };
        }
        let mut acc = 0;
        for (i, &c) in self.ext_counts.iter().enumerate() {
            if global <= acc + c {
                return Vertex::Ext {
                    segment: i + 1,
                    position: global - acc,
                };
            }
            acc += c;
        }
        unreachable!("global position {global} out of range")
    }

    fn vertex_in_range(&self, v: Vertex) -> bool {
        match v {
            Vertex::Ext { segment, position } => {
                segment >= 1
                    && segment <= self.m
                    && position >= 1
                    && position <= self.ext_counts[segment - 1]
            }
            Vertex::Int { label } => label >= 1 && label <= self.internal_count,
        }
    }

    /// Structural invariant check; an empty list means the diagram is valid.
    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.ext_counts.len() != self.m {
            out.push(Violation::SegmentCount(format!(
                "m={} but {} segment lists",
                self.m,
                self.ext_counts.len()
            )));
            return out;
        }
        for e in &self.edges {
            for v in [e.tail, e.head] {
                if !self.vertex_in_range(v) {
                    out.push(Violation::DanglingEndpoint(format!("{v:?}")));
                }
            }
        }
        if !out.is_empty() {
            return out;
        }

        // valence counts; a loop contributes 2 to its vertex
        let mut valence = vec![0usize; self.vertex_count()];
        for e in &self.edges {
            valence[self.global_position(e.tail) - 1] += 1;
            valence[self.global_position(e.head) - 1] += 1;
        }
        for label in 1..=self.internal_count {
            let val = valence[self.global_position(Vertex::Int { label }) - 1];
            if val < 3 {
                out.push(Violation::InternalValence { label, valence: val });
            }
        }
        for (i, &c) in self.ext_counts.iter().enumerate() {
            for position in 1..=c {
                let v = Vertex::Ext {
                    segment: i + 1,
                    position,
                };
                if valence[self.global_position(v) - 1] == 0 {
                    out.push(Violation::IsolatedExternal {
                        segment: i + 1,
                        position,
                    });
                }
            }
        }
        for e in &self.edges {
            if e.tail == e.head {
                if let Vertex::Int { label } = e.tail {
                    out.push(Violation::InternalSelfEdge { label });
                }
            }
        }
        // every component must contain an external vertex; a closed
        // component would make the associated integral diverge and has no
        // dual in the chord-diagram picture
        let x = self.external_count();
        for comp in self.components() {
            if comp.iter().all(|&g| g > x) {
                out.push(Violation::UngroundedComponent { vertices: comp });
            }
        }
        if self.flavor == Flavor::Braid {
            for e in &self.edges {
                match e.kind() {
                    EdgeKind::Loop => out.push(Violation::BraidLoop),
                    EdgeKind::Chord => {
                        if let (
                            Vertex::Ext { segment: s1, .. },
                            Vertex::Ext { segment: s2, .. },
                        ) = (e.tail, e.head)
                        {
                            if s1 == s2 {
                                out.push(Violation::BraidSingleSegmentChord);
                            }
                        }
                    }
                    _ => {}
                }
            }
        }
        match self.parity {
            Parity::Even => {
                let mut labels: Vec<usize> = self.edges.iter().filter_map(|e| e.label).collect();
                labels.sort_unstable();
                let expect: Vec<usize> = (1..=self.edges.len()).collect();
                if labels != expect {
                    out.push(Violation::EdgeLabels(format!(
                        "expected a permutation of 1..={}, got {labels:?}",
                        self.edges.len()
                    )));
                }
            }
            Parity::Odd => {
                if self.edges.iter().any(|e| e.label.is_some()) {
                    out.push(Violation::EdgeLabels(
                        "odd parity edges must be unlabeled".into(),
                    ));
                }
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.violations().is_empty()
    }

    /// Order `|e| - |v_int|` and degree `2|e| - 3|v_int| - |v_ext|`.
    pub fn grading(&self) -> Grading {
        let e = self.edges.len() as i64;
        let vi = self.internal_count as i64;
        let vx = self.external_count() as i64;
        Grading {
            order: e - vi,
            degree: 2 * e - 3 * vi - vx,
        }
    }

    /// True when some unordered vertex pair carries more than one edge.
    pub fn has_double_edge(&self) -> bool {
        let mut pairs: Vec<(Vertex, Vertex)> = self.edges.iter().map(|e| e.unordered()).collect();
        pairs.sort_unstable();
        pairs.windows(2).any(|w| w[0] == w[1])
    }

    /// True when the braid relation kills the diagram: a loop or a chord on
    /// a single segment.  Always false for link flavor.
    pub fn braid_killed(&self) -> bool {
        self.flavor == Flavor::Braid
            && self.edges.iter().any(|e| match (e.tail, e.head) {
                (Vertex::Ext { segment: s1, .. }, Vertex::Ext { segment: s2, .. }) => s1 == s2,
                _ => false,
            })
    }

    /// Valence of a vertex (a loop contributes 2).
    pub fn valence(&self, v: Vertex) -> usize {
        self.edges
            .iter()
            .map(|e| (e.tail == v) as usize + (e.head == v) as usize)
            .sum()
    }

    /// Connected components of the underlying graph, ignoring arcs.
    /// Each component is a sorted list of global vertex positions.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.vertex_count();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut Vec<usize>, i: usize) -> usize {
            if parent[i] != i {
                let r = find(parent, parent[i]);
                parent[i] = r;
            }
            parent[i]
        }
        for e in &self.edges {
            let a = self.global_position(e.tail) - 1;
            let b = self.global_position(e.head) - 1;
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent[ra] = rb;
            }
        }
        let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for i in 0..n {
            let r = find(&mut parent, i);
            groups.entry(r).or_default().push(i + 1);
        }
        groups.into_values().collect()
    }

    /// Serialize in the line-oriented text format.
    pub fn to_text(&self) -> String {
        text::serialize_diagram(self)
    }

    /// Split into connected components, each as a stand-alone diagram on the
    /// same segments: external positions compress per segment preserving
    /// order, internal labels compress preserving order.
    pub fn split_components(&self) -> Vec<Diagram> {
        let comps = self.components();
        self.subdiagrams(&comps)
    }

    /// Split into groups of components that can be integrated
    /// independently: two components couple whenever they put external
    /// vertices on a common segment (their parameters interleave there), so
    /// groups are the transitive closure of segment sharing.
    pub fn split_segment_groups(&self) -> Vec<Diagram> {
        let comps = self.components();
        let n = comps.len();
        let segs_of = |comp: &Vec<usize>| -> Vec<usize> {
            comp.iter()
                .filter_map(|&g| match self.vertex_at(g) {
                    Vertex::Ext { segment, .. } => Some(segment),
                    Vertex::Int { .. } => None,
                })
                .collect()
        };
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut Vec<usize>, i: usize) -> usize {
            if parent[i] != i {
                let r = find(parent, parent[i]);
                parent[i] = r;
            }
            parent[i]
        }
        for i in 0..n {
            for j in i + 1..n {
                let si = segs_of(&comps[i]);
                let sj = segs_of(&comps[j]);
                if si.iter().any(|s| sj.contains(s)) {
                    let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                    if ri != rj {
                        parent[ri] = rj;
                    }
                }
            }
        }
        let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for (i, comp) in comps.iter().enumerate() {
            let r = find(&mut parent, i);
            groups.entry(r).or_default().extend(comp.iter().copied());
        }
        let mut vertex_sets: Vec<Vec<usize>> = groups.into_values().collect();
        for set in &mut vertex_sets {
            set.sort_unstable();
        }
        vertex_sets.sort();
        self.subdiagrams(&vertex_sets)
    }

    fn subdiagrams(&self, vertex_sets: &[Vec<usize>]) -> Vec<Diagram> {
        vertex_sets
            .iter()
            .map(|comp| {
                let in_comp: std::collections::BTreeSet<usize> = comp.iter().copied().collect();
                let mut ext_counts = vec![0usize; self.m];
                let mut position_map: std::collections::BTreeMap<Vertex, Vertex> =
                    Default::default();
                let mut internal_count = 0usize;
                for g in 1..=self.vertex_count() {
                    if !in_comp.contains(&g) {
                        continue;
                    }
                    match self.vertex_at(g) {
                        v @ Vertex::Ext { segment, .. } => {
                            ext_counts[segment - 1] += 1;
                            position_map.insert(
                                v,
                                Vertex::Ext {
                                    segment,
                                    position: ext_counts[segment - 1],
                                },
                            );
                        }
                        v @ Vertex::Int { .. } => {
                            internal_count += 1;
                            position_map.insert(
                                v,
                                Vertex::Int {
                                    label: internal_count,
                                },
                            );
                        }
                    }
                }
                let edges: Vec<Edge> = self
                    .edges
                    .iter()
                    .filter(|e| in_comp.contains(&self.global_position(e.tail)))
                    .map(|e| Edge {
                        tail: position_map[&e.tail],
                        head: position_map[&e.head],
                        label: e.label,
                    })
                    .collect();
                // even-parity labels are renumbered by surviving order
                let edges = match self.parity {
                    Parity::Odd => edges,
                    Parity::Even => {
                        let mut sorted: Vec<usize> = (0..edges.len()).collect();
                        sorted.sort_by_key(|&i| edges[i].label);
                        let mut relabeled = edges.clone();
                        for (new_label, &i) in sorted.iter().enumerate() {
                            relabeled[i].label = Some(new_label + 1);
                        }
                        relabeled
                    }
                };
                Diagram::raw(
                    self.m,
                    self.parity,
                    self.flavor,
                    ext_counts,
                    internal_count,
                    edges,
                )
            })
            .collect()
    }
}
