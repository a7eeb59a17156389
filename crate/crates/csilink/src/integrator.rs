//! Monte Carlo evaluation of the configuration space integrals attached to
//! degree-zero diagrams, the anomaly correction, and the assembly of
//! invariants from weight systems.
//!
//! The integrand at a configuration is the pulled-back product of
//! normalized sphere forms paired with the canonical fiber frame: one
//! tangent direction per strand parameter (in segment order) followed by
//! three coordinate directions per free point.  Each edge contributes the
//! two components of its direction-map differential in a right-handed
//! orthonormal frame at the image point, and the determinant of the
//! resulting square matrix times the form densities is the integrand.  All
//! signed outputs are fixed by this convention up to one global sign,
//! checked against crossing-count oracles.

use crate::diagram::{Diagram, EdgeKind, Flavor, Parity, Vertex};
use crate::error::{Error, Result};
use crate::geometry::{cross, dot, norm, scale, sub, LinkGeometry, Point};
use crate::sampling::{ConfigShape, Configuration, Sampler};
use crate::weights::WeightSystem;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use std::collections::BTreeMap;

const MAX_DIM: usize = 16;
const CHUNK: u64 = 1 << 16;

/// The normalized top form on the sphere used for pullbacks.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FormChoice {
    /// The rotationally invariant form of total mass one.
    Uniform,
    /// An antipodally symmetric bump supported in the polar caps of the
    /// given half-angle.
    PolarBump { cap: f64 },
}

impl FormChoice {
    pub fn density(&self, v: Point) -> f64 {
        match *self {
            FormChoice::Uniform => 1.0 / (4.0 * std::f64::consts::PI),
            FormChoice::PolarBump { cap } => {
                let c = cap.cos();
                let z = v[2].abs();
                if z <= c {
                    0.0
                } else {
                    let w = (z - c) / (1.0 - c);
                    // quadratic bump, normalized over both caps
                    3.0 / (4.0 * std::f64::consts::PI * (1.0 - c)) * w * w
                }
            }
        }
    }
}

/// A Monte Carlo value with its standard error and reproducibility data.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MCEstimate {
    pub value: f64,
    pub std_error: f64,
    pub samples: u64,
    pub seed: u64,
}

impl MCEstimate {
    pub fn tsv(&self) -> String {
        format!(
            "{:.8e}\t{:.8e}\t{}\t{}",
            self.value, self.std_error, self.samples, self.seed
        )
    }
}

/// Anomaly coefficients per canonical single-strand diagram; absent keys
/// mean zero.
#[derive(Clone, Debug, Default)]
pub struct AnomalyTable {
    entries: BTreeMap<Diagram, f64>,
}

impl AnomalyTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, diagram: Diagram, mu: f64) {
        let c = diagram.canonicalize();
        if !c.is_zero() {
            self.entries.insert(c.diagram, mu);
        }
    }

    pub fn mu(&self, diagram: &Diagram) -> f64 {
        let c = diagram.canonicalize();
        self.entries.get(&c.diagram).copied().unwrap_or(0.0)
    }
}

pub(crate) fn derive_seed(seed: u64, salt: u64) -> u64 {
    let mut z = seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn vertex_param(config: &Configuration, v: Vertex) -> Option<f64> {
    match v {
        Vertex::Ext { segment, position } => {
            Some(config.strand_params[segment - 1][position - 1])
        }
        Vertex::Int { .. } => None,
    }
}

fn vertex_point(link: &LinkGeometry, config: &Configuration, v: Vertex) -> Point {
    match v {
        Vertex::Ext { segment, .. } => {
            let t = vertex_param(config, v).unwrap();
            link.strand(segment).eval2(t).0
        }
        Vertex::Int { label } => config.free_points[label - 1],
    }
}

/// Unit direction attached to an edge at a configuration: the normalized
/// difference of the endpoint positions, or the unit tangent for a loop.
pub fn edge_direction(
    link: &LinkGeometry,
    config: &Configuration,
    diagram: &Diagram,
    edge_index: usize,
) -> Result<Point> {
    let e = diagram.edges()[edge_index];
    if e.kind() == EdgeKind::Loop {
        let Vertex::Ext { segment, .. } = e.tail else {
            return Err(Error::InvalidDiagram("loop at internal vertex".into()));
        };
        let t = vertex_param(config, e.tail).unwrap();
        let (_, vel, _) = link.strand(segment).eval2(t);
        let n = norm(vel);
        if n == 0.0 {
            return Err(Error::InvalidGeometry("zero tangent".into()));
        }
        return Ok(scale(vel, 1.0 / n));
    }
    let xt = vertex_point(link, config, e.tail);
    let xh = vertex_point(link, config, e.head);
    let d = sub(xh, xt);
    let r = norm(d);
    if r == 0.0 {
        return Err(Error::InvalidGeometry(
            "coincident edge endpoints".into(),
        ));
    }
    Ok(scale(d, 1.0 / r))
}

/// Right-handed orthonormal tangent frame at a point of the sphere: the
/// first vector comes from the coordinate axis least aligned with `v`, the
/// second is `v x t1`.
fn tangent_frame(v: Point) -> (Point, Point) {
    let abs = [v[0].abs(), v[1].abs(), v[2].abs()];
    let axis = if abs[0] <= abs[1] && abs[0] <= abs[2] {
        [1.0, 0.0, 0.0]
    } else if abs[1] <= abs[2] {
        [0.0, 1.0, 0.0]
    } else {
        [0.0, 0.0, 1.0]
    };
    let t1 = {
        let p = sub(axis, scale(v, dot(axis, v)));
        scale(p, 1.0 / norm(p))
    };
    (t1, cross(v, t1))
}

fn det_in_place(a: &mut [[f64; MAX_DIM]; MAX_DIM], n: usize) -> f64 {
    let mut det = 1.0;
    for col in 0..n {
        let mut pivot = col;
        for r in col + 1..n {
            if a[r][col].abs() > a[pivot][col].abs() {
                pivot = r;
            }
        }
        if a[pivot][col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            a.swap(pivot, col);
            det = -det;
        }
        det *= a[col][col];
        let inv = 1.0 / a[col][col];
        for r in col + 1..n {
            let f = a[r][col] * inv;
            if f == 0.0 {
                continue;
            }
            for c in col..n {
                a[r][c] -= f * a[col][c];
            }
        }
    }
    det
}

/// The shape of configurations matching a diagram.
pub fn config_shape(d: &Diagram) -> ConfigShape {
    ConfigShape {
        strand_counts: d.ext_counts().to_vec(),
        free_points: d.internal_count(),
    }
}

/// Evaluate the pulled-back form at one configuration.
///
/// Requires a degree-zero odd diagram whose fiber dimension matches twice
/// the edge count, and a configuration of the matching shape.
pub fn integrand(
    diagram: &Diagram,
    link: &LinkGeometry,
    config: &Configuration,
    form: FormChoice,
) -> Result<f64> {
    if diagram.parity() != Parity::Odd {
        return Err(Error::Unsupported(
            "numerical integration is defined for the odd complex (n = 3)".into(),
        ));
    }
    let dims = diagram.external_count() + 3 * diagram.internal_count();
    if dims != 2 * diagram.edges().len() || diagram.grading().degree != 0 {
        return Err(Error::ShapeMismatch(format!(
            "fiber dimension {dims} does not match form degree {}",
            2 * diagram.edges().len()
        )));
    }
    if dims > MAX_DIM {
        return Err(Error::ResourceCap(format!(
            "fiber dimension {dims} exceeds the supported maximum {MAX_DIM}"
        )));
    }
    if config.strand_params.len() != diagram.m()
        || config
            .strand_params
            .iter()
            .zip(diagram.ext_counts())
            .any(|(p, &c)| p.len() != c)
        || config.free_points.len() != diagram.internal_count()
    {
        return Err(Error::ShapeMismatch(
            "configuration shape does not match the diagram".into(),
        ));
    }
    if dims == 0 {
        return Ok(1.0);
    }

    // cached kinematics per external vertex
    let m = diagram.m();
    let mut pos: Vec<Vec<(Point, Point, Point)>> = Vec::with_capacity(m);
    for (s, params) in config.strand_params.iter().enumerate() {
        pos.push(
            params
                .iter()
                .map(|&t| link.strand(s + 1).eval2(t))
                .collect(),
        );
    }
    // column offsets: strand parameters in segment order, then free coords
    let mut param_offset = vec![0usize; m];
    let mut acc = 0usize;
    for s in 0..m {
        param_offset[s] = acc;
        acc += diagram.ext_counts()[s];
    }
    let free_offset = acc;

    let col_of = |v: Vertex| -> usize {
        match v {
            Vertex::Ext { segment, position } => param_offset[segment - 1] + position - 1,
            Vertex::Int { label } => free_offset + 3 * (label - 1),
        }
    };

    let mut matrix = [[0.0f64; MAX_DIM]; MAX_DIM];
    let mut density = 1.0f64;
    for (ei, e) in diagram.edges().iter().enumerate() {
        let (r1, r2) = (2 * ei, 2 * ei + 1);
        if e.kind() == EdgeKind::Loop {
            let Vertex::Ext { segment, position } = e.tail else {
                unreachable!()
            };
            let (_, vel, acc) = pos[segment - 1][position - 1];
            let n = norm(vel);
            if n == 0.0 {
                return Err(Error::InvalidGeometry("zero tangent".into()));
            }
            let u = scale(vel, 1.0 / n);
            let (t1, t2) = tangent_frame(u);
            density *= form.density(u);
            // d/dt of the unit tangent: project the acceleration
            let du = scale(sub(acc, scale(u, dot(u, acc))), 1.0 / n);
            let col = col_of(e.tail);
            matrix[r1][col] = dot(du, t1);
            matrix[r2][col] = dot(du, t2);
            continue;
        }
        let xt = vertex_point(link, config, e.tail);
        let xh = vertex_point(link, config, e.head);
        let d = sub(xh, xt);
        let r = norm(d);
        if r == 0.0 {
            return Err(Error::InvalidGeometry("coincident edge endpoints".into()));
        }
        let u = scale(d, 1.0 / r);
        let (t1, t2) = tangent_frame(u);
        density *= form.density(u);
        // differential contributions: head positive, tail negative
        for (v, sign) in [(e.head, 1.0), (e.tail, -1.0)] {
            match v {
                Vertex::Ext { segment, position } => {
                    let (_, vel, _) = pos[segment - 1][position - 1];
                    let dd = scale(sub(vel, scale(u, dot(u, vel))), sign / r);
                    let col = col_of(v);
                    matrix[r1][col] += dot(dd, t1);
                    matrix[r2][col] += dot(dd, t2);
                }
                Vertex::Int { .. } => {
                    let col = col_of(v);
                    for coord in 0..3 {
                        let mut basis = [0.0; 3];
                        basis[coord] = 1.0;
                        let dd = scale(sub(basis, scale(u, dot(u, basis))), sign / r);
                        matrix[r1][col + coord] += dot(dd, t1);
                        matrix[r2][col + coord] += dot(dd, t2);
                    }
                }
            }
        }
    }
    if density == 0.0 {
        return Ok(0.0);
    }
    Ok(det_in_place(&mut matrix, dims) * density)
}

struct StratumAccum {
    sum: f64,
    sum_sq: f64,
    count: u64,
}

/// Center and per-coordinate scale for the free-point proposal, derived
/// deterministically from the bounding box of the geometry's knots.
fn free_proposal_window(link: &LinkGeometry) -> (Point, Point) {
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for strand in link.strands() {
        for k in strand.knots() {
            for c in 0..3 {
                lo[c] = lo[c].min(k.pos[c]);
                hi[c] = hi[c].max(k.pos[c]);
            }
        }
    }
    let mut center = [0.0; 3];
    let mut scale = [1.0; 3];
    for c in 0..3 {
        center[c] = 0.5 * (lo[c] + hi[c]);
        scale[c] = (0.35 * (hi[c] - lo[c])).max(0.75);
    }
    (center, scale)
}

/// Monte Carlo integral of one connected diagram.
fn integrate_connected(
    diagram: &Diagram,
    link: &LinkGeometry,
    form: FormChoice,
    samples: u64,
    seed: u64,
) -> Result<MCEstimate> {
    if samples < 2 {
        return Err(Error::Unsupported("need at least 2 samples".into()));
    }
    let (center, scale) = free_proposal_window(link);
    let mut sampler = Sampler::new(config_shape(diagram), samples, 4)
        .with_free_proposal(center, scale);
    if diagram.internal_count() > 0 {
        sampler = sampler.with_anchor_kernel(0.4, 0.55);
    }
    let strata = sampler.strata();
    let chunks: Vec<(u64, u64)> = (0..samples)
        .step_by(CHUNK as usize)
        .map(|start| (start, (start + CHUNK).min(samples)))
        .collect();
    let partials: Vec<Result<Vec<StratumAccum>>> = chunks
        .par_iter()
        .map(|&(start, end)| {
            let mut acc: Vec<StratumAccum> = (0..strata)
                .map(|_| StratumAccum {
                    sum: 0.0,
                    sum_sq: 0.0,
                    count: 0,
                })
                .collect();
            for index in start..end {
                let (config, weight) =
                    sampler.sample_with(seed, index, |s, t| link.strand(s).eval2(t).0);
                let f = integrand(diagram, link, &config, form)?;
                let v = weight * f;
                if !v.is_finite() {
                    return Err(Error::NonFiniteSample {
                        index,
                        detail: format!("{config:?}"),
                    });
                }
                let s = sampler.stratum_of(index);
                acc[s].sum += v;
                acc[s].sum_sq += v * v;
                acc[s].count += 1;
            }
            Ok(acc)
        })
        .collect();

    // merge in chunk order so the reduction is worker-independent
    let mut merged: Vec<StratumAccum> = (0..strata)
        .map(|_| StratumAccum {
            sum: 0.0,
            sum_sq: 0.0,
            count: 0,
        })
        .collect();
    for partial in partials {
        let partial = partial?;
        for (m, p) in merged.iter_mut().zip(partial) {
            m.sum += p.sum;
            m.sum_sq += p.sum_sq;
            m.count += p.count;
        }
    }
    let mut value = 0.0;
    let mut variance = 0.0;
    for a in &merged {
        let n = a.count as f64;
        let mean = if a.count > 0 { a.sum / n } else { 0.0 };
        value += mean / strata as f64;
        if a.count > 1 {
            let var = ((a.sum_sq / n - mean * mean) * n / (n - 1.0)).max(0.0);
            variance += var / n / (strata as f64 * strata as f64);
        }
    }
    Ok(MCEstimate {
        value,
        std_error: variance.sqrt(),
        samples,
        seed,
    })
}

/// Monte Carlo integral of a degree-zero diagram on a geometry.
///
/// Component groups occupying disjoint segment sets factor exactly (their
/// parameter domains and integrands are independent), so the estimate is
/// the product over groups, each with a derived seed.  Components sharing a
/// segment interleave there and are integrated jointly.
pub fn integrate(
    diagram: &Diagram,
    link: &LinkGeometry,
    form: FormChoice,
    samples: u64,
    seed: u64,
) -> Result<MCEstimate> {
    if link.m() != diagram.m() {
        return Err(Error::ShapeMismatch(format!(
            "diagram has {} segments, link has {} strands",
            diagram.m(),
            link.m()
        )));
    }
    let comps = diagram.split_segment_groups();
    if comps.len() <= 1 {
        return integrate_connected(diagram, link, form, samples, seed);
    }
    let mut parts = Vec::new();
    for (i, comp) in comps.iter().enumerate() {
        let est = integrate_connected(comp, link, form, samples, derive_seed(seed, i as u64))?;
        parts.push(est);
    }
    let value: f64 = parts.iter().map(|e| e.value).product();
    // variance of a product of independent estimates
    let mut var = 0.0f64;
    for (i, est) in parts.iter().enumerate() {
        let others: f64 = parts
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, e)| e.value)
            .product();
        var += (others * est.std_error).powi(2);
    }
    Ok(MCEstimate {
        value,
        std_error: var.sqrt(),
        samples,
        seed,
    })
}

/// True when the anomaly correction applies: connected, all external
/// vertices on a single strand, and no chords.
pub fn needs_anomaly_correction(diagram: &Diagram) -> Option<usize> {
    if diagram.split_components().len() != 1 {
        return None;
    }
    if diagram
        .edges()
        .iter()
        .any(|e| matches!(e.kind(), EdgeKind::Chord | EdgeKind::Loop))
    {
        return None;
    }
    let mut strand = None;
    for (s, &c) in diagram.ext_counts().iter().enumerate() {
        if c > 0 {
            if strand.is_some() {
                return None;
            }
            strand = Some(s + 1);
        }
    }
    strand
}

/// The two-point tangent-direction diagram on one strand whose integral is
/// the self-linking correction factor.
pub fn selflink_diagram(m: usize, strand: usize) -> Diagram {
    let mut ext_counts = vec![0usize; m];
    ext_counts[strand - 1] = 2;
    Diagram::raw(
        m,
        Parity::Odd,
        Flavor::Link,
        ext_counts,
        0,
        vec![crate::diagram::Edge {
            tail: Vertex::Ext {
                segment: strand,
                position: 1,
            },
            head: Vertex::Ext {
                segment: strand,
                position: 2,
            },
            label: None,
        }],
    )
}

/// The anomaly correction term `mu_Gamma * selflink(K)` for a connected
/// single-strand diagram without chords.  Returns a zero estimate when the
/// table holds no coefficient for the diagram.
pub fn anomaly_correction(
    diagram: &Diagram,
    link: &LinkGeometry,
    table: &AnomalyTable,
    samples: u64,
    seed: u64,
) -> Result<MCEstimate> {
    let Some(strand) = needs_anomaly_correction(diagram) else {
        return Err(Error::ShapeMismatch(
            "anomaly correction applies to connected single-strand diagrams without chords"
                .into(),
        ));
    };
    let mu = table.mu(diagram);
    if mu == 0.0 {
        return Ok(MCEstimate {
            value: 0.0,
            std_error: 0.0,
            samples,
            seed,
        });
    }
    // labeled pairs: the kernel is symmetric, so the integral over both
    // orderings is twice the ordered-configuration integral; this matches
    // the writhe normalization of the projection oracle
    let sl = selflink_diagram(link.m(), strand);
    let est = integrate(&sl, link, FormChoice::Uniform, samples, seed)?;
    Ok(MCEstimate {
        value: 2.0 * mu * est.value,
        std_error: 2.0 * mu.abs() * est.std_error,
        samples,
        seed,
    })
}

/// Assemble the invariant attached to a weight system: the weighted sum of
/// corrected integrals over the degree-zero basis at the weight system's
/// order.  Errors are propagated in quadrature.
pub fn invariant(
    weights: &WeightSystem,
    link: &LinkGeometry,
    form: FormChoice,
    samples: u64,
    seed: u64,
    table: &AnomalyTable,
) -> Result<MCEstimate> {
    let basis = crate::diagram::enumerate_basis(
        link.m(),
        Parity::Odd,
        link.flavor(),
        weights.order,
        0,
        crate::diagram::EnumLimits::default(),
    )?;
    let mut value = 0.0;
    let mut variance = 0.0;
    for (i, gamma) in basis.iter().enumerate() {
        let c = weights
            .evaluate(gamma)?
            .to_f64()
            .ok_or_else(|| Error::Unsupported("weight coefficient out of f64 range".into()))?;
        if c == 0.0 {
            continue;
        }
        let est = integrate(gamma, link, form, samples, derive_seed(seed, 2 * i as u64))?;
        let corr = if needs_anomaly_correction(gamma).is_some() {
            anomaly_correction(
                gamma,
                link,
                table,
                samples,
                derive_seed(seed, 2 * i as u64 + 1),
            )?
        } else {
            MCEstimate {
                value: 0.0,
                std_error: 0.0,
                samples,
                seed,
            }
        };
        value += c * (est.value - corr.value);
        variance += c * c * (est.std_error * est.std_error + corr.std_error * corr.std_error);
    }
    Ok(MCEstimate {
        value,
        std_error: variance.sqrt(),
        samples,
        seed,
    })
}
