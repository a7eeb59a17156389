//! Singular links, skein resolutions, finite-type defect tests, and the
//! map from numeric invariants to weight systems.
//!
//! A singular link is a base geometry with prescribed transverse double
//! points.  Resolutions displace one passage of each double point along the
//! normal direction of the two tangents by a C^1 piecewise-cubic bump, so
//! every resolved geometry is again an exact Hermite spline that equals the
//! base outside the modification balls.  The positive resolution displaces
//! along `+cross(tangent_a, tangent_b)`.

use crate::diagram::{Diagram, Edge, Flavor, Parity, Vertex};
use crate::error::{Error, Result};
use crate::geometry::{add, cross, norm, normalize, scale, sub, HermiteKnot, LinkGeometry, Point, Strand};
use crate::integrator::MCEstimate;
use std::fmt::Write as _;

/// One transverse double point: two strand passages and the modification
/// ball radius.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Singularity {
    pub strand_a: usize,
    pub t_a: f64,
    pub strand_b: usize,
    pub t_b: f64,
    pub rho: f64,
}

/// A link with `k` prescribed double points.
#[derive(Clone, Debug)]
pub struct SingularLink {
    base: LinkGeometry,
    singularities: Vec<Singularity>,
}

const COINCIDENCE_TOL: f64 = 1e-9;

impl SingularLink {
    pub fn new(base: LinkGeometry, singularities: Vec<Singularity>) -> Result<Self> {
        for (i, s) in singularities.iter().enumerate() {
            if s.rho <= 0.0 {
                return Err(Error::InvalidGeometry(format!(
                    "singularity {i} has non-positive ball radius"
                )));
            }
            let (pa, va) = base.eval(s.strand_a, s.t_a)?;
            let (pb, vb) = base.eval(s.strand_b, s.t_b)?;
            if norm(sub(pa, pb)) > COINCIDENCE_TOL {
                return Err(Error::InvalidGeometry(format!(
                    "singularity {i}: images differ by {:.2e}",
                    norm(sub(pa, pb))
                )));
            }
            if norm(cross(va, vb)) < 1e-6 {
                return Err(Error::InvalidGeometry(format!(
                    "singularity {i}: tangents are not independent"
                )));
            }
            if s.strand_a == s.strand_b && (s.t_a - s.t_b).abs() < 1e-6 {
                return Err(Error::InvalidGeometry(format!(
                    "singularity {i}: passages coincide in parameter"
                )));
            }
        }
        // modification balls pairwise disjoint
        for i in 0..singularities.len() {
            for j in i + 1..singularities.len() {
                let (pi, _) = base.eval(singularities[i].strand_a, singularities[i].t_a)?;
                let (pj, _) = base.eval(singularities[j].strand_a, singularities[j].t_a)?;
                if norm(sub(pi, pj)) <= singularities[i].rho + singularities[j].rho {
                    return Err(Error::InvalidGeometry(format!(
                        "modification balls of singularities {i} and {j} overlap"
                    )));
                }
            }
        }
        Ok(SingularLink {
            base,
            singularities,
        })
    }

    pub fn base(&self) -> &LinkGeometry {
        &self.base
    }

    pub fn singularities(&self) -> &[Singularity] {
        &self.singularities
    }

    pub fn order(&self) -> usize {
        self.singularities.len()
    }

    /// The chord diagram recording the placement of the double points: one
    /// external vertex per passage in parameter order per segment, paired
    /// by chords.
    pub fn chord_diagram(&self) -> Result<Diagram> {
        let m = self.base.m();
        // collect passages per segment
        let mut per_segment: Vec<Vec<(f64, usize, bool)>> = vec![Vec::new(); m];
        for (i, s) in self.singularities.iter().enumerate() {
            per_segment[s.strand_a - 1].push((s.t_a, i, true));
            per_segment[s.strand_b - 1].push((s.t_b, i, false));
        }
        for v in &mut per_segment {
            v.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        }
        let ext_counts: Vec<usize> = per_segment.iter().map(|v| v.len()).collect();
        // locate each passage
        let locate = |sing: usize, is_a: bool| -> Vertex {
            for (seg, v) in per_segment.iter().enumerate() {
                for (pos, &(_, i, a)) in v.iter().enumerate() {
                    if i == sing && a == is_a {
                        return Vertex::Ext {
                            segment: seg + 1,
                            position: pos + 1,
                        };
                    }
                }
            }
            unreachable!()
        };
        let edges: Vec<Edge> = (0..self.singularities.len())
            .map(|i| Edge {
                tail: locate(i, true),
                head: locate(i, false),
                label: None,
            })
            .collect();
        let d = Diagram::raw(
            m,
            Parity::Odd,
            self.base.flavor(),
            ext_counts,
            0,
            edges,
        );
        let c = d.canonicalize();
        Ok(c.diagram)
    }

    /// All `2^k` resolutions with their overall signs.  The order in which
    /// the singularities are resolved does not matter: the displacement
    /// windows are disjoint and each acts on its own knot refinement.
    pub fn resolve(&self) -> Result<Vec<(i32, LinkGeometry)>> {
        let k = self.singularities.len();
        let mut out = Vec::with_capacity(1 << k);
        for mask in 0u32..(1u32 << k) {
            let mut strands: Vec<Strand> = self.base.strands().to_vec();
            let mut overall = 1i32;
            for (i, s) in self.singularities.iter().enumerate() {
                let sign = if mask & (1 << i) == 0 { 1i32 } else { -1 };
                overall *= sign;
                let (_, va) = self.base.eval(s.strand_a, s.t_a)?;
                let (_, vb) = self.base.eval(s.strand_b, s.t_b)?;
                let normal = normalize(cross(va, vb));
                // displace the second passage
                let target = s.strand_b - 1;
                let speed = norm(self.base.strand(s.strand_b).eval(s.t_b).1);
                let w = s.rho / (3.0 * speed.max(1e-9));
                strands[target] = displace(
                    &strands[target],
                    s.t_b,
                    w,
                    scale(normal, sign as f64 * s.rho / 2.0),
                )?;
            }
            let link = LinkGeometry::new_unchecked(self.base.flavor(), strands);
            out.push((overall, link));
        }
        Ok(out)
    }

    /// Serialize: the base link format plus one `sing:` line per double
    /// point.
    pub fn to_text(&self) -> String {
        let mut out = self.base.to_text();
        for s in &self.singularities {
            writeln!(
                out,
                "sing: ({},{}) ({},{}) {}",
                s.strand_a, s.t_a, s.strand_b, s.t_b, s.rho
            )
            .unwrap();
        }
        out
    }

    pub fn parse(input: &str) -> Result<Self> {
        let base = LinkGeometry::parse(input)?;
        let mut sings = Vec::new();
        for (lineno, raw) in input.lines().enumerate() {
            let line = raw.trim();
            let Some(rest) = line.strip_prefix("sing:") else {
                continue;
            };
            let lno = lineno + 1;
            let parts: Vec<&str> = rest.split_whitespace().collect();
            if parts.len() != 3 {
                return Err(Error::Parse {
                    line: lno,
                    msg: "expected `sing: (a,t_a) (b,t_b) rho`".into(),
                });
            }
            let pair = |tok: &str| -> Result<(usize, f64)> {
                let inner = tok
                    .trim()
                    .strip_prefix('(')
                    .and_then(|x| x.strip_suffix(')'))
                    .ok_or_else(|| Error::Parse {
                        line: lno,
                        msg: format!("bad passage `{tok}`"),
                    })?;
                let (a, b) = inner.split_once(',').ok_or_else(|| Error::Parse {
                    line: lno,
                    msg: format!("bad passage `{tok}`"),
                })?;
                Ok((
                    a.trim().parse().map_err(|_| Error::Parse {
                        line: lno,
                        msg: format!("bad strand `{a}`"),
                    })?,
                    b.trim().parse().map_err(|_| Error::Parse {
                        line: lno,
                        msg: format!("bad parameter `{b}`"),
                    })?,
                ))
            };
            let (strand_a, t_a) = pair(parts[0])?;
            let (strand_b, t_b) = pair(parts[1])?;
            let rho: f64 = parts[2].parse().map_err(|_| Error::Parse {
                line: lno,
                msg: format!("bad radius `{}`", parts[2]),
            })?;
            sings.push(Singularity {
                strand_a,
                t_a,
                strand_b,
                t_b,
                rho,
            });
        }
        SingularLink::new(base, sings)
    }
}

/// C^1 bump equal to 1 at 0 and vanishing with its derivative at +-1.
fn bump(x: f64) -> f64 {
    if x.abs() >= 1.0 {
        0.0
    } else {
        1.0 - 3.0 * x * x + 2.0 * x.abs().powi(3)
    }
}

fn bump_d(x: f64) -> f64 {
    if x.abs() >= 1.0 {
        0.0
    } else {
        -6.0 * x + 6.0 * x * x.abs()
    }
}

/// Displace a strand by `offset * bump((t - t0)/w)`, inserting the bump
/// knots so the result is exact.
fn displace(strand: &Strand, t0: f64, w: f64, offset: Point) -> Result<Strand> {
    if t0 - w <= -1.0 || t0 + w >= 1.0 {
        return Err(Error::InvalidGeometry(format!(
            "displacement window around t={t0} leaves the parameter window"
        )));
    }
    let mut params: Vec<f64> = strand.knots().iter().map(|k| k.t).collect();
    for t in [t0 - w, t0, t0 + w] {
        if params.iter().all(|&p| (p - t).abs() > 1e-12) {
            params.push(t);
        }
    }
    params.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let knots: Vec<HermiteKnot> = params
        .iter()
        .map(|&t| {
            let (pos, vel, _) = strand.eval2(t);
            let x = (t - t0) / w;
            HermiteKnot {
                t,
                pos: add(pos, scale(offset, bump(x))),
                vel: add(vel, scale(offset, bump_d(x) / w)),
            }
        })
        .collect();
    Strand::new(knots)
}

/// An invariant evaluator: a deterministic numeric link invariant with an
/// error bar, e.g. a closed-over Monte Carlo invariant.
pub trait InvariantEval: Sync {
    fn evaluate(&self, link: &LinkGeometry, seed: u64) -> Result<MCEstimate>;
}

impl<F> InvariantEval for F
where
    F: Fn(&LinkGeometry, u64) -> Result<MCEstimate> + Sync,
{
    fn evaluate(&self, link: &LinkGeometry, seed: u64) -> Result<MCEstimate> {
        self(link, seed)
    }
}

/// The alternating sum of an invariant over all resolutions of a singular
/// link; near zero when the invariant's type is below the singularity
/// count.
pub fn finite_type_defect(
    v: &dyn InvariantEval,
    sl: &SingularLink,
    seed: u64,
) -> Result<MCEstimate> {
    let resolutions = sl.resolve()?;
    let mut value = 0.0;
    let mut variance = 0.0;
    let mut samples = 0;
    for (i, (sign, link)) in resolutions.iter().enumerate() {
        let est = v.evaluate(link, crate::integrator::derive_seed(seed, i as u64))?;
        value += *sign as f64 * est.value;
        variance += est.std_error * est.std_error;
        samples = est.samples;
    }
    Ok(MCEstimate {
        value,
        std_error: variance.sqrt(),
        samples,
        seed,
    })
}

/// Build a singular link realizing a chord diagram: straight strands with
/// one local template per chord pulling the first passage onto the second.
pub fn realize_chord_diagram(diagram: &Diagram, rho: f64) -> Result<SingularLink> {
    if diagram.internal_count() != 0
        || diagram
            .edges()
            .iter()
            .any(|e| e.kind() != crate::diagram::EdgeKind::Chord)
    {
        return Err(Error::InvalidDiagram(
            "realizer templates exist for chord diagrams only".into(),
        ));
    }
    let m = diagram.m();
    // parameter slots per segment, evenly spaced in (-0.9, 0.9)
    let slot = |segment: usize, position: usize| -> f64 {
        let count = diagram.ext_counts()[segment - 1];
        if count == 1 {
            0.0
        } else {
            -0.7 + 1.4 * (position - 1) as f64 / (count - 1) as f64
        }
    };
    let base_strands: Vec<Strand> = (0..m)
        .map(|i| {
            let y = 2.0 * i as f64;
            Strand::new(vec![
                HermiteKnot {
                    t: -1.0,
                    pos: [-1.0, y, 0.0],
                    vel: [1.0, 0.0, 0.0],
                },
                HermiteKnot {
                    t: 1.0,
                    pos: [1.0, y, 0.0],
                    vel: [1.0, 0.0, 0.0],
                },
            ])
            .unwrap()
        })
        .collect();
    let mut strands = base_strands;
    let mut sings = Vec::new();
    for e in diagram.edges() {
        let (Vertex::Ext { segment: sa, position: pa }, Vertex::Ext { segment: sb, position: pb }) =
            (e.tail, e.head)
        else {
            unreachable!()
        };
        let ta = slot(sa, pa);
        let tb = slot(sb, pb);
        // window small enough to keep templates disjoint
        let gap_a = 1.4 / (diagram.ext_counts()[sa - 1].max(2) - 1).max(1) as f64;
        let w = (0.3 * gap_a).min(0.2);
        let target = strands[sb - 1].eval(tb).0;
        let from = strands[sa - 1].eval(ta).0;
        let delta = sub(target, from);
        // main pull onto the target point
        strands[sa - 1] = displace(&strands[sa - 1], ta, w, delta)?;
        // transversality kick out of the plane, vanishing at the touch
        strands[sa - 1] = displace_asym(&strands[sa - 1], ta, w, [0.0, 0.0, 0.35 * w])?;
        if sa == sb {
            // same-strand template: arc away in y so the pulled window does
            // not slide along the strand
            strands[sa - 1] = displace_sym_zero(&strands[sa - 1], ta, w, [0.0, 0.45, 0.0])?;
        }
        sings.push(Singularity {
            strand_a: sa,
            t_a: ta,
            strand_b: sb,
            t_b: tb,
            rho,
        });
    }
    SingularLink::new(LinkGeometry::new_unchecked(diagram.flavor(), strands), sings)
}

/// Odd bump `x (1-|x|)^2`: zero at 0 with unit slope, flat at +-1.
fn bump_odd(x: f64) -> f64 {
    if x.abs() >= 1.0 {
        0.0
    } else {
        x * (1.0 - x.abs()).powi(2)
    }
}

fn bump_odd_d(x: f64) -> f64 {
    if x.abs() >= 1.0 {
        0.0
    } else {
        let a = 1.0 - x.abs();
        a * a - 2.0 * x.abs() * a
    }
}

fn displace_asym(strand: &Strand, t0: f64, w: f64, offset: Point) -> Result<Strand> {
    displace_with(strand, t0, w, offset, bump_odd, bump_odd_d)
}

/// Even bump vanishing at 0 and +-1: `(x (1-|x|)^2)^2` rescaled.
fn bump_sym_zero(x: f64) -> f64 {
    let b = bump_odd(x);
    b * b * (27.0 / 4.0) * 4.0
}

fn bump_sym_zero_d(x: f64) -> f64 {
    2.0 * bump_odd(x) * bump_odd_d(x) * (27.0 / 4.0) * 4.0
}

fn displace_sym_zero(strand: &Strand, t0: f64, w: f64, offset: Point) -> Result<Strand> {
    displace_with(strand, t0, w, offset, bump_sym_zero, bump_sym_zero_d)
}

fn displace_with(
    strand: &Strand,
    t0: f64,
    w: f64,
    offset: Point,
    f: fn(f64) -> f64,
    fd: fn(f64) -> f64,
) -> Result<Strand> {
    if t0 - w <= -1.0 || t0 + w >= 1.0 {
        return Err(Error::InvalidGeometry(format!(
            "displacement window around t={t0} leaves the parameter window"
        )));
    }
    let mut params: Vec<f64> = strand.knots().iter().map(|k| k.t).collect();
    for t in [t0 - w, t0 - w / 2.0, t0, t0 + w / 2.0, t0 + w] {
        if params.iter().all(|&p| (p - t).abs() > 1e-12) {
            params.push(t);
        }
    }
    params.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let knots: Vec<HermiteKnot> = params
        .iter()
        .map(|&t| {
            let (pos, vel, _) = strand.eval2(t);
            let x = (t - t0) / w;
            HermiteKnot {
                t,
                pos: add(pos, scale(offset, f(x))),
                vel: add(vel, scale(offset, fd(x) / w)),
            }
        })
        .collect();
    Strand::new(knots)
}

/// Evaluate an invariant's weight system: for each canonical chord diagram
/// of order `k`, the alternating sum of the invariant over the resolutions
/// of a realizer.
pub fn weight_of_invariant(
    v: &dyn InvariantEval,
    m: usize,
    k: i64,
    flavor: Flavor,
    rho: f64,
    seed: u64,
) -> Result<Vec<(Diagram, MCEstimate)>> {
    let mut out = Vec::new();
    for (i, chord) in crate::weights::chord_diagrams(m, k, flavor)
        .into_iter()
        .enumerate()
    {
        let realizer = realize_chord_diagram(&chord, rho).map_err(|e| {
            Error::InvalidGeometry(format!(
                "realizer construction failfailed for\n{}\n{e}",
                chord.to_text()
            ))
        })?;
        let defect = finite_type_defect(
            v,
            &realizer,
            crate::integrator::derive_seed(seed, i as u64),
        )?;
        out.push((chord, defect));
    }
    Ok(out)
}

/// Bundled example: a two-strand singular braid whose second strand dips
/// through the first transversally at parameters -0.4 and +0.4.
pub fn two_singular_braid_pair() -> SingularLink {
    // smooth planar dip: 1 outside [-0.8, 0.8], zeros exactly at +-0.4
    let dip = |t: f64| -> (f64, f64) {
        let s = t / 0.8;
        if s.abs() >= 1.0 {
            return (1.0, 0.0);
        }
        let w = (1.0 - s * s).powi(2);
        let s0: f64 = 0.5;
        let w0 = (1.0 - s0 * s0).powi(2);
        let c = 1.0 / w0;
        let dw = 2.0 * (1.0 - s * s) * (-2.0 * s) / 0.8;
        (1.0 - c * w, -c * dw)
    };
    let strand1 = Strand::new(vec![
        HermiteKnot {
            t: -1.0,
            pos: [-1.0, 0.0, 0.0],
            vel: [1.0, 0.0, 0.0],
        },
        HermiteKnot {
            t: 1.0,
            pos: [1.0, 0.0, 0.0],
            vel: [1.0, 0.0, 0.0],
        },
    ])
    .unwrap();
    let n = 20;
    let knots: Vec<HermiteKnot> = (0..=n)
        .map(|i| {
            let t = -1.0 + 2.0 * i as f64 / n as f64;
            let (y, dy) = dip(t);
            HermiteKnot {
                t,
                pos: [t, y, 0.0],
                vel: [1.0, dy, 0.0],
            }
        })
        .collect();
    let strand2 = Strand::new(knots).unwrap();
    let base = LinkGeometry::new_unchecked(Flavor::Braid, vec![strand1, strand2]);
    SingularLink::new(
        base,
        vec![
            Singularity {
                strand_a: 1,
                t_a: -0.4,
                strand_b: 2,
                t_b: -0.4,
                rho: 0.05,
            },
            Singularity {
                strand_a: 1,
                t_a: 0.4,
                strand_b: 2,
                t_b: 0.4,
                rho: 0.05,
            },
        ],
    )
    .unwrap()
}

/// The same dip geometry with a single double point, for order-one tests.
pub fn one_singular_braid_pair() -> SingularLink {
    let sl = two_singular_braid_pair();
    let base = sl.base().clone();
    // keep only the first double point; resolve the other out of the plane
    // by reusing the resolution displacement
    let strands: Vec<Strand> = {
        let (_, va) = base.eval(1, 0.4).unwrap();
        let (_, vb) = base.eval(2, 0.4).unwrap();
        let normal = normalize(cross(va, vb));
        let speed = norm(base.strand(2).eval(0.4).1);
        let w = 0.05 / (3.0 * speed.max(1e-9));
        let mut s = base.strands().to_vec();
        s[1] = displace(&s[1], 0.4, w, scale(normal, 0.025)).unwrap();
        s
    };
    SingularLink::new(
        LinkGeometry::new_unchecked(Flavor::Braid, strands),
        vec![Singularity {
            strand_a: 1,
            t_a: -0.4,
            strand_b: 2,
            t_b: -0.4,
            rho: 0.05,
        }],
    )
    .unwrap()
}
