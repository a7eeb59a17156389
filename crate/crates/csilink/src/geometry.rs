//! Concrete string links and braids in R^3: per-strand cubic Hermite
//! curves on the parameter window [-1, 1] with exact affine tails, plus the
//! direction/ratio coordinates of compactified configurations.
//!
//! Outside the window a strand equals its asymptotic line exactly; both
//! tails of a strand lie on one line parallel to the x-axis and are
//! traversed with positive speed.

use crate::diagram::Flavor;
use crate::error::{Error, Result};
use std::fmt::Write as _;

pub type Point = [f64; 3];

pub fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn add(a: Point, b: Point) -> Point {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub fn scale(a: Point, s: f64) -> Point {
    [a[0] * s, a[1] * s, a[2] * s]
}

pub fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross(a: Point, b: Point) -> Point {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn norm(a: Point) -> f64 {
    dot(a, a).sqrt()
}

pub fn normalize(a: Point) -> Point {
    let n = norm(a);
    scale(a, 1.0 / n)
}

/// Determinant of the 3x3 matrix with rows `a`, `b`, `c`.
pub fn det3(a: Point, b: Point, c: Point) -> f64 {
    dot(a, cross(b, c))
}

/// One Hermite knot: parameter, position, velocity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HermiteKnot {
    pub t: f64,
    pub pos: Point,
    pub vel: Point,
}

/// A single strand: cubic Hermite interpolation of the knots on [-1, 1]
/// and affine tails beyond.
#[derive(Clone, Debug, PartialEq)]
pub struct Strand {
    knots: Vec<HermiteKnot>,
}

impl Strand {
    pub fn new(knots: Vec<HermiteKnot>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::InvalidGeometry(
                "strand needs at least two knots".into(),
            ));
        }
        if (knots[0].t - (-1.0)).abs() > 1e-12 || (knots[knots.len() - 1].t - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidGeometry(
                "knot parameters must span exactly [-1, 1]".into(),
            ));
        }
        if knots.windows(2).any(|w| w[1].t <= w[0].t) {
            return Err(Error::InvalidGeometry(
                "knot parameters must be strictly increasing".into(),
            ));
        }
        Ok(Strand { knots })
    }

    pub fn knots(&self) -> &[HermiteKnot] {
        &self.knots
    }

    /// The asymptotic line: base point and direction of the affine tails.
    pub fn tail_line(&self) -> (Point, Point) {
        let first = self.knots[0];
        (first.pos, first.vel)
    }

    /// Position, velocity, and acceleration at parameter `t`.
    pub fn eval2(&self, t: f64) -> (Point, Point, Point) {
        let first = self.knots[0];
        let last = self.knots[self.knots.len() - 1];
        if t <= first.t {
            return (
                add(first.pos, scale(first.vel, t - first.t)),
                first.vel,
                [0.0; 3],
            );
        }
        if t >= last.t {
            return (
                add(last.pos, scale(last.vel, t - last.t)),
                last.vel,
                [0.0; 3],
            );
        }
        // locate the knot interval
        let mut lo = 0;
        let mut hi = self.knots.len() - 1;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.knots[mid].t <= t {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let a = self.knots[lo];
        let b = self.knots[hi];
        let h = b.t - a.t;
        let u = (t - a.t) / h;
        let (u2, u3) = (u * u, u * u * u);
        let h00 = 2.0 * u3 - 3.0 * u2 + 1.0;
        let h10 = u3 - 2.0 * u2 + u;
        let h01 = -2.0 * u3 + 3.0 * u2;
        let h11 = u3 - u2;
        let mut pos = [0.0; 3];
        let mut vel = [0.0; 3];
        let mut acc = [0.0; 3];
        let d00 = 6.0 * u2 - 6.0 * u;
        let d10 = 3.0 * u2 - 4.0 * u + 1.0;
        let d01 = -6.0 * u2 + 6.0 * u;
        let d11 = 3.0 * u2 - 2.0 * u;
        let s00 = 12.0 * u - 6.0;
        let s10 = 6.0 * u - 4.0;
        let s01 = -12.0 * u + 6.0;
        let s11 = 6.0 * u - 2.0;
        for i in 0..3 {
            pos[i] = h00 * a.pos[i]
                + h10 * h * a.vel[i]
                + h01 * b.pos[i]
                + h11 * h * b.vel[i];
            vel[i] = (d00 * a.pos[i] + d01 * b.pos[i]) / h + d10 * a.vel[i] + d11 * b.vel[i];
            acc[i] = (s00 * a.pos[i] + s01 * b.pos[i]) / (h * h)
                + (s10 * a.vel[i] + s11 * b.vel[i]) / h;
        }
        (pos, vel, acc)
    }

    pub fn eval(&self, t: f64) -> (Point, Point) {
        let (p, v, _) = self.eval2(t);
        (p, v)
    }
}

/// Validation knobs for geometry checks.
#[derive(Clone, Copy, Debug)]
pub struct GeomChecks {
    /// Polar cap half-angle braid tangents must avoid.
    pub theta_cap: f64,
    /// Grid points per strand for tangent and embedding checks.
    pub grid: usize,
    /// Minimum allowed distance between sampled points of distinct strands
    /// (and between parameter-distant points of one strand).
    pub embedding_tolerance: f64,
}

impl Default for GeomChecks {
    fn default() -> Self {
        GeomChecks {
            theta_cap: 0.2,
            grid: 1000,
            embedding_tolerance: 1e-6,
        }
    }
}

/// An `m`-strand geometry with a flavor flag.  Ambient dimension is three.
#[derive(Clone, Debug, PartialEq)]
pub struct LinkGeometry {
    flavor: Flavor,
    strands: Vec<Strand>,
}

impl LinkGeometry {
    /// Build and validate structurally (tails and, for braids, the tangent
    /// conditions).  Embedding is checked separately by
    /// [`Self::check_embedding`].
    pub fn new(flavor: Flavor, strands: Vec<Strand>) -> Result<Self> {
        let link = LinkGeometry { flavor, strands };
        link.check_structure(GeomChecks::default())?;
        Ok(link)
    }

    /// Build without validation; used for singular links whose base curves
    /// intentionally intersect.
    pub fn new_unchecked(flavor: Flavor, strands: Vec<Strand>) -> Self {
        LinkGeometry { flavor, strands }
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn m(&self) -> usize {
        self.strands.len()
    }

    pub fn strands(&self) -> &[Strand] {
        &self.strands
    }

    pub fn strand(&self, i: usize) -> &Strand {
        &self.strands[i - 1]
    }

    /// Point and unit tangent on strand `i` (1-based).
    pub fn eval(&self, strand: usize, t: f64) -> Result<(Point, Point)> {
        if strand < 1 || strand > self.strands.len() {
            return Err(Error::InvalidGeometry(format!("no strand {strand}")));
        }
        let (p, v) = self.strands[strand - 1].eval(t);
        let n = norm(v);
        if n == 0.0 || !n.is_finite() {
            return Err(Error::InvalidGeometry(format!(
                "degenerate derivative on strand {strand} at t={t}"
            )));
        }
        Ok((p, scale(v, 1.0 / n)))
    }

    /// Structural validation: affine tails on per-strand lines parallel to
    /// the x-axis with positive speed, distinct lines across strands, and
    /// the braid tangent conditions on a dense grid.
    pub fn check_structure(&self, checks: GeomChecks) -> Result<()> {
        if self.strands.is_empty() {
            return Err(Error::InvalidGeometry("no strands".into()));
        }
        for (i, s) in self.strands.iter().enumerate() {
            let first = s.knots()[0];
            let last = s.knots()[s.knots().len() - 1];
            for (end, k) in [("left", first), ("right", last)] {
                if k.vel[1].abs() > 1e-9 || k.vel[2].abs() > 1e-9 || k.vel[0] <= 0.0 {
                    return Err(Error::InvalidGeometry(format!(
                        "strand {} {end} tail velocity {:?} is not a positive multiple of the x-axis",
                        i + 1,
                        k.vel
                    )));
                }
            }
            if (first.pos[1] - last.pos[1]).abs() > 1e-9
                || (first.pos[2] - last.pos[2]).abs() > 1e-9
            {
                return Err(Error::InvalidGeometry(format!(
                    "strand {} tails lie on different lines ({:?} vs {:?})",
                    i + 1,
                    first.pos,
                    last.pos
                )));
            }
        }
        for i in 0..self.strands.len() {
            for j in i + 1..self.strands.len() {
                let (pi, _) = self.strands[i].tail_line();
                let (pj, _) = self.strands[j].tail_line();
                if (pi[1] - pj[1]).abs() < 1e-9 && (pi[2] - pj[2]).abs() < 1e-9 {
                    return Err(Error::InvalidGeometry(format!(
                        "strands {} and {} share an asymptotic line",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        if self.flavor == Flavor::Braid {
            let cap_cos = checks.theta_cap.cos();
            for (i, s) in self.strands.iter().enumerate() {
                for g in 0..=checks.grid {
                    let t = -1.0 + 2.0 * (g as f64) / (checks.grid as f64);
                    let (_, v) = s.eval(t);
                    let n = norm(v);
                    if v[0] <= 0.0 {
                        return Err(Error::InvalidGeometry(format!(
                            "braid strand {} tangent has non-positive first component at t={t}",
                            i + 1
                        )));
                    }
                    let z = v[2] / n;
                    if z.abs() >= cap_cos {
                        return Err(Error::InvalidGeometry(format!(
                            "braid strand {} tangent enters a polar cap at t={t}",
                            i + 1
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Sampled embedding check.  `exclusions` lists pairs
    /// `((strand, t), radius)` around which coincidences are tolerated
    /// (used when validating singular links).
    pub fn check_embedding(
        &self,
        checks: GeomChecks,
        exclusions: &[((usize, f64), f64)],
    ) -> Result<()> {
        let n = checks.grid;
        let span = 1.4; // sample a margin of tail on both sides
        let sample = |s: &Strand| -> Vec<(f64, Point)> {
            (0..=n)
                .map(|g| {
                    let t = -span + 2.0 * span * (g as f64) / (n as f64);
                    (t, s.eval(t).0)
                })
                .collect()
        };
        let samples: Vec<Vec<(f64, Point)>> = self.strands.iter().map(sample).collect();
        let excluded = |si: usize, t: f64, p: Point| -> bool {
            exclusions.iter().any(|&((strand, t0), radius)| {
                let (p0, _) = self.strands[strand - 1].eval(t0);
                let _ = t;
                strand == si && norm(sub(p, p0)) < radius
            })
        };
        for i in 0..samples.len() {
            for j in i..samples.len() {
                for (a_idx, &(ta, pa)) in samples[i].iter().enumerate() {
                    for (b_idx, &(tb, pb)) in samples[j].iter().enumerate() {
                        if i == j {
                            // skip parameter-close pairs on the same strand
                            if (a_idx as i64 - b_idx as i64).abs() < 25 {
                                continue;
                            }
                        } else if a_idx == 0 && b_idx == 0 {
                            // distinct strands always checked
                        }
                        if i == j && a_idx >= b_idx {
                            continue;
                        }
                        let d = norm(sub(pa, pb));
                        if d < checks.embedding_tolerance
                            && !(excluded(i + 1, ta, pa) && excluded(j + 1, tb, pb))
                        {
                            return Err(Error::InvalidGeometry(format!(
                                "strands {} and {} nearly coincide: |K({ta:.4}) - K({tb:.4})| = {d:.2e}",
                                i + 1,
                                j + 1
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Serialize in the link text format.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "n=3 m={} flavor={}", self.m(), self.flavor).unwrap();
        for (i, s) in self.strands.iter().enumerate() {
            writeln!(out, "strand {}:", i + 1).unwrap();
            for k in s.knots() {
                writeln!(
                    out,
                    "{} {} {} {} {} {} {}",
                    k.t, k.pos[0], k.pos[1], k.pos[2], k.vel[0], k.vel[1], k.vel[2]
                )
                .unwrap();
            }
        }
        out
    }

    /// Parse the link text format.
    pub fn parse(input: &str) -> Result<Self> {
        let mut flavor = None;
        let mut m = 0usize;
        let mut strands: Vec<Vec<HermiteKnot>> = Vec::new();
        for (lineno, raw) in input.lines().enumerate() {
            let line = raw.trim();
            let lno = lineno + 1;
            if line.is_empty() || line.starts_with('#') || line.starts_with("sing:") {
                continue;
            }
            if line.starts_with("n=") {
                for tok in line.split_whitespace() {
                    let (k, v) = tok.split_once('=').ok_or_else(|| Error::Parse {
                        line: lno,
                        msg: format!("bad header token `{tok}`"),
                    })?;
                    match k {
                        "n" => {
                            if v != "3" {
                                return Err(Error::Parse {
                                    line: lno,
                                    msg: "only n=3 geometries are supported".into(),
                                });
                            }
                        }
                        "m" => {
                            m = v.parse().map_err(|_| Error::Parse {
                                line: lno,
                                msg: format!("bad m `{v}`"),
                            })?
                        }
                        "flavor" => {
                            flavor = Some(match v {
                                "link" => Flavor::Link,
                                "braid" => Flavor::Braid,
                                _ => {
                                    return Err(Error::Parse {
                                        line: lno,
                                        msg: format!("bad flavor `{v}`"),
                                    })
                                }
                            })
                        }
                        _ => {
                            return Err(Error::Parse {
                                line: lno,
                                msg: format!("unknown header key `{k}`"),
                            })
                        }
                    }
                }
                continue;
            }
            if let Some(rest) = line.strip_prefix("strand") {
                let idx: usize = rest
                    .trim()
                    .trim_end_matches(':')
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse {
                        line: lno,
                        msg: format!("bad strand header `{line}`"),
                    })?;
                if idx != strands.len() + 1 {
                    return Err(Error::Parse {
                        line: lno,
                        msg: format!("expected strand {} next", strands.len() + 1),
                    });
                }
                strands.push(Vec::new());
                continue;
            }
            // knot line: seven numbers
            let nums: Vec<f64> = line
                .split_whitespace()
                .map(|x| x.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::Parse {
                    line: lno,
                    msg: format!("bad knot line `{line}`"),
                })?;
            if nums.len() != 7 {
                return Err(Error::Parse {
                    line: lno,
                    msg: format!("knot line needs 7 numbers, got {}", nums.len()),
                });
            }
            let Some(current) = strands.last_mut() else {
                return Err(Error::Parse {
                    line: lno,
                    msg: "knot line before any strand header".into(),
                });
            };
            current.push(HermiteKnot {
                t: nums[0],
                pos: [nums[1], nums[2], nums[3]],
                vel: [nums[4], nums[5], nums[6]],
            });
        }
        let flavor = flavor.ok_or_else(|| Error::Parse {
            line: 0,
            msg: "missing header".into(),
        })?;
        if m != strands.len() {
            return Err(Error::Parse {
                line: 0,
                msg: format!("header claims m={m} but found {} strands", strands.len()),
            });
        }
        let strands = strands
            .into_iter()
            .map(Strand::new)
            .collect::<Result<Vec<_>>>()?;
        LinkGeometry::new(flavor, strands)
    }
}

/// Direction and ratio coordinates of a configuration of distinct points.
#[derive(Clone, Debug)]
pub struct CompactificationCoords {
    /// `v[(i, j)]` for `i < j`: unit vector from point i to point j.
    pub directions: Vec<((usize, usize), Point)>,
    /// `a[(i, j, k)]` for `i < j < k`: `|x_i - x_j| / |x_i - x_k|`.
    pub ratios: Vec<((usize, usize, usize), f64)>,
}

/// The coordinates of the compactification map on pairwise-distinct points.
pub fn gamma_coords(points: &[Point]) -> Result<CompactificationCoords> {
    let p = points.len();
    for i in 0..p {
        for j in i + 1..p {
            if norm(sub(points[j], points[i])) == 0.0 {
                return Err(Error::InvalidGeometry(format!(
                    "points {i} and {j} coincide"
                )));
            }
        }
    }
    let mut directions = Vec::with_capacity(p * (p - 1) / 2);
    for i in 0..p {
        for j in i + 1..p {
            directions.push(((i + 1, j + 1), normalize(sub(points[j], points[i]))));
        }
    }
    let mut ratios = Vec::new();
    for i in 0..p {
        for j in i + 1..p {
            for k in j + 1..p {
                let num = norm(sub(points[i], points[j]));
                let den = norm(sub(points[i], points[k]));
                ratios.push(((i + 1, j + 1, k + 1), num / den));
            }
        }
    }
    Ok(CompactificationCoords { directions, ratios })
}

impl CompactificationCoords {
    pub fn direction(&self, i: usize, j: usize) -> Option<Point> {
        self.directions
            .iter()
            .find(|&&(key, _)| key == (i, j))
            .map(|&(_, v)| v)
    }

    pub fn ratio(&self, i: usize, j: usize, k: usize) -> Option<f64> {
        self.ratios
            .iter()
            .find(|&&(key, _)| key == (i, j, k))
            .map(|&(_, a)| a)
    }
}

// ---------------------------------------------------------------------------
// bundled example geometries

/// The trivial link: `m` straight parallel strands.
pub fn trivial_link(m: usize, flavor: Flavor) -> LinkGeometry {
    let strands = (0..m)
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
    LinkGeometry::new(flavor, strands).unwrap()
}

/// A two-strand geometry with linking number one: strand 1 is the x-axis
/// and strand 2 winds once around it.  Valid as a braid.
pub fn once_linked_pair() -> LinkGeometry {
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
    let r = 0.5;
    let n = 16;
    let knots = (0..=n)
        .map(|k| {
            let t = -1.0 + 2.0 * (k as f64) / (n as f64);
            let u = (t + 1.0) / 2.0;
            let theta = 2.0 * std::f64::consts::PI * (3.0 * u * u - 2.0 * u * u * u);
            let dtheta_du = 2.0 * std::f64::consts::PI * (6.0 * u - 6.0 * u * u);
            let dtheta_dt = dtheta_du / 2.0;
            HermiteKnot {
                t,
                pos: [t, r * theta.cos(), r * theta.sin()],
                vel: [1.0, -r * dtheta_dt * theta.sin(), r * dtheta_dt * theta.cos()],
            }
        })
        .collect();
    let strand2 = Strand::new(knots).unwrap();
    LinkGeometry::new(Flavor::Braid, vec![strand1, strand2]).unwrap()
}

/// A second parametrization of the once-linked pair: tighter winding
/// radius, more knots, and a faster x-sweep on strand 2.
pub fn once_linked_pair_alt() -> LinkGeometry {
    let strand1 = Strand::new(vec![
        HermiteKnot {
            t: -1.0,
            pos: [-1.3, 0.0, 0.0],
            vel: [1.3, 0.0, 0.0],
        },
        HermiteKnot {
            t: 1.0,
            pos: [1.3, 0.0, 0.0],
            vel: [1.3, 0.0, 0.0],
        },
    ])
    .unwrap();
    let r = 0.35;
    let n = 24;
    let knots = (0..=n)
        .map(|k| {
            let t = -1.0 + 2.0 * (k as f64) / (n as f64);
            let u = (t + 1.0) / 2.0;
            let theta = 2.0 * std::f64::consts::PI * (3.0 * u * u - 2.0 * u * u * u);
            let dtheta_dt = 2.0 * std::f64::consts::PI * (6.0 * u - 6.0 * u * u) / 2.0;
            HermiteKnot {
                t,
                pos: [1.3 * t, r * theta.cos(), r * theta.sin()],
                vel: [
                    1.3,
                    -r * dtheta_dt * theta.sin(),
                    r * dtheta_dt * theta.cos(),
                ],
            }
        })
        .collect();
    let strand2 = Strand::new(knots).unwrap();
    LinkGeometry::new(Flavor::Braid, vec![strand1, strand2]).unwrap()
}

/// A long trefoil on one strand: the plat picture of the two-strand braid
/// with three positive half-twists, traversed twice, with an outer return
/// arc and straight collinear tails.  The projection to the xy-plane has
/// exactly three crossings with Gauss sequence O1 U2 O3 U1 O2 U3.
/// `variant` picks one of two distinct parametrizations of the same knot.
pub fn long_trefoil(variant: usize) -> LinkGeometry {
    let (rail, half, lift, samples) = match variant % 2 {
        0 => (0.7, 0.42, 0.5, 5usize),
        _ => (0.85, 0.5, 0.62, 7usize),
    };
    let centers = [0.7, 2.1, 3.5];
    let mut pts: Vec<(Point, Point)> = Vec::new();
    let mut push = |p: Point, v: Point| pts.push((p, v));

    // one smooth rail swap: y runs from `from` to `to`, the over/under lift
    // is a sin^2 bump of height z
    let swap = |push: &mut dyn FnMut(Point, Point), c: f64, from: f64, to: f64, z: f64| {
        for k in 0..=samples {
            let s = k as f64 / samples as f64;
            let x = c - half + 2.0 * half * s;
            let y = from + (to - from) * 0.5 * (1.0 - (std::f64::consts::PI * s).cos());
            let dy = (to - from) * 0.5 * std::f64::consts::PI * (std::f64::consts::PI * s).sin()
                / (2.0 * half);
            let zz = z * (std::f64::consts::PI * s).sin().powi(2);
            let dz = z * std::f64::consts::PI * (2.0 * std::f64::consts::PI * s).sin()
                / (2.0 * half)
                * 0.5;
            push([x, y, zz], [1.0, dy, dz]);
        }
    };

    // first traversal: enter on the bottom rail
    push([-0.9, -rail, 0.0], [1.0, 0.0, 0.0]);
    push([centers[0] - half - 0.12, -rail, 0.0], [1.0, 0.0, 0.0]);
    swap(&mut push, centers[0], -rail, rail, lift); // over crossing 1
    push([centers[1] - half - 0.12, rail, 0.0], [1.0, 0.0, 0.0]);
    swap(&mut push, centers[1], rail, -rail, -lift); // under crossing 2
    push([centers[2] - half - 0.12, -rail, 0.0], [1.0, 0.0, 0.0]);
    swap(&mut push, centers[2], -rail, rail, lift); // over crossing 3
    // outer return arc, flat in z
    let top = 2.2 * rail;
    push([centers[2] + half + 0.3, rail, 0.0], [1.0, 0.1, 0.0]);
    push([centers[2] + half + 0.75, rail + 0.5 * (top - rail), 0.0], [0.15, 1.0, 0.0]);
    push([centers[2] + half + 0.45, top, 0.0], [-1.0, 0.12, 0.0]);
    push([centers[0] - half - 0.8, top, 0.0], [-1.0, 0.0, 0.0]);
    push([centers[0] - half - 1.2, 0.5 * (top + rail), 0.0], [-0.1, -1.0, 0.0]);
    push([centers[0] - half - 0.85, rail, 0.0], [1.0, -0.08, 0.0]);
    // second traversal: enter on the top rail
    push([centers[0] - half - 0.12, rail, 0.0], [1.0, 0.0, 0.0]);
    swap(&mut push, centers[0], rail, -rail, -lift); // under crossing 1
    push([centers[1] - half - 0.12, -rail, 0.0], [1.0, 0.0, 0.0]);
    swap(&mut push, centers[1], -rail, rail, lift); // over crossing 2
    push([centers[2] - half - 0.12, rail, 0.0], [1.0, 0.0, 0.0]);
    swap(&mut push, centers[2], rail, -rail, -lift); // under crossing 3
    // outgoing tail on the shared asymptotic line
    push([centers[2] + half + 0.35, -rail, 0.0], [1.0, 0.0, 0.0]);
    push([centers[2] + half + 0.95, -rail, 0.0], [1.0, 0.0, 0.0]);

    build_long_knot(pts)
}

/// A long unknot with harmless wiggles, for null tests against the trefoil.
pub fn long_unknot_wiggly() -> LinkGeometry {
    let n = 24;
    let knots: Vec<HermiteKnot> = (0..=n)
        .map(|k| {
            let t = -1.0 + 2.0 * (k as f64) / (n as f64);
            let w = (1.0 - t * t).max(0.0);
            let bump = w * w;
            let dbump = 2.0 * w * (-2.0 * t);
            let y = 0.6 * bump * (4.0 * std::f64::consts::PI * t).sin();
            let dy = 0.6
                * (dbump * (4.0 * std::f64::consts::PI * t).sin()
                    + bump
                        * 4.0
                        * std::f64::consts::PI
                        * (4.0 * std::f64::consts::PI * t).cos());
            let z = 0.3 * bump * (2.0 * std::f64::consts::PI * t).cos();
            let dz = 0.3
                * (dbump * (2.0 * std::f64::consts::PI * t).cos()
                    - bump
                        * 2.0
                        * std::f64::consts::PI
                        * (2.0 * std::f64::consts::PI * t).sin());
            HermiteKnot {
                t,
                pos: [1.6 * t, y, z],
                vel: [1.6, dy, dz],
            }
        })
        .collect();
    // force exact straight tails
    let mut knots = knots;
    let first = knots.first_mut().unwrap();
    first.vel = [1.6, 0.0, 0.0];
    first.pos = [-1.6, 0.0, 0.3 * 0.0];
    let last = knots.last_mut().unwrap();
    last.vel = [1.6, 0.0, 0.0];
    last.pos = [1.6, 0.0, 0.0];
    LinkGeometry::new(Flavor::Link, vec![Strand::new(knots).unwrap()]).unwrap()
}

/// Wrap a waypoint list (positions with tangent directions, both tails
/// already on one line parallel to the x-axis) into a strand: chord-length
/// reparametrization onto [-1, 1] with near-unit speeds.
fn build_long_knot(pts: Vec<(Point, Point)>) -> LinkGeometry {
    let mut cum = vec![0.0];
    for w in pts.windows(2) {
        let d = norm(sub(w[1].0, w[0].0));
        cum.push(cum.last().unwrap() + d);
    }
    let total = *cum.last().unwrap();
    let knots: Vec<HermiteKnot> = pts
        .iter()
        .zip(&cum)
        .map(|(&(p, v), &c)| {
            let t = -1.0 + 2.0 * c / total;
            // velocities carry direction only; rescale to chord speed
            let speed = norm(v);
            let vel = scale(v, (total / 2.0) / speed.max(1e-12));
            HermiteKnot { t, pos: p, vel }
        })
        .collect();
    LinkGeometry::new(Flavor::Link, vec![Strand::new(knots).unwrap()]).unwrap()
}
