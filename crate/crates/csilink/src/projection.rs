//! Crossing analysis of planar projections: signed crossing counts,
//! linking numbers, writhe, and the Gauss-diagram count for the order-two
//! knot invariant.  These combinatorial quantities are computed from dense
//! polyline projections and serve as independent checks on the Monte Carlo
//! integrals.

use crate::error::{Error, Result};
use crate::geometry::LinkGeometry;

/// One transverse crossing of the projection along the z-axis.
#[derive(Clone, Copy, Debug)]
pub struct Crossing {
    pub strand_over: usize,
    pub t_over: f64,
    pub strand_under: usize,
    pub t_under: f64,
    /// Sign of the crossing: +1 when the under tangent is obtained from the
    /// over tangent by a counterclockwise turn of less than pi.
    pub sign: i32,
}

fn polyline(link: &LinkGeometry, strand: usize, span: f64, n: usize) -> Vec<(f64, [f64; 3])> {
    (0..=n)
        .map(|k| {
            let t = -span + 2.0 * span * (k as f64) / (n as f64);
            (t, link.strand(strand).eval(t).0)
        })
        .collect()
}

fn seg_intersect_2d(
    p1: [f64; 2],
    p2: [f64; 2],
    q1: [f64; 2],
    q2: [f64; 2],
) -> Option<(f64, f64)> {
    let r = [p2[0] - p1[0], p2[1] - p1[1]];
    let s = [q2[0] - q1[0], q2[1] - q1[1]];
    let denom = r[0] * s[1] - r[1] * s[0];
    if denom.abs() < 1e-15 {
        return None;
    }
    let qp = [q1[0] - p1[0], q1[1] - p1[1]];
    let u = (qp[0] * s[1] - qp[1] * s[0]) / denom;
    let v = (qp[0] * r[1] - qp[1] * r[0]) / denom;
    if (0.0..1.0).contains(&u) && (0.0..1.0).contains(&v) {
        Some((u, v))
    } else {
        None
    }
}

/// All transverse crossings of the xy-projection between two strands (or of
/// one strand with itself when `a == b`).
pub fn crossings(link: &LinkGeometry, a: usize, b: usize, span: f64, n: usize) -> Vec<Crossing> {
    let pa = polyline(link, a, span, n);
    let pb = if a == b {
        Vec::new()
    } else {
        polyline(link, b, span, n)
    };
    let pb = if a == b { &pa } else { &pb };
    let mut out = Vec::new();
    for i in 0..pa.len() - 1 {
        let jstart = if a == b { i + 2 } else { 0 };
        for j in jstart..pb.len() - 1 {
            if a == b && j <= i + 1 {
                continue;
            }
            let (t1, x1) = pa[i];
            let (t2, x2) = pa[i + 1];
            let (s1, y1) = pb[j];
            let (s2, y2) = pb[j + 1];
            let Some((u, v)) = seg_intersect_2d(
                [x1[0], x1[1]],
                [x2[0], x2[1]],
                [y1[0], y1[1]],
                [y2[0], y2[1]],
            ) else {
                continue;
            };
            let ta = t1 + u * (t2 - t1);
            let tb = s1 + v * (s2 - s1);
            let za = x1[2] + u * (x2[2] - x1[2]);
            let zb = y1[2] + v * (y2[2] - y1[2]);
            let da = [x2[0] - x1[0], x2[1] - x1[1]];
            let db = [y2[0] - y1[0], y2[1] - y1[1]];
            let (over, under, d_over, d_under) = if za > zb {
                ((a, ta), (b, tb), da, db)
            } else {
                ((b, tb), (a, ta), db, da)
            };
            let cross_z = d_over[0] * d_under[1] - d_over[1] * d_under[0];
            out.push(Crossing {
                strand_over: over.0,
                t_over: over.1,
                strand_under: under.0,
                t_under: under.1,
                sign: if cross_z > 0.0 { 1 } else { -1 },
            });
        }
    }
    out
}

/// Linking number of two strands: half the signed count of inter-strand
/// crossings in a generic projection.
pub fn linking_number(link: &LinkGeometry, a: usize, b: usize) -> Result<i64> {
    if a == b {
        return Err(Error::InvalidGeometry("linking number needs two strands".into()));
    }
    let cs = crossings(link, a, b, 3.0, 4000);
    let total: i64 = cs.iter().map(|c| c.sign as i64).sum();
    if total % 2 != 0 {
        return Err(Error::InvalidGeometry(format!(
            "projection is not generic: odd signed crossing sum {total}"
        )));
    }
    Ok(total / 2)
}

/// Writhe of one strand: the signed count of its self-crossings.
pub fn writhe(link: &LinkGeometry, strand: usize) -> i64 {
    crossings(link, strand, strand, 3.0, 4000)
        .iter()
        .map(|c| c.sign as i64)
        .sum()
}

/// The order-two knot invariant of a one-strand geometry, computed from the
/// Gauss diagram of a projection: the signed count of crossing pairs whose
/// passages appear in the order (over p, under q, under p, over q).
pub fn v2_gauss_count(link: &LinkGeometry, strand: usize) -> i64 {
    let cs = crossings(link, strand, strand, 3.0, 6000);
    let mut total = 0i64;
    for (i, p) in cs.iter().enumerate() {
        for q in cs.iter().skip(i + 1) {
            for (first, second) in [(p, q), (q, p)] {
                // pattern: O_first < U_second < U_first < O_second
                if first.t_over < second.t_under
                    && second.t_under < first.t_under
                    && first.t_under < second.t_over
                {
                    total += (first.sign * second.sign) as i64;
                }
            }
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{long_trefoil, long_unknot_wiggly, once_linked_pair, trivial_link};
    use crate::diagram::Flavor;

    #[test]
    fn helix_pair_links_once() {
        let link = once_linked_pair();
        let lk = linking_number(&link, 1, 2).unwrap();
        assert_eq!(lk.abs(), 1);
    }

    #[test]
    fn trivial_link_has_no_crossings() {
        let link = trivial_link(2, Flavor::Link);
        assert!(crossings(&link, 1, 2, 3.0, 2000).is_empty());
        assert_eq!(writhe(&link, 1), 0);
    }

    #[test]
    fn trefoil_gauss_count_is_one() {
        for variant in 0..2 {
            let link = long_trefoil(variant);
            assert_eq!(
                v2_gauss_count(&link, 1),
                1,
                "variant {variant} projection count"
            );
        }
    }

    #[test]
    fn unknot_gauss_count_is_zero() {
        let link = long_unknot_wiggly();
        assert_eq!(v2_gauss_count(&link, 1), 0);
    }
}
