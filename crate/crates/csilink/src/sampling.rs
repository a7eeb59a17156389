//! Deterministic configuration sampling for the Monte Carlo integrator.
//!
//! Each sample index owns its own counter-based random stream keyed by
//! `(seed, index)`, so results are independent of how indices are split
//! across workers.  Strand parameters are drawn through the Cauchy-type
//! transform `t = tan(pi (u - 1/2))` and sorted per strand; free points use
//! the same heavy-tailed proposal per coordinate.  The returned weight is
//! the reciprocal proposal density of the ordered configuration.

use crate::geometry::Point;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

/// Vertex counts of a configuration: external points per strand, plus free
/// points.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ConfigShape {
    pub strand_counts: Vec<usize>,
    pub free_points: usize,
}

impl ConfigShape {
    pub fn param_dims(&self) -> usize {
        self.strand_counts.iter().sum()
    }

    pub fn total_dims(&self) -> usize {
        self.param_dims() + 3 * self.free_points
    }
}

/// One point of the open stratum: ordered parameter tuples per strand and
/// free points in R^3.
#[derive(Clone, Debug)]
pub struct Configuration {
    pub strand_params: Vec<Vec<f64>>,
    pub free_points: Vec<Point>,
}

/// Deterministic stratified sampler over a fixed shape.  Free points are
/// drawn from a per-coordinate heavy-tailed proposal that can be recentered
/// and rescaled onto the region a geometry occupies, optionally mixed with
/// point kernels anchored at the sample's own external points.  The kernel
/// radial density scales like `1/R^2` near an anchor, matching the
/// near-collision singularity of the integrands so importance weights stay
/// bounded.
#[derive(Clone, Debug)]
pub struct Sampler {
    shape: ConfigShape,
    strata_per_dim: usize,
    strata: usize,
    free_center: Point,
    free_scale: Point,
    anchor_rmax: f64,
    anchor_weight: f64,
}

const DISTINCT_TOL: f64 = 1e-12;

fn rng_for(seed: u64, index: u64) -> ChaCha8Rng {
    let mut bytes = [0u8; 32];
    bytes[..8].copy_from_slice(&seed.to_le_bytes());
    bytes[8..16].copy_from_slice(&seed.rotate_left(17).to_le_bytes());
    bytes[16..24].copy_from_slice(&0x9e37_79b9_7f4a_7c15u64.to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(bytes);
    rng.set_stream(index);
    rng
}

fn uniform01(rng: &mut ChaCha8Rng) -> f64 {
    // 53 random bits in [0, 1)
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Density of `t = tan(pi (u - 1/2))` for uniform `u`.
fn cauchy_density(t: f64) -> f64 {
    1.0 / (PI * (1.0 + t * t))
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

impl Sampler {
    /// Build a sampler; the stratum grid is `strata_per_dim` cells per
    /// strand-parameter dimension, shrunk so that the total stratum count
    /// stays below both 4096 and `samples / 16`.
    pub fn new(shape: ConfigShape, samples: u64, strata_per_dim: usize) -> Self {
        let dims = shape.param_dims() as u32;
        let mut b = strata_per_dim.max(1);
        loop {
            let strata = (b as u64).saturating_pow(dims);
            if b == 1 || (strata <= 4096 && strata <= (samples / 16).max(1)) {
                return Sampler {
                    shape,
                    strata_per_dim: b,
                    strata: strata.max(1) as usize,
                    free_center: [0.0; 3],
                    free_scale: [1.0; 3],
                    anchor_rmax: 0.75,
                    anchor_weight: 0.0,
                };
            }
            b -= 1;
        }
    }

    /// Recenter and rescale the free-point proposal (per coordinate).
    pub fn with_free_proposal(mut self, center: Point, scale: Point) -> Self {
        assert!(scale.iter().all(|&s| s > 0.0));
        self.free_center = center;
        self.free_scale = scale;
        self
    }

    /// Mix the free-point proposal with kernels anchored at the external
    /// points of each sample.
    pub fn with_anchor_kernel(mut self, rmax: f64, weight: f64) -> Self {
        assert!(rmax > 0.0 && (0.0..1.0).contains(&weight));
        self.anchor_rmax = rmax;
        self.anchor_weight = weight;
        self
    }

    /// Point kernel: direction uniform, radius with density
    /// `(2/(pi rmax)) / (1 + (R/rmax)^2)`, so the spatial density is
    /// `rmax / (2 pi^2 R^2 (rmax^2 + R^2))`.
    fn kernel_density(&self, x: Point) -> f64 {
        let r2 = crate::geometry::dot(x, x).max(1e-300);
        self.anchor_rmax / (2.0 * PI * PI * r2 * (self.anchor_rmax * self.anchor_rmax + r2))
    }

    /// Density of the free-point mixture at `p` given the anchor points.
    fn free_density(&self, p: Point, anchors: &[Point]) -> f64 {
        let mut cauchy = 1.0;
        for (c, (&ctr, &scl)) in p.iter().zip(self.free_center.iter().zip(&self.free_scale)) {
            cauchy *= cauchy_density((c - ctr) / scl) / scl;
        }
        if anchors.is_empty() || self.anchor_weight == 0.0 {
            return cauchy;
        }
        let mut kernels = 0.0;
        for &a in anchors {
            kernels += self.kernel_density(crate::geometry::sub(p, a));
        }
        (1.0 - self.anchor_weight) * cauchy + self.anchor_weight * kernels / anchors.len() as f64
    }

    pub fn shape(&self) -> &ConfigShape {
        &self.shape
    }

    pub fn strata(&self) -> usize {
        self.strata
    }

    /// Number of samples landing in stratum `s` out of `n` total.
    pub fn stratum_count(&self, s: usize, n: u64) -> u64 {
        let q = n / self.strata as u64;
        let r = (n % self.strata as u64) as usize;
        q + if s < r { 1 } else { 0 }
    }

    pub fn stratum_of(&self, index: u64) -> usize {
        (index % self.strata as u64) as usize
    }

    /// Draw the configuration for one sample index.  Deterministic in
    /// `(seed, index)`; resamples internally until all strand parameters
    /// and free points are pairwise distinct.
    pub fn sample(&self, seed: u64, index: u64) -> (Configuration, f64) {
        self.sample_with(seed, index, |_, _| [0.0; 3])
    }

    /// Draw one configuration, resolving strand parameters to anchor
    /// points through `position` (segment, parameter) for the free-point
    /// kernel mixture.
    pub fn sample_with(
        &self,
        seed: u64,
        index: u64,
        position: impl Fn(usize, f64) -> Point,
    ) -> (Configuration, f64) {
        let mut rng = rng_for(seed, index);
        let b = self.strata_per_dim;
        let stratum = self.stratum_of(index);
        'draw: loop {
            let mut weight = 1.0;
            let mut strand_params = Vec::with_capacity(self.shape.strand_counts.len());
            let mut cell = stratum;
            for &count in &self.shape.strand_counts {
                let mut params = Vec::with_capacity(count);
                for _ in 0..count {
                    let digit = cell % b;
                    cell /= b;
                    let u = (digit as f64 + uniform01(&mut rng)) / b as f64;
                    let t = (PI * (u - 0.5)).tan();
                    weight /= cauchy_density(t);
                    params.push(t);
                }
                params.sort_by(|a, b| a.partial_cmp(b).unwrap());
                if params.windows(2).any(|w| w[1] - w[0] < DISTINCT_TOL) {
                    continue 'draw;
                }
                weight /= factorial(count);
                strand_params.push(params);
            }
            let anchors: Vec<Point> = if self.anchor_weight > 0.0 && self.shape.free_points > 0 {
                let mut a = Vec::new();
                for (s, params) in strand_params.iter().enumerate() {
                    for &t in params {
                        a.push(position(s + 1, t));
                    }
                }
                a
            } else {
                Vec::new()
            };
            let mut free_points = Vec::with_capacity(self.shape.free_points);
            for _ in 0..self.shape.free_points {
                let use_kernel =
                    !anchors.is_empty() && uniform01(&mut rng) < self.anchor_weight;
                let p = if use_kernel {
                    let pick =
                        (uniform01(&mut rng) * anchors.len() as f64) as usize % anchors.len();
                    let z = 2.0 * uniform01(&mut rng) - 1.0;
                    let phi = 2.0 * PI * uniform01(&mut rng);
                    let s = (1.0 - z * z).max(0.0).sqrt();
                    let dir = [s * phi.cos(), s * phi.sin(), z];
                    let r = self.anchor_rmax * (PI * uniform01(&mut rng) / 2.0).tan();
                    crate::geometry::add(anchors[pick], crate::geometry::scale(dir, r))
                } else {
                    let mut p = [0.0; 3];
                    for (coord, (&c, &s)) in p
                        .iter_mut()
                        .zip(self.free_center.iter().zip(&self.free_scale))
                    {
                        let u = uniform01(&mut rng);
                        let t = (PI * (u - 0.5)).tan();
                        *coord = c + s * t;
                    }
                    p
                };
                weight /= self.free_density(p, &anchors);
                free_points.push(p);
            }
            for i in 0..free_points.len() {
                for j in i + 1..free_points.len() {
                    let d = crate::geometry::norm(crate::geometry::sub(
                        free_points[i],
                        free_points[j],
                    ));
                    if d < DISTINCT_TOL {
                        continue 'draw;
                    }
                }
            }
            return (
                Configuration {
                    strand_params,
                    free_points,
                },
                weight,
            );
        }
    }
}
