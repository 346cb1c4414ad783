//! Distances, adaptive bandwidths and kernel weights.
//!
//! Every location gets its own bandwidth: the distance to its k-th nearest
//! observation, where k is a fixed proportion of the dataset and the focal
//! point itself counts as the first neighbour. Weights then follow one of
//! five distance-decay kernels.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A planar location. Both axes share one length unit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coord {
    pub x: f64,
    pub y: f64,
}

impl Coord {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kernel {
    Gaussian,
    Exponential,
    Boxcar,
    Bisquare,
    Tricube,
}

impl Kernel {
    pub const ALL: [Kernel; 5] = [
        Kernel::Gaussian,
        Kernel::Exponential,
        Kernel::Boxcar,
        Kernel::Bisquare,
        Kernel::Tricube,
    ];

    /// Compact kernels give exactly zero weight at and beyond the bandwidth.
    pub fn is_compact(self) -> bool {
        matches!(self, Kernel::Boxcar | Kernel::Bisquare | Kernel::Tricube)
    }

    pub fn name(self) -> &'static str {
        match self {
            Kernel::Gaussian => "gaussian",
            Kernel::Exponential => "exponential",
            Kernel::Boxcar => "boxcar",
            Kernel::Bisquare => "bisquare",
            Kernel::Tricube => "tricube",
        }
    }

    /// Weight for distance `d` under bandwidth `b`, with `b > 0` already checked.
    #[inline]
    pub(crate) fn eval(self, d: f64, b: f64) -> f64 {
        let r = d / b;
        match self {
            Kernel::Gaussian => (-0.5 * r * r).exp(),
            Kernel::Exponential => (-r).exp(),
            Kernel::Boxcar => {
                if d < b {
                    1.0
                } else {
                    0.0
                }
            }
            Kernel::Bisquare => {
                if d < b {
                    let t = 1.0 - r * r;
                    t * t
                } else {
                    0.0
                }
            }
            Kernel::Tricube => {
                if d < b {
                    let t = 1.0 - r * r * r;
                    t * t * t
                } else {
                    0.0
                }
            }
        }
    }
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Kernel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gaussian" => Ok(Kernel::Gaussian),
            "exponential" => Ok(Kernel::Exponential),
            "boxcar" | "box-car" => Ok(Kernel::Boxcar),
            "bisquare" | "bi-square" => Ok(Kernel::Bisquare),
            "tricube" | "tri-cube" => Ok(Kernel::Tricube),
            other => Err(Error::InvalidSpec(format!("unknown kernel {other:?}"))),
        }
    }
}

/// Adaptive bandwidth, expressed as the fraction of all observations that
/// falls inside each local window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Bandwidth(f64);

impl Bandwidth {
    pub fn new(proportion: f64) -> Result<Self> {
        if proportion.is_finite() && proportion > 0.0 && proportion <= 1.0 {
            Ok(Self(proportion))
        } else {
            Err(Error::InvalidProportion(proportion))
        }
    }

    pub fn proportion(self) -> f64 {
        self.0
    }

    /// Neighbour count k for a dataset of `n` points, self included.
    pub fn neighbours(self, n: usize) -> usize {
        // The small offset keeps products such as 0.3 * 10 from rounding up to 4.
        let k = (self.0 * n as f64 - 1e-9).ceil() as usize;
        k.clamp(2, n.max(2))
    }
}

impl TryFrom<f64> for Bandwidth {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Bandwidth::new(value)
    }
}

impl From<Bandwidth> for f64 {
    fn from(value: Bandwidth) -> f64 {
        value.0
    }
}

/// Geographic weights of every observation relative to one focal location.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    pub weights: Vec<f64>,
    pub owner_index: usize,
    pub bandwidth_used: f64,
}

#[inline]
pub fn pairwise_distance(p: Coord, q: Coord) -> f64 {
    let dx = p.x - q.x;
    let dy = p.y - q.y;
    (dx * dx + dy * dy).sqrt()
}

pub fn kernel_weight(kernel: Kernel, d: f64, b: f64) -> Result<f64> {
    if !(b > 0.0) {
        return Err(Error::NonPositiveBandwidth(b));
    }
    Ok(kernel.eval(d, b))
}

fn check_points(coords: &[Coord]) -> Result<()> {
    if coords.len() < 2 {
        return Err(Error::TooFewPoints {
            needed: 2,
            got: coords.len(),
        });
    }
    Ok(())
}

/// Fails with `AllCoincident` when no two points are apart.
pub(crate) fn ensure_spread(coords: &[Coord]) -> Result<()> {
    check_points(coords)?;
    let first = coords[0];
    if coords.iter().all(|c| c.x == first.x && c.y == first.y) {
        return Err(Error::AllCoincident);
    }
    Ok(())
}

/// Bandwidth from precomputed distances. `scratch` is overwritten.
pub(crate) fn bandwidth_from_distances(
    distances: &[f64],
    k: usize,
    scratch: &mut Vec<f64>,
) -> Result<f64> {
    scratch.clear();
    scratch.extend_from_slice(distances);
    let (_, kth, _) = scratch.select_nth_unstable_by(k - 1, f64::total_cmp);
    let b = *kth;
    if b > 0.0 {
        return Ok(b);
    }
    // Duplicate coordinates: fall back to the nearest distinct neighbour.
    distances
        .iter()
        .copied()
        .filter(|&d| d > 0.0)
        .min_by(f64::total_cmp)
        .ok_or(Error::AllCoincident)
}

pub(crate) fn fill_distances(focal: Coord, coords: &[Coord], out: &mut Vec<f64>) {
    out.clear();
    out.extend(coords.iter().map(|&c| pairwise_distance(focal, c)));
}

pub fn adaptive_bandwidth_at(i: usize, coords: &[Coord], bw: Bandwidth) -> Result<f64> {
    check_points(coords)?;
    let mut distances = Vec::with_capacity(coords.len());
    fill_distances(coords[i], coords, &mut distances);
    let mut scratch = Vec::with_capacity(coords.len());
    bandwidth_from_distances(&distances, bw.neighbours(coords.len()), &mut scratch)
}

pub fn weight_vector_at(
    i: usize,
    coords: &[Coord],
    kernel: Kernel,
    bw: Bandwidth,
) -> Result<WeightVector> {
    check_points(coords)?;
    let mut distances = Vec::with_capacity(coords.len());
    fill_distances(coords[i], coords, &mut distances);
    let mut scratch = Vec::with_capacity(coords.len());
    let b = bandwidth_from_distances(&distances, bw.neighbours(coords.len()), &mut scratch)?;
    let weights = distances.iter().map(|&d| kernel.eval(d, b)).collect();
    Ok(WeightVector {
        weights,
        owner_index: i,
        bandwidth_used: b,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn line(n: usize) -> Vec<Coord> {
        (0..n).map(|i| Coord::new(i as f64, 0.0)).collect()
    }

    fn random_coords(n: usize, seed: u64) -> Vec<Coord> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| Coord::new(rng.random::<f64>() * 100.0, rng.random::<f64>() * 100.0))
            .collect()
    }

    #[test]
    fn distance_examples() {
        assert_eq!(pairwise_distance(Coord::new(0.0, 0.0), Coord::new(3.0, 4.0)), 5.0);
        assert_eq!(pairwise_distance(Coord::new(1.0, 1.0), Coord::new(1.0, 1.0)), 0.0);
    }

    #[test]
    fn distance_matches_hypot() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let p = Coord::new(rng.random_range(-1e4..1e4), rng.random_range(-1e4..1e4));
            let q = Coord::new(rng.random_range(-1e4..1e4), rng.random_range(-1e4..1e4));
            let oracle = (p.x - q.x).hypot(p.y - q.y);
            let d = pairwise_distance(p, q);
            assert!((d - oracle).abs() <= 4.0 * f64::EPSILON * oracle, "{d} vs {oracle}");
            assert_eq!(d, pairwise_distance(q, p));
        }
    }

    #[test]
    fn bandwidth_on_a_line() {
        let pts = line(5);
        let b = adaptive_bandwidth_at(0, &pts, Bandwidth::new(0.6).unwrap()).unwrap();
        assert_eq!(b, 2.0);
        let b = adaptive_bandwidth_at(0, &pts, Bandwidth::new(1.0).unwrap()).unwrap();
        assert_eq!(b, 4.0);
    }

    #[test]
    fn neighbour_count_does_not_round_up() {
        assert_eq!(Bandwidth::new(0.3).unwrap().neighbours(10), 3);
        assert_eq!(Bandwidth::new(0.01).unwrap().neighbours(10), 2);
        assert_eq!(Bandwidth::new(0.2).unwrap().neighbours(3024), 605);
    }

    #[test]
    fn bandwidth_matches_full_sort() {
        let pts = random_coords(500, 3);
        let bw = Bandwidth::new(0.2).unwrap();
        let k = (0.2f64 * 500.0).ceil() as usize;
        for i in [0, 17, 250, 499] {
            let mut all: Vec<f64> = pts.iter().map(|&q| pairwise_distance(pts[i], q)).collect();
            all.sort_by(f64::total_cmp);
            assert_eq!(adaptive_bandwidth_at(i, &pts, bw).unwrap(), all[k - 1]);
        }
    }

    #[test]
    fn duplicate_coordinates_fall_back_to_nearest_distinct() {
        let pts = vec![
            Coord::new(0.0, 0.0),
            Coord::new(0.0, 0.0),
            Coord::new(0.0, 0.0),
            Coord::new(3.0, 0.0),
        ];
        let b = adaptive_bandwidth_at(0, &pts, Bandwidth::new(0.5).unwrap()).unwrap();
        assert_eq!(b, 3.0);
    }

    #[test]
    fn all_coincident_is_an_error() {
        let pts = vec![Coord::new(2.0, 2.0); 4];
        assert_eq!(
            adaptive_bandwidth_at(1, &pts, Bandwidth::new(0.5).unwrap()),
            Err(Error::AllCoincident)
        );
        assert_eq!(ensure_spread(&pts), Err(Error::AllCoincident));
    }

    #[test]
    fn proportion_bounds() {
        assert!(Bandwidth::new(0.0).is_err());
        assert!(Bandwidth::new(1.0 + 1e-12).is_err());
        assert!(Bandwidth::new(f64::NAN).is_err());
        assert!(Bandwidth::new(1.0).is_ok());
    }

    #[test]
    fn kernel_examples() {
        for k in Kernel::ALL {
            assert_eq!(kernel_weight(k, 0.0, 2.5).unwrap(), 1.0);
        }
        assert_eq!(kernel_weight(Kernel::Bisquare, 1.0, 2.0).unwrap(), 0.5625);
        assert_eq!(kernel_weight(Kernel::Boxcar, 2.0, 2.0).unwrap(), 0.0);
        let e = kernel_weight(Kernel::Exponential, 2.0, 2.0).unwrap();
        assert!((e - 0.367_879_441_171_442_3).abs() < 1e-15);
        assert_eq!(
            kernel_weight(Kernel::Gaussian, 1.0, 0.0),
            Err(Error::NonPositiveBandwidth(0.0))
        );
        assert!(kernel_weight(Kernel::Tricube, 1.0, -1.0).is_err());
    }

    #[test]
    fn boxcar_full_bandwidth_drops_only_the_farthest_point() {
        let pts = line(6);
        let bw = Bandwidth::new(1.0).unwrap();
        for i in 0..pts.len() {
            let wv = weight_vector_at(i, &pts, Kernel::Boxcar, bw).unwrap();
            let zeros: Vec<usize> = (0..pts.len()).filter(|&j| wv.weights[j] == 0.0).collect();
            let far = if i < 3 { 5 } else { 0 };
            assert_eq!(zeros, vec![far], "focal {i}");
            assert_eq!(wv.weights[i], 1.0);
        }
    }

    #[test]
    fn bisquare_support_is_bounded_by_k() {
        let pts = random_coords(200, 5);
        let bw = Bandwidth::new(0.15).unwrap();
        let k = bw.neighbours(pts.len());
        for i in 0..pts.len() {
            let wv = weight_vector_at(i, &pts, Kernel::Bisquare, bw).unwrap();
            assert!(wv.weights.iter().filter(|&&w| w > 0.0).count() <= k);
            assert_eq!(wv.weights[i], 1.0);
        }
    }

    #[test]
    fn gaussian_weights_match_elementwise_recomputation() {
        let pts = random_coords(120, 9);
        let bw = Bandwidth::new(0.3).unwrap();
        for i in [0, 60, 119] {
            let wv = weight_vector_at(i, &pts, Kernel::Gaussian, bw).unwrap();
            let b = wv.bandwidth_used;
            for (j, &w) in wv.weights.iter().enumerate() {
                let d = ((pts[i].x - pts[j].x).powi(2) + (pts[i].y - pts[j].y).powi(2)).sqrt();
                let oracle = (-(d * d) / (2.0 * b * b)).exp();
                assert!(w > 0.0);
                assert!((w - oracle).abs() <= 1e-14, "{w} vs {oracle}");
            }
        }
    }

    proptest! {
        #[test]
        fn weights_bounded_and_monotone(
            d1 in 0.0f64..50.0,
            d2 in 0.0f64..50.0,
            b in 0.01f64..30.0,
        ) {
            let (lo, hi) = if d1 <= d2 { (d1, d2) } else { (d2, d1) };
            for k in Kernel::ALL {
                let wlo = kernel_weight(k, lo, b).unwrap();
                let whi = kernel_weight(k, hi, b).unwrap();
                prop_assert!((0.0..=1.0).contains(&wlo));
                prop_assert!((0.0..=1.0).contains(&whi));
                prop_assert!(wlo >= whi);
                if k.is_compact() && hi >= b {
                    prop_assert_eq!(whi, 0.0);
                }
                // Positive wherever the value is representable.
                if !k.is_compact() && hi / b < 30.0 {
                    prop_assert!(whi > 0.0);
                }
            }
        }

        #[test]
        fn bandwidth_ignores_order_of_other_points(seed in 0u64..1000, prop in 0.05f64..1.0) {
            let mut pts = random_coords(40, seed);
            let bw = Bandwidth::new(prop).unwrap();
            let before = adaptive_bandwidth_at(0, &pts, bw).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xabc);
            for j in (2..pts.len()).rev() {
                let r = rng.random_range(1..=j);
                pts.swap(j, r);
            }
            prop_assert_eq!(before, adaptive_bandwidth_at(0, &pts, bw).unwrap());
        }

        #[test]
        fn rigid_motion_leaves_weights_unchanged(
            seed in 0u64..1000,
            angle in 0.0f64..std::f64::consts::TAU,
            tx in -1e3f64..1e3,
            ty in -1e3f64..1e3,
        ) {
            let pts = random_coords(30, seed);
            let (s, c) = angle.sin_cos();
            let moved: Vec<Coord> = pts
                .iter()
                .map(|p| Coord::new(c * p.x - s * p.y + tx, s * p.x + c * p.y + ty))
                .collect();
            let bw = Bandwidth::new(0.4).unwrap();
            for k in Kernel::ALL {
                let a = weight_vector_at(3, &pts, k, bw).unwrap();
                let b = weight_vector_at(3, &moved, k, bw).unwrap();
                prop_assert!((a.bandwidth_used - b.bandwidth_used).abs() <= 1e-12 * a.bandwidth_used);
                for (wa, wb) in a.weights.iter().zip(&b.weights) {
                    prop_assert!((wa - wb).abs() <= 1e-12, "{} vs {}", wa, wb);
                }
            }
        }
    }
}
