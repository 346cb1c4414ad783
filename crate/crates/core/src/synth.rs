//! Deterministic synthetic point datasets whose pairwise correlation varies
//! across space.
//!
//! Points are uniform in a square. Two latent variables each combine a
//! smooth random field with independent noise. The first variable is the
//! first latent; the second mixes it with a coefficient `cos(π u)` that runs
//! from +1 on the west edge to -1 on the east edge, so local correlation
//! between them changes sign across the square. Further variables are fixed
//! random mixtures of both latents.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde_json::json;

use crate::error::{Error, Result};
use crate::geodata::{Column, CoordMode, Dataset, GeometryKind};
use crate::spatial_weights::Coord;

/// Side of the square, in metres.
pub const SIDE: f64 = 10_000.0;
/// False origin, chosen so coordinates are never mistaken for lon/lat.
pub const ORIGIN: Coord = Coord::new(500_000.0, 4_000_000.0);

struct SmoothField {
    waves: Vec<(f64, f64, f64, f64)>,
}

impl SmoothField {
    fn new(rng: &mut ChaCha8Rng) -> Self {
        let waves = (0..4)
            .map(|_| {
                (
                    rng.random_range(0.5..2.5),
                    rng.random_range(0.5..2.5),
                    rng.random_range(0.0..std::f64::consts::TAU),
                    rng.random_range(0.5..1.0),
                )
            })
            .collect();
        Self { waves }
    }

    fn at(&self, u: f64, v: f64) -> f64 {
        self.waves
            .iter()
            .map(|&(fu, fv, phase, amp)| amp * (std::f64::consts::TAU * (fu * u + fv * v) + phase).sin())
            .sum::<f64>()
            / 2.0
    }
}

pub fn variable_names(m: usize) -> Vec<String> {
    (1..=m).map(|i| format!("v{i}")).collect()
}

pub fn synth_dataset(n: usize, m: usize, seed: u64) -> Result<Dataset> {
    if n < 10 {
        return Err(Error::InvalidSpec(format!("synthetic datasets need n >= 10, got {n}")));
    }
    if m < 2 {
        return Err(Error::InvalidSpec(format!("synthetic datasets need m >= 2, got {m}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let field_a = SmoothField::new(&mut rng);
    let field_b = SmoothField::new(&mut rng);
    let mixes: Vec<(f64, f64)> = (2..m)
        .map(|_| (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();

    let mut anchors = Vec::with_capacity(n);
    let mut columns: Vec<Vec<Option<f64>>> = vec![Vec::with_capacity(n); m];
    for _ in 0..n {
        let u: f64 = rng.random();
        let v: f64 = rng.random();
        anchors.push(Coord::new(ORIGIN.x + u * SIDE, ORIGIN.y + v * SIDE));
        let noise = |rng: &mut ChaCha8Rng| rng.sample::<f64, _>(StandardNormal);
        let la = field_a.at(u, v) + noise(&mut rng);
        let lb = field_b.at(u, v) + noise(&mut rng);
        let slope = (std::f64::consts::PI * u).cos();
        columns[0].push(Some(la));
        columns[1].push(Some(slope * la + 0.6 * lb));
        for (c, &(wa, wb)) in mixes.iter().enumerate() {
            let e = noise(&mut rng);
            columns[c + 2].push(Some(wa * la + wb * lb + 0.5 * e));
        }
    }

    let geometries = anchors
        .iter()
        .map(|c| json!({"type": "Point", "coordinates": [c.x, c.y]}))
        .collect();
    let columns = variable_names(m)
        .into_iter()
        .zip(columns)
        .map(|(name, values)| Column { name, values })
        .collect();
    Dataset::assemble(geometries, anchors, GeometryKind::Point, columns, CoordMode::Planar)
}
