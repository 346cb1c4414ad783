//! Area-weighted polygon centroids.

use crate::spatial_weights::Coord;

/// Rings of one polygon; the first is the exterior, the rest are holes.
pub type Polygon = Vec<Vec<Coord>>;

/// Signed area and area-weighted centroid of a ring, relative to `origin`.
fn ring_moments(ring: &[Coord], origin: Coord) -> (f64, f64, f64) {
    let mut a2 = 0.0;
    let mut cx = 0.0;
    let mut cy = 0.0;
    let len = ring.len();
    for idx in 0..len {
        let p = ring[idx];
        let q = ring[(idx + 1) % len];
        let (px, py) = (p.x - origin.x, p.y - origin.y);
        let (qx, qy) = (q.x - origin.x, q.y - origin.y);
        let cross = px * qy - qx * py;
        a2 += cross;
        cx += (px + qx) * cross;
        cy += (py + qy) * cross;
    }
    // area = a2 / 2; centroid = (cx, cy) / (3 a2)
    (a2 / 2.0, cx / (3.0 * a2), cy / (3.0 * a2))
}

fn open_ring(ring: &[Coord]) -> &[Coord] {
    match (ring.first(), ring.last()) {
        (Some(f), Some(l)) if ring.len() > 1 && f == l => &ring[..ring.len() - 1],
        _ => ring,
    }
}

fn vertex_mean(parts: &[Polygon]) -> Coord {
    let (mut sx, mut sy, mut count) = (0.0, 0.0, 0usize);
    for ring in parts.iter().flatten() {
        for p in open_ring(ring) {
            sx += p.x;
            sy += p.y;
            count += 1;
        }
    }
    let count = count.max(1) as f64;
    Coord::new(sx / count, sy / count)
}

/// Area-weighted centroid of a polygon or multipolygon. Holes subtract.
///
/// Zero-area input falls back to the mean of the vertices.
pub fn representative_point(parts: &[Polygon]) -> Coord {
    let Some(origin) = parts
        .iter()
        .flatten()
        .find_map(|ring| ring.first().copied())
    else {
        return Coord::new(f64::NAN, f64::NAN);
    };

    let mut area = 0.0;
    let mut mx = 0.0;
    let mut my = 0.0;
    let mut extent = 0.0f64;
    for polygon in parts {
        for (r, ring) in polygon.iter().enumerate() {
            let ring = open_ring(ring);
            if ring.len() < 3 {
                continue;
            }
            for p in ring {
                extent = extent.max((p.x - origin.x).abs()).max((p.y - origin.y).abs());
            }
            let (signed, cx, cy) = ring_moments(ring, origin);
            if signed == 0.0 {
                continue;
            }
            let a = if r == 0 { signed.abs() } else { -signed.abs() };
            area += a;
            mx += a * cx;
            my += a * cy;
        }
    }
    if !(area > 1e-12 * extent * extent) {
        return vertex_mean(parts);
    }
    Coord::new(origin.x + mx / area, origin.y + my / area)
}
