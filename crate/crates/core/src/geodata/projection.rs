//! Local equirectangular projection for lon/lat inputs.

use crate::spatial_weights::Coord;

/// Mean Earth radius in metres.
pub const EARTH_RADIUS_M: f64 = 6_371_008.8;

/// True when every point lies inside the lon/lat domain.
pub fn looks_like_lonlat(points: &[Coord]) -> bool {
    !points.is_empty()
        && points
            .iter()
            .all(|p| (-180.0..=180.0).contains(&p.x) && (-90.0..=90.0).contains(&p.y))
}

/// Projects lon/lat degrees to metres about the centroid of `points`:
/// `x = R (λ - λ0) cos φ0`, `y = R (φ - φ0)`.
pub fn project_equirectangular(points: &[Coord]) -> Vec<Coord> {
    if points.is_empty() {
        return Vec::new();
    }
    let n = points.len() as f64;
    let lon0 = points.iter().map(|p| p.x).sum::<f64>() / n;
    let lat0 = points.iter().map(|p| p.y).sum::<f64>() / n;
    let k = EARTH_RADIUS_M * lat0.to_radians().cos();
    points
        .iter()
        .map(|p| {
            Coord::new(
                k * (p.x - lon0).to_radians(),
                EARTH_RADIUS_M * (p.y - lat0).to_radians(),
            )
        })
        .collect()
}
