use serde_json::{json, Map, Value};

use super::centroid::{representative_point, Polygon};
use super::{Column, CoordMode, Dataset, GeometryKind};
use crate::error::{Error, Result};
use crate::spatial_weights::Coord;

fn malformed(msg: impl Into<String>) -> Error {
    Error::MalformedInput(msg.into())
}

fn position(v: &Value) -> Result<Coord> {
    let arr = v
        .as_array()
        .filter(|a| a.len() >= 2)
        .ok_or_else(|| malformed("position must be an array of at least two numbers"))?;
    match (arr[0].as_f64(), arr[1].as_f64()) {
        (Some(x), Some(y)) => Ok(Coord::new(x, y)),
        _ => Err(malformed("position coordinates must be numbers")),
    }
}

fn polygon(v: &Value) -> Result<Polygon> {
    let rings = v
        .as_array()
        .filter(|r| !r.is_empty())
        .ok_or_else(|| malformed("polygon needs at least one ring"))?;
    rings
        .iter()
        .map(|ring| {
            let pts = ring
                .as_array()
                .ok_or_else(|| malformed("ring must be an array of positions"))?
                .iter()
                .map(position)
                .collect::<Result<Vec<_>>>()?;
            if pts.len() < 3 {
                return Err(malformed("ring needs at least three positions"));
            }
            Ok(pts)
        })
        .collect()
}

/// Geometry kind and representative point of one feature geometry.
fn anchor(geometry: &Value, index: usize) -> Result<(GeometryKind, Coord)> {
    let obj = geometry
        .as_object()
        .ok_or_else(|| malformed(format!("feature {index} has no geometry")))?;
    let kind = obj.get("type").and_then(Value::as_str).unwrap_or_default();
    let coords = obj.get("coordinates");
    let need = || malformed(format!("feature {index}: {kind} without coordinates"));
    match kind {
        "Point" => Ok((GeometryKind::Point, position(coords.ok_or_else(need)?)?)),
        "Polygon" => {
            let p = polygon(coords.ok_or_else(need)?)?;
            Ok((GeometryKind::Polygon, representative_point(&[p])))
        }
        "MultiPolygon" => {
            let parts = coords
                .ok_or_else(need)?
                .as_array()
                .filter(|a| !a.is_empty())
                .ok_or_else(|| malformed(format!("feature {index}: empty MultiPolygon")))?
                .iter()
                .map(polygon)
                .collect::<Result<Vec<_>>>()?;
            Ok((GeometryKind::Polygon, representative_point(&parts)))
        }
        other => Err(Error::MixedGeometry(format!(
            "feature {index} is a {other:?}; only Point, Polygon and MultiPolygon are supported"
        ))),
    }
}

/// Parses a GeoJSON FeatureCollection of points or (multi)polygons.
///
/// Properties present on every feature and numeric on at least one become
/// variables; non-numeric cells are recorded as missing.
pub fn parse_geojson(bytes: &[u8], mode: CoordMode) -> Result<Dataset> {
    let root: Value =
        serde_json::from_slice(bytes).map_err(|e| malformed(format!("invalid JSON: {e}")))?;
    if root.get("type").and_then(Value::as_str) != Some("FeatureCollection") {
        return Err(malformed("top-level object must be a FeatureCollection"));
    }
    let features = root
        .get("features")
        .and_then(Value::as_array)
        .ok_or_else(|| malformed("FeatureCollection without a features array"))?;
    if features.is_empty() {
        return Err(Error::EmptyCollection);
    }

    let empty = Map::new();
    let mut geometries = Vec::with_capacity(features.len());
    let mut anchors = Vec::with_capacity(features.len());
    let mut props = Vec::with_capacity(features.len());
    let mut kind = None;
    for (i, f) in features.iter().enumerate() {
        if f.get("type").and_then(Value::as_str) != Some("Feature") {
            return Err(malformed(format!("element {i} is not a Feature")));
        }
        let geometry = f.get("geometry").cloned().unwrap_or(Value::Null);
        let (k, c) = anchor(&geometry, i)?;
        match kind {
            None => kind = Some(k),
            Some(prev) if prev != k => {
                return Err(Error::MixedGeometry(format!(
                    "feature {i} mixes {k:?} with {prev:?}"
                )))
            }
            _ => {}
        }
        geometries.push(geometry);
        anchors.push(c);
        props.push(match f.get("properties") {
            Some(Value::Object(m)) => m,
            Some(Value::Null) | None => &empty,
            Some(_) => return Err(malformed(format!("feature {i}: properties must be an object"))),
        });
    }

    let columns = props[0]
        .keys()
        .filter(|key| props.iter().all(|p| p.contains_key(*key)))
        .filter_map(|key| {
            let values: Vec<Option<f64>> = props
                .iter()
                .map(|p| p[key].as_f64().filter(|v| v.is_finite()))
                .collect();
            values.iter().any(Option::is_some).then(|| Column {
                name: key.clone(),
                values,
            })
        })
        .collect();

    Dataset::assemble(
        geometries,
        anchors,
        kind.expect("at least one feature"),
        columns,
        mode,
    )
}

fn number(v: Option<f64>) -> Value {
    v.map_or(Value::Null, Value::from)
}

/// Writes a dataset back out as a FeatureCollection with its variables as
/// properties.
pub fn dataset_to_geojson(d: &Dataset) -> Value {
    let features = (0..d.len())
        .map(|j| {
            let properties: Map<String, Value> = d
                .columns
                .iter()
                .map(|c| (c.name.clone(), number(c.values[j])))
                .collect();
            json!({
                "type": "Feature",
                "geometry": d.geometries[j],
                "properties": properties,
            })
        })
        .collect::<Vec<_>>();
    json!({ "type": "FeatureCollection", "features": features })
}
