//! Spatial datasets: ingestion, listwise completion and result documents.

mod centroid;
mod geojson;
mod point_csv;
mod projection;
mod result;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::engine::DataMatrix;
use crate::error::{Error, Result};
use crate::spatial_weights::Coord;

pub use centroid::{representative_point, Polygon};
pub use geojson::{dataset_to_geojson, parse_geojson};
pub use point_csv::{dataset_to_point_csv, parse_point_csv};
pub use projection::{looks_like_lonlat, project_equirectangular, EARTH_RADIUS_M};
pub use result::{scatter_records, serialize_result, ScatterRecord, SignificantAt};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GeometryKind {
    Point,
    Polygon,
}

/// How input coordinates are interpreted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CoordMode {
    /// Lon/lat when every anchor falls inside [-180, 180] × [-90, 90].
    #[default]
    Auto,
    Planar,
    LonLat,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariableInfo {
    pub name: String,
    pub missing: usize,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariableSchema {
    pub variables: Vec<VariableInfo>,
}

impl VariableSchema {
    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.variables.iter().map(|v| v.name.as_str())
    }
}

/// A numeric attribute; `None` marks a missing or non-numeric cell.
#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    pub values: Vec<Option<f64>>,
}

/// Immutable spatial table.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    /// Original GeoJSON geometry of each feature, kept for rendering.
    pub geometries: Vec<Value>,
    /// Representative point of each feature in source units.
    pub anchors: Vec<Coord>,
    /// Planar coordinates used for distances.
    pub coords: Vec<Coord>,
    pub projected: bool,
    pub geometry_kind: GeometryKind,
    pub columns: Vec<Column>,
    pub schema: VariableSchema,
}

impl Dataset {
    /// Builds a dataset from parsed parts; derives planar coordinates and
    /// the schema.
    pub(crate) fn assemble(
        geometries: Vec<Value>,
        anchors: Vec<Coord>,
        geometry_kind: GeometryKind,
        columns: Vec<Column>,
        mode: CoordMode,
    ) -> Result<Self> {
        let n = anchors.len();
        if n == 0 {
            return Err(Error::EmptyCollection);
        }
        if n < 3 {
            return Err(Error::FewerThanThreeFeatures(n));
        }
        if let Some(i) = anchors.iter().position(|c| !c.x.is_finite() || !c.y.is_finite()) {
            return Err(Error::MalformedInput(format!(
                "feature {i} has no finite coordinates"
            )));
        }
        let projected = match mode {
            CoordMode::Auto => looks_like_lonlat(&anchors),
            CoordMode::Planar => false,
            CoordMode::LonLat => true,
        };
        let coords = if projected {
            project_equirectangular(&anchors)
        } else {
            anchors.clone()
        };
        let schema = VariableSchema {
            variables: columns
                .iter()
                .map(|c| {
                    let present = c.values.iter().flatten();
                    VariableInfo {
                        name: c.name.clone(),
                        missing: c.values.iter().filter(|v| v.is_none()).count(),
                        min: present.clone().copied().fold(f64::INFINITY, f64::min),
                        max: present.copied().fold(f64::NEG_INFINITY, f64::max),
                    }
                })
                .collect(),
        };
        Ok(Self {
            geometries,
            anchors,
            coords,
            projected,
            geometry_kind,
            columns,
            schema,
        })
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn column(&self, name: &str) -> Option<&Column> {
        self.columns.iter().find(|c| c.name == name)
    }
}

/// Rows complete in every selected variable, plus the original indices of
/// those rows.
pub fn listwise_complete(
    d: &Dataset,
    variables: &[String],
) -> Result<(DataMatrix, Vec<Coord>, Vec<usize>)> {
    let cols: Vec<&Column> = variables
        .iter()
        .map(|v| d.column(v).ok_or_else(|| Error::SpecMismatch(v.clone())))
        .collect::<Result<_>>()?;
    let kept: Vec<usize> = (0..d.len())
        .filter(|&j| cols.iter().all(|c| c.values[j].is_some()))
        .collect();
    if kept.len() < 3 {
        return Err(Error::TooFewComplete(kept.len()));
    }
    let columns = cols
        .iter()
        .map(|c| kept.iter().map(|&j| c.values[j].unwrap_or(f64::NAN)).collect())
        .collect();
    let data = DataMatrix::from_columns(variables.to_vec(), columns)?;
    let coords = kept.iter().map(|&j| d.coords[j]).collect();
    Ok((data, coords, kept))
}
