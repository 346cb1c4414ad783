use serde_json::json;

use super::{Column, CoordMode, Dataset, GeometryKind};
use crate::error::{Error, Result};
use crate::spatial_weights::Coord;

fn cell_number(s: &str) -> Option<f64> {
    s.trim().parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Parses a comma-delimited table with a header row. Each row becomes a
/// point at (`x_col`, `y_col`); other columns numeric in at least one row
/// become variables.
pub fn parse_point_csv(bytes: &[u8], x_col: &str, y_col: &str, mode: CoordMode) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::Headers)
        .from_reader(bytes);
    let headers = reader
        .headers()
        .map_err(|e| Error::MalformedInput(e.to_string()))?
        .clone();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MissingColumn(name.to_string()))
    };
    let xi = find(x_col)?;
    let yi = find(y_col)?;
    let value_cols: Vec<usize> = (0..headers.len()).filter(|&c| c != xi && c != yi).collect();

    let mut anchors = Vec::new();
    let mut cells: Vec<Vec<Option<f64>>> = vec![Vec::new(); value_cols.len()];
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::MalformedInput(e.to_string()))?;
        let coord = |i: usize| {
            let raw = record.get(i).unwrap_or_default();
            cell_number(raw).ok_or_else(|| Error::NonNumericCoordinate {
                row,
                value: raw.to_string(),
            })
        };
        anchors.push(Coord::new(coord(xi)?, coord(yi)?));
        for (slot, &c) in cells.iter_mut().zip(&value_cols) {
            slot.push(record.get(c).and_then(cell_number));
        }
    }

    let columns = value_cols
        .iter()
        .zip(cells)
        .filter(|(_, values)| values.iter().any(Option::is_some))
        .map(|(&c, values)| Column {
            name: headers[c].to_string(),
            values,
        })
        .collect();
    let geometries = anchors
        .iter()
        .map(|c| json!({"type": "Point", "coordinates": [c.x, c.y]}))
        .collect();
    Dataset::assemble(geometries, anchors, GeometryKind::Point, columns, mode)
}

/// Writes a point dataset as CSV with the anchors in `x_col`/`y_col`.
/// Missing cells are left empty.
pub fn dataset_to_point_csv(d: &Dataset, x_col: &str, y_col: &str) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::MalformedInput(e.to_string());
    let mut header = vec![x_col.to_string(), y_col.to_string()];
    header.extend(d.columns.iter().map(|c| c.name.clone()));
    w.write_record(&header).map_err(io)?;
    for j in 0..d.len() {
        let mut row = vec![d.anchors[j].x.to_string(), d.anchors[j].y.to_string()];
        row.extend(
            d.columns
                .iter()
                .map(|c| c.values[j].map(|v| v.to_string()).unwrap_or_default()),
        );
        w.write_record(&row).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::MalformedInput(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::MalformedInput(e.to_string()))
}
