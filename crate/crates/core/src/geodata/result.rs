//! Result documents: the GeoJSON map layer and scatter records.

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use super::Dataset;
use crate::engine::{Alpha, GwSurface};
use crate::error::{Error, Result};

fn check_alignment(d: &Dataset, s: &GwSurface, kept: &[usize]) -> Result<()> {
    if kept.len() != s.len() {
        return Err(Error::IndexMismatch(format!(
            "{} kept rows for a surface of {} locations",
            kept.len(),
            s.len()
        )));
    }
    if kept.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::IndexMismatch("kept indices must be strictly increasing".into()));
    }
    if let Some(&last) = kept.last() {
        if last >= d.len() {
            return Err(Error::IndexMismatch(format!(
                "kept index {last} out of range for {} features",
                d.len()
            )));
        }
    }
    Ok(())
}

fn raw_values<'a>(d: &'a Dataset, name: &str) -> Result<&'a [Option<f64>]> {
    d.column(name)
        .map(|c| c.values.as_slice())
        .ok_or_else(|| Error::SpecMismatch(name.to_string()))
}

fn num(v: Option<f64>) -> Value {
    v.map_or(Value::Null, Value::from)
}

const RESULT_KEYS: [&str; 8] = [
    "coef",
    "pval",
    "valid",
    "sig_001",
    "sig_005",
    "value_a",
    "value_b",
    "effective_n",
];

/// Map document for the displayed pair `(a, b)`. Feature order matches the
/// input; rows dropped by listwise completion carry null properties.
pub fn serialize_result(
    d: &Dataset,
    s: &GwSurface,
    pair: (&str, &str),
    kept: &[usize],
) -> Result<Value> {
    check_alignment(d, s, kept)?;
    let k = s.pair_index(pair.0, pair.1)?;
    let va = raw_values(d, pair.0)?;
    let vb = raw_values(d, pair.1)?;

    let mut props: Vec<Map<String, Value>> = (0..d.len())
        .map(|_| RESULT_KEYS.iter().map(|&key| (key.to_string(), Value::Null)).collect())
        .collect();
    for (local, &j) in s.per_location.iter().zip(kept) {
        let st = local.stats[k];
        let p = &mut props[j];
        p.insert("coef".into(), num(st.coef));
        p.insert("pval".into(), num(st.p_value));
        p.insert("valid".into(), Value::Bool(st.valid()));
        p.insert("sig_001".into(), Value::Bool(st.valid() && Alpha::P01.admits(st.p_value)));
        p.insert("sig_005".into(), Value::Bool(st.valid() && Alpha::P05.admits(st.p_value)));
        p.insert("value_a".into(), num(va[j]));
        p.insert("value_b".into(), num(vb[j]));
        p.insert("effective_n".into(), Value::from(local.effective_n));
    }
    let features: Vec<Value> = props
        .into_iter()
        .zip(&d.geometries)
        .map(|(properties, geometry)| {
            json!({"type": "Feature", "geometry": geometry, "properties": properties})
        })
        .collect();
    Ok(json!({"type": "FeatureCollection", "features": features}))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignificantAt {
    #[serde(rename = "0.01")]
    pub p01: bool,
    #[serde(rename = "0.05")]
    pub p05: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScatterRecord {
    /// Index of the feature in the original input.
    pub index: usize,
    pub value_a: f64,
    pub value_b: f64,
    pub coef: Option<f64>,
    pub pval: Option<f64>,
    pub significant_at: SignificantAt,
}

/// One record per analysed observation, for the displayed pair.
pub fn scatter_records(
    d: &Dataset,
    s: &GwSurface,
    pair: (&str, &str),
    kept: &[usize],
) -> Result<Vec<ScatterRecord>> {
    check_alignment(d, s, kept)?;
    let k = s.pair_index(pair.0, pair.1)?;
    let va = raw_values(d, pair.0)?;
    let vb = raw_values(d, pair.1)?;
    s.per_location
        .iter()
        .zip(kept)
        .map(|(local, &j)| {
            let st = local.stats[k];
            let (Some(a), Some(b)) = (va[j], vb[j]) else {
                return Err(Error::IndexMismatch(format!(
                    "row {j} was analysed but has a missing value"
                )));
            };
            Ok(ScatterRecord {
                index: j,
                value_a: a,
                value_b: b,
                coef: st.coef,
                pval: st.p_value,
                significant_at: SignificantAt {
                    p01: st.valid() && Alpha::P01.admits(st.p_value),
                    p05: st.valid() && Alpha::P05.admits(st.p_value),
                },
            })
        })
        .collect()
}
