//! The request → surface → document pipeline shared by the CLI and the
//! HTTP service, so both produce identical documents for identical inputs.

use std::fmt;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::engine::{compute_surface, Alpha, AnalysisSpec, GwSurface, Method, Mode};
use crate::error::{Error, Result};
use crate::geodata::{listwise_complete, scatter_records, serialize_result, Dataset, ScatterRecord};
use crate::spatial_weights::{Bandwidth, Kernel};

/// Analysis parameters as submitted by a client.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisRequest {
    pub mode: Mode,
    pub method: Method,
    pub var_a: String,
    pub var_b: String,
    #[serde(default)]
    pub controls: Vec<String>,
    pub kernel: Kernel,
    pub bandwidth_proportion: f64,
    /// Pair shown by default; `(var_a, var_b)` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub displayed_pair: Option<(String, String)>,
}

impl AnalysisRequest {
    pub fn to_spec(&self) -> Result<AnalysisSpec> {
        let spec = AnalysisSpec {
            mode: self.mode,
            method: self.method,
            var_a: self.var_a.clone(),
            var_b: self.var_b.clone(),
            controls: self.controls.clone(),
            kernel: self.kernel,
            bandwidth: Bandwidth::new(self.bandwidth_proportion)?,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn displayed(&self) -> (String, String) {
        self.displayed_pair
            .clone()
            .unwrap_or_else(|| (self.var_a.clone(), self.var_b.clone()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisSummary {
    pub analysis_id: String,
    pub spec: AnalysisSpec,
    pub displayed_pair: (String, String),
    pub n_used: usize,
    pub n_dropped: usize,
    pub coef_min: Option<f64>,
    pub coef_max: Option<f64>,
    pub coef_mean: Option<f64>,
    pub n_valid: usize,
    pub n_significant_001: usize,
    pub n_significant_005: usize,
    pub clamp_count: usize,
    pub pseudo_inverse_count: usize,
    pub wall_time_ms: f64,
}

impl fmt::Display for AnalysisSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = &self.spec;
        let opt = |v: Option<f64>| v.map_or_else(|| "n/a".to_string(), |v| format!("{v:.6}"));
        writeln!(f, "analysis      {}", self.analysis_id)?;
        writeln!(f, "mode          {} ({})", s.mode, s.method)?;
        writeln!(f, "pair          {} ~ {}", self.displayed_pair.0, self.displayed_pair.1)?;
        if !s.controls.is_empty() {
            writeln!(f, "controls      {}", s.controls.join(", "))?;
        }
        writeln!(f, "kernel        {} (adaptive {})", s.kernel, s.bandwidth.proportion())?;
        writeln!(f, "observations  {} used, {} dropped", self.n_used, self.n_dropped)?;
        writeln!(
            f,
            "coefficient   min {} / max {} / mean {} ({} valid)",
            opt(self.coef_min),
            opt(self.coef_max),
            opt(self.coef_mean),
            self.n_valid
        )?;
        writeln!(
            f,
            "significant   {} at 0.01, {} at 0.05",
            self.n_significant_001, self.n_significant_005
        )?;
        writeln!(
            f,
            "diagnostics   {} clamped, {} pseudo-inverse",
            self.clamp_count, self.pseudo_inverse_count
        )?;
        write!(f, "wall time     {:.1} ms", self.wall_time_ms)
    }
}

/// A computed surface with the bookkeeping needed to map it back onto the
/// dataset it came from.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub request: AnalysisRequest,
    pub surface: GwSurface,
    /// Original feature index of each analysed location.
    pub kept: Vec<usize>,
    pub n_total: usize,
    pub wall_time_ms: f64,
}

/// Listwise-completes `d` over the request's variables and computes the surface.
pub fn run_analysis(d: &Dataset, request: &AnalysisRequest) -> Result<Analysis> {
    let spec = request.to_spec()?;
    let vars = spec.variable_set();
    let (a, b) = request.displayed();
    if !vars.contains(&a) || !vars.contains(&b) || a == b {
        return Err(Error::PairNotInSurface(a, b));
    }
    let (data, coords, kept) = listwise_complete(d, &vars)?;
    let start = Instant::now();
    let surface = compute_surface(&data, &coords, &spec)?;
    let wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(Analysis {
        request: request.clone(),
        surface,
        kept,
        n_total: d.len(),
        wall_time_ms,
    })
}

impl Analysis {
    pub fn document(&self, d: &Dataset, pair: (&str, &str)) -> Result<Value> {
        serialize_result(d, &self.surface, pair, &self.kept)
    }

    /// Serialised map document; the exact bytes served and written to disk.
    pub fn document_bytes(&self, d: &Dataset, pair: (&str, &str)) -> Result<Vec<u8>> {
        let doc = self.document(d, pair)?;
        Ok(serde_json::to_vec(&doc).expect("JSON values always serialise"))
    }

    pub fn scatter(&self, d: &Dataset, pair: (&str, &str)) -> Result<Vec<ScatterRecord>> {
        scatter_records(d, &self.surface, pair, &self.kept)
    }

    pub fn summary(&self, analysis_id: &str) -> AnalysisSummary {
        let pair = self.request.displayed();
        let stats = self
            .surface
            .pair_stats(&pair.0, &pair.1)
            .expect("displayed pair validated in run_analysis");
        let coefs: Vec<f64> = stats.iter().filter_map(|s| s.coef).collect();
        let count = |alpha: Alpha| {
            stats
                .iter()
                .filter(|s| s.valid() && alpha.admits(s.p_value))
                .count()
        };
        let (min, max, mean) = if coefs.is_empty() {
            (None, None, None)
        } else {
            (
                Some(coefs.iter().copied().fold(f64::INFINITY, f64::min)),
                Some(coefs.iter().copied().fold(f64::NEG_INFINITY, f64::max)),
                Some(coefs.iter().sum::<f64>() / coefs.len() as f64),
            )
        };
        AnalysisSummary {
            analysis_id: analysis_id.to_string(),
            spec: self.surface.spec.clone(),
            displayed_pair: pair,
            n_used: self.kept.len(),
            n_dropped: self.n_total - self.kept.len(),
            coef_min: min,
            coef_max: max,
            coef_mean: mean,
            n_valid: coefs.len(),
            n_significant_001: count(Alpha::P01),
            n_significant_005: count(Alpha::P05),
            clamp_count: self.surface.clamp_count,
            pseudo_inverse_count: self.surface.pseudo_inverse_count,
            wall_time_ms: self.wall_time_ms,
        }
    }
}
