//! Geographically weighted correlation and partial correlation.
//!
//! - [`spatial_weights`]: distances, adaptive bandwidths, kernel weights
//! - [`engine`]: weighted covariance, (partial) correlation surfaces, local t-tests
//! - [`geodata`]: GeoJSON / CSV ingestion and result documents
//! - [`analysis`]: the request-to-document pipeline shared by the CLI and HTTP service
//! - [`synth`]: deterministic synthetic datasets with spatially varying correlation

pub mod analysis;
pub mod engine;
pub mod error;
pub mod geodata;
pub mod spatial_weights;
pub mod synth;

pub use engine::{
    apply_significance_mask, compute_surface, AnalysisSpec, DataMatrix, GwSurface, LocalResult,
    Alpha, Method, Mode, PairStat, SignificanceMask,
};
pub use analysis::{run_analysis, Analysis, AnalysisRequest, AnalysisSummary};
pub use error::{Error, Result};
pub use geodata::{CoordMode, Dataset, GeometryKind, VariableSchema};
pub use spatial_weights::{Bandwidth, Coord, Kernel, WeightVector};
pub use synth::synth_dataset;
