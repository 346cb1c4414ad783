//! Geographically weighted correlation and partial correlation surfaces.
//!
//! For every location the engine builds a kernel-weighted covariance matrix
//! over the analysed variables, then derives either plain correlations or
//! partial correlations (through the inverse of that matrix) for every pair,
//! each with a local t-test p-value.

pub mod linalg;
pub mod moments;
pub mod ranks;
pub mod significance;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spatial_weights::{
    bandwidth_from_distances, ensure_spread, fill_distances, Bandwidth, Coord, Kernel,
};
use linalg::Matrix;
use moments::{correlation_clamped, partial_correlations_clamped, weighted_covariance_into};
use significance::p_value_from_effective_n;

pub use linalg::moore_penrose_pinv;
pub use moments::{correlation_from_cov, partial_correlation_from_cov, weighted_covariance};
pub use ranks::rank_transform;
pub use significance::{effective_n, local_p_value, Alpha};

/// Complete numeric table: `n` observations by `m` named variables,
/// stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    names: Vec<String>,
    values: Vec<f64>,
    n: usize,
}

impl DataMatrix {
    pub fn from_columns(names: Vec<String>, columns: Vec<Vec<f64>>) -> Result<Self> {
        if names.len() != columns.len() {
            return Err(Error::InvalidSpec(format!(
                "{} names for {} columns",
                names.len(),
                columns.len()
            )));
        }
        if names.len() < 2 {
            return Err(Error::InvalidSpec("need at least two variables".into()));
        }
        let n = columns[0].len();
        if columns.iter().any(|c| c.len() != n) {
            return Err(Error::InvalidSpec("columns differ in length".into()));
        }
        if n < 3 {
            return Err(Error::TooFewPoints { needed: 3, got: n });
        }
        for (name, col) in names.iter().zip(&columns) {
            if let Some(j) = col.iter().position(|v| !v.is_finite()) {
                return Err(Error::InvalidSpec(format!(
                    "non-finite value in {name:?} at row {j}"
                )));
            }
        }
        for (i, name) in names.iter().enumerate() {
            if names[..i].contains(name) {
                return Err(Error::InvalidSpec(format!("duplicate variable {name:?}")));
            }
        }
        let m = names.len();
        let mut values = Vec::with_capacity(n * m);
        for j in 0..n {
            values.extend(columns.iter().map(|c| c[j]));
        }
        Ok(Self { names, values, n })
    }

    pub fn n_rows(&self) -> usize {
        self.n
    }

    pub fn n_cols(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn column(&self, c: usize) -> Vec<f64> {
        let m = self.n_cols();
        (0..self.n).map(|j| self.values[j * m + c]).collect()
    }

    pub fn column_by_name(&self, name: &str) -> Option<Vec<f64>> {
        self.index_of(name).map(|c| self.column(c))
    }

    /// Row-major view.
    pub fn rows(&self) -> &[f64] {
        &self.values
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Correlation,
    PartialCorrelation,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "corr" | "correlation" => Ok(Mode::Correlation),
            "pcorr" | "partial" | "partial_correlation" => Ok(Mode::PartialCorrelation),
            other => Err(Error::InvalidSpec(format!("unknown mode {other:?}"))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Correlation => "correlation",
            Mode::PartialCorrelation => "partial_correlation",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Pearson,
    Spearman,
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pearson" => Ok(Method::Pearson),
            "spearman" => Ok(Method::Spearman),
            other => Err(Error::InvalidSpec(format!("unknown method {other:?}"))),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Pearson => "pearson",
            Method::Spearman => "spearman",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisSpec {
    pub mode: Mode,
    pub method: Method,
    pub var_a: String,
    pub var_b: String,
    #[serde(default)]
    pub controls: Vec<String>,
    pub kernel: Kernel,
    pub bandwidth: Bandwidth,
}

impl AnalysisSpec {
    pub fn validate(&self) -> Result<()> {
        if self.var_a == self.var_b {
            return Err(Error::InvalidSpec(format!(
                "pair must name two different variables, got {:?} twice",
                self.var_a
            )));
        }
        for (i, c) in self.controls.iter().enumerate() {
            if *c == self.var_a || *c == self.var_b {
                return Err(Error::InvalidSpec(format!(
                    "control {c:?} is one of the pair"
                )));
            }
            if self.controls[..i].contains(c) {
                return Err(Error::InvalidSpec(format!("control {c:?} listed twice")));
            }
        }
        match (self.mode, self.controls.is_empty()) {
            (Mode::Correlation, false) => Err(Error::InvalidSpec(
                "controls are only allowed for partial correlation".into(),
            )),
            (Mode::PartialCorrelation, true) => Err(Error::InvalidSpec(
                "partial correlation needs at least one control".into(),
            )),
            _ => Ok(()),
        }
    }

    /// `[a, b, controls...]`.
    pub fn variable_set(&self) -> Vec<String> {
        let mut v = vec![self.var_a.clone(), self.var_b.clone()];
        v.extend(self.controls.iter().cloned());
        v
    }
}

/// Coefficient and p-value for one variable pair at one location.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairStat {
    /// `None` marks no-data (degenerate local variance).
    pub coef: Option<f64>,
    /// `None` when the coefficient is invalid or too few degrees of freedom remain.
    pub p_value: Option<f64>,
}

impl PairStat {
    pub fn valid(&self) -> bool {
        self.coef.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalResult {
    pub location_index: usize,
    /// One entry per pair, in the order of [`GwSurface::pairs`].
    pub stats: Vec<PairStat>,
    pub effective_n: f64,
    pub bandwidth: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GwSurface {
    pub spec: AnalysisSpec,
    pub variable_set: Vec<String>,
    /// Unordered pairs `(i, j)` with `i < j`, indexing `variable_set`.
    pub pairs: Vec<(usize, usize)>,
    pub per_location: Vec<LocalResult>,
    /// Coefficients clamped back into [-1, 1] from beyond the rounding margin.
    pub clamp_count: usize,
    /// Locations whose covariance matrix needed the pseudo-inverse.
    pub pseudo_inverse_count: usize,
}

impl GwSurface {
    pub fn len(&self) -> usize {
        self.per_location.len()
    }

    pub fn is_empty(&self) -> bool {
        self.per_location.is_empty()
    }

    /// Position of the unordered pair `{a, b}` in [`Self::pairs`].
    pub fn pair_index(&self, a: &str, b: &str) -> Result<usize> {
        let missing = || Error::PairNotInSurface(a.to_string(), b.to_string());
        let ia = self.variable_set.iter().position(|v| v == a).ok_or_else(missing)?;
        let ib = self.variable_set.iter().position(|v| v == b).ok_or_else(missing)?;
        let key = (ia.min(ib), ia.max(ib));
        self.pairs.iter().position(|&p| p == key).ok_or_else(missing)
    }

    pub fn pair_stats(&self, a: &str, b: &str) -> Result<Vec<PairStat>> {
        let k = self.pair_index(a, b)?;
        Ok(self.per_location.iter().map(|r| r.stats[k]).collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SignificanceMask {
    pub alpha: Alpha,
    pub significant: Vec<bool>,
}

pub fn apply_significance_mask(
    surface: &GwSurface,
    a: &str,
    b: &str,
    alpha: Alpha,
) -> Result<SignificanceMask> {
    let significant = surface
        .pair_stats(a, b)?
        .iter()
        .map(|s| s.valid() && alpha.admits(s.p_value))
        .collect();
    Ok(SignificanceMask { alpha, significant })
}

fn all_pairs(m: usize) -> Vec<(usize, usize)> {
    (0..m)
        .flat_map(|i| ((i + 1)..m).map(move |j| (i, j)))
        .collect()
}

/// Row-major matrix of the analysed variables, ranked when needed.
fn analysis_rows(data: &DataMatrix, spec: &AnalysisSpec) -> Result<Vec<f64>> {
    let vars = spec.variable_set();
    let mut columns = Vec::with_capacity(vars.len());
    for v in &vars {
        let col = data
            .column_by_name(v)
            .ok_or_else(|| Error::SpecMismatch(v.clone()))?;
        columns.push(match spec.method {
            Method::Pearson => col,
            Method::Spearman => rank_transform(&col),
        });
    }
    let n = data.n_rows();
    let mut rows = Vec::with_capacity(n * vars.len());
    for j in 0..n {
        rows.extend(columns.iter().map(|c| c[j]));
    }
    Ok(rows)
}

struct Scratch {
    distances: Vec<f64>,
    select: Vec<f64>,
    weights: Vec<f64>,
    means: Vec<f64>,
    dev: Vec<f64>,
    cov: Matrix,
}

impl Scratch {
    fn new(n: usize, m: usize) -> Self {
        Self {
            distances: Vec::with_capacity(n),
            select: Vec::with_capacity(n),
            weights: Vec::with_capacity(n),
            means: vec![0.0; m],
            dev: vec![0.0; m],
            cov: Matrix::zeros(m),
        }
    }
}

struct LocalOutcome {
    result: LocalResult,
    clamped: usize,
    pseudo_inverse: bool,
}

fn local_statistics(
    i: usize,
    coords: &[Coord],
    rows: &[f64],
    m: usize,
    pairs: &[(usize, usize)],
    spec: &AnalysisSpec,
    k: usize,
    s: &mut Scratch,
) -> Result<LocalOutcome> {
    fill_distances(coords[i], coords, &mut s.distances);
    let b = bandwidth_from_distances(&s.distances, k, &mut s.select)?;
    s.weights.clear();
    s.weights
        .extend(s.distances.iter().map(|&d| spec.kernel.eval(d, b)));
    let (sw, sw2) =
        weighted_covariance_into(rows, m, &s.weights, &mut s.means, &mut s.dev, &mut s.cov)?;
    let n_eff = sw * sw / sw2;

    let mut clamped = 0;
    let mut pseudo_inverse = false;
    let (coefs, controls) = match spec.mode {
        Mode::Correlation => (
            pairs
                .iter()
                .map(|&(a, b)| correlation_clamped(&s.cov, a, b))
                .collect::<Vec<_>>(),
            0,
        ),
        Mode::PartialCorrelation => {
            let (flat, used_pinv) = partial_correlations_clamped(&s.cov);
            pseudo_inverse = used_pinv;
            (
                pairs.iter().map(|&(a, b)| flat[a * m + b]).collect(),
                m - 2,
            )
        }
    };
    let stats = coefs
        .into_iter()
        .map(|c| match c {
            Some(c) => {
                clamped += usize::from(c.flagged);
                PairStat {
                    coef: Some(c.value),
                    p_value: p_value_from_effective_n(c.value, n_eff, controls),
                }
            }
            None => PairStat {
                coef: None,
                p_value: None,
            },
        })
        .collect();
    Ok(LocalOutcome {
        result: LocalResult {
            location_index: i,
            stats,
            effective_n: n_eff,
            bandwidth: b,
        },
        clamped,
        pseudo_inverse,
    })
}

/// Computes the full surface, fanning out over locations on the current
/// rayon pool. The result does not depend on the number of workers.
pub fn compute_surface(
    data: &DataMatrix,
    coords: &[Coord],
    spec: &AnalysisSpec,
) -> Result<GwSurface> {
    spec.validate()?;
    if coords.len() != data.n_rows() {
        return Err(Error::IndexMismatch(format!(
            "{} coordinates for {} rows",
            coords.len(),
            data.n_rows()
        )));
    }
    ensure_spread(coords)?;
    let variable_set = spec.variable_set();
    let m = variable_set.len();
    let rows = analysis_rows(data, spec)?;
    let pairs = all_pairs(m);
    let n = coords.len();
    let k = spec.bandwidth.neighbours(n);

    let outcomes: Vec<LocalOutcome> = (0..n)
        .into_par_iter()
        .map_init(
            || Scratch::new(n, m),
            |s, i| local_statistics(i, coords, &rows, m, &pairs, spec, k, s),
        )
        .collect::<Result<_>>()?;

    let clamp_count = outcomes.iter().map(|o| o.clamped).sum();
    let pseudo_inverse_count = outcomes.iter().filter(|o| o.pseudo_inverse).count();
    Ok(GwSurface {
        spec: spec.clone(),
        variable_set,
        pairs,
        per_location: outcomes.into_iter().map(|o| o.result).collect(),
        clamp_count,
        pseudo_inverse_count,
    })
}
