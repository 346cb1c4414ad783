//! Weighted covariance and the correlation coefficients derived from it.

use super::linalg::{cholesky_with_floor, inverse_from_cholesky, pinv_with_cutoff, Matrix};
use crate::error::{Error, Result};

/// Variances at or below this fraction of the largest diagonal entry are
/// treated as zero.
pub const VARIANCE_RTOL: f64 = 1e-14;

/// Excursions beyond ±1 smaller than this are rounding noise and are
/// clamped silently; larger ones are clamped and counted.
pub const CLAMP_SILENT: f64 = 1e-8;

/// A coefficient after clamping, with a flag for excursions large enough
/// to be worth reporting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Clamped {
    pub value: f64,
    pub flagged: bool,
}

#[inline]
pub(crate) fn clamp_unit(r: f64) -> Clamped {
    if r > 1.0 {
        Clamped {
            value: 1.0,
            flagged: r - 1.0 > CLAMP_SILENT,
        }
    } else if r < -1.0 {
        Clamped {
            value: -1.0,
            flagged: -1.0 - r > CLAMP_SILENT,
        }
    } else {
        Clamped {
            value: r,
            flagged: false,
        }
    }
}

/// Weighted covariance of row-major `rows` (n × m) into `out` (m × m).
///
/// Weights are normalised to sum to one and the covariance is taken about
/// the weighted means. Returns `(Σw, Σw²)` for the effective sample size.
pub(crate) fn weighted_covariance_into(
    rows: &[f64],
    m: usize,
    weights: &[f64],
    means: &mut [f64],
    dev: &mut [f64],
    out: &mut Matrix,
) -> Result<(f64, f64)> {
    debug_assert_eq!(rows.len(), weights.len() * m);
    debug_assert_eq!(out.dim(), m);
    means.fill(0.0);
    let mut sw = 0.0;
    let mut sw2 = 0.0;
    for (row, &w) in rows.chunks_exact(m).zip(weights) {
        if w == 0.0 {
            continue;
        }
        sw += w;
        sw2 += w * w;
        for (mean, &v) in means.iter_mut().zip(row) {
            *mean += w * v;
        }
    }
    if !(sw > 0.0) {
        return Err(Error::ZeroTotalWeight);
    }
    for mean in means.iter_mut() {
        *mean /= sw;
    }

    let acc = out.as_mut_slice();
    acc.fill(0.0);
    for (row, &w) in rows.chunks_exact(m).zip(weights) {
        if w == 0.0 {
            continue;
        }
        for c in 0..m {
            dev[c] = row[c] - means[c];
        }
        for a in 0..m {
            let wa = w * dev[a];
            for b in a..m {
                acc[a * m + b] += wa * dev[b];
            }
        }
    }
    for a in 0..m {
        for b in a..m {
            let v = acc[a * m + b] / sw;
            acc[a * m + b] = v;
            acc[b * m + a] = v;
        }
    }
    Ok((sw, sw2))
}

/// Weighted covariance matrix of the columns of `rows` (row-major, n × m).
pub fn weighted_covariance(rows: &[f64], m: usize, weights: &[f64]) -> Result<Matrix> {
    if m == 0 || rows.len() != weights.len() * m {
        return Err(Error::InvalidSpec(format!(
            "data has {} cells, expected {} rows of {m}",
            rows.len(),
            weights.len()
        )));
    }
    let mut out = Matrix::zeros(m);
    let mut means = vec![0.0; m];
    let mut dev = vec![0.0; m];
    weighted_covariance_into(rows, m, weights, &mut means, &mut dev, &mut out)?;
    Ok(out)
}

pub(crate) fn correlation_clamped(s: &Matrix, a: usize, b: usize) -> Option<Clamped> {
    let floor = VARIANCE_RTOL * s.max_diagonal();
    let saa = s[(a, a)];
    let sbb = s[(b, b)];
    if !(saa > floor) || !(sbb > floor) {
        return None;
    }
    Some(clamp_unit(s[(a, b)] / (saa * sbb).sqrt()))
}

/// Correlation between variables `a` and `b` of covariance matrix `s`, or
/// `None` when either variance is degenerate.
pub fn correlation_from_cov(s: &Matrix, a: usize, b: usize) -> Option<f64> {
    correlation_clamped(s, a, b).map(|c| c.value)
}

/// Rank decisions on a standardized matrix: Cholesky pivots and eigenvalues
/// at or below this are treated as zero. Exactly collinear windows leave
/// rounding residue near 1e-15, well below it.
pub const RANK_TOL: f64 = 1e-9;

/// Precision-matrix route to partial correlations.
///
/// The covariance is standardized to a correlation matrix before inversion,
/// so rescaling a variable cannot move the result even when the matrix is
/// singular and the pseudo-inverse is used. A variable with degenerate
/// variance gets a zero row and column.
///
/// The returned matrix holds the partial correlation of every pair given all
/// remaining variables; entries are `None` where a diagonal of the inverse
/// is degenerate.
pub(crate) fn partial_correlations_clamped(s: &Matrix) -> (Vec<Option<Clamped>>, bool) {
    let m = s.dim();
    let floor = VARIANCE_RTOL * s.max_diagonal();
    let scale: Vec<f64> = (0..m)
        .map(|i| if s[(i, i)] > floor { 1.0 / s[(i, i)].sqrt() } else { 0.0 })
        .collect();
    let mut r = Matrix::zeros(m);
    for a in 0..m {
        for b in 0..m {
            r[(a, b)] = if a == b && scale[a] > 0.0 {
                1.0
            } else {
                s[(a, b)] * scale[a] * scale[b]
            };
        }
    }
    let (c, used_pinv) = match cholesky_with_floor(&r, RANK_TOL) {
        Some(l) => (inverse_from_cholesky(&l), false),
        None => (pinv_with_cutoff(&r, RANK_TOL), true),
    };
    let floor = VARIANCE_RTOL * c.max_diagonal();
    let mut out = vec![None; m * m];
    for a in 0..m {
        for b in a..m {
            let caa = c[(a, a)];
            let cbb = c[(b, b)];
            if !(caa > floor) || !(cbb > floor) {
                continue;
            }
            let v = if a == b {
                Clamped {
                    value: 1.0,
                    flagged: false,
                }
            } else {
                clamp_unit(-c[(a, b)] / (caa * cbb).sqrt())
            };
            out[a * m + b] = Some(v);
            out[b * m + a] = Some(v);
        }
    }
    (out, used_pinv)
}

/// Partial correlation matrix from covariance `s`: entry `(a, b)` is the
/// correlation of `a` and `b` given every other variable in `s`.
///
/// With two variables this is plain correlation.
pub fn partial_correlation_from_cov(s: &Matrix) -> Vec<Vec<Option<f64>>> {
    let m = s.dim();
    if m == 2 {
        let r = correlation_from_cov(s, 0, 1);
        let d = |i: usize| (s[(i, i)] > VARIANCE_RTOL * s.max_diagonal()).then_some(1.0);
        return vec![vec![d(0), r], vec![r, d(1)]];
    }
    let (flat, _) = partial_correlations_clamped(s);
    flat.chunks(m)
        .map(|row| row.iter().map(|c| c.map(|c| c.value)).collect())
        .collect()
}
