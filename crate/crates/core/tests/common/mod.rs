//! Straight-line reference implementations used as test oracles.
//!
//! Nothing in this file calls into the library. Everything is materialised
//! eagerly (full distance and weight matrices, full sorts, explicit
//! recursion for partial correlations) so the code can be checked by eye.

#![allow(dead_code)]

pub mod invariance;

use statrs::distribution::{ContinuousCDF, StudentsT};

pub fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for i in 0..x.len() {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    sxy / (sxx * syy).sqrt()
}

/// Classical two-sided p-value of a correlation through the t statistic.
pub fn t_test_p(r: f64, df: f64) -> Option<f64> {
    if df < 1.0 {
        return None;
    }
    if r.abs() >= 1.0 {
        return Some(0.0);
    }
    let t = r * (df / (1.0 - r * r)).sqrt();
    let dist = StudentsT::new(0.0, 1.0, df).unwrap();
    Some(2.0 * dist.sf(t.abs()))
}

/// Average ranks by counting: `1 + #{smaller} + (#{equal} - 1) / 2`.
pub fn ranks(x: &[f64]) -> Vec<f64> {
    x.iter()
        .map(|&v| {
            let smaller = x.iter().filter(|&&u| u < v).count() as f64;
            let equal = x.iter().filter(|&&u| u == v).count() as f64;
            1.0 + smaller + (equal - 1.0) / 2.0
        })
        .collect()
}

pub fn kernel(name: &str, d: f64, b: f64) -> f64 {
    let u = d / b;
    match name {
        "gaussian" => (-0.5 * u * u).exp(),
        "exponential" => (-u).exp(),
        "boxcar" => {
            if d < b {
                1.0
            } else {
                0.0
            }
        }
        "bisquare" => {
            if d < b {
                (1.0 - u * u).powi(2)
            } else {
                0.0
            }
        }
        "tricube" => {
            if d < b {
                (1.0 - u * u * u).powi(3)
            } else {
                0.0
            }
        }
        other => panic!("unknown kernel {other}"),
    }
}

/// Full `n × n` weight matrix; row `i` holds the weights seen from location `i`.
pub fn weight_matrix(coords: &[(f64, f64)], kernel_name: &str, proportion: f64) -> Vec<Vec<f64>> {
    let n = coords.len();
    let dist: Vec<Vec<f64>> = coords
        .iter()
        .map(|&(xi, yi)| coords.iter().map(|&(xj, yj)| (xi - xj).hypot(yi - yj)).collect())
        .collect();
    let k = ((proportion * n as f64 - 1e-9).ceil() as usize).clamp(2, n);
    dist.iter()
        .map(|row| {
            let mut sorted = row.clone();
            sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let mut b = sorted[k - 1];
            if b == 0.0 {
                b = *sorted.iter().find(|&&d| d > 0.0).expect("some distinct point");
            }
            row.iter().map(|&d| kernel(kernel_name, d, b)).collect()
        })
        .collect()
}

/// Weighted covariance about weighted means, weights normalised to sum 1.
pub fn weighted_cov(columns: &[Vec<f64>], w: &[f64]) -> Vec<Vec<f64>> {
    let total: f64 = w.iter().sum();
    let m = columns.len();
    let means: Vec<f64> = columns
        .iter()
        .map(|c| c.iter().zip(w).map(|(x, w)| x * w).sum::<f64>() / total)
        .collect();
    let mut s = vec![vec![0.0; m]; m];
    for a in 0..m {
        for b in 0..m {
            let mut acc = 0.0;
            for j in 0..w.len() {
                acc += w[j] * (columns[a][j] - means[a]) * (columns[b][j] - means[b]);
            }
            s[a][b] = acc / total;
        }
    }
    s
}

pub fn cov_to_corr(s: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let m = s.len();
    let mut r = vec![vec![0.0; m]; m];
    for a in 0..m {
        for b in 0..m {
            r[a][b] = s[a][b] / (s[a][a] * s[b][b]).sqrt();
        }
    }
    r
}

/// Partial correlation of `a` and `b` given `given`, by the first-order
/// recursion applied one control at a time.
pub fn recursive_partial(r: &[Vec<f64>], a: usize, b: usize, given: &[usize]) -> f64 {
    match given.split_last() {
        None => r[a][b],
        Some((&c, rest)) => {
            let ab = recursive_partial(r, a, b, rest);
            let ac = recursive_partial(r, a, c, rest);
            let bc = recursive_partial(r, b, c, rest);
            (ab - ac * bc) / ((1.0 - ac * ac) * (1.0 - bc * bc)).sqrt()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NaiveMode {
    Correlation,
    Partial,
}

/// Per location, per pair `(a, b)` with `a < b` in row-major order:
/// `(coef, p_value)`; plus the effective sample size.
#[derive(Debug, Clone)]
pub struct NaiveLocation {
    pub stats: Vec<(f64, Option<f64>)>,
    pub effective_n: f64,
}

pub fn naive_surface(
    columns: &[Vec<f64>],
    coords: &[(f64, f64)],
    kernel_name: &str,
    proportion: f64,
    spearman: bool,
    mode: NaiveMode,
) -> Vec<NaiveLocation> {
    let m = columns.len();
    let columns: Vec<Vec<f64>> = if spearman {
        columns.iter().map(|c| ranks(c)).collect()
    } else {
        columns.to_vec()
    };
    let w = weight_matrix(coords, kernel_name, proportion);
    w.iter()
        .map(|wi| {
            let s = weighted_cov(&columns, wi);
            let r = cov_to_corr(&s);
            let sum: f64 = wi.iter().sum();
            let sum2: f64 = wi.iter().map(|x| x * x).sum();
            let n_eff = sum * sum / sum2;
            let mut stats = Vec::new();
            for a in 0..m {
                for b in a + 1..m {
                    let (coef, g) = match mode {
                        NaiveMode::Correlation => (r[a][b], 0),
                        NaiveMode::Partial => {
                            let given: Vec<usize> = (0..m).filter(|&c| c != a && c != b).collect();
                            (recursive_partial(&r, a, b, &given), given.len())
                        }
                    };
                    stats.push((coef, t_test_p(coef, n_eff - 2.0 - g as f64)));
                }
            }
            NaiveLocation {
                stats,
                effective_n: n_eff,
            }
        })
        .collect()
}

/// Dense row-major square matrices for Penrose checks.
pub fn matmul(a: &[f64], b: &[f64], m: usize) -> Vec<f64> {
    let mut c = vec![0.0; m * m];
    for i in 0..m {
        for k in 0..m {
            let aik = a[i * m + k];
            for j in 0..m {
                c[i * m + j] += aik * b[k * m + j];
            }
        }
    }
    c
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn max_abs(a: &[f64]) -> f64 {
    a.iter().map(|x| x.abs()).fold(0.0, f64::max)
}

pub fn transpose(a: &[f64], m: usize) -> Vec<f64> {
    let mut t = vec![0.0; m * m];
    for i in 0..m {
        for j in 0..m {
            t[j * m + i] = a[i * m + j];
        }
    }
    t
}

/// Worst violation of the four Penrose conditions, each scaled by the
/// magnitude of the matrix it should reproduce.
pub fn penrose_violation(a: &[f64], p: &[f64], m: usize) -> f64 {
    let ap = matmul(a, p, m);
    let pa = matmul(p, a, m);
    let apa = matmul(&ap, a, m);
    let pap = matmul(&pa, p, m);
    let scale = |x: &[f64]| max_abs(x).max(1.0);
    [
        max_abs_diff(&apa, a) / scale(a),
        max_abs_diff(&pap, p) / scale(p),
        max_abs_diff(&ap, &transpose(&ap, m)) / scale(&ap),
        max_abs_diff(&pa, &transpose(&pa, m)) / scale(&pa),
    ]
    .into_iter()
    .fold(0.0, f64::max)
}
