//! One randomized trial per call for each engine invariant. Each check
//! returns a description of the first violation it finds.

use gwcorr_core::engine::{
    correlation_from_cov, local_p_value, partial_correlation_from_cov, weighted_covariance,
};
use gwcorr_core::spatial_weights::weight_vector_at;
use gwcorr_core::{
    compute_surface, Alpha, AnalysisSpec, Bandwidth, Coord, DataMatrix, GwSurface, Kernel, Method,
    Mode,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

const NAMES: [&str; 5] = ["a", "b", "c", "d", "e"];

pub struct Trial {
    pub columns: Vec<Vec<f64>>,
    pub coords: Vec<Coord>,
    pub spec: AnalysisSpec,
}

impl Trial {
    pub fn generate(seed: u64, method: Method) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.random_range(15..60);
        let m = rng.random_range(2..=5);
        let coords: Vec<Coord> = (0..n)
            .map(|_| Coord::new(rng.random_range(-500.0..500.0), rng.random_range(-500.0..500.0)))
            .collect();
        let shared: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let loadings: Vec<f64> = (0..m).map(|_| rng.random_range(-1.5..1.5)).collect();
        let columns: Vec<Vec<f64>> = (0..m)
            .map(|c| {
                (0..n)
                    .map(|j| {
                        let e: f64 = rng.sample(StandardNormal);
                        let local = (coords[j].x / 200.0).cos();
                        loadings[c] * local * shared[j] + e + 10.0 * c as f64
                    })
                    .collect()
            })
            .collect();
        let mode = if m >= 3 && rng.random_bool(0.5) {
            Mode::PartialCorrelation
        } else {
            Mode::Correlation
        };
        let spec = AnalysisSpec {
            mode,
            method,
            var_a: NAMES[0].into(),
            var_b: NAMES[1].into(),
            controls: match mode {
                Mode::Correlation => vec![],
                Mode::PartialCorrelation => NAMES[2..m].iter().map(|s| s.to_string()).collect(),
            },
            kernel: Kernel::ALL[rng.random_range(0..Kernel::ALL.len())],
            bandwidth: Bandwidth::new(rng.random_range(0.25..=1.0)).unwrap(),
        };
        // Correlation surfaces only cover the pair; keep the extra columns out.
        let used = spec.variable_set().len();
        let columns = columns.into_iter().take(used).collect();
        Self {
            columns,
            coords,
            spec,
        }
    }

    fn data_with(&self, columns: Vec<Vec<f64>>) -> DataMatrix {
        let names = NAMES[..columns.len()].iter().map(|s| s.to_string()).collect();
        DataMatrix::from_columns(names, columns).unwrap()
    }

    pub fn surface_with(&self, columns: Vec<Vec<f64>>) -> GwSurface {
        compute_surface(&self.data_with(columns), &self.coords, &self.spec).unwrap()
    }

    pub fn surface(&self) -> GwSurface {
        self.surface_with(self.columns.clone())
    }
}

fn close(a: Option<f64>, b: Option<f64>, tol: f64) -> bool {
    match (a, b) {
        (Some(a), Some(b)) => (a - b).abs() <= tol,
        (None, None) => true,
        _ => false,
    }
}

/// Masks may legitimately differ only when p sits within `tol` of alpha.
fn same_mask(p: Option<f64>, q: Option<f64>, tol: f64) -> bool {
    [Alpha::P01, Alpha::P05].into_iter().all(|alpha| {
        let near = |x: Option<f64>| x.is_some_and(|x| (x - alpha.value()).abs() <= tol);
        near(p) || near(q) || alpha.admits(p) == alpha.admits(q)
    })
}

/// `x → αx + β`: unchanged for `α > 0`, sign flip on pairs involving the
/// transformed variable for `α < 0`.
pub fn affine(seed: u64) -> Result<(), String> {
    let t = Trial::generate(seed, Method::Pearson);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xA5A5);
    let target = rng.random_range(0..t.columns.len());
    let magnitude = rng.random_range(0.01..100.0);
    let alpha = if rng.random_bool(0.5) { magnitude } else { -magnitude };
    let beta = rng.random_range(-1e3..1e3);
    let mut moved = t.columns.clone();
    for v in &mut moved[target] {
        *v = alpha * *v + beta;
    }
    let base = t.surface();
    let after = t.surface_with(moved);
    for (i, (l0, l1)) in base.per_location.iter().zip(&after.per_location).enumerate() {
        for (k, (&(a, b), (s0, s1))) in base.pairs.iter().zip(l0.stats.iter().zip(&l1.stats)).enumerate() {
            let flips = alpha < 0.0 && (a == target || b == target);
            let expect = s0.coef.map(|c| if flips { -c } else { c });
            if !close(expect, s1.coef, 1e-9) {
                return Err(format!("loc {i} pair {k} α={alpha}: {expect:?} vs {:?}", s1.coef));
            }
            if !close(s0.p_value, s1.p_value, 1e-9) {
                return Err(format!("loc {i} pair {k}: p {:?} vs {:?}", s0.p_value, s1.p_value));
            }
            if !same_mask(s0.p_value, s1.p_value, 1e-9) {
                return Err(format!("loc {i} pair {k}: mask changed"));
            }
        }
    }
    Ok(())
}

/// Multiplying the weights by `c > 0` changes no coefficient and no p-value.
///
/// Same tolerance as the affine check: nearly singular windows amplify the
/// rounding of `w * c` to around 1e-10.
pub fn weight_scale(seed: u64) -> Result<(), String> {
    let t = Trial::generate(seed, Method::Pearson);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5A5A);
    let c = 10f64.powf(rng.random_range(-6.0..6.0));
    let m = t.columns.len();
    let n = t.coords.len();
    let rows: Vec<f64> = (0..n).flat_map(|j| t.columns.iter().map(move |col| col[j])).collect();
    let g = m - 2;
    for i in 0..n {
        let wv = weight_vector_at(i, &t.coords, t.spec.kernel, t.spec.bandwidth).map_err(|e| e.to_string())?;
        let scaled: Vec<f64> = wv.weights.iter().map(|w| w * c).collect();
        let s0 = weighted_covariance(&rows, m, &wv.weights).map_err(|e| e.to_string())?;
        let s1 = weighted_covariance(&rows, m, &scaled).map_err(|e| e.to_string())?;
        let r0 = correlation_from_cov(&s0, 0, 1);
        let r1 = correlation_from_cov(&s1, 0, 1);
        if !close(r0, r1, 1e-9) {
            return Err(format!("loc {i} c={c}: r {r0:?} vs {r1:?}"));
        }
        let p0 = r0.and_then(|r| local_p_value(r, &wv.weights, 0));
        let p1 = r1.and_then(|r| local_p_value(r, &scaled, 0));
        if !close(p0, p1, 1e-9) {
            return Err(format!("loc {i} c={c}: p {p0:?} vs {p1:?}"));
        }
        if m > 2 {
            let q0 = partial_correlation_from_cov(&s0);
            let q1 = partial_correlation_from_cov(&s1);
            for a in 0..m {
                for b in 0..m {
                    if a != b && !close(q0[a][b], q1[a][b], 1e-9) {
                        return Err(format!("loc {i} c={c}: pcor[{a}][{b}]"));
                    }
                    if a != b {
                        let p0 = q0[a][b].and_then(|r| local_p_value(r, &wv.weights, g));
                        let p1 = q1[a][b].and_then(|r| local_p_value(r, &scaled, g));
                        if !close(p0, p1, 1e-9) {
                            return Err(format!("loc {i} c={c}: pcor p[{a}][{b}]"));
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

fn bits(s: &GwSurface) -> Vec<(Option<u64>, Option<u64>)> {
    s.per_location
        .iter()
        .flat_map(|l| l.stats.iter().map(|st| (st.coef.map(f64::to_bits), st.p_value.map(f64::to_bits))))
        .collect()
}

/// A strictly increasing transform of any variable leaves the Spearman
/// surface bit-identical.
pub fn spearman_monotone(seed: u64) -> Result<(), String> {
    let t = Trial::generate(seed, Method::Spearman);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x3C3C);
    let target = rng.random_range(0..t.columns.len());
    let transform: fn(f64) -> f64 = match rng.random_range(0..3) {
        0 => |x| (x / 4.0).exp(),
        1 => |x| x * x * x + x,
        _ => |x| 1e6 * x - 7.0,
    };
    let mut moved = t.columns.clone();
    for v in &mut moved[target] {
        *v = transform(*v);
    }
    if bits(&t.surface()) != bits(&t.surface_with(moved)) {
        return Err(format!("surface changed after transforming column {target}"));
    }
    Ok(())
}

/// Coefficients do not depend on the order the pair is named in.
pub fn symmetry(seed: u64) -> Result<(), String> {
    let t = Trial::generate(seed, Method::Pearson);
    let m = t.columns.len();
    let n = t.coords.len();
    let rows: Vec<f64> = (0..n).flat_map(|j| t.columns.iter().map(move |col| col[j])).collect();
    for i in 0..n {
        let wv = weight_vector_at(i, &t.coords, t.spec.kernel, t.spec.bandwidth).map_err(|e| e.to_string())?;
        let s = weighted_covariance(&rows, m, &wv.weights).map_err(|e| e.to_string())?;
        let q = partial_correlation_from_cov(&s);
        for a in 0..m {
            for b in 0..m {
                let (x, y) = (correlation_from_cov(&s, a, b), correlation_from_cov(&s, b, a));
                if x.map(f64::to_bits) != y.map(f64::to_bits) {
                    return Err(format!("loc {i}: r[{a}][{b}] {x:?} vs {y:?}"));
                }
                if q[a][b].map(f64::to_bits) != q[b][a].map(f64::to_bits) {
                    return Err(format!("loc {i}: pcor[{a}][{b}] {:?} vs {:?}", q[a][b], q[b][a]));
                }
            }
        }
    }
    let surface = t.surface();
    let vars = &surface.variable_set;
    for x in vars {
        for y in vars {
            if x != y && surface.pair_stats(x, y).unwrap() != surface.pair_stats(y, x).unwrap() {
                return Err(format!("surface pair ({x}, {y}) depends on order"));
            }
        }
    }
    Ok(())
}

/// Every valid coefficient lies in [-1, 1] and every p-value in [0, 1],
/// including on nearly collinear data that provokes clamping.
pub fn range(seed: u64) -> Result<(), String> {
    let mut t = Trial::generate(seed, if seed % 2 == 0 { Method::Pearson } else { Method::Spearman });
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7777);
    if rng.random_bool(0.5) {
        let eps = 10f64.powf(rng.random_range(-14.0..-6.0));
        let first = t.columns[0].clone();
        for (j, v) in t.columns[1].iter_mut().enumerate() {
            let e: f64 = rng.sample(StandardNormal);
            *v = first[j] * 3.0 + eps * e;
        }
    }
    let surface = t.surface();
    for (i, l) in surface.per_location.iter().enumerate() {
        for st in &l.stats {
            if let Some(c) = st.coef {
                if !(-1.0..=1.0).contains(&c) {
                    return Err(format!("loc {i}: coefficient {c}"));
                }
            }
            if let Some(p) = st.p_value {
                if !(0.0..=1.0).contains(&p) {
                    return Err(format!("loc {i}: p {p}"));
                }
            }
            if st.coef.is_none() && st.p_value.is_some() {
                return Err(format!("loc {i}: p-value without a coefficient"));
            }
        }
    }
    Ok(())
}
