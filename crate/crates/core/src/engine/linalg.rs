//! Small dense symmetric matrices: Cholesky inversion, Jacobi
//! eigendecomposition and the Moore–Penrose pseudo-inverse.
//!
//! Local covariance matrices are tiny (one row per analysed variable), so
//! everything here is written for clarity and accuracy rather than blocking.

use std::ops::{Index, IndexMut};

/// Square matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    dim: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0.0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Panics unless `rows` is square.
    pub fn from_rows(rows: &[&[f64]]) -> Self {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for r in rows {
            assert_eq!(r.len(), dim, "matrix must be square");
            data.extend_from_slice(r);
        }
        Self { dim, data }
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub(crate) fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut out = Matrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn max_diagonal(&self) -> f64 {
        (0..self.dim).fold(0.0, |m, i| m.max(self[(i, i)]))
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &f64 {
        &self.data[r * self.dim + c]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut f64 {
        &mut self.data[r * self.dim + c]
    }
}

/// Pivots at or below this fraction of the largest diagonal entry count as
/// a failed factorisation, so near-singular matrices take the pseudo-inverse.
const CHOLESKY_PIVOT_RTOL: f64 = 1e-12;

/// Lower-triangular Cholesky factor, or `None` if `a` is not numerically
/// positive definite.
pub fn cholesky(a: &Matrix) -> Option<Matrix> {
    cholesky_with_floor(a, CHOLESKY_PIVOT_RTOL * a.max_diagonal())
}

/// Cholesky factor, failing on any pivot at or below `floor`.
pub fn cholesky_with_floor(a: &Matrix, floor: f64) -> Option<Matrix> {
    let n = a.dim();
    let mut l = Matrix::zeros(n);
    for j in 0..n {
        let mut d = a[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if !(d > floor) || !d.is_finite() {
            return None;
        }
        let djj = d.sqrt();
        l[(j, j)] = djj;
        for i in (j + 1)..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / djj;
        }
    }
    Some(l)
}

/// Inverse of a symmetric positive definite matrix from its Cholesky factor.
pub fn inverse_from_cholesky(l: &Matrix) -> Matrix {
    let n = l.dim();
    // Invert L by forward substitution, then A^-1 = L^-T L^-1.
    let mut linv = Matrix::zeros(n);
    for col in 0..n {
        linv[(col, col)] = 1.0 / l[(col, col)];
        for i in (col + 1)..n {
            let mut s = 0.0;
            for k in col..i {
                s -= l[(i, k)] * linv[(k, col)];
            }
            linv[(i, col)] = s / l[(i, i)];
        }
    }
    let mut inv = Matrix::zeros(n);
    for i in 0..n {
        for j in 0..=i {
            let mut s = 0.0;
            for k in i..n {
                s += linv[(k, i)] * linv[(k, j)];
            }
            inv[(i, j)] = s;
            inv[(j, i)] = s;
        }
    }
    inv
}

/// Symmetric eigendecomposition by cyclic Jacobi rotations.
///
/// Returns the eigenvalues and a matrix whose columns are the matching
/// orthonormal eigenvectors. Only the symmetric part of `a` is used.
pub fn symmetric_eigen(a: &Matrix) -> (Vec<f64>, Matrix) {
    let n = a.dim();
    let mut m = a.clone();
    for i in 0..n {
        for j in 0..i {
            let s = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = s;
            m[(j, i)] = s;
        }
    }
    let mut v = Matrix::identity(n);
    let scale = m.max_abs();
    if scale == 0.0 || n < 2 {
        return ((0..n).map(|i| m[(i, i)]).collect(), v);
    }

    for _sweep in 0..100 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += m[(p, q)] * m[(p, q)];
            }
        }
        if off.sqrt() <= f64::EPSILON * f64::EPSILON * scale || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let app = m[(p, p)];
                let aqq = m[(q, q)];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                m[(p, q)] = 0.0;
                m[(q, p)] = 0.0;

                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    ((0..n).map(|i| m[(i, i)]).collect(), v)
}

/// Moore–Penrose pseudo-inverse of a symmetric matrix.
///
/// Eigenvalues with magnitude at or below `dim * max|λ| * ε` are treated as
/// zero.
pub fn moore_penrose_pinv(a: &Matrix) -> Matrix {
    let n = a.dim();
    let (values, vectors) = symmetric_eigen(a);
    let lmax = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    pinv_from_eigen(&values, &vectors, n as f64 * lmax * f64::EPSILON)
}

/// Pseudo-inverse that treats eigenvalues with magnitude at or below
/// `cutoff` as zero.
pub fn pinv_with_cutoff(a: &Matrix, cutoff: f64) -> Matrix {
    let (values, vectors) = symmetric_eigen(a);
    pinv_from_eigen(&values, &vectors, cutoff)
}

fn pinv_from_eigen(values: &[f64], vectors: &Matrix, tol: f64) -> Matrix {
    let n = values.len();
    let inv: Vec<f64> = values
        .iter()
        .map(|&l| if l.abs() > tol { 1.0 / l } else { 0.0 })
        .collect();
    let mut out = Matrix::zeros(n);
    for i in 0..n {
        for j in 0..=i {
            let mut s = 0.0;
            for (k, &lk) in inv.iter().enumerate() {
                if lk != 0.0 {
                    s += vectors[(i, k)] * lk * vectors[(j, k)];
                }
            }
            out[(i, j)] = s;
            out[(j, i)] = s;
        }
    }
    out
}
