//! Small dense real linear algebra: a row-major matrix type, cyclic Jacobi
//! eigendecomposition and one-sided Jacobi SVD.

use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense row-major real matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn diag(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    /// `v vᵀ`.
    pub fn outer(u: &[f64], v: &[f64]) -> Self {
        Self::from_fn(u.len(), v.len(), |i, j| u[i] * v[j])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, other: &Matrix) -> Self {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == 0.0 {
                    continue;
                }
                let b_row = &other.data[k * other.cols..(k + 1) * other.cols];
                for (o, &b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, v.len(), "matvec shape mismatch");
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    /// `selfᵀ v`.
    pub fn tmatvec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.rows, v.len(), "tmatvec shape mismatch");
        let mut out = vec![0.0; self.cols];
        for (i, &vi) in v.iter().enumerate() {
            for (o, &a) in out.iter_mut().zip(self.row(i)) {
                *o += a * vi;
            }
        }
        out
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * c).collect(),
        }
    }

    pub fn add(&self, other: &Matrix) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Matrix) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, c: f64, other: &Matrix) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += c * b;
        }
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// `tr(selfᵀ other)`.
    pub fn frobenius_dot(&self, other: &Matrix) -> f64 {
        dot(&self.data, &other.data)
    }

    pub fn frobenius_norm(&self) -> f64 {
        dot(&self.data, &self.data).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn kron(&self, other: &Matrix) -> Self {
        let (r2, c2) = (other.rows, other.cols);
        Self::from_fn(self.rows * r2, self.cols * c2, |i, j| {
            self[(i / r2, j / c2)] * other[(i % r2, j % c2)]
        })
    }

    /// Largest asymmetry `|a_ij − a_ji|`.
    pub fn asymmetry(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in 0..i {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        worst
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.is_square() && self.asymmetry() <= tol * self.max_abs().max(1.0)
    }

    pub fn symmetrized(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| 0.5 * (self[(i, j)] + self[(j, i)]))
    }

    /// `xᵀ self x`.
    pub fn quad_form(&self, x: &[f64]) -> f64 {
        dot(x, &self.matvec(x))
    }

    /// Spectral norm (largest singular value).
    pub fn operator_norm(&self) -> f64 {
        svd(self).singular_values.first().copied().unwrap_or(0.0)
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Eigendecomposition of a symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymEig {
    /// Sorted in descending order.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors stored as columns, matching `values`.
    pub vectors: Matrix,
}

impl SymEig {
    pub fn vector(&self, k: usize) -> Vec<f64> {
        self.vectors.column(k)
    }
}

const JACOBI_MAX_SWEEPS: usize = 100;

/// Cyclic Jacobi eigendecomposition; rejects matrices that are not symmetric
/// within `1e-12` relative to their largest entry.
pub fn sym_eig(a: &Matrix) -> Result<SymEig> {
    if !a.is_square() {
        return Err(Error::Shape(format!(
            "eigendecomposition of a {}x{} matrix",
            a.rows, a.cols
        )));
    }
    if !a.is_symmetric(1e-12) {
        return Err(Error::Invalid(format!(
            "matrix is not symmetric (asymmetry {:.3e})",
            a.asymmetry()
        )));
    }
    Ok(jacobi_eig(a.symmetrized()))
}

fn jacobi_eig(mut a: Matrix) -> SymEig {
    let n = a.rows;
    let mut v = Matrix::identity(n);
    let scale = a.frobenius_norm();
    if scale > 0.0 {
        for _ in 0..JACOBI_MAX_SWEEPS {
            let mut off = 0.0;
            for p in 0..n {
                for q in (p + 1)..n {
                    off += a[(p, q)] * a[(p, q)];
                }
            }
            if off.sqrt() <= 1e-17 * scale {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a[(p, q)];
                    if apq.abs() <= 1e-300 {
                        continue;
                    }
                    let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let t = if theta == 0.0 { 1.0 } else { t };
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let akp = a[(k, p)];
                        let akq = a[(k, q)];
                        a[(k, p)] = c * akp - s * akq;
                        a[(k, q)] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let apk = a[(p, k)];
                        let aqk = a[(q, k)];
                        a[(p, k)] = c * apk - s * aqk;
                        a[(q, k)] = s * apk + c * aqk;
                    }
                    for k in 0..n {
                        let vkp = v[(k, p)];
                        let vkq = v[(k, q)];
                        v[(k, p)] = c * vkp - s * vkq;
                        v[(k, q)] = s * vkp + c * vkq;
                    }
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].total_cmp(&a[(i, i)]).then(i.cmp(&j)));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let vectors = Matrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    SymEig { values, vectors }
}

/// Thin singular value decomposition `A = U diag(s) Vᵀ`.
#[derive(Debug, Clone)]
pub struct Svd {
    /// `rows × r` with orthonormal columns, `r = min(rows, cols)`.
    pub u: Matrix,
    /// Descending.
    pub singular_values: Vec<f64>,
    /// `cols × r` with orthonormal columns.
    pub v: Matrix,
}

impl Svd {
    pub fn reconstruct(&self) -> Matrix {
        let r = self.singular_values.len();
        let us = Matrix::from_fn(self.u.rows, r, |i, j| self.u[(i, j)] * self.singular_values[j]);
        us.matmul(&self.v.transpose())
    }
}

/// One-sided (Hestenes) Jacobi SVD. Orthogonalizes the columns of the taller
/// orientation, so the cost is `O(min(r,c)² · max(r,c))` per sweep.
pub fn svd(a: &Matrix) -> Svd {
    if a.rows < a.cols {
        let t = svd(&a.transpose());
        return Svd {
            u: t.v,
            singular_values: t.singular_values,
            v: t.u,
        };
    }
    let (rows, cols) = (a.rows, a.cols);
    // Columns of A stored contiguously.
    let mut w: Vec<Vec<f64>> = (0..cols).map(|j| a.column(j)).collect();
    let mut v: Vec<Vec<f64>> = (0..cols)
        .map(|j| {
            let mut e = vec![0.0; cols];
            e[j] = 1.0;
            e
        })
        .collect();
    let mut norms: Vec<f64> = w.iter().map(|c| dot(c, c)).collect();
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..cols {
            for q in (p + 1)..cols {
                let alpha = norms[p];
                let beta = norms[q];
                let gamma = dot(&w[p], &w[q]);
                if gamma == 0.0 || gamma.abs() <= 1e-15 * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (wp, wq) = pair_mut(&mut w, p, q);
                rotate(wp, wq, c, s);
                let (vp, vq) = pair_mut(&mut v, p, q);
                rotate(vp, vq, c, s);
                norms[p] = dot(&w[p], &w[p]);
                norms[q] = dot(&w[q], &w[q]);
            }
        }
        if !rotated {
            break;
        }
    }
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]).then(i.cmp(&j)));
    let singular_values: Vec<f64> = order.iter().map(|&j| norms[j].sqrt()).collect();
    let top = singular_values.first().copied().unwrap_or(0.0);
    let mut u_cols: Vec<Vec<f64>> = Vec::with_capacity(cols);
    for (k, &j) in order.iter().enumerate() {
        let s = singular_values[k];
        if s > 1e-13 * top.max(f64::MIN_POSITIVE) {
            u_cols.push(w[j].iter().map(|x| x / s).collect());
        } else {
            u_cols.push(complete_basis(&u_cols, rows));
        }
    }
    let u = Matrix::from_fn(rows, cols, |i, k| u_cols[k][i]);
    let v = Matrix::from_fn(cols, cols, |i, k| v[order[k]][i]);
    Svd {
        u,
        singular_values,
        v,
    }
}

fn pair_mut(v: &mut [Vec<f64>], p: usize, q: usize) -> (&mut Vec<f64>, &mut Vec<f64>) {
    debug_assert!(p < q);
    let (lo, hi) = v.split_at_mut(q);
    (&mut lo[p], &mut hi[0])
}

#[inline]
fn rotate(x: &mut [f64], y: &mut [f64], c: f64, s: f64) {
    for (a, b) in x.iter_mut().zip(y.iter_mut()) {
        let (xa, yb) = (*a, *b);
        *a = c * xa - s * yb;
        *b = s * xa + c * yb;
    }
}

/// A unit vector orthogonal to every vector in `basis` (assumed orthonormal).
fn complete_basis(basis: &[Vec<f64>], dim: usize) -> Vec<f64> {
    for e in 0..dim {
        let mut cand = vec![0.0; dim];
        cand[e] = 1.0;
        for _ in 0..2 {
            for b in basis {
                let d = dot(&cand, b);
                for (c, bi) in cand.iter_mut().zip(b) {
                    *c -= d * bi;
                }
            }
        }
        let n = norm2(&cand);
        if n > 1e-6 {
            return cand.into_iter().map(|c| c / n).collect();
        }
    }
    vec![0.0; dim]
}

/// Orthonormalizes the columns of a square matrix by modified Gram–Schmidt
/// (the `Q` factor of a QR decomposition, columns with positive `R` diagonal).
pub fn orthonormal_columns(a: &Matrix) -> Matrix {
    let n = a.rows;
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(a.cols);
    for j in 0..a.cols {
        let mut c = a.column(j);
        for _ in 0..2 {
            for b in &cols {
                let d = dot(&c, b);
                for (ci, bi) in c.iter_mut().zip(b) {
                    *ci -= d * bi;
                }
            }
        }
        let nrm = norm2(&c);
        if nrm > 1e-10 {
            c.iter_mut().for_each(|x| *x /= nrm);
        } else {
            c = complete_basis(&cols, n);
        }
        cols.push(c);
    }
    Matrix::from_fn(n, a.cols, |i, j| cols[j][i])
}

/// Lower-triangular Cholesky factor, or `None` when `a` is not positive definite.
pub fn cholesky(a: &Matrix) -> Option<Matrix> {
    let n = a.rows;
    let mut l = Matrix::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if d <= 0.0 || !d.is_finite() {
            return None;
        }
        let d = d.sqrt();
        l[(j, j)] = d;
        for i in (j + 1)..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / d;
        }
    }
    Some(l)
}

/// Inverse of a symmetric positive definite matrix from its Cholesky factor.
pub fn spd_inverse(l: &Matrix) -> Matrix {
    let n = l.rows;
    // L⁻¹ by forward substitution.
    let mut linv = Matrix::zeros(n, n);
    for j in 0..n {
        linv[(j, j)] = 1.0 / l[(j, j)];
        for i in (j + 1)..n {
            let mut s = 0.0;
            for k in j..i {
                s -= l[(i, k)] * linv[(k, j)];
            }
            linv[(i, j)] = s / l[(i, i)];
        }
    }
    linv.transpose().matmul(&linv)
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
pub fn solve(a: &Matrix, b: &[f64]) -> Option<Vec<f64>> {
    let n = a.rows;
    if !a.is_square() || b.len() != n {
        return None;
    }
    let mut m = a.clone();
    let mut x = b.to_vec();
    let scale = a.max_abs().max(f64::MIN_POSITIVE);
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| m[(i, col)].abs().total_cmp(&m[(j, col)].abs()))
            .unwrap();
        if m[(piv, col)].abs() <= 1e-14 * scale {
            return None;
        }
        if piv != col {
            for k in 0..n {
                m.data.swap(piv * n + k, col * n + k);
            }
            x.swap(piv, col);
        }
        for i in (col + 1)..n {
            let f = m[(i, col)] / m[(col, col)];
            if f == 0.0 {
                continue;
            }
            for k in col..n {
                let v = m[(col, k)];
                m[(i, k)] -= f * v;
            }
            x[i] -= f * x[col];
        }
    }
    for i in (0..n).rev() {
        let mut s = x[i];
        for k in (i + 1)..n {
            s -= m[(i, k)] * x[k];
        }
        x[i] = s / m[(i, i)];
    }
    Some(x)
}

/// Applies `f` to the eigenvalues of a symmetric matrix.
pub fn sym_fn(a: &Matrix, f: impl Fn(f64) -> f64) -> Result<Matrix> {
    let eig = sym_eig(a)?;
    let n = a.rows;
    let mut out = Matrix::zeros(n, n);
    for (k, &lambda) in eig.values.iter().enumerate() {
        let fk = f(lambda);
        if fk == 0.0 {
            continue;
        }
        for i in 0..n {
            let vi = eig.vectors[(i, k)] * fk;
            for j in 0..n {
                out[(i, j)] += vi * eig.vectors[(j, k)];
            }
        }
    }
    Ok(out)
}

/// Principal square root of a positive semidefinite matrix; eigenvalues
/// below zero (rounding) are clamped.
pub fn psd_sqrt(a: &Matrix) -> Result<Matrix> {
    sym_fn(a, |x| x.max(0.0).sqrt())
}

pub fn min_eigenvalue(a: &Matrix) -> Result<f64> {
    Ok(sym_eig(a)?.values.last().copied().unwrap_or(0.0))
}

pub fn max_eigenvalue(a: &Matrix) -> Result<f64> {
    Ok(sym_eig(a)?.values.first().copied().unwrap_or(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solvers::rng::{GaussianSampler, RngStream};

    fn random_matrix(rows: usize, cols: usize, stream: u64) -> Matrix {
        let mut g = GaussianSampler::new(RngStream::new(17, stream));
        Matrix::from_fn(rows, cols, |_, _| g.sample())
    }

    fn random_symmetric(n: usize, stream: u64) -> Matrix {
        let a = random_matrix(n, n, stream);
        a.add(&a.transpose()).scaled(0.5)
    }

    #[test]
    fn identity_eigenvalues() {
        let e = sym_eig(&Matrix::identity(3)).unwrap();
        assert_eq!(e.values, vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn diagonal_eigenvalues_sorted_with_permutation_vectors() {
        let e = sym_eig(&Matrix::diag(&[3.0, 1.0, 2.0])).unwrap();
        assert_eq!(e.values, vec![3.0, 2.0, 1.0]);
        assert_eq!(e.vector(0), vec![1.0, 0.0, 0.0]);
        assert_eq!(e.vector(1), vec![0.0, 0.0, 1.0]);
        assert_eq!(e.vector(2), vec![0.0, 1.0, 0.0]);
    }

    #[test]
    fn random_symmetric_reconstruction() {
        let a = random_symmetric(8, 1);
        let e = sym_eig(&a).unwrap();
        let lam = Matrix::diag(&e.values);
        let rec = e.vectors.matmul(&lam).matmul(&e.vectors.transpose());
        assert!(rec.sub(&a).frobenius_norm() <= 1e-8);
        let norm = a.operator_norm();
        for k in 0..8 {
            let v = e.vector(k);
            let av = a.matvec(&v);
            let res: f64 = av
                .iter()
                .zip(&v)
                .map(|(x, y)| (x - e.values[k] * y).powi(2))
                .sum::<f64>()
                .sqrt();
            assert!(res <= 1e-9 * norm);
        }
        assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn rejects_non_symmetric() {
        let a = Matrix::from_row_major(2, 2, vec![1.0, 2.0, 0.0, 1.0]).unwrap();
        assert!(matches!(sym_eig(&a), Err(Error::Invalid(_))));
    }

    #[test]
    fn svd_of_identity() {
        let s = svd(&Matrix::identity(4));
        assert!(s.singular_values.iter().all(|&x| (x - 1.0).abs() < 1e-15));
    }

    #[test]
    fn svd_rank_one() {
        let u = [1.0, -2.0, 0.5];
        let v = [3.0, 0.0, 1.0, 4.0];
        let s = svd(&Matrix::outer(&u, &v));
        let expected = norm2(&u) * norm2(&v);
        assert!((s.singular_values[0] - expected).abs() < 1e-12);
        assert!(s.singular_values[1..].iter().all(|&x| x <= 1e-10));
    }

    #[test]
    fn svd_matches_gram_eigenvalues() {
        let a = random_matrix(4, 9, 2);
        let s = svd(&a);
        let gram = a.matmul(&a.transpose());
        let e = sym_eig(&gram).unwrap();
        for (sv, ev) in s.singular_values.iter().zip(&e.values) {
            assert!((sv * sv - ev).abs() <= 1e-8 * ev.abs().max(1.0));
        }
        let rec = s.reconstruct();
        assert!(rec.sub(&a).frobenius_norm() <= 1e-8 * a.frobenius_norm());
        let sq: f64 = s.singular_values.iter().map(|x| x * x).sum();
        assert!((sq - a.frobenius_norm().powi(2)).abs() <= 1e-10 * sq);
    }

    #[test]
    fn svd_rank_deficient_has_orthonormal_u() {
        let a = Matrix::from_row_major(3, 2, vec![1.0, 1.0, 1.0, 1.0, 0.0, 0.0]).unwrap();
        let s = svd(&a);
        let utu = s.u.transpose().matmul(&s.u);
        assert!(utu.sub(&Matrix::identity(2)).max_abs() < 1e-12);
        assert!(s.reconstruct().sub(&a).max_abs() < 1e-12);
    }

    #[test]
    fn qr_columns_orthonormal() {
        let q = orthonormal_columns(&random_matrix(5, 5, 3));
        let qtq = q.transpose().matmul(&q);
        assert!(qtq.sub(&Matrix::identity(5)).max_abs() < 1e-12);
    }

    #[test]
    fn cholesky_inverse_and_solve() {
        let a = random_matrix(4, 4, 4);
        let spd = a.matmul(&a.transpose()).add(&Matrix::identity(4));
        let l = cholesky(&spd).unwrap();
        let inv = spd_inverse(&l);
        assert!(inv.matmul(&spd).sub(&Matrix::identity(4)).max_abs() < 1e-10);
        let b = [1.0, 2.0, 3.0, 4.0];
        let x = solve(&spd, &b).unwrap();
        let r = spd.matvec(&x);
        assert!(r.iter().zip(&b).all(|(p, q)| (p - q).abs() < 1e-10));
        assert!(cholesky(&Matrix::diag(&[1.0, -1.0])).is_none());
    }

    #[test]
    fn psd_square_root_squares_back() {
        let a = random_matrix(4, 4, 5);
        let p = a.matmul(&a.transpose());
        let r = psd_sqrt(&p).unwrap();
        assert!(r.matmul(&r).sub(&p).max_abs() < 1e-10);
    }
}
