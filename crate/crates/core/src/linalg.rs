//! Small dense helpers shared by the analysis modules: nearest neighbours,
//! sorted symmetric eigendecompositions, orthonormalisation and the sign
//! convention that keeps eigenvector output reproducible.

use std::cmp::Ordering;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Row-major copy of a matrix, so that point coordinates are contiguous.
pub(crate) fn row_major(m: &DMatrix<f64>) -> Vec<f64> {
    let (rows, cols) = m.shape();
    let mut out = Vec::with_capacity(rows * cols);
    for i in 0..rows {
        for j in 0..cols {
            out.push(m[(i, j)]);
        }
    }
    out
}

#[inline]
pub(crate) fn sq_dist(points: &[f64], dim: usize, i: usize, j: usize) -> f64 {
    let a = &points[i * dim..(i + 1) * dim];
    let b = &points[j * dim..(j + 1) * dim];
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Indices of the `k` nearest neighbours of every row of `points` under the
/// Euclidean metric, nearest first. The point itself is excluded and equal
/// distances are ordered by lower index.
pub fn knn_indices(points: &DMatrix<f64>, k: usize) -> Vec<Vec<usize>> {
    let n = points.nrows();
    let dim = points.ncols();
    let k = k.min(n.saturating_sub(1));
    let flat = row_major(points);
    (0..n)
        .into_par_iter()
        .map(|i| {
            let mut cand: Vec<(f64, usize)> = (0..n)
                .filter(|&j| j != i)
                .map(|j| (sq_dist(&flat, dim, i, j), j))
                .collect();
            let by_dist = |a: &(f64, usize), b: &(f64, usize)| {
                a.0.total_cmp(&b.0).then(a.1.cmp(&b.1))
            };
            if k < cand.len() {
                cand.select_nth_unstable_by(k, by_dist);
                cand.truncate(k);
            }
            cand.sort_by(by_dist);
            cand.into_iter().map(|(_, j)| j).collect()
        })
        .collect()
}

/// Symmetric eigendecomposition with eigenvalues in ascending order and the
/// matching eigenvectors as columns.
pub(crate) fn sym_eigen_ascending(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let sym = symmetrize(m);
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a]
            .total_cmp(&eig.eigenvalues[b])
            .then(a.cmp(&b))
    });
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(m.nrows(), order.len(), |r, c| {
        eig.eigenvectors[(r, order[c])]
    });
    (values, vectors)
}

pub(crate) fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Flips each column so that its largest-magnitude entry is positive; ties go
/// to the lowest row index.
pub fn fix_signs(m: &mut DMatrix<f64>) {
    for mut col in m.column_iter_mut() {
        let mut best = 0;
        for (i, v) in col.iter().enumerate() {
            if v.abs() > col[best].abs() {
                best = i;
            }
        }
        if col[best] < 0.0 {
            col.neg_mut();
        }
    }
}

/// Modified Gram-Schmidt on the columns of `m`.
pub(crate) fn orthonormalize(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let mut q = m.clone();
    for c in 0..q.ncols() {
        for prev in 0..c {
            let proj = q.column(prev).dot(&q.column(c));
            let prev_col: DVector<f64> = q.column(prev).into_owned();
            q.column_mut(c).axpy(-proj, &prev_col, 1.0);
        }
        let scale = m.column(c).norm().max(1.0);
        let norm = q.column(c).norm();
        if norm <= 1e-12 * scale {
            return Err(Error::numeric(
                "linalg",
                format!("column {c} is linearly dependent on the preceding columns"),
            ));
        }
        q.column_mut(c).unscale_mut(norm);
    }
    // a second pass restores orthogonality lost to cancellation
    for c in 0..q.ncols() {
        for prev in 0..c {
            let proj = q.column(prev).dot(&q.column(c));
            let prev_col: DVector<f64> = q.column(prev).into_owned();
            q.column_mut(c).axpy(-proj, &prev_col, 1.0);
        }
        let norm = q.column(c).norm();
        q.column_mut(c).unscale_mut(norm);
    }
    Ok(q)
}

/// ‖AᵀA − I‖_F
pub fn orthonormality_error(a: &DMatrix<f64>) -> f64 {
    let k = a.ncols();
    (a.transpose() * a - DMatrix::<f64>::identity(k, k)).norm()
}

pub(crate) fn cmp_f64(a: f64, b: f64) -> Ordering {
    a.total_cmp(&b)
}

/// Median of a non-empty slice (mean of the two middle values for even length).
pub(crate) fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| cmp_f64(*a, *b));
    let m = values.len();
    if m % 2 == 1 {
        values[m / 2]
    } else {
        0.5 * (values[m / 2 - 1] + values[m / 2])
    }
}
