//! Helpers shared by the integration suites: an eigensolver that shares no
//! code with the library, synthetic data generators and small geometry fits.
#![allow(dead_code)]

use std::path::PathBuf;

use axisdecomp_core::nalgebra::{DMatrix, DVector};
use axisdecomp_core::{Dataset, GraphPair, LinearProjection, Objective};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

pub fn names(d: usize) -> Vec<String> {
    (0..d).map(|i| format!("x{i}")).collect()
}

pub fn gaussian(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.sample::<f64, _>(StandardNormal))
}

/// Correlated Gaussian data `N · M` with three balanced labels, standardised.
pub fn random_dataset(seed: u64, n: usize, d: usize) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mix = gaussian(&mut rng, d, d);
    let raw = gaussian(&mut rng, n, d) * mix;
    let labels = (0..n).map(|i| format!("c{}", i % 3)).collect();
    Dataset::new(raw, names(d), Some(labels))
        .unwrap()
        .standardize()
        .unwrap()
        .0
}

/// Orthonormal `d × 2` basis from Gram-Schmidt on Gaussian columns.
pub fn random_projection(rng: &mut ChaCha8Rng, d: usize) -> LinearProjection {
    let g = gaussian(rng, d, 2);
    let a = g.column(0).normalize();
    let b = g.column(1) - &a * a.dot(&g.column(1));
    let b = b.normalize();
    LinearProjection::from_basis(DMatrix::from_columns(&[a, b])).unwrap()
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix. Eigenvalues come
/// back ascending with eigenvectors as columns.
pub fn jacobi_eigen(a: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = a.nrows();
    let mut m = (a + a.transpose()) * 0.5;
    let mut v = DMatrix::<f64>::identity(n, n);
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|(i, j)| i != j)
            .map(|(i, j)| m[(i, j)] * m[(i, j)])
            .sum();
        if off < 1e-30 * m.norm_squared().max(1e-300) {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
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
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].total_cmp(&m[(j, j)]));
    let vals = order.iter().map(|&i| m[(i, i)]).collect();
    let vecs = DMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    (vals, vecs)
}

/// Reference solution of the projection eigenproblem by whitening with
/// `B^{-1/2}` and a Jacobi solve. Assumes full-rank data.
pub fn oracle_projection(ds: &Dataset, graphs: &GraphPair, penalty: &DMatrix<f64>) -> DMatrix<f64> {
    let x = ds.samples();
    let a = x.transpose() * &graphs.laplacian * x;
    if graphs.params.objective == Objective::Pca {
        let (_, vecs) = jacobi_eigen(&(a - penalty));
        let d = vecs.ncols();
        return DMatrix::from_columns(&[vecs.column(d - 1).into_owned(), vecs.column(d - 2).into_owned()]);
    }
    let b = x.transpose() * &graphs.constraint * x;
    let (bv, bq) = jacobi_eigen(&b);
    let inv_sqrt = DVector::from_iterator(bv.len(), bv.iter().map(|l| 1.0 / l.sqrt()));
    let w = &bq * DMatrix::from_diagonal(&inv_sqrt) * bq.transpose();
    let c = &w * (a + penalty) * &w;
    let (vals, u) = jacobi_eigen(&c);
    let keep: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] >= 1e-10).take(2).collect();
    DMatrix::from_columns(&[(&w * u.column(keep[0])).into_owned(), (&w * u.column(keep[1])).into_owned()])
}

/// Squared chordal distance between the column spans of two full-rank
/// `d × 2` matrices, orthonormalised here via the polar factor.
pub fn span_distance_sq(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let qa = orth(a);
    let qb = orth(b);
    (2.0 - (qa.transpose() * qb).norm_squared()).max(0.0)
}

fn orth(a: &DMatrix<f64>) -> DMatrix<f64> {
    let (vals, vecs) = jacobi_eigen(&(a.transpose() * a));
    let inv = DVector::from_iterator(vals.len(), vals.iter().map(|l| 1.0 / l.sqrt()));
    a * (&vecs * DMatrix::from_diagonal(&inv) * vecs.transpose())
}

/// Instance generator for the greedy-vs-exhaustive comparison.
pub struct GreedyInstance {
    pub ds: Dataset,
    pub v: LinearProjection,
    pub n: usize,
    pub d: usize,
}

pub fn greedy_instance(seed: u64) -> GreedyInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(50..=200);
    let d = rng.random_range(4..=8);
    let mix = gaussian(&mut rng, d, d);
    let raw = gaussian(&mut rng, n, d) * mix;
    let ds = Dataset::new(raw, names(d), None).unwrap().standardize().unwrap().0;
    let v = random_projection(&mut rng, d);
    GreedyInstance { ds, v, n, d }
}

/// Sliding windows of a unit sinusoid: row `i` is `sin(2π(i + j)/period)`
/// for `j` in `0..window`.
pub fn delay_embedding(n: usize, window: usize, period: f64) -> Dataset {
    let m = DMatrix::from_fn(n, window, |i, j| (std::f64::consts::TAU * (i + j) as f64 / period).sin());
    Dataset::new(m, names(window), None).unwrap()
}

/// Algebraic least-squares circle fit; returns the largest relative radial
/// deviation `max |r_i − R| / R`.
pub fn circle_deviation(points: &DMatrix<f64>) -> f64 {
    let n = points.nrows();
    // x² + y² = 2ax + 2by + c
    let design = DMatrix::from_fn(n, 3, |i, j| match j {
        0 => 2.0 * points[(i, 0)],
        1 => 2.0 * points[(i, 1)],
        _ => 1.0,
    });
    let rhs = DVector::from_fn(n, |i, _| points[(i, 0)].powi(2) + points[(i, 1)].powi(2));
    let normal = design.transpose() * &design;
    let sol = normal.lu().solve(&(design.transpose() * rhs)).unwrap();
    let (a, b, c) = (sol[0], sol[1], sol[2]);
    let radius = (c + a * a + b * b).sqrt();
    (0..n)
        .map(|i| {
            let r = ((points[(i, 0)] - a).powi(2) + (points[(i, 1)] - b).powi(2)).sqrt();
            (r - radius).abs() / radius
        })
        .fold(0.0, f64::max)
}

/// 2×2 orthogonal matrix: rotation by `theta`, optionally composed with a
/// reflection.
pub fn orthogonal_2x2(theta: f64, reflect: bool) -> DMatrix<f64> {
    let (s, c) = theta.sin_cos();
    let r = DMatrix::from_row_slice(2, 2, &[c, -s, s, c]);
    if reflect {
        r * DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0])
    } else {
        r
    }
}
