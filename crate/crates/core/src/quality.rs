//! Per-point neighbourhood fidelity of 2D embeddings and histogram summaries.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::linalg::knn_indices;

const MODULE: &str = "quality";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FidelityReport {
    pub per_point: Vec<f64>,
    pub k: usize,
    pub k_prime: usize,
}

impl FidelityReport {
    pub fn mean(&self) -> f64 {
        self.per_point.iter().sum::<f64>() / self.per_point.len() as f64
    }
}

/// `0.5·|N ∩ N′|/k′ + 0.5·|N ∩ N′|/k` per point, with `N` the `k` nearest
/// neighbours in the full data and `N′` the `k′` nearest in the embedding.
pub fn fidelity_scores(ds: &Dataset, embedding: &DMatrix<f64>, k: usize, k_prime: usize) -> Result<FidelityReport> {
    check_k(ds.n(), k, k_prime)?;
    let full = knn_indices(ds.samples(), k);
    fidelity_from_neighbors(&full, embedding, k, k_prime)
}

fn check_k(n: usize, k: usize, k_prime: usize) -> Result<()> {
    if k == 0 || k_prime == 0 || k >= n || k_prime >= n {
        return Err(Error::Config(format!(
            "fidelity neighbourhoods must satisfy 0 < k, k' < n = {n}, got k = {k}, k' = {k_prime}"
        )));
    }
    Ok(())
}

/// Same as [`fidelity_scores`] with the full-dimensional neighbour lists
/// precomputed, so many embeddings of one dataset share them.
pub fn fidelity_from_neighbors(
    full: &[Vec<usize>],
    embedding: &DMatrix<f64>,
    k: usize,
    k_prime: usize,
) -> Result<FidelityReport> {
    let n = embedding.nrows();
    if full.len() != n {
        return Err(Error::data(
            MODULE,
            format!("embedding has {n} rows, neighbour lists cover {}", full.len()),
        ));
    }
    check_k(n, k, k_prime)?;
    if full.iter().any(|row| row.len() != k) {
        return Err(Error::data(MODULE, format!("full-dimensional neighbour lists must have length {k}")));
    }
    let embedded = knn_indices(embedding, k_prime);
    let per_point = full
        .par_iter()
        .zip(embedded.par_iter())
        .map(|(a, b)| {
            let hits = a.iter().filter(|i| b.contains(i)).count() as f64;
            0.5 * hits / k_prime as f64 + 0.5 * hits / k as f64
        })
        .collect();
    Ok(FidelityReport { per_point, k, k_prime })
}

/// Per-point maximum over several reports.
pub fn aggregate_max_fidelity(reports: &[FidelityReport]) -> Result<FidelityReport> {
    let first = reports
        .first()
        .ok_or_else(|| Error::data(MODULE, "no fidelity reports to aggregate"))?;
    let n = first.per_point.len();
    if reports.iter().any(|r| r.per_point.len() != n) {
        return Err(Error::data(MODULE, "fidelity reports cover different point counts"));
    }
    let per_point = (0..n)
        .map(|i| reports.iter().map(|r| r.per_point[i]).fold(f64::NEG_INFINITY, f64::max))
        .collect();
    Ok(FidelityReport {
        per_point,
        k: first.k,
        k_prime: first.k_prime,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub bin_edges: Vec<f64>,
    pub counts: Vec<u64>,
}

/// Uniform bins over `[0, 1]`; the last bin is closed on the right.
pub fn build_histogram(values: &[f64], bins: usize) -> Result<Histogram> {
    if bins == 0 {
        return Err(Error::Config("histogram needs at least one bin".into()));
    }
    if values.is_empty() {
        return Err(Error::data(MODULE, "cannot build a histogram of no values"));
    }
    if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(Error::data(MODULE, format!("histogram value {v} outside [0, 1]")));
    }
    let bin_edges = (0..=bins).map(|i| i as f64 / bins as f64).collect();
    let mut counts = vec![0u64; bins];
    for v in values {
        let idx = ((v * bins as f64).floor() as usize).min(bins - 1);
        counts[idx] += 1;
    }
    Ok(Histogram { bin_edges, counts })
}
