//! Evidence ranking of axis pairs. Every linear projection is a source that
//! assigns each selected pair a mass shrinking with its fit error; Dempster's
//! rule over singleton hypotheses combines the sources into one belief per
//! pair.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::dataset::Dataset;
use crate::decomposition::build_secant_system;
use crate::error::{Error, Result};
use crate::graph_embedding::LinearProjection;
use crate::grassmann::AxisPair;

const MODULE: &str = "evidence";

/// Fit errors of every global pair (rows) against every projection (columns).
#[derive(Debug, Clone, PartialEq)]
pub struct DistortionTable {
    pub values: DMatrix<f64>,
    pub pair_list: Vec<AxisPair>,
    pub eta0: f64,
}

impl DistortionTable {
    pub fn new(values: DMatrix<f64>, pair_list: Vec<AxisPair>, eta0: f64) -> Result<Self> {
        if !(eta0 > 0.0 && eta0 < 1.0) {
            return Err(Error::Config(format!("eta0 must lie in (0, 1), got {eta0}")));
        }
        if values.nrows() != pair_list.len() {
            return Err(Error::numeric(
                MODULE,
                format!("{} table rows for {} pairs", values.nrows(), pair_list.len()),
            ));
        }
        if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::numeric(MODULE, "distortions must be finite and non-negative"));
        }
        Ok(DistortionTable {
            values,
            pair_list,
            eta0,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvidenceScores {
    /// Combined mass `μ` per pair.
    pub mass: Vec<f64>,
    /// `μ / max μ`
    pub evid: Vec<f64>,
    /// `η` per pair and projection.
    pub per_edge_mass: DMatrix<f64>,
    /// Set when every distortion (or every mass) is zero and scores fell back
    /// to uniform.
    pub degenerate: bool,
}

/// Fills the table with `‖C_p α_i − b_p‖` using each projection's own secant
/// system over its `k` nearest projected neighbours.
pub fn fill_distortion_table(
    ds: &Dataset,
    projections: &[LinearProjection],
    global_set: &[AxisPair],
    k: usize,
    eta0: f64,
) -> Result<DistortionTable> {
    if global_set.is_empty() {
        return Err(Error::numeric(MODULE, "global pair set is empty"));
    }
    if projections.is_empty() {
        return Err(Error::Config("no projections to score".into()));
    }
    let columns: Vec<Vec<f64>> = projections
        .par_iter()
        .map(|v| {
            let sys = build_secant_system(ds, v, k)?;
            Ok(global_set.iter().map(|&a| sys.fit_error(a)).collect())
        })
        .collect::<Result<_>>()?;
    let values = DMatrix::from_fn(global_set.len(), projections.len(), |i, p| columns[p][i]);
    DistortionTable::new(values, global_set.to_vec(), eta0)
}

/// `η = η₀ (1 − e / max e)`, `μ = 1 − Π_p (1 − η_p)`, `evid = μ / max μ`.
pub fn combine_and_normalize(table: &DistortionTable) -> EvidenceScores {
    let (rows, cols) = table.values.shape();
    let max_all = table.values.iter().copied().fold(0.0, f64::max);
    if max_all <= 0.0 {
        log::warn!("{MODULE}: every distortion is zero; evidence is uniform");
        return EvidenceScores {
            mass: vec![1.0 - (1.0 - table.eta0).powi(cols as i32); rows],
            evid: vec![1.0; rows],
            per_edge_mass: DMatrix::from_element(rows, cols, table.eta0),
            degenerate: true,
        };
    }
    let eta = table.values.map(|e| table.eta0 * (1.0 - e / max_all));
    let mass: Vec<f64> = (0..rows)
        .map(|i| 1.0 - eta.row(i).iter().map(|h| 1.0 - h).product::<f64>())
        .collect();
    let top = mass.iter().copied().fold(0.0, f64::max);
    if top <= 0.0 {
        log::warn!("{MODULE}: every combined mass is zero; evidence is uniform");
        return EvidenceScores {
            evid: vec![1.0; rows],
            mass,
            per_edge_mass: eta,
            degenerate: true,
        };
    }
    EvidenceScores {
        evid: mass.iter().map(|m| m / top).collect(),
        mass,
        per_edge_mass: eta,
        degenerate: false,
    }
}

/// Pair indices sorted by descending evidence, ties by pair order.
pub fn ranking(scores: &EvidenceScores, pairs: &[AxisPair]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..scores.evid.len()).collect();
    idx.sort_by(|&a, &b| {
        scores.evid[b]
            .total_cmp(&scores.evid[a])
            .then(pairs[a].cmp(&pairs[b]))
    });
    idx
}
