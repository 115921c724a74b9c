//! Sparse decomposition of linear projections into axis-aligned scatterplots.
//!
//! Pairwise neighbour distances under a projection `V` are approximated by a
//! sum of two coordinate contributions: row `r` of the secant matrix `C` holds
//! the squared coordinate differences of a neighbour pair, `b_r` its squared
//! projected distance, and a pair `(p, q)` fits with error
//! `‖C(e_p + e_q) − b‖`. Pairs are picked greedily; after each pick the part
//! of `VVᵀ` they explain is removed and the next pick is made against the
//! residual subspace.

use std::collections::BTreeSet;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::graph_embedding::LinearProjection;
use crate::grassmann::{grassmann_least_squares, residual_subspace, AxisPair};
use crate::linalg::knn_indices;

#[derive(Debug, Clone)]
pub struct SecantSystem {
    /// `m × d`, squared coordinate differences.
    pub c: DMatrix<f64>,
    /// Squared projected distances.
    pub b: DVector<f64>,
    /// Point pairs `(i, j)`, `i < j`, one per row.
    pub pair_index: Vec<(usize, usize)>,
}

impl SecantSystem {
    pub fn rows(&self) -> usize {
        self.b.len()
    }

    pub fn dim(&self) -> usize {
        self.c.ncols()
    }

    /// `‖C e_p − b‖`
    pub fn single_error(&self, p: usize) -> f64 {
        self.c.column(p).iter().zip(self.b.iter()).map(|(c, b)| (c - b) * (c - b)).sum::<f64>().sqrt()
    }

    /// `‖C (e_p + e_q) − b‖`
    pub fn fit_error(&self, pair: AxisPair) -> f64 {
        let cp = self.c.column(pair.p());
        let cq = self.c.column(pair.q());
        cp.iter()
            .zip(cq.iter())
            .zip(self.b.iter())
            .map(|((x, y), b)| {
                let r = x + y - b;
                r * r
            })
            .sum::<f64>()
            .sqrt()
    }
}

/// Secants over the `k`-nearest-neighbour pairs of the projected points `XV`.
/// Symmetric duplicates are merged and rows are ordered by `(i, j)`.
pub fn build_secant_system(ds: &Dataset, v: &LinearProjection, k: usize) -> Result<SecantSystem> {
    let n = ds.n();
    if k == 0 || k >= n {
        return Err(Error::Config(format!("secant k must satisfy 0 < k < n = {n}, got {k}")));
    }
    let x = ds.samples();
    let y = v.embed(ds);
    let nn = knn_indices(&y, k);
    let pairs: BTreeSet<(usize, usize)> = nn
        .iter()
        .enumerate()
        .flat_map(|(i, row)| row.iter().map(move |&j| (i.min(j), i.max(j))))
        .collect();
    let pair_index: Vec<(usize, usize)> = pairs.into_iter().collect();
    let d = ds.d();
    let m = pair_index.len();
    let c = DMatrix::from_fn(m, d, |r, col| {
        let (i, j) = pair_index[r];
        let diff = x[(i, col)] - x[(j, col)];
        diff * diff
    });
    let b = DVector::from_fn(m, |r, _| {
        let (i, j) = pair_index[r];
        (y.row(i) - y.row(j)).norm_squared()
    });
    Ok(SecantSystem { c, b, pair_index })
}

/// Greedy two-step pair choice: the best single dimension `p`, then the best
/// partner `q` for it. If every partner of `p` is forbidden the next best `p`
/// is tried. Ties go to the lower index.
pub fn select_axis_pair(sys: &SecantSystem, forbidden: &BTreeSet<AxisPair>) -> Result<(AxisPair, f64)> {
    let d = sys.dim();
    let mut singles: Vec<(f64, usize)> = (0..d).map(|p| (sys.single_error(p), p)).collect();
    singles.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    for &(_, p) in &singles {
        let mut best: Option<(f64, AxisPair)> = None;
        for q in (0..d).filter(|&q| q != p) {
            let pair = AxisPair::new(p, q);
            if forbidden.contains(&pair) {
                continue;
            }
            let err = sys.fit_error(pair);
            if best.is_none_or(|(e, _)| err < e) {
                best = Some((err, pair));
            }
        }
        if let Some((err, pair)) = best {
            return Ok((pair, err));
        }
    }
    Err(Error::AllPairsForbidden)
}

/// Exhaustive minimiser of the pair fit error (lexicographic tie-break).
pub fn best_pair_exhaustive(sys: &SecantSystem) -> (AxisPair, f64) {
    AxisPair::all(sys.dim())
        .into_iter()
        .map(|a| (a, sys.fit_error(a)))
        .fold(None, |acc: Option<(AxisPair, f64)>, (a, e)| match acc {
            Some((_, be)) if be <= e => acc,
            _ => Some((a, e)),
        })
        .expect("at least one pair")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecompositionConfig {
    pub k: usize,
    pub l_max: usize,
    pub delta: f64,
    pub lambda: f64,
}

impl Default for DecompositionConfig {
    fn default() -> Self {
        DecompositionConfig {
            k: 10,
            l_max: 5,
            delta: 0.9,
            lambda: 1e-3,
        }
    }
}

impl DecompositionConfig {
    pub fn validate(&self, n: usize) -> Result<()> {
        if self.k == 0 || self.k >= n {
            return Err(Error::Config(format!("k must satisfy 1 <= k < n = {n}, got {}", self.k)));
        }
        if self.l_max == 0 {
            return Err(Error::Config("lmax must be at least 1".into()));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::Config(format!("delta must lie in (0, 1), got {}", self.delta)));
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::Config(format!("lambda must be >= 0, got {}", self.lambda)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelectedPlot {
    pub pair: AxisPair,
    pub beta: f64,
    /// Fit error against the original projection's secants.
    pub distortion: f64,
    /// Taken from the global set of an earlier decomposition.
    pub reused: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    NoImprovement,
    MaxCount,
    FullyExplained,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    pub projection_index: usize,
    pub plots: Vec<SelectedPlot>,
    pub terminated_by: Termination,
}

impl Decomposition {
    pub fn pairs(&self) -> Vec<AxisPair> {
        self.plots.iter().map(|p| p.pair).collect()
    }
}

/// Decomposes one projection. `global_set` holds pairs chosen for earlier
/// projections; one of them replaces the fresh candidate whenever its fit
/// error is within a factor `1/δ` of the candidate's.
pub fn decompose_single(
    ds: &Dataset,
    v: &LinearProjection,
    cfg: &DecompositionConfig,
    global_set: &[AxisPair],
) -> Result<Decomposition> {
    cfg.validate(ds.n())?;
    let original = build_secant_system(ds, v, cfg.k)?;
    let mut plots: Vec<SelectedPlot> = Vec::new();
    let mut chosen = BTreeSet::new();
    let mut min_distortion = f64::INFINITY;
    let mut current: Option<SecantSystem> = None;

    let terminated_by = loop {
        let sys = current.as_ref().unwrap_or(&original);
        let (candidate, cand_err) = match select_axis_pair(sys, &chosen) {
            Ok(found) => found,
            Err(Error::AllPairsForbidden) => break Termination::NoImprovement,
            Err(e) => return Err(e),
        };
        let best_global = global_set
            .iter()
            .filter(|g| !chosen.contains(*g))
            .map(|&g| (sys.fit_error(g), g))
            .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let (pair, reused) = match best_global {
            Some((err, g)) if err <= cand_err / cfg.delta => (g, true),
            _ => (candidate, false),
        };

        let distortion = original.fit_error(pair);
        if !plots.is_empty() && distortion >= cfg.delta * min_distortion {
            break Termination::NoImprovement;
        }
        min_distortion = min_distortion.min(distortion);
        chosen.insert(pair);
        plots.push(SelectedPlot {
            pair,
            beta: 0.0,
            distortion,
            reused,
        });

        let pairs: Vec<AxisPair> = plots.iter().map(|p| p.pair).collect();
        let betas = grassmann_least_squares(v, &pairs, cfg.lambda)?;
        for (plot, beta) in plots.iter_mut().zip(&betas) {
            plot.beta = *beta;
        }
        if plots.len() >= cfg.l_max {
            break Termination::MaxCount;
        }
        match residual_subspace(v, &pairs, &betas) {
            Ok(u) => current = Some(build_secant_system(ds, &u, cfg.k)?),
            Err(Error::FullyExplained { .. }) => break Termination::FullyExplained,
            Err(e) => return Err(e),
        }
    };
    Ok(Decomposition {
        projection_index: v.order_index,
        plots,
        terminated_by,
    })
}

/// Decomposes projections in `order_index` order, sharing the global set.
/// The returned set lists pairs in order of first selection.
pub fn decompose_joint(
    ds: &Dataset,
    projections: &[LinearProjection],
    cfg: &DecompositionConfig,
) -> Result<(Vec<Decomposition>, Vec<AxisPair>)> {
    if projections.is_empty() {
        return Err(Error::Config("no projections to decompose".into()));
    }
    let mut ordered: Vec<&LinearProjection> = projections.iter().collect();
    ordered.sort_by_key(|p| p.order_index);
    let mut global: Vec<AxisPair> = Vec::new();
    let mut out = Vec::with_capacity(ordered.len());
    for v in ordered {
        let dec = decompose_single(ds, v, cfg, &global)?;
        for plot in &dec.plots {
            if !global.contains(&plot.pair) {
                global.push(plot.pair);
            }
        }
        out.push(dec);
    }
    Ok((out, global))
}
