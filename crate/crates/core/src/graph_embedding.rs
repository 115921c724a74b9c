//! Linear projections from the graph-embedding view of PCA, LPP and LDE.
//!
//! Every objective is expressed through a similarity graph Laplacian `L` and a
//! constraint matrix `B`; a projection minimises `tr(Vᵀ Xᵀ L X V)` under
//! `Vᵀ Xᵀ B X V = I` (PCA instead maximises the variance under `VᵀV = I`).
//! Further projections are pushed away from the ones already found by a
//! penalty on the sum of their projectors, which keeps every step a single
//! generalized eigenproblem.

use std::fmt;
use std::str::FromStr;

use nalgebra::{Cholesky, DMatrix};
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::linalg::{self, fix_signs, knn_indices, orthonormalize, sym_eigen_ascending};

const MODULE: &str = "graph_embedding";

/// Generalized eigenvalues below this are treated as null directions.
const NULL_EIGENVALUE: f64 = 1e-10;
/// Relative eigenvalue cutoff of XᵀX defining the data range.
const RANGE_TOL: f64 = 1e-10;
const MAX_CONDITION: f64 = 1e12;
const MAX_ALPHA_DOUBLINGS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    Pca,
    Lpp,
    Lde,
}

impl Objective {
    /// PCA keeps the largest eigenvalues; LPP and LDE the smallest.
    pub fn maximizes(self) -> bool {
        matches!(self, Objective::Pca)
    }
}

impl FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "pca" => Ok(Objective::Pca),
            "lpp" => Ok(Objective::Lpp),
            "lde" => Ok(Objective::Lde),
            other => Err(Error::Config(format!(
                "unknown objective '{other}' (expected pca, lpp or lde)"
            ))),
        }
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Objective::Pca => "pca",
            Objective::Lpp => "lpp",
            Objective::Lde => "lde",
        })
    }
}

/// Heat-kernel width for the LPP graph.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gamma {
    /// `1 / median(‖x_i − x_j‖²)` over the kNN edges.
    Auto,
    Fixed(f64),
}

impl FromStr for Gamma {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(Gamma::Auto);
        }
        let v: f64 = s
            .parse()
            .map_err(|_| Error::Config(format!("gamma must be 'auto' or a positive number, got '{s}'")))?;
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::Config(format!("gamma must be positive, got {v}")));
        }
        Ok(Gamma::Fixed(v))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GraphParams {
    pub objective: Objective,
    pub knn: usize,
    pub gamma: Gamma,
}

impl GraphParams {
    pub fn new(objective: Objective) -> Self {
        GraphParams {
            objective,
            knn: 10,
            gamma: Gamma::Auto,
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.knn == 0 || self.knn >= n {
            return Err(Error::Config(format!(
                "knn must satisfy 0 < knn < n = {n}, got {}",
                self.knn
            )));
        }
        if let Gamma::Fixed(g) = self.gamma {
            if !(g > 0.0 && g.is_finite()) {
                return Err(Error::Config(format!("gamma must be positive, got {g}")));
            }
        }
        Ok(())
    }
}

/// Similarity Laplacian and constraint matrix of one objective.
#[derive(Debug, Clone)]
pub struct GraphPair {
    pub params: GraphParams,
    /// `L = D − W`
    pub laplacian: DMatrix<f64>,
    /// PCA: identity, LPP: `D`, LDE: `D′ − W′`.
    pub constraint: DMatrix<f64>,
    pub similarity: DMatrix<f64>,
    /// `W′` of the LDE penalty graph.
    pub penalty_similarity: Option<DMatrix<f64>>,
    /// Heat-kernel width actually used (LPP only).
    pub gamma: Option<f64>,
    /// False when the LPP neighbourhood graph has more than one component.
    pub connected: bool,
}

fn laplacian(w: &DMatrix<f64>) -> DMatrix<f64> {
    let mut l = -w.clone();
    for i in 0..w.nrows() {
        l[(i, i)] += w.row(i).sum();
    }
    l
}

fn degree(w: &DMatrix<f64>) -> DMatrix<f64> {
    DMatrix::from_diagonal(&w.column_sum())
}

fn is_connected(adj: &[Vec<usize>]) -> bool {
    let n = adj.len();
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    let mut count = 1;
    while let Some(i) = stack.pop() {
        for &j in &adj[i] {
            if !seen[j] {
                seen[j] = true;
                count += 1;
                stack.push(j);
            }
        }
    }
    count == n
}

/// Builds the similarity and penalty graphs of the requested objective.
pub fn build_graphs(ds: &Dataset, params: GraphParams) -> Result<GraphPair> {
    let n = ds.n();
    params.validate(n)?;
    match params.objective {
        Objective::Pca => {
            let inv = 1.0 / n as f64;
            let w = DMatrix::from_fn(n, n, |i, j| if i == j { 0.0 } else { inv });
            Ok(GraphPair {
                params,
                laplacian: laplacian(&w),
                constraint: DMatrix::identity(n, n),
                similarity: w,
                penalty_similarity: None,
                gamma: None,
                connected: true,
            })
        }
        Objective::Lpp => {
            let x = ds.samples();
            let nn = knn_indices(x, params.knn);
            let mut adj = vec![Vec::new(); n];
            let mut edge = DMatrix::from_element(n, n, false);
            for (i, row) in nn.iter().enumerate() {
                for &j in row {
                    edge[(i, j)] = true;
                    edge[(j, i)] = true;
                }
            }
            let flat = linalg::row_major(x);
            let d = ds.d();
            let mut lengths = Vec::new();
            for i in 0..n {
                for j in (i + 1)..n {
                    if edge[(i, j)] {
                        adj[i].push(j);
                        adj[j].push(i);
                        lengths.push(linalg::sq_dist(&flat, d, i, j));
                    }
                }
            }
            let gamma = match params.gamma {
                Gamma::Fixed(g) => g,
                Gamma::Auto => {
                    let med = linalg::median(&mut lengths);
                    if med <= 0.0 {
                        return Err(Error::numeric(
                            MODULE,
                            "median squared kNN edge length is zero; set gamma explicitly",
                        ));
                    }
                    1.0 / med
                }
            };
            let w = DMatrix::from_fn(n, n, |i, j| {
                if edge[(i, j)] {
                    (-gamma * linalg::sq_dist(&flat, d, i, j)).exp()
                } else {
                    0.0
                }
            });
            let connected = is_connected(&adj);
            if !connected {
                log::warn!("{MODULE}: LPP neighbourhood graph (knn = {}) is disconnected", params.knn);
            }
            Ok(GraphPair {
                params,
                laplacian: laplacian(&w),
                constraint: degree(&w),
                similarity: w,
                penalty_similarity: None,
                gamma: Some(gamma),
                connected,
            })
        }
        Objective::Lde => {
            let labels = ds.labels().ok_or_else(|| {
                Error::data(MODULE, "LDE needs class labels; pass a label column")
            })?;
            let same = |i: usize, j: usize| labels[i] == labels[j];
            let w = DMatrix::from_fn(n, n, |i, j| if i != j && same(i, j) { 1.0 } else { 0.0 });
            let wp = DMatrix::from_fn(n, n, |i, j| if same(i, j) { 0.0 } else { 1.0 });
            Ok(GraphPair {
                params,
                laplacian: laplacian(&w),
                constraint: laplacian(&wp),
                similarity: w,
                penalty_similarity: Some(wp),
                gamma: None,
                connected: true,
            })
        }
    }
}

/// An orthonormal `d × 2` basis of a 2D subspace.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProjection {
    pub basis: DMatrix<f64>,
    pub objective_tag: Option<GraphParams>,
    pub order_index: usize,
}

impl LinearProjection {
    /// Wraps a basis after checking `‖VᵀV − I‖_F < 1e-10`.
    pub fn from_basis(basis: DMatrix<f64>) -> Result<Self> {
        if basis.ncols() != 2 || basis.nrows() < 2 {
            return Err(Error::numeric(
                MODULE,
                format!("projection basis must be d x 2, got {:?}", basis.shape()),
            ));
        }
        let err = linalg::orthonormality_error(&basis);
        if err >= 1e-10 {
            return Err(Error::numeric(
                MODULE,
                format!("projection basis is not orthonormal (|VtV - I| = {err:e})"),
            ));
        }
        Ok(LinearProjection {
            basis,
            objective_tag: None,
            order_index: 0,
        })
    }

    /// `span(e_p, e_q)` in `d` dimensions.
    pub fn axis_aligned(d: usize, p: usize, q: usize) -> Self {
        let mut basis = DMatrix::zeros(d, 2);
        basis[(p, 0)] = 1.0;
        basis[(q, 1)] = 1.0;
        LinearProjection {
            basis,
            objective_tag: None,
            order_index: 0,
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    /// `V Vᵀ`
    pub fn projector(&self) -> DMatrix<f64> {
        &self.basis * self.basis.transpose()
    }

    /// Embedded coordinates `X V` (`n × 2`).
    pub fn embed(&self, ds: &Dataset) -> DMatrix<f64> {
        ds.samples() * &self.basis
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiversityConfig {
    pub count: usize,
    pub alpha: f64,
    pub redundancy_tol: f64,
}

impl Default for DiversityConfig {
    fn default() -> Self {
        DiversityConfig {
            count: 4,
            alpha: 1.0,
            redundancy_tol: 0.05,
        }
    }
}

impl DiversityConfig {
    pub fn validate(&self) -> Result<()> {
        if self.count == 0 {
            return Err(Error::Config("projection count must be at least 1".into()));
        }
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(Error::Config(format!("alpha must be >= 0, got {}", self.alpha)));
        }
        if self.redundancy_tol.is_nan() || self.redundancy_tol < 0.0 {
            return Err(Error::Config(format!(
                "redundancy tolerance must be >= 0, got {}",
                self.redundancy_tol
            )));
        }
        Ok(())
    }
}

/// Orthonormal basis of the column space of `XᵀX`, or `None` when `X` has
/// full column rank. Rank-deficient data (e.g. delay embeddings) would
/// otherwise put the smallest generalized eigenvalues in directions the data
/// never visits.
fn data_range(x: &DMatrix<f64>) -> Result<Option<DMatrix<f64>>> {
    let gram = x.transpose() * x;
    let (vals, vecs) = sym_eigen_ascending(&gram);
    let top = vals.last().copied().unwrap_or(0.0);
    let keep: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] > RANGE_TOL * top).collect();
    if keep.len() < 2 {
        return Err(Error::numeric(MODULE, "data spans fewer than 2 dimensions"));
    }
    if keep.len() == vals.len() {
        return Ok(None);
    }
    log::debug!("{MODULE}: data has rank {} of {}", keep.len(), vals.len());
    Ok(Some(vecs.select_columns(keep.iter().rev())))
}

/// Solves `A v = λ B v` for symmetric `A` and symmetric positive
/// (semi)definite `B`. Eigenvalues ascending; eigenvectors are
/// `B`-orthonormal columns. `B` is ridged by `1e-8 · tr(B)/r` when its
/// condition number exceeds 1e12.
pub(crate) fn generalized_eigen(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let r = b.nrows();
    let mut b = linalg::symmetrize(b);
    let (bvals, _) = sym_eigen_ascending(&b);
    let (lo, hi) = (bvals[0], bvals[r - 1]);
    let cond = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    if cond > MAX_CONDITION {
        let ridge = 1e-8 * b.trace() / r as f64;
        log::debug!("{MODULE}: constraint matrix condition {cond:e}, adding ridge {ridge:e}");
        for i in 0..r {
            b[(i, i)] += ridge;
        }
    }
    let chol = Cholesky::new(b).ok_or_else(|| {
        Error::numeric(
            MODULE,
            format!("constraint matrix XBXt is singular beyond ridge repair (condition estimate {cond:e})"),
        )
    })?;
    let l = chol.l();
    let linv_a = l
        .solve_lower_triangular(a)
        .ok_or_else(|| Error::numeric(MODULE, "triangular solve failed"))?;
    let c = l
        .solve_lower_triangular(&linv_a.transpose())
        .ok_or_else(|| Error::numeric(MODULE, "triangular solve failed"))?;
    let (vals, u) = sym_eigen_ascending(&c);
    let v = l
        .transpose()
        .solve_upper_triangular(&u)
        .ok_or_else(|| Error::numeric(MODULE, "triangular solve failed"))?;
    Ok((vals, v))
}

/// One projection for the given graphs and diversity penalty (`d × d`,
/// positive semidefinite; zero for the first projection).
///
/// For PCA the penalty is subtracted from the maximised variance; for LPP and
/// LDE it is added to the minimised objective.
pub fn solve_projection(ds: &Dataset, graphs: &GraphPair, penalty: &DMatrix<f64>) -> Result<LinearProjection> {
    let x = ds.samples();
    let d = ds.d();
    if penalty.shape() != (d, d) {
        return Err(Error::numeric(
            MODULE,
            format!("penalty must be {d} x {d}, got {:?}", penalty.shape()),
        ));
    }
    let objective = graphs.params.objective;
    let a = x.transpose() * (&graphs.laplacian * x);
    let range = data_range(x)?;
    let reduce = |m: &DMatrix<f64>| match &range {
        Some(q) => q.transpose() * m * q,
        None => m.clone(),
    };

    let reduced = if objective.maximizes() {
        let m = reduce(&(a - penalty));
        let (_, vecs) = sym_eigen_ascending(&m);
        let r = vecs.ncols();
        vecs.select_columns([r - 1, r - 2].iter())
    } else {
        let b = x.transpose() * (&graphs.constraint * x);
        let (vals, vecs) = generalized_eigen(&reduce(&(a + penalty)), &reduce(&b))?;
        let keep: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] >= NULL_EIGENVALUE).take(2).collect();
        if keep.len() < 2 {
            return Err(Error::numeric(
                MODULE,
                format!("fewer than 2 non-null generalized eigenvalues for {objective}"),
            ));
        }
        vecs.select_columns(keep.iter())
    };
    let lifted = match &range {
        Some(q) => q * reduced,
        None => reduced,
    };
    let mut basis = orthonormalize(&lifted)?;
    fix_signs(&mut basis);
    Ok(LinearProjection {
        basis,
        objective_tag: Some(graphs.params),
        order_index: 0,
    })
}

/// `2 − ‖AᵀB‖_F²`, clamped to `[0, 2]`.
pub fn chordal_distance_sq(a: &LinearProjection, b: &LinearProjection) -> f64 {
    assert_eq!(a.dim(), b.dim(), "projections live in different ambient dimensions");
    let overlap = (a.basis.transpose() * &b.basis).norm_squared();
    (2.0 - overlap).clamp(0.0, 2.0)
}

/// True when `y_prev` is (within `tol`, relative to its spread) an affine
/// image of `y_new`. A collapsed `y_new` is always redundant.
pub fn is_affine_redundant(y_new: &DMatrix<f64>, y_prev: &DMatrix<f64>, tol: f64) -> bool {
    assert_eq!(y_new.nrows(), y_prev.nrows(), "embeddings of different size");
    let center = |y: &DMatrix<f64>| {
        let mean = y.row_mean();
        let mut c = y.clone();
        for mut row in c.row_iter_mut() {
            row -= &mean;
        }
        c
    };
    let xn = center(y_new);
    let xp = center(y_prev);
    let gram = xn.transpose() * &xn;
    let scale = gram.trace();
    if scale <= 0.0 || gram.determinant() <= 1e-12 * scale * scale {
        return true;
    }
    let denom = xp.norm();
    if denom <= 1e-300 {
        return true;
    }
    let Some(inv) = gram.try_inverse() else {
        return true;
    };
    let map = inv * (xn.transpose() * &xp);
    let resid = (&xn * map - &xp).norm();
    resid / denom < tol
}

/// Outcome of the diverse projection search.
#[derive(Debug, Clone)]
pub struct ProjectionSearch {
    pub projections: Vec<LinearProjection>,
    pub graphs_connected: bool,
    pub warnings: Vec<String>,
}

/// Sequentially solves for up to `cfg.count` projections, each penalised by
/// `α · s · Σ V_i V_iᵀ` over its predecessors, where `s = tr(XᵀLX)/d` makes
/// `α` independent of the data scale. Candidates whose embedding is an affine
/// image of an earlier one are rejected and retried with `α` doubled.
pub fn find_representative_projections(
    ds: &Dataset,
    params: GraphParams,
    cfg: &DiversityConfig,
) -> Result<ProjectionSearch> {
    cfg.validate()?;
    let graphs = build_graphs(ds, params)?;
    let mut warnings = Vec::new();
    if !graphs.connected {
        warnings.push(format!("LPP neighbourhood graph with knn = {} is disconnected", params.knn));
    }
    let d = ds.d();
    let x = ds.samples();
    let scale = (x.transpose() * (&graphs.laplacian * x)).trace() / d as f64;

    let mut found: Vec<LinearProjection> = Vec::new();
    let mut prior_sum = DMatrix::<f64>::zeros(d, d);
    let mut embeddings: Vec<DMatrix<f64>> = Vec::new();
    for j in 0..cfg.count {
        let mut alpha = cfg.alpha;
        let mut accepted = None;
        for _attempt in 0..=MAX_ALPHA_DOUBLINGS {
            let penalty = &prior_sum * (alpha * scale);
            let mut cand = solve_projection(ds, &graphs, &penalty)?;
            cand.order_index = j;
            let y = cand.embed(ds);
            if !embeddings.iter().any(|prev| is_affine_redundant(&y, prev, cfg.redundancy_tol)) {
                accepted = Some((cand, y));
                break;
            }
            if found.is_empty() {
                break;
            }
            alpha *= 2.0;
        }
        match accepted {
            Some((cand, y)) => {
                prior_sum += cand.projector();
                embeddings.push(y);
                found.push(cand);
            }
            None => {
                let msg = format!(
                    "projection {j} stayed affine-redundant after {MAX_ALPHA_DOUBLINGS} alpha doublings; \
                     returning {} of {} projections",
                    found.len(),
                    cfg.count
                );
                log::warn!("{MODULE}: {msg}");
                warnings.push(msg);
                break;
            }
        }
    }
    Ok(ProjectionSearch {
        projections: found,
        graphs_connected: graphs.connected,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn names(d: usize) -> Vec<String> {
        (0..d).map(|i| format!("x{i}")).collect()
    }

    fn random_dataset(seed: u64, n: usize, d: usize, labels: bool) -> Dataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = DMatrix::from_fn(n, d, |_, _| rng.sample::<f64, _>(StandardNormal));
        let labels = labels.then(|| (0..n).map(|i| format!("c{}", i % 3)).collect());
        Dataset::new(m, names(d), labels).unwrap().standardize().unwrap().0
    }

    #[test]
    fn pca_graph_has_uniform_weights() {
        let ds = random_dataset(1, 4, 3, false);
        let g = build_graphs(&ds, GraphParams::new(Objective::Pca)).unwrap_err();
        // knn = 10 >= n = 4 is a configuration error even for PCA
        assert!(matches!(g, Error::Config(_)));
        let mut p = GraphParams::new(Objective::Pca);
        p.knn = 2;
        let g = build_graphs(&ds, p).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let w = g.similarity[(i, j)];
                assert_eq!(w, if i == j { 0.0 } else { 0.25 });
            }
        }
        assert_eq!(g.constraint, DMatrix::identity(4, 4));
    }

    #[test]
    fn lde_graphs_from_labels() {
        let m = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 2.0, 1.0, 0.0, 3.0, 2.0, 2.0, 0.0]);
        let ds = Dataset::new(m, names(3), Some(vec!["a".into(), "a".into(), "b".into()])).unwrap();
        let mut p = GraphParams::new(Objective::Lde);
        p.knn = 1;
        let g = build_graphs(&ds, p).unwrap();
        let w = DMatrix::from_row_slice(3, 3, &[0., 1., 0., 1., 0., 0., 0., 0., 0.]);
        let wp = DMatrix::from_row_slice(3, 3, &[0., 0., 1., 0., 0., 1., 1., 1., 0.]);
        assert_eq!(g.similarity, w);
        assert_eq!(g.penalty_similarity.unwrap(), wp);
        let b = DMatrix::from_row_slice(3, 3, &[1., 0., -1., 0., 1., -1., -1., -1., 2.]);
        assert_eq!(g.constraint, b);
    }

    #[test]
    fn lde_without_labels_is_a_data_error() {
        let ds = random_dataset(2, 20, 4, false);
        let err = build_graphs(&ds, GraphParams::new(Objective::Lde)).unwrap_err();
        assert!(matches!(err, Error::Data { .. }));
    }

    #[test]
    fn laplacians_are_symmetric_with_zero_row_sums() {
        for obj in [Objective::Pca, Objective::Lpp, Objective::Lde] {
            let ds = random_dataset(3, 40, 5, true);
            let g = build_graphs(&ds, GraphParams::new(obj)).unwrap();
            assert!((&g.laplacian - g.laplacian.transpose()).norm() < 1e-12);
            assert!((&g.constraint - g.constraint.transpose()).norm() < 1e-12);
            for row in g.laplacian.row_iter() {
                assert!(row.sum().abs() < 1e-8);
            }
            let (vals, _) = sym_eigen_ascending(&g.laplacian);
            assert!(vals[0] > -1e-8, "{obj}: {}", vals[0]);
        }
    }

    #[test]
    fn disconnected_lpp_graph_is_flagged() {
        // two far-apart clusters with knn = 2
        let mut rows = Vec::new();
        for i in 0..5 {
            rows.extend_from_slice(&[i as f64 * 0.1, 0.0, (i * i) as f64 * 0.01]);
        }
        for i in 0..5 {
            rows.extend_from_slice(&[100.0 + i as f64 * 0.1, 50.0, (i * i) as f64 * 0.02]);
        }
        let ds = Dataset::new(DMatrix::from_row_slice(10, 3, &rows), names(3), None).unwrap();
        let mut p = GraphParams::new(Objective::Lpp);
        p.knn = 2;
        assert!(!build_graphs(&ds, p).unwrap().connected);
    }

    #[test]
    fn pca_on_diagonal_covariance_recovers_leading_axes() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let sd = [5f64.sqrt(), 2f64.sqrt(), 1.0];
        let n = 300;
        let raw = DMatrix::from_fn(n, 3, |_, j| sd[j] * rng.sample::<f64, _>(StandardNormal));
        // whiten the sample then impose exact variances so XᵀX ∝ diag(5,2,1)
        let centered = {
            let mean = raw.row_mean();
            let mut m = raw.clone();
            for mut r in m.row_iter_mut() {
                r -= &mean;
            }
            m
        };
        let gram = centered.transpose() * &centered / n as f64;
        let (vals, vecs) = sym_eigen_ascending(&gram);
        let whiten = &vecs * DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(3, vals.iter().map(|v| 1.0 / v.sqrt()))) * vecs.transpose();
        let x = &centered * whiten * DMatrix::from_diagonal(&nalgebra::DVector::from_vec(sd.to_vec()));
        let ds = Dataset::new(x, names(3), None).unwrap();
        let mut p = GraphParams::new(Objective::Pca);
        p.knn = 5;
        let g = build_graphs(&ds, p).unwrap();
        let v = solve_projection(&ds, &g, &DMatrix::zeros(3, 3)).unwrap();
        let target = LinearProjection::axis_aligned(3, 0, 1);
        assert!(chordal_distance_sq(&v, &target) < 1e-8);
    }

    #[test]
    fn solving_is_bitwise_deterministic() {
        let ds = random_dataset(5, 60, 6, true);
        for obj in [Objective::Pca, Objective::Lpp, Objective::Lde] {
            let g = build_graphs(&ds, GraphParams::new(obj)).unwrap();
            let a = solve_projection(&ds, &g, &DMatrix::zeros(6, 6)).unwrap();
            let b = solve_projection(&ds, &g, &DMatrix::zeros(6, 6)).unwrap();
            assert_eq!(a.basis, b.basis);
            assert!(crate::linalg::orthonormality_error(&a.basis) < 1e-10);
        }
    }

    #[test]
    fn large_penalty_leaves_prior_span() {
        let ds = random_dataset(6, 80, 6, true);
        for obj in [Objective::Pca, Objective::Lpp, Objective::Lde] {
            let g = build_graphs(&ds, GraphParams::new(obj)).unwrap();
            let v0 = solve_projection(&ds, &g, &DMatrix::zeros(6, 6)).unwrap();
            let x = ds.samples();
            let scale = (x.transpose() * (&g.laplacian * x)).trace();
            let v1 = solve_projection(&ds, &g, &(v0.projector() * (1e6 * scale))).unwrap();
            let overlap = (v1.basis.transpose() * &v0.basis).norm();
            assert!(overlap < 0.1, "{obj}: overlap {overlap}");
        }
    }

    #[test]
    fn chordal_distance_examples() {
        let a = LinearProjection::axis_aligned(4, 0, 1);
        let b = LinearProjection::axis_aligned(4, 2, 3);
        let c = LinearProjection::axis_aligned(4, 0, 2);
        assert_eq!(chordal_distance_sq(&a, &a), 0.0);
        assert_eq!(chordal_distance_sq(&a, &b), 2.0);
        assert_eq!(chordal_distance_sq(&a, &c), 1.0);
    }

    #[test]
    fn affine_image_is_redundant() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let y = DMatrix::from_fn(200, 2, |_, _| rng.sample::<f64, _>(StandardNormal));
        let (s, c) = 30f64.to_radians().sin_cos();
        let rot = DMatrix::from_row_slice(2, 2, &[c, s, -s, c]);
        let mut prev = &y * rot;
        for mut row in prev.row_iter_mut() {
            row[0] += 3.0;
            row[1] -= 1.0;
        }
        assert!(is_affine_redundant(&y, &prev, 0.05));
    }

    #[test]
    fn independent_clouds_are_not_redundant() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..20 {
            let a = DMatrix::from_fn(200, 2, |_, _| rng.sample::<f64, _>(StandardNormal));
            let b = DMatrix::from_fn(200, 2, |_, _| rng.sample::<f64, _>(StandardNormal));
            assert!(!is_affine_redundant(&a, &b, 0.05));
            // residual ratio concentrates near 1 for independent clouds
            assert!(!is_affine_redundant(&a, &b, 0.9));
        }
    }

    #[test]
    fn collapsed_embedding_is_redundant() {
        let y = DMatrix::from_element(50, 2, 1.5);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let prev = DMatrix::from_fn(50, 2, |_, _| rng.random::<f64>());
        assert!(is_affine_redundant(&y, &prev, 0.05));
    }

    #[test]
    fn single_projection_applies_no_penalty() {
        let ds = random_dataset(10, 60, 5, true);
        let params = GraphParams::new(Objective::Lpp);
        let cfg = DiversityConfig { count: 1, ..Default::default() };
        let out = find_representative_projections(&ds, params, &cfg).unwrap();
        assert_eq!(out.projections.len(), 1);
        let g = build_graphs(&ds, params).unwrap();
        let direct = solve_projection(&ds, &g, &DMatrix::zeros(5, 5)).unwrap();
        assert_eq!(out.projections[0].basis, direct.basis);
    }

    #[test]
    fn zero_alpha_stops_on_redundancy() {
        let ds = random_dataset(11, 60, 5, true);
        let cfg = DiversityConfig { count: 2, alpha: 0.0, redundancy_tol: 0.05 };
        let out = find_representative_projections(&ds, GraphParams::new(Objective::Lpp), &cfg).unwrap();
        assert_eq!(out.projections.len(), 1);
        assert_eq!(out.warnings.len(), 1);
    }

    #[test]
    fn positive_alpha_separates_projections() {
        let ds = random_dataset(12, 80, 6, true);
        for obj in [Objective::Pca, Objective::Lpp, Objective::Lde] {
            let cfg = DiversityConfig { count: 3, ..Default::default() };
            let out = find_representative_projections(&ds, GraphParams::new(obj), &cfg).unwrap();
            for (i, a) in out.projections.iter().enumerate() {
                assert_eq!(a.order_index, i);
                assert!(crate::linalg::orthonormality_error(&a.basis) < 1e-10);
                for b in &out.projections[..i] {
                    assert!(chordal_distance_sq(a, b) > 0.0);
                }
            }
        }
    }

    #[test]
    fn objective_parsing() {
        assert_eq!("LPP".parse::<Objective>().unwrap(), Objective::Lpp);
        assert!(matches!("tsne".parse::<Objective>(), Err(Error::Config(_))));
        assert_eq!("auto".parse::<Gamma>().unwrap(), Gamma::Auto);
        assert_eq!("0.5".parse::<Gamma>().unwrap(), Gamma::Fixed(0.5));
        assert!("-1".parse::<Gamma>().is_err());
    }
}
