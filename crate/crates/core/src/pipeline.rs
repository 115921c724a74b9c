//! End-to-end analysis and the JSON bundle handed to the explorer UI.

use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::decomposition::{decompose_joint, DecompositionConfig, Termination};
use crate::error::{Error, Result};
use crate::evidence::{combine_and_normalize, fill_distortion_table};
use crate::graph_embedding::{find_representative_projections, DiversityConfig, Gamma, GraphParams, LinearProjection, Objective};
use crate::grassmann::{geodesic_path, AxisPair, GeodesicPath};
use crate::linalg::knn_indices;
use crate::quality::{aggregate_max_fidelity, build_histogram, fidelity_from_neighbors, FidelityReport, Histogram};

pub const SCHEMA_VERSION: u32 = 1;
pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisConfig {
    pub input: PathBuf,
    pub label: Option<String>,
    pub objective: Objective,
    pub projections: usize,
    pub alpha: f64,
    pub redundancy_tol: f64,
    pub knn: usize,
    pub gamma: Gamma,
    pub k: usize,
    pub lmax: usize,
    pub delta: f64,
    pub lambda: f64,
    pub eta0: f64,
    pub evidence_filter: f64,
    pub bins: usize,
    /// Neighbourhood size used for both sides of the fidelity measure.
    pub fidelity_k: usize,
    pub output: Option<PathBuf>,
}

impl AnalysisConfig {
    pub fn new(input: impl Into<PathBuf>, objective: Objective) -> Self {
        let div = DiversityConfig::default();
        let dec = DecompositionConfig::default();
        AnalysisConfig {
            input: input.into(),
            label: None,
            objective,
            projections: div.count,
            alpha: div.alpha,
            redundancy_tol: div.redundancy_tol,
            knn: 10,
            gamma: Gamma::Auto,
            k: dec.k,
            lmax: dec.l_max,
            delta: dec.delta,
            lambda: dec.lambda,
            eta0: 0.95,
            evidence_filter: 0.05,
            bins: 20,
            fidelity_k: 30,
            output: None,
        }
    }

    pub fn graph_params(&self) -> GraphParams {
        GraphParams {
            objective: self.objective,
            knn: self.knn,
            gamma: self.gamma,
        }
    }

    pub fn diversity(&self) -> DiversityConfig {
        DiversityConfig {
            count: self.projections,
            alpha: self.alpha,
            redundancy_tol: self.redundancy_tol,
        }
    }

    pub fn decomposition(&self) -> DecompositionConfig {
        DecompositionConfig {
            k: self.k,
            l_max: self.lmax,
            delta: self.delta,
            lambda: self.lambda,
        }
    }

    /// Checks everything that does not depend on the data size.
    pub fn validate(&self) -> Result<()> {
        self.diversity().validate()?;
        if self.objective == Objective::Lde && self.label.is_none() {
            return Err(Error::Config("objective lde needs --label".into()));
        }
        if self.knn == 0 {
            return Err(Error::Config("knn must be at least 1".into()));
        }
        if let Gamma::Fixed(g) = self.gamma {
            if !(g > 0.0 && g.is_finite()) {
                return Err(Error::Config(format!("gamma must be positive, got {g}")));
            }
        }
        let dec = self.decomposition();
        if dec.k == 0 {
            return Err(Error::Config("k must be at least 1".into()));
        }
        // n is unknown here; the remaining checks do not need it
        dec.validate(usize::MAX)?;
        if !(self.eta0 > 0.0 && self.eta0 < 1.0) {
            return Err(Error::Config(format!("eta0 must lie in (0, 1), got {}", self.eta0)));
        }
        if !(0.0..=1.0).contains(&self.evidence_filter) {
            return Err(Error::Config(format!(
                "evidence filter must lie in [0, 1], got {}",
                self.evidence_filter
            )));
        }
        if self.bins == 0 {
            return Err(Error::Config("bins must be at least 1".into()));
        }
        if self.fidelity_k == 0 {
            return Err(Error::Config("fidelity k must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Versions {
    pub engine: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetMeta {
    pub dim_names: Vec<String>,
    /// Zero-variance columns dropped during standardisation.
    pub removed_dims: Vec<String>,
    pub labels: Option<Vec<String>>,
    /// Standardised samples, one row per point.
    pub samples: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearNode {
    pub id: String,
    pub order_index: usize,
    /// `d` rows of two loadings.
    pub basis: Vec<[f64; 2]>,
    pub coords: Vec<[f64; 2]>,
    pub fidelity_histogram: Histogram,
    pub mean_fidelity: f64,
    /// Pointwise best fidelity over this node's axis-aligned plots.
    pub aggregated_fidelity_histogram: Histogram,
    pub aggregated_mean_fidelity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisNode {
    pub id: String,
    pub dims: AxisPair,
    pub dim_names: [String; 2],
    pub coords: Vec<[f64; 2]>,
    pub fidelity_histogram: Histogram,
    pub mean_fidelity: f64,
    pub mass: f64,
    pub evid: f64,
    pub filtered: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeodesicParams {
    pub start_frame: Vec<[f64; 2]>,
    pub direction_frame: Vec<[f64; 2]>,
    pub angles: [f64; 2],
}

impl GeodesicParams {
    pub fn to_path(&self) -> GeodesicPath {
        GeodesicPath {
            start_frame: from_rows(&self.start_frame),
            direction_frame: from_rows(&self.direction_frame),
            angles: self.angles,
        }
    }
}

impl From<&GeodesicPath> for GeodesicParams {
    fn from(g: &GeodesicPath) -> Self {
        GeodesicParams {
            start_frame: to_rows(&g.start_frame),
            direction_frame: to_rows(&g.direction_frame),
            angles: g.angles,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub id: String,
    pub linear_id: String,
    pub axis_id: String,
    /// Mass `η` this projection gives the pair.
    pub mass: f64,
    pub distortion: f64,
    pub beta: f64,
    pub reused: bool,
    pub filtered: bool,
    pub geodesic: GeodesicParams,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotRecord {
    pub axis_id: String,
    pub pair: AxisPair,
    pub beta: f64,
    pub distortion: f64,
    pub reused: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionRecord {
    pub linear_id: String,
    pub plots: Vec<PlotRecord>,
    pub terminated_by: Termination,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisBundle {
    pub schema_version: u32,
    pub versions: Versions,
    pub config: AnalysisConfig,
    pub dataset: DatasetMeta,
    pub linear_nodes: Vec<LinearNode>,
    /// Ordered as the global pair set (first selection first).
    pub axis_nodes: Vec<AxisNode>,
    pub edges: Vec<Edge>,
    pub decompositions: Vec<DecompositionRecord>,
    pub warnings: Vec<String>,
}

impl AnalysisBundle {
    pub fn linear_node(&self, id: &str) -> Option<&LinearNode> {
        self.linear_nodes.iter().find(|n| n.id == id)
    }

    pub fn axis_node(&self, id: &str) -> Option<&AxisNode> {
        self.axis_nodes.iter().find(|n| n.id == id)
    }

    /// Axis nodes by descending evidence, ties by pair order.
    pub fn ranked_axis_nodes(&self) -> Vec<&AxisNode> {
        let mut nodes: Vec<&AxisNode> = self.axis_nodes.iter().collect();
        nodes.sort_by(|a, b| b.evid.total_cmp(&a.evid).then(a.dims.cmp(&b.dims)));
        nodes
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

fn to_rows(m: &DMatrix<f64>) -> Vec<[f64; 2]> {
    debug_assert_eq!(m.ncols(), 2);
    m.row_iter().map(|r| [r[0], r[1]]).collect()
}

fn from_rows(rows: &[[f64; 2]]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), 2, |i, j| rows[i][j])
}

fn linear_id(j: usize) -> String {
    format!("L{j}")
}

fn axis_id(i: usize) -> String {
    format!("A{i}")
}

/// Loads the configured CSV and runs the analysis on it.
pub fn run_analysis(cfg: &AnalysisConfig) -> Result<AnalysisBundle> {
    cfg.validate()?;
    let raw = Dataset::load_csv(&cfg.input, cfg.label.as_deref())?;
    analyze_dataset(&raw, cfg)
}

/// Runs every stage on an unstandardised dataset.
pub fn analyze_dataset(raw: &Dataset, cfg: &AnalysisConfig) -> Result<AnalysisBundle> {
    cfg.validate()?;
    let (ds, removed) = raw.standardize()?;
    let mut warnings = Vec::new();
    if !removed.is_empty() {
        warnings.push(format!("removed zero-variance columns: {}", removed.join(", ")));
    }
    let n = ds.n();
    cfg.graph_params().validate(n)?;
    let dec_cfg = cfg.decomposition();
    dec_cfg.validate(n)?;

    log::info!("searching {} {} projections", cfg.projections, cfg.objective);
    let search = find_representative_projections(&ds, cfg.graph_params(), &cfg.diversity())?;
    warnings.extend(search.warnings);
    let projections = search.projections;

    log::info!("decomposing {} projections", projections.len());
    let (decompositions, global) = decompose_joint(&ds, &projections, &dec_cfg)?;
    let table = fill_distortion_table(&ds, &projections, &global, dec_cfg.k, cfg.eta0)?;
    let scores = combine_and_normalize(&table);
    if scores.degenerate {
        warnings.push("all distortions are zero; evidence scores are uniform".into());
    }

    let fk = cfg.fidelity_k.min(n - 1);
    if fk != cfg.fidelity_k {
        warnings.push(format!("fidelity k reduced from {} to {fk} (n = {n})", cfg.fidelity_k));
    }
    let full_nn = knn_indices(ds.samples(), fk);
    let bins = cfg.bins;

    let axis_projections: Vec<LinearProjection> = global
        .iter()
        .map(|a| LinearProjection::axis_aligned(ds.d(), a.p(), a.q()))
        .collect();
    let mut axis_reports = Vec::with_capacity(global.len());
    let mut axis_nodes = Vec::with_capacity(global.len());
    for (i, (pair, proj)) in global.iter().zip(&axis_projections).enumerate() {
        let coords = proj.embed(&ds);
        let report = fidelity_from_neighbors(&full_nn, &coords, fk, fk)?;
        let names = ds.dim_names();
        axis_nodes.push(AxisNode {
            id: axis_id(i),
            dims: *pair,
            dim_names: [names[pair.p()].clone(), names[pair.q()].clone()],
            coords: to_rows(&coords),
            fidelity_histogram: build_histogram(&report.per_point, bins)?,
            mean_fidelity: report.mean(),
            mass: scores.mass[i],
            evid: scores.evid[i],
            filtered: scores.evid[i] < cfg.evidence_filter,
        });
        axis_reports.push(report);
    }

    let mut linear_nodes = Vec::with_capacity(projections.len());
    let mut edges = Vec::new();
    let mut records = Vec::with_capacity(decompositions.len());
    for (col, (proj, dec)) in projections.iter().zip(&decompositions).enumerate() {
        let lid = linear_id(proj.order_index);
        let coords = proj.embed(&ds);
        let report = fidelity_from_neighbors(&full_nn, &coords, fk, fk)?;
        let plot_reports: Vec<FidelityReport> = dec
            .plots
            .iter()
            .map(|p| axis_reports[index_of(&global, p.pair)].clone())
            .collect();
        let aggregated = aggregate_max_fidelity(&plot_reports)?;
        linear_nodes.push(LinearNode {
            id: lid.clone(),
            order_index: proj.order_index,
            basis: to_rows(&proj.basis),
            coords: to_rows(&coords),
            fidelity_histogram: build_histogram(&report.per_point, bins)?,
            mean_fidelity: report.mean(),
            aggregated_fidelity_histogram: build_histogram(&aggregated.per_point, bins)?,
            aggregated_mean_fidelity: aggregated.mean(),
        });

        let mut plots = Vec::with_capacity(dec.plots.len());
        for plot in &dec.plots {
            let i = index_of(&global, plot.pair);
            let aid = axis_id(i);
            let geodesic = geodesic_path(proj, &axis_projections[i]);
            edges.push(Edge {
                id: format!("{lid}-{aid}"),
                linear_id: lid.clone(),
                axis_id: aid.clone(),
                mass: scores.per_edge_mass[(i, col)],
                distortion: table.values[(i, col)],
                beta: plot.beta,
                reused: plot.reused,
                filtered: axis_nodes[i].filtered,
                geodesic: GeodesicParams::from(&geodesic),
            });
            plots.push(PlotRecord {
                axis_id: aid,
                pair: plot.pair,
                beta: plot.beta,
                distortion: plot.distortion,
                reused: plot.reused,
            });
        }
        records.push(DecompositionRecord {
            linear_id: lid,
            plots,
            terminated_by: dec.terminated_by,
        });
    }

    let samples = ds.samples().row_iter().map(|r| r.iter().copied().collect()).collect();
    Ok(AnalysisBundle {
        schema_version: SCHEMA_VERSION,
        versions: Versions {
            engine: ENGINE_VERSION.to_string(),
        },
        config: cfg.clone(),
        dataset: DatasetMeta {
            dim_names: ds.dim_names().to_vec(),
            removed_dims: removed,
            labels: ds.labels().map(|l| l.to_vec()),
            samples,
        },
        linear_nodes,
        axis_nodes,
        edges,
        decompositions: records,
        warnings,
    })
}

fn index_of(global: &[AxisPair], pair: AxisPair) -> usize {
    global
        .iter()
        .position(|&g| g == pair)
        .expect("every selected pair is in the global set")
}

pub fn export_bundle(bundle: &AnalysisBundle, path: impl AsRef<Path>) -> Result<()> {
    let mut text = bundle.to_json()?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

pub fn import_bundle(path: impl AsRef<Path>) -> Result<AnalysisBundle> {
    AnalysisBundle::from_json(&fs::read_to_string(path)?)
}
