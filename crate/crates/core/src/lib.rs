//! Diverse structure-preserving linear projections of tabular data and their
//! decomposition into evidence-ranked axis-aligned scatterplots.
//!
//! The stages run in order: [`dataset`] loads and standardises a CSV,
//! [`graph_embedding`] finds a set of mutually different 2D projections,
//! [`decomposition`] explains each by a few axis pairs, [`evidence`] ranks
//! those pairs, [`quality`] scores every view, and [`pipeline`] ties it all
//! together into a JSON bundle.

pub mod dataset;
pub mod decomposition;
pub mod error;
pub mod evidence;
pub mod graph_embedding;
pub mod grassmann;
pub mod linalg;
pub mod pipeline;
pub mod quality;

pub use dataset::Dataset;
pub use decomposition::{Decomposition, DecompositionConfig, SecantSystem, SelectedPlot, Termination};
pub use error::{Error, Result};
pub use evidence::{DistortionTable, EvidenceScores};
pub use graph_embedding::{DiversityConfig, Gamma, GraphPair, GraphParams, LinearProjection, Objective};
pub use grassmann::{AxisPair, GeodesicPath};
pub use pipeline::{AnalysisBundle, AnalysisConfig};
pub use quality::{FidelityReport, Histogram};
pub use nalgebra;
