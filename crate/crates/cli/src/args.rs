use std::path::PathBuf;

use axisdecomp_core::pipeline::AnalysisConfig;
use axisdecomp_core::{Error, Gamma, Objective};
use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "axisdecomp", version, about = "Decompose linear projections into axis-aligned scatterplots")]
pub struct Cli {
    /// More log output (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the analysis on a CSV file and write the JSON bundle.
    Analyze(AnalyzeArgs),
    /// Serve a bundle (and optional UI assets) over HTTP.
    Serve(ServeArgs),
}

#[derive(Debug, Clone, Args)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Class column, required for lde.
    #[arg(long)]
    pub label: Option<String>,
    /// pca, lpp or lde.
    #[arg(long, default_value = "lpp")]
    pub objective: String,
    #[arg(long, default_value_t = 4)]
    pub projections: usize,
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    /// Relative residual below which two embeddings count as affine copies.
    #[arg(long, default_value_t = 0.05)]
    pub redundancy_tol: f64,
    #[arg(long, default_value_t = 10)]
    pub knn: usize,
    /// Heat-kernel width for lpp, or "auto".
    #[arg(long, default_value = "auto")]
    pub gamma: String,
    /// Neighbours per point in the secant system.
    #[arg(long, default_value_t = 10)]
    pub k: usize,
    #[arg(long, default_value_t = 5)]
    pub lmax: usize,
    #[arg(long, default_value_t = 0.9)]
    pub delta: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub lambda: f64,
    #[arg(long, default_value_t = 0.95)]
    pub eta0: f64,
    /// Evidence below which axis nodes and their edges are flagged filtered.
    #[arg(long, default_value_t = 0.05)]
    pub filter: f64,
    #[arg(long, default_value_t = 20)]
    pub bins: usize,
    #[arg(long, default_value_t = 30)]
    pub fidelity_k: usize,
    /// Bundle path; stdout when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

impl AnalyzeArgs {
    pub fn to_config(&self) -> Result<AnalysisConfig, Error> {
        let objective: Objective = self.objective.parse()?;
        let gamma: Gamma = self.gamma.parse()?;
        let mut cfg = AnalysisConfig::new(self.input.clone(), objective);
        cfg.label = self.label.clone();
        cfg.projections = self.projections;
        cfg.alpha = self.alpha;
        cfg.redundancy_tol = self.redundancy_tol;
        cfg.knn = self.knn;
        cfg.gamma = gamma;
        cfg.k = self.k;
        cfg.lmax = self.lmax;
        cfg.delta = self.delta;
        cfg.lambda = self.lambda;
        cfg.eta0 = self.eta0;
        cfg.evidence_filter = self.filter;
        cfg.bins = self.bins;
        cfg.fidelity_k = self.fidelity_k;
        cfg.output = self.output.clone();
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Args)]
pub struct ServeArgs {
    #[arg(long)]
    pub bundle: PathBuf,
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: String,
    /// Directory of static UI files served under `/`.
    #[arg(long)]
    pub assets: Option<PathBuf>,
}
