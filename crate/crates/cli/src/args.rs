use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "grassfoil", version, about = "Grassmannian airfoil and blade shape pipeline")]
pub struct Cli {
    /// Log level (error, warn, info, debug, trace).
    #[arg(long, global = true, default_value = "warn")]
    pub log_level: String,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "subcommand", rename_all = "kebab-case")]
pub enum Command {
    /// Generate the CST baseline + perturbation dataset.
    GenDataset(GenDatasetArgs),
    /// LA-standardize coordinate files into representatives and affine maps.
    Standardize(StandardizeArgs),
    /// Karcher mean of a dataset on the Grassmannian.
    Mean(MeanArgs),
    /// Fit a PGA model (Karcher mean + r principal directions).
    PgaFit(PgaFitArgs),
    /// Synthesize a shape from normal coordinates.
    Synth(SynthArgs),
    /// Random corner-to-corner sweeps through the PGA or CST design box.
    Sweep(SweepArgs),
    /// Interpolate a blade definition into a wireframe.
    BladeInterp(BladeInterpArgs),
    /// Apply a consistent PGA (and optional affine) perturbation to a blade.
    BladePerturb(BladePerturbArgs),
    /// Render coordinate files, wireframes or coordinate scatter plots as SVG.
    Render(RenderArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct GenDatasetArgs {
    /// Number of synthetic baselines to use (1-16).
    #[arg(long, default_value_t = 16, value_parser = clap::value_parser!(u64).range(1..=16))]
    pub baselines: u64,
    /// Total number of perturbations spread over the baselines.
    #[arg(long, conflicts_with = "per_baseline")]
    pub total: Option<usize>,
    /// Number of perturbations per baseline instead of a total.
    #[arg(long)]
    pub per_baseline: Option<usize>,
    /// Relative coefficient perturbation bound.
    #[arg(long, default_value_t = 0.2)]
    pub fraction: f64,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// Landmarks per shape (odd, at least 7).
    #[arg(long, default_value_t = grassfoil::geometry::DEFAULT_LANDMARKS)]
    pub n: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct DatasetInput {
    /// Dataset directory written by gen-dataset.
    #[arg(long, required_unless_present = "input")]
    pub dataset: Option<PathBuf>,
    /// Coordinate files (alternative to --dataset).
    #[arg(long, num_args = 1.., conflicts_with = "dataset")]
    pub input: Vec<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct StandardizeArgs {
    #[command(flatten)]
    pub source: DatasetInput,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct KarcherOptions {
    /// Gradient-norm tolerance (default from GRASSFOIL_KARCHER_TOL or 1e-10).
    #[arg(long)]
    pub tol: Option<f64>,
    /// Iteration cap (default from GRASSFOIL_KARCHER_MAX_ITER or 200).
    #[arg(long)]
    pub max_iter: Option<usize>,
}

#[derive(Debug, Args, Serialize)]
pub struct MeanArgs {
    #[command(flatten)]
    pub source: DatasetInput,
    #[command(flatten)]
    pub karcher: KarcherOptions,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct PgaFitArgs {
    #[command(flatten)]
    pub source: DatasetInput,
    #[command(flatten)]
    pub karcher: KarcherOptions,
    /// Number of principal directions to keep.
    #[arg(long, default_value_t = 4)]
    pub r: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct SynthArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Normal coordinates, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub t: Vec<f64>,
    /// Write the orthonormal representative instead of the shape rendered
    /// with the model's reference affine map.
    #[arg(long)]
    pub representative: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Corners {
    Random,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum SweepSpace {
    Pga,
    Cst,
}

#[derive(Debug, Args, Serialize)]
pub struct SweepArgs {
    /// PGA model file (required for --space pga).
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Dataset directory (required for --space cst).
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = SweepSpace::Pga)]
    pub space: SweepSpace,
    #[arg(long, value_enum, default_value_t = Corners::Random)]
    pub corners: Corners,
    #[arg(long, default_value_t = 4)]
    pub count: usize,
    #[arg(long, default_value_t = 20)]
    pub steps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct BladeInterpArgs {
    #[arg(long)]
    pub blade: PathBuf,
    /// Number of uniformly spaced span positions.
    #[arg(long, default_value_t = 50)]
    pub spans: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct BladePerturbArgs {
    #[arg(long)]
    pub blade: PathBuf,
    #[arg(long)]
    pub model: PathBuf,
    /// Submanifold (normal) coordinates, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub t: Vec<f64>,
    /// Affine knobs (twist, chord, thickness, shear, shift-x, shift-y).
    #[arg(long, value_delimiter = ',')]
    pub knobs: Vec<String>,
    /// One value per knob, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub knob_values: Vec<f64>,
    /// Span positions in the exported wireframe.
    #[arg(long, default_value_t = 50)]
    pub spans: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum RenderKind {
    /// Coordinate files, one closed outline each.
    Shapes,
    /// A wireframe CSV: planform (x against span) and stacked sections.
    Wireframe,
    /// A normal-coordinate CSV: two chosen coordinates against each other.
    Scatter,
}

#[derive(Debug, Args, Serialize)]
pub struct RenderArgs {
    #[arg(long, value_enum)]
    pub kind: RenderKind,
    #[arg(long, num_args = 1.., required = true)]
    pub input: Vec<PathBuf>,
    /// Scatter x coordinate (1-based).
    #[arg(long, default_value_t = 1)]
    pub x: usize,
    /// Scatter y coordinate (1-based).
    #[arg(long, default_value_t = 2)]
    pub y: usize,
    /// Output SVG file.
    #[arg(long)]
    pub out: PathBuf,
}
