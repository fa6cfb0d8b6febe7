use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "fusionlat",
    version,
    about = "Loss-tolerance simulations of fusion lattices"
)]
pub struct Cli {
    /// Base seed for every random stream.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Directory for CSV/JSON artifacts.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    /// Monte Carlo trials per lattice size (or per point).
    #[arg(long, global = true)]
    pub trials: Option<usize>,
    /// Lattice sides, comma separated, e.g. `16,24,32`.
    #[arg(long, global = true, value_delimiter = ',')]
    pub sizes: Option<Vec<usize>>,
    /// More log output (repeatable).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Spanning probability against the control parameter.
    Sweep(SweepArgs),
    /// Extrapolated percolation threshold.
    Threshold(ThresholdArgs),
    /// Largest-component fraction on periodic lattices.
    ComponentSize(ComponentArgs),
    /// Greedy search for vector sets with lower loss threshold.
    Optimize(OptimizeArgs),
    /// Site/bond thresholds against the embedded reference table.
    ValidateClassical(ValidateArgs),
    /// Stabilizer derivation of rotated fusion on two stars.
    VerifyFusion(VerifyArgs),
    /// Dump the edge list of a lattice.
    BuildLattice(BuildArgs),
    /// Repeat a run recorded in a manifest.
    Rerun(RerunArgs),
}

#[derive(Debug, Args, Clone)]
pub struct LatticeArgs {
    /// Named family: hc, fcc, bcc, fcc+hc, bcc+hc, diamond.
    #[arg(long, conflicts_with = "spec")]
    pub family: Option<String>,
    /// Lattice dimension (required with --family).
    #[arg(long)]
    pub dim: Option<usize>,
    /// JSON lattice document with connection vectors.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub boundary: Option<BoundaryArg>,
}

#[derive(Debug, Clone, Copy, ValueEnum, PartialEq, Eq)]
pub enum BoundaryArg {
    Open,
    Periodic,
}

#[derive(Debug, Args, Clone)]
pub struct ModelArgs {
    /// spin, photon, photon-node, bond or site.
    #[arg(long, default_value = "spin")]
    pub model: String,
    /// Fusion success probability of the fusion models.
    #[arg(long, default_value_t = 0.5)]
    pub p_s: f64,
}

#[derive(Debug, Clone, Copy, ValueEnum, PartialEq, Eq)]
pub enum MethodArg {
    Independent,
    Coupled,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub lattice: LatticeArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Parameter grid `start:stop:step` (η, or p for site/bond).
    #[arg(long, visible_alias = "p")]
    pub eta: String,
    #[arg(long, value_enum, default_value = "independent")]
    pub method: MethodArg,
}

#[derive(Debug, Args)]
pub struct ThresholdArgs {
    #[command(flatten)]
    pub lattice: LatticeArgs,
    #[command(flatten)]
    pub model: ModelArgs,
}

#[derive(Debug, Args)]
pub struct ComponentArgs {
    #[command(flatten)]
    pub lattice: LatticeArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Loss probabilities, comma separated.
    #[arg(long, value_delimiter = ',', conflicts_with = "eta")]
    pub p_loss: Option<Vec<f64>>,
    /// Efficiency grid `start:stop:step`.
    #[arg(long)]
    pub eta: Option<String>,
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    #[arg(long)]
    pub dim: usize,
    /// Largest allowed |z_i| of candidate vectors.
    #[arg(long, default_value_t = 7)]
    pub k_bound: i32,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Threshold evaluations, the initial one included.
    #[arg(long, default_value_t = 200)]
    pub budget: usize,
    /// grow (start from hypercubic) or shrink (start from all candidates).
    #[arg(long, default_value = "grow")]
    pub direction: String,
    /// Significance factor for accepting a move.
    #[arg(long, default_value_t = fusionlat::optimizer::DEFAULT_KAPPA)]
    pub kappa: f64,
    /// Skip the full-fidelity re-evaluation of the result.
    #[arg(long)]
    pub no_final: bool,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Family to check; all families when omitted.
    #[arg(long)]
    pub family: Option<String>,
    /// Dimension to check; every tabulated one when omitted.
    #[arg(long)]
    pub dim: Option<usize>,
    /// site or bond; both when omitted.
    #[arg(long)]
    pub mode: Option<String>,
    /// Pass band in combined standard deviations.
    #[arg(long, default_value_t = 3.0)]
    pub sigmas: f64,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Leaves per star, the fusion leaf included.
    #[arg(long, default_value_t = 3)]
    pub leaves: usize,
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    #[command(flatten)]
    pub lattice: LatticeArgs,
    #[arg(long)]
    pub side: usize,
}

#[derive(Debug, Args)]
pub struct RerunArgs {
    /// Manifest written by an earlier run.
    pub manifest: PathBuf,
}
