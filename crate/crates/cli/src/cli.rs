use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::output::Format;
use crate::params::{Beta, SubsetSpec};

#[derive(Debug, Parser)]
#[command(name = "fermionic-entropy", version, about = "Entropies of quasi-free fermionic states")]
pub struct Cli {
    /// TOML file with global options and per-command tables.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Seed for the ChaCha8 generator.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Row file format.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Von Neumann, Rényi and subsystem entropies of a density matrix file.
    Entropy(EntropyArgs),
    /// Rényi entropies of a density matrix file.
    Renyi(RenyiArgs),
    /// Relative entropy of one density with respect to another.
    Relative(RelativeArgs),
    /// Compares the one-particle formulas with exact Fock-space results.
    OracleCheck(OracleArgs),
    /// Kitaev chain Gaussian states and subsystem entropies.
    Kitaev(KitaevArgs),
    /// Lattice causal fermion system built from a particle-number preserving state.
    Cfs(CfsArgs),
    /// Causal-diamond entropy sweep of the regularized Dirac sea.
    Diamond(DiamondArgs),
    /// Writes a seeded random density matrix file.
    RandomDensity(RandomDensityArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Entropy(_) => "entropy",
            Command::Renyi(_) => "renyi",
            Command::Relative(_) => "relative",
            Command::OracleCheck(_) => "oracle-check",
            Command::Kitaev(_) => "kitaev",
            Command::Cfs(_) => "cfs",
            Command::Diamond(_) => "diamond",
            Command::RandomDensity(_) => "random-density",
        }
    }
}

#[derive(Args, Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct EntropyArgs {
    /// Density matrix file.
    #[arg(long)]
    pub matrix: Option<PathBuf>,
    /// Rényi orders to report as well.
    #[arg(long, value_delimiter = ',')]
    pub renyi: Option<Vec<f64>>,
    /// Subsystems, e.g. `0,1;2,3`.
    #[arg(long)]
    pub subsystem: Option<SubsetSpec>,
    /// Also report the modular spectrum.
    #[arg(long)]
    pub modular: Option<bool>,
}

#[derive(Args, Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RenyiArgs {
    #[arg(long)]
    pub matrix: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    pub kappa: Option<Vec<f64>>,
}

#[derive(Args, Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RelativeArgs {
    /// The state `D̃`.
    #[arg(long)]
    pub matrix: Option<PathBuf>,
    /// The reference state `D`.
    #[arg(long)]
    pub reference: Option<PathBuf>,
}

#[derive(Args, Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct OracleArgs {
    #[arg(long)]
    pub modes: Option<usize>,
    #[arg(long)]
    pub trials: Option<usize>,
    /// Largest deviation that passes.
    #[arg(long)]
    pub tolerance: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryArg {
    Open,
    Periodic,
}

#[derive(Args, Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct KitaevArgs {
    #[arg(long)]
    pub sites: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub mu: Option<f64>,
    /// Hopping amplitude.
    #[arg(long, allow_hyphen_values = true)]
    pub hopping: Option<f64>,
    /// Pairing amplitude.
    #[arg(long, allow_hyphen_values = true)]
    pub delta: Option<f64>,
    /// Inverse temperature, `inf` for the ground state.
    #[arg(long)]
    pub beta: Option<Beta>,
    #[arg(long, value_enum)]
    pub boundary: Option<BoundaryArg>,
    /// `all`, `contiguous`, `singletons` or explicit sets `0,1;3`.
    #[arg(long)]
    pub subsets: Option<SubsetSpec>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum StateKind {
    Pure,
    Mixed,
}

#[derive(Args, Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct CfsArgs {
    /// Density matrix file; a seeded random state is used otherwise.
    #[arg(long)]
    pub matrix: Option<PathBuf>,
    #[arg(long)]
    pub sites: Option<usize>,
    #[arg(long, value_enum)]
    pub state: Option<StateKind>,
    /// Number of occupied modes of a random pure state.
    #[arg(long)]
    pub filling: Option<usize>,
    #[arg(long)]
    pub subsets: Option<SubsetSpec>,
}

#[derive(Args, Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct DiamondArgs {
    #[arg(long)]
    pub mass: Option<f64>,
    /// Diamond width.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Largest regularization length of the ladder.
    #[arg(long)]
    pub eps_max: Option<f64>,
    /// Smallest regularization length of the ladder.
    #[arg(long)]
    pub eps_min: Option<f64>,
    /// Geometric ratio between ladder rungs.
    #[arg(long)]
    pub ratio: Option<f64>,
    /// Explicit descending ladder; overrides the geometric one.
    #[arg(long, value_delimiter = ',')]
    pub epsilons: Option<Vec<f64>>,
    /// Grid margin on each side of the diamond (default 5/m).
    #[arg(long)]
    pub half_width: Option<f64>,
    #[arg(long)]
    pub points_per_epsilon: Option<f64>,
    /// Momentum cutoff times ε.
    #[arg(long)]
    pub cutoff_factor: Option<f64>,
    #[arg(long)]
    pub k_points: Option<usize>,
    /// Recompute every point with doubled domain and halved step.
    #[arg(long)]
    pub convergence: Option<bool>,
    #[arg(long)]
    pub convergence_tol: Option<f64>,
    /// Ladder points evaluated at the same time.
    #[arg(long)]
    pub max_concurrent: Option<usize>,
}

#[derive(Args, Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RandomDensityArgs {
    #[arg(long)]
    pub dim: Option<usize>,
    /// Spectrum is drawn uniformly from `[lo, hi]`.
    #[arg(long)]
    pub lo: Option<f64>,
    #[arg(long)]
    pub hi: Option<f64>,
    /// Matrix file to write.
    #[arg(long)]
    pub output: Option<PathBuf>,
}
