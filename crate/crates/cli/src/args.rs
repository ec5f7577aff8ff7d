use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cvtele_core::{EntanglementParam, FockCutoff, InputDescriptor, RangeSpec};

use crate::table::Format;

/// Environment variable overriding the default Fock cutoff.
pub const CUTOFF_ENV: &str = "CVTELE_CUTOFF";

/// Continuous-variable teleportation of single photons: figure data,
/// Monte Carlo shots and a verification suite.
#[derive(Debug, Parser)]
#[command(name = "cvtele", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Measurement density P_q(β) on an (x₋, y₊) grid.
    BetaDensity(BetaDensityArgs),
    /// Output photon-number distribution P_q(n), closed form and quadrature.
    PhotonStats(PhotonStatsArgs),
    /// Loss, success and gain probabilities against q.
    LossGain(SweepArgs),
    /// Joint densities P_q(n, β) against |β|.
    Conditional(ConditionalArgs),
    /// Polarization-qubit error budget against q.
    Polarization(SweepArgs),
    /// Seeded Monte Carlo teleportation shots.
    Sample(SampleArgs),
    /// Run the oracle and closed-form cross-checks.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct CutoffArgs {
    /// Highest retained Fock level.
    #[arg(long, env = CUTOFF_ENV, default_value_t = FockCutoff::default())]
    pub cutoff: FockCutoff,
}

#[derive(Debug, Clone, Args)]
pub struct BetaDensityArgs {
    #[arg(long, default_value = "0.5")]
    pub q: EntanglementParam,
    /// Range for both axes, start:end:step.
    #[arg(long, default_value = "-4:4:0.1", allow_hyphen_values = true)]
    pub range: RangeSpec,
    /// Overrides --range for x₋.
    #[arg(long, allow_hyphen_values = true)]
    pub x_range: Option<RangeSpec>,
    /// Overrides --range for y₊.
    #[arg(long, allow_hyphen_values = true)]
    pub y_range: Option<RangeSpec>,
    /// Input state, fock:N or coherent:RE,IM.
    #[arg(long, default_value = "fock:1")]
    pub input: InputDescriptor,
    #[command(flatten)]
    pub cutoff: CutoffArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct PhotonStatsArgs {
    #[arg(long, default_value = "0.5")]
    pub q: EntanglementParam,
    /// Largest photon number tabulated.
    #[arg(long, default_value_t = 10)]
    pub max_n: usize,
    #[command(flatten)]
    pub cutoff: CutoffArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    /// start:end:step
    #[arg(long, default_value = "0:0.99:0.01", allow_hyphen_values = true)]
    pub q_range: RangeSpec,
    /// Add quadrature columns next to the closed forms.
    #[arg(long)]
    pub quadrature: bool,
    #[command(flatten)]
    pub cutoff: CutoffArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ConditionalArgs {
    #[arg(long, default_value = "0.5")]
    pub q: EntanglementParam,
    /// |β| range, start:end:step.
    #[arg(long, default_value = "0:4:0.01", allow_hyphen_values = true)]
    pub r_range: RangeSpec,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SampleArgs {
    #[arg(long, default_value = "0.5")]
    pub q: EntanglementParam,
    #[arg(long, default_value_t = 100_000)]
    pub shots: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Input state, fock:N or coherent:RE,IM.
    #[arg(long, default_value = "fock:1")]
    pub input: InputDescriptor,
    #[command(flatten)]
    pub cutoff: CutoffArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Level {
    /// Operator-equivalence grid and closed-form identities.
    Fast,
    /// Adds quadrature and Monte Carlo checks.
    Full,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = Level::Fast)]
    pub level: Level,
}
