use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "qpd",
    version,
    about = "Quasi-probability distributions of accelerated, noisy two-qubit X-states"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the distribution at one point (or one pair of points).
    Eval(EvalArgs),
    /// Evaluate over a two-variable grid and export it.
    Scan(ScanArgs),
    /// Scan over theta and phi and export Cartesian sphere coordinates.
    SphereMap(SphereMapArgs),
    /// Run the self-check suite.
    Validate(ValidateArgs),
    /// Print the tabulated-vs-pipeline coefficient comparison for the ledger inputs.
    Ledger(LedgerArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Q,
    Wigner,
    P,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FaultArg {
    /// Negate the rank-1, M = +1 tensor operator.
    T11Sign,
}

#[derive(Debug, Clone, Args)]
pub struct StateArgs {
    /// singlet | mixed | bell:phi+|phi-|psi+|psi- | werner:c | x:c1,c2,c3
    #[arg(long, default_value = "singlet")]
    pub state: String,

    /// Acceleration parameter r in [0, pi/4] (radians, `pi/4` style literals allowed).
    #[arg(long, conflicts_with = "accel_physical")]
    pub accel: Option<String>,

    /// Physical acceleration as `omega,a,c`; r = arctan(exp(-pi omega c / a)).
    #[arg(long, value_name = "OMEGA,A,C")]
    pub accel_physical: Option<String>,

    /// none | ad:p | bf:p | bpf:p | pf:p
    #[arg(long, default_value = "none")]
    pub channel: String,

    #[arg(long, value_enum, default_value = "wigner")]
    pub kind: KindArg,

    /// Use the tabulated closed-form coefficients instead of the kernel trace.
    #[arg(long)]
    pub closed_form: bool,
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub common: StateArgs,

    #[arg(long, allow_hyphen_values = true)]
    pub theta: String,

    #[arg(long, allow_hyphen_values = true)]
    pub phi: String,

    /// Polar angle for qubit b (defaults to --theta).
    #[arg(long, allow_hyphen_values = true)]
    pub theta_b: Option<String>,

    /// Azimuth for qubit b (defaults to --phi).
    #[arg(long, allow_hyphen_values = true)]
    pub phi_b: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    /// Samples per axis: `N` or `N1,N2`.
    #[arg(long, default_value = "64")]
    pub points: String,

    #[arg(long, value_name = "A:B")]
    pub r_range: Option<String>,

    #[arg(long, value_name = "A:B")]
    pub p_range: Option<String>,

    #[arg(long, value_name = "A:B")]
    pub theta_range: Option<String>,

    #[arg(long, value_name = "A:B")]
    pub phi_range: Option<String>,

    /// Output file (stdout if absent).
    #[arg(long)]
    pub out: Option<PathBuf>,

    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct ScanArgs {
    #[command(flatten)]
    pub common: StateArgs,

    /// Two distinct variables from r, p, theta, phi.
    #[arg(long, value_name = "VAR1,VAR2")]
    pub sweep: String,

    /// Fixed polar angle when theta is not swept.
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<String>,

    /// Fixed azimuth when phi is not swept.
    #[arg(long, allow_hyphen_values = true)]
    pub phi: Option<String>,

    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SphereMapArgs {
    #[command(flatten)]
    pub common: StateArgs,

    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ValidateArgs {
    /// Machine-readable report.
    #[arg(long)]
    pub json: bool,

    /// Run with a deliberate fault to confirm the suite notices it.
    #[arg(long, value_enum, hide = true)]
    pub inject_fault: Option<FaultArg>,

    #[arg(long, default_value_t = 0x5eed)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct LedgerArgs {
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,

    #[arg(long)]
    pub out: Option<PathBuf>,
}
