use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "polyflow", version, about = "Damped hyperbolic polyharmonic flows of closed polygons")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the operator spectrum and damping regimes.
    Eigen(EigenArgs),
    /// Evolve a polygon in closed form.
    Evolve(EvolveArgs),
    /// Flow a polygon towards a fixed or moving target.
    Yau(YauArgs),
    /// Construct a self-similar solution and report its residual.
    Selfsim(SelfsimArgs),
    /// Compare closed forms against the RK4 integrator.
    Verify(VerifyArgs),
    /// Render a trajectory CSV to SVG.
    Render(RenderArgs),
}

#[derive(Debug, Args)]
pub struct EigenArgs {
    #[arg(short = 'n', long)]
    pub n: usize,
    #[arg(short = 'm', long, default_value_t = 1)]
    pub m: u32,
    /// Damping; adds regime and decay-rate columns.
    #[arg(short = 'b', long)]
    pub beta: Option<f64>,
}

/// Time grid and output files shared by the trajectory commands.
#[derive(Debug, Args)]
pub struct Sampling {
    #[arg(long, default_value_t = 30.0)]
    pub t_end: f64,
    /// Uniform samples on [0, t-end], both ends included.
    #[arg(long, default_value_t = 60)]
    pub samples: usize,
    /// Trajectory CSV; stdout when omitted.
    #[arg(short = 'o', long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ClosureMode {
    /// Start at rest.
    ZeroVelocity,
    /// All free constants zero.
    ZeroConstants,
    /// Pass through `--through` at time `--at`.
    TwoPoint,
    /// Free constants from `--constants` or initial velocity from `--velocity`.
    Explicit,
}

#[derive(Debug, Args)]
pub struct EvolveArgs {
    #[arg(short = 'i', long)]
    pub input: PathBuf,
    #[arg(short = 'm', long, default_value_t = 1)]
    pub m: u32,
    #[arg(short = 'b', long, default_value_t = 0.0)]
    pub beta: f64,
    #[arg(long, value_enum, default_value_t = ClosureMode::ZeroVelocity)]
    pub closure: ClosureMode,
    #[arg(long)]
    pub at: Option<f64>,
    #[arg(long)]
    pub through: Option<PathBuf>,
    #[arg(long, conflicts_with = "velocity")]
    pub constants: Option<PathBuf>,
    #[arg(long)]
    pub velocity: Option<PathBuf>,
    /// Write recentred, rescaled frames and a limit-shape report.
    #[arg(long)]
    pub rescale: bool,
    /// Limit-shape report path; stderr when omitted.
    #[arg(long, requires = "rescale")]
    pub report: Option<PathBuf>,
    #[command(flatten)]
    pub sampling: Sampling,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Reconcile {
    Duplicate,
    Subdivide,
}

#[derive(Debug, Args)]
pub struct YauArgs {
    #[arg(short = 'i', long)]
    pub input: PathBuf,
    /// Fixed target polygon.
    #[arg(long, required_unless_present = "moving", conflicts_with = "moving")]
    pub target: Option<PathBuf>,
    /// Moving target as a frame sequence.
    #[arg(long)]
    pub moving: Option<PathBuf>,
    #[arg(short = 'm', long, default_value_t = 1)]
    pub m: u32,
    #[arg(short = 'b', long, default_value_t = 4.0)]
    pub beta: f64,
    /// Required when source and target vertex counts differ.
    #[arg(long, value_enum)]
    pub reconcile: Option<Reconcile>,
    #[arg(long, requires = "at")]
    pub waypoint: Option<PathBuf>,
    #[arg(long, requires = "waypoint")]
    pub at: Option<f64>,
    /// Keep the limit a translate of the target instead of the target itself.
    #[arg(long)]
    pub no_exact_limit: bool,
    /// Accept beta = 0, which oscillates about the target.
    #[arg(long)]
    pub allow_non_convergent: bool,
    /// Quadrature step for moving targets.
    #[arg(long, default_value_t = 1e-3)]
    pub step: f64,
    /// Distance-to-target series CSV.
    #[arg(long)]
    pub distance: Option<PathBuf>,
    #[command(flatten)]
    pub sampling: Sampling,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SelfsimKind {
    Scale,
    Rotate,
    Translate,
}

#[derive(Debug, Args)]
pub struct SelfsimArgs {
    #[arg(value_enum)]
    pub kind: SelfsimKind,
    #[arg(short = 'n', long, default_value_t = 5)]
    pub n: usize,
    #[arg(short = 'k', long, default_value_t = 1)]
    pub k: usize,
    #[arg(short = 'm', long, default_value_t = 1)]
    pub m: u32,
    #[arg(short = 'b', long, default_value_t = 0.0)]
    pub beta: f64,
    /// Profile constant for `scale`.
    #[arg(short = 'c', long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub c: f64,
    #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
    pub sign: i8,
    /// Rotation plane as 1-based axes, e.g. `1,3`.
    #[arg(long, value_parser = parse_axes)]
    pub plane: Option<(usize, usize)>,
    /// Ambient dimension for `--plane`.
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    /// Translation direction, comma separated.
    #[arg(long, default_value = "1,0", allow_hyphen_values = true)]
    pub direction: String,
    /// Candidate polygon for `translate`.
    #[arg(short = 'i', long)]
    pub input: Option<PathBuf>,
    #[arg(long, default_value_t = 3.0)]
    pub t_end: f64,
    #[arg(long, default_value_t = 60)]
    pub samples: usize,
    #[arg(short = 'o', long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 1e-4)]
    pub dt: f64,
    /// Overridden by POLYFLOW_SEED.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 3.0)]
    pub t_end: f64,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    #[arg(short = 'i', long)]
    pub input: PathBuf,
    #[arg(short = 'o', long)]
    pub output: PathBuf,
    /// Axes to draw as 1-based indices, e.g. `1,3`.
    #[arg(long, value_parser = parse_axes)]
    pub project: Option<(usize, usize)>,
    /// Frame time drawn with the waypoint class; defaults to the CSV metadata.
    #[arg(long)]
    pub waypoint_time: Option<f64>,
    /// Target polygon drawn with the target class.
    #[arg(long)]
    pub target: Option<PathBuf>,
}

/// `"i,j"` with 1-based axes, returned 0-based.
pub fn parse_axes(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected two axes like 1,3, got {s:?}"))?;
    let axis = |t: &str| match t.trim().parse::<usize>() {
        Ok(i) if i >= 1 => Ok(i - 1),
        _ => Err(format!("axes are 1-based integers, got {t:?}")),
    };
    let (i, j) = (axis(a)?, axis(b)?);
    if i == j {
        return Err("axes must differ".into());
    }
    Ok((i, j))
}
