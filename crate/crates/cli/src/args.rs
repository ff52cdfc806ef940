use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use plap_core::fem2d::DEFAULT_MESH;
use plap_core::params::{
    DEFAULT_EPSILON, DEFAULT_GAP, DEFAULT_INNER_REL_TOL, DEFAULT_MAX_NEWTON_ITERS,
    DEFAULT_MAX_OUTER_ITERS, DEFAULT_OUTER_TOL,
};
use plap_core::radial::DEFAULT_GRID_POINTS;

/// First eigenvalue of the p-Laplacian by inverse iteration.
#[derive(Debug, Parser)]
#[command(name = "plap", version, about, long_about = None)]
pub struct Cli {
    #[command(flatten)]
    pub output: OutputArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    pub format: Format,

    /// Write results here instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Report zero wall time so output is reproducible byte for byte
    #[arg(long, global = true)]
    pub no_timing: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Ball of radius R in dimension N (N = 1 is the interval (-R, R))
    Ball(BallArgs),
    /// Interval of the given length
    Interval(IntervalArgs),
    /// Unit square with Q1 finite elements
    Square(SquareArgs),
    /// One run per p over a range
    Sweep(SweepArgs),
    /// Error of mu_q as q -> p
    Study(StudyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Algorithm {
    /// Lane-Emden iteration from the supersolution
    #[value(name = "1")]
    One,
    /// Normalized iteration from the torsion function
    #[value(name = "2")]
    Two,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GeometryArg {
    Ball,
    Interval,
    Square,
}

#[derive(Debug, Clone, Args)]
pub struct Exponents {
    #[arg(short = 'p')]
    pub p: f64,

    /// Defaults to p - 0.01
    #[arg(short = 'q')]
    pub q: Option<f64>,

    /// Relative sup-norm change that stops the outer iteration
    #[arg(long, default_value_t = DEFAULT_OUTER_TOL)]
    pub tol: f64,

    /// Cap on outer iterations
    #[arg(long, default_value_t = DEFAULT_MAX_OUTER_ITERS)]
    pub max_iters: usize,
}

impl Exponents {
    pub fn q(&self) -> f64 {
        self.q.unwrap_or(self.p - DEFAULT_GAP)
    }
}

#[derive(Debug, Clone, Args)]
pub struct RadialArgs {
    /// Grid points on [0, R] (odd)
    #[arg(long, default_value_t = DEFAULT_GRID_POINTS)]
    pub grid: usize,

    /// Scale of the Lane-Emden iteration; defaults to k_p
    #[arg(long)]
    pub mu: Option<f64>,

    #[arg(long, value_enum, default_value_t = Algorithm::One)]
    pub algorithm: Algorithm,

    /// Write the normalized profile as CSV (r, e_p)
    #[arg(long)]
    pub profile: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct BallArgs {
    #[arg(short = 'N', long = "dim", default_value_t = 2)]
    pub dim: usize,

    #[arg(short = 'R', long, default_value_t = 1.0)]
    pub radius: f64,

    #[command(flatten)]
    pub exponents: Exponents,

    #[command(flatten)]
    pub radial: RadialArgs,
}

#[derive(Debug, Clone, Args)]
pub struct IntervalArgs {
    #[arg(long, default_value_t = 1.0)]
    pub length: f64,

    #[command(flatten)]
    pub exponents: Exponents,

    #[command(flatten)]
    pub radial: RadialArgs,
}

#[derive(Debug, Clone, Args)]
pub struct FemArgs {
    /// Cells per side
    #[arg(long, default_value_t = DEFAULT_MESH)]
    pub mesh: usize,

    /// Regularization of the p-Laplacian
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    pub eps: f64,

    /// Relative residual that stops each Newton solve
    #[arg(long, default_value_t = DEFAULT_INNER_REL_TOL)]
    pub newton_tol: f64,

    #[arg(long, default_value_t = DEFAULT_MAX_NEWTON_ITERS)]
    pub max_newton_iters: usize,
}

#[derive(Debug, Clone, Args)]
pub struct SquareArgs {
    #[command(flatten)]
    pub exponents: Exponents,

    #[command(flatten)]
    pub fem: FemArgs,

    /// Accept q = p (no convergence guarantee)
    #[arg(long)]
    pub experimental: bool,

    /// Write the nodal eigenfunction as CSV (x, y, value)
    #[arg(long)]
    pub dump: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct DomainArgs {
    #[arg(short = 'N', long = "dim", default_value_t = 2)]
    pub dim: usize,

    #[arg(short = 'R', long, default_value_t = 1.0)]
    pub radius: f64,

    #[arg(long, default_value_t = 1.0)]
    pub length: f64,

    /// Grid points for radial geometries
    #[arg(long, default_value_t = DEFAULT_GRID_POINTS)]
    pub grid: usize,

    #[command(flatten)]
    pub fem: FemArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(value_enum)]
    pub geometry: GeometryArg,

    #[command(flatten)]
    pub domain: DomainArgs,

    #[arg(long)]
    pub p_from: f64,

    #[arg(long)]
    pub p_to: f64,

    #[arg(long, default_value_t = 0.1)]
    pub step: f64,

    /// p - q for every row
    #[arg(long, default_value_t = DEFAULT_GAP)]
    pub gap: f64,

    #[arg(long, default_value_t = DEFAULT_OUTER_TOL)]
    pub tol: f64,

    #[arg(long, default_value_t = DEFAULT_MAX_OUTER_ITERS)]
    pub max_iters: usize,
}

#[derive(Debug, Clone, Args)]
pub struct StudyArgs {
    #[arg(value_enum)]
    pub geometry: GeometryArg,

    #[command(flatten)]
    pub domain: DomainArgs,

    #[arg(short = 'p')]
    pub p: f64,

    /// Values of p - q, strictly decreasing
    #[arg(long, value_delimiter = ',', default_value = "1e-1,1e-2,1e-3,1e-4")]
    pub gaps: Vec<f64>,

    /// exact, auto, or a number
    #[arg(long, default_value = "auto")]
    pub reference: String,

    #[arg(long, default_value_t = DEFAULT_OUTER_TOL)]
    pub tol: f64,

    #[arg(long, default_value_t = DEFAULT_MAX_OUTER_ITERS)]
    pub max_iters: usize,
}
