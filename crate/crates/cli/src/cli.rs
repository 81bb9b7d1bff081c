use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use opertone::frechet::Engine;
use opertone::funcalc::CalcPath;
use opertone::verify::{Cone, Direction, Flavor, HalfPlanePart};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(name = "opertone", version, about = "Matrix functional calculus and operator k-tone checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a seeded verification campaign and print CheckReport JSON.
    Verify(VerifyArgs),
    /// Evaluate f(X) for a non-Hermitian matrix X.
    Funcalc(FuncalcArgs),
    /// Directional derivative D^m f(A; B).
    Frechet(FrechetArgs),
    /// Search for a counterexample to one of the scalar or 2x2 statements.
    Counterexample(CounterArgs),
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// JSON campaign config; flags below override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub spec: Option<String>,
    #[arg(long, value_enum)]
    pub check: Option<CheckName>,
    /// Tone order (derivative-sign, taylor-remainder, branch, sandwich).
    #[arg(long)]
    pub k: Option<usize>,
    /// Sector opening, 0 < p <= 1.
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long, value_enum)]
    pub part: Option<PartArg>,
    #[arg(long, value_enum)]
    pub cone: Option<ConeArg>,
    #[arg(long, value_enum)]
    pub direction: Option<DirectionArg>,
    #[arg(long, value_enum)]
    pub flavor: Option<FlavorArg>,
    /// Sample Hermitian rather than PSD directions (branches with k = 0, 2 mod 4).
    #[arg(long)]
    pub hermitian_b: bool,
    /// Override the certified classes: `ktone:K`, `monotone`, `decreasing` or `convex`.
    #[arg(long)]
    pub claim: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Comma separated dimensions, e.g. `2,3,4`.
    #[arg(long, value_delimiter = ',')]
    pub dims: Option<Vec<usize>>,
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long, value_enum)]
    pub engine: Option<EngineArg>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Emit a flat margin table instead of JSON.
    #[arg(long)]
    pub csv: bool,
    #[arg(long)]
    pub no_timestamp: bool,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FuncalcArgs {
    #[arg(long)]
    pub spec: String,
    /// Matrix JSON `{"n", "re", "im"}`.
    #[arg(long)]
    pub matrix: PathBuf,
    #[arg(long, value_enum, default_value_t = PathArg::Auto)]
    pub path: PathArg,
    /// Run both paths and report their difference.
    #[arg(long)]
    pub compare: bool,
}

#[derive(Debug, Args)]
pub struct FrechetArgs {
    #[arg(long)]
    pub spec: String,
    /// Hermitian base point.
    #[arg(long)]
    pub a: PathBuf,
    /// Hermitian direction.
    #[arg(long)]
    pub b: PathBuf,
    /// Derivative order m.
    #[arg(long, short = 'm', default_value_t = 1)]
    pub order: usize,
    #[arg(long, value_enum, default_value_t = EngineArg::Divided)]
    pub engine: EngineArg,
}

#[derive(Debug, Args)]
pub struct CounterArgs {
    #[arg(long, value_enum)]
    pub kind: CounterKindArg,
    /// Exponent for the scalar searches.
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long, default_value_t = 10_000)]
    pub budget: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckName {
    DerivativeSign,
    TaylorRemainder,
    Branch,
    Pick,
    HalfPlane,
    SectorMap,
    Sandwich,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EngineArg {
    Contour,
    Divided,
    Fd,
    Closed,
}

impl From<EngineArg> for Engine {
    fn from(e: EngineArg) -> Self {
        match e {
            EngineArg::Contour => Engine::Contour,
            EngineArg::Divided => Engine::DividedDiff,
            EngineArg::Fd => Engine::FiniteDiff,
            EngineArg::Closed => Engine::ClosedForm,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PathArg {
    Auto,
    Eigen,
    Contour,
}

impl From<PathArg> for CalcPath {
    fn from(p: PathArg) -> Self {
        match p {
            PathArg::Auto => CalcPath::Auto,
            PathArg::Eigen => CalcPath::Eigen,
            PathArg::Contour => CalcPath::Contour,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PartArg {
    Monotone,
    Decreasing,
    LowerHalf,
    Log,
}

impl From<PartArg> for HalfPlanePart {
    fn from(p: PartArg) -> Self {
        match p {
            PartArg::Monotone => HalfPlanePart::Monotone,
            PartArg::Decreasing => HalfPlanePart::Decreasing,
            PartArg::LowerHalf => HalfPlanePart::LowerHalf,
            PartArg::Log => HalfPlanePart::Log,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConeArg {
    Positive,
    Negative,
}

impl From<ConeArg> for Cone {
    fn from(c: ConeArg) -> Self {
        match c {
            ConeArg::Positive => Cone::Positive,
            ConeArg::Negative => Cone::Negative,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DirectionArg {
    Monotone,
    Decreasing,
}

impl From<DirectionArg> for Direction {
    fn from(d: DirectionArg) -> Self {
        match d {
            DirectionArg::Monotone => Direction::Monotone,
            DirectionArg::Decreasing => Direction::Decreasing,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FlavorArg {
    Monotone,
    Convex,
}

impl From<FlavorArg> for Flavor {
    fn from(f: FlavorArg) -> Self {
        match f {
            FlavorArg::Monotone => Flavor::Monotone,
            FlavorArg::Convex => Flavor::Convex,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CounterKindArg {
    /// `Im (a+ib)^p < 0` with `a, b > 0`.
    PowerIm,
    /// `Re (a+ib)^p > a^p` with `a, b > 0`.
    PowerRe,
    /// 2x2 positive definite `A, B` with `AB + BA` indefinite.
    Anticommutator,
}
