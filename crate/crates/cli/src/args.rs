//! Command-line grammar.

use clap::{Args, Parser, Subcommand, ValueEnum};

use normconc::bounds::BoundMethod;

#[derive(Parser)]
#[command(
    name = "conc-bounds",
    version,
    about = "Compute, compare, and empirically certify sub-Gaussian norm-concentration bounds"
)]
pub struct Cli {
    /// Output format for records on stdout.
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Json)]
    pub format: FormatArg,

    /// Seed for the randomized verification suites (default 0).
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Treat inconclusive verdicts as failures.
    #[arg(long, global = true)]
    pub strict: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Json,
    Csv,
}

#[derive(Subcommand)]
pub enum Command {
    /// Evaluate the sphere-averaged MGF: log φₙ(z) and φₙ(z).
    Phi(PhiArgs),
    /// Compute a concentration radius for one method, or all of them.
    Bound(BoundArgs),
    /// Evaluate every applicable vector method on one parameter set.
    Compare(CompareArgs),
    /// Render a method comparison across a δ or n sweep as CSV.
    Table(TableArgs),
    /// Run a verification suite; exit 0 iff every check passes.
    Verify(VerifyArgs),
}

#[derive(Args)]
pub struct PhiArgs {
    /// Ambient dimension n ≥ 1.
    #[arg(long)]
    pub n: u32,
    /// Argument z = λ‖x‖ ≥ 0.
    #[arg(long)]
    pub z: f64,
}

#[derive(Args)]
pub struct BoundArgs {
    #[command(subcommand)]
    pub kind: BoundKind,
}

#[derive(Subcommand)]
pub enum BoundKind {
    /// Euclidean-norm radius for a sub-Gaussian vector.
    Vector(VectorBoundArgs),
    /// Operator-norm radius for a sub-Gaussian matrix.
    Matrix(MatrixBoundArgs),
}

#[derive(Args)]
pub struct VectorBoundArgs {
    #[arg(long, value_enum)]
    pub method: VectorMethodArg,
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub sigma: f64,
    #[arg(long)]
    pub delta: f64,
    /// ε in (0,1), or `auto` to optimize it (eps_net, thm2 only).
    #[arg(long, value_parser = parse_eps)]
    pub eps: Option<EpsArg>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VectorMethodArg {
    Scalar,
    #[value(name = "eps_net")]
    EpsNet,
    Thm2,
    Thm3,
    Hkz,
    All,
}

#[derive(Args)]
pub struct MatrixBoundArgs {
    /// Row count m ≥ 1.
    #[arg(long)]
    pub m: u32,
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub sigma: f64,
    #[arg(long)]
    pub delta: f64,
    /// ε in (0,1), or `auto` to optimize it.
    #[arg(long, value_parser = parse_eps)]
    pub eps: EpsArg,
}

#[derive(Args)]
pub struct CompareArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub sigma: f64,
    #[arg(long)]
    pub delta: f64,
    /// Fixed ε for the covering bound; optimized when absent.
    #[arg(long, value_parser = parse_eps)]
    pub eps: Option<EpsArg>,
}

#[derive(Args)]
pub struct TableArgs {
    #[arg(long)]
    pub sigma: f64,
    /// Fixed ε for the covering bound; optimized when absent.
    #[arg(long, value_parser = parse_eps)]
    pub eps: Option<EpsArg>,
    /// Fixed dimension for a δ sweep (pairs with --deltas).
    #[arg(long)]
    pub n: Option<u32>,
    /// Comma-separated δ values to sweep.
    #[arg(long, value_delimiter = ',')]
    pub deltas: Option<Vec<f64>>,
    /// Fixed δ for an n sweep (pairs with --ns).
    #[arg(long)]
    pub delta: Option<f64>,
    /// Comma-separated dimensions to sweep.
    #[arg(long, value_delimiter = ',')]
    pub ns: Option<Vec<u32>>,
}

#[derive(Args)]
pub struct VerifyArgs {
    #[command(subcommand)]
    pub suite: Suite,
}

#[derive(Subcommand)]
pub enum Suite {
    /// Certify the exponential-growth lower bound on a z grid.
    Lemma1(Lemma1Args),
    /// Check d/dz log φₙ against the Bessel ratio by finite differences.
    Deriv(DerivArgs),
    /// Compare the Monte Carlo φₙ estimator with quadrature.
    Amgf(AmgfArgs),
    /// Check the defining directional MGF bound on random directions.
    Mgf(MgfArgs),
    /// Empirical coverage of a bound radius at level 1 − δ.
    Coverage(CoverageArgs),
    /// Matrix suite: exponential growth plus operator-norm coverage.
    Matrix(MatrixArgs),
}

#[derive(Args)]
pub struct Lemma1Args {
    #[arg(long)]
    pub n: u32,
    /// ε in (0,1) at which the lower bound is evaluated.
    #[arg(long)]
    pub eps: f64,
    #[arg(long, default_value_t = 100.0)]
    pub zmax: f64,
    /// Number of z grid points on [0, zmax].
    #[arg(long, default_value_t = 200)]
    pub grid: u32,
}

#[derive(Args)]
pub struct DerivArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long, default_value_t = 0.1)]
    pub zmin: f64,
    #[arg(long, default_value_t = 50.0)]
    pub zmax: f64,
    #[arg(long, default_value_t = 100)]
    pub grid: u32,
}

#[derive(Args)]
pub struct AmgfArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub z: f64,
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
}

#[derive(Args)]
pub struct MgfArgs {
    #[arg(long, value_enum)]
    pub dist: DistArg,
    #[arg(long)]
    pub n: u32,
    /// Row count, for --dist gaussian_matrix.
    #[arg(long)]
    pub m: Option<u32>,
    /// Scale: σ for Gaussian families, the bound a for bounded ones.
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    #[arg(long)]
    pub lambda: f64,
    #[arg(long, default_value_t = 20)]
    pub directions: u32,
    /// Samples per direction.
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
}

#[derive(Args)]
pub struct CoverageArgs {
    #[arg(long, value_enum)]
    pub dist: DistArg,
    #[arg(long)]
    pub n: u32,
    /// Row count, for --dist gaussian_matrix.
    #[arg(long)]
    pub m: Option<u32>,
    /// Scale: σ for Gaussian families, the bound a for bounded ones.
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    #[arg(long, value_enum)]
    pub method: MethodArg,
    #[arg(long)]
    pub delta: f64,
    /// ε in (0,1), or `auto`, for the parameterized methods.
    #[arg(long, value_parser = parse_eps)]
    pub eps: Option<EpsArg>,
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
}

#[derive(Args)]
pub struct MatrixArgs {
    #[arg(long, default_value_t = 3)]
    pub m: u32,
    #[arg(long, default_value_t = 4)]
    pub n: u32,
    /// Number of random matrices for the exponential-growth check.
    #[arg(long, default_value_t = 20)]
    pub count: u32,
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    /// Sphere-pair samples per matrix.
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 0.01)]
    pub delta: f64,
    #[arg(long = "coverage-samples", default_value_t = 10_000)]
    pub coverage_samples: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DistArg {
    Gaussian,
    Rademacher,
    #[value(name = "bounded_uniform")]
    BoundedUniform,
    #[value(name = "gaussian_matrix")]
    GaussianMatrix,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Scalar,
    #[value(name = "eps_net")]
    EpsNet,
    Thm2,
    Thm3,
    Hkz,
    #[value(name = "matrix_thm4")]
    MatrixThm4,
}

impl MethodArg {
    pub fn method(self) -> BoundMethod {
        match self {
            MethodArg::Scalar => BoundMethod::Scalar,
            MethodArg::EpsNet => BoundMethod::EpsNet,
            MethodArg::Thm2 => BoundMethod::Thm2,
            MethodArg::Thm3 => BoundMethod::Thm3,
            MethodArg::Hkz => BoundMethod::Hkz,
            MethodArg::MatrixThm4 => BoundMethod::MatrixThm4,
        }
    }
}

/// `--eps` accepts a number in (0,1) or the literal `auto`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EpsArg {
    Auto,
    Fixed(f64),
}

pub fn parse_eps(s: &str) -> Result<EpsArg, String> {
    if s.eq_ignore_ascii_case("auto") {
        return Ok(EpsArg::Auto);
    }
    s.parse::<f64>()
        .map(EpsArg::Fixed)
        .map_err(|_| format!("expected a number or 'auto', got '{s}'"))
}
