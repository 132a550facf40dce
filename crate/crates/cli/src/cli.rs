use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug, Clone)]
#[command(name = "threshrank", version, about = "Threshold-driven randomized low-rank approximation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Rank, orthogonality and approximation errors on synthetic matrices.
    BenchSynthetic(BenchArgs),
    /// Relative errors of the estimated singular values, per index.
    SingularAccuracy(AccuracyArgs),
    /// Per-instance evaluation of the block error bounds.
    Bounds(BoundsArgs),
    /// Low-rank compression of a PGM/PPM image.
    CompressImage(CompressArgs),
    /// Rebuild an image from stored factors.
    Decompress(DecompressArgs),
    /// Rank documents against a term query in a low-rank basis.
    Lsi(LsiArgs),
    /// Robust PCA of a PGM frame sequence.
    Rpca(RpcaArgs),
    /// Re-run a command from its manifest and compare summary metrics.
    Replay(ReplayArgs),
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixType {
    #[value(name = "I", alias = "i", alias = "1")]
    I,
    #[value(name = "II", alias = "ii", alias = "2")]
    II,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Twice-orthogonalized blocks.
    Sblarank,
    /// Single orthogonalization.
    Blarank,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    Exact,
    Approximate,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Output directory; receives the manifest and all artifacts.
    #[arg(long, default_value = "threshrank-out")]
    pub out: PathBuf,
    /// Governs all randomness.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug, Clone)]
pub struct BenchArgs {
    #[arg(long = "type", value_enum, default_value = "I")]
    pub matrix_type: MatrixType,
    #[arg(long, value_enum, default_value = "sblarank")]
    pub method: Method,
    #[arg(long, default_value_t = 10)]
    pub block_size: usize,
    #[arg(long, default_value_t = 2)]
    pub power_iters: usize,
    /// Defaults to 1e-5 for type I and 1e-9 for type II.
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Number of matrices; matrix i uses seed + i.
    #[arg(long, default_value_t = 10)]
    pub seeds: u64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone)]
pub struct AccuracyArgs {
    #[arg(long = "type", value_enum, default_value = "II")]
    pub matrix_type: MatrixType,
    #[arg(long, value_delimiter = ',', default_value = "10,20")]
    pub block_size: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
    pub power_iters: Vec<usize>,
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long, default_value_t = 20)]
    pub seeds: u64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone)]
pub struct BoundsArgs {
    #[arg(long = "type", value_enum, default_value = "I")]
    pub matrix_type: MatrixType,
    #[arg(long, value_enum, default_value = "sblarank")]
    pub method: Method,
    #[arg(long, default_value_t = 5)]
    pub block_size: usize,
    #[arg(long, default_value_t = 2)]
    pub power_iters: usize,
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long, default_value_t = 10)]
    pub seeds: u64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone)]
pub struct CompressArgs {
    /// PGM (P5) or PPM (P6) image.
    #[arg(long)]
    pub input: PathBuf,
    /// Threshold as a fraction of the spectral norm, in (0, 1).
    #[arg(long, default_value_t = 0.05)]
    pub theta_fraction: f64,
    #[arg(long, default_value_t = 10)]
    pub block_size: usize,
    #[arg(long, default_value_t = 2)]
    pub power_iters: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone)]
pub struct DecompressArgs {
    /// Basis `Q` (raw-f64 or MatrixMarket).
    #[arg(long)]
    pub q: PathBuf,
    /// Coefficients `Q^T A`.
    #[arg(long)]
    pub b: PathBuf,
    /// 1 for gray, 3 for color (planes stacked vertically).
    #[arg(long, default_value_t = 1)]
    pub channels: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone)]
#[command(group(ArgGroup::new("cut").required(true).args(["threshold", "rank"])))]
pub struct LsiArgs {
    /// Term-document matrix, MatrixMarket array or coordinate.
    #[arg(long)]
    pub termdoc: PathBuf,
    /// Zero-based term (row) indices forming a binary query.
    #[arg(long, value_delimiter = ',', required = true)]
    pub query: Vec<usize>,
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Fixed basis size instead of a threshold.
    #[arg(long)]
    pub rank: Option<usize>,
    #[arg(long, default_value_t = 10)]
    pub block_size: usize,
    #[arg(long, default_value_t = 2)]
    pub power_iters: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone)]
pub struct RpcaArgs {
    /// Directory of equally sized PGM frames, taken in file-name order.
    #[arg(long)]
    pub frames: PathBuf,
    /// Defaults to (mn)^{-1/2}.
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long, default_value_t = 1e-3)]
    pub mu0: f64,
    #[arg(long, default_value_t = 1.1)]
    pub rho: f64,
    #[arg(long, default_value_t = 100)]
    pub max_iters: usize,
    #[arg(long, default_value_t = 9e-5)]
    pub tol: f64,
    #[arg(long, value_enum, default_value = "approximate")]
    pub backend: Backend,
    #[arg(long, default_value_t = 10)]
    pub block_size: usize,
    #[arg(long, default_value_t = 0)]
    pub power_iters: usize,
    /// Sparse step on `A - L - S` instead of `A - L + Y/mu`.
    #[arg(long)]
    pub sparse_step_from_residual: bool,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone)]
pub struct ReplayArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    /// Where the replayed run writes; defaults to `<original out>/replay`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::BenchSynthetic(_) => "bench-synthetic",
            Command::SingularAccuracy(_) => "singular-accuracy",
            Command::Bounds(_) => "bounds",
            Command::CompressImage(_) => "compress-image",
            Command::Decompress(_) => "decompress",
            Command::Lsi(_) => "lsi",
            Command::Rpca(_) => "rpca",
            Command::Replay(_) => "replay",
        }
    }

    pub fn common(&self) -> Option<&Common> {
        match self {
            Command::BenchSynthetic(a) => Some(&a.common),
            Command::SingularAccuracy(a) => Some(&a.common),
            Command::Bounds(a) => Some(&a.common),
            Command::CompressImage(a) => Some(&a.common),
            Command::Decompress(a) => Some(&a.common),
            Command::Lsi(a) => Some(&a.common),
            Command::Rpca(a) => Some(&a.common),
            Command::Replay(_) => None,
        }
    }
}
