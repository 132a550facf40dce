mod accuracy;
mod bench;
mod bounds;
mod image;
mod lsi;
mod replay;
mod rpca;

use std::fmt::Write as _;
use std::path::Path;

use clap::Parser;
use threshrank::randlr::RankRevealConfig;
use threshrank::synth::SyntheticSpec;
use threshrank::RngStream;

use crate::cli::{Cli, Command, MatrixType, Method};
use crate::error::{CliError, CliResult};
use crate::io::write_bytes;
use crate::manifest::RunManifest;

pub use accuracy::{accuracy_rows, median_profile, AccuracyRow};
pub use bench::{bench_row, BenchRow};
pub use bounds::bound_reports;
pub use image::{compress, decompress, Compressed};
pub use lsi::{lsi_basis, lsi_scores, rank_documents, LsiCut};
pub use rpca::frames_to_matrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Success,
    ThresholdUnreached,
    NotConverged,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Success => 0,
            Status::ThresholdUnreached => 3,
            Status::NotConverged => 4,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub manifest: RunManifest,
    pub status: Status,
    /// Human-readable report for stdout.
    pub summary: String,
}

/// Parses `argv` (without the program name) and runs the command.
pub fn run(argv: &[String]) -> CliResult<Outcome> {
    let cli = Cli::try_parse_from(std::iter::once("threshrank".to_string()).chain(argv.iter().cloned()))
        .map_err(|e| CliError::Input(e.to_string()))?;
    execute(cli.command, argv)
}

pub fn execute(command: Command, argv: &[String]) -> CliResult<Outcome> {
    let mut manifest = match command.common() {
        Some(c) => RunManifest::new(command.name(), c.seed, argv),
        None => RunManifest::new(command.name(), 0, argv),
    };
    let (status, summary) = match &command {
        Command::BenchSynthetic(a) => bench::run(a, &mut manifest)?,
        Command::SingularAccuracy(a) => accuracy::run(a, &mut manifest)?,
        Command::Bounds(a) => bounds::run(a, &mut manifest)?,
        Command::CompressImage(a) => image::run_compress(a, &mut manifest)?,
        Command::Decompress(a) => image::run_decompress(a, &mut manifest)?,
        Command::Lsi(a) => lsi::run(a, &mut manifest)?,
        Command::Rpca(a) => rpca::run(a, &mut manifest)?,
        Command::Replay(a) => return replay::run(a),
    };
    if let Some(c) = command.common() {
        manifest.write(&c.out)?;
    }
    Ok(Outcome {
        manifest,
        status,
        summary,
    })
}

/// Stream for the algorithm's Gaussian draws on the instance with matrix
/// seed `seed`, independent of the stream that built the matrix.
pub fn algo_stream(seed: u64) -> RngStream {
    RngStream::new(seed ^ 0x5DEE_CE66_D1CE_4E5B)
}

pub fn spec_for(t: MatrixType, seed: u64) -> SyntheticSpec {
    match t {
        MatrixType::I => SyntheticSpec::type_one(seed),
        MatrixType::II => SyntheticSpec::type_two(seed),
    }
}

pub fn default_threshold(t: MatrixType) -> f64 {
    match t {
        MatrixType::I => 1e-5,
        MatrixType::II => 1e-9,
    }
}

pub fn rank_config(method: Method, b: usize, q: usize, theta: f64) -> RankRevealConfig {
    RankRevealConfig::new(b, theta)
        .power_iters(q)
        .stabilized(method == Method::Sblarank)
}

pub(crate) fn median(v: &[f64]) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}

/// Writes `header` and `rows` as CSV and records the path.
pub(crate) fn write_csv(
    manifest: &mut RunManifest,
    path: &Path,
    header: &str,
    rows: impl IntoIterator<Item = String>,
) -> CliResult<()> {
    let mut s = String::new();
    let _ = writeln!(s, "{header}");
    for r in rows {
        let _ = writeln!(s, "{r}");
    }
    write_bytes(path, s.as_bytes())?;
    manifest.output(path);
    Ok(())
}

pub(crate) fn sha256_hex(bytes: &[u8]) -> String {
    use sha2::{Digest, Sha256};
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_cases() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
        assert!(median(&[]).is_nan());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(Status::Success.exit_code(), 0);
        assert_eq!(Status::ThresholdUnreached.exit_code(), 3);
        assert_eq!(Status::NotConverged.exit_code(), 4);
        assert_eq!(CliError::Input("x".into()).exit_code(), 2);
        assert_eq!(CliError::Core(threshrank::Error::NoConvergence("x".into())).exit_code(), 4);
    }

    #[test]
    fn bad_arguments_are_input_errors() {
        let err = run(&["bench-synthetic".into(), "--type".into(), "III".into()]).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }
}
