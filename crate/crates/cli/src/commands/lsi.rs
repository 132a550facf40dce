use std::fmt::Write as _;

use threshrank::randlr::{sblarank, RankRevealConfig};
use threshrank::{DenseMatrix, RngStream};

use super::{write_csv, Status};
use crate::cli::LsiArgs;
use crate::error::{CliError, CliResult};
use crate::io::read_matrix;
use crate::manifest::RunManifest;

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LsiCut {
    Threshold(f64),
    Rank(usize),
}

/// Basis of the document space: threshold mode keeps directions above
/// `theta`, rank mode stops after `k` columns.
pub fn lsi_basis(
    a: &DenseMatrix,
    cut: LsiCut,
    block_size: usize,
    power_iters: usize,
    rng: &mut RngStream,
) -> CliResult<(DenseMatrix, bool)> {
    let cfg = match cut {
        LsiCut::Threshold(theta) => RankRevealConfig::new(block_size, theta),
        LsiCut::Rank(k) => {
            if k == 0 {
                return Err(CliError::Input("rank must be positive".into()));
            }
            RankRevealConfig::new(block_size, f64::MIN_POSITIVE.sqrt()).max_rank(k)
        }
    }
    .power_iters(power_iters);
    let res = sblarank(a, &cfg, rng)?;
    let unreached = matches!(cut, LsiCut::Threshold(_)) && res.threshold_unreached;
    Ok((res.q, unreached))
}

/// Cosine scores `qhat^T w_j / (||q|| ||w_j||)` with `qhat = Q^T q`,
/// `w_j = Q^T a_j` and `q` the binary indicator of `terms`. Documents with
/// `w_j = 0` score 0.
pub fn lsi_scores(a: &DenseMatrix, basis: &DenseMatrix, terms: &[usize]) -> CliResult<Vec<f64>> {
    let m = a.rows();
    if terms.is_empty() {
        return Err(CliError::Input("empty query".into()));
    }
    if let Some(&t) = terms.iter().find(|&&t| t >= m) {
        return Err(CliError::Input(format!("term index {t} out of range (matrix has {m} terms)")));
    }
    let mut query = vec![0.0; m];
    for &t in terms {
        query[t] = 1.0;
    }
    let q_norm = dot(&query, &query).sqrt();
    let qv = DenseMatrix::from_col_major(m, 1, query)?;
    let qhat = basis.t_matmul(&qv)?;
    let w = basis.t_matmul(a)?;
    Ok((0..a.cols())
        .map(|j| {
            let wj = w.col(j);
            let wn = dot(wj, wj).sqrt();
            if wn == 0.0 {
                0.0
            } else {
                dot(qhat.col(0), wj) / (q_norm * wn)
            }
        })
        .collect())
}

/// Documents by descending score, ties by index.
pub fn rank_documents(scores: &[f64]) -> Vec<(usize, f64)> {
    let mut v: Vec<(usize, f64)> = scores.iter().copied().enumerate().collect();
    v.sort_by(|x, y| y.1.total_cmp(&x.1).then(x.0.cmp(&y.0)));
    v
}

pub(super) fn run(args: &LsiArgs, manifest: &mut RunManifest) -> CliResult<(Status, String)> {
    let a = read_matrix(&args.termdoc)?;
    let cut = match (args.threshold, args.rank) {
        (Some(t), None) => LsiCut::Threshold(t),
        (None, Some(k)) => LsiCut::Rank(k),
        _ => return Err(CliError::Input("give exactly one of --threshold and --rank".into())),
    };
    let (basis, unreached) = lsi_basis(
        &a,
        cut,
        args.block_size,
        args.power_iters,
        &mut RngStream::new(args.common.seed),
    )?;
    let scores = lsi_scores(&a, &basis, &args.query)?;
    let ranking = rank_documents(&scores);

    let path = args.common.out.join("ranking.csv");
    write_csv(
        manifest,
        &path,
        "position,document,score",
        ranking.iter().enumerate().map(|(i, (d, s))| format!("{},{d},{s:e}", i + 1)),
    )?;
    manifest.metric("crank", basis.cols());
    if let Some(&(d, s)) = ranking.first() {
        manifest.metric("top_document", d);
        manifest.metric_f64("top_score", s);
    }
    manifest.metric(
        "ranking",
        ranking.iter().map(|(d, _)| d.to_string()).collect::<Vec<_>>().join(" "),
    );

    let mut s = String::new();
    let _ = writeln!(s, "basis of {} columns; top documents:", basis.cols());
    for (i, (d, sc)) in ranking.iter().take(10).enumerate() {
        let _ = writeln!(s, "{:>3}. document {d:<6} score {sc:.6}", i + 1);
    }
    let status = if unreached {
        Status::ThresholdUnreached
    } else {
        Status::Success
    };
    Ok((status, s))
}
