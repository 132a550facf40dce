use std::fmt::Write as _;
use std::time::Instant;

use threshrank::metrics::{approx_error, orth_error, range_error};
use threshrank::randlr::{rank_reveal, RankRevealConfig};
use threshrank::synth::{make_synthetic, SyntheticMatrix};
use threshrank::RngStream;

use super::{algo_stream, default_threshold, median, rank_config, spec_for, write_csv, Status};
use crate::cli::BenchArgs;
use crate::error::CliResult;
use crate::manifest::RunManifest;

/// One row of the benchmark table.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub seed: u64,
    pub crank: usize,
    /// `||I - Q^T Q||_2`
    pub orth_err: f64,
    /// `||(I - U_k U_k^T) Q||_2`
    pub range_err: f64,
    /// `||Q Q^T A - A_k||_2`
    pub approx_err: f64,
    pub threshold_unreached: bool,
    pub time_s: f64,
}

impl BenchRow {
    pub const CSV_HEADER: &'static str = "seed,time_s,crank,orth_error,range_error,approx_error,threshold_unreached";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{:.4},{},{:e},{:e},{:e},{}",
            self.seed, self.time_s, self.crank, self.orth_err, self.range_err, self.approx_err, self.threshold_unreached
        )
    }
}

/// Runs the configured method on `synm` and scores it against the exact
/// rank-`k` factors.
pub fn bench_row(
    synm: &SyntheticMatrix,
    k: usize,
    cfg: &RankRevealConfig,
    rng: &mut RngStream,
) -> CliResult<BenchRow> {
    let t = Instant::now();
    let res = rank_reveal(&synm.a, cfg, rng)?;
    let time_s = t.elapsed().as_secs_f64();
    Ok(BenchRow {
        seed: 0,
        crank: res.rank,
        orth_err: orth_error(&res.q),
        range_err: range_error(&res.q, &synm.u_k(k))?,
        approx_err: approx_error(&res.q, synm, k)?,
        threshold_unreached: res.threshold_unreached,
        time_s,
    })
}

pub(super) fn run(args: &BenchArgs, manifest: &mut RunManifest) -> CliResult<(Status, String)> {
    let theta = args.threshold.unwrap_or_else(|| default_threshold(args.matrix_type));
    let cfg = rank_config(args.method, args.block_size, args.power_iters, theta);
    let start = Instant::now();
    let mut rows = Vec::new();
    let mut k = 0;
    for i in 0..args.seeds {
        let seed = args.common.seed.wrapping_add(i);
        let synm = make_synthetic(&spec_for(args.matrix_type, seed))?;
        k = synm.sigma.iter().filter(|&&s| s > theta).count();
        let mut row = bench_row(&synm, k, &cfg, &mut algo_stream(seed))?;
        row.seed = seed;
        rows.push(row);
    }

    let path = args.common.out.join("bench.csv");
    write_csv(manifest, &path, BenchRow::CSV_HEADER, rows.iter().map(BenchRow::csv_row))?;

    let cranks: Vec<usize> = rows.iter().map(|r| r.crank).collect();
    let approx: Vec<f64> = rows.iter().map(|r| r.approx_err).collect();
    let range: Vec<f64> = rows.iter().map(|r| r.range_err).collect();
    let orth_max = rows.iter().map(|r| r.orth_err).fold(0.0, f64::max);
    let exact = cranks.iter().filter(|&&c| c == k).count();
    let over = cranks.iter().filter(|&&c| c > k).count();
    let unreached = rows.iter().filter(|r| r.threshold_unreached).count();

    manifest.metric("true_rank", k);
    manifest.metric("seeds", rows.len());
    manifest.metric("crank_min", cranks.iter().min().copied().unwrap_or(0));
    manifest.metric("crank_max", cranks.iter().max().copied().unwrap_or(0));
    manifest.metric("crank_exact", exact);
    manifest.metric("crank_over", over);
    manifest.metric_f64("orth_err_max", orth_max);
    manifest.metric_f64("range_err_median", median(&range));
    manifest.metric_f64("approx_err_median", median(&approx));
    manifest.metric_f64("approx_err_max", approx.iter().copied().fold(0.0, f64::max));
    manifest.metric("threshold_unreached", unreached);
    manifest.timing("total_s", start.elapsed().as_secs_f64());
    manifest.timing("method_median_s", median(&rows.iter().map(|r| r.time_s).collect::<Vec<_>>()));

    let mut s = String::new();
    let _ = writeln!(
        s,
        "type {:?}, {:?}, b={}, q={}, theta={theta:e}, {} seeds, true rank {k}",
        args.matrix_type,
        args.method,
        args.block_size,
        args.power_iters,
        rows.len()
    );
    let _ = writeln!(s, "{:>6} {:>9} {:>6} {:>11} {:>11} {:>11}", "seed", "time", "crank", "orth_err", "range_err", "approx_err");
    for r in &rows {
        let _ = writeln!(
            s,
            "{:>6} {:>9.4} {:>6} {:>11.3e} {:>11.3e} {:>11.3e}",
            r.seed, r.time_s, r.crank, r.orth_err, r.range_err, r.approx_err
        );
    }
    let _ = writeln!(
        s,
        "crank == {k} in {exact}/{}; over-estimated in {over}; max orth_err {orth_max:.3e}; median approx_err {:.3e}",
        rows.len(),
        median(&approx)
    );
    let status = if unreached > 0 {
        Status::ThresholdUnreached
    } else {
        Status::Success
    };
    Ok((status, s))
}
