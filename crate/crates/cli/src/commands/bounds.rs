use std::fmt::Write as _;
use std::time::Instant;

use threshrank::metrics::{check_first_block_bounds, check_deflation_bounds, BoundReport, BoundStatus};
use threshrank::randlr::{rank_reveal_traced, RankRevealConfig};
use threshrank::synth::{make_synthetic, SyntheticMatrix};
use threshrank::RngStream;

use super::{algo_stream, default_threshold, rank_config, spec_for, write_csv, Status};
use crate::cli::BoundsArgs;
use crate::error::CliResult;
use crate::io::write_bytes;
use crate::manifest::RunManifest;

/// First-block reports (residual, singular value and distance bounds at
/// `t = b`) followed by the per-block deflation reports.
pub fn bound_reports(
    synm: &SyntheticMatrix,
    cfg: &RankRevealConfig,
    rng: &mut RngStream,
) -> CliResult<Vec<BoundReport>> {
    let (res, trace) = rank_reveal_traced(&synm.a, cfg, rng)?;
    let first = &trace[0];
    let b = first.rotated.cols();
    let mut out = check_first_block_bounds(synm, &first.omega, &first.rotated, cfg.power_iters, b)?;
    out.extend(check_deflation_bounds(synm, &res, &trace, cfg.power_iters)?);
    Ok(out)
}

pub(super) fn run(args: &BoundsArgs, manifest: &mut RunManifest) -> CliResult<(Status, String)> {
    let theta = args.threshold.unwrap_or_else(|| default_threshold(args.matrix_type));
    let cfg = rank_config(args.method, args.block_size, args.power_iters, theta);
    let start = Instant::now();
    let mut all = Vec::new();
    for i in 0..args.seeds {
        let seed = args.common.seed.wrapping_add(i);
        let synm = make_synthetic(&spec_for(args.matrix_type, seed))?;
        for r in bound_reports(&synm, &cfg, &mut algo_stream(seed))? {
            all.push((seed, r));
        }
    }

    let path = args.common.out.join("bounds.csv");
    write_csv(
        manifest,
        &path,
        &format!("seed,{}", BoundReport::CSV_HEADER),
        all.iter().map(|(s, r)| format!("{s},{}", r.csv_row())),
    )?;
    let mut text = String::new();
    for (seed, r) in &all {
        let _ = writeln!(text, "seed {seed:<4} {r}");
    }
    let path = args.common.out.join("bounds.txt");
    write_bytes(&path, text.as_bytes())?;
    manifest.output(&path);

    let count = |st: BoundStatus| all.iter().filter(|(_, r)| r.status == st).count();
    let (holds, fails, skipped) = (
        count(BoundStatus::Holds),
        count(BoundStatus::Fails),
        count(BoundStatus::AssumptionViolated),
    );
    manifest.metric("reports", all.len());
    manifest.metric("holds", holds);
    manifest.metric("fails", fails);
    manifest.metric("assumption_violated", skipped);
    manifest.timing("total_s", start.elapsed().as_secs_f64());

    let mut s = String::new();
    for (seed, r) in all.iter().filter(|(_, r)| r.status == BoundStatus::Fails) {
        let _ = writeln!(s, "seed {seed:<4} {r}");
    }
    let _ = writeln!(
        s,
        "{} inequality instances: {holds} hold, {fails} fail, {skipped} outside hypotheses",
        all.len()
    );
    Ok((Status::Success, s))
}
