use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use threshrank::randlr::sblarank;
use threshrank::synth::{make_synthetic, SyntheticMatrix};
use threshrank::RngStream;

use super::{algo_stream, default_threshold, median, rank_config, spec_for, write_csv, Status};
use crate::cli::{AccuracyArgs, Method};
use crate::error::CliResult;
use crate::manifest::RunManifest;

#[derive(Clone, Debug, PartialEq)]
pub struct AccuracyRow {
    pub b: usize,
    pub q: usize,
    pub seed: u64,
    /// 1-based.
    pub index: usize,
    pub estimate: f64,
    pub exact: f64,
    pub relerror: f64,
}

impl AccuracyRow {
    pub const CSV_HEADER: &'static str = "b,q,seed,index,estimate,exact,relerror";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{:e},{:e},{:e}",
            self.b, self.q, self.seed, self.index, self.estimate, self.exact, self.relerror
        )
    }
}

/// `|sigma_hat_i - sigma_i| / sigma_i` for every estimate of one
/// stabilized run; estimates beyond the matrix size compare against 0.
pub fn accuracy_rows(
    synm: &SyntheticMatrix,
    b: usize,
    q: usize,
    theta: f64,
    seed: u64,
    rng: &mut RngStream,
) -> CliResult<Vec<AccuracyRow>> {
    let res = sblarank(&synm.a, &rank_config(Method::Sblarank, b, q, theta), rng)?;
    Ok(res
        .sing_vals
        .iter()
        .enumerate()
        .map(|(i, &est)| {
            let exact = synm.sigma.get(i).copied().unwrap_or(0.0);
            AccuracyRow {
                b,
                q,
                seed,
                index: i + 1,
                estimate: est,
                exact,
                relerror: (est - exact).abs() / exact,
            }
        })
        .collect())
}

/// Median relative error per `(b, q, index)` over seeds.
pub fn median_profile(rows: &[AccuracyRow]) -> BTreeMap<(usize, usize, usize), f64> {
    let mut groups: BTreeMap<(usize, usize, usize), Vec<f64>> = BTreeMap::new();
    for r in rows {
        groups.entry((r.b, r.q, r.index)).or_default().push(r.relerror);
    }
    groups.into_iter().map(|(k, v)| (k, median(&v))).collect()
}

pub(super) fn run(args: &AccuracyArgs, manifest: &mut RunManifest) -> CliResult<(Status, String)> {
    let theta = args.threshold.unwrap_or_else(|| default_threshold(args.matrix_type));
    let start = Instant::now();
    let mut rows = Vec::new();
    let mut cranks: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for i in 0..args.seeds {
        let seed = args.common.seed.wrapping_add(i);
        let synm = make_synthetic(&spec_for(args.matrix_type, seed))?;
        for &b in &args.block_size {
            for &q in &args.power_iters {
                let r = accuracy_rows(&synm, b, q, theta, seed, &mut algo_stream(seed))?;
                let c = cranks.entry((b, q)).or_default();
                *c = (*c).max(r.len());
                rows.extend(r);
            }
        }
    }
    let path = args.common.out.join("accuracy.csv");
    write_csv(manifest, &path, AccuracyRow::CSV_HEADER, rows.iter().map(AccuracyRow::csv_row))?;

    let profile = median_profile(&rows);
    let path = args.common.out.join("accuracy_median.csv");
    write_csv(
        manifest,
        &path,
        "b,q,index,median_relerror",
        profile.iter().map(|((b, q, i), v)| format!("{b},{q},{i},{v:e}")),
    )?;

    let mut s = String::new();
    let _ = writeln!(s, "median relative error of estimated singular values over {} seeds", args.seeds);
    for (&(b, q), &crank) in &cranks {
        let first5 = (1..=5)
            .filter_map(|i| profile.get(&(b, q, i)))
            .copied()
            .fold(0.0, f64::max);
        manifest.metric(&format!("crank_max.b{b}.q{q}"), crank);
        manifest.metric_f64(&format!("median_relerr_first5.b{b}.q{q}"), first5);
        let _ = write!(s, "b={b:<3} q={q}: max crank {crank:>3}; medians");
        for i in 1..=crank.min(25) {
            if let Some(v) = profile.get(&(b, q, i)) {
                let _ = write!(s, " {v:.1e}");
            }
        }
        let _ = writeln!(s);
    }
    manifest.timing("total_s", start.elapsed().as_secs_f64());
    Ok((Status::Success, s))
}
