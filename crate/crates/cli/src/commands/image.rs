use std::fmt::Write as _;
use std::time::Instant;

use threshrank::la::spectral_norm;
use threshrank::randlr::{sblarank, RankRevealConfig};
use threshrank::{DenseMatrix, RngStream};

use super::{sha256_hex, Status};
use crate::cli::{CompressArgs, DecompressArgs};
use crate::error::{CliError, CliResult};
use crate::io::{read_image, read_matrix, write_image, write_matrix, Image, MatrixFormat};
use crate::manifest::RunManifest;

#[derive(Clone, Debug)]
pub struct Compressed {
    pub q: DenseMatrix,
    /// `Q^T A`
    pub b: DenseMatrix,
    pub crank: usize,
    /// `mn / ((m + n) r)`
    pub cratio: f64,
    /// `||Q Q^T A - A||_2 / ||A||_2`
    pub relerror: f64,
    pub threshold_unreached: bool,
}

/// Threshold-basis compression with `theta = theta_fraction ||A||_2`.
pub fn compress(
    a: &DenseMatrix,
    theta_fraction: f64,
    block_size: usize,
    power_iters: usize,
    rng: &mut RngStream,
) -> CliResult<Compressed> {
    if !(theta_fraction > 0.0 && theta_fraction < 1.0) {
        return Err(CliError::Input(format!(
            "theta fraction must lie in (0, 1), got {theta_fraction}"
        )));
    }
    let (m, n) = a.shape();
    let norm = spectral_norm(a);
    // a zero image keeps an empty basis under any positive threshold
    let theta = if norm > 0.0 { theta_fraction * norm } else { 1.0 };
    let cfg = RankRevealConfig::new(block_size, theta).power_iters(power_iters);
    let res = sblarank(a, &cfg, rng)?;
    let b = res.q.t_matmul(a)?;
    let resid = a.sub(&res.q.matmul(&b)?)?;
    let relerror = if norm > 0.0 { spectral_norm(&resid) / norm } else { 0.0 };
    let r = res.rank;
    Ok(Compressed {
        crank: r,
        cratio: (m * n) as f64 / ((m + n) * r) as f64,
        relerror,
        threshold_unreached: res.threshold_unreached,
        q: res.q,
        b,
    })
}

/// `Q B` as an image.
pub fn decompress(q: &DenseMatrix, b: &DenseMatrix, channels: usize) -> CliResult<Image> {
    Image::from_matrix(&q.matmul(b)?, channels)
}

pub(super) fn run_compress(args: &CompressArgs, manifest: &mut RunManifest) -> CliResult<(Status, String)> {
    let img = read_image(&args.input)?;
    let a = img.to_matrix();
    let start = Instant::now();
    let c = compress(
        &a,
        args.theta_fraction,
        args.block_size,
        args.power_iters,
        &mut RngStream::new(args.common.seed),
    )?;
    let elapsed = start.elapsed().as_secs_f64();
    let recon = decompress(&c.q, &c.b, img.channels)?;

    let out = &args.common.out;
    for (name, m) in [("q.raw", &c.q), ("b.raw", &c.b)] {
        let p = out.join(name);
        write_matrix(&p, m, MatrixFormat::RawF64)?;
        manifest.output(&p);
    }
    let p = out.join(format!("recon.{}", recon.extension()));
    write_image(&p, &recon)?;
    manifest.output(&p);

    manifest.metric("rows", a.rows());
    manifest.metric("cols", a.cols());
    manifest.metric("crank", c.crank);
    manifest.metric_f64("cratio", c.cratio);
    manifest.metric_f64("relerror", c.relerror);
    manifest.metric("recon_sha256", sha256_hex(&recon.data));
    manifest.timing("sblarank_s", elapsed);

    let mut s = String::new();
    let _ = writeln!(
        s,
        "{}x{} matrix, theta = {} ||A||_2: crank {}, cratio {:.3}, relerror {:.3e}, time {elapsed:.3}s",
        a.rows(),
        a.cols(),
        args.theta_fraction,
        c.crank,
        c.cratio,
        c.relerror
    );
    let status = if c.threshold_unreached {
        Status::ThresholdUnreached
    } else {
        Status::Success
    };
    Ok((status, s))
}

pub(super) fn run_decompress(args: &DecompressArgs, manifest: &mut RunManifest) -> CliResult<(Status, String)> {
    let q = read_matrix(&args.q)?;
    let b = read_matrix(&args.b)?;
    if q.cols() != b.rows() {
        return Err(CliError::Input(format!(
            "factor shapes {}x{} and {}x{} do not chain",
            q.rows(),
            q.cols(),
            b.rows(),
            b.cols()
        )));
    }
    let img = decompress(&q, &b, args.channels)?;
    let p = args.common.out.join(format!("recon.{}", img.extension()));
    write_image(&p, &img)?;
    manifest.output(&p);
    manifest.metric("width", img.width);
    manifest.metric("height", img.height);
    manifest.metric("recon_sha256", sha256_hex(&img.data));
    Ok((Status::Success, format!("wrote {}\n", p.display())))
}
