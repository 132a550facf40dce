use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use threshrank::rpca::{alm_rpca, RpcaConfig, ShrinkBackend, TraceRow};
use threshrank::{DenseMatrix, RngStream};

use super::{sha256_hex, write_csv, Status};
use crate::cli::{Backend, RpcaArgs};
use crate::error::{CliError, CliResult};
use crate::io::{read_image, to_pixel, write_image, Image};
use crate::manifest::RunManifest;

/// One column per frame, pixels in row-major order. Returns the matrix
/// and the common `(width, height)`.
pub fn frames_to_matrix(frames: &[Image]) -> CliResult<(DenseMatrix, (usize, usize))> {
    let first = frames.first().ok_or_else(|| CliError::Input("no frames".into()))?;
    let dims = (first.width, first.height);
    let mut cols = Vec::with_capacity(frames.len());
    for (k, f) in frames.iter().enumerate() {
        if f.channels != 1 {
            return Err(CliError::Input(format!("frame {k} is not grayscale")));
        }
        if (f.width, f.height) != dims {
            return Err(CliError::Input(format!(
                "frame {k} is {}x{}, expected {}x{}",
                f.width, f.height, dims.0, dims.1
            )));
        }
        cols.push(f.data.iter().map(|&p| f64::from(p)).collect());
    }
    Ok((DenseMatrix::from_columns(dims.0 * dims.1, &cols)?, dims))
}

fn column_image(a: &DenseMatrix, j: usize, (w, h): (usize, usize)) -> CliResult<Image> {
    Image::new(w, h, 1, a.col(j).iter().map(|&v| to_pixel(v)).collect())
}

fn frame_paths(dir: &Path) -> CliResult<Vec<PathBuf>> {
    let entries = fs::read_dir(dir).map_err(|e| CliError::io(dir, e))?;
    let mut paths = Vec::new();
    for e in entries {
        let p = e.map_err(|e| CliError::io(dir, e))?.path();
        if p.extension().is_some_and(|x| x.eq_ignore_ascii_case("pgm")) {
            paths.push(p);
        }
    }
    paths.sort();
    Ok(paths)
}

pub(super) fn run(args: &RpcaArgs, manifest: &mut RunManifest) -> CliResult<(Status, String)> {
    let paths = frame_paths(&args.frames)?;
    if paths.is_empty() {
        return Err(CliError::Input(format!("no .pgm frames in {}", args.frames.display())));
    }
    let frames = paths.iter().map(|p| read_image(p)).collect::<CliResult<Vec<_>>>()?;
    let (a, dims) = frames_to_matrix(&frames)?;

    let cfg = RpcaConfig {
        lambda: args.lambda,
        mu0: args.mu0,
        rho: args.rho,
        max_iters: args.max_iters,
        tol: args.tol,
        backend: match args.backend {
            Backend::Exact => ShrinkBackend::Exact,
            Backend::Approximate => ShrinkBackend::Approximate,
        },
        block_size: args.block_size,
        power_iters: args.power_iters,
        sparse_step_from_residual: args.sparse_step_from_residual,
    };
    let start = Instant::now();
    let st = alm_rpca(&a, &cfg, &mut RngStream::new(args.common.seed))?;
    let elapsed = start.elapsed().as_secs_f64();

    let out = &args.common.out;
    let mut digest = Vec::new();
    for (sub, m) in [("background", &st.l), ("foreground", &st.s)] {
        for (j, src) in paths.iter().enumerate() {
            let name = src.file_name().map(PathBuf::from).unwrap_or_else(|| format!("frame{j:05}.pgm").into());
            let img = column_image(m, j, dims)?;
            digest.extend_from_slice(&img.data);
            write_image(&out.join(sub).join(name), &img)?;
        }
        manifest.output(&out.join(sub));
    }
    let path = out.join("trace.csv");
    write_csv(manifest, &path, TraceRow::CSV_HEADER, st.trace.iter().map(TraceRow::csv_row))?;

    let last = st.trace.last().copied();
    manifest.metric("frames", frames.len());
    manifest.metric("iterations", st.iter);
    manifest.metric("converged", st.converged);
    manifest.metric_f64("final_relerror", st.final_relerror());
    manifest.metric("final_rank", last.map_or(0, |r| r.rank));
    manifest.metric("final_nnz", last.map_or(0, |r| r.nnz));
    manifest.metric("frames_sha256", sha256_hex(&digest));
    manifest.timing("solve_s", elapsed);

    let mut s = String::new();
    let _ = writeln!(
        s,
        "{} frames of {}x{}: {} iterations, relerror {:.3e}, rank {}, {} outliers, {}, {elapsed:.2}s",
        frames.len(),
        dims.0,
        dims.1,
        st.iter,
        st.final_relerror(),
        last.map_or(0, |r| r.rank),
        last.map_or(0, |r| r.nnz),
        if st.converged { "converged" } else { "NOT converged" }
    );
    let status = if st.converged {
        Status::Success
    } else {
        Status::NotConverged
    };
    Ok((status, s))
}
