use super::{ApproxResult, RankRevealConfig};
use crate::la::{eig_desc, gaussian, orth, reorth2, DenseMatrix, RngStream};
use crate::Result;

/// What one block of the rank-revealing loop saw.
#[derive(Clone, Debug)]
pub struct BlockTrace {
    /// Gaussian test matrix drawn for this block.
    pub omega: DenseMatrix,
    /// Block basis after the Ritz rotation, before truncation.
    pub rotated: DenseMatrix,
    /// Ritz values (squared singular value estimates), descending.
    pub lambda: Vec<f64>,
    /// Columns appended to the basis.
    pub kept: usize,
}

/// Blocked low-rank approximation within threshold `theta`, single
/// orthogonalization against the accumulated basis.
pub fn blarank(a: &DenseMatrix, cfg: &RankRevealConfig, rng: &mut RngStream) -> Result<ApproxResult> {
    run(a, cfg, false, rng, None)
}

/// Stabilized variant: the block is twice-orthogonalized against the
/// accumulated basis.
pub fn sblarank(a: &DenseMatrix, cfg: &RankRevealConfig, rng: &mut RngStream) -> Result<ApproxResult> {
    run(a, cfg, true, rng, None)
}

/// Dispatches on `cfg.stabilized`.
pub fn rank_reveal(a: &DenseMatrix, cfg: &RankRevealConfig, rng: &mut RngStream) -> Result<ApproxResult> {
    run(a, cfg, cfg.stabilized, rng, None)
}

/// Like [`rank_reveal`], also returning the per-block record.
pub fn rank_reveal_traced(
    a: &DenseMatrix,
    cfg: &RankRevealConfig,
    rng: &mut RngStream,
) -> Result<(ApproxResult, Vec<BlockTrace>)> {
    let mut trace = Vec::new();
    let res = run(a, cfg, cfg.stabilized, rng, Some(&mut trace))?;
    Ok((res, trace))
}

/// Orthonormal basis of `((I - QQ^T) A A^T)^q (I - QQ^T) A omega` computed
/// without forming the deflated matrix: the sample is projected against
/// `q` before each multiplication by `A^T` and once more at the end
/// (twice when `stabilized`).
pub fn power_range(
    a: &DenseMatrix,
    q: &DenseMatrix,
    omega: &DenseMatrix,
    power_iters: usize,
    stabilized: bool,
) -> Result<DenseMatrix> {
    let mut y = orth(&a.matmul(omega)?);
    for _ in 0..power_iters {
        y = y.project_out(q)?;
        let z = orth(&a.t_matmul(&y)?);
        y = orth(&a.matmul(&z)?);
    }
    if stabilized {
        Ok(reorth2(&y, q))
    } else {
        Ok(orth(&y.project_out(q)?))
    }
}

fn run(
    a: &DenseMatrix,
    cfg: &RankRevealConfig,
    stabilized: bool,
    rng: &mut RngStream,
    mut trace: Option<&mut Vec<BlockTrace>>,
) -> Result<ApproxResult> {
    let (m, n) = a.shape();
    let cap = cfg.rank_cap(m, n)?;
    let theta2 = cfg.threshold * cfg.threshold;

    let mut q = DenseMatrix::zeros(m, 0);
    let mut sing_vals = Vec::new();
    let mut blocks = Vec::new();
    let mut threshold_unreached = false;

    loop {
        let rank = q.cols();
        if rank >= cap {
            threshold_unreached = m.min(n) > 0;
            break;
        }
        let bb = cfg.block_size.min(cap - rank);
        let omega = gaussian(rng, n, bb);
        let qhat = power_range(a, &q, &omega, cfg.power_iters, stabilized)?;

        let w = a.t_matmul(&qhat)?;
        let (u, lambda) = eig_desc(&w.t_matmul(&w)?)?;
        let rotated = qhat.matmul(&u)?;
        let cut = lambda.iter().position(|&l| l < theta2);
        let kept = cut.unwrap_or(bb);

        if kept > 0 {
            let block = rotated.columns(0, kept).project_out(&q)?;
            q.append_columns(&orth(&block))?;
            sing_vals.extend(lambda[..kept].iter().map(|l| l.max(0.0).sqrt()));
            blocks.push(kept);
        }
        if let Some(t) = trace.as_deref_mut() {
            t.push(BlockTrace {
                omega,
                rotated,
                lambda,
                kept,
            });
        }
        if cut.is_some() {
            break;
        }
    }

    sing_vals.sort_by(|x, y| y.total_cmp(x));
    Ok(ApproxResult {
        rank: q.cols(),
        q,
        sing_vals,
        blocks,
        residual_fro: None,
        threshold_unreached,
    })
}
