use super::RankRevealConfig;
use crate::la::{gaussian, orth, DenseMatrix, RngStream};
use crate::Result;

/// Blocked QB factorization `A ~ Q B` with `B = Q^T A`.
#[derive(Clone, Debug)]
pub struct QbResult {
    pub q: DenseMatrix,
    pub b: DenseMatrix,
    pub blocks: Vec<usize>,
    /// Frobenius residual as tracked by the loop: explicit norm of the
    /// updated residual, or `sqrt(E)` for the error-indicator variant.
    pub residual_estimate: f64,
    pub threshold_unreached: bool,
}

impl QbResult {
    pub fn rank(&self) -> usize {
        self.q.cols()
    }
}

/// Blocked randomized QB until `||A - QB||_F < theta`.
///
/// With `cfg.ei_stop` the residual matrix is never formed; the squared
/// residual is tracked as `E = ||A||_F^2 - sum ||B_i||_F^2`. The stopping
/// test runs before each block, so a zero input returns empty factors.
pub fn randqb_blocked(a: &DenseMatrix, cfg: &RankRevealConfig, rng: &mut RngStream) -> Result<QbResult> {
    let (m, n) = a.shape();
    let cap = cfg.rank_cap(m, n)?;
    let mut q = DenseMatrix::zeros(m, 0);
    let mut b = DenseMatrix::zeros(0, n);
    let mut blocks = Vec::new();
    let mut residual = if cfg.ei_stop { None } else { Some(a.clone()) };
    let norm = a.frobenius_norm();
    let mut e = norm * norm;
    let mut threshold_unreached = false;

    let estimate = loop {
        let est = match &residual {
            Some(r) => r.frobenius_norm(),
            None => e.max(0.0).sqrt(),
        };
        if est < cfg.threshold {
            break est;
        }
        if q.cols() >= cap {
            threshold_unreached = true;
            break est;
        }
        let bb = cfg.block_size.min(cap - q.cols());
        let omega = gaussian(rng, n, bb);
        let qi = match &residual {
            Some(r) => orth(&r.matmul(&omega)?),
            None => {
                let mut y = a.matmul(&omega)?;
                if q.cols() > 0 {
                    y.sub_matmul(&q, &b.matmul(&omega)?)?;
                }
                orth(&y)
            }
        };
        let qi = orth(&qi.project_out(&q)?);
        let bi = match &mut residual {
            Some(r) => {
                let bi = qi.t_matmul(r)?;
                r.sub_matmul(&qi, &bi)?;
                bi
            }
            None => qi.t_matmul(a)?,
        };
        let bn = bi.frobenius_norm();
        e -= bn * bn;
        q.append_columns(&qi)?;
        b = b.vcat(&bi)?;
        blocks.push(bb);
    };

    Ok(QbResult {
        q,
        b,
        blocks,
        residual_estimate: estimate,
        threshold_unreached,
    })
}
