use super::{sblarank, RankRevealConfig};
use crate::la::{qr_thin, svd_small, DenseMatrix, RngStream};
use crate::{Error, Result};

/// `sgn(x) max(|x| - tau, 0)`.
pub fn soft_threshold(x: f64, tau: f64) -> f64 {
    let mag = (x.abs() - tau).max(0.0);
    if mag == 0.0 {
        0.0
    } else {
        mag.copysign(x)
    }
}

/// Singular value thresholding `U S_tau(Sigma) V^T`, the proximal map of
/// `tau ||.||_*`.
pub fn svt_shrink(a: &DenseMatrix, tau: f64) -> DenseMatrix {
    let f = svd_small(a);
    let keep = f.s.iter().take_while(|&&s| s > tau).count();
    let s: Vec<f64> = f.s[..keep].iter().map(|&s| s - tau).collect();
    f.u.columns(0, keep)
        .scale_columns(&s)
        .matmul_t(&f.v.columns(0, keep))
        .expect("conformal")
}

/// Factored result `Q S_tau(L) P^T` of the approximate shrink.
#[derive(Clone, Debug)]
pub struct ShrinkResult {
    pub q: DenseMatrix,
    pub l_shrunk: DenseMatrix,
    pub p: DenseMatrix,
    pub tau: f64,
    pub threshold_unreached: bool,
}

impl ShrinkResult {
    pub fn rank(&self) -> usize {
        self.q.cols()
    }

    pub fn assemble(&self) -> DenseMatrix {
        self.q
            .matmul(&self.l_shrunk)
            .and_then(|ql| ql.matmul_t(&self.p))
            .expect("conformal")
    }
}

/// Approximate singular value thresholding through a threshold-`tau`
/// basis `Q` and the thin QR `W^T Q = P L^T`, with `S_tau` applied to the
/// entries of `L`.
///
/// `cfg.threshold` is overridden by `tau` and the stabilized variant is
/// always used.
pub fn approx_shrink(
    w: &DenseMatrix,
    tau: f64,
    cfg: &RankRevealConfig,
    rng: &mut RngStream,
) -> Result<ShrinkResult> {
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(Error::InvalidArgument(format!("tau must be positive, got {tau}")));
    }
    let mut cfg = cfg.clone();
    cfg.threshold = tau;
    cfg.stabilized = true;
    let res = sblarank(w, &cfg, rng)?;
    let f = qr_thin(&w.t_matmul(&res.q)?);
    let l_shrunk = f.r.transpose().map(|x| soft_threshold(x, tau));
    Ok(ShrinkResult {
        q: res.q,
        l_shrunk,
        p: f.q,
        tau,
        threshold_unreached: res.threshold_unreached,
    })
}
