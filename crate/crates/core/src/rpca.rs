//! Robust PCA `min ||L||_* + lambda ||S||_1` s.t. `A = L + S` by the
//! inexact augmented Lagrange multiplier iteration.

use crate::la::{svd_small, DenseMatrix, RngStream};
use crate::randlr::{approx_shrink, soft_threshold, RankRevealConfig};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShrinkBackend {
    /// Full SVD thresholding.
    Exact,
    /// Threshold-basis shrink with `theta = 1/mu`.
    Approximate,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RpcaConfig {
    /// `None` means `(mn)^{-1/2}`.
    pub lambda: Option<f64>,
    pub mu0: f64,
    pub rho: f64,
    pub max_iters: usize,
    pub tol: f64,
    pub backend: ShrinkBackend,
    pub block_size: usize,
    pub power_iters: usize,
    /// Use `A - L_{j+1} - S_j` as the sparse-step argument instead of
    /// `A - L_{j+1} + Y_j/mu_j`.
    pub sparse_step_from_residual: bool,
}

impl Default for RpcaConfig {
    fn default() -> Self {
        RpcaConfig {
            lambda: None,
            mu0: 1e-3,
            rho: 1.1,
            max_iters: 100,
            tol: 9e-5,
            backend: ShrinkBackend::Exact,
            block_size: 10,
            power_iters: 0,
            sparse_step_from_residual: false,
        }
    }
}

impl RpcaConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidArgument(what.to_string()));
        if !(self.rho > 1.0) {
            return bad("rho must exceed 1");
        }
        if !(self.mu0 > 0.0) {
            return bad("mu0 must be positive");
        }
        if !(self.tol > 0.0) {
            return bad("tol must be positive");
        }
        if let Some(l) = self.lambda {
            if !(l > 0.0) {
                return bad("lambda must be positive");
            }
        }
        if self.block_size == 0 {
            return bad("block size must be positive");
        }
        Ok(())
    }

    pub fn lambda_for(&self, m: usize, n: usize) -> f64 {
        self.lambda.unwrap_or(1.0 / ((m * n) as f64).sqrt())
    }

    /// `mu_j = mu0 rho^j`, by repeated multiplication (`powi` may round
    /// differently depending on how it is compiled).
    pub fn mu_at(&self, j: usize) -> f64 {
        self.mu0 * (0..j).fold(1.0, |p, _| p * self.rho)
    }
}

/// One row of the convergence trace.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceRow {
    pub iter: usize,
    pub mu: f64,
    pub rank: usize,
    pub nnz: usize,
    pub relerror: f64,
}

impl TraceRow {
    pub const CSV_HEADER: &'static str = "iter,mu,rank,nnz,relerror";

    pub fn csv_row(&self) -> String {
        format!("{},{:e},{},{},{:e}", self.iter, self.mu, self.rank, self.nnz, self.relerror)
    }
}

#[derive(Clone, Debug)]
pub struct RpcaState {
    pub l: DenseMatrix,
    pub s: DenseMatrix,
    pub y: DenseMatrix,
    /// `mu` used in the last iteration.
    pub mu: f64,
    pub iter: usize,
    pub relerror_trace: Vec<f64>,
    pub trace: Vec<TraceRow>,
    pub converged: bool,
}

impl RpcaState {
    pub fn final_relerror(&self) -> f64 {
        self.relerror_trace.last().copied().unwrap_or(f64::INFINITY)
    }
}

/// Exact singular value thresholding, also returning the kept rank.
fn svt_ranked(m: &DenseMatrix, tau: f64) -> (DenseMatrix, usize) {
    let f = svd_small(m);
    let keep = f.s.iter().take_while(|&&s| s > tau).count();
    let s: Vec<f64> = f.s[..keep].iter().map(|&s| s - tau).collect();
    let x = f
        .u
        .columns(0, keep)
        .scale_columns(&s)
        .matmul_t(&f.v.columns(0, keep))
        .expect("conformal");
    (x, keep)
}

pub fn alm_rpca(a: &DenseMatrix, cfg: &RpcaConfig, rng: &mut RngStream) -> Result<RpcaState> {
    cfg.validate()?;
    let (m, n) = a.shape();
    let a_norm = a.frobenius_norm();
    if !(a_norm > 0.0) {
        return Err(Error::InvalidArgument("input must be nonzero".into()));
    }
    if !a.is_finite() {
        return Err(Error::InvalidArgument("input has non-finite entries".into()));
    }
    let lambda = cfg.lambda_for(m, n);
    let shrink_cfg = RankRevealConfig::new(cfg.block_size, 1.0).power_iters(cfg.power_iters);

    let mut l = DenseMatrix::zeros(m, n);
    let mut s = DenseMatrix::zeros(m, n);
    let mut y = DenseMatrix::zeros(m, n);
    let mut state_mu = cfg.mu0;
    let mut relerror_trace = Vec::new();
    let mut trace = Vec::new();
    let mut converged = false;

    for j in 0..cfg.max_iters {
        let mu = cfg.mu_at(j);
        let inv = 1.0 / mu;

        // L-step
        let arg = a.sub(&s)?.add(&y.scale(inv))?;
        let rank;
        (l, rank) = match cfg.backend {
            ShrinkBackend::Exact => svt_ranked(&arg, inv),
            ShrinkBackend::Approximate => {
                let r = approx_shrink(&arg, inv, &shrink_cfg, rng)?;
                (r.assemble(), r.rank())
            }
        };

        // S-step
        let arg = if cfg.sparse_step_from_residual {
            a.sub(&l)?.sub(&s)?
        } else {
            a.sub(&l)?.add(&y.scale(inv))?
        };
        s = arg.map(|x| soft_threshold(x, lambda * inv));

        // multiplier
        let resid = a.sub(&l)?.sub(&s)?;
        y = y.add(&resid.scale(mu))?;

        let relerror = resid.frobenius_norm() / a_norm;
        relerror_trace.push(relerror);
        trace.push(TraceRow {
            iter: j + 1,
            mu,
            rank,
            nnz: s.nnz(),
            relerror,
        });
        state_mu = mu;
        if relerror < cfg.tol {
            converged = true;
            break;
        }
    }

    Ok(RpcaState {
        l,
        s,
        y,
        mu: state_mu,
        iter: trace.len(),
        relerror_trace,
        trace,
        converged,
    })
}
