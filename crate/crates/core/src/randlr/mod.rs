//! Randomized low-rank approximation: RSVD, blocked QB, threshold-driven
//! rank revealing and the shrink operators built on it.

mod blarank;
mod estimate;
mod qb;
mod rsvd;
mod shrink;

pub use blarank::{blarank, power_range, rank_reveal, rank_reveal_traced, sblarank, BlockTrace};
pub use estimate::posterior_spectral_estimate;
pub use qb::{randqb_blocked, QbResult};
pub use rsvd::rsvd;
pub use shrink::{approx_shrink, soft_threshold, svt_shrink, ShrinkResult};

use crate::la::DenseMatrix;
use crate::{Error, Result};

/// Parameters shared by the blocked algorithms.
#[derive(Clone, Debug, PartialEq)]
pub struct RankRevealConfig {
    pub block_size: usize,
    pub threshold: f64,
    pub power_iters: usize,
    /// Cap on the number of basis columns; `None` means `min(m, n)`.
    pub max_rank: Option<usize>,
    /// Use twice-orthogonalization when forming each block.
    pub stabilized: bool,
    /// Track the QB residual through `E -= ||B_i||_F^2` instead of
    /// forming `A - QB`.
    pub ei_stop: bool,
}

impl RankRevealConfig {
    pub fn new(block_size: usize, threshold: f64) -> Self {
        RankRevealConfig {
            block_size,
            threshold,
            power_iters: 0,
            max_rank: None,
            stabilized: true,
            ei_stop: false,
        }
    }

    pub fn power_iters(mut self, q: usize) -> Self {
        self.power_iters = q;
        self
    }

    pub fn max_rank(mut self, cap: usize) -> Self {
        self.max_rank = Some(cap);
        self
    }

    pub fn stabilized(mut self, on: bool) -> Self {
        self.stabilized = on;
        self
    }

    pub fn ei_stop(mut self, on: bool) -> Self {
        self.ei_stop = on;
        self
    }

    /// Checks the parameters against an `m x n` input and returns the
    /// effective rank cap.
    pub fn rank_cap(&self, m: usize, n: usize) -> Result<usize> {
        if self.block_size == 0 {
            return Err(Error::InvalidArgument("block size must be at least 1".into()));
        }
        if !(self.threshold > 0.0) || !self.threshold.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "threshold must be positive and finite, got {}",
                self.threshold
            )));
        }
        let full = m.min(n);
        match self.max_rank {
            Some(cap) if cap > full => Err(Error::InvalidArgument(format!(
                "max rank {cap} exceeds min(m, n) = {full}"
            ))),
            Some(cap) => Ok(cap),
            None => Ok(full),
        }
    }
}

/// Output of a threshold-driven rank-revealing run.
#[derive(Clone, Debug)]
pub struct ApproxResult {
    /// Column-orthonormal `m x rank` basis.
    pub q: DenseMatrix,
    pub rank: usize,
    /// Estimated singular values, non-increasing, all above the threshold.
    pub sing_vals: Vec<f64>,
    /// Number of columns appended per block.
    pub blocks: Vec<usize>,
    /// `||A - Q Q^T A||_F`, filled in by [`ApproxResult::compute_residual`].
    pub residual_fro: Option<f64>,
    /// The rank cap was reached before any Ritz value fell below `theta^2`.
    pub threshold_unreached: bool,
}

impl ApproxResult {
    pub fn compute_residual(&mut self, a: &DenseMatrix) -> f64 {
        let r = a.project_out(&self.q).expect("conformal").frobenius_norm();
        self.residual_fro = Some(r);
        r
    }

    /// Basis after the first `l` blocks.
    pub fn basis_after(&self, l: usize) -> DenseMatrix {
        let cols: usize = self.blocks[..l].iter().sum();
        self.q.columns(0, cols)
    }
}
