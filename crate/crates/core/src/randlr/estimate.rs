use crate::la::{gaussian, kernels::nrm2, DenseMatrix, RngStream};
use crate::{Error, Result};

/// Probabilistic upper estimate of `||(I - QQ^T)A||_2` from `r` Gaussian
/// probes: `10 sqrt(2/pi) max_i ||(I - QQ^T) A w_i||`.
pub fn posterior_spectral_estimate(
    a: &DenseMatrix,
    q: &DenseMatrix,
    r: usize,
    rng: &mut RngStream,
) -> Result<f64> {
    if r == 0 {
        return Err(Error::InvalidArgument("need at least one probe".into()));
    }
    let omega = gaussian(rng, a.cols(), r);
    let y = a.matmul(&omega)?.project_out(q)?;
    let max = (0..r).map(|j| nrm2(y.col(j))).fold(0.0, f64::max);
    Ok(10.0 * (2.0 / std::f64::consts::PI).sqrt() * max)
}
