use crate::la::{gaussian, orth, svd_small, DenseMatrix, RngStream, Svd};
use crate::{Error, Result};

/// Basic randomized SVD with oversampling `p`; returns rank-`k` factors.
pub fn rsvd(a: &DenseMatrix, k: usize, p: usize, rng: &mut RngStream) -> Result<Svd> {
    let (m, n) = a.shape();
    let l = k + p;
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    if l > m.min(n) {
        return Err(Error::InvalidArgument(format!(
            "k + p = {l} exceeds min(m, n) = {}",
            m.min(n)
        )));
    }
    let omega = gaussian(rng, n, l);
    let q = orth(&a.matmul(&omega)?);
    let b = q.t_matmul(a)?;
    let f = svd_small(&b);
    let u = q.matmul(&f.u.columns(0, k))?;
    Ok(Svd {
        u,
        s: f.s[..k].to_vec(),
        v: f.v.columns(0, k),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::la::spectral_norm;

    #[test]
    fn exact_rank_recovered() {
        let mut rng = RngStream::new(2);
        let u = orth(&gaussian(&mut rng, 50, 6));
        let v = orth(&gaussian(&mut rng, 30, 6));
        let a = u.scale_columns(&[6.0, 5.0, 4.0, 3.0, 2.0, 1.0]).matmul_t(&v).unwrap();
        let f = rsvd(&a, 6, 4, &mut rng).unwrap();
        let approx = f.u.scale_columns(&f.s).matmul_t(&f.v).unwrap();
        assert!(spectral_norm(&a.sub(&approx).unwrap()) <= 1e-10 * 6.0);
        assert!(f.u.gram_defect().max_abs() < 1e-10);
        assert!(f.v.gram_defect().max_abs() < 1e-10);
    }

    #[test]
    fn rank_one_without_oversampling() {
        let x = DenseMatrix::from_rows(&[&[0.6], &[0.8], &[0.0]]).unwrap();
        let y = DenseMatrix::from_rows(&[&[0.0], &[1.0], &[0.0]]).unwrap();
        let a = x.matmul_t(&y).unwrap().scale(3.5);
        let f = rsvd(&a, 1, 0, &mut RngStream::new(0)).unwrap();
        assert!((f.s[0] - 3.5).abs() < 1e-10);
    }

    #[test]
    fn oversized_sketch_rejected() {
        let a = DenseMatrix::zeros(5, 4);
        assert!(rsvd(&a, 3, 2, &mut RngStream::new(0)).is_err());
        assert!(rsvd(&a, 0, 2, &mut RngStream::new(0)).is_err());
    }
}
