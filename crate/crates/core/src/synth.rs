//! Test matrices `A = U diag(sigma) V^T` with prescribed spectra.

use crate::la::{gaussian, orth, DenseMatrix, RngStream};
use crate::{Error, Result};

/// Recipe for a `2n x n` matrix with a three-segment geometric spectrum:
/// `sigma_1..sigma_k1`, `sigma_{k1+1}..sigma_k2`, `sigma_{k2+1}..sigma_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticSpec {
    pub n: usize,
    pub k1: usize,
    pub k2: usize,
    /// `(first, last)` value of each segment.
    pub segments: [(f64, f64); 3],
    pub seed: u64,
}

const DEFAULT_SEGMENTS: [(f64, f64); 3] = [(1.0, 1e-4), (1e-6, 1e-8), (1e-10, 1e-15)];

impl SyntheticSpec {
    /// `n = 400, k1 = 10, k2 = 20`; numerical rank 10 at `theta = 1e-5`.
    pub fn type_one(seed: u64) -> Self {
        SyntheticSpec {
            n: 400,
            k1: 10,
            k2: 20,
            segments: DEFAULT_SEGMENTS,
            seed,
        }
    }

    /// `n = 800, k1 = 5, k2 = 20`; numerical rank 20 at `theta = 1e-9`.
    pub fn type_two(seed: u64) -> Self {
        SyntheticSpec {
            n: 800,
            k1: 5,
            k2: 20,
            segments: DEFAULT_SEGMENTS,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(1 <= self.k1 && self.k1 < self.k2 && self.k2 < self.n) {
            return Err(Error::InvalidArgument(format!(
                "need 1 <= k1 < k2 < n, got k1={}, k2={}, n={}",
                self.k1, self.k2, self.n
            )));
        }
        let mut prev = f64::INFINITY;
        for &(hi, lo) in &self.segments {
            if !(hi > 0.0 && lo > 0.0 && hi >= lo && hi <= prev) {
                return Err(Error::InvalidArgument(format!(
                    "segment ({hi}, {lo}) is not a positive non-increasing range"
                )));
            }
            prev = lo;
        }
        Ok(())
    }

    pub fn spectrum(&self) -> Vec<f64> {
        let [s1, s2, s3] = self.segments;
        let mut sigma = geometric(s1.0, s1.1, self.k1);
        sigma.extend(geometric(s2.0, s2.1, self.k2 - self.k1));
        sigma.extend(geometric(s3.0, s3.1, self.n - self.k2));
        sigma
    }
}

/// `count` values from `first` to `last` with a constant ratio; both
/// endpoints are assigned exactly.
pub fn geometric(first: f64, last: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![first],
        _ => {
            let (a, b) = (first.ln(), last.ln());
            let step = (b - a) / (count - 1) as f64;
            let mut v: Vec<f64> = (0..count).map(|i| (a + step * i as f64).exp()).collect();
            v[0] = first;
            v[count - 1] = last;
            v
        }
    }
}

/// Realized matrix together with its exact factors.
#[derive(Clone, Debug)]
pub struct SyntheticMatrix {
    pub a: DenseMatrix,
    pub u: DenseMatrix,
    pub v: DenseMatrix,
    pub sigma: Vec<f64>,
}

impl SyntheticMatrix {
    pub fn from_factors(u: DenseMatrix, sigma: Vec<f64>, v: DenseMatrix) -> Result<Self> {
        let a = u.scale_columns(&sigma).matmul_t(&v)?;
        Ok(SyntheticMatrix { a, u, v, sigma })
    }

    /// Leading `k` left singular vectors.
    pub fn u_k(&self, k: usize) -> DenseMatrix {
        self.u.columns(0, k)
    }

    /// Leading `k` right singular vectors.
    pub fn v_k(&self, k: usize) -> DenseMatrix {
        self.v.columns(0, k)
    }

    pub fn norm2(&self) -> f64 {
        self.sigma.first().copied().unwrap_or(0.0)
    }
}

/// `orth(gaussian(m, n))`.
pub fn random_orthonormal(rng: &mut RngStream, m: usize, n: usize) -> Result<DenseMatrix> {
    if m < n {
        return Err(Error::InvalidArgument(format!("need m >= n, got {m}x{n}")));
    }
    Ok(orth(&gaussian(rng, m, n)))
}

/// Builds `A = U diag(sigma) V^T` of size `2n x n`. U is drawn first,
/// then V, from one stream seeded with `spec.seed`.
pub fn make_synthetic(spec: &SyntheticSpec) -> Result<SyntheticMatrix> {
    spec.validate()?;
    let mut rng = RngStream::new(spec.seed);
    let u = random_orthonormal(&mut rng, 2 * spec.n, spec.n)?;
    let v = random_orthonormal(&mut rng, spec.n, spec.n)?;
    SyntheticMatrix::from_factors(u, spec.spectrum(), v)
}

/// `m x n` matrix whose first `k` singular values fall geometrically from
/// 1 to `sigma_k` and the remaining ones from `sigma_k1` to
/// `sigma_k1 * 1e-6` (all zero when `sigma_k1 = 0`).
pub fn make_gap_matrix(
    rng: &mut RngStream,
    m: usize,
    n: usize,
    k: usize,
    sigma_k: f64,
    sigma_k1: f64,
) -> Result<SyntheticMatrix> {
    let p = m.min(n);
    if !(sigma_k > sigma_k1 && sigma_k1 >= 0.0) || k == 0 || k > p {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= k <= min(m, n) and sigma_k > sigma_k1 >= 0, got k={k}, {sigma_k}, {sigma_k1}"
        )));
    }
    let mut sigma = if k == 1 {
        vec![sigma_k]
    } else {
        geometric(1.0, sigma_k, k)
    };
    if sigma_k1 == 0.0 {
        sigma.resize(p, 0.0);
    } else {
        sigma.extend(geometric(sigma_k1, sigma_k1 * 1e-6, p - k));
    }
    let u = random_orthonormal(rng, m, p)?;
    let v = random_orthonormal(rng, n, p)?;
    SyntheticMatrix::from_factors(u, sigma, v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::la::{singular_values, spectral_norm, svd_small};

    #[test]
    fn type_one_endpoints_exact() {
        let s = SyntheticSpec::type_one(0).spectrum();
        assert_eq!(s.len(), 400);
        assert_eq!(s[0], 1.0);
        assert_eq!(s[9], 1e-4);
        assert_eq!(s[10], 1e-6);
        assert_eq!(s[19], 1e-8);
        assert_eq!(s[20], 1e-10);
        assert_eq!(s[399], 1e-15);
    }

    #[test]
    fn segments_have_constant_ratio() {
        let s = SyntheticSpec::type_two(0).spectrum();
        for seg in [&s[0..5], &s[5..20], &s[20..800]] {
            let r0 = seg[1] / seg[0];
            for w in seg.windows(2) {
                assert!((w[1] / w[0] - r0).abs() < 1e-12);
            }
        }
        // 1e-6 .. 1e-8 over 15 values
        assert!((s[6] / s[5] - 10f64.powf(-2.0 / 14.0)).abs() < 1e-13);
    }

    #[test]
    fn random_orthonormal_properties() {
        let q = random_orthonormal(&mut RngStream::new(1), 3, 3).unwrap();
        assert!(q.gram_defect().max_abs() < 1e-12);
        let a = random_orthonormal(&mut RngStream::new(5), 20, 4).unwrap();
        let b = random_orthonormal(&mut RngStream::new(5), 20, 4).unwrap();
        assert_eq!(a, b);
        assert!(random_orthonormal(&mut RngStream::new(0), 2, 3).is_err());
    }

    #[test]
    fn small_synthetic_reconstructs() {
        let spec = SyntheticSpec {
            n: 30,
            k1: 4,
            k2: 9,
            segments: DEFAULT_SEGMENTS,
            seed: 3,
        };
        let s = make_synthetic(&spec).unwrap();
        assert_eq!(s.a.shape(), (60, 30));
        let f = svd_small(&s.a);
        for (x, y) in f.s.iter().zip(&s.sigma) {
            assert!((x - y).abs() <= 1e-12 * s.sigma[0]);
        }
        assert!(s.u.gram_defect().max_abs() < 1e-12);
        assert!(s.v.gram_defect().max_abs() < 1e-12);
    }

    #[test]
    fn gap_matrix_exact_rank() {
        let g = make_gap_matrix(&mut RngStream::new(2), 20, 12, 5, 1.0, 0.0).unwrap();
        let s = singular_values(&g.a);
        assert!(s[4] > 0.5);
        assert!(s[5] < 1e-14);
        assert!((spectral_norm(&g.a) - 1.0).abs() < 1e-13);
    }

    #[test]
    fn gap_matrix_spectrum() {
        let g = make_gap_matrix(&mut RngStream::new(4), 40, 30, 10, 1e-2, 1e-6).unwrap();
        assert!(g.sigma.windows(2).all(|w| w[0] >= w[1]));
        assert_eq!(g.sigma[9], 1e-2);
        assert_eq!(g.sigma[10], 1e-6);
        assert_eq!(g.sigma[29], 1e-12);
    }

    #[test]
    fn invalid_specs_rejected() {
        let mut s = SyntheticSpec::type_one(0);
        s.k2 = s.k1;
        assert!(make_synthetic(&s).is_err());
        assert!(make_gap_matrix(&mut RngStream::new(0), 5, 5, 2, 1e-3, 1e-2).is_err());
    }
}
