//! Singular value decompositions for small and medium dense matrices.

use super::eig::tridiagonal_eigenvalues;
use super::kernels::{axpy, dot};
use super::qr::{make_reflector, qr_thin};
use super::DenseMatrix;

const MAX_SWEEPS: usize = 60;

/// Thin SVD `A = U diag(s) V^T` with `s` descending; `U` is `m x k`,
/// `V` is `n x k`, `k = min(m, n)`.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: DenseMatrix,
    pub s: Vec<f64>,
    pub v: DenseMatrix,
}

/// Full thin SVD by one-sided Jacobi, preceded by a QR step when the
/// matrix is not square.
pub fn svd_small(a: &DenseMatrix) -> Svd {
    let (m, n) = a.shape();
    if m < n {
        let t = svd_small(&a.transpose());
        return Svd {
            u: t.v,
            s: t.s,
            v: t.u,
        };
    }
    if n == 0 {
        return Svd {
            u: DenseMatrix::zeros(m, 0),
            s: Vec::new(),
            v: DenseMatrix::zeros(0, 0),
        };
    }
    let (q, r) = if m > n {
        let f = qr_thin(a);
        (Some(f.q), f.r)
    } else {
        (None, a.clone())
    };
    let (ur, s, v) = jacobi_square(r);
    let u = match q {
        Some(q) => q.matmul(&ur).expect("conformal"),
        None => ur,
    };
    Svd { u, s, v }
}

fn jacobi_square(mut w: DenseMatrix) -> (DenseMatrix, Vec<f64>, DenseMatrix) {
    let n = w.cols();
    let mut v = DenseMatrix::identity(n);
    let eps = f64::EPSILON;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = dot(w.col(p), w.col(p));
                let beta = dot(w.col(q), w.col(q));
                let gamma = dot(w.col(p), w.col(q));
                if gamma == 0.0 || gamma.abs() <= eps * (alpha.sqrt() * beta.sqrt()) {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + zeta.hypot(1.0));
                let c = 1.0 / t.hypot(1.0);
                let s = c * t;
                rotate_columns(&mut w, p, q, c, s);
                rotate_columns(&mut v, p, q, c, s);
            }
        }
        if !rotated {
            break;
        }
    }

    let norms: Vec<f64> = (0..n).map(|j| super::kernels::nrm2(w.col(j))).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]).then(i.cmp(&j)));

    let m = w.rows();
    let mut u = DenseMatrix::zeros(m, n);
    let mut vs = DenseMatrix::zeros(n, n);
    let mut s = Vec::with_capacity(n);
    let mut missing = Vec::new();
    for (dst, &src) in order.iter().enumerate() {
        let sigma = norms[src];
        s.push(sigma);
        vs.col_mut(dst).copy_from_slice(v.col(src));
        if sigma > 0.0 {
            let inv = 1.0 / sigma;
            for (o, x) in u.col_mut(dst).iter_mut().zip(w.col(src)) {
                *o = x * inv;
            }
        } else {
            missing.push(dst);
        }
    }
    complete_basis(&mut u, &missing);
    (u, s, vs)
}

fn rotate_columns(a: &mut DenseMatrix, p: usize, q: usize, c: f64, s: f64) {
    let m = a.rows();
    let data = a.as_mut_slice();
    let (lo, hi) = data.split_at_mut(q * m);
    let cp = &mut lo[p * m..(p + 1) * m];
    let cq = &mut hi[..m];
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let (xp, yq) = (*x, *y);
        *x = c * xp - s * yq;
        *y = s * xp + c * yq;
    }
}

/// Fills the listed columns of `u` with unit vectors orthogonal to all
/// other columns, by Gram-Schmidt on the coordinate vectors.
fn complete_basis(u: &mut DenseMatrix, missing: &[usize]) {
    let (m, n) = u.shape();
    let mut filled: Vec<usize> = (0..n).filter(|j| !missing.contains(j)).collect();
    let mut e = 0;
    for &dst in missing {
        while e < m {
            let mut x = vec![0.0; m];
            x[e] = 1.0;
            e += 1;
            for _ in 0..2 {
                for &j in &filled {
                    let c = dot(u.col(j), &x);
                    axpy(-c, u.col(j), &mut x);
                }
            }
            let norm = super::kernels::nrm2(&x);
            if norm > 0.5 {
                let inv = 1.0 / norm;
                for (o, xi) in u.col_mut(dst).iter_mut().zip(&x) {
                    *o = xi * inv;
                }
                filled.push(dst);
                break;
            }
        }
    }
}

/// Singular values only, descending, `min(m, n)` of them.
///
/// Reduces to upper bidiagonal form and takes the nonnegative eigenvalues
/// of the associated zero-diagonal tridiagonal matrix of twice the size.
pub fn singular_values(a: &DenseMatrix) -> Vec<f64> {
    let (m, n) = a.shape();
    if m < n {
        return singular_values(&a.transpose());
    }
    if n == 0 {
        return Vec::new();
    }
    let r = if m > n { qr_thin(a).r } else { a.clone() };
    let (d, e) = bidiagonalize(r);
    let mut off = Vec::with_capacity(2 * n - 1);
    for i in 0..n {
        off.push(d[i]);
        if i + 1 < n {
            off.push(e[i]);
        }
    }
    match tridiagonal_eigenvalues(&vec![0.0; 2 * n], &off) {
        Ok(ev) => ev[..n].iter().map(|x| x.max(0.0)).collect(),
        Err(_) => svd_small(a).s,
    }
}

/// Largest singular value; zero for an empty matrix.
pub fn spectral_norm(a: &DenseMatrix) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    singular_values(a)[0]
}

/// Householder reduction of a square matrix to upper bidiagonal form.
/// Returns the diagonal and superdiagonal.
fn bidiagonalize(mut a: DenseMatrix) -> (Vec<f64>, Vec<f64>) {
    let n = a.cols();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n.saturating_sub(1)];
    let mut z = vec![0.0; n];
    let mut row = vec![0.0; n];
    for k in 0..n {
        // left reflector on column k, rows k..n
        let (tau, beta) = {
            let col = a.col_mut(k);
            let alpha = col[k];
            make_reflector(alpha, &mut col[k + 1..])
        };
        d[k] = beta;
        if tau != 0.0 {
            let v: Vec<f64> = a.col(k)[k + 1..].to_vec();
            for c in k + 1..n {
                let cc = a.col_mut(c);
                let w = tau * (cc[k] + dot(&v, &cc[k + 1..]));
                cc[k] -= w;
                axpy(-w, &v, &mut cc[k + 1..]);
            }
        }
        if k + 1 >= n {
            continue;
        }
        // right reflector on row k, columns k+1..n
        let len = n - k - 1;
        for (j, r) in row[..len].iter_mut().enumerate() {
            *r = a[(k, k + 1 + j)];
        }
        let alpha = row[0];
        let (tau, beta) = make_reflector(alpha, &mut row[1..len]);
        e[k] = beta;
        if tau == 0.0 {
            continue;
        }
        row[0] = 1.0;
        // z = A[k+1.., k+1..] v
        let zs = &mut z[..n - k - 1];
        zs.iter_mut().for_each(|x| *x = 0.0);
        for j in 0..len {
            axpy(row[j], &a.col(k + 1 + j)[k + 1..], zs);
        }
        for j in 0..len {
            let coef = -tau * row[j];
            axpy(coef, zs, &mut a.col_mut(k + 1 + j)[k + 1..]);
        }
    }
    (d, e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::la::{gaussian, orth, RngStream};

    fn reconstruct(f: &Svd) -> DenseMatrix {
        f.u.scale_columns(&f.s).matmul_t(&f.v).unwrap()
    }

    #[test]
    fn known_diagonal() {
        let a = DenseMatrix::from_diag(4, 3, &[1.0, 3.0, 2.0]);
        let f = svd_small(&a);
        assert_eq!(f.s, vec![3.0, 2.0, 1.0]);
        for (x, y) in singular_values(&a).iter().zip([3.0, 2.0, 1.0]) {
            assert!((x - y).abs() < 1e-14);
        }
    }

    #[test]
    fn random_shapes_reconstruct() {
        let mut rng = RngStream::new(7);
        for (m, n) in [(6, 6), (15, 4), (4, 15), (1, 5), (5, 1)] {
            let a = gaussian(&mut rng, m, n);
            let f = svd_small(&a);
            assert_eq!(f.s.len(), m.min(n));
            assert!(reconstruct(&f).sub(&a).unwrap().max_abs() < 1e-12);
            assert!(f.u.gram_defect().max_abs() < 1e-12);
            assert!(f.v.gram_defect().max_abs() < 1e-12);
            let fast = singular_values(&a);
            for (x, y) in f.s.iter().zip(&fast) {
                assert!((x - y).abs() < 1e-12 * f.s[0], "{m}x{n}: {x} vs {y}");
            }
        }
    }

    #[test]
    fn graded_spectrum_values() {
        let mut rng = RngStream::new(12);
        let n = 30;
        let u = orth(&gaussian(&mut rng, 50, n));
        let v = orth(&gaussian(&mut rng, n, n));
        let sig: Vec<f64> = (0..n).map(|i| 10f64.powi(-(i as i32) / 2)).collect();
        let a = u.scale_columns(&sig).matmul_t(&v).unwrap();
        let f = svd_small(&a);
        let fast = singular_values(&a);
        for i in 0..n {
            assert!((f.s[i] - sig[i]).abs() <= 1e-14 * 4.0 + 1e-12 * sig[i]);
            assert!((fast[i] - sig[i]).abs() <= 1e-14 * 4.0 + 1e-12 * sig[i]);
        }
    }

    #[test]
    fn rank_deficient_u_is_orthonormal() {
        let mut rng = RngStream::new(3);
        let x = gaussian(&mut rng, 8, 2);
        let a = x.hcat(&DenseMatrix::zeros(8, 3)).unwrap();
        let f = svd_small(&a);
        assert!(f.u.gram_defect().max_abs() < 1e-12);
        assert_eq!(f.s[4], 0.0);
        assert!(reconstruct(&f).sub(&a).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn zero_matrix() {
        let a = DenseMatrix::zeros(3, 3);
        assert_eq!(singular_values(&a), vec![0.0; 3]);
        assert_eq!(spectral_norm(&a), 0.0);
        let f = svd_small(&a);
        assert!(f.u.gram_defect().max_abs() < 1e-15);
    }

    #[test]
    fn spectral_norm_of_rank_one() {
        let x = DenseMatrix::from_rows(&[&[3.0], &[4.0]]).unwrap();
        let y = DenseMatrix::from_rows(&[&[1.0], &[0.0], &[0.0]]).unwrap();
        let a = x.matmul_t(&y).unwrap();
        assert!((spectral_norm(&a) - 5.0).abs() < 1e-14);
    }
}
