use super::DenseMatrix;
use crate::{Error, Result};

const MAX_SWEEPS: usize = 100;

/// Eigen-decomposition of a symmetric matrix with eigenvalues in
/// descending order: `M = V diag(D) V^T`.
///
/// The input is symmetrized as `(M + M^T)/2` and diagonalized by cyclic
/// Jacobi rotations until the off-diagonal Frobenius mass drops below
/// `1e-14 * ||M||_F`.
pub fn eig_desc(m: &DenseMatrix) -> Result<(DenseMatrix, Vec<f64>)> {
    let mut a = m.symmetrize()?;
    let n = a.rows();
    let mut v = DenseMatrix::identity(n);
    let tol = 1e-14 * a.frobenius_norm();

    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= tol {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let (app, aqq) = (a[(p, p)], a[(q, q)]);
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + theta.hypot(1.0));
                let c = 1.0 / t.hypot(1.0);
                let s = t * c;
                rotate(&mut a, &mut v, p, q, c, s, t, apq);
            }
        }
    }

    let d: Vec<f64> = (0..n).map(|i| a[(i, i)]).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[j].total_cmp(&d[i]).then(i.cmp(&j)));
    let sorted_d = order.iter().map(|&i| d[i]).collect();
    let mut sorted_v = DenseMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        sorted_v.col_mut(dst).copy_from_slice(v.col(src));
    }
    Ok((sorted_v, sorted_d))
}

fn off_diagonal_norm(a: &DenseMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for j in 0..n {
        for i in 0..n {
            if i != j {
                s += a[(i, j)] * a[(i, j)];
            }
        }
    }
    s.sqrt()
}

#[allow(clippy::too_many_arguments)]
fn rotate(
    a: &mut DenseMatrix,
    v: &mut DenseMatrix,
    p: usize,
    q: usize,
    c: f64,
    s: f64,
    t: f64,
    apq: f64,
) {
    let n = a.rows();
    a[(p, p)] -= t * apq;
    a[(q, q)] += t * apq;
    a[(p, q)] = 0.0;
    a[(q, p)] = 0.0;
    for k in 0..n {
        if k == p || k == q {
            continue;
        }
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        let nkp = c * akp - s * akq;
        let nkq = s * akp + c * akq;
        a[(k, p)] = nkp;
        a[(p, k)] = nkp;
        a[(k, q)] = nkq;
        a[(q, k)] = nkq;
    }
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = c * vkp - s * vkq;
        v[(k, q)] = s * vkp + c * vkq;
    }
}

/// Eigenvalues of a symmetric tridiagonal matrix (implicit QL with
/// Wilkinson shifts), returned in descending order.
///
/// `diag` has length n, `off` has length n-1.
pub(crate) fn tridiagonal_eigenvalues(diag: &[f64], off: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    let mut d = diag.to_vec();
    let mut e = vec![0.0; n];
    e[..n.saturating_sub(1)].copy_from_slice(&off[..n.saturating_sub(1)]);

    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd || e[m] == 0.0 {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::NoConvergence("tridiagonal QL".into()));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d.sort_by(|a, b| b.total_cmp(a));
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::la::{gaussian, spectral_norm, RngStream};

    #[test]
    fn diagonal_input_sorted() {
        let m = DenseMatrix::from_diag(3, 3, &[1.0, 4.0, 2.0]);
        let (v, d) = eig_desc(&m).unwrap();
        assert_eq!(d, vec![4.0, 2.0, 1.0]);
        assert_eq!(v[(1, 0)].abs(), 1.0);
        assert_eq!(v[(2, 1)].abs(), 1.0);
        assert_eq!(v[(0, 2)].abs(), 1.0);
    }

    #[test]
    fn two_by_two() {
        let m = DenseMatrix::from_rows(&[&[2.0, 1.0], &[1.0, 2.0]]).unwrap();
        let (_, d) = eig_desc(&m).unwrap();
        assert!((d[0] - 3.0).abs() < 1e-14 && (d[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn random_symmetric_reconstructs() {
        let g = gaussian(&mut RngStream::new(4), 20, 20);
        let m = g.add(&g.transpose()).unwrap();
        let (v, d) = eig_desc(&m).unwrap();
        let rec = v.scale_columns(&d).matmul_t(&v).unwrap();
        let norm = spectral_norm(&m);
        assert!(spectral_norm(&rec.sub(&m).unwrap()) <= 1e-10 * norm);
        assert!(spectral_norm(&v.gram_defect()) <= 1e-12);
        assert!(d.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn rejects_non_square() {
        assert!(matches!(
            eig_desc(&DenseMatrix::zeros(2, 3)),
            Err(Error::NotSquare { .. })
        ));
    }

    #[test]
    fn tridiagonal_matches_jacobi() {
        let d = [2.0, -1.0, 3.5, 0.25, 1.0];
        let e = [0.5, 1.5, -0.75, 2.0];
        let m = DenseMatrix::from_fn(5, 5, |i, j| {
            if i == j {
                d[i]
            } else if i + 1 == j {
                e[i]
            } else if j + 1 == i {
                e[j]
            } else {
                0.0
            }
        });
        let (_, jac) = eig_desc(&m).unwrap();
        let ql = tridiagonal_eigenvalues(&d, &e).unwrap();
        for (a, b) in jac.iter().zip(&ql) {
            assert!((a - b).abs() < 1e-13, "{a} vs {b}");
        }
    }
}
