//! Blocked Householder QR and the orthonormalization helpers built on it.

use super::kernels::{axpy, dot, gemm_nn_acc, gemm_tn, nrm2};
use super::DenseMatrix;

const PANEL: usize = 32;

/// Thin QR factors with `diag(R) >= 0`.
#[derive(Clone, Debug)]
pub struct QrFactors {
    pub q: DenseMatrix,
    pub r: DenseMatrix,
}

/// Compact Householder factorization: reflectors stored below the diagonal
/// of `packed`, R on and above it.
struct Householder {
    packed: DenseMatrix,
    tau: Vec<f64>,
}

/// Generates `H = I - tau v v^T` with `v[0] = 1` mapping `[alpha; x]` to
/// `[beta; 0]`. Returns `(tau, beta)` and overwrites `x` with `v[1..]`.
pub(super) fn make_reflector(alpha: f64, x: &mut [f64]) -> (f64, f64) {
    let xnorm = nrm2(x);
    if xnorm == 0.0 {
        return (0.0, alpha);
    }
    let norm = alpha.hypot(xnorm);
    let beta = if alpha >= 0.0 { -norm } else { norm };
    let tau = (beta - alpha) / beta;
    let inv = 1.0 / (alpha - beta);
    x.iter_mut().for_each(|v| *v *= inv);
    (tau, beta)
}

/// Extracts the unit lower-trapezoidal panel `V` for columns `k..k+nb`.
fn panel_vectors(packed: &DenseMatrix, k: usize, nb: usize) -> DenseMatrix {
    let m = packed.rows();
    let rows = m - k;
    let mut v = DenseMatrix::zeros(rows, nb);
    for jj in 0..nb {
        let src = &packed.col(k + jj)[k..];
        let dst = v.col_mut(jj);
        dst[jj] = 1.0;
        dst[jj + 1..].copy_from_slice(&src[jj + 1..]);
    }
    v
}

/// Upper triangular `T` with `H_1 ... H_nb = I - V T V^T`.
fn panel_t(v: &DenseMatrix, tau: &[f64]) -> DenseMatrix {
    let nb = tau.len();
    let mut t = DenseMatrix::zeros(nb, nb);
    for i in 0..nb {
        t[(i, i)] = tau[i];
        if i == 0 || tau[i] == 0.0 {
            continue;
        }
        // w = V[:, 0..i]^T v_i
        let vi = &v.col(i)[i..];
        let w: Vec<f64> = (0..i).map(|p| dot(&v.col(p)[i..], vi)).collect();
        for r in 0..i {
            let mut s = 0.0;
            for p in r..i {
                s += t[(r, p)] * w[p];
            }
            t[(r, i)] = -tau[i] * s;
        }
    }
    t
}

/// Applies `(I - V T V^T)` (or its transpose) from the left to the
/// column-major block of `target` at rows `k..`, columns `c0..c1`.
fn apply_block_reflector(
    v: &DenseMatrix,
    t: &DenseMatrix,
    transpose: bool,
    target: &mut DenseMatrix,
    k: usize,
    c0: usize,
    c1: usize,
) {
    let nc = c1 - c0;
    if nc == 0 {
        return;
    }
    let m = target.rows();
    let rows = m - k;
    let nb = v.cols();
    let off = c0 * m + k;
    let mut w = vec![0.0; nb * nc];
    gemm_tn(
        nb,
        nc,
        rows,
        v.as_slice(),
        rows,
        &target.as_slice()[off..],
        m,
        &mut w,
        nb,
    );
    // w <- T^T w (transpose) or T w, T upper triangular.
    let mut tw = vec![0.0; nb * nc];
    for j in 0..nc {
        let wj = &w[j * nb..(j + 1) * nb];
        let out = &mut tw[j * nb..(j + 1) * nb];
        for i in 0..nb {
            let mut s = 0.0;
            if transpose {
                for p in 0..=i {
                    s += t[(p, i)] * wj[p];
                }
            } else {
                for p in i..nb {
                    s += t[(i, p)] * wj[p];
                }
            }
            out[i] = s;
        }
    }
    gemm_nn_acc(
        rows,
        nc,
        nb,
        -1.0,
        v.as_slice(),
        rows,
        &tw,
        nb,
        &mut target.as_mut_slice()[off..],
        m,
    );
}

fn householder(a: &DenseMatrix) -> Householder {
    let (m, n) = a.shape();
    let kmax = m.min(n);
    let mut packed = a.clone();
    let mut tau = vec![0.0; kmax];
    let mut k = 0;
    while k < kmax {
        let nb = PANEL.min(kmax - k);
        let kend = k + nb;
        for j in k..kend {
            let col = packed.col_mut(j);
            let alpha = col[j];
            let (tj, beta) = make_reflector(alpha, &mut col[j + 1..]);
            col[j] = beta;
            tau[j] = tj;
            if tj == 0.0 {
                continue;
            }
            // apply H_j to the remaining panel columns
            let vtail = packed.col(j)[j + 1..].to_vec();
            for c in j + 1..kend {
                let cc = packed.col_mut(c);
                let w = tj * (cc[j] + dot(&vtail, &cc[j + 1..]));
                cc[j] -= w;
                axpy(-w, &vtail, &mut cc[j + 1..]);
            }
        }
        if kend < n {
            let v = panel_vectors(&packed, k, nb);
            let t = panel_t(&v, &tau[k..kend]);
            apply_block_reflector(&v, &t, true, &mut packed, k, kend, n);
        }
        k = kend;
    }
    Householder { packed, tau }
}

impl Householder {
    /// Explicit thin Q (`m x min(m, n)`).
    fn thin_q(&self) -> DenseMatrix {
        let (m, n) = self.packed.shape();
        let kmax = m.min(n);
        let mut q = DenseMatrix::eye(m, kmax);
        let mut starts: Vec<usize> = (0..kmax).step_by(PANEL).collect();
        starts.reverse();
        for k in starts {
            let nb = PANEL.min(kmax - k);
            let v = panel_vectors(&self.packed, k, nb);
            let t = panel_t(&v, &self.tau[k..k + nb]);
            apply_block_reflector(&v, &t, false, &mut q, k, k, kmax);
        }
        q
    }

    fn r(&self) -> DenseMatrix {
        let (m, n) = self.packed.shape();
        let kmax = m.min(n);
        DenseMatrix::from_fn(kmax, n, |i, j| {
            if i <= j {
                self.packed[(i, j)]
            } else {
                0.0
            }
        })
    }
}

/// Thin QR `A = Q R` with the signs normalized so that `diag(R) >= 0`.
///
/// Columns whose trailing part is exactly zero get the identity reflector,
/// so Q is orthonormal for any input rank.
pub fn qr_thin(a: &DenseMatrix) -> QrFactors {
    let h = householder(a);
    let mut q = h.thin_q();
    let mut r = h.r();
    for j in 0..r.rows() {
        if r[(j, j)] < 0.0 {
            q.col_mut(j).iter_mut().for_each(|v| *v = -*v);
            for c in j..r.cols() {
                r[(j, c)] = -r[(j, c)];
            }
        }
    }
    QrFactors { q, r }
}

/// Orthonormal basis of the columns of `a` (economy Householder QR).
pub fn orth(a: &DenseMatrix) -> DenseMatrix {
    if a.cols() == 0 {
        return DenseMatrix::zeros(a.rows(), 0);
    }
    qr_thin(a).q
}

/// Twice-orthogonalization against an orthonormal `q`:
/// `Y <- Y - Q(Q^T Y); Y <- orth(Y); Z = Y - Q(Q^T Y)`.
pub fn reorth2(y: &DenseMatrix, q: &DenseMatrix) -> DenseMatrix {
    let y = y.project_out(q).expect("conformal");
    let y = orth(&y);
    y.project_out(q).expect("conformal")
}
