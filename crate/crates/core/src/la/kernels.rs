//! Raw column-major kernels on slices with explicit leading dimensions.
//!
//! Every kernel fixes its floating-point evaluation order, so results are
//! bit-reproducible for identical inputs regardless of call site.

/// Dot product with four interleaved partial sums.
#[inline]
pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    let mut acc = [0.0f64; 4];
    let xc = x.chunks_exact(4);
    let yc = y.chunks_exact(4);
    let (xr, yr) = (xc.remainder(), yc.remainder());
    for (a, b) in xc.zip(yc) {
        acc[0] += a[0] * b[0];
        acc[1] += a[1] * b[1];
        acc[2] += a[2] * b[2];
        acc[3] += a[3] * b[3];
    }
    let mut tail = 0.0;
    for (a, b) in xr.iter().zip(yr) {
        tail += a * b;
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// `y += alpha * x`
#[inline]
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Euclidean norm with scaling against overflow/underflow.
pub fn nrm2(x: &[f64]) -> f64 {
    let scale = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 || !scale.is_finite() {
        return scale;
    }
    if scale > 1e-150 && scale < 1e150 {
        return dot(x, x).sqrt();
    }
    let inv = 1.0 / scale;
    let s: f64 = x.iter().map(|v| (v * inv) * (v * inv)).sum();
    scale * s.sqrt()
}

/// `C[m x n] += sign * A[m x k] * B[k x n]`.
///
/// Four columns of A are folded into each pass over a column of C.
#[allow(clippy::too_many_arguments)]
pub fn gemm_nn_acc(
    m: usize,
    n: usize,
    k: usize,
    sign: f64,
    a: &[f64],
    lda: usize,
    b: &[f64],
    ldb: usize,
    c: &mut [f64],
    ldc: usize,
) {
    if m == 0 || n == 0 || k == 0 {
        return;
    }
    const KB: usize = 4;
    let kmain = k - k % KB;
    for j in 0..n {
        let bj = &b[j * ldb..j * ldb + k];
        let cj = &mut c[j * ldc..j * ldc + m];
        let mut p = 0;
        while p < kmain {
            let (b0, b1, b2, b3) = (
                sign * bj[p],
                sign * bj[p + 1],
                sign * bj[p + 2],
                sign * bj[p + 3],
            );
            let a0 = &a[p * lda..p * lda + m];
            let a1 = &a[(p + 1) * lda..(p + 1) * lda + m];
            let a2 = &a[(p + 2) * lda..(p + 2) * lda + m];
            let a3 = &a[(p + 3) * lda..(p + 3) * lda + m];
            for i in 0..m {
                cj[i] += (a0[i] * b0 + a1[i] * b1) + (a2[i] * b2 + a3[i] * b3);
            }
            p += KB;
        }
        while p < k {
            let bp = sign * bj[p];
            let ap = &a[p * lda..p * lda + m];
            for i in 0..m {
                cj[i] += ap[i] * bp;
            }
            p += 1;
        }
    }
}

/// `C[m x n] = A[k x m]^T * B[k x n]` (overwrites C).
#[allow(clippy::too_many_arguments)]
pub fn gemm_tn(
    m: usize,
    n: usize,
    k: usize,
    a: &[f64],
    lda: usize,
    b: &[f64],
    ldb: usize,
    c: &mut [f64],
    ldc: usize,
) {
    for j in 0..n {
        let bj = &b[j * ldb..j * ldb + k];
        for i in 0..m {
            let ai = &a[i * lda..i * lda + k];
            c[j * ldc + i] = dot(ai, bj);
        }
    }
}
