//! Dense linear algebra: matrices, Gaussian sampling, QR, eigen and
//! singular value decompositions.

mod eig;
pub(crate) mod kernels;
mod matrix;
mod qr;
mod rng;
mod svd;

pub use eig::eig_desc;
pub use matrix::DenseMatrix;
pub use qr::{orth, qr_thin, reorth2, QrFactors};
pub use rng::{gaussian, RngStream};
pub use svd::{singular_values, spectral_norm, svd_small, Svd};
