//! Matrix and image files.

mod mm;
mod pnm;
mod raw;

use std::fs;
use std::path::Path;

use threshrank::DenseMatrix;

use crate::error::{CliError, CliResult};

pub use mm::{format_matrix_market, parse_matrix_market, MmLayout};
pub use pnm::{decode_pnm, to_pixel, Image, MAX_SAMPLES};
pub use raw::{decode_raw, encode_raw, MAGIC};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatrixFormat {
    MatrixMarketArray,
    MatrixMarketCoordinate,
    RawF64,
}

fn origin(path: &Path) -> String {
    path.display().to_string()
}

pub fn read_bytes(path: &Path) -> CliResult<Vec<u8>> {
    fs::read(path).map_err(|e| CliError::io(path, e))
}

pub fn write_bytes(path: &Path, bytes: &[u8]) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

/// Reads either format, recognized by its leading bytes.
pub fn read_matrix(path: &Path) -> CliResult<DenseMatrix> {
    let bytes = read_bytes(path)?;
    if bytes.starts_with(MAGIC) {
        return decode_raw(&bytes, &origin(path));
    }
    let text = String::from_utf8(bytes).map_err(|_| CliError::format(&origin(path), 1, "not UTF-8 text"))?;
    parse_matrix_market(&text, &origin(path))
}

pub fn write_matrix(path: &Path, a: &DenseMatrix, format: MatrixFormat) -> CliResult<()> {
    let bytes = match format {
        MatrixFormat::MatrixMarketArray => format_matrix_market(a, MmLayout::Array).into_bytes(),
        MatrixFormat::MatrixMarketCoordinate => format_matrix_market(a, MmLayout::Coordinate).into_bytes(),
        MatrixFormat::RawF64 => encode_raw(a)?,
    };
    write_bytes(path, &bytes)
}

pub fn read_image(path: &Path) -> CliResult<Image> {
    decode_pnm(&read_bytes(path)?, &origin(path))
}

pub fn write_image(path: &Path, img: &Image) -> CliResult<()> {
    write_bytes(path, &img.encode())
}
