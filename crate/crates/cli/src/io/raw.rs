//! Raw little-endian doubles, column-major, after a 16-byte header:
//! 8-byte magic `RAWF64CM`, rows as u32, cols as u32.

use threshrank::DenseMatrix;

use crate::error::{CliError, CliResult};

pub const MAGIC: &[u8; 8] = b"RAWF64CM";

pub fn encode_raw(a: &DenseMatrix) -> CliResult<Vec<u8>> {
    let (m, n) = a.shape();
    let (rows, cols) = match (u32::try_from(m), u32::try_from(n)) {
        (Ok(r), Ok(c)) => (r, c),
        _ => return Err(CliError::Input(format!("{m}x{n} does not fit the raw header"))),
    };
    let mut out = Vec::with_capacity(16 + 8 * m * n);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&rows.to_le_bytes());
    out.extend_from_slice(&cols.to_le_bytes());
    for v in a.as_slice() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    Ok(out)
}

pub fn decode_raw(bytes: &[u8], origin: &str) -> CliResult<DenseMatrix> {
    if bytes.len() < 16 || &bytes[..8] != MAGIC {
        return Err(CliError::format(origin, 0, "missing RAWF64CM header"));
    }
    let rows = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
    let cols = u32::from_le_bytes(bytes[12..16].try_into().unwrap()) as usize;
    let body = &bytes[16..];
    if body.len() != 8 * rows * cols {
        return Err(CliError::format(
            origin,
            0,
            format!("{rows}x{cols} needs {} data bytes, found {}", 8 * rows * cols, body.len()),
        ));
    }
    let data = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok(DenseMatrix::from_col_major(rows, cols, data)?)
}
