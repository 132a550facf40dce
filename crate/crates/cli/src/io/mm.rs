//! MatrixMarket `array` and `coordinate` files, real or integer, general.

use std::collections::HashSet;
use std::fmt::Write as _;

use threshrank::DenseMatrix;

use crate::error::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MmLayout {
    Array,
    Coordinate,
}

/// Content lines with their 1-based line numbers; `%` comments and blank
/// lines dropped.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .skip(1)
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('%'))
}

fn parse_num<T: std::str::FromStr>(tok: &str, origin: &str, line: usize) -> CliResult<T> {
    tok.parse()
        .map_err(|_| CliError::format(origin, line, format!("non-numeric token {tok:?}")))
}

pub fn parse_matrix_market(text: &str, origin: &str) -> CliResult<DenseMatrix> {
    let header = text.lines().next().unwrap_or("");
    let fields: Vec<String> = header.split_whitespace().map(|s| s.to_ascii_lowercase()).collect();
    if fields.len() != 5 || fields[0] != "%%matrixmarket" || fields[1] != "matrix" {
        return Err(CliError::format(origin, 1, "malformed MatrixMarket header"));
    }
    let layout = match fields[2].as_str() {
        "array" => MmLayout::Array,
        "coordinate" => MmLayout::Coordinate,
        other => return Err(CliError::format(origin, 1, format!("unsupported layout {other:?}"))),
    };
    if fields[3] != "real" && fields[3] != "integer" {
        return Err(CliError::format(origin, 1, format!("unsupported field {:?}", fields[3])));
    }
    if fields[4] != "general" {
        return Err(CliError::format(origin, 1, format!("unsupported symmetry {:?}", fields[4])));
    }

    let mut lines = content_lines(text);
    let (size_line, size) = lines
        .next()
        .ok_or_else(|| CliError::format(origin, 1, "missing size line"))?;
    let dims: Vec<&str> = size.split_whitespace().collect();
    let want = if layout == MmLayout::Array { 2 } else { 3 };
    if dims.len() != want {
        return Err(CliError::format(origin, size_line, format!("size line needs {want} integers")));
    }
    let m: usize = parse_num(dims[0], origin, size_line)?;
    let n: usize = parse_num(dims[1], origin, size_line)?;
    let mut a = DenseMatrix::zeros(m, n);

    match layout {
        MmLayout::Array => {
            let mut k = 0;
            let mut last = size_line;
            for (ln, l) in lines {
                for tok in l.split_whitespace() {
                    if k == m * n {
                        return Err(CliError::format(origin, ln, "more entries than m*n"));
                    }
                    let v: f64 = parse_num(tok, origin, ln)?;
                    if !v.is_finite() {
                        return Err(CliError::format(origin, ln, "non-finite entry"));
                    }
                    a.as_mut_slice()[k] = v;
                    k += 1;
                }
                last = ln;
            }
            if k != m * n {
                return Err(CliError::format(
                    origin,
                    last,
                    format!("expected {} entries, found {k}", m * n),
                ));
            }
        }
        MmLayout::Coordinate => {
            let nnz: usize = parse_num(dims[2], origin, size_line)?;
            let mut seen = HashSet::new();
            let mut last = size_line;
            for (ln, l) in lines {
                let toks: Vec<&str> = l.split_whitespace().collect();
                if toks.len() != 3 {
                    return Err(CliError::format(origin, ln, "entry line needs `i j value`"));
                }
                let i: usize = parse_num(toks[0], origin, ln)?;
                let j: usize = parse_num(toks[1], origin, ln)?;
                let v: f64 = parse_num(toks[2], origin, ln)?;
                if i == 0 || j == 0 || i > m || j > n {
                    return Err(CliError::format(origin, ln, format!("index ({i}, {j}) out of range")));
                }
                if !v.is_finite() {
                    return Err(CliError::format(origin, ln, "non-finite entry"));
                }
                if !seen.insert((i, j)) {
                    return Err(CliError::format(origin, ln, format!("duplicate entry ({i}, {j})")));
                }
                a.as_mut_slice()[(i - 1) + (j - 1) * m] = v;
                last = ln;
            }
            if seen.len() != nnz {
                return Err(CliError::format(
                    origin,
                    last,
                    format!("expected {nnz} entries, found {}", seen.len()),
                ));
            }
        }
    }
    Ok(a)
}

/// 17 significant digits, enough to round-trip every finite double.
pub fn format_matrix_market(a: &DenseMatrix, layout: MmLayout) -> String {
    let (m, n) = a.shape();
    let mut s = String::new();
    match layout {
        MmLayout::Array => {
            s.push_str("%%MatrixMarket matrix array real general\n");
            let _ = writeln!(s, "{m} {n}");
            for v in a.as_slice() {
                let _ = writeln!(s, "{v:.16e}");
            }
        }
        MmLayout::Coordinate => {
            s.push_str("%%MatrixMarket matrix coordinate real general\n");
            let _ = writeln!(s, "{m} {n} {}", a.nnz());
            for j in 0..n {
                for (i, v) in a.col(j).iter().enumerate() {
                    if *v != 0.0 {
                        let _ = writeln!(s, "{} {} {v:.16e}", i + 1, j + 1);
                    }
                }
            }
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn array_round_trip() {
        let a = DenseMatrix::from_rows(&[&[1.0, 3.0], &[2.0, 4.0]]).unwrap();
        let text = format_matrix_market(&a, MmLayout::Array);
        assert!(text.contains("\n1.0000000000000000e0\n2.0000000000000000e0\n"));
        let b = parse_matrix_market(&text, "t").unwrap();
        assert!(a.sub(&b).unwrap().max_abs() <= 1e-15);
    }

    #[test]
    fn awkward_values_round_trip_exactly() {
        let a = DenseMatrix::from_rows(&[&[0.1, -1.0 / 3.0, 1e-300], &[f64::MAX, 5e-324, 2.0f64.sqrt()]]).unwrap();
        for layout in [MmLayout::Array, MmLayout::Coordinate] {
            let b = parse_matrix_market(&format_matrix_market(&a, layout), "t").unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn coordinate_with_comments() {
        let text = "%%MatrixMarket matrix coordinate real general\n% note\n3 2 2\n1 1 5\n\n3 2 -1.5\n";
        let a = parse_matrix_market(text, "t").unwrap();
        assert_eq!(a.shape(), (3, 2));
        assert_eq!(a.as_slice(), &[5.0, 0.0, 0.0, 0.0, 0.0, -1.5]);
    }

    #[test]
    fn rejects_with_line_numbers() {
        let cases = [
            ("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1\n1 1 2\n", "t:4: duplicate"),
            ("%%MatrixMarket matrix array real general\n2 2\n1\n2\nx\n4\n", "t:5: non-numeric"),
            ("%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n", "t:5: expected 4"),
            ("%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1\n", "t:3: index"),
            ("%%MatrixMarket matrix array complex general\n1 1\n1\n", "t:1:"),
            ("hello\n", "t:1: malformed"),
            ("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1\n", "t:3: expected 2"),
        ];
        for (text, want) in cases {
            let err = parse_matrix_market(text, "t").unwrap_err().to_string();
            assert!(err.starts_with(want), "{err} vs {want}");
        }
    }
}
