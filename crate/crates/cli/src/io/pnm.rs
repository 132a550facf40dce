//! Binary PGM (P5) and PPM (P6) images with maxval 255.

use threshrank::DenseMatrix;

use crate::error::{CliError, CliResult};

/// Images with more than this many samples are rejected.
pub const MAX_SAMPLES: usize = 1 << 26;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Image {
    pub width: usize,
    pub height: usize,
    /// 1 for gray, 3 for RGB.
    pub channels: usize,
    /// Row-major, channels interleaved.
    pub data: Vec<u8>,
}

impl Image {
    pub fn new(width: usize, height: usize, channels: usize, data: Vec<u8>) -> CliResult<Self> {
        if channels != 1 && channels != 3 {
            return Err(CliError::Input(format!("unsupported channel count {channels}")));
        }
        if data.len() != width * height * channels {
            return Err(CliError::Input("pixel buffer does not match dimensions".into()));
        }
        Ok(Image {
            width,
            height,
            channels,
            data,
        })
    }

    /// `height x width` for gray; R, G and B planes stacked into
    /// `3 height x width` for color.
    pub fn to_matrix(&self) -> DenseMatrix {
        let (h, w, c) = (self.height, self.width, self.channels);
        DenseMatrix::from_fn(c * h, w, |r, j| {
            let (ch, i) = (r / h, r % h);
            f64::from(self.data[(i * w + j) * c + ch])
        })
    }

    /// Inverse of [`Image::to_matrix`]; values clamped to `[0, 255]` and
    /// rounded half to even.
    pub fn from_matrix(a: &DenseMatrix, channels: usize) -> CliResult<Self> {
        if channels != 1 && channels != 3 {
            return Err(CliError::Input(format!("unsupported channel count {channels}")));
        }
        if a.rows() % channels != 0 {
            return Err(CliError::Input(format!(
                "{} rows cannot hold {channels} stacked planes",
                a.rows()
            )));
        }
        let (h, w) = (a.rows() / channels, a.cols());
        let mut data = vec![0u8; h * w * channels];
        for j in 0..w {
            let col = a.col(j);
            for (r, &v) in col.iter().enumerate() {
                let (ch, i) = (r / h, r % h);
                data[(i * w + j) * channels + ch] = to_pixel(v);
            }
        }
        Image::new(w, h, channels, data)
    }

    pub fn encode(&self) -> Vec<u8> {
        let magic = if self.channels == 1 { "P5" } else { "P6" };
        let mut out = format!("{magic}\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend_from_slice(&self.data);
        out
    }

    pub fn extension(&self) -> &'static str {
        if self.channels == 1 {
            "pgm"
        } else {
            "ppm"
        }
    }
}

pub fn to_pixel(v: f64) -> u8 {
    if v.is_nan() {
        return 0;
    }
    v.clamp(0.0, 255.0).round_ties_even() as u8
}

pub fn decode_pnm(bytes: &[u8], origin: &str) -> CliResult<Image> {
    let mut pos = 0;
    let mut line = 1;
    let mut tokens = Vec::with_capacity(4);
    while tokens.len() < 4 {
        // whitespace and comments
        while pos < bytes.len() {
            match bytes[pos] {
                b'#' => {
                    while pos < bytes.len() && bytes[pos] != b'\n' {
                        pos += 1;
                    }
                }
                b'\n' => {
                    line += 1;
                    pos += 1;
                }
                c if c.is_ascii_whitespace() => pos += 1,
                _ => break,
            }
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() && bytes[pos] != b'#' {
            pos += 1;
        }
        if start == pos {
            return Err(CliError::format(origin, line, "truncated image header"));
        }
        tokens.push((String::from_utf8_lossy(&bytes[start..pos]).into_owned(), line));
    }
    // exactly one whitespace byte separates the header from the raster
    if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
        return Err(CliError::format(origin, line, "truncated image header"));
    }
    pos += 1;

    let channels = match tokens[0].0.as_str() {
        "P5" => 1,
        "P6" => 3,
        other => {
            return Err(CliError::format(
                origin,
                1,
                format!("unsupported image type {other:?} (binary P5 or P6 expected)"),
            ))
        }
    };
    let num = |k: usize| -> CliResult<usize> {
        let (tok, ln) = &tokens[k];
        tok.parse()
            .map_err(|_| CliError::format(origin, *ln, format!("non-numeric header token {tok:?}")))
    };
    let (width, height, maxval) = (num(1)?, num(2)?, num(3)?);
    if maxval != 255 {
        return Err(CliError::format(origin, tokens[3].1, format!("maxval {maxval} unsupported (255 expected)")));
    }
    let samples = width
        .checked_mul(height)
        .and_then(|x| x.checked_mul(channels))
        .filter(|&s| s <= MAX_SAMPLES)
        .ok_or_else(|| CliError::format(origin, tokens[1].1, format!("image {width}x{height} is too large")))?;
    let raster = &bytes[pos..];
    if raster.len() != samples {
        return Err(CliError::format(
            origin,
            line,
            format!("raster has {} bytes, expected {samples}", raster.len()),
        ));
    }
    Image::new(width, height, channels, raster.to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gray_round_trip() {
        let img = Image::new(3, 2, 1, vec![0, 10, 20, 30, 40, 255]).unwrap();
        let back = decode_pnm(&img.encode(), "t").unwrap();
        assert_eq!(back, img);
        let a = img.to_matrix();
        assert_eq!(a.shape(), (2, 3));
        assert_eq!(a.row(1), vec![30.0, 40.0, 255.0]);
        assert_eq!(Image::from_matrix(&a, 1).unwrap(), img);
    }

    #[test]
    fn color_planes_stack_vertically() {
        let data: Vec<u8> = (0..12).collect();
        let img = Image::new(2, 2, 3, data).unwrap();
        let a = img.to_matrix();
        assert_eq!(a.shape(), (6, 2));
        // red plane, then green, then blue
        assert_eq!(a.row(0), vec![0.0, 3.0]);
        assert_eq!(a.row(2), vec![1.0, 4.0]);
        assert_eq!(a.row(5), vec![8.0, 11.0]);
        assert_eq!(Image::from_matrix(&a, 3).unwrap(), img);
        assert_eq!(decode_pnm(&img.encode(), "t").unwrap(), img);
    }

    #[test]
    fn header_comments_accepted() {
        let mut bytes = b"P5 # gray\n# size next\n2 1\n255\n".to_vec();
        bytes.extend_from_slice(&[7, 9]);
        let img = decode_pnm(&bytes, "t").unwrap();
        assert_eq!(img.data, vec![7, 9]);
    }

    #[test]
    fn pixel_conversion_clamps_and_rounds_to_even() {
        assert_eq!(to_pixel(-3.0), 0);
        assert_eq!(to_pixel(300.0), 255);
        assert_eq!(to_pixel(2.5), 2);
        assert_eq!(to_pixel(3.5), 4);
        assert_eq!(to_pixel(3.4999), 3);
        assert_eq!(to_pixel(f64::NAN), 0);
    }

    #[test]
    fn rejects_bad_images() {
        let cases: [(&[u8], &str); 5] = [
            (b"P2\n1 1\n255\n0", "t:1: unsupported image type"),
            (b"P5\n1 1\n65535\n\0\0", "t:3: maxval"),
            (b"P5\n2 2\n255\n\0", "t:3: raster"),
            (b"P5\n100000 100000\n255\n", "t:2: image"),
            (b"P5\n2", "t:2: truncated"),
        ];
        for (bytes, want) in cases {
            let err = decode_pnm(bytes, "t").unwrap_err().to_string();
            assert!(err.starts_with(want), "{err} vs {want}");
        }
    }
}
