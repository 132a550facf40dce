use proptest::prelude::*;

use threshrank::DenseMatrix;
use threshrank_cli::io::{
    decode_pnm, decode_raw, encode_raw, format_matrix_market, parse_matrix_market, Image, MmLayout,
};

fn matrix_strategy() -> impl Strategy<Value = DenseMatrix> {
    (1usize..8, 1usize..8).prop_flat_map(|(m, n)| {
        prop::collection::vec(prop_oneof![Just(0.0), -1e6f64..1e6, any::<f64>().prop_filter("finite", |x| x.is_finite())], m * n)
            .prop_map(move |v| DenseMatrix::from_col_major(m, n, v).unwrap())
    })
}

fn bits(a: &DenseMatrix) -> Vec<u64> {
    a.as_slice().iter().map(|x| x.to_bits()).collect()
}

proptest! {
    #[test]
    fn raw_round_trip_is_bit_exact(a in matrix_strategy()) {
        let back = decode_raw(&encode_raw(&a).unwrap(), "t").unwrap();
        prop_assert_eq!(back.shape(), a.shape());
        prop_assert_eq!(bits(&back), bits(&a));
    }

    #[test]
    fn matrix_market_round_trip_is_exact(a in matrix_strategy(), coord in any::<bool>()) {
        let layout = if coord { MmLayout::Coordinate } else { MmLayout::Array };
        let back = parse_matrix_market(&format_matrix_market(&a, layout), "t").unwrap();
        prop_assert_eq!(back.shape(), a.shape());
        // -0.0 may come back as 0.0 from the coordinate layout
        prop_assert!(back.as_slice().iter().zip(a.as_slice()).all(|(x, y)| x == y));
    }

    #[test]
    fn pnm_round_trip(w in 1usize..20, h in 1usize..20, color in any::<bool>(), seed in any::<u64>()) {
        let channels = if color { 3 } else { 1 };
        let data: Vec<u8> = (0..w * h * channels)
            .map(|i| (seed.wrapping_mul(6364136223846793005).wrapping_add((i as u64).wrapping_mul(1442695040888963407)) >> 56) as u8)
            .collect();
        let img = Image::new(w, h, channels, data).unwrap();
        let back = decode_pnm(&img.encode(), "t").unwrap();
        prop_assert_eq!(&back, &img);
        let via_matrix = Image::from_matrix(&img.to_matrix(), channels).unwrap();
        prop_assert_eq!(&via_matrix, &img);
    }
}

#[test]
fn truncated_raw_is_rejected() {
    let a = DenseMatrix::from_fn(3, 2, |i, j| (i + j) as f64);
    let bytes = encode_raw(&a).unwrap();
    assert!(decode_raw(&bytes[..bytes.len() - 1], "t").is_err());
    assert!(decode_raw(&bytes[..10], "t").is_err());
    let mut bad = bytes.clone();
    bad[0] = b'X';
    assert!(decode_raw(&bad, "t").is_err());
}

#[test]
fn matrix_market_errors_carry_line_numbers() {
    let text = "%%MatrixMarket matrix coordinate real general\n% note\n2 2 2\n1 1 1.0\n3 1 2.0\n";
    let e = parse_matrix_market(text, "m.mtx").unwrap_err().to_string();
    assert!(e.contains("m.mtx") && e.contains(":5"), "{e}");
    let text = "%%MatrixMarket matrix array real general\n2 1\n1.0\nabc\n";
    let e = parse_matrix_market(text, "m.mtx").unwrap_err().to_string();
    assert!(e.contains(":4"), "{e}");
}

#[test]
fn pnm_comments_and_bad_headers() {
    let img = decode_pnm(b"P5\n# comment\n2 1\n255\n\x01\x02", "t").unwrap();
    assert_eq!((img.width, img.height, img.channels), (2, 1, 1));
    assert_eq!(img.data, vec![1, 2]);
    assert!(decode_pnm(b"P2\n2 1\n255\n1 2\n", "t").is_err());
    assert!(decode_pnm(b"P5\n2 1\n65535\n\x00\x00\x00\x00", "t").is_err());
    assert!(decode_pnm(b"P5\n2 2\n255\n\x01", "t").is_err());
}
