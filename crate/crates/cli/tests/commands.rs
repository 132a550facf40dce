use std::path::Path;
use std::process::Command;

use threshrank::la::svd_small;
use threshrank::{DenseMatrix, RngStream};
use threshrank_cli::commands::{compress, lsi_basis, lsi_scores, rank_documents, LsiCut};
use threshrank_cli::io::{format_matrix_market, read_image, write_bytes, write_image, Image, MmLayout};
use threshrank_cli::manifest::{RunManifest, FILE_NAME};

fn bin(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_threshrank")).args(args).output().unwrap()
}

fn s(p: &Path) -> String {
    p.display().to_string()
}

#[test]
fn exit_codes() {
    assert_eq!(bin(&["--help"]).status.code(), Some(0));
    assert_eq!(bin(&[]).status.code(), Some(2));
    assert_eq!(bin(&["bench-synthetic", "--block-size", "x"]).status.code(), Some(2));
    let out = bin(&["compress-image", "--input", "/nonexistent/in.pgm"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error:"));
}

#[test]
fn malformed_matrix_reports_the_line() {
    let tmp = tempfile::tempdir().unwrap();
    let p = tmp.path().join("bad.mtx");
    write_bytes(&p, b"%%MatrixMarket matrix array real general\n2 1\n1.0\nnope\n").unwrap();
    let out = bin(&["lsi", "--termdoc", &s(&p), "--query", "0", "--rank", "1", "--out", &s(&tmp.path().join("o"))]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bad.mtx:4"), "{err}");
}

#[test]
fn bench_writes_manifest_and_replay_detects_tampering() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("bench");
    let run = bin(&["bench-synthetic", "--seeds", "1", "--block-size", "5", "--out", &s(&out)]);
    assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stderr));
    assert!(out.join("bench.csv").exists());
    let manifest_path = out.join(FILE_NAME);
    let m = RunManifest::read(&manifest_path).unwrap();
    assert_eq!(m.metrics["crank_exact"], "1");

    assert_eq!(bin(&["replay", "--manifest", &s(&manifest_path)]).status.code(), Some(0));

    let mut tampered = m.clone();
    tampered.metric("crank_exact", 0);
    let dir = tmp.path().join("tampered");
    let path = tampered.write(&dir).unwrap();
    let out = bin(&["replay", "--manifest", &s(&path), "--out", &s(&dir.join("again"))]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("crank_exact"));
}

#[test]
fn constant_image_compresses_to_rank_one() {
    let a = DenseMatrix::from_fn(30, 20, |_, _| 128.0);
    let c = compress(&a, 0.05, 4, 1, &mut RngStream::new(0)).unwrap();
    assert_eq!(c.crank, 1);
    assert!(c.relerror <= 1e-12);
    assert!((c.cratio - 600.0 / 50.0).abs() < 1e-12);

    let zero = compress(&DenseMatrix::zeros(8, 8), 0.05, 4, 1, &mut RngStream::new(0)).unwrap();
    assert_eq!(zero.crank, 0);
}

#[test]
fn compress_then_decompress_matches_reconstruction() {
    let tmp = tempfile::tempdir().unwrap();
    let (w, h) = (24, 18);
    let data = (0..w * h).map(|i| ((i % w) * 9 + (i / w) * 4) as u8).collect();
    let input = tmp.path().join("in.ppm");
    let img = Image::new(w, h / 3, 3, data).unwrap();
    write_image(&input, &img).unwrap();
    let cmp = tmp.path().join("cmp");
    let r = bin(&["compress-image", "--input", &s(&input), "--theta-fraction", "0.001", "--out", &s(&cmp)]);
    assert!(matches!(r.status.code(), Some(0) | Some(3)), "{}", String::from_utf8_lossy(&r.stderr));
    let dec = tmp.path().join("dec");
    let r = bin(&[
        "decompress",
        "--q",
        &s(&cmp.join("q.raw")),
        "--b",
        &s(&cmp.join("b.raw")),
        "--channels",
        "3",
        "--out",
        &s(&dec),
    ]);
    assert_eq!(r.status.code(), Some(0));
    let a = read_image(&cmp.join("recon.ppm")).unwrap();
    let b = read_image(&dec.join("recon.ppm")).unwrap();
    assert_eq!(a, b);
    let err = a.data.iter().zip(&img.data).map(|(x, y)| x.abs_diff(*y)).max().unwrap();
    assert!(err <= 2, "max pixel error {err}");
}

/// Cosines against an exact SVD basis for a small term-document matrix.
fn exact_scores(a: &DenseMatrix, k: usize, terms: &[usize]) -> Vec<f64> {
    let u = svd_small(a).u.columns(0, k);
    let mut q = vec![0.0; a.rows()];
    for &t in terms {
        q[t] = 1.0;
    }
    let qn = (terms.len() as f64).sqrt();
    let qhat: Vec<f64> = (0..k).map(|i| u.col(i).iter().zip(&q).map(|(x, y)| x * y).sum()).collect();
    let w = u.t_matmul(a).unwrap();
    (0..a.cols())
        .map(|j| {
            let wj = w.col(j);
            let wn = wj.iter().map(|x| x * x).sum::<f64>().sqrt();
            if wn == 0.0 {
                0.0
            } else {
                wj.iter().zip(&qhat).map(|(x, y)| x * y).sum::<f64>() / (qn * wn)
            }
        })
        .collect()
}

#[test]
fn lsi_scores_match_exact_basis() {
    let mut rng = RngStream::new(8);
    let a = DenseMatrix::from_fn(40, 15, |_, _| {
        if rng.next_uniform() < 0.2 {
            (1 + rng.next_index(4)) as f64
        } else {
            0.0
        }
    });
    let terms = [1, 5, 9];
    let (basis, _) = lsi_basis(&a, LsiCut::Rank(15), 5, 2, &mut RngStream::new(1)).unwrap();
    let got = lsi_scores(&a, &basis, &terms).unwrap();
    let want = exact_scores(&a, 15, &terms);
    for (g, w) in got.iter().zip(&want) {
        assert!((g - w).abs() <= 1e-10, "{g} vs {w}");
    }
    // full basis: ranking matches a brute-force sort of the exact cosines
    let mut brute: Vec<usize> = (0..want.len()).collect();
    brute.sort_by(|&x, &y| want[y].partial_cmp(&want[x]).unwrap().then(x.cmp(&y)));
    let ranked: Vec<usize> = rank_documents(&got).into_iter().map(|(d, _)| d).collect();
    let close_ties = want.windows(2).any(|w| (w[0] - w[1]).abs() < 1e-9);
    if !close_ties {
        assert_eq!(ranked, brute);
    }
}

#[test]
fn lsi_orthogonal_documents() {
    // document j uses terms 3j..3j+2 only
    let a = DenseMatrix::from_fn(12, 4, |i, j| if i / 3 == j { 1.0 + i as f64 % 3.0 } else { 0.0 });
    let (basis, _) = lsi_basis(&a, LsiCut::Threshold(1e-8), 2, 1, &mut RngStream::new(3)).unwrap();
    assert_eq!(basis.cols(), 4);
    let scores = lsi_scores(&a, &basis, &[7]).unwrap();
    let ranking = rank_documents(&scores);
    assert_eq!(ranking[0].0, 2);
    for (d, s) in &ranking[1..] {
        assert!(s.abs() <= 1e-12, "document {d} scored {s}");
    }
    assert!(lsi_scores(&a, &basis, &[12]).is_err());
}

#[test]
fn lsi_command_writes_ranking() {
    let tmp = tempfile::tempdir().unwrap();
    // the empty fourth document keeps the basis below full rank
    let a = DenseMatrix::from_fn(9, 4, |i, j| if i / 3 == j { 1.0 } else { 0.0 });
    let p = tmp.path().join("td.mtx");
    write_bytes(&p, format_matrix_market(&a, MmLayout::Coordinate).as_bytes()).unwrap();
    let out = tmp.path().join("o");
    let r = bin(&["lsi", "--termdoc", &s(&p), "--query", "4", "--threshold", "0.5", "--out", &s(&out)]);
    assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stderr));
    let m = RunManifest::read(&out.join(FILE_NAME)).unwrap();
    assert_eq!(m.metrics["top_document"], "1");
    assert!(out.join("ranking.csv").exists());
}

#[test]
fn rpca_rejects_mixed_frame_sizes() {
    let tmp = tempfile::tempdir().unwrap();
    let frames = tmp.path().join("frames");
    write_image(&frames.join("a.pgm"), &Image::new(4, 3, 1, vec![9; 12]).unwrap()).unwrap();
    write_image(&frames.join("b.pgm"), &Image::new(3, 4, 1, vec![9; 12]).unwrap()).unwrap();
    let r = bin(&["rpca", "--frames", &s(&frames), "--out", &s(&tmp.path().join("o"))]);
    assert_eq!(r.status.code(), Some(2));
}
