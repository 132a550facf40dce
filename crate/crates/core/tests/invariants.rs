use proptest::prelude::*;

use threshrank::la::{gaussian, orth, singular_values, spectral_norm, svd_small};
use threshrank::metrics::{deviation, numerical_rank, orth_error};
use threshrank::randlr::{randqb_blocked, sblarank, soft_threshold, svt_shrink, RankRevealConfig};
use threshrank::synth::{geometric, random_orthonormal, SyntheticMatrix};
use threshrank::{DenseMatrix, RngStream};

fn matrix_with_decay(seed: u64, m: usize, n: usize, last: f64) -> SyntheticMatrix {
    let mut rng = RngStream::new(seed);
    let p = m.min(n);
    let u = random_orthonormal(&mut rng, m, p).unwrap();
    let v = random_orthonormal(&mut rng, n, p).unwrap();
    SyntheticMatrix::from_factors(u, geometric(1.0, last, p), v).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn orth_returns_orthonormal_basis_of_the_range(seed in 0u64..1000, m in 5usize..40, k in 1usize..6) {
        let k = k.min(m);
        let a = gaussian(&mut RngStream::new(seed), m, k);
        let q = orth(&a);
        prop_assert_eq!(q.cols(), k);
        prop_assert!(orth_error(&q) <= 1e-13);
        prop_assert!(a.project_out(&q).unwrap().frobenius_norm() <= 1e-12 * a.frobenius_norm());
    }

    #[test]
    fn deviation_is_a_bounded_symmetric_distance(seed in 0u64..1000, m in 6usize..30, s in 1usize..5) {
        let mut rng = RngStream::new(seed);
        let w = random_orthonormal(&mut rng, m, s).unwrap();
        let z = random_orthonormal(&mut rng, m, s).unwrap();
        let dwz = deviation(&w, &z).unwrap();
        let dzw = deviation(&z, &w).unwrap();
        prop_assert!((0.0..=1.0 + 1e-12).contains(&dwz));
        prop_assert!((dwz - dzw).abs() <= 1e-12);
        prop_assert!(deviation(&w, &w).unwrap() <= 1e-12);
    }

    #[test]
    fn projection_is_idempotent(seed in 0u64..1000, m in 6usize..30, n in 2usize..20, s in 1usize..5) {
        let mut rng = RngStream::new(seed);
        let a = gaussian(&mut rng, m, n);
        let q = random_orthonormal(&mut rng, m, s.min(m)).unwrap();
        let once = a.project_out(&q).unwrap();
        let twice = once.project_out(&q).unwrap();
        prop_assert!(twice.sub(&once).unwrap().max_abs() <= 1e-12 * a.max_abs());
        prop_assert!(q.t_matmul(&once).unwrap().max_abs() <= 1e-12 * a.max_abs());
    }

    #[test]
    fn numerical_rank_is_non_increasing_in_theta(seed in 0u64..1000, t1 in -8.0f64..0.5, t2 in -8.0f64..0.5) {
        let synm = matrix_with_decay(seed, 25, 15, 1e-9);
        let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
        prop_assert!(numerical_rank(&synm.a, 10f64.powf(lo)) >= numerical_rank(&synm.a, 10f64.powf(hi)));
    }

    #[test]
    fn soft_threshold_contracts_toward_zero(x in -1e3f64..1e3, tau in 0.0f64..100.0) {
        let y = soft_threshold(x, tau);
        prop_assert!(y.abs() <= x.abs());
        prop_assert!((y - x).abs() <= tau + 1e-12 * x.abs());
        prop_assert!(y == 0.0 || y.signum() == x.signum());
        prop_assert_eq!(y == 0.0, x.abs() <= tau);
    }

    #[test]
    fn svt_shifts_singular_values(seed in 0u64..1000, tau in 0.01f64..0.9) {
        let synm = matrix_with_decay(seed, 20, 12, 1e-3);
        let shrunk = svt_shrink(&synm.a, tau);
        let got = singular_values(&shrunk);
        for (g, s) in got.iter().zip(&synm.sigma) {
            prop_assert!((g - (s - tau).max(0.0)).abs() <= 1e-12);
        }
    }

    #[test]
    fn sblarank_basis_and_estimates(seed in 0u64..500, b in 1usize..8, q in 0usize..3, t in -6.0f64..-0.5) {
        let synm = matrix_with_decay(seed, 40, 30, 1e-8);
        let theta = 10f64.powf(t);
        let cfg = RankRevealConfig::new(b, theta).power_iters(q);
        let res = sblarank(&synm.a, &cfg, &mut RngStream::new(seed + 1)).unwrap();
        prop_assert_eq!(res.q.cols(), res.rank);
        prop_assert_eq!(res.sing_vals.len(), res.rank);
        prop_assert_eq!(res.blocks.iter().sum::<usize>(), res.rank);
        prop_assert!(orth_error(&res.q) <= 1e-12);
        prop_assert!(res.sing_vals.windows(2).all(|w| w[0] >= w[1]));
        prop_assert!(res.sing_vals.iter().all(|&s| s > theta && s <= synm.sigma[0] * (1.0 + 1e-12)));
    }

    #[test]
    fn randqb_meets_its_threshold(seed in 0u64..500, b in 1usize..8, t in -5.0f64..-0.5, ei in any::<bool>()) {
        let synm = matrix_with_decay(seed, 35, 25, 1e-8);
        let theta = 10f64.powf(t) * synm.a.frobenius_norm();
        let cfg = RankRevealConfig::new(b, theta).ei_stop(ei);
        let res = randqb_blocked(&synm.a, &cfg, &mut RngStream::new(seed)).unwrap();
        prop_assert!(!res.threshold_unreached);
        prop_assert!(orth_error(&res.q) <= 1e-12);
        let resid = synm.a.sub(&res.q.matmul(&res.b).unwrap()).unwrap().frobenius_norm();
        prop_assert!(resid < theta);
    }
}

#[test]
fn spectral_norm_matches_full_svd() {
    for seed in 0..10 {
        let a = gaussian(&mut RngStream::new(seed), 17, 9);
        let s = svd_small(&a).s[0];
        assert!((spectral_norm(&a) - s).abs() <= 1e-12 * s);
    }
}

#[test]
fn zero_matrix_has_rank_zero_everywhere() {
    let a = DenseMatrix::zeros(12, 7);
    assert_eq!(numerical_rank(&a, 1e-300), 0);
    let res = sblarank(&a, &RankRevealConfig::new(3, 1e-6), &mut RngStream::new(0)).unwrap();
    assert_eq!(res.rank, 0);
    let qb = randqb_blocked(&a, &RankRevealConfig::new(3, 1e-6), &mut RngStream::new(0)).unwrap();
    assert_eq!(qb.rank(), 0);
}
