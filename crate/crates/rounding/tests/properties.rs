use basic_sdp::random_configuration;
use pcsp_core::rng;
use proptest::prelude::*;
use rounding::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn plurality_picks_first_maximum(xs in prop::collection::vec(-3i32..3, 1..8)) {
        let v: Vec<f64> = xs.iter().map(|&x| x as f64).collect();
        let i = plurality(&v);
        let best = xs.iter().max().unwrap();
        prop_assert_eq!(xs[i], *best);
        prop_assert!(xs[..i].iter().all(|x| x < best));
    }

    #[test]
    fn roundings_stay_in_range(seed in 0u64..10_000, n in 1usize..6, q in 2usize..5, eps in 0.001f64..0.9) {
        let mut r = rng::stream(seed, 1);
        let cfg = random_configuration(n, q, 4, &mut r);
        let g = gaussian(4, &mut r);
        let out = separable_round(&cfg, eps, &g).unwrap();
        prop_assert_eq!(out.len(), n);
        prop_assert!(out.iter().all(|&a| a < q));
        let hom: Vec<usize> = (0..q).collect();
        let dists = marginals(&cfg, &hom, q).unwrap();
        let ind = independent_round(&dists, seed).unwrap();
        let cor = correlated_round(&dists, &CorrelatedNoise::sample(q, &mut r)).unwrap();
        prop_assert!(ind.iter().chain(&cor).all(|&a| a < q));
    }

    #[test]
    fn lifting_keeps_configurations_valid(seed in 0u64..10_000, rho in 0.0f64..=1.0) {
        let cfg = random_configuration(3, 3, 5, &mut rng::stream(seed, 2));
        let lifted = lift_uniform(&cfg, rho).unwrap();
        prop_assert!(lifted.defect() < 1e-12);
        prop_assert_eq!(lifted.dim, cfg.dim + uniform_configuration(3, 3).dim);
    }
}
