use basic_sdp::{random_configuration, GlobalConfiguration};
use pcsp_core::rng;
use rand::Rng;
use rounding::*;

fn boolean_config(vectors: Vec<Vec<f64>>, dim: usize) -> GlobalConfiguration {
    // +-1 vectors v_i, turned into v_{i,1} = (v0 + v_i)/2, v_{i,0} = (v0 - v_i)/2
    let mut v0 = vec![0.0; dim];
    v0[0] = 1.0;
    let n = vectors.len();
    let vectors = vectors
        .iter()
        .flat_map(|v| {
            let minus: Vec<f64> = v0.iter().zip(v).map(|(a, b)| (a - b) / 2.0).collect();
            let plus: Vec<f64> = v0.iter().zip(v).map(|(a, b)| (a + b) / 2.0).collect();
            [minus, plus]
        })
        .collect();
    GlobalConfiguration { dim, n_vars: n, size_a: 2, v0, vectors }
}

#[test]
fn cmm_examples() {
    let cfg = boolean_config(vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0]], 2);
    assert_eq!(cmm_round(&cfg, 0.04, &[0.0, 0.0]).unwrap()[..2], [1, 0]);
    // <v_i, v0 + 0.2 r> = 0.2 for r = e_1
    assert_eq!(cmm_round(&cfg, 0.04, &[0.0, 1.0]).unwrap()[2], 1);
    assert_eq!(cmm_round(&cfg, 0.04, &[0.0, -1.0]).unwrap()[2], 0);
    // tie goes to +1
    assert_eq!(cmm_round(&cfg, 0.04, &[0.0, 0.0]).unwrap()[2], 1);
    assert!(cmm_round(&cfg, 0.04, &[0.0]).is_err());
    let ug = random_configuration(2, 3, 4, &mut rng::stream(1, 0));
    assert_eq!(cmm_round(&ug, 0.1, &[0.0; 4]), Err(RoundError::NotBoolean(3)));
}

#[test]
fn separable_examples() {
    let mut v0 = vec![0.0; 3];
    v0[0] = 1.0;
    let integral =
        GlobalConfiguration { dim: 3, n_vars: 1, size_a: 2, v0: v0.clone(), vectors: vec![v0.clone(), vec![0.0; 3]] };
    assert_eq!(separable_round(&integral, 0.04, &[0.0; 3]).unwrap(), vec![0]);
    // two orthogonal halves with <v_a, v0> = 1/2 each: tie, element 0
    let halves = GlobalConfiguration {
        dim: 3,
        n_vars: 1,
        size_a: 2,
        v0,
        vectors: vec![vec![0.5, 0.5, 0.0], vec![0.5, -0.5, 0.0]],
    };
    assert_eq!(separable_round(&halves, 0.04, &[0.0; 3]).unwrap(), vec![0]);
}

#[test]
fn cmm_and_separable_agree_on_boolean_configurations() {
    for seed in 0..1000u64 {
        let mut r = rng::stream(seed, 5);
        let cfg = random_configuration(6, 2, 5, &mut r);
        let g = gaussian(5, &mut r);
        let eps = r.random_range(0.001..0.5);
        assert_eq!(cmm_round(&cfg, eps, &g).unwrap(), separable_round(&cfg, eps, &g).unwrap(), "seed {seed}");
    }
}

#[test]
fn identical_vectors_round_identically() {
    let mut r = rng::stream(3, 0);
    let mut cfg = random_configuration(4, 3, 6, &mut r);
    for a in 0..3 {
        cfg.vectors[3 * 3 + a] = cfg.vectors[a].clone();
    }
    for _ in 0..200 {
        let g = gaussian(6, &mut r);
        let out = separable_round(&cfg, 0.05, &g).unwrap();
        assert_eq!(out[0], out[3]);
    }
}

#[test]
fn independent_examples() {
    assert_eq!(independent_round(&[vec![0.0, 1.0, 0.0]], 9).unwrap(), vec![1]);
    assert_eq!(independent_round(&[], 9).unwrap(), Vec::<usize>::new());
    let trials = 100_000;
    let zeros = (0..trials).filter(|&t| independent_round(&[vec![0.5, 0.5]], t).unwrap()[0] == 0).count();
    assert!((zeros as f64 / trials as f64 - 0.5).abs() < 0.01);
    assert_eq!(independent_round(&[vec![0.6, 0.6]], 0), Err(RoundError::NotSimplex { var: 0 }));
    assert_eq!(independent_round(&[vec![1.0], vec![0.5, 0.5]], 0), Err(RoundError::NotSimplex { var: 1 }));
}

#[test]
fn correlated_examples() {
    let mut r = rng::stream(4, 0);
    for _ in 0..1000 {
        let xi = CorrelatedNoise::sample(3, &mut r);
        assert!(xi.xi().iter().all(|&v| (0.0..=1.0 / 6.0).contains(&v)));
        assert_eq!(correlated_round(&[vec![0.0, 0.0, 1.0]], &xi).unwrap(), vec![2]);
        let q = vec![0.2, 0.5, 0.3];
        let out = correlated_round(&[q.clone(), q], &xi).unwrap();
        assert_eq!(out[0], out[1]);
    }
    let trials = 100_000;
    let zeros = (0..trials)
        .filter(|_| correlated_round(&[vec![0.5, 0.5]], &CorrelatedNoise::sample(2, &mut r)).unwrap()[0] == 0)
        .count();
    assert!((zeros as f64 / trials as f64 - 0.5).abs() < 0.01);
    assert!(CorrelatedNoise::new(vec![0.3, 0.0]).is_err());
    assert!(correlated_round(&[vec![0.5, 0.5]], &CorrelatedNoise::new(vec![0.0; 3]).unwrap()).is_err());
}

fn max_gram_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn full_gram(c: &GlobalConfiguration) -> Vec<Vec<f64>> {
    let mut all = vec![c.v0.clone()];
    all.extend(c.vectors.iter().cloned());
    all.iter().map(|u| all.iter().map(|w| u.iter().zip(w).map(|(p, q)| p * q).sum()).collect()).collect()
}

#[test]
fn uniform_configuration_is_valid() {
    for q in 2..5 {
        let u = uniform_configuration(4, q);
        assert!(u.defect() < 1e-14);
        let g = u.gram();
        let s = 4 * q;
        for i in 0..s {
            for j in 0..s {
                let expect = if i / q != j / q {
                    1.0 / (q * q) as f64
                } else if i == j {
                    1.0 / q as f64
                } else {
                    0.0
                };
                assert!((g[i * s + j] - expect).abs() < 1e-14);
            }
        }
    }
}

#[test]
fn lift_gram_identity() {
    for seed in 0..100u64 {
        let mut r = rng::stream(seed, 11);
        let q = 2 + (seed as usize % 3);
        let cfg = random_configuration(5, q, 7, &mut r);
        let u = uniform_configuration(5, q);
        let (gv, gu) = (full_gram(&cfg), full_gram(&u));
        for rho in [0.0, 0.3, 0.5, 1.0] {
            let lifted = lift_uniform(&cfg, rho).unwrap();
            assert!(lifted.defect() < 1e-12);
            let gl = full_gram(&lifted);
            for i in 0..gl.len() {
                let expect: Vec<f64> = (0..gl.len()).map(|j| rho * gu[i][j] + (1.0 - rho) * gv[i][j]).collect();
                assert!(max_gram_gap(&gl[i], &expect) <= 1e-12, "seed {seed} rho {rho}");
            }
        }
    }
    assert!(lift_uniform(&uniform_configuration(1, 2), 1.5).is_err());
}

#[test]
fn marginals_follow_the_homomorphism() {
    let mut r = rng::stream(8, 0);
    let cfg = random_configuration(3, 3, 5, &mut r);
    let same = marginals(&cfg, &[0, 1, 2], 3).unwrap();
    for (x, q) in same.iter().enumerate() {
        assert!((q.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        for (a, p) in q.iter().enumerate() {
            let norm: f64 = cfg.vector(x, a).iter().map(|v| v * v).sum();
            assert!((p - norm).abs() < 1e-9);
        }
    }
    let merged = marginals(&cfg, &[0, 1, 1], 2).unwrap();
    for (m, s) in merged.iter().zip(&same) {
        assert!((m[1] - s[1] - s[2]).abs() < 1e-12);
    }
    assert!(marginals(&cfg, &[0, 1], 2).is_err());
}
