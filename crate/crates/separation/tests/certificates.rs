use pcsp_core::{all_tuples, zoo, PromisePair};
use polymorphism::{check_polymorphism, make_named_operation, Family};
use rand::{Rng, SeedableRng};
use separation::*;

fn all_majority(p: &PromisePair) -> Vec<Option<WeightVector>> {
    p.weak.complement().iter().map(|b| find_majority_weights(p, b).unwrap()).collect()
}

#[test]
fn majority_weights_on_sat_families() {
    assert!(all_majority(&zoo::two_sat().pairs[0]).iter().all(Option::is_some));
    for k in 1usize..=4 {
        let g = k.div_ceil(2);
        let t = zoo::k_sat_at_least(k, g);
        assert!(all_majority(&t.pairs[0]).iter().all(Option::is_some), "k = {k}, g = {g}");
    }
}

#[test]
fn unique_games_certified() {
    for q in 2..=4 {
        match certify_separable(&zoo::unique_games(q)).unwrap() {
            Certification::Separable(c) => {
                assert_eq!(c.alpha, 1.0 / q as f64);
                let per_pair = q * q - q;
                assert_eq!(c.entries.len(), per_pair * zoo::permutations(q).len());
            }
            other => panic!("q = {q}: {other:?}"),
        }
    }
}

#[test]
fn majority_implies_argmax_on_boolean_zoo() {
    for t in [zoo::two_sat(), zoo::k_sat_at_least(3, 2), zoo::max_cut(), zoo::k_sat_at_least(4, 2)] {
        let p = &t.pairs[0];
        for b in p.weak.complement() {
            let w = find_majority_weights(p, &b).unwrap().unwrap();
            w.to_matrix().verify(p).unwrap();
            assert!(find_argmax_separating_matrix(p, &b).unwrap().is_some());
        }
        assert!(matches!(certify_separable(&t).unwrap(), Certification::Separable(_)));
    }
}

#[test]
fn horn_is_inseparable() {
    match certify_separable(&zoo::horn3()).unwrap() {
        Certification::Inseparable { pair, b } => {
            assert_eq!(pair, 0);
            assert_eq!(b, vec![1, 1, 0]);
        }
        other => panic!("{other:?}"),
    }
}

/// Majority weights for every `b` go together with `MAJ_3, MAJ_5, MAJ_7`
/// being polymorphisms; a missing weight vector goes with a small majority
/// counterexample.
#[test]
fn cross_validation_with_polymorphisms() {
    let zoo_pairs: Vec<PromisePair> = [
        zoo::two_sat(),
        zoo::one_in_three_vs_nae(),
        zoo::horn3(),
        zoo::max_cut(),
        zoo::k_sat_at_least(3, 2),
        zoo::k_sat_at_least(3, 1),
        zoo::k_sat_at_least(4, 2),
    ]
    .into_iter()
    .chain([zoo::three_xor()])
    .flat_map(|t| t.pairs)
    .collect();
    for p in &zoo_pairs {
        let all = all_majority(p).iter().all(Option::is_some);
        let maj = |l| check_polymorphism(&make_named_operation(Family::Maj, l, 2, None).unwrap(), p).unwrap().verdict;
        if all {
            assert!(maj(3) && maj(5) && maj(7), "{p:?}");
        } else {
            assert!(!maj(3) || !maj(5), "{p:?}");
        }
    }
}

#[test]
fn argmax_cone() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(11);
    let mut certs = Vec::new();
    for q in 2..=4 {
        if let Certification::Separable(c) = certify_separable(&zoo::unique_games(q)).unwrap() {
            certs.extend(c.entries.into_iter().map(|e| (q, e.matrix)));
        }
    }
    for _ in 0..10_000 {
        let (q, w) = &certs[rng.random_range(0..certs.len())];
        let m: Vec<Vec<f64>> =
            w.b.iter()
                .map(|&bi| {
                    let mut row: Vec<f64> = (0..*q).map(|_| rng.random_range(-1.0..1.0)).collect();
                    let top = row.iter().cloned().fold(f64::MIN, f64::max);
                    row[bi] = top + rng.random_range(1e-6..1.0);
                    row
                })
                .collect();
        assert!(w.frobenius(&m) <= 1e-9);
    }
}

/// Random distributions with `mu(P) >= 1 - gamma` give vector solutions
/// on which the weighted first moment is at least `-gamma` and
/// `<u, u> <= <u, v0> + 2 gamma`.
#[test]
fn soundness_inequalities() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(3);
    let pairs: Vec<PromisePair> = vec![
        zoo::two_sat().pairs[0].clone(),
        zoo::k_sat_at_least(3, 2).pairs[0].clone(),
        zoo::k_sat_at_least(4, 2).pairs[0].clone(),
        zoo::max_cut().pairs[0].clone(),
    ];
    for p in &pairs {
        let k = p.arity();
        let ws: Vec<WeightVector> = all_majority(p).into_iter().map(Option::unwrap).collect();
        for gamma in [0.0, 0.01, 0.1] {
            for _ in 0..1000 {
                let out_mass = gamma * rng.random::<f64>();
                let raw: Vec<f64> = (0..1 << k).map(|_| rng.random::<f64>()).collect();
                let in_p: Vec<bool> = all_tuples(k, 2).map(|a| p.strong.contains(&a)).collect();
                let (sp, sn): (f64, f64) =
                    raw.iter().zip(&in_p).fold((0.0, 0.0), |(a, b), (r, &i)| if i { (a + r, b) } else { (a, b + r) });
                let mu: Vec<f64> = raw
                    .iter()
                    .zip(&in_p)
                    .map(|(r, &i)| if i { r / sp * (1.0 - out_mass) } else { r / sn * out_mass })
                    .collect();
                let (v0, vs) = soundness::moment_vectors(k, &mu);
                for w in &ws {
                    let (first, uu, uv0) = soundness::weighted_moments(&w.w, &v0, &vs);
                    assert!(first >= -gamma - 1e-9);
                    assert!(uu <= uv0 + 2.0 * gamma + 1e-9);
                }
            }
        }
    }
}
