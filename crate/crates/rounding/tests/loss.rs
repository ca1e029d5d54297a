use basic_sdp::{build_relaxation, integral_solution, solve_sdp, SolveOptions};
use pcsp_core::{generate, zoo};
use rounding::*;
use separation::{certify_separable, Certification};

fn spec(scheme: Scheme, trials: usize) -> RoundSpec {
    RoundSpec { scheme, epsilon: 0.05, seed: 17, trials }
}

#[test]
fn integral_solutions_lose_nothing() {
    let sat = generate::planted_two_sat(20, 60, 0.0, 1);
    let sol = integral_solution(&sat.template, &sat.instance, &sat.planted).unwrap();
    for scheme in [Scheme::Cmm, Scheme::Independent, Scheme::Correlated] {
        let est = estimate_loss(&sat.template, &sat.instance, &sol, &spec(scheme, 50), None).unwrap();
        assert_eq!(est.mean, 0.0, "{scheme:?}");
        assert_eq!(est.std_error, 0.0);
        assert!(est.patterns.iter().all(|p| p.is_empty()));
    }
    let ug = generate::planted_unique_games(3, 12, 30, 0.0, 2);
    let Certification::Separable(cert) = certify_separable(&ug.template).unwrap() else { panic!("UG is separable") };
    let sol = integral_solution(&ug.template, &ug.instance, &ug.planted).unwrap();
    for scheme in [Scheme::Separable, Scheme::Independent, Scheme::Correlated] {
        let est = estimate_loss(&ug.template, &ug.instance, &sol, &spec(scheme, 50), Some(&cert)).unwrap();
        assert_eq!(est.mean, 0.0, "{scheme:?}");
    }
}

#[test]
fn gates_and_spec_checks() {
    let ug = generate::planted_unique_games(3, 6, 10, 0.0, 2);
    let sol = integral_solution(&ug.template, &ug.instance, &ug.planted).unwrap();
    let err = estimate_loss(&ug.template, &ug.instance, &sol, &spec(Scheme::Cmm, 5), None).unwrap_err();
    assert!(matches!(err, RoundError::Incompatible(_)));
    let err = estimate_loss(&ug.template, &ug.instance, &sol, &spec(Scheme::Separable, 5), None).unwrap_err();
    assert!(matches!(err, RoundError::Incompatible(_)));
    let bad = RoundSpec { epsilon: 1.0, ..spec(Scheme::Independent, 5) };
    assert!(matches!(estimate_loss(&ug.template, &ug.instance, &sol, &bad, None), Err(RoundError::BadSpec(_))));
    let bad = RoundSpec { trials: 0, ..spec(Scheme::Independent, 5) };
    assert!(matches!(estimate_loss(&ug.template, &ug.instance, &sol, &bad, None), Err(RoundError::BadSpec(_))));
    assert_eq!("separable".parse::<Scheme>().unwrap(), Scheme::Separable);
    assert!("sdp".parse::<Scheme>().is_err());
}

#[test]
fn estimates_do_not_depend_on_thread_count() {
    let sat = generate::planted_two_sat(30, 90, 0.1, 3);
    let p = build_relaxation(&sat.template, &sat.instance).unwrap();
    let sol = solve_sdp(&p, &SolveOptions::default()).unwrap();
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| estimate_loss(&sat.template, &sat.instance, &sol, &spec(Scheme::Cmm, 64), None).unwrap())
    };
    let one = run(1);
    let four = run(4);
    assert_eq!(one, four);
    assert!(one.mean > 0.0 && one.mean < 0.5);
    let violated: u64 = one.patterns.iter().flat_map(|p| p.values()).sum();
    let from_records: f64 = one.records.iter().map(|r| 1.0 - r.weak_value).sum::<f64>() * 90.0;
    assert!((violated as f64 - from_records).abs() < 1e-6);
}

#[test]
fn gammas_from_solution() {
    let t = zoo::max_cut();
    let sat = generate::planted_two_sat(10, 30, 0.2, 4);
    let p = build_relaxation(&sat.template, &sat.instance).unwrap();
    let sol = solve_sdp(&p, &SolveOptions::default()).unwrap();
    let g = clause_gammas(&sat.template, &sat.instance, &sol).unwrap();
    let mean: f64 = g.iter().zip(&sat.instance.clauses).map(|(g, c)| g * c.weight).sum();
    assert!((1.0 - mean - sol.value).abs() < 1e-9);
    assert!(g.iter().all(|&v| (-1e-9..=1.0 + 1e-9).contains(&v)));
    assert!(clause_gammas(&t, &sat.instance, &basic_sdp::GramSolution { mus: vec![], ..sol }).is_err());
}
