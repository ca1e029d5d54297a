//! Compare against exhaustive vertex enumeration on tiny problems.

use linprog::{Cmp, Outcome, Problem};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Best objective over all basic feasible points of `A x <= b, x >= 0` in two
/// variables, by intersecting every pair of constraint lines.
fn brute_force(a: &[[f64; 2]], b: &[f64], c: [f64; 2]) -> Option<f64> {
    let mut lines: Vec<([f64; 2], f64)> = a.iter().copied().zip(b.iter().copied()).collect();
    lines.push(([1.0, 0.0], 0.0));
    lines.push(([0.0, 1.0], 0.0));
    let feasible = |x: [f64; 2]| {
        x[0] >= -1e-9 && x[1] >= -1e-9 && a.iter().zip(b).all(|(r, &bi)| r[0] * x[0] + r[1] * x[1] <= bi + 1e-9)
    };
    let mut best: Option<f64> = None;
    for i in 0..lines.len() {
        for j in i + 1..lines.len() {
            let (p, q) = (lines[i], lines[j]);
            let det = p.0[0] * q.0[1] - p.0[1] * q.0[0];
            if det.abs() < 1e-12 {
                continue;
            }
            let x = [(p.1 * q.0[1] - p.0[1] * q.1) / det, (p.0[0] * q.1 - p.1 * q.0[0]) / det];
            if feasible(x) {
                let v = c[0] * x[0] + c[1] * x[1];
                best = Some(best.map_or(v, |b: f64| b.max(v)));
            }
        }
    }
    best
}

#[test]
fn matches_vertex_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..300 {
        let m = rng.random_range(1..5);
        let a: Vec<[f64; 2]> = (0..m).map(|_| [rng.random_range(0.1..2.0), rng.random_range(0.1..2.0)]).collect();
        let b: Vec<f64> = (0..m).map(|_| rng.random_range(0.5..3.0)).collect();
        let c = [rng.random_range(-1.0..2.0), rng.random_range(-1.0..2.0)];
        let mut p = Problem::new(2);
        for (r, &bi) in a.iter().zip(&b) {
            p.add_row(r.to_vec(), Cmp::Le, bi);
        }
        p.maximize(c.to_vec());
        let expected = brute_force(&a, &b, c).unwrap();
        match p.solve() {
            Outcome::Optimal { x, value } => {
                assert!((value - expected).abs() < 1e-9, "{value} vs {expected}");
                assert!(p.max_violation(&x) < 1e-9);
            }
            o => panic!("{o:?}"),
        }
    }
}

#[test]
fn degenerate_problem_terminates() {
    // a classic cycling example under Dantzig's rule
    let mut p = Problem::new(4);
    p.add_row(vec![0.5, -5.5, -2.5, 9.0], Cmp::Le, 0.0);
    p.add_row(vec![0.5, -1.5, -0.5, 1.0], Cmp::Le, 0.0);
    p.add_row(vec![1.0, 0.0, 0.0, 0.0], Cmp::Le, 1.0);
    p.maximize(vec![10.0, -57.0, -9.0, -24.0]);
    match p.solve() {
        Outcome::Optimal { value, .. } => assert!((value - 1.0).abs() < 1e-9),
        o => panic!("{o:?}"),
    }
}
