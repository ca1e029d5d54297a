//! Planted instances with a controlled fraction of corrupted clauses.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::{expand_folded_idempotent, rng, zoo, Clause, Instance, Literal, Template};

/// A planted instance: exactly `round(eps * m)` clauses are violated by
/// `planted`, every other clause is satisfied by it.
#[derive(Clone, Debug)]
pub struct Planted {
    pub template: Template,
    pub instance: Instance,
    pub planted: Vec<usize>,
    pub corrupted: Vec<bool>,
}

fn corrupted_set(m: usize, eps: f64, rng: &mut impl Rng) -> Vec<bool> {
    let bad = ((eps * m as f64).round() as usize).min(m);
    let mut flags = vec![false; m];
    flags[..bad].iter_mut().for_each(|f| *f = true);
    flags.shuffle(rng);
    flags
}

fn distinct_pair(n: usize, rng: &mut impl Rng) -> (usize, usize) {
    let i = rng.random_range(0..n);
    let mut j = rng.random_range(0..n - 1);
    if j >= i {
        j += 1;
    }
    (i, j)
}

/// Random 2-SAT over folded `(x or y)` on distinct variable pairs.
pub fn planted_two_sat(n: usize, m: usize, eps: f64, seed: u64) -> Planted {
    assert!(n >= 2 && m >= 1);
    let template = expand_folded_idempotent(&zoo::two_sat()).expect("2-SAT is Boolean");
    let mut rng = rng::stream(seed, 0x2_5A7);
    let planted: Vec<usize> = (0..n).map(|_| rng.random_range(0..2)).collect();
    let corrupted = corrupted_set(m, eps, &mut rng);
    let mut clauses = Vec::with_capacity(m);
    for &bad in &corrupted {
        let (i, j) = distinct_pair(n, &mut rng);
        let lits = if bad {
            // both literals false under the planted assignment
            vec![lit_with_value(i, planted[i], 0), lit_with_value(j, planted[j], 0)]
        } else {
            loop {
                let cand = vec![random_lit(i, &mut rng), random_lit(j, &mut rng)];
                if cand.iter().any(|l| l.apply(planted[l.var]) == 1) {
                    break cand;
                }
            }
        };
        clauses.push(Clause::new(0, lits, 1.0));
    }
    let instance = Instance::new(&template, n, clauses).expect("generated instance is valid");
    Planted { template, instance, planted, corrupted }
}

fn random_lit(var: usize, rng: &mut impl Rng) -> Literal {
    if rng.random_bool(0.5) {
        Literal::pos(var)
    } else {
        Literal::neg(var)
    }
}

fn lit_with_value(var: usize, value: usize, want: usize) -> Literal {
    if value == want {
        Literal::pos(var)
    } else {
        Literal::neg(var)
    }
}

/// Unique Games over `q` labels; clause pair index is the permutation index
/// of [`zoo::unique_games`].
pub fn planted_unique_games(q: usize, n: usize, m: usize, eps: f64, seed: u64) -> Planted {
    assert!(q >= 2 && n >= 2 && m >= 1);
    let template = zoo::unique_games(q);
    let perms = zoo::permutations(q);
    let mut rng = rng::stream(seed, 0x06_A3E5);
    let planted: Vec<usize> = (0..n).map(|_| rng.random_range(0..q)).collect();
    let corrupted = corrupted_set(m, eps, &mut rng);
    let mut clauses = Vec::with_capacity(m);
    for &bad in &corrupted {
        let (i, j) = distinct_pair(n, &mut rng);
        let p = loop {
            let p = rng.random_range(0..perms.len());
            if (perms[p][planted[i]] == planted[j]) != bad {
                break p;
            }
        };
        clauses.push(Clause::new(p, vec![Literal::pos(i), Literal::pos(j)], 1.0));
    }
    let instance = Instance::new(&template, n, clauses).expect("generated instance is valid");
    Planted { template, instance, planted, corrupted }
}
