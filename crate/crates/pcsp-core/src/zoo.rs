//! Named templates used throughout the toolkit and its tests.

use crate::{DomainPair, PromisePair, Relation, Template};

fn boolean(pairs: Vec<PromisePair>) -> Template {
    Template::new(DomainPair::same(2), pairs, false, false).expect("built-in template")
}

fn pair(strong: Relation, weak: Relation) -> PromisePair {
    PromisePair::new(strong, weak).expect("built-in pair")
}

fn rel(arity: usize, domain: usize, pred: impl Fn(&[usize]) -> bool) -> Relation {
    Relation::from_predicate(arity, domain, pred).expect("built-in relation")
}

fn weight(t: &[usize]) -> usize {
    t.iter().sum()
}

/// The clause `(x or y)`; other sign patterns come from folding.
pub fn two_sat() -> Template {
    let r = rel(2, 2, |t| weight(t) >= 1);
    boolean(vec![pair(r.clone(), r)])
}

/// `P` = Hamming weight at least `g`, `Q` = ordinary `k`-SAT clause.
pub fn k_sat_at_least(k: usize, g: usize) -> Template {
    boolean(vec![pair(rel(k, 2, |t| weight(t) >= g), rel(k, 2, |t| weight(t) >= 1))])
}

/// 1-in-3-SAT versus NAE-SAT.
pub fn one_in_three_vs_nae() -> Template {
    boolean(vec![pair(rel(3, 2, |t| weight(t) == 1), rel(3, 2, |t| weight(t) == 1 || weight(t) == 2))])
}

/// Boolean 3-XOR with both right-hand sides.
pub fn three_xor() -> Template {
    let even = rel(3, 2, |t| weight(t) % 2 == 0);
    let odd = rel(3, 2, |t| weight(t) % 2 == 1);
    boolean(vec![pair(even.clone(), even), pair(odd.clone(), odd)])
}

/// The `!=` constraint.
pub fn max_cut() -> Template {
    let r = rel(2, 2, |t| t[0] != t[1]);
    boolean(vec![pair(r.clone(), r)])
}

/// The Horn clause `(not x or not y or z)`.
pub fn horn3() -> Template {
    let r = rel(3, 2, |t| !(t[0] == 1 && t[1] == 1 && t[2] == 0));
    boolean(vec![pair(r.clone(), r)])
}

/// Equality over `q` elements.
pub fn equality(q: usize) -> Template {
    let r = rel(2, q, |t| t[0] == t[1]);
    Template::new(DomainPair::same(q), vec![pair(r.clone(), r)], false, false).expect("built-in template")
}

/// All permutations of `0..q` in lexicographic order.
pub fn permutations(q: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for e in 0..used.len() {
            if !used[e] {
                used[e] = true;
                prefix.push(e);
                rec(prefix, used, out);
                prefix.pop();
                used[e] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; q], &mut out);
    out
}

/// Unique Games over `q` labels: one pair `{(a, pi(a))}` per permutation,
/// in the order of [`permutations`].
pub fn unique_games(q: usize) -> Template {
    let pairs = permutations(q)
        .into_iter()
        .map(|pi| {
            let r = rel(2, q, |t| pi[t[0]] == t[1]);
            pair(r.clone(), r)
        })
        .collect();
    Template::new(DomainPair::same(q), pairs, false, false).expect("built-in template")
}

/// Template by name, as accepted on the command line.
pub fn by_name(name: &str) -> Option<Template> {
    Some(match name {
        "two-sat" => two_sat(),
        "1in3-nae" => one_in_three_vs_nae(),
        "3xor" => three_xor(),
        "max-cut" => max_cut(),
        "horn3" => horn3(),
        _ => {
            if let Some(q) = name.strip_prefix("ug") {
                unique_games(q.parse().ok().filter(|q| (2..=5).contains(q))?)
            } else {
                let (k, g) = name.strip_prefix("ksat")?.split_once('-')?;
                k_sat_at_least(k.parse().ok()?, g.parse().ok()?)
            }
        }
    })
}

pub const NAMES: &[&str] = &["two-sat", "1in3-nae", "3xor", "max-cut", "horn3", "ug<q>", "ksat<k>-<g>"];
