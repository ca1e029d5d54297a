//! Operations `A^L -> B` and brute-force polymorphism checks.
//!
//! Boolean families read element `0` as `-1` and `1` as `+1`:
//! `MAJ_L = 1[sum x >= 0]`, `AT_L = 1[sum (-1)^(i-1) x_i >= 0]`,
//! `Parity_L = 1[sum x = L mod 4]`. Plurality returns the most frequent
//! element, ties broken by a fixed element order.

use pcsp_core::{PromisePair, Relation, Template, Tuple};
use thiserror::Error;

/// Maximum number of column choices `|P|^L` an exhaustive check will visit.
pub const ENUMERATION_BUDGET: u64 = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolyError {
    #[error("{0:?} needs an odd arity, got {1}")]
    EvenArity(Family, usize),
    #[error("{0:?} is defined on the Boolean domain only")]
    NotBoolean(Family),
    #[error("arity must be positive")]
    ZeroArity,
    #[error("tie-break order must be a permutation of the domain")]
    BadTieOrder,
    #[error("table has {found} entries, expected {expected}")]
    BadTable { expected: usize, found: usize },
    #[error("enumeration of {0} column choices exceeds the budget")]
    Budget(u64),
    #[error("domain mismatch: {0}")]
    DomainMismatch(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Maj,
    At,
    Parity,
    Plurality,
}

impl std::str::FromStr for Family {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "maj" => Ok(Family::Maj),
            "at" => Ok(Family::At),
            "parity" => Ok(Family::Parity),
            "plurality" => Ok(Family::Plurality),
            _ => Err(format!("unknown family '{s}' (maj | at | parity | plurality)")),
        }
    }
}

#[derive(Clone, Debug)]
enum Rule {
    Named { family: Family, tie_rank: Vec<usize> },
    Table(Vec<usize>),
}

#[derive(Clone, Debug)]
pub struct FiniteOperation {
    arity: usize,
    domain: usize,
    codomain: usize,
    rule: Rule,
}

/// Build a named operation. `tie_break` lists the domain in preference
/// order (plurality only); `None` means `0 < 1 < ...`.
pub fn make_named_operation(
    family: Family,
    arity: usize,
    domain_size: usize,
    tie_break: Option<&[usize]>,
) -> Result<FiniteOperation, PolyError> {
    if arity == 0 {
        return Err(PolyError::ZeroArity);
    }
    if family != Family::Plurality {
        if domain_size != 2 {
            return Err(PolyError::NotBoolean(family));
        }
        if arity % 2 == 0 {
            return Err(PolyError::EvenArity(family, arity));
        }
    }
    let order: Vec<usize> = tie_break.map(<[usize]>::to_vec).unwrap_or_else(|| (0..domain_size).collect());
    let mut tie_rank = vec![usize::MAX; domain_size];
    if order.len() != domain_size {
        return Err(PolyError::BadTieOrder);
    }
    for (rank, &e) in order.iter().enumerate() {
        if e >= domain_size || tie_rank[e] != usize::MAX {
            return Err(PolyError::BadTieOrder);
        }
        tie_rank[e] = rank;
    }
    Ok(FiniteOperation { arity, domain: domain_size, codomain: domain_size, rule: Rule::Named { family, tie_rank } })
}

impl FiniteOperation {
    /// Operation given by its full value table in lexicographic input order.
    pub fn from_table(arity: usize, domain: usize, codomain: usize, table: Vec<usize>) -> Result<Self, PolyError> {
        let expected = (domain as u64).checked_pow(arity as u32).filter(|&n| n <= ENUMERATION_BUDGET);
        let expected = expected.ok_or(PolyError::Budget(u64::MAX))? as usize;
        if table.len() != expected {
            return Err(PolyError::BadTable { expected, found: table.len() });
        }
        if table.iter().any(|&v| v >= codomain) {
            return Err(PolyError::DomainMismatch("table value outside codomain".into()));
        }
        Ok(FiniteOperation { arity, domain, codomain, rule: Rule::Table(table) })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn domain(&self) -> usize {
        self.domain
    }

    /// Invariant under permuting arguments (every named family but AT).
    pub fn is_symmetric(&self) -> bool {
        matches!(&self.rule, Rule::Named { family, .. } if *family != Family::At)
    }

    pub fn eval(&self, x: &[usize]) -> usize {
        debug_assert_eq!(x.len(), self.arity);
        match &self.rule {
            Rule::Table(t) => t[x.iter().fold(0, |acc, &e| acc * self.domain + e)],
            Rule::Named { family, tie_rank } => match family {
                Family::Maj => usize::from(x.iter().map(|&e| pm(e)).sum::<i64>() >= 0),
                Family::At => {
                    let s: i64 = x.iter().enumerate().map(|(i, &e)| if i % 2 == 0 { pm(e) } else { -pm(e) }).sum();
                    usize::from(s >= 0)
                }
                Family::Parity => {
                    let s: i64 = x.iter().map(|&e| pm(e)).sum();
                    usize::from((s - self.arity as i64).rem_euclid(4) == 0)
                }
                Family::Plurality => {
                    let mut counts = [0usize; pcsp_core::MAX_DOMAIN];
                    let counts = &mut counts[..self.domain.max(1)];
                    for &e in x {
                        counts[e] += 1;
                    }
                    (0..self.domain)
                        .max_by(|&a, &b| counts[a].cmp(&counts[b]).then(tie_rank[b].cmp(&tie_rank[a])))
                        .expect("nonempty domain")
                }
            },
        }
    }
}

fn pm(e: usize) -> i64 {
    if e == 0 {
        -1
    } else {
        1
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Counterexample {
    /// `L` tuples of `P`, one per argument of the operation.
    pub columns: Vec<Tuple>,
    /// Coordinate-wise image, not in `Q`.
    pub output: Tuple,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PolyWitness {
    pub verdict: bool,
    pub counterexample: Option<Counterexample>,
}

/// Exhaustive check over all `|P|^L` column choices in lexicographic order
/// of column indices; the first failure is returned. For symmetric
/// operations only nondecreasing index tuples are visited: any failure can
/// be sorted into one, so the first failure found is the same.
pub fn check_polymorphism(op: &FiniteOperation, pair: &PromisePair) -> Result<PolyWitness, PolyError> {
    check_relations(op, &pair.strong, &pair.weak)
}

fn check_relations(op: &FiniteOperation, strong: &Relation, weak: &Relation) -> Result<PolyWitness, PolyError> {
    if strong.domain() != op.domain {
        return Err(PolyError::DomainMismatch(format!(
            "operation on {} elements, strong relation on {}",
            op.domain,
            strong.domain()
        )));
    }
    if weak.domain() != op.codomain {
        return Err(PolyError::DomainMismatch(format!(
            "operation into {} elements, weak relation on {}",
            op.codomain,
            weak.domain()
        )));
    }
    let p = strong.tuples();
    let symmetric = op.is_symmetric();
    let total = if symmetric {
        multisets(p.len() as u64, op.arity as u64)
    } else {
        (p.len() as u64).checked_pow(op.arity as u32).unwrap_or(u64::MAX)
    };
    if total > ENUMERATION_BUDGET {
        return Err(PolyError::Budget(total));
    }
    let k = strong.arity();
    let l = op.arity;
    let mut idx = vec![0usize; l];
    let mut arg = vec![0usize; l];
    let mut out = vec![0usize; k];
    loop {
        for j in 0..k {
            for (a, &i) in arg.iter_mut().zip(&idx) {
                *a = p[i][j];
            }
            out[j] = op.eval(&arg);
        }
        if !weak.contains(&out) {
            return Ok(PolyWitness {
                verdict: false,
                counterexample: Some(Counterexample {
                    columns: idx.iter().map(|&i| p[i].clone()).collect(),
                    output: out,
                }),
            });
        }
        // odometer, last position fastest
        let mut pos = l;
        loop {
            if pos == 0 {
                return Ok(PolyWitness { verdict: true, counterexample: None });
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < p.len() {
                if symmetric {
                    let v = idx[pos];
                    idx[pos..].iter_mut().for_each(|i| *i = v);
                }
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// `C(n + l - 1, l)`, saturating.
fn multisets(n: u64, l: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    let mut c: u128 = 1;
    for i in 0..l {
        c = c * u128::from(n + i) / u128::from(i + 1);
        if c > u128::from(u64::MAX) {
            return u64::MAX;
        }
    }
    c as u64
}

/// Result of checking every relation pair of a template.
#[derive(Clone, Debug, PartialEq)]
pub struct TemplateVerdict {
    /// `(pair index, literal signs, witness)`; signs are all `+1` unless the
    /// template is folded, in which case every sign pattern is listed.
    pub checks: Vec<(usize, Vec<i8>, PolyWitness)>,
}

impl TemplateVerdict {
    pub fn holds(&self) -> bool {
        self.checks.iter().all(|c| c.2.verdict)
    }

    pub fn first_failure(&self) -> Option<&(usize, Vec<i8>, PolyWitness)> {
        self.checks.iter().find(|c| !c.2.verdict)
    }
}

/// Check `op` against every pair of `template`. On a folded template a
/// relation pair stands for all of its literal-sign variants, and each one
/// is checked.
pub fn check_template(op: &FiniteOperation, template: &Template) -> Result<TemplateVerdict, PolyError> {
    let mut checks = Vec::new();
    for (pi, pair) in template.pairs.iter().enumerate() {
        let k = pair.arity();
        let patterns: Vec<Vec<i8>> = if template.folded {
            (0..1usize << k).map(|m| (0..k).map(|j| if m >> (k - 1 - j) & 1 == 1 { -1 } else { 1 }).collect()).collect()
        } else {
            vec![vec![1; k]]
        };
        for signs in patterns {
            let strong = flip(&pair.strong, &signs);
            let weak = flip(&pair.weak, &signs);
            checks.push((pi, signs, check_relations(op, &strong, &weak)?));
        }
    }
    Ok(TemplateVerdict { checks })
}

fn flip(rel: &Relation, signs: &[i8]) -> Relation {
    let tuples =
        rel.tuples().iter().map(|t| t.iter().zip(signs).map(|(&e, &s)| if s < 0 { 1 - e } else { e }).collect());
    Relation::new(rel.arity(), rel.domain(), tuples).expect("sign flip preserves shape")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_examples() {
        let maj = make_named_operation(Family::Maj, 3, 2, None).unwrap();
        assert_eq!(maj.eval(&[1, 1, 0]), 1);
        let at = make_named_operation(Family::At, 3, 2, None).unwrap();
        // (-1, +1, -1): -1 - 1 - 1 = -3
        assert_eq!(at.eval(&[0, 1, 0]), 0);
        assert_eq!(at.eval(&[1, 1, 0]), 0);
        assert_eq!(at.eval(&[1, 0, 0]), 1);
        let plur = make_named_operation(Family::Plurality, 5, 3, None).unwrap();
        assert_eq!(plur.eval(&[0, 1, 1, 2, 2]), 1);
        let plur_rev = make_named_operation(Family::Plurality, 5, 3, Some(&[2, 1, 0])).unwrap();
        assert_eq!(plur_rev.eval(&[0, 1, 1, 2, 2]), 2);
        let par = make_named_operation(Family::Parity, 3, 2, None).unwrap();
        for x in pcsp_core::all_tuples(3, 2) {
            assert_eq!(par.eval(&x), x.iter().sum::<usize>() % 2);
        }
    }

    #[test]
    fn construction_errors() {
        assert_eq!(make_named_operation(Family::Maj, 4, 2, None).unwrap_err(), PolyError::EvenArity(Family::Maj, 4));
        assert_eq!(make_named_operation(Family::At, 3, 3, None).unwrap_err(), PolyError::NotBoolean(Family::At));
        assert!(make_named_operation(Family::Plurality, 3, 3, Some(&[0, 0, 1])).is_err());
        assert!(make_named_operation(Family::Plurality, 0, 3, None).is_err());
    }

    #[test]
    fn table_matches_rule() {
        let maj = make_named_operation(Family::Maj, 3, 2, None).unwrap();
        let table: Vec<usize> = pcsp_core::all_tuples(3, 2).map(|x| maj.eval(&x)).collect();
        let t = FiniteOperation::from_table(3, 2, 2, table).unwrap();
        for x in pcsp_core::all_tuples(3, 2) {
            assert_eq!(t.eval(&x), maj.eval(&x));
        }
    }
}
