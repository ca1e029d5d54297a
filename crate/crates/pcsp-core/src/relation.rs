use crate::{PcspError, Result};

pub type Tuple = Vec<usize>;

pub const MAX_ARITY: usize = 6;
pub const MAX_DOMAIN: usize = 8;

/// A finite relation stored as a sorted tuple list plus a membership table
/// indexed by the mixed-radix code of the tuple.
#[derive(Clone, Debug)]
pub struct Relation {
    arity: usize,
    domain: usize,
    tuples: Vec<Tuple>,
    member: Vec<bool>,
}

impl PartialEq for Relation {
    fn eq(&self, other: &Self) -> bool {
        self.arity == other.arity && self.domain == other.domain && self.tuples == other.tuples
    }
}

impl Relation {
    pub fn new(arity: usize, domain: usize, tuples: impl IntoIterator<Item = Tuple>) -> Result<Self> {
        check_shape(arity, domain)?;
        let mut member = vec![false; domain.pow(arity as u32)];
        let mut list = Vec::new();
        for t in tuples {
            if t.len() != arity {
                return Err(PcspError::ArityMismatch { expected: arity, found: t.len() });
            }
            if let Some(&e) = t.iter().find(|&&e| e >= domain) {
                return Err(PcspError::OutOfRange { element: e, size: domain });
            }
            let code = encode(domain, &t);
            if !member[code] {
                member[code] = true;
                list.push(t);
            }
        }
        list.sort();
        Ok(Relation { arity, domain, tuples: list, member })
    }

    /// All tuples of `domain^arity` satisfying `pred`.
    pub fn from_predicate(arity: usize, domain: usize, pred: impl Fn(&[usize]) -> bool) -> Result<Self> {
        check_shape(arity, domain)?;
        let all = all_tuples(arity, domain).filter(|t| pred(t));
        Relation::new(arity, domain, all)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn domain(&self) -> usize {
        self.domain
    }

    pub fn tuples(&self) -> &[Tuple] {
        &self.tuples
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn contains(&self, t: &[usize]) -> bool {
        t.len() == self.arity && t.iter().all(|&e| e < self.domain) && self.member[encode(self.domain, t)]
    }

    /// Tuples of `domain^arity` outside the relation, in lexicographic order.
    pub fn complement(&self) -> Vec<Tuple> {
        all_tuples(self.arity, self.domain).filter(|t| !self.contains(t)).collect()
    }
}

fn check_shape(arity: usize, domain: usize) -> Result<()> {
    if arity == 0 || arity > MAX_ARITY {
        return Err(PcspError::Budget(format!("arity {arity} outside 1..={MAX_ARITY}")));
    }
    if domain == 0 || domain > MAX_DOMAIN {
        return Err(PcspError::Budget(format!("domain size {domain} outside 1..={MAX_DOMAIN}")));
    }
    Ok(())
}

pub(crate) fn encode(domain: usize, t: &[usize]) -> usize {
    t.iter().fold(0, |acc, &e| acc * domain + e)
}

/// Iterate `domain^arity` in lexicographic order.
pub fn all_tuples(arity: usize, domain: usize) -> impl Iterator<Item = Tuple> {
    let total = domain.pow(arity as u32);
    (0..total).map(move |mut code| {
        let mut t = vec![0; arity];
        for slot in t.iter_mut().rev() {
            *slot = code % domain;
            code /= domain;
        }
        t
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn membership_and_order() {
        let r = Relation::new(2, 2, vec![vec![1, 1], vec![0, 1], vec![1, 0], vec![0, 1]]).unwrap();
        assert_eq!(r.tuples(), &[vec![0, 1], vec![1, 0], vec![1, 1]]);
        assert!(r.contains(&[1, 0]));
        assert!(!r.contains(&[0, 0]));
        assert_eq!(r.complement(), vec![vec![0, 0]]);
    }

    #[test]
    fn rejects_bad_tuples() {
        assert!(matches!(Relation::new(2, 2, vec![vec![0]]), Err(PcspError::ArityMismatch { expected: 2, found: 1 })));
        assert!(matches!(Relation::new(1, 2, vec![vec![2]]), Err(PcspError::OutOfRange { .. })));
        assert!(Relation::new(7, 2, vec![]).is_err());
    }

    #[test]
    fn lex_enumeration() {
        let v: Vec<_> = all_tuples(2, 3).collect();
        assert_eq!(v.len(), 9);
        assert_eq!(v[0], vec![0, 0]);
        assert_eq!(v[5], vec![1, 2]);
    }
}
