use crate::{PcspError, Relation, Result};

/// Strong domain `A`, weak domain `B` and the homomorphism `A -> B`.
#[derive(Clone, Debug, PartialEq)]
pub struct DomainPair {
    pub size_a: usize,
    pub size_b: usize,
    pub hom: Vec<usize>,
}

impl DomainPair {
    pub fn new(size_a: usize, size_b: usize, hom: Vec<usize>) -> Result<Self> {
        if size_a == 0 || size_b == 0 {
            return Err(PcspError::Malformed("empty domain".into()));
        }
        if hom.len() != size_a {
            return Err(PcspError::ArityMismatch { expected: size_a, found: hom.len() });
        }
        if let Some(&e) = hom.iter().find(|&&e| e >= size_b) {
            return Err(PcspError::OutOfRange { element: e, size: size_b });
        }
        Ok(DomainPair { size_a, size_b, hom })
    }

    /// `A = B` with the identity map.
    pub fn same(size: usize) -> Self {
        DomainPair { size_a: size, size_b: size, hom: (0..size).collect() }
    }

    pub fn is_same_domain(&self) -> bool {
        self.size_a == self.size_b && self.hom.iter().enumerate().all(|(i, &h)| i == h)
    }

    pub fn is_boolean(&self) -> bool {
        self.size_a == 2 && self.is_same_domain()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PromisePair {
    pub strong: Relation,
    pub weak: Relation,
}

impl PromisePair {
    pub fn new(strong: Relation, weak: Relation) -> Result<Self> {
        if strong.arity() != weak.arity() {
            return Err(PcspError::ArityMismatch { expected: strong.arity(), found: weak.arity() });
        }
        if strong.is_empty() {
            return Err(PcspError::Malformed("strong relation is empty".into()));
        }
        Ok(PromisePair { strong, weak })
    }

    /// `P = Q` over a same-domain template.
    pub fn csp(rel: Relation) -> Result<Self> {
        PromisePair::new(rel.clone(), rel)
    }

    pub fn arity(&self) -> usize {
        self.strong.arity()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Template {
    pub domain: DomainPair,
    pub pairs: Vec<PromisePair>,
    pub folded: bool,
    pub idempotent: bool,
}

impl Template {
    pub fn new(domain: DomainPair, pairs: Vec<PromisePair>, folded: bool, idempotent: bool) -> Result<Self> {
        if (folded || idempotent) && !domain.is_boolean() {
            return Err(PcspError::NotBoolean);
        }
        for p in &pairs {
            if p.strong.domain() != domain.size_a {
                return Err(PcspError::DomainMismatch(format!(
                    "strong relation over {} elements, |A| = {}",
                    p.strong.domain(),
                    domain.size_a
                )));
            }
            if p.weak.domain() != domain.size_b {
                return Err(PcspError::DomainMismatch(format!(
                    "weak relation over {} elements, |B| = {}",
                    p.weak.domain(),
                    domain.size_b
                )));
            }
            for t in p.strong.tuples() {
                let image: Vec<usize> = t.iter().map(|&e| domain.hom[e]).collect();
                if !p.weak.contains(&image) {
                    return Err(PcspError::NotHomomorphic(t.clone()));
                }
            }
        }
        Ok(Template { domain, pairs, folded, idempotent })
    }

    pub fn is_boolean(&self) -> bool {
        self.domain.is_boolean()
    }

    pub fn pair(&self, i: usize) -> Result<&PromisePair> {
        self.pairs.get(i).ok_or(PcspError::PairOutOfRange(i))
    }
}

/// Folded, idempotent closure of a Boolean same-domain template.
///
/// Folding is realised by admitting signed literals, so the pairs themselves
/// stay as they are. Idempotency appends the unary constant pairs `{1}/{1}`
/// and `{0}/{0}`. Applying this to an already folded and idempotent template
/// returns it unchanged.
pub fn expand_folded_idempotent(t: &Template) -> Result<Template> {
    if !t.is_boolean() {
        return Err(PcspError::NotBoolean);
    }
    let mut out = t.clone();
    out.folded = true;
    if !t.idempotent {
        for c in [1usize, 0] {
            out.pairs.push(PromisePair::csp(Relation::new(1, 2, vec![vec![c]])?)?);
        }
        out.idempotent = true;
    }
    Ok(out)
}
