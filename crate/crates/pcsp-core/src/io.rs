//! JSON instance files.
//!
//! ```json
//! {"domain":{"a":2,"b":2,"hom":[0,1]},
//!  "pairs":[{"arity":2,"strong":[[0,1],[1,0],[1,1]],"weak":[[0,1],[1,0],[1,1]]}],
//!  "folded":true,"idempotent":false,"n_vars":2,
//!  "clauses":[{"pair":0,"lits":[[0,1],[1,-1]],"w":1.0}]}
//! ```

use serde::{Deserialize, Serialize};

use crate::{Clause, DomainPair, Instance, Literal, PcspError, PromisePair, Relation, Result, Template};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DomainFile {
    a: usize,
    b: usize,
    hom: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PairFile {
    arity: usize,
    strong: Vec<Vec<usize>>,
    weak: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ClauseFile {
    pair: usize,
    lits: Vec<(usize, i64)>,
    w: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    domain: DomainFile,
    pairs: Vec<PairFile>,
    folded: bool,
    idempotent: bool,
    n_vars: usize,
    clauses: Vec<ClauseFile>,
}

pub fn parse_instance(bytes: &[u8]) -> Result<(Template, Instance)> {
    let file: InstanceFile = serde_json::from_slice(bytes)?;
    let domain = DomainPair::new(file.domain.a, file.domain.b, file.domain.hom)?;
    let mut pairs = Vec::with_capacity(file.pairs.len());
    for p in file.pairs {
        let strong = Relation::new(p.arity, domain.size_a, p.strong)?;
        let weak = Relation::new(p.arity, domain.size_b, p.weak)?;
        pairs.push(PromisePair::new(strong, weak)?);
    }
    let template = Template::new(domain, pairs, file.folded, file.idempotent)?;
    let mut clauses = Vec::with_capacity(file.clauses.len());
    for c in file.clauses {
        let mut lits = Vec::with_capacity(c.lits.len());
        for (var, sign) in c.lits {
            if sign != 1 && sign != -1 {
                return Err(PcspError::BadSign(sign));
            }
            lits.push(Literal { var, sign: sign as i8 });
        }
        clauses.push(Clause::new(c.pair, lits, c.w));
    }
    let instance = Instance::new(&template, file.n_vars, clauses)?;
    Ok((template, instance))
}

pub fn serialize_instance(template: &Template, instance: &Instance) -> Vec<u8> {
    let file = InstanceFile {
        domain: DomainFile { a: template.domain.size_a, b: template.domain.size_b, hom: template.domain.hom.clone() },
        pairs: template
            .pairs
            .iter()
            .map(|p| PairFile { arity: p.arity(), strong: p.strong.tuples().to_vec(), weak: p.weak.tuples().to_vec() })
            .collect(),
        folded: template.folded,
        idempotent: template.idempotent,
        n_vars: instance.n_vars,
        clauses: instance
            .clauses
            .iter()
            .map(|c| ClauseFile {
                pair: c.pair,
                lits: c.lits.iter().map(|l| (l.var, l.sign as i64)).collect(),
                w: c.weight,
            })
            .collect(),
    };
    serde_json::to_vec(&file).expect("instance serialization cannot fail")
}
