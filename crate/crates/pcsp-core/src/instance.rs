use crate::{PcspError, Result, Template};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Literal {
    pub var: usize,
    /// `+1` or `-1`; `-1` only on folded Boolean templates.
    pub sign: i8,
}

impl Literal {
    pub fn pos(var: usize) -> Self {
        Literal { var, sign: 1 }
    }

    pub fn neg(var: usize) -> Self {
        Literal { var, sign: -1 }
    }

    /// The literal's value given the variable's value.
    #[inline]
    pub fn apply(&self, value: usize) -> usize {
        if self.sign < 0 {
            1 - value
        } else {
            value
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Clause {
    pub pair: usize,
    pub lits: Vec<Literal>,
    pub weight: f64,
}

impl Clause {
    pub fn new(pair: usize, lits: Vec<Literal>, weight: f64) -> Self {
        Clause { pair, lits, weight }
    }

    /// Literal-value tuple under a variable assignment.
    pub fn tuple(&self, values: &[usize]) -> Vec<usize> {
        self.lits.iter().map(|l| l.apply(values[l.var])).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub n_vars: usize,
    pub clauses: Vec<Clause>,
}

impl Instance {
    /// Validate against `template` and normalise the weights to sum to one.
    ///
    /// Weights already summing to one within `1e-12` are kept bit-for-bit.
    pub fn new(template: &Template, n_vars: usize, mut clauses: Vec<Clause>) -> Result<Self> {
        let mut total = 0.0;
        for c in &clauses {
            let pair = template.pair(c.pair)?;
            if c.lits.len() != pair.arity() {
                return Err(PcspError::ArityMismatch { expected: pair.arity(), found: c.lits.len() });
            }
            for l in &c.lits {
                if l.var >= n_vars {
                    return Err(PcspError::VariableOutOfRange { var: l.var, n_vars });
                }
                match l.sign {
                    1 => {}
                    -1 if template.folded => {}
                    s => return Err(PcspError::BadSign(s as i64)),
                }
            }
            if !(c.weight >= 0.0) || !c.weight.is_finite() {
                return Err(PcspError::NegativeWeight(c.weight));
            }
            total += c.weight;
        }
        if !clauses.is_empty() {
            if total <= 0.0 {
                return Err(PcspError::ZeroWeight);
            }
            if (total - 1.0).abs() > 1e-12 {
                for c in clauses.iter_mut() {
                    c.weight /= total;
                }
            }
        }
        Ok(Instance { n_vars, clauses })
    }

    pub fn total_weight(&self) -> f64 {
        self.clauses.iter().map(|c| c.weight).sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Strong,
    Weak,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Assignment {
    pub side: Side,
    pub values: Vec<usize>,
}

impl Assignment {
    pub fn new(side: Side, values: Vec<usize>) -> Self {
        Assignment { side, values }
    }

    /// Push a strong assignment through the template homomorphism.
    pub fn to_weak(&self, template: &Template) -> Assignment {
        let values = match self.side {
            Side::Strong => self.values.iter().map(|&v| template.domain.hom[v]).collect(),
            Side::Weak => self.values.clone(),
        };
        Assignment { side: Side::Weak, values }
    }
}

/// Total weight of clauses whose literal tuple lies in `P` (strong side) or
/// `Q` (weak side).
pub fn eval_value(template: &Template, instance: &Instance, assignment: &Assignment, side: Side) -> Result<f64> {
    if assignment.side != side {
        return Err(PcspError::DomainMismatch("assignment side differs from requested side".into()));
    }
    if assignment.values.len() != instance.n_vars {
        return Err(PcspError::ArityMismatch { expected: instance.n_vars, found: assignment.values.len() });
    }
    let size = match side {
        Side::Strong => template.domain.size_a,
        Side::Weak => template.domain.size_b,
    };
    if let Some(&e) = assignment.values.iter().find(|&&e| e >= size) {
        return Err(PcspError::OutOfRange { element: e, size });
    }
    let mut value = 0.0;
    for c in &instance.clauses {
        if c.lits.iter().any(|l| l.sign < 0) && !template.folded {
            return Err(PcspError::BadSign(-1));
        }
        let pair = template.pair(c.pair)?;
        let rel = match side {
            Side::Strong => &pair.strong,
            Side::Weak => &pair.weak,
        };
        if rel.contains(&c.tuple(&assignment.values)) {
            value += c.weight;
        }
    }
    Ok(value)
}
