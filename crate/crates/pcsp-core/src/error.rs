use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PcspError {
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("arity mismatch: expected {expected}, found {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("element {element} out of range for domain of size {size}")]
    OutOfRange { element: usize, size: usize },
    #[error("variable {var} out of range (n_vars = {n_vars})")]
    VariableOutOfRange { var: usize, n_vars: usize },
    #[error("pair index {0} out of range")]
    PairOutOfRange(usize),
    #[error("negative or non-finite weight {0}")]
    NegativeWeight(f64),
    #[error("clause weights sum to zero")]
    ZeroWeight,
    #[error("literal sign {0} is not allowed here (signs need a folded Boolean template)")]
    BadSign(i64),
    #[error("homomorphism does not map strong tuple {0:?} into the weak relation")]
    NotHomomorphic(Vec<usize>),
    #[error("template is not Boolean with identity homomorphism")]
    NotBoolean,
    #[error("domain mismatch: {0}")]
    DomainMismatch(String),
    #[error("size limit exceeded: {0}")]
    Budget(String),
}

impl From<serde_json::Error> for PcspError {
    fn from(e: serde_json::Error) -> Self {
        PcspError::Malformed(e.to_string())
    }
}
