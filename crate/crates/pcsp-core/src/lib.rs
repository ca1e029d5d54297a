//! Finite-domain promise templates and weighted instances.
//!
//! A [`Template`] is a list of promise pairs `(P, Q)` with `P` over a strong
//! domain `A`, `Q` over a weak domain `B`, and a homomorphism `A -> B`
//! carrying every strong tuple into the weak relation. An [`Instance`] is a
//! weighted list of clauses, each naming a pair and a tuple of literals.
//!
//! Boolean templates use elements `0` and `1`; when talking to the `±1` SDP
//! form, `0` maps to `-1` and `1` maps to `+1`.

pub mod dimacs;
mod error;
pub mod generate;
mod instance;
pub mod io;
mod relation;
pub mod rng;
mod template;
pub mod zoo;

pub use error::PcspError;
pub use instance::{eval_value, Assignment, Clause, Instance, Literal, Side};
pub use relation::{all_tuples, Relation, Tuple, MAX_ARITY, MAX_DOMAIN};
pub use template::{expand_folded_idempotent, DomainPair, PromisePair, Template};

pub type Result<T> = std::result::Result<T, PcspError>;

/// Boolean element to `±1`.
#[inline]
pub fn pm(e: usize) -> f64 {
    if e == 0 {
        -1.0
    } else {
        1.0
    }
}

/// `±1` value (sign, ties to `+1`) to Boolean element.
#[inline]
pub fn from_pm(x: f64) -> usize {
    usize::from(x >= 0.0)
}
