//! The discretized 1-in-3-SAT versus NAE-SAT integrality gap instance.
//!
//! Points live in `R^{d+1}` with `v0` the last coordinate. A constraint is a
//! triple of points summing to `+v0` or `-v0`: the `T'_x` and `T'_{-x}`
//! triples built from Gaussian `w, u`, and the anchors `(v0, v0, p)` and
//! `(-v0, -v0, p)`. Each point is replaced by the center of its lattice cell
//! and every distinct center becomes one variable.
//!
//! Instances of realistic size hold tens of thousands of `d`-dimensional
//! vectors, so nothing is stored but class tags and center ids. Vectors are
//! regenerated on demand from the constraint's keyed random stream.

mod instance;
mod sidecar;
mod soundness;
mod witness;

pub use instance::{folded_template, sample_gap_instance, Class, Discard, GapConstraint, GapInstance, RawTriple, Slot};
pub use sidecar::{parse_sidecar, Sidecar, SidecarConstraint};
pub use soundness::{
    cmm_assignment, count_violations, count_violations_with, hyperplane_assignment, threshold_assignment,
};
pub use witness::{
    build_sdp_witness, pattern, triple_witness, LiftedVector, SlotInput, TripleWitness, Witness, WitnessReport,
};

use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum GapError {
    #[error("rho_x is undefined at |x| = {0}")]
    Degenerate(f64),
    #[error("invalid parameters: {0}")]
    Params(String),
    #[error(transparent)]
    Core(#[from] pcsp_core::PcspError),
}

pub type Result<T> = std::result::Result<T, GapError>;

/// Smallest supported epsilon; keeps `1 - 2^{-k0}` well inside `f64`.
pub const MIN_EPSILON: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapParams {
    pub epsilon: f64,
    pub dim: usize,
    pub samples: usize,
    pub seed: u64,
}

impl GapParams {
    /// Default desk-scale parameters.
    pub fn desk(seed: u64) -> Self {
        GapParams { epsilon: 0.05, dim: 2000, samples: 20000, seed }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon >= MIN_EPSILON && self.epsilon < 1.0) {
            return Err(GapError::Params(format!("epsilon {} outside [{MIN_EPSILON}, 1)", self.epsilon)));
        }
        if self.dim == 0 || self.samples == 0 {
            return Err(GapError::Params("dim and samples must be positive".into()));
        }
        Ok(())
    }

    /// `ceil(log2(1/eps)) + 20`.
    pub fn k0(&self) -> u32 {
        (1.0 / self.epsilon).log2().ceil() as u32 + 20
    }

    /// Discard threshold on `|‖w‖² - 1|`, `|‖u‖² - 1|` and `|w·u|`.
    pub fn discard_tol(&self) -> f64 {
        self.epsilon / 1000.0
    }

    /// Lattice spacing; cells have radius half the discard threshold.
    pub fn spacing(&self) -> f64 {
        self.discard_tol() / ((self.dim + 1) as f64).sqrt()
    }

    /// Dimension from which the formal guarantee applies.
    pub fn required_dim(&self) -> f64 {
        8e7 / self.epsilon.powi(3)
    }

    /// Asymptotic bound on the discarded fraction.
    pub fn discard_bound(&self) -> f64 {
        6.0 * (-10.0 / self.epsilon).exp()
    }
}

/// `sqrt(1 - (2|x| - 1)^2) / (2 sqrt(1 - x^2))`.
pub fn rho_coeff(x: f64) -> Result<f64> {
    if !(x.abs() < 1.0) {
        return Err(GapError::Degenerate(x));
    }
    let y = 2.0 * x.abs() - 1.0;
    Ok((1.0 - y * y).sqrt() / (2.0 * (1.0 - x * x).sqrt()))
}

/// Coefficients of the `T'_x` formulas for `x = 1 - 2^{-k}`, computed from
/// `s = 2^{-k}` so that large `k` loses no precision.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Coeffs {
    pub x: f64,
    /// `sqrt(1 - (2x - 1)^2)`, the `w` coefficient of `p3`.
    pub alpha: f64,
    /// `sqrt(1 - x^2)`.
    pub beta: f64,
    pub rho: f64,
}

impl Coeffs {
    pub fn for_level(k: u32) -> Self {
        let s = (-(k as f64)).exp2();
        let alpha = 2.0 * (s * (1.0 - s)).sqrt();
        let beta = (s * (2.0 - s)).sqrt();
        Coeffs { x: 1.0 - s, alpha, beta, rho: alpha / (2.0 * beta) }
    }

    /// `sqrt(1 - rho^2)`.
    pub fn gamma(&self) -> f64 {
        (1.0 - self.rho * self.rho).max(0.0).sqrt()
    }
}
