//! The Basic SDP relaxation of a PCSP instance.
//!
//! Two encodings are used. Boolean templates (`|A| = 2`) use the compact
//! `+-1` form with one vector `v_i` per variable, where element `1` is `+1`
//! and a negative literal contributes `-v_i`. Larger domains use one vector
//! `v_{x,d}` per variable and element, indexed `1 + x|A| + d`. Index `0` is
//! `v_0` in both.
//!
//! [`solve_sdp`] defaults to a low-rank augmented Lagrangian whose output is
//! repaired to exact feasibility (mixing in the uniform configuration where
//! needed), so residuals sit at rounding level and the value is slightly
//! below the optimum, by about the hand-over residual. [`Method::Admm`] is
//! an eigendecomposition-based splitting method, practical for small
//! instances and kept as an independent cross-check.

mod admm;
mod config;
mod decompose;
mod lowrank;
mod problem;
mod repair;
mod solution;

pub use admm::{solve_sdp, Method, SolveOptions};
pub use config::{extract_vectors, factor_psd, random_configuration, GlobalConfiguration};
pub use decompose::{decompose_local_gram, local_matrix, Decomposition};
pub use problem::{build_relaxation, Encoding, LinearRow, MuBlock, SdpProblem, MAX_BLOCK};
pub use solution::{
    integral_solution, parse_solution, serialize_solution, verify_solution, GramSolution, ResidualReport,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SdpError {
    #[error("instance has no clauses")]
    Empty,
    #[error("clause {clause} needs {size} distribution entries, above the limit of {MAX_BLOCK}")]
    Budget { clause: usize, size: usize },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("matrix has eigenvalue {0}, below -1e-5")]
    NotPsd(f64),
    #[error("eigendecomposition failed")]
    Eigen,
    #[error("cannot restore feasibility: {0}")]
    Repair(String),
    #[error("malformed solution: {0}")]
    Malformed(String),
    #[error(transparent)]
    Core(#[from] pcsp_core::PcspError),
}

pub type Result<T> = std::result::Result<T, SdpError>;

/// Symmetric eigendecomposition of a row-major `n x n` matrix, eigenvalues
/// ascending; eigenvectors are returned column-major (`vecs[j * n + i]` is
/// entry `i` of eigenvector `j`).
pub(crate) fn sym_eigen(n: usize, a: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let m = faer::Mat::<f64>::from_fn(n, n, |i, j| a[i * n + j]);
    let e = m.self_adjoint_eigen(faer::Side::Lower).map_err(|_| SdpError::Eigen)?;
    let s = e.S().column_vector();
    let u = e.U();
    let vals = (0..n).map(|i| s[i]).collect();
    let mut vecs = vec![0.0; n * n];
    for j in 0..n {
        for i in 0..n {
            vecs[j * n + i] = u[(i, j)];
        }
    }
    Ok((vals, vecs))
}
