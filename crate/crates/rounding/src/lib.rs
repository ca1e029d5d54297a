//! Rounding schemes for Basic SDP solutions.
//!
//! Every scheme draws its randomness once per round and shares it across
//! variables: one Gaussian `r` for the hyperplane-style schemes, one noise
//! vector `xi` for correlated plurality. Variables with identical inputs
//! therefore always receive identical values.

mod loss;

use basic_sdp::GlobalConfiguration;
use pcsp_core::rng;
use rand::Rng;
use rand_distr::StandardNormal;

pub use loss::{clause_gammas, estimate_loss, LossEstimate, RoundSpec, Scheme, TrialRecord, THREADS_ENV};

/// Tolerance for a distribution to count as lying on the simplex.
pub const SIMPLEX_TOL: f64 = 1e-9;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum RoundError {
    #[error("scheme needs a Boolean configuration, got |A| = {0}")]
    NotBoolean(usize),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("distribution of variable {var} is not on the simplex")]
    NotSimplex { var: usize },
    #[error("invalid round spec: {0}")]
    BadSpec(String),
    #[error("scheme not applicable: {0}")]
    Incompatible(String),
    #[error(transparent)]
    Sdp(#[from] basic_sdp::SdpError),
    #[error(transparent)]
    Core(#[from] pcsp_core::PcspError),
}

pub type Result<T> = std::result::Result<T, RoundError>;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Index of the largest entry; ties go to the smallest index.
pub fn plurality(c: &[f64]) -> usize {
    let mut best = 0;
    for (a, &v) in c.iter().enumerate().skip(1) {
        if v > c[best] {
            best = a;
        }
    }
    best
}

/// Standard Gaussian vector of length `dim`.
pub fn gaussian(dim: usize, rng: &mut impl Rng) -> Vec<f64> {
    (0..dim).map(|_| rng.sample(StandardNormal)).collect()
}

fn check_r(config: &GlobalConfiguration, r: &[f64]) -> Result<()> {
    if r.len() != config.dim {
        return Err(RoundError::Shape(format!("gaussian of length {}, vectors of length {}", r.len(), config.dim)));
    }
    Ok(())
}

/// epsilon-CMM: `x_i = 1` (i.e. `+1`) iff `<v_i, v_0 + sqrt(eps) r> >= 0`,
/// with `v_i = v_{i,1} - v_{i,0}`.
pub fn cmm_round(config: &GlobalConfiguration, epsilon: f64, r: &[f64]) -> Result<Vec<usize>> {
    if config.size_a != 2 {
        return Err(RoundError::NotBoolean(config.size_a));
    }
    check_r(config, r)?;
    let s = epsilon.sqrt();
    let dir: Vec<f64> = config.v0.iter().zip(r).map(|(a, b)| a + s * b).collect();
    Ok((0..config.n_vars).map(|x| usize::from(dot(&config.pm_vector(x), &dir) >= 0.0)).collect())
}

/// Argmax rounding: with `z = r + v_0 / sqrt(eps)`, each variable takes the
/// element maximizing `<v_{x,a}, z>`.
pub fn separable_round(config: &GlobalConfiguration, epsilon: f64, r: &[f64]) -> Result<Vec<usize>> {
    check_r(config, r)?;
    let s = epsilon.sqrt();
    let z: Vec<f64> = r.iter().zip(&config.v0).map(|(a, b)| a + b / s).collect();
    Ok((0..config.n_vars)
        .map(|x| {
            let c: Vec<f64> = (0..config.size_a).map(|a| dot(config.vector(x, a), &z)).collect();
            plurality(&c)
        })
        .collect())
}

fn check_simplex(dists: &[Vec<f64>]) -> Result<usize> {
    let width = dists.first().map_or(0, Vec::len);
    for (var, q) in dists.iter().enumerate() {
        let sum: f64 = q.iter().sum();
        if q.len() != width || q.is_empty() || q.iter().any(|&p| p < -SIMPLEX_TOL) || (sum - 1.0).abs() > SIMPLEX_TOL {
            return Err(RoundError::NotSimplex { var });
        }
    }
    Ok(width)
}

/// Sample every variable independently from its distribution.
pub fn independent_round(dists: &[Vec<f64>], seed: u64) -> Result<Vec<usize>> {
    check_simplex(dists)?;
    let mut rng = rng::stream(seed, 0);
    Ok(dists.iter().map(|q| sample_index(q, rng.random::<f64>())).collect())
}

/// Inverse-CDF lookup; mass lost to round-off goes to the last element
/// with positive probability.
fn sample_index(q: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    for (b, &p) in q.iter().enumerate() {
        acc += p.max(0.0);
        if u < acc {
            return b;
        }
    }
    q.iter().rposition(|&p| p > 0.0).unwrap_or(0)
}

/// Shared noise for correlated rounding: `xi_b` uniform in `[0, 1/(2|B|)]`.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrelatedNoise {
    xi: Vec<f64>,
}

impl CorrelatedNoise {
    pub fn new(xi: Vec<f64>) -> Result<Self> {
        let top = 1.0 / (2.0 * xi.len() as f64);
        if xi.is_empty() || xi.iter().any(|&v| !(0.0..=top).contains(&v)) {
            return Err(RoundError::BadSpec(format!("noise entries must lie in [0, {top}]")));
        }
        Ok(CorrelatedNoise { xi })
    }

    pub fn sample(size_b: usize, rng: &mut impl Rng) -> Self {
        let top = 1.0 / (2.0 * size_b as f64);
        CorrelatedNoise { xi: (0..size_b).map(|_| rng.random::<f64>() * top).collect() }
    }

    pub fn xi(&self) -> &[f64] {
        &self.xi
    }
}

/// `plur(q_x + xi)` for every variable, with one `xi` shared by all.
pub fn correlated_round(dists: &[Vec<f64>], xi: &CorrelatedNoise) -> Result<Vec<usize>> {
    let width = check_simplex(dists)?;
    if !dists.is_empty() && width != xi.xi.len() {
        return Err(RoundError::Shape(format!("distributions over {width} elements, noise over {}", xi.xi.len())));
    }
    Ok(dists
        .iter()
        .map(|q| {
            let c: Vec<f64> = q.iter().zip(&xi.xi).map(|(a, b)| a + b).collect();
            plurality(&c)
        })
        .collect())
}

/// Marginals `q_x(a) = <v_{x,a}, v_0>`, clipped at zero, renormalized and
/// pushed to `B` through `hom`.
pub fn marginals(config: &GlobalConfiguration, hom: &[usize], size_b: usize) -> Result<Vec<Vec<f64>>> {
    if hom.len() != config.size_a || hom.iter().any(|&b| b >= size_b) {
        return Err(RoundError::Shape("homomorphism does not map A into B".into()));
    }
    Ok((0..config.n_vars)
        .map(|x| {
            let raw: Vec<f64> = (0..config.size_a).map(|a| dot(config.vector(x, a), &config.v0).max(0.0)).collect();
            let total: f64 = raw.iter().sum();
            let mut q = vec![0.0; size_b];
            for (a, p) in raw.iter().enumerate() {
                q[hom[a]] += if total > 0.0 { p / total } else { 1.0 / config.size_a as f64 };
            }
            q
        })
        .collect())
}

/// The uniform configuration in `R^(1 + n|A|)`: `u_0 = e_0` and
/// `u_{x,a} = u_0/|A| + (e_{x,a} - (1/|A|) sum_b e_{x,b}) / sqrt|A|`.
/// Vectors of one variable are orthogonal with squared norm `1/|A|` and sum
/// to `u_0`; vectors of different variables have inner product `1/|A|^2`.
pub fn uniform_configuration(n_vars: usize, size_a: usize) -> GlobalConfiguration {
    let q = size_a as f64;
    let dim = 1 + n_vars * size_a;
    let mut v0 = vec![0.0; dim];
    v0[0] = 1.0;
    let mut vectors = Vec::with_capacity(n_vars * size_a);
    for x in 0..n_vars {
        for a in 0..size_a {
            let mut v = vec![0.0; dim];
            v[0] = 1.0 / q;
            for b in 0..size_a {
                let e = if a == b { 1.0 } else { 0.0 };
                v[1 + x * size_a + b] = (e - 1.0 / q) / q.sqrt();
            }
            vectors.push(v);
        }
    }
    GlobalConfiguration { dim, n_vars, size_a, v0, vectors }
}

/// `U (+)_rho V`: every vector becomes `(sqrt(1 - rho) v, sqrt(rho) u)`, so
/// `Mat = rho Mat(U) + (1 - rho) Mat(V)`, `v_0` included.
pub fn lift_uniform(config: &GlobalConfiguration, rho: f64) -> Result<GlobalConfiguration> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(RoundError::BadSpec(format!("rho = {rho} outside [0, 1]")));
    }
    let u = uniform_configuration(config.n_vars, config.size_a);
    let (a, b) = ((1.0 - rho).sqrt(), rho.sqrt());
    let cat = |v: &[f64], w: &[f64]| v.iter().map(|x| a * x).chain(w.iter().map(|y| b * y)).collect::<Vec<f64>>();
    Ok(GlobalConfiguration {
        dim: config.dim + u.dim,
        n_vars: config.n_vars,
        size_a: config.size_a,
        v0: cat(&config.v0, &u.v0),
        vectors: config.vectors.iter().zip(&u.vectors).map(|(v, w)| cat(v, w)).collect(),
    })
}
