//! Monte Carlo estimation of the weak loss of a rounding scheme.

use crate::{
    cmm_round, correlated_round, gaussian, independent_round, marginals, separable_round, CorrelatedNoise, Result,
    RoundError,
};
use basic_sdp::{extract_vectors, GramSolution};
use pcsp_core::{all_tuples, eval_value, rng, Assignment, Instance, Side, Template, Tuple};
use rayon::prelude::*;
use separation::SeparabilityCertificate;
use std::collections::BTreeMap;
use std::str::FromStr;

/// Environment variable fixing the number of worker threads for trials.
pub const THREADS_ENV: &str = "ROBUST_PCSP_THREADS";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scheme {
    Cmm,
    Separable,
    Independent,
    Correlated,
}

impl FromStr for Scheme {
    type Err = RoundError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cmm" => Ok(Scheme::Cmm),
            "separable" => Ok(Scheme::Separable),
            "independent" => Ok(Scheme::Independent),
            "correlated" => Ok(Scheme::Correlated),
            _ => Err(RoundError::BadSpec(format!("unknown scheme {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RoundSpec {
    pub scheme: Scheme,
    pub epsilon: f64,
    pub seed: u64,
    pub trials: usize,
}

impl RoundSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(RoundError::BadSpec(format!("epsilon = {} outside (0, 1)", self.epsilon)));
        }
        if self.trials == 0 {
            return Err(RoundError::BadSpec("trials must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrialRecord {
    pub trial: usize,
    /// Weight of weakly satisfied clauses.
    pub weak_value: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LossEstimate {
    pub epsilon: f64,
    pub trials: usize,
    /// Mean violated weak weight.
    pub mean: f64,
    /// Sample standard deviation over `sqrt(trials)`.
    pub std_error: f64,
    pub records: Vec<TrialRecord>,
    /// Per clause: how often each tuple outside `Q` came out.
    pub patterns: Vec<BTreeMap<Tuple, u64>>,
}

/// `gamma_j = 1 - mu_j(P_j)` for every clause.
pub fn clause_gammas(template: &Template, instance: &Instance, solution: &GramSolution) -> Result<Vec<f64>> {
    if solution.mus.len() != instance.clauses.len() {
        return Err(RoundError::Shape(format!(
            "{} distributions for {} clauses",
            solution.mus.len(),
            instance.clauses.len()
        )));
    }
    let q = template.domain.size_a;
    instance
        .clauses
        .iter()
        .zip(&solution.mus)
        .map(|(c, mu)| {
            let pair = template.pair(c.pair)?;
            let strong: f64 =
                all_tuples(c.lits.len(), q).zip(mu).filter(|(t, _)| pair.strong.contains(t)).map(|p| p.1).sum();
            Ok(1.0 - strong)
        })
        .collect()
}

fn thread_pool() -> Option<rayon::ThreadPool> {
    let n: usize = std::env::var(THREADS_ENV).ok()?.parse().ok().filter(|&n| n >= 1)?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build().ok()
}

/// Run `spec.trials` independent rounds of the solution and aggregate the
/// violated weak weight. Trial `t` draws from stream `(seed, t)`, and
/// results are reduced in trial order, so the estimate does not depend on
/// the thread count.
pub fn estimate_loss(
    template: &Template,
    instance: &Instance,
    solution: &GramSolution,
    spec: &RoundSpec,
    certificate: Option<&SeparabilityCertificate>,
) -> Result<LossEstimate> {
    spec.validate()?;
    match spec.scheme {
        Scheme::Cmm if !template.is_boolean() => {
            return Err(RoundError::Incompatible("cmm needs a Boolean template".into()));
        }
        Scheme::Separable if certificate.is_none() => {
            return Err(RoundError::Incompatible("separable rounding needs a separability certificate".into()));
        }
        Scheme::Separable if !template.domain.is_same_domain() => {
            return Err(RoundError::Incompatible("separable rounding needs A = B".into()));
        }
        _ => {}
    }
    let config = extract_vectors(solution, instance.n_vars, template.domain.size_a)?;
    let size_b = template.domain.size_b;
    let dists = match spec.scheme {
        Scheme::Independent | Scheme::Correlated => marginals(&config, &template.domain.hom, size_b)?,
        _ => Vec::new(),
    };
    let total = instance.total_weight();
    let trial = |t: usize| -> Result<(f64, Vec<(usize, Tuple)>)> {
        let mut r = rng::stream(spec.seed, t as u64);
        let assignment = match spec.scheme {
            Scheme::Cmm => {
                Assignment::new(Side::Strong, cmm_round(&config, spec.epsilon, &gaussian(config.dim, &mut r))?)
                    .to_weak(template)
            }
            Scheme::Separable => {
                let values = separable_round(&config, spec.epsilon, &gaussian(config.dim, &mut r))?;
                Assignment::new(Side::Strong, values).to_weak(template)
            }
            Scheme::Independent => {
                Assignment::new(Side::Weak, independent_round(&dists, rng::key2(spec.seed, t as u64))?)
            }
            Scheme::Correlated => {
                Assignment::new(Side::Weak, correlated_round(&dists, &CorrelatedNoise::sample(size_b, &mut r))?)
            }
        };
        let value = eval_value(template, instance, &assignment, Side::Weak)?;
        let mut bad = Vec::new();
        for (j, c) in instance.clauses.iter().enumerate() {
            let tuple = c.tuple(&assignment.values);
            if !template.pair(c.pair)?.weak.contains(&tuple) {
                bad.push((j, tuple));
            }
        }
        Ok((value, bad))
    };
    let run = || (0..spec.trials).into_par_iter().map(trial).collect::<Vec<_>>();
    let outcomes = match thread_pool() {
        Some(pool) => pool.install(run),
        None => run(),
    };
    let mut records = Vec::with_capacity(spec.trials);
    let mut patterns = vec![BTreeMap::new(); instance.clauses.len()];
    for (t, out) in outcomes.into_iter().enumerate() {
        let (weak_value, bad) = out?;
        records.push(TrialRecord { trial: t, weak_value });
        for (j, tuple) in bad {
            *patterns[j].entry(tuple).or_insert(0) += 1;
        }
    }
    let losses: Vec<f64> = records.iter().map(|r| (total - r.weak_value).max(0.0)).collect();
    let n = losses.len() as f64;
    let mean = losses.iter().sum::<f64>() / n;
    let var = if losses.len() > 1 { losses.iter().map(|l| (l - mean).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
    Ok(LossEstimate {
        epsilon: spec.epsilon,
        trials: spec.trials,
        mean,
        std_error: (var / n).sqrt(),
        records,
        patterns,
    })
}
