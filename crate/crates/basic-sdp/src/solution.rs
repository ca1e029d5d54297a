use crate::admm::svec_index;
use crate::problem::{Encoding, SdpProblem};
use crate::{sym_eigen, Result, SdpError};
use pcsp_core::{all_tuples, pm, Instance, Template};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq)]
pub struct GramSolution {
    pub dim: usize,
    /// Row-major `dim x dim`.
    pub gram: Vec<f64>,
    /// One distribution per clause over literal-value tuples in
    /// lexicographic order.
    pub mus: Vec<Vec<f64>>,
    /// Completeness `sum_j w_j mu_j(P_j)`.
    pub value: f64,
    pub converged: bool,
    pub iterations: usize,
    pub primal_residual: f64,
    pub dual_residual: f64,
}

impl GramSolution {
    pub(crate) fn from_svec(
        p: &SdpProblem,
        z: &[f64],
        nsv: usize,
        converged: bool,
        iterations: usize,
        primal_residual: f64,
        dual_residual: f64,
    ) -> Self {
        let n = p.dim;
        let mut gram = vec![0.0; n * n];
        for j in 0..n {
            for i in 0..=j {
                let s = z[svec_index(i, j)];
                let e = if i == j { s } else { s / std::f64::consts::SQRT_2 };
                gram[i * n + j] = e;
                gram[j * n + i] = e;
            }
        }
        let mus: Vec<Vec<f64>> =
            p.blocks.iter().map(|b| z[nsv + b.offset..nsv + b.offset + b.len()].to_vec()).collect();
        let value = p.value(&mus);
        GramSolution { dim: n, gram, mus, value, converged, iterations, primal_residual, dual_residual }
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.gram[i * self.dim + j]
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SolutionFile {
    gram: Vec<Vec<f64>>,
    mus: Vec<Vec<f64>>,
    value: f64,
}

pub fn serialize_solution(s: &GramSolution) -> Vec<u8> {
    let f =
        SolutionFile { gram: s.gram.chunks(s.dim).map(<[f64]>::to_vec).collect(), mus: s.mus.clone(), value: s.value };
    serde_json::to_vec(&f).expect("solution serializes")
}

/// Parse a solution file. Only shapes and finiteness are checked here; the
/// moment system needs the instance, see [`verify_solution`].
pub fn parse_solution(bytes: &[u8]) -> Result<GramSolution> {
    let f: SolutionFile = serde_json::from_slice(bytes).map_err(|e| SdpError::Malformed(e.to_string()))?;
    let n = f.gram.len();
    if n == 0 || f.gram.iter().any(|r| r.len() != n) {
        return Err(SdpError::Malformed("gram must be a nonempty square matrix".into()));
    }
    if f.gram.iter().flatten().chain(f.mus.iter().flatten()).any(|v| !v.is_finite()) || !f.value.is_finite() {
        return Err(SdpError::Malformed("non-finite entry".into()));
    }
    Ok(GramSolution {
        dim: n,
        gram: f.gram.concat(),
        mus: f.mus,
        value: f.value,
        converged: true,
        iterations: 0,
        primal_residual: 0.0,
        dual_residual: 0.0,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResidualReport {
    pub min_eigenvalue: f64,
    pub max_moment_residual: f64,
    pub max_simplex_residual: f64,
    /// `mu_j(P_j)` per clause.
    pub clause_values: Vec<f64>,
    /// Completeness recomputed from the distributions.
    pub value: f64,
    /// Description of the equation with the largest moment residual.
    pub worst_equation: String,
    pub passed: bool,
}

fn check_shape(template: &Template, instance: &Instance, sol: &GramSolution) -> Result<Encoding> {
    let q = template.domain.size_a;
    let enc = Encoding::for_domain(q);
    let dim = match enc {
        Encoding::PlusMinus => 1 + instance.n_vars,
        Encoding::OneHot => 1 + instance.n_vars * q,
    };
    if sol.dim != dim || sol.gram.len() != dim * dim {
        return Err(SdpError::Shape(format!("gram is {}x{}, instance needs {dim}x{dim}", sol.dim, sol.dim)));
    }
    if sol.mus.len() != instance.clauses.len() {
        return Err(SdpError::Shape(format!("{} distributions for {} clauses", sol.mus.len(), instance.clauses.len())));
    }
    for (j, (c, mu)) in instance.clauses.iter().zip(&sol.mus).enumerate() {
        let size = q.checked_pow(c.lits.len() as u32).unwrap_or(usize::MAX);
        if mu.len() != size {
            return Err(SdpError::Shape(format!("clause {j} distribution has {} entries, expected {size}", mu.len())));
        }
    }
    Ok(enc)
}

/// Recompute every equation of the relaxation from scratch, including the
/// ones the solver leaves implicit.
pub fn verify_solution(
    template: &Template,
    instance: &Instance,
    sol: &GramSolution,
    tol: f64,
) -> Result<ResidualReport> {
    let enc = check_shape(template, instance, sol)?;
    let q = template.domain.size_a;
    let x = |i: usize, j: usize| sol.at(i, j);
    let mut worst = (0.0f64, String::from("none"));
    let mut note = |r: f64, what: &dyn Fn() -> String| {
        if !(r <= worst.0) {
            worst = (if r.is_nan() { f64::INFINITY } else { r }, what());
        }
    };
    note((x(0, 0) - 1.0).abs(), &|| "<v0, v0> = 1".into());
    match enc {
        Encoding::PlusMinus => {
            for i in 1..sol.dim {
                note((x(i, i) - 1.0).abs(), &|| format!("<v{}, v{}> = 1", i - 1, i - 1));
            }
        }
        Encoding::OneHot => {
            for v in 0..instance.n_vars {
                let g = |d: usize| 1 + v * q + d;
                let mut s = 0.0;
                for d in 0..q {
                    s += x(0, g(d));
                    note((x(g(d), g(d)) - x(0, g(d))).abs(), &|| format!("|v({v},{d})|^2 = <v0, v({v},{d})>"));
                    for d2 in d + 1..q {
                        note(x(g(d), g(d2)).abs(), &|| format!("<v({v},{d}), v({v},{d2})> = 0"));
                    }
                }
                note((s - 1.0).abs(), &|| format!("sum_d <v0, v({v},d)> = 1"));
            }
        }
    }
    let mut simplex = 0.0f64;
    let mut clause_values = Vec::with_capacity(instance.clauses.len());
    let mut value = 0.0;
    for (j, (c, mu)) in instance.clauses.iter().zip(&sol.mus).enumerate() {
        let pair = template.pair(c.pair)?;
        let k = c.lits.len();
        let tuples: Vec<Vec<usize>> = all_tuples(k, q).collect();
        simplex = simplex.max((mu.iter().sum::<f64>() - 1.0).abs());
        simplex = simplex.max(mu.iter().fold(0.0f64, |a, &m| a.max(-m)));
        let cv: f64 = tuples.iter().zip(mu).filter(|(t, _)| pair.strong.contains(t)).map(|(_, m)| m).sum();
        clause_values.push(cv);
        value += c.weight * cv;
        match enc {
            Encoding::PlusMinus => {
                for (t, lt) in c.lits.iter().enumerate() {
                    let st = f64::from(lt.sign);
                    let e: f64 = tuples.iter().zip(mu).map(|(a, m)| m * pm(a[t])).sum();
                    note((st * x(0, lt.var + 1) - e).abs(), &|| format!("clause {j}: first moment of position {t}"));
                    for (u, lu) in c.lits.iter().enumerate().skip(t + 1) {
                        let su = f64::from(lu.sign);
                        let e: f64 = tuples.iter().zip(mu).map(|(a, m)| m * pm(a[t]) * pm(a[u])).sum();
                        note((st * su * x(lt.var + 1, lu.var + 1) - e).abs(), &|| {
                            format!("clause {j}: second moment of positions {t}, {u}")
                        });
                    }
                }
            }
            Encoding::OneHot => {
                let g = |v: usize, d: usize| 1 + v * q + d;
                for (t, lt) in c.lits.iter().enumerate() {
                    for d in 0..q {
                        let e: f64 = tuples.iter().zip(mu).filter(|(a, _)| a[t] == d).map(|(_, m)| m).sum();
                        note((x(0, g(lt.var, d)) - e).abs(), &|| format!("clause {j}: first moment ({t}, {d})"));
                    }
                    for (u, lu) in c.lits.iter().enumerate().skip(t + 1) {
                        for d in 0..q {
                            for d2 in 0..q {
                                let e: f64 = tuples
                                    .iter()
                                    .zip(mu)
                                    .filter(|(a, _)| a[t] == d && a[u] == d2)
                                    .map(|(_, m)| m)
                                    .sum();
                                note((x(g(lt.var, d), g(lu.var, d2)) - e).abs(), &|| {
                                    format!("clause {j}: second moment ({t}, {d}), ({u}, {d2})")
                                });
                            }
                        }
                    }
                }
            }
        }
    }
    let (vals, _) = sym_eigen(sol.dim, &sol.gram)?;
    let min_eigenvalue = vals.first().copied().unwrap_or(0.0);
    let passed = min_eigenvalue >= -tol && worst.0 <= tol && simplex <= tol;
    Ok(ResidualReport {
        min_eigenvalue,
        max_moment_residual: worst.0,
        max_simplex_residual: simplex,
        clause_values,
        value,
        worst_equation: worst.1,
        passed,
    })
}

/// The rank-one solution of an integral assignment: `v_{x,a} = 1[a = x] v_0`
/// (in the `+-1` form `v_x = +-v_0`) and point-mass distributions.
pub fn integral_solution(template: &Template, instance: &Instance, values: &[usize]) -> Result<GramSolution> {
    let q = template.domain.size_a;
    if values.len() != instance.n_vars || values.iter().any(|&v| v >= q) {
        return Err(SdpError::Shape("assignment does not fit the instance".into()));
    }
    let enc = Encoding::for_domain(q);
    // coefficient of v_0 in each Gram vector
    let coef: Vec<f64> = match enc {
        Encoding::PlusMinus => std::iter::once(1.0).chain(values.iter().map(|&v| pm(v))).collect(),
        Encoding::OneHot => std::iter::once(1.0)
            .chain(values.iter().flat_map(|&v| (0..q).map(move |d| if d == v { 1.0 } else { 0.0 })))
            .collect(),
    };
    let n = coef.len();
    let gram = (0..n * n).map(|k| coef[k / n] * coef[k % n]).collect();
    let mut value = 0.0;
    let mut mus = Vec::new();
    for c in &instance.clauses {
        let t = c.tuple(values);
        let idx = t.iter().fold(0, |a, &e| a * q + e);
        let mut mu = vec![0.0; q.pow(c.lits.len() as u32)];
        mu[idx] = 1.0;
        if template.pair(c.pair)?.strong.contains(&t) {
            value += c.weight;
        }
        mus.push(mu);
    }
    Ok(GramSolution {
        dim: n,
        gram,
        mus,
        value,
        converged: true,
        iterations: 0,
        primal_residual: 0.0,
        dual_residual: 0.0,
    })
}
