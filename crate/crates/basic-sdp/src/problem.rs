use crate::{Result, SdpError};
use pcsp_core::{all_tuples, pm, Instance, Template};

/// Largest distribution block `|A|^k` per clause.
pub const MAX_BLOCK: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Encoding {
    /// `1 + n` Gram indices, one `+-1` vector per variable.
    PlusMinus,
    /// `1 + n|A|` Gram indices, one vector per variable and element.
    OneHot,
}

impl Encoding {
    pub fn for_domain(q: usize) -> Self {
        if q == 2 {
            Encoding::PlusMinus
        } else {
            Encoding::OneHot
        }
    }
}

/// Distribution `mu_j` of one clause over literal-value tuples in
/// lexicographic order.
#[derive(Clone, Debug, PartialEq)]
pub struct MuBlock {
    pub clause: usize,
    pub offset: usize,
    pub arity: usize,
    pub in_strong: Vec<bool>,
    pub weight: f64,
}

impl MuBlock {
    pub fn len(&self) -> usize {
        self.in_strong.len()
    }

    pub fn is_empty(&self) -> bool {
        self.in_strong.is_empty()
    }
}

/// `sum coef * X[i][j] + sum coef * mu[k] = rhs` with `i <= j`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearRow {
    pub gram: Vec<(usize, usize, f64)>,
    pub mu: Vec<(usize, f64)>,
    pub rhs: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SdpProblem {
    pub encoding: Encoding,
    pub n_vars: usize,
    pub domain: usize,
    /// Side length of the Gram matrix.
    pub dim: usize,
    pub blocks: Vec<MuBlock>,
    pub n_mu: usize,
    pub rows: Vec<LinearRow>,
    /// Equations of the full moment system that `rows` imply only together
    /// with positive semidefiniteness; checked, never projected onto.
    pub implied: Vec<LinearRow>,
}

impl SdpProblem {
    pub fn gram_index(&self, var: usize, d: usize) -> usize {
        match self.encoding {
            Encoding::PlusMinus => var + 1,
            Encoding::OneHot => 1 + var * self.domain + d,
        }
    }

    /// Objective coefficient of every distribution entry.
    pub fn objective(&self) -> Vec<f64> {
        let mut c = vec![0.0; self.n_mu];
        for b in &self.blocks {
            for (t, &inp) in b.in_strong.iter().enumerate() {
                if inp {
                    c[b.offset + t] = b.weight;
                }
            }
        }
        c
    }

    /// `sum_j w_j mu_j(P_j)`.
    pub fn value(&self, mus: &[Vec<f64>]) -> f64 {
        self.blocks
            .iter()
            .zip(mus)
            .map(|(b, mu)| b.weight * mu.iter().zip(&b.in_strong).filter(|p| *p.1).map(|p| p.0).sum::<f64>())
            .sum()
    }
}

fn ordered(i: usize, j: usize) -> (usize, usize) {
    if i <= j {
        (i, j)
    } else {
        (j, i)
    }
}

/// Build the relaxation of `instance`.
///
/// The row list is a linearly independent equivalent of the full moment
/// system. In the `+-1` form it is exactly the full system. In the one-hot
/// form, moments involving the last element of a variable are left out and
/// `sum_d <v_0, v_{x,d}> = 1` is added for every variable; together with
/// `<v_{x,d}, v_{x,d}> = <v_0, v_{x,d}>`, orthogonality within a variable
/// and positive semidefiniteness, this forces `sum_d v_{x,d} = v_0` and
/// hence every omitted equation. [`verify_solution`](crate::verify_solution)
/// checks the full system.
pub fn build_relaxation(template: &Template, instance: &Instance) -> Result<SdpProblem> {
    if instance.clauses.is_empty() {
        return Err(SdpError::Empty);
    }
    let q = template.domain.size_a;
    let encoding = Encoding::for_domain(q);
    let n = instance.n_vars;
    let dim = match encoding {
        Encoding::PlusMinus => 1 + n,
        Encoding::OneHot => 1 + n * q,
    };
    let mut p = SdpProblem {
        encoding,
        n_vars: n,
        domain: q,
        dim,
        blocks: Vec::new(),
        n_mu: 0,
        rows: Vec::new(),
        implied: Vec::new(),
    };
    let row = |gram: Vec<(usize, usize, f64)>, mu: Vec<(usize, f64)>, rhs: f64| LinearRow { gram, mu, rhs };
    p.rows.push(row(vec![(0, 0, 1.0)], vec![], 1.0));
    match encoding {
        Encoding::PlusMinus => {
            for i in 1..dim {
                p.rows.push(row(vec![(i, i, 1.0)], vec![], 1.0));
            }
        }
        Encoding::OneHot => {
            for x in 0..n {
                let g = |d: usize| 1 + x * q + d;
                for d in 0..q {
                    p.rows.push(row(vec![(g(d), g(d), 1.0), (0, g(d), -1.0)], vec![], 0.0));
                    for d2 in d + 1..q {
                        p.rows.push(row(vec![(g(d), g(d2), 1.0)], vec![], 0.0));
                    }
                }
                p.rows.push(row((0..q).map(|d| (0, g(d), 1.0)).collect(), vec![], 1.0));
            }
        }
    }
    for (j, c) in instance.clauses.iter().enumerate() {
        let pair = template.pair(c.pair)?;
        let k = c.lits.len();
        let size = q
            .checked_pow(k as u32)
            .filter(|&s| s <= MAX_BLOCK)
            .ok_or(SdpError::Budget { clause: j, size: q.checked_pow(k as u32).unwrap_or(usize::MAX) })?;
        let tuples: Vec<Vec<usize>> = all_tuples(k, q).collect();
        let off = p.n_mu;
        p.blocks.push(MuBlock {
            clause: j,
            offset: off,
            arity: k,
            in_strong: tuples.iter().map(|t| pair.strong.contains(t)).collect(),
            weight: c.weight,
        });
        p.n_mu += size;
        p.rows.push(row(vec![], (0..size).map(|t| (off + t, 1.0)).collect(), 1.0));
        match encoding {
            Encoding::PlusMinus => {
                for (t, lt) in c.lits.iter().enumerate() {
                    let mu = tuples.iter().enumerate().map(|(a, tup)| (off + a, -pm(tup[t]))).collect();
                    p.rows.push(row(vec![(0, lt.var + 1, f64::from(lt.sign))], mu, 0.0));
                    for (u, lu) in c.lits.iter().enumerate().skip(t + 1) {
                        let s = f64::from(lt.sign) * f64::from(lu.sign);
                        let mu =
                            tuples.iter().enumerate().map(|(a, tup)| (off + a, -pm(tup[t]) * pm(tup[u]))).collect();
                        if lt.var == lu.var {
                            // <v_i, v_i> = 1 is already a row
                            p.rows.push(row(vec![], mu, -s));
                        } else {
                            let (a, b) = ordered(lt.var + 1, lu.var + 1);
                            p.rows.push(row(vec![(a, b, s)], mu, 0.0));
                        }
                    }
                }
            }
            Encoding::OneHot => {
                let g = |x: usize, d: usize| 1 + x * q + d;
                for (t, lt) in c.lits.iter().enumerate() {
                    for d in 0..q {
                        let mu = tuples
                            .iter()
                            .enumerate()
                            .filter(|(_, tup)| tup[t] == d)
                            .map(|(a, _)| (off + a, -1.0))
                            .collect();
                        let r = row(vec![(0, g(lt.var, d), 1.0)], mu, 0.0);
                        if d + 1 < q {
                            p.rows.push(r);
                        } else {
                            p.implied.push(r);
                        }
                    }
                    for (u, lu) in c.lits.iter().enumerate().skip(t + 1) {
                        for d in 0..q {
                            for d2 in 0..q {
                                let target = if d + 1 < q && d2 + 1 < q { &mut p.rows } else { &mut p.implied };
                                let mu: Vec<(usize, f64)> = tuples
                                    .iter()
                                    .enumerate()
                                    .filter(|(_, tup)| tup[t] == d && tup[u] == d2)
                                    .map(|(a, _)| (off + a, -1.0))
                                    .collect();
                                if lt.var == lu.var {
                                    if d == d2 {
                                        // equals the first moment row for (t, d)
                                        let first = tuples
                                            .iter()
                                            .enumerate()
                                            .filter(|(_, tup)| tup[t] == d)
                                            .map(|(a, _)| (off + a, 1.0));
                                        target.push(row(vec![], mu.into_iter().chain(first).collect(), 0.0));
                                    } else {
                                        target.push(row(vec![], mu, 0.0));
                                    }
                                } else {
                                    let (a, b) = ordered(g(lt.var, d), g(lu.var, d2));
                                    target.push(row(vec![(a, b, 1.0)], mu, 0.0));
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(p)
}
