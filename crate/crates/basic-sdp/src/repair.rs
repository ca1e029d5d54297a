//! Exact feasibility from an approximate Gram matrix.
//!
//! 1. Structural equations (unit diagonal, or orthogonal vectors per
//!    variable summing to `v_0`) are restored by a linear change of the
//!    vectors, so the result stays a Gram matrix.
//! 2. Each clause distribution is recomputed from the repaired moments by a
//!    small LP maximizing its strong mass.
//! 3. Where a clause has no nonnegative distribution, the Gram matrix is
//!    mixed with that of the uniform configuration, `(1 - delta) X + delta U`,
//!    with the smallest `delta` that makes every clause feasible. Moments are
//!    affine in `X`, so feasibility is preserved along the segment.

use crate::problem::{Encoding, LinearRow, SdpProblem};
use crate::{sym_eigen, Result, SdpError};
use linprog::{Cmp, Outcome, Problem};

/// Mixing applied before the per-variable repair of the one-hot form, so
/// the within-variable Gram matrices have full rank on the directions that
/// matter.
const PREMIX: f64 = 1e-9;

#[allow(dead_code)]
pub(crate) struct Repaired {
    pub gram: Vec<f64>,
    pub mus: Vec<Vec<f64>>,
    pub delta: f64,
}

/// Gram matrix of the uniform configuration.
pub(crate) fn uniform_gram(p: &SdpProblem) -> Vec<f64> {
    let n = p.dim;
    let mut u = vec![0.0; n * n];
    match p.encoding {
        Encoding::PlusMinus => (0..n).for_each(|i| u[i * n + i] = 1.0),
        Encoding::OneHot => {
            let q = p.domain as f64;
            u[0] = 1.0;
            for i in 1..n {
                u[i] = 1.0 / q;
                u[i * n] = 1.0 / q;
                for j in 1..n {
                    let same_var = (i - 1) / p.domain == (j - 1) / p.domain;
                    let kron = if i == j { 1.0 } else { 0.0 };
                    u[i * n + j] = 1.0 / (q * q) + if same_var { (kron - 1.0 / q) / q } else { 0.0 };
                }
            }
        }
    }
    u
}

fn mix(x: &mut [f64], u: &[f64], delta: f64) {
    x.iter_mut().zip(u).for_each(|(a, b)| *a = (1.0 - delta) * *a + delta * b);
}

/// `D^{-1/2} X D^{-1/2}`; a nonpositive diagonal entry becomes a fresh
/// vector orthogonal to everything.
fn unit_diagonal(n: usize, x: &mut [f64]) {
    let d: Vec<f64> = (0..n).map(|i| x[i * n + i]).collect();
    for i in 0..n {
        for j in 0..n {
            x[i * n + j] = if d[i] <= 0.0 || d[j] <= 0.0 {
                if i == j {
                    1.0
                } else {
                    0.0
                }
            } else if i == j {
                1.0
            } else {
                x[i * n + j] / (d[i] * d[j]).sqrt()
            };
        }
    }
}

/// `A^{1/2}` or `A^{+1/2}` of a small symmetric PSD matrix.
fn sym_power(q: usize, a: &[f64], inverse: bool) -> Result<Vec<f64>> {
    let (vals, vecs) = sym_eigen(q, a)?;
    let top = vals.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let mut out = vec![0.0; q * q];
    for (k, &l) in vals.iter().enumerate() {
        if l <= 1e-14 * top {
            continue;
        }
        let f = if inverse { 1.0 / l.sqrt() } else { l.sqrt() };
        for i in 0..q {
            for j in 0..q {
                out[i * q + j] += f * vecs[k * q + i] * vecs[k * q + j];
            }
        }
    }
    Ok(out)
}

/// Rewrite every variable's vectors as an orthogonal family summing to `v_0`.
///
/// With `a_d = <w_d, v_0>`, `s = max(a, 0)` normalized, and `y_d` the
/// centred components of `w_d` orthogonal to `v_0`, the new vectors are
/// `s_d v_0 + sum_e y_e T_ed` with `T = G^{+1/2} C^{1/2}`, where `G` is the
/// Gram matrix of the `y` and `C = diag(s) - s s^T` is the one a valid
/// configuration with marginals `s` must have.
fn one_hot_structure(p: &SdpProblem, x: &mut [f64]) -> Result<()> {
    let n = p.dim;
    let q = p.domain;
    let s00 = x[0].max(f64::MIN_POSITIVE).sqrt();
    for i in 0..n {
        x[i] /= s00;
        x[i * n] /= s00;
    }
    x[0] = 1.0;
    // coefficient matrix M: new vector j = sum_i M[i][j] old vector i
    let mut cols: Vec<Vec<(usize, f64)>> = vec![vec![(0, 1.0)]; n];
    for v in 0..p.n_vars {
        let idx: Vec<usize> = (0..q).map(|d| p.gram_index(v, d)).collect();
        let a: Vec<f64> = idx.iter().map(|&i| x[i]).collect();
        let total: f64 = a.iter().map(|v| v.max(0.0)).sum();
        let s: Vec<f64> =
            if total > 0.0 { a.iter().map(|v| v.max(0.0) / total).collect() } else { vec![1.0 / q as f64; q] };
        let mut h = vec![0.0; q * q];
        for f in 0..q {
            for g in 0..q {
                h[f * q + g] = x[idx[f] * n + idx[g]] - a[f] * a[g];
            }
        }
        let cen = |m: &[f64]| {
            let mut r = m.to_vec();
            let rows: Vec<f64> = (0..q).map(|f| (0..q).map(|g| m[f * q + g]).sum::<f64>() / q as f64).collect();
            let colm: Vec<f64> = (0..q).map(|g| (0..q).map(|f| m[f * q + g]).sum::<f64>() / q as f64).collect();
            let all: f64 = rows.iter().sum::<f64>() / q as f64;
            for f in 0..q {
                for g in 0..q {
                    r[f * q + g] = m[f * q + g] - rows[f] - colm[g] + all;
                }
            }
            r
        };
        let g = cen(&h);
        let mut c = vec![0.0; q * q];
        for f in 0..q {
            for e in 0..q {
                c[f * q + e] = if f == e { s[f] } else { 0.0 } - s[f] * s[e];
            }
        }
        let gi = sym_power(q, &g, true)?;
        let ch = sym_power(q, &c, false)?;
        let mut t = vec![0.0; q * q];
        for f in 0..q {
            for d in 0..q {
                t[f * q + d] = (0..q).map(|e| gi[f * q + e] * ch[e * q + d]).sum();
            }
        }
        for d in 0..q {
            let mut col: Vec<(usize, f64)> = (0..q).map(|f| (idx[f], t[f * q + d])).collect();
            let on_v0 = s[d] - (0..q).map(|f| t[f * q + d] * a[f]).sum::<f64>();
            col.push((0, on_v0));
            cols[idx[d]] = col;
        }
    }
    // X <- M^T X M
    let mut xm = vec![0.0; n * n];
    for (j, col) in cols.iter().enumerate() {
        for i in 0..n {
            xm[i * n + j] = col.iter().map(|&(k, m)| x[i * n + k] * m).sum();
        }
    }
    for (i, col) in cols.iter().enumerate() {
        for j in 0..n {
            x[i * n + j] = col.iter().map(|&(k, m)| xm[k * n + j] * m).sum();
        }
    }
    for i in 0..n {
        for j in 0..i {
            let avg = 0.5 * (x[i * n + j] + x[j * n + i]);
            x[i * n + j] = avg;
            x[j * n + i] = avg;
        }
    }
    Ok(())
}

/// Right-hand side of each distribution row once the Gram part is moved
/// across: `A_mu mu = t(X)`.
fn moment_targets(rows: &[&LinearRow], x: &[f64], n: usize) -> Vec<f64> {
    rows.iter().map(|r| r.rhs - r.gram.iter().map(|&(i, j, c)| c * x[i * n + j]).sum::<f64>()).collect()
}

fn block_rows(p: &SdpProblem) -> Result<Vec<Vec<&LinearRow>>> {
    let mut owner = vec![usize::MAX; p.n_mu];
    for (b, blk) in p.blocks.iter().enumerate() {
        owner[blk.offset..blk.offset + blk.len()].iter_mut().for_each(|o| *o = b);
    }
    let mut out = vec![Vec::new(); p.blocks.len()];
    for r in &p.rows {
        let Some(&(k, _)) = r.mu.first() else {
            continue;
        };
        let b = owner[k];
        if r.mu.iter().any(|&(k, _)| owner[k] != b) {
            return Err(SdpError::Shape("distribution row spans several clauses".into()));
        }
        out[b].push(r);
    }
    Ok(out)
}

/// Smallest `delta` in `[0, 1]` for which the clause has a nonnegative
/// distribution matching `(1 - delta) t + delta t_u`.
fn block_delta(p: &SdpProblem, b: usize, rows: &[&LinearRow], t: &[f64], tu: &[f64]) -> Result<f64> {
    let blk = &p.blocks[b];
    let l = blk.len();
    let mut lp = Problem::new(l + 1);
    for (r, row) in rows.iter().enumerate() {
        let mut e: Vec<(usize, f64)> = row.mu.iter().map(|&(k, c)| (k - blk.offset, c)).collect();
        e.push((l, t[r] - tu[r]));
        lp.add_sparse(&e, Cmp::Eq, t[r]);
    }
    lp.add_sparse(&[(l, 1.0)], Cmp::Le, 1.0);
    let mut obj = vec![0.0; l + 1];
    obj[l] = -1.0;
    lp.maximize(obj);
    match lp.solve() {
        Outcome::Optimal { x, .. } => Ok(x[l]),
        _ => Err(SdpError::Repair("no mixing weight restores a distribution".into())),
    }
}

fn block_distribution(p: &SdpProblem, b: usize, rows: &[&LinearRow], t: &[f64]) -> Option<Vec<f64>> {
    let blk = &p.blocks[b];
    let l = blk.len();
    let mut lp = Problem::new(l);
    for (r, row) in rows.iter().enumerate() {
        let e: Vec<(usize, f64)> = row.mu.iter().map(|&(k, c)| (k - blk.offset, c)).collect();
        lp.add_sparse(&e, Cmp::Eq, t[r]);
    }
    lp.maximize(blk.in_strong.iter().map(|&s| if s { 1.0 } else { 0.0 }).collect());
    lp.solve().solution().map(|x| x.iter().map(|v| v.max(0.0)).collect())
}

pub(crate) fn repair(p: &SdpProblem, gram: &[f64]) -> Result<Repaired> {
    let n = p.dim;
    let u = uniform_gram(p);
    let mut x = gram.to_vec();
    match p.encoding {
        Encoding::PlusMinus => unit_diagonal(n, &mut x),
        Encoding::OneHot => {
            mix(&mut x, &u, PREMIX);
            one_hot_structure(p, &mut x)?;
        }
    }
    let rows = block_rows(p)?;
    let mut targets = Vec::with_capacity(rows.len());
    let mut delta = 0.0f64;
    for (b, r) in rows.iter().enumerate() {
        let t = moment_targets(r, &x, n);
        let tu = moment_targets(r, &u, n);
        if block_distribution(p, b, r, &t).is_none() {
            delta = delta.max(block_delta(p, b, r, &t, &tu)?);
        }
        targets.push((t, tu));
    }
    if delta > 0.0 {
        mix(&mut x, &u, delta);
    }
    let mut mus = Vec::with_capacity(rows.len());
    for (b, r) in rows.iter().enumerate() {
        let (t, tu) = &targets[b];
        let td: Vec<f64> = t.iter().zip(tu).map(|(a, b)| (1.0 - delta) * a + delta * b).collect();
        let mu = block_distribution(p, b, r, &td)
            .ok_or_else(|| SdpError::Repair(format!("clause {b} infeasible after mixing")))?;
        mus.push(mu);
    }
    Ok(Repaired { gram: x, mus, delta })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{build_relaxation, integral_solution};
    use pcsp_core::{zoo, Clause, Instance, Literal};

    #[test]
    fn exact_points_are_fixed() {
        let t = zoo::unique_games(3);
        let cl = vec![
            Clause::new(3, vec![Literal::pos(0), Literal::pos(1)], 1.0),
            Clause::new(0, vec![Literal::pos(1), Literal::pos(2)], 1.0),
        ];
        let inst = Instance::new(&t, 3, cl).unwrap();
        let p = build_relaxation(&t, &inst).unwrap();
        let s = integral_solution(&t, &inst, &[0, 1, 1]).unwrap();
        let r = repair(&p, &s.gram).unwrap();
        assert_eq!(r.delta, 0.0);
        let moved = r.gram.iter().zip(&s.gram).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(moved < 1e-8, "{moved}");
        assert!((p.value(&r.mus) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn uniform_mixing_restores_distributions() {
        // x0 = x1 and x0 != x1 at once, with a Gram matrix claiming both hold
        let t = zoo::max_cut();
        let inst = Instance::new(&t, 2, vec![Clause::new(0, vec![Literal::pos(0), Literal::pos(1)], 1.0)]).unwrap();
        let p = build_relaxation(&t, &inst).unwrap();
        let mut gram = vec![1.0; 9];
        // <v0, v1> = <v0, v2> = 1 but <v1, v2> = -1 is not a Gram matrix of
        // any distribution; it is not even PSD, and the repair must still
        // end on the segment towards the uniform point
        gram[5] = -1.0;
        gram[7] = -1.0;
        let r = repair(&p, &gram).unwrap();
        assert!(r.delta > 0.0 && r.delta <= 1.0);
        let u = uniform_gram(&p);
        for k in 0..9 {
            assert!((r.gram[k] - ((1.0 - r.delta) * gram[k] + r.delta * u[k])).abs() < 1e-12);
        }
        assert!(r.mus[0].iter().all(|&m| m >= 0.0));
    }
}
