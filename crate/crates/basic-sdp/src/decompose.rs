use crate::problem::MAX_BLOCK;
use crate::{Result, SdpError};
use linprog::{Cmp, Outcome, Problem};
use pcsp_core::all_tuples;

/// `Mat(a)` for an assignment `a` of `|Y|` variables: the `(|Y||A|)^2`
/// matrix with entry `1[a_y = d] 1[a_y' = d']`.
pub fn local_matrix(a: &[usize], q: usize) -> Vec<f64> {
    let s = a.len() * q;
    let hot: Vec<f64> = (0..s).map(|r| if a[r / q] == r % q { 1.0 } else { 0.0 }).collect();
    (0..s * s).map(|k| hot[k / s] * hot[k % s]).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition {
    /// Coefficient of `Mat(a)` for every `a` in `A^Y`, lexicographic order.
    pub lambda: Vec<f64>,
    /// `max |sum lambda_a Mat(a) - block|`.
    pub residual: f64,
    pub nonnegative: bool,
}

/// Write `block` as `sum_a lambda_a Mat(a)`.
///
/// With `sum = Some(s)` the coefficients are required to sum to `s`. With
/// `try_nonnegative` a convex-cone solution is searched first. Otherwise
/// `lambda` is free and the solution of least l1 norm is returned. `None`
/// means the block is outside the span.
pub fn decompose_local_gram(
    block: &[f64],
    n_vars: usize,
    q: usize,
    sum: Option<f64>,
    try_nonnegative: bool,
) -> Result<Option<Decomposition>> {
    let s = n_vars * q;
    if block.len() != s * s {
        return Err(SdpError::Shape(format!("block has {} entries, expected {}", block.len(), s * s)));
    }
    let count = q.checked_pow(n_vars as u32).filter(|&c| c <= MAX_BLOCK);
    let count =
        count.ok_or(SdpError::Budget { clause: 0, size: q.checked_pow(n_vars as u32).unwrap_or(usize::MAX) })?;
    let mats: Vec<Vec<f64>> = all_tuples(n_vars, q).map(|a| local_matrix(&a, q)).collect();
    let build = |signed: bool| {
        let nv = if signed { 2 * count } else { count };
        let mut lp = Problem::new(nv);
        for r in 0..s {
            for c in r..s {
                let mut row = vec![0.0; nv];
                for (a, m) in mats.iter().enumerate() {
                    row[a] = m[r * s + c];
                    if signed {
                        row[count + a] = -m[r * s + c];
                    }
                }
                lp.add_row(row, Cmp::Eq, block[r * s + c]);
            }
        }
        if let Some(t) = sum {
            let row = (0..nv).map(|v| if v < count { 1.0 } else { -1.0 }).collect();
            lp.add_row(row, Cmp::Eq, t);
        }
        if signed {
            lp.maximize(vec![-1.0; nv]);
        }
        lp
    };
    let finish = |x: &[f64], signed: bool| {
        let lambda: Vec<f64> = (0..count).map(|a| if signed { x[a] - x[count + a] } else { x[a] }).collect();
        let mut residual = 0.0f64;
        for k in 0..s * s {
            let v: f64 = lambda.iter().zip(&mats).map(|(l, m)| l * m[k]).sum();
            residual = residual.max((v - block[k]).abs());
        }
        Decomposition { nonnegative: lambda.iter().all(|&l| l >= 0.0), lambda, residual }
    };
    if try_nonnegative {
        if let Outcome::Optimal { x, .. } = build(false).solve() {
            return Ok(Some(finish(&x, false)));
        }
    }
    match build(true).solve() {
        Outcome::Optimal { x, .. } => Ok(Some(finish(&x, true))),
        _ => Ok(None),
    }
}
