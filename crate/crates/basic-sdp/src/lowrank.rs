//! Low-rank augmented Lagrangian for the relaxation.
//!
//! The Gram matrix is factored as `X = V V^T` (`V` is `dim x r`), so it is
//! PSD by construction. The moment equations `h(V, mu) = 0` are enforced by
//! the augmented Lagrangian
//!
//! ```text
//! F = -c.mu + y.h + (rho / 2) |h|^2
//! ```
//!
//! minimized over `(V, mu >= 0)` by projected L-BFGS, with first-order
//! multiplier updates `y += rho h`. Once the residual is small the point is
//! made exactly feasible by [`repair`].

use crate::problem::{Encoding, LinearRow, SdpProblem};
use crate::repair::repair;
use crate::solution::GramSolution;
use crate::{Result, SolveOptions};
use rand::Rng;
use rand_distr::StandardNormal;
use std::collections::VecDeque;

/// L-BFGS steps per multiplier update. Bounding them keeps the multipliers
/// moving when an inner solve crawls.
const INNER_CAP: usize = 1000;

/// Beyond this the inner problems are too ill-conditioned to make progress.
const RHO_MAX: f64 = 1e5;

struct Rows {
    /// `(row, i, j, coef)`
    gram: Vec<(usize, usize, usize, f64)>,
    /// `(row, k, coef)`
    mu: Vec<(usize, usize, f64)>,
    rhs: Vec<f64>,
}

impl Rows {
    fn new<'a>(rows: impl Iterator<Item = &'a LinearRow>) -> Rows {
        let mut out = Rows { gram: Vec::new(), mu: Vec::new(), rhs: Vec::new() };
        for (r, row) in rows.enumerate() {
            out.gram.extend(row.gram.iter().map(|&(i, j, c)| (r, i, j, c)));
            out.mu.extend(row.mu.iter().map(|&(k, c)| (r, k, c)));
            out.rhs.push(row.rhs);
        }
        out
    }
}

struct Model {
    rows: Rows,
    c: Vec<f64>,
    dim: usize,
    rank: usize,
    n_mu: usize,
    y: Vec<f64>,
    rho: f64,
    /// `+-1` form: rows of `V` are normalized, so unit norms hold exactly
    /// and the diagonal rows are dropped.
    sphere: bool,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl Model {
    /// The factor `V` encoded by `x`.
    fn factor(&self, x: &[f64]) -> Vec<f64> {
        let r = self.rank;
        let mut v = x[..self.dim * r].to_vec();
        if self.sphere {
            for row in v.chunks_mut(r) {
                let n = dot(row, row).sqrt();
                row.iter_mut().for_each(|e| *e /= n);
            }
        }
        v
    }

    fn residuals(&self, x: &[f64]) -> Vec<f64> {
        let v = &self.factor(x);
        let mu = &x[self.dim * self.rank..];
        let r = self.rank;
        let mut h: Vec<f64> = self.rows.rhs.iter().map(|b| -b).collect();
        for &(row, i, j, c) in &self.rows.gram {
            h[row] += c * dot(&v[i * r..(i + 1) * r], &v[j * r..(j + 1) * r]);
        }
        for &(row, k, c) in &self.rows.mu {
            h[row] += c * mu[k];
        }
        h
    }

    /// Value and gradient of the augmented Lagrangian.
    fn eval(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        let h = self.residuals(x);
        let v = &self.factor(x);
        let mu = &x[self.dim * self.rank..];
        let r = self.rank;
        let w: Vec<f64> = h.iter().zip(&self.y).map(|(h, y)| y + self.rho * h).collect();
        let mut f = 0.0;
        for ((h, y), _) in h.iter().zip(&self.y).zip(&w) {
            f += y * h + 0.5 * self.rho * h * h;
        }
        grad.iter_mut().for_each(|g| *g = 0.0);
        let (gv, ge) = grad.split_at_mut(self.dim * r);
        for &(row, i, j, c) in &self.rows.gram {
            let s = w[row] * c;
            if i == j {
                for t in 0..r {
                    gv[i * r + t] += 2.0 * s * v[i * r + t];
                }
            } else {
                for t in 0..r {
                    gv[i * r + t] += s * v[j * r + t];
                    gv[j * r + t] += s * v[i * r + t];
                }
            }
        }
        if self.sphere {
            // chain rule through w -> w / |w|
            for (i, g) in gv.chunks_mut(r).enumerate() {
                let w = &x[i * r..(i + 1) * r];
                let n = dot(w, w).sqrt();
                let vi = &v[i * r..(i + 1) * r];
                let along = dot(g, vi);
                g.iter_mut().zip(vi).for_each(|(g, e)| *g = (*g - along * e) / n);
            }
        }
        // v0 is pinned to e_0; rotations leave X unchanged
        gv[..r].iter_mut().for_each(|g| *g = 0.0);
        // reduced cost per entry: A_mu^T w - c
        let mut red: Vec<f64> = self.c.iter().map(|c| -c).collect();
        for &(row, k, c) in &self.rows.mu {
            red[k] += w[row] * c;
        }
        for k in 0..self.n_mu {
            f -= self.c[k] * mu[k];
            ge[k] = red[k];
        }
        f
    }
}

/// Minimize over `x[bounded..] >= 0` with projected L-BFGS and a
/// backtracking (Armijo) search along the projected path, until the projected
/// gradient has `|.|_inf <= gtol` or `max_iter` steps. Coordinates at their
/// bound with an outward gradient are frozen for the step. Returns the steps
/// taken and the final projected gradient norm.
fn lbfgs(model: &Model, x: &mut [f64], gtol: f64, max_iter: usize) -> (usize, f64) {
    const MEM: usize = 10;
    let bounded = model.dim * model.rank;
    let n = x.len();
    let mut g = vec![0.0; n];
    let mut f = model.eval(x, &mut g);
    let mut hist: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::new();
    let mut xn = vec![0.0; n];
    let mut gn = vec![0.0; n];
    let frozen = |x: &[f64], g: &[f64], k: usize| k >= bounded && x[k] <= 0.0 && g[k] > 0.0;
    let r = model.rank;
    // On the sphere the gradient shrinks like 1/|row|; measure it on unit rows.
    let pgnorm = |x: &[f64], g: &[f64]| {
        let mut a = 0.0f64;
        for (row, gr) in x[..bounded].chunks(r).zip(g[..bounded].chunks(r)) {
            let s = if model.sphere { dot(row, row).sqrt() } else { 1.0 };
            a = gr.iter().fold(a, |a, g| a.max((g * s).abs()));
        }
        (bounded..n).fold(a, |a, k| a.max(x[k].min(g[k]).abs()))
    };
    for it in 0..max_iter {
        let gnorm = pgnorm(x, &g);
        if gnorm <= gtol {
            return (it, gnorm);
        }
        // two-loop recursion on the free coordinates
        let mut d: Vec<f64> = (0..n).map(|k| if frozen(x, &g, k) { 0.0 } else { -g[k] }).collect();
        let mut alphas = Vec::with_capacity(hist.len());
        for (s, yv, rho) in hist.iter().rev() {
            let a = rho * dot(s, &d);
            d.iter_mut().zip(yv).for_each(|(di, yi)| *di -= a * yi);
            alphas.push(a);
        }
        let gamma = hist.back().map_or(1.0 / gnorm.max(1.0), |(s, yv, _)| dot(s, yv) / dot(yv, yv));
        d.iter_mut().for_each(|di| *di *= gamma);
        for ((s, yv, rho), a) in hist.iter().zip(alphas.iter().rev()) {
            let b = rho * dot(yv, &d);
            d.iter_mut().zip(s).for_each(|(di, si)| *di += (a - b) * si);
        }
        for k in bounded..n {
            if frozen(x, &g, k) {
                d[k] = 0.0;
            }
        }
        if dot(&g, &d) >= 0.0 {
            hist.clear();
            d = (0..n).map(|k| if frozen(x, &g, k) { 0.0 } else { -g[k] / gnorm.max(1.0) }).collect();
        }
        let mut step = 1.0;
        let mut fnew;
        loop {
            for k in 0..n {
                let t = x[k] + step * d[k];
                xn[k] = if k >= bounded { t.max(0.0) } else { t };
            }
            fnew = model.eval(&xn, &mut gn);
            let decrease: f64 = (0..n).map(|k| g[k] * (xn[k] - x[k])).sum();
            if fnew <= f + 1e-4 * decrease || step < 1e-20 {
                break;
            }
            step *= 0.5;
        }
        if step < 1e-20 {
            return (it, gnorm);
        }
        let s: Vec<f64> = xn.iter().zip(x.iter()).map(|(a, b)| a - b).collect();
        let yv: Vec<f64> = gn.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &yv);
        if sy > 1e-12 * dot(&yv, &yv).sqrt() * dot(&s, &s).sqrt() {
            if hist.len() == MEM {
                hist.pop_front();
            }
            hist.push_back((s, yv, 1.0 / sy));
        }
        x.copy_from_slice(&xn);
        g.copy_from_slice(&gn);
        f = fnew;
    }
    (max_iter, pgnorm(x, &g))
}

impl Model {
    fn new(p: &SdpProblem) -> Model {
        let dim = p.dim;
        let sphere = p.encoding == Encoding::PlusMinus;
        let is_diag = |r: &&LinearRow| r.mu.is_empty() && r.gram.len() == 1 && r.gram[0].0 == r.gram[0].1;
        let kept: Vec<&LinearRow> = p.rows.iter().chain(&p.implied).filter(|r| !(sphere && is_diag(r))).collect();
        let m = kept.len();
        let objective = p.objective();
        // work with c normalized to unit max entry
        let scale = objective.iter().fold(0.0f64, |a, &b| a.max(b.abs())).max(f64::MIN_POSITIVE);
        Model {
            rows: Rows::new(kept.into_iter()),
            c: objective.iter().map(|c| c / scale).collect(),
            dim,
            rank: dim.min(((2.0 * m as f64).sqrt().ceil() as usize + 1).max(2)),
            n_mu: p.n_mu,
            y: vec![0.0; m],
            rho: 1.0,
            sphere,
        }
    }
}

pub(crate) fn solve_low_rank(p: &SdpProblem, opts: &SolveOptions) -> Result<GramSolution> {
    let (tol, max_iter) = (opts.tol, opts.max_iter);
    let target = opts.handover.max(tol);
    let mut model = Model::new(p);
    let (dim, rank, sphere) = (model.dim, model.rank, model.sphere);
    let mut rng = pcsp_core::rng::stream(opts.seed, 0);
    let mut x = vec![0.0; dim * rank + p.n_mu];
    x[0] = 1.0;
    for i in 1..dim {
        let row: Vec<f64> = (0..rank).map(|_| rng.sample(StandardNormal)).collect();
        let nrm = dot(&row, &row).sqrt();
        for t in 0..rank {
            x[i * rank + t] = row[t] / nrm;
        }
    }
    for b in &p.blocks {
        let e = 1.0 / b.len() as f64;
        x[dim * rank + b.offset..dim * rank + b.offset + b.len()].iter_mut().for_each(|v| *v = e);
    }
    let mut used = 0;
    let mut gtol = 1e-3;
    let mut prev_viol = f64::INFINITY;
    let mut stalls = 0;
    let mut viol;
    let mut gnorm;
    loop {
        if sphere {
            x[..dim * rank].chunks_mut(rank).for_each(|row| {
                let n = dot(row, row).sqrt();
                row.iter_mut().for_each(|e| *e /= n);
            });
        }
        let (steps, gn) = lbfgs(&model, &mut x, gtol, max_iter.saturating_sub(used).clamp(1, INNER_CAP));
        used += steps.max(1);
        gnorm = gn;
        let h = model.residuals(&x);
        viol = h.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        for (y, h) in model.y.iter_mut().zip(&h) {
            *y += model.rho * h;
        }
        let stationary = gnorm <= target.sqrt();
        if (viol <= target && stationary) || used >= max_iter {
            break;
        }
        // After capped inner solves, raise rho only on a persistent stall:
        // raising it every round wrecks the conditioning.
        if viol > 0.25 * prev_viol {
            stalls += 1;
            if gn <= gtol || stalls >= 3 {
                model.rho = (model.rho * 5.0).min(RHO_MAX);
                stalls = 0;
            }
        } else {
            stalls = 0;
        }
        prev_viol = viol;
        gtol = (0.1 * viol).clamp(0.1 * tol, 1e-2);
    }
    let dm = dim * rank;
    x[dm..].iter_mut().for_each(|m| *m = m.max(0.0));
    let v = &model.factor(&x);
    let mut gram = vec![0.0; dim * dim];
    for i in 0..dim {
        for j in 0..=i {
            let e = dot(&v[i * rank..(i + 1) * rank], &v[j * rank..(j + 1) * rank]);
            gram[i * dim + j] = e;
            gram[j * dim + i] = e;
        }
    }
    let fixed = repair(p, &gram)?;
    let mut flat = vec![0.0; p.n_mu];
    for (b, mu) in p.blocks.iter().zip(&fixed.mus) {
        flat[b.offset..b.offset + b.len()].copy_from_slice(mu);
    }
    let residual = full_residual(p, &fixed.gram, &flat);
    let value = p.value(&fixed.mus);
    Ok(GramSolution {
        dim,
        gram: fixed.gram,
        mus: fixed.mus,
        value,
        converged: viol <= target && gnorm <= target.sqrt() && residual <= tol,
        iterations: used,
        primal_residual: residual,
        dual_residual: gnorm,
    })
}

fn full_residual(p: &SdpProblem, gram: &[f64], mu: &[f64]) -> f64 {
    p.rows
        .iter()
        .chain(&p.implied)
        .map(|r| {
            let g: f64 = r.gram.iter().map(|&(i, j, c)| c * gram[i * p.dim + j]).sum();
            let m: f64 = r.mu.iter().map(|&(k, c)| c * mu[k]).sum();
            (g + m - r.rhs).abs()
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::build_relaxation;

    fn check_gradient(p: &SdpProblem, seed: u64) {
        let mut model = Model::new(p);
        let mut rng = pcsp_core::rng::stream(seed, 0);
        let n = model.dim * model.rank + model.n_mu;
        let mut x: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        x[model.dim * model.rank..].iter_mut().for_each(|m| *m = m.abs());
        model.y.iter_mut().for_each(|y| *y = rng.sample(StandardNormal));
        model.rho = 3.0;
        let mut g = vec![0.0; n];
        model.eval(&x, &mut g);
        let mut scratch = vec![0.0; n];
        for k in model.rank..n {
            let h = 1e-6;
            let (mut a, mut b) = (x.clone(), x.clone());
            a[k] += h;
            b[k] -= h;
            let fd = (model.eval(&a, &mut scratch) - model.eval(&b, &mut scratch)) / (2.0 * h);
            assert!((fd - g[k]).abs() <= 1e-5 * (1.0 + fd.abs()), "coordinate {k}: {fd} vs {}", g[k]);
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let (t, inst) = pcsp_core::dimacs::parse_dimacs_2sat("p cnf 3 3\n1 2 0\n-1 0\n-2 3 0\n").unwrap();
        check_gradient(&build_relaxation(&t, &inst).unwrap(), 1);
        let planted = pcsp_core::generate::planted_unique_games(3, 4, 6, 0.1, 2);
        check_gradient(&build_relaxation(&planted.template, &planted.instance).unwrap(), 2);
    }
}
