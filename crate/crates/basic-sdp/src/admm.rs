//! ADMM for `max c.x` over `{A x = b} ∩ (PSD x R_+)`.
//!
//! The Gram part is stored in scaled half-vectorized form (off-diagonal
//! entries times `sqrt 2`) so that Euclidean projections in the vector space
//! are Frobenius projections of the matrix. Iteration, with `K` the cone:
//!
//! ```text
//! x   = proj_affine(z - u + c / sigma)
//! x^  = alpha x + (1 - alpha) z
//! z   = proj_K(x^ + u)
//! u  += x^ - z
//! ```
//!
//! The affine projection solves `A A^T lambda = A y - b` by warm-started
//! Jacobi-preconditioned conjugate gradients.

use crate::problem::{LinearRow, SdpProblem};
use crate::solution::GramSolution;
use crate::{sym_eigen, Result};
use rand::Rng;
use rand_distr::StandardNormal;
use std::collections::VecDeque;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Method {
    /// Factored `X = V V^T`, augmented Lagrangian with L-BFGS.
    #[default]
    LowRank,
    /// Operator splitting with eigendecomposition-based cone projection.
    Admm,
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
    pub method: Method,
    /// Moment residual at which the low-rank method stops and repairs its
    /// point to exact feasibility; the repair costs roughly this much value.
    pub handover: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { tol: 1e-7, max_iter: 50_000, seed: 0, method: Method::LowRank, handover: 1e-7 }
    }
}

const RELAX: f64 = 1.6;
const ADAPT_EVERY: usize = 50;
const AA_MEMORY: usize = 8;
const CG_TOL: f64 = 1e-13;
const CG_MAX: usize = 1000;

pub(crate) fn svec_index(i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    j * (j + 1) / 2 + i
}

struct Csr {
    ptr: Vec<usize>,
    col: Vec<usize>,
    val: Vec<f64>,
    rhs: Vec<f64>,
}

impl Csr {
    fn build<'a>(rows: impl Iterator<Item = &'a LinearRow>, nsv: usize) -> Csr {
        let mut ptr = vec![0];
        let (mut col, mut val, mut rhs) = (Vec::new(), Vec::new(), Vec::new());
        for r in rows {
            let mut entries: Vec<(usize, f64)> = r
                .gram
                .iter()
                .map(|&(i, j, c)| (svec_index(i, j), if i == j { c } else { c / std::f64::consts::SQRT_2 }))
                .chain(r.mu.iter().map(|&(k, c)| (nsv + k, c)))
                .collect();
            entries.sort_by_key(|e| e.0);
            let start = col.len();
            for (c, v) in entries {
                if col.len() > start && *col.last().unwrap() == c {
                    *val.last_mut().unwrap() += v;
                } else {
                    col.push(c);
                    val.push(v);
                }
            }
            ptr.push(col.len());
            rhs.push(r.rhs);
        }
        Csr { ptr, col, val, rhs }
    }

    fn rows(&self) -> usize {
        self.rhs.len()
    }

    fn mul(&self, x: &[f64], out: &mut [f64]) {
        for (r, o) in out.iter_mut().enumerate() {
            *o = (self.ptr[r]..self.ptr[r + 1]).map(|k| self.val[k] * x[self.col[k]]).sum();
        }
    }

    fn mul_t(&self, y: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        for (r, &yr) in y.iter().enumerate() {
            for k in self.ptr[r]..self.ptr[r + 1] {
                out[self.col[k]] += self.val[k] * yr;
            }
        }
    }

    fn residual_inf(&self, x: &[f64]) -> f64 {
        let mut ax = vec![0.0; self.rows()];
        self.mul(x, &mut ax);
        ax.iter().zip(&self.rhs).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

struct AffineProjector {
    a: Csr,
    diag: Vec<f64>,
    lambda: Vec<f64>,
    tmp: Vec<f64>,
}

impl AffineProjector {
    fn new(a: Csr, n: usize) -> Self {
        let diag = (0..a.rows())
            .map(|r| (a.ptr[r]..a.ptr[r + 1]).map(|k| a.val[k] * a.val[k]).sum::<f64>().max(1e-300))
            .collect();
        let m = a.rows();
        AffineProjector { a, diag, lambda: vec![0.0; m], tmp: vec![0.0; n] }
    }

    fn apply_m(&mut self, v: &[f64], out: &mut [f64]) {
        self.a.mul_t(v, &mut self.tmp);
        self.a.mul(&self.tmp, out);
    }

    /// Overwrite `y` with its projection onto `{A x = b}`.
    fn project(&mut self, y: &mut [f64]) {
        let m = self.a.rows();
        let mut rhs = vec![0.0; m];
        self.a.mul(y, &mut rhs);
        rhs.iter_mut().zip(&self.a.rhs).for_each(|(r, b)| *r -= b);
        // PCG on A A^T lambda = rhs, from the previous lambda
        let mut ml = vec![0.0; m];
        let lambda = std::mem::take(&mut self.lambda);
        self.apply_m(&lambda, &mut ml);
        let mut lambda = lambda;
        let mut res: Vec<f64> = rhs.iter().zip(&ml).map(|(r, a)| r - a).collect();
        let mut zr: Vec<f64> = res.iter().zip(&self.diag).map(|(r, d)| r / d).collect();
        let mut dir = zr.clone();
        let mut rz: f64 = res.iter().zip(&zr).map(|(a, b)| a * b).sum();
        let mut md = vec![0.0; m];
        for _ in 0..CG_MAX {
            if res.iter().fold(0.0f64, |a, r| a.max(r.abs())) <= CG_TOL {
                break;
            }
            self.apply_m(&dir, &mut md);
            let dmd: f64 = dir.iter().zip(&md).map(|(a, b)| a * b).sum();
            if dmd <= 0.0 {
                break;
            }
            let step = rz / dmd;
            for i in 0..m {
                lambda[i] += step * dir[i];
                res[i] -= step * md[i];
            }
            zr.iter_mut().zip(&res).zip(&self.diag).for_each(|((z, r), d)| *z = r / d);
            let rz_new: f64 = res.iter().zip(&zr).map(|(a, b)| a * b).sum();
            let beta = rz_new / rz;
            rz = rz_new;
            dir.iter_mut().zip(&zr).for_each(|(d, z)| *d = z + beta * *d);
        }
        self.a.mul_t(&lambda, &mut self.tmp);
        y.iter_mut().zip(&self.tmp).for_each(|(v, t)| *v -= t);
        self.lambda = lambda;
    }
}

/// Project onto `PSD x R_+` in place.
fn project_cone(v: &mut [f64], dim: usize, nsv: usize) -> Result<()> {
    let mut x = vec![0.0; dim * dim];
    for j in 0..dim {
        for i in 0..=j {
            let s = v[svec_index(i, j)];
            let e = if i == j { s } else { s / std::f64::consts::SQRT_2 };
            x[i * dim + j] = e;
            x[j * dim + i] = e;
        }
    }
    let (vals, vecs) = sym_eigen(dim, &x)?;
    let pos: Vec<usize> = (0..dim).filter(|&k| vals[k] > 0.0).collect();
    let r = pos.len();
    // B = U_+ sqrt(Lambda_+), X = B B^T
    let b = faer::Mat::<f64>::from_fn(dim, r, |i, c| vecs[pos[c] * dim + i] * vals[pos[c]].sqrt());
    let g = &b * b.transpose();
    for j in 0..dim {
        for i in 0..=j {
            let e = g[(i, j)];
            v[svec_index(i, j)] = if i == j { e } else { e * std::f64::consts::SQRT_2 };
        }
    }
    for m in &mut v[nsv..] {
        if *m < 0.0 {
            *m = 0.0;
        }
    }
    Ok(())
}

fn inf_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn initial_point(p: &SdpProblem, nsv: usize, seed: u64) -> Vec<f64> {
    let n = p.dim;
    let mut rng = pcsp_core::rng::stream(seed, 0);
    let mut vs: Vec<Vec<f64>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut v: Vec<f64> = if i == 0 {
            let mut e = vec![0.0; n];
            e[0] = 1.0;
            e
        } else {
            (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
        };
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= norm);
        vs.push(v);
    }
    let mut z = vec![0.0; nsv + p.n_mu];
    for j in 0..n {
        for i in 0..=j {
            let d: f64 = vs[i].iter().zip(&vs[j]).map(|(a, b)| a * b).sum();
            z[svec_index(i, j)] = if i == j { d } else { d * std::f64::consts::SQRT_2 };
        }
    }
    for b in &p.blocks {
        let u = 1.0 / b.len() as f64;
        z[nsv + b.offset..nsv + b.offset + b.len()].iter_mut().for_each(|m| *m = u);
    }
    z
}

struct Splitting<'a> {
    proj: AffineProjector,
    c: &'a [f64],
    sigma: f64,
    dim: usize,
    nsv: usize,
}

struct StepInfo {
    /// `|x - z|_inf` after the step.
    primal: f64,
}

impl Splitting<'_> {
    /// One ADMM step from the state `s = [z; u]`, written into `out`.
    fn apply(&mut self, s: &[f64], out: &mut [f64]) -> Result<StepInfo> {
        let nx = s.len() / 2;
        let (z, u) = s.split_at(nx);
        let mut x: Vec<f64> = (0..nx).map(|k| z[k] - u[k] + self.c[k] / self.sigma).collect();
        self.proj.project(&mut x);
        let (z1, u1) = out.split_at_mut(nx);
        for k in 0..nx {
            z1[k] = RELAX * x[k] + (1.0 - RELAX) * z[k] + u[k];
        }
        project_cone(z1, self.dim, self.nsv)?;
        for k in 0..nx {
            u1[k] = u[k] + RELAX * x[k] + (1.0 - RELAX) * z[k] - z1[k];
        }
        Ok(StepInfo { primal: inf_diff(&x, z1) })
    }
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Type-II Anderson mixing: the combination `gamma` minimizing
/// `|g - dG gamma|`, by regularized normal equations.
fn anderson_gamma(dg: &VecDeque<Vec<f64>>, g: &[f64]) -> Option<Vec<f64>> {
    let m = dg.len();
    let mut a = vec![0.0; m * m];
    let mut b = vec![0.0; m];
    for i in 0..m {
        b[i] = dg[i].iter().zip(g).map(|(x, y)| x * y).sum();
        for j in 0..=i {
            let d: f64 = dg[i].iter().zip(&dg[j]).map(|(x, y)| x * y).sum();
            a[i * m + j] = d;
            a[j * m + i] = d;
        }
    }
    let reg = 1e-10 * (0..m).map(|i| a[i * m + i]).sum::<f64>().max(1e-300);
    (0..m).for_each(|i| a[i * m + i] += reg);
    // Gaussian elimination with partial pivoting
    for col in 0..m {
        let piv = (col..m).max_by(|&i, &j| a[i * m + col].abs().total_cmp(&a[j * m + col].abs()))?;
        if a[piv * m + col].abs() < 1e-300 {
            return None;
        }
        for k in 0..m {
            a.swap(col * m + k, piv * m + k);
        }
        b.swap(col, piv);
        for r in col + 1..m {
            let f = a[r * m + col] / a[col * m + col];
            for k in col..m {
                a[r * m + k] -= f * a[col * m + k];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; m];
    for r in (0..m).rev() {
        let s: f64 = (r + 1..m).map(|k| a[r * m + k] * x[k]).sum();
        x[r] = (b[r] - s) / a[r * m + r];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

/// Solve the relaxation. The returned point lies in the cone exactly; its
/// affine residual and the final dual residual are reported, and the
/// `converged` flag says whether both reached `tol`.
///
/// The ADMM map is accelerated by safeguarded Anderson mixing over the
/// state `[z; u]`: an extrapolated state is kept only if its fixed-point
/// residual does not grow.
pub fn solve_sdp(p: &SdpProblem, opts: &SolveOptions) -> Result<GramSolution> {
    match opts.method {
        Method::LowRank => crate::lowrank::solve_low_rank(p, opts),
        Method::Admm => solve_admm(p, opts),
    }
}

fn solve_admm(p: &SdpProblem, opts: &SolveOptions) -> Result<GramSolution> {
    let dim = p.dim;
    let nsv = dim * (dim + 1) / 2;
    let nx = nsv + p.n_mu;
    let full = Csr::build(p.rows.iter().chain(&p.implied), nsv);
    let mut c = vec![0.0; nx];
    c[nsv..].copy_from_slice(&p.objective());
    let mut op = Splitting {
        proj: AffineProjector::new(Csr::build(p.rows.iter(), nsv), nx),
        c: &c,
        sigma: 1.0 / (p.blocks.len() as f64).sqrt(),
        dim,
        nsv,
    };
    let memory = AA_MEMORY;

    let mut s = initial_point(p, nsv, opts.seed);
    s.resize(2 * nx, 0.0);
    let mut t = vec![0.0; 2 * nx];
    let mut info = op.apply(&s, &mut t)?;
    let mut g: Vec<f64> = t.iter().zip(&s).map(|(a, b)| a - b).collect();
    let mut ds: VecDeque<Vec<f64>> = VecDeque::new();
    let mut dg: VecDeque<Vec<f64>> = VecDeque::new();
    let mut best: Option<(f64, Vec<f64>, f64, f64)> = None;
    let mut last = (f64::INFINITY, f64::INFINITY);
    let mut converged = false;
    let mut iterations = 0;
    let mut t_next = vec![0.0; 2 * nx];
    for it in 1..=opts.max_iter.max(1) {
        iterations = it;
        // residuals of the projected point t
        let dual = op.sigma * inf_diff(&t[..nx], &s[..nx]);
        let primal = info.primal;
        if primal <= opts.tol || it % 10 == 0 || it == opts.max_iter {
            let feas = full.residual_inf(&t[..nx]);
            let score = feas.max(primal).max(dual);
            if best.as_ref().is_none_or(|b| score < b.0) {
                best = Some((score, t[..nx].to_vec(), feas, dual));
            }
            last = (feas, dual);
            if feas <= opts.tol && primal <= opts.tol && dual <= opts.tol {
                converged = true;
                break;
            }
        }
        if it % ADAPT_EVERY == 0 && (primal > 10.0 * dual || dual > 10.0 * primal) {
            let scale = if primal > dual { 2.0 } else { 0.5 };
            op.sigma *= scale;
            s.copy_from_slice(&t);
            s[nx..].iter_mut().for_each(|v| *v /= scale);
            info = op.apply(&s, &mut t)?;
            g.iter_mut().zip(t.iter().zip(&s)).for_each(|(gv, (a, b))| *gv = a - b);
            ds.clear();
            dg.clear();
            continue;
        }
        // candidate: plain step t, or its Anderson extrapolation
        let mut cand = t.clone();
        let mut mixed = false;
        if memory > 0 && !dg.is_empty() {
            if let Some(gamma) = anderson_gamma(&dg, &g) {
                for (gi, (a, b)) in gamma.iter().zip(ds.iter().zip(&dg)) {
                    cand.iter_mut().zip(a.iter().zip(b)).for_each(|(v, (x, y))| *v -= gi * (x + y));
                }
                mixed = true;
            }
        }
        let mut info_next = op.apply(&cand, &mut t_next)?;
        let mut g_next: Vec<f64> = t_next.iter().zip(&cand).map(|(a, b)| a - b).collect();
        if mixed && norm2(&g_next) > norm2(&g) {
            cand.copy_from_slice(&t);
            info_next = op.apply(&cand, &mut t_next)?;
            g_next.iter_mut().zip(t_next.iter().zip(&cand)).for_each(|(gv, (a, b))| *gv = a - b);
            ds.clear();
            dg.clear();
        }
        if memory > 0 {
            if ds.len() == memory {
                ds.pop_front();
                dg.pop_front();
            }
            ds.push_back(cand.iter().zip(&s).map(|(a, b)| a - b).collect());
            dg.push_back(g_next.iter().zip(&g).map(|(a, b)| a - b).collect());
        }
        s = cand;
        std::mem::swap(&mut t, &mut t_next);
        g = g_next;
        info = info_next;
    }
    let (_, zb, feas, dual) =
        if converged { (0.0, t[..nx].to_vec(), last.0, last.1) } else { best.expect("at least one residual check") };
    Ok(GramSolution::from_svec(p, &zb, nsv, converged, iterations, feas, dual))
}
