//! Dense two-phase tableau simplex for small feasibility problems.
//!
//! Variables are nonnegative. Entering and leaving variables follow Bland's
//! rule, so the method terminates on degenerate problems. When an optimal
//! basis is found, the basic solution is recomputed from the original data
//! by Gaussian elimination, which keeps residuals near machine precision.

pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cmp {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Debug)]
struct Row {
    coefs: Vec<f64>,
    cmp: Cmp,
    rhs: f64,
}

/// `maximize c.x` subject to linear rows and `x >= 0`.
#[derive(Clone, Debug)]
pub struct Problem {
    n: usize,
    rows: Vec<Row>,
    objective: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Outcome {
    Optimal { x: Vec<f64>, value: f64 },
    Infeasible,
    Unbounded,
}

impl Outcome {
    pub fn solution(&self) -> Option<&[f64]> {
        match self {
            Outcome::Optimal { x, .. } => Some(x),
            _ => None,
        }
    }
}

impl Problem {
    pub fn new(n: usize) -> Self {
        Problem { n, rows: Vec::new(), objective: vec![0.0; n] }
    }

    pub fn num_vars(&self) -> usize {
        self.n
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn add_row(&mut self, coefs: Vec<f64>, cmp: Cmp, rhs: f64) {
        assert_eq!(coefs.len(), self.n, "row length must equal the number of variables");
        self.rows.push(Row { coefs, cmp, rhs });
    }

    pub fn add_sparse(&mut self, entries: &[(usize, f64)], cmp: Cmp, rhs: f64) {
        let mut coefs = vec![0.0; self.n];
        for &(j, v) in entries {
            coefs[j] += v;
        }
        self.add_row(coefs, cmp, rhs);
    }

    pub fn maximize(&mut self, c: Vec<f64>) {
        assert_eq!(c.len(), self.n);
        self.objective = c;
    }

    pub fn solve(&self) -> Outcome {
        self.solve_with(DEFAULT_TOL)
    }

    pub fn solve_with(&self, tol: f64) -> Outcome {
        Tableau::build(self, tol).run(self)
    }

    /// Largest violation of any row (and of `x >= 0`) at `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst = x.iter().fold(0.0f64, |m, &v| m.max(-v));
        for r in &self.rows {
            let lhs: f64 = r.coefs.iter().zip(x).map(|(a, b)| a * b).sum();
            let v = match r.cmp {
                Cmp::Le => lhs - r.rhs,
                Cmp::Ge => r.rhs - lhs,
                Cmp::Eq => (lhs - r.rhs).abs(),
            };
            worst = worst.max(v);
        }
        worst
    }
}

/// Column layout: structural `0..n`, then one slack/surplus per inequality,
/// then one artificial per row that needs it.
struct Tableau {
    tol: f64,
    m: usize,
    ncols: usize,
    n_struct_slack: usize,
    a: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    basis: Vec<usize>,
    origin: Vec<usize>,
    /// Columns of the normalised original system, kept for the final solve.
    orig: Vec<Vec<f64>>,
    orig_rhs: Vec<f64>,
}

impl Tableau {
    fn build(p: &Problem, tol: f64) -> Self {
        let m = p.rows.len();
        let n_slack = p.rows.iter().filter(|r| r.cmp != Cmp::Eq).count();
        let mut rows = Vec::with_capacity(m);
        for r in &p.rows {
            let (mut coefs, mut cmp, mut rhs) = (r.coefs.clone(), r.cmp, r.rhs);
            if rhs < 0.0 {
                coefs.iter_mut().for_each(|c| *c = -*c);
                rhs = -rhs;
                cmp = match cmp {
                    Cmp::Le => Cmp::Ge,
                    Cmp::Ge => Cmp::Le,
                    Cmp::Eq => Cmp::Eq,
                };
            }
            rows.push((coefs, cmp, rhs));
        }
        let n_art = rows.iter().filter(|r| r.1 != Cmp::Le).count();
        let n_struct_slack = p.n + n_slack;
        let ncols = n_struct_slack + n_art;
        let mut a = vec![vec![0.0; ncols]; m];
        let mut rhs = vec![0.0; m];
        let mut basis = vec![0; m];
        let (mut s, mut art) = (p.n, n_struct_slack);
        for (i, (coefs, cmp, b)) in rows.into_iter().enumerate() {
            a[i][..p.n].copy_from_slice(&coefs);
            rhs[i] = b;
            match cmp {
                Cmp::Le => {
                    a[i][s] = 1.0;
                    basis[i] = s;
                    s += 1;
                }
                Cmp::Ge => {
                    a[i][s] = -1.0;
                    s += 1;
                    a[i][art] = 1.0;
                    basis[i] = art;
                    art += 1;
                }
                Cmp::Eq => {
                    a[i][art] = 1.0;
                    basis[i] = art;
                    art += 1;
                }
            }
        }
        let orig = a.iter().map(|r| r[..n_struct_slack].to_vec()).collect();
        let orig_rhs = rhs.clone();
        Tableau { tol, m, ncols, n_struct_slack, a, rhs, basis, origin: (0..m).collect(), orig, orig_rhs }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let inv = 1.0 / self.a[r][c];
        self.a[r].iter_mut().for_each(|v| *v *= inv);
        self.rhs[r] *= inv;
        self.a[r][c] = 1.0;
        let pivot_row = self.a[r].clone();
        let pivot_rhs = self.rhs[r];
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let f = self.a[i][c];
            if f != 0.0 {
                for (v, &p) in self.a[i].iter_mut().zip(&pivot_row) {
                    *v -= f * p;
                }
                self.a[i][c] = 0.0;
                self.rhs[i] -= f * pivot_rhs;
                if self.rhs[i] < 0.0 && self.rhs[i] > -self.tol {
                    self.rhs[i] = 0.0;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Minimise `cost . x` over columns `< allowed`. Returns false if unbounded.
    fn optimise(&mut self, cost: &[f64], allowed: usize) -> bool {
        loop {
            // reduced costs d_j = c_j - c_B . column_j
            let mut entering = None;
            for j in 0..allowed {
                if self.basis.contains(&j) {
                    continue;
                }
                let mut d = cost[j];
                for i in 0..self.m {
                    d -= cost[self.basis[i]] * self.a[i][j];
                }
                if d < -self.tol {
                    entering = Some(j);
                    break;
                }
            }
            let Some(c) = entering else { return true };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.m {
                let aic = self.a[i][c];
                if aic > self.tol {
                    let ratio = self.rhs[i] / aic;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((li, lr)) => {
                            if ratio < lr - self.tol || (ratio <= lr + self.tol && self.basis[i] < self.basis[li]) {
                                Some((i, ratio))
                            } else {
                                Some((li, lr))
                            }
                        }
                    };
                }
            }
            match leave {
                None => return false,
                Some((r, _)) => self.pivot(r, c),
            }
        }
    }

    fn run(mut self, p: &Problem) -> Outcome {
        // phase one
        let mut cost = vec![0.0; self.ncols];
        cost[self.n_struct_slack..].iter_mut().for_each(|c| *c = 1.0);
        self.optimise(&cost, self.ncols);
        let infeas: f64 = (0..self.m).filter(|&i| self.basis[i] >= self.n_struct_slack).map(|i| self.rhs[i]).sum();
        let scale = self.orig_rhs.iter().fold(1.0f64, |m, &v| m.max(v));
        if infeas > self.tol * scale {
            return Outcome::Infeasible;
        }
        // drive artificials out of the basis, dropping redundant rows
        let mut i = 0;
        while i < self.m {
            if self.basis[i] >= self.n_struct_slack {
                let col = (0..self.n_struct_slack).find(|&j| self.a[i][j].abs() > self.tol && !self.basis.contains(&j));
                match col {
                    Some(j) => {
                        self.pivot(i, j);
                        i += 1;
                    }
                    None => {
                        self.a.remove(i);
                        self.rhs.remove(i);
                        self.basis.remove(i);
                        self.origin.remove(i);
                        self.m -= 1;
                    }
                }
            } else {
                i += 1;
            }
        }
        // phase two
        let mut cost = vec![0.0; self.ncols];
        for j in 0..p.n {
            cost[j] = -p.objective[j];
        }
        if !self.optimise(&cost, self.n_struct_slack) {
            return Outcome::Unbounded;
        }
        let x = self.refined_solution(p.n);
        let value = p.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
        Outcome::Optimal { x, value }
    }

    /// Solve `B x_B = b` on the original rows kept in the final basis.
    fn refined_solution(&self, n: usize) -> Vec<f64> {
        let m = self.m;
        let mut mat: Vec<Vec<f64>> = (0..m)
            .map(|r| {
                let row = &self.orig[self.origin[r]];
                let mut v: Vec<f64> = self.basis.iter().map(|&c| row[c]).collect();
                v.push(self.orig_rhs[self.origin[r]]);
                v
            })
            .collect();
        let mut full = vec![0.0; self.n_struct_slack];
        let fallback = || {
            let mut x = vec![0.0; self.n_struct_slack];
            for (i, &b) in self.basis.iter().enumerate() {
                x[b] = self.rhs[i];
            }
            x
        };
        for col in 0..m {
            let piv = (col..m).max_by(|&a, &b| mat[a][col].abs().total_cmp(&mat[b][col].abs())).unwrap();
            if mat[piv][col].abs() < 1e-14 {
                full = fallback();
                return full[..n].to_vec();
            }
            mat.swap(col, piv);
            for r in 0..m {
                if r != col {
                    let f = mat[r][col] / mat[col][col];
                    if f != 0.0 {
                        for k in col..=m {
                            mat[r][k] -= f * mat[col][k];
                        }
                    }
                }
            }
        }
        for (i, &b) in self.basis.iter().enumerate() {
            full[b] = mat[i][m] / mat[i][i];
        }
        full.truncate(n);
        full
    }
}
