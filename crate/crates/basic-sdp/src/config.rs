use crate::problem::Encoding;
use crate::solution::GramSolution;
use crate::{sym_eigen, Result, SdpError};
use rand::Rng;
use rand_distr::StandardNormal;

/// Vectors `v_0` and `v_{x,a}` for every variable `x` and element `a`.
#[derive(Clone, Debug, PartialEq)]
pub struct GlobalConfiguration {
    pub dim: usize,
    pub n_vars: usize,
    pub size_a: usize,
    pub v0: Vec<f64>,
    /// `vectors[x * size_a + a]`.
    pub vectors: Vec<Vec<f64>>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl GlobalConfiguration {
    pub fn vector(&self, x: usize, a: usize) -> &[f64] {
        &self.vectors[x * self.size_a + a]
    }

    /// `v_{x,1} - v_{x,0}`, the `+-1` vector of a Boolean variable.
    pub fn pm_vector(&self, x: usize) -> Vec<f64> {
        self.vector(x, 1).iter().zip(self.vector(x, 0)).map(|(a, b)| a - b).collect()
    }

    /// `Mat(V|_Y)`: Gram matrix of `v_{y,a}` over `y` in `vars`, `a` in `A`,
    /// row-major with index `t * |A| + a` for the `t`-th variable.
    pub fn local_gram(&self, vars: &[usize]) -> Vec<f64> {
        let q = self.size_a;
        let s = vars.len() * q;
        let mut m = vec![0.0; s * s];
        for r in 0..s {
            for c in r..s {
                let d = dot(self.vector(vars[r / q], r % q), self.vector(vars[c / q], c % q));
                m[r * s + c] = d;
                m[c * s + r] = d;
            }
        }
        m
    }

    /// `Mat(V)` over all variables.
    pub fn gram(&self) -> Vec<f64> {
        self.local_gram(&(0..self.n_vars).collect::<Vec<_>>())
    }

    /// Largest deviation from the local-configuration identities
    /// `<v_{x,a}, v_{x,a'}> = 0` for `a != a'` and `sum_a v_{x,a} = v_0`,
    /// and from `|v_0| = 1`.
    pub fn defect(&self) -> f64 {
        let q = self.size_a;
        let mut worst = (dot(&self.v0, &self.v0) - 1.0).abs();
        for x in 0..self.n_vars {
            for a in 0..q {
                for b in a + 1..q {
                    worst = worst.max(dot(self.vector(x, a), self.vector(x, b)).abs());
                }
            }
            for (i, v) in self.v0.iter().enumerate() {
                let s: f64 = (0..q).map(|a| self.vector(x, a)[i]).sum();
                worst = worst.max((s - v).abs());
            }
        }
        worst
    }
}

/// Factor the Gram matrix: clip negative eigenvalues, drop null directions
/// and return the rows of `Q sqrt(Lambda)`. Boolean solutions in the `+-1`
/// form become `v_{x,1} = (v_0 + v_x)/2`, `v_{x,0} = (v_0 - v_x)/2`.
pub fn extract_vectors(sol: &GramSolution, n_vars: usize, size_a: usize) -> Result<GlobalConfiguration> {
    let enc = Encoding::for_domain(size_a);
    let expect = match enc {
        Encoding::PlusMinus => 1 + n_vars,
        Encoding::OneHot => 1 + n_vars * size_a,
    };
    if sol.dim != expect {
        return Err(SdpError::Shape(format!("gram side {}, expected {expect}", sol.dim)));
    }
    let rows = factor_psd(sol.dim, &sol.gram)?;
    let v0 = rows[0].clone();
    let vectors = match enc {
        Encoding::PlusMinus => (0..n_vars)
            .flat_map(|x| {
                let vx = &rows[1 + x];
                let minus: Vec<f64> = v0.iter().zip(vx).map(|(a, b)| (a - b) / 2.0).collect();
                let plus: Vec<f64> = v0.iter().zip(vx).map(|(a, b)| (a + b) / 2.0).collect();
                [minus, plus]
            })
            .collect(),
        Encoding::OneHot => rows[1..].to_vec(),
    };
    Ok(GlobalConfiguration { dim: v0.len(), n_vars, size_a, v0, vectors })
}

/// Rows of `Q sqrt(max(Lambda, 0))` with null directions dropped, so that
/// `gram[i][j] = <rows[i], rows[j]>` up to the clipped eigenvalues.
/// Fails on an eigenvalue below `-1e-5`.
pub fn factor_psd(n: usize, gram: &[f64]) -> Result<Vec<Vec<f64>>> {
    if gram.len() != n * n {
        return Err(SdpError::Shape(format!("{} entries for side {n}", gram.len())));
    }
    let (vals, vecs) = sym_eigen(n, gram)?;
    if let Some(&m) = vals.first() {
        if m < -1e-5 {
            return Err(SdpError::NotPsd(m));
        }
    }
    let keep: Vec<usize> = (0..n).filter(|&k| vals[k] > 0.0).collect();
    Ok((0..n).map(|i| keep.iter().map(|&k| vecs[k * n + i] * vals[k].sqrt()).collect()).collect())
}

fn gaussian(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

/// Gram-Schmidt `v` against `basis` (orthonormal) and normalize.
fn orthonormalize(mut v: Vec<f64>, basis: &[Vec<f64>]) -> Vec<f64> {
    for _ in 0..2 {
        for b in basis {
            let d = dot(&v, b);
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= d * y);
        }
    }
    let n = dot(&v, &v).sqrt();
    v.iter_mut().for_each(|x| *x /= n);
    v
}

/// A random valid configuration in `R^dim` (`dim >= size_a`) with
/// `v_0 = e_0`. For each variable, pick an orthonormal frame
/// `h_1 = v_0, h_2, ..., h_|A|` and a random orthogonal `O`, and set
/// `v_{x,a} = O_{a,1} sum_j O_{a,j} h_j`. The rows of `O h` are orthonormal,
/// so the vectors are orthogonal, and they sum to `h_1 = v_0`. Frames of
/// different variables share the ambient space, which correlates them.
pub fn random_configuration(n_vars: usize, size_a: usize, dim: usize, rng: &mut impl Rng) -> GlobalConfiguration {
    assert!(dim >= size_a && size_a >= 1);
    let mut v0 = vec![0.0; dim];
    v0[0] = 1.0;
    let mut vectors = Vec::with_capacity(n_vars * size_a);
    for _ in 0..n_vars {
        let mut frame = vec![v0.clone()];
        while frame.len() < size_a {
            let h = orthonormalize(gaussian(rng, dim), &frame);
            frame.push(h);
        }
        let mut o: Vec<Vec<f64>> = Vec::new();
        while o.len() < size_a {
            let r = orthonormalize(gaussian(rng, size_a), &o);
            o.push(r);
        }
        for row in &o {
            let mut v = vec![0.0; dim];
            for (j, h) in frame.iter().enumerate() {
                v.iter_mut().zip(h).for_each(|(x, y)| *x += row[0] * row[j] * y);
            }
            vectors.push(v);
        }
    }
    GlobalConfiguration { dim, n_vars, size_a, v0, vectors }
}
