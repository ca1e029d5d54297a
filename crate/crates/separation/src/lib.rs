//! Hyperplane-separation certificates found by linear feasibility.
//!
//! A majority weight vector for a Boolean pair `(P, Q)` and a forbidden
//! tuple `b` is `w` with `||w||_1 = 1`, `b_i w_i <= 0` and `<a, w> >= 0`
//! for every `a` in `P` (tuples read as `+-1`). A separating matrix for the
//! argmax rounding function has zero row sums, nonpositive sums over every
//! subset of a row containing `b_i`, and nonnegative pairing with the
//! one-hot encoding of every tuple of `P`.

use linprog::{Cmp, Outcome, Problem};
use pcsp_core::{pm, PromisePair, Template, Tuple};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Slack allowed on the sign and pairing conditions of a certificate.
pub const CERT_TOL: f64 = 1e-12;
/// Slack allowed on the l1 normalization.
pub const NORM_TOL: f64 = 1e-9;
/// Largest domain for argmax certificates.
pub const MAX_DOMAIN: usize = 8;
/// Largest number of candidate tuples `|A|^k` per pair.
pub const MAX_TUPLES: usize = 4096;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SepError {
    #[error("tuple {0:?} lies in the weak relation")]
    InWeak(Tuple),
    #[error("tuple {b:?} does not fit a pair of arity {arity} over {domain} elements")]
    BadTuple { b: Tuple, arity: usize, domain: usize },
    #[error("majority weights need a Boolean pair")]
    NotBoolean,
    #[error("argmax certificates need a single domain")]
    NotSameDomain,
    #[error("domain of size {0} exceeds the limit of {MAX_DOMAIN}")]
    DomainTooLarge(usize),
    #[error("{0} candidate tuples exceed the limit of {MAX_TUPLES}")]
    Budget(usize),
    #[error("LP solution failed verification: {0}")]
    Numerical(String),
    #[error("malformed certificate: {0}")]
    Malformed(String),
}

pub type Result<T> = std::result::Result<T, SepError>;

#[derive(Clone, Debug, PartialEq)]
pub struct WeightVector {
    pub w: Vec<f64>,
    pub b: Tuple,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeightMatrix {
    /// `k` rows of `|A|` entries.
    pub w: Vec<Vec<f64>>,
    pub b: Tuple,
}

fn check_target(pair: &PromisePair, b: &[usize]) -> Result<()> {
    let (k, q) = (pair.arity(), pair.strong.domain());
    if b.len() != k || b.iter().any(|&e| e >= q) {
        return Err(SepError::BadTuple { b: b.to_vec(), arity: k, domain: q });
    }
    if pair.weak.contains(b) {
        return Err(SepError::InWeak(b.to_vec()));
    }
    Ok(())
}

fn is_boolean(pair: &PromisePair) -> bool {
    pair.strong.domain() == 2 && pair.weak.domain() == 2
}

/// Solve for majority weights. The sign condition is built in by writing
/// `w_i = -b_i y_i` with `y >= 0` and `sum y = 1`.
pub fn find_majority_weights(pair: &PromisePair, b: &[usize]) -> Result<Option<WeightVector>> {
    if !is_boolean(pair) {
        return Err(SepError::NotBoolean);
    }
    check_target(pair, b)?;
    let k = pair.arity();
    let sb: Vec<f64> = b.iter().map(|&e| pm(e)).collect();
    let mut lp = Problem::new(k);
    lp.add_row(vec![1.0; k], Cmp::Eq, 1.0);
    for a in pair.strong.tuples() {
        lp.add_row((0..k).map(|i| -pm(a[i]) * sb[i]).collect(), Cmp::Ge, 0.0);
    }
    let y = match lp.solve() {
        Outcome::Optimal { x, .. } => normalize(x, 1.0),
        Outcome::Infeasible => return Ok(None),
        Outcome::Unbounded => return Err(SepError::Numerical("feasibility LP reported unbounded".into())),
    };
    let wv = WeightVector { w: y.iter().zip(&sb).map(|(y, s)| -s * y).collect(), b: b.to_vec() };
    wv.verify(pair).map_err(SepError::Numerical)?;
    Ok(Some(wv))
}

fn normalize(mut y: Vec<f64>, total: f64) -> Vec<f64> {
    for v in &mut y {
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    let s: f64 = y.iter().sum();
    y.iter_mut().for_each(|v| *v *= total / s);
    y
}

impl WeightVector {
    /// Check every defining condition; the error names the first failure.
    pub fn verify(&self, pair: &PromisePair) -> std::result::Result<(), String> {
        if self.w.len() != pair.arity() || self.b.len() != pair.arity() {
            return Err("length does not match the pair arity".into());
        }
        if self.w.iter().any(|v| !v.is_finite()) {
            return Err("non-finite weight".into());
        }
        let l1: f64 = self.w.iter().map(|v| v.abs()).sum();
        if (l1 - 1.0).abs() > NORM_TOL {
            return Err(format!("l1 norm {l1}"));
        }
        for (i, (&wi, &bi)) in self.w.iter().zip(&self.b).enumerate() {
            if pm(bi) * wi > CERT_TOL {
                return Err(format!("sign condition fails at coordinate {i}"));
            }
        }
        for a in pair.strong.tuples() {
            let s: f64 = a.iter().zip(&self.w).map(|(&e, w)| pm(e) * w).sum();
            if s < -CERT_TOL {
                return Err(format!("pairing with {a:?} is {s}"));
            }
        }
        Ok(())
    }

    /// The equivalent argmax matrix with rows `(-w_i/2, w_i/2)`.
    pub fn to_matrix(&self) -> WeightMatrix {
        WeightMatrix { w: self.w.iter().map(|&v| vec![-v / 2.0, v / 2.0]).collect(), b: self.b.clone() }
    }
}

/// Solve for an argmax separating matrix. With zero row sums the subset
/// conditions say exactly that `W_{i,a} >= 0` for `a != b_i`, so those
/// entries are the LP variables and `W_{i,b_i}` is minus their sum.
pub fn find_argmax_separating_matrix(pair: &PromisePair, b: &[usize]) -> Result<Option<WeightMatrix>> {
    let q = pair.strong.domain();
    if pair.weak.domain() != q {
        return Err(SepError::NotSameDomain);
    }
    if q > MAX_DOMAIN {
        return Err(SepError::DomainTooLarge(q));
    }
    check_target(pair, b)?;
    let k = pair.arity();
    // variable index of W_{i,a}, a != b_i
    let var = |i: usize, a: usize| i * (q - 1) + if a < b[i] { a } else { a - 1 };
    let n = k * (q - 1);
    let mut lp = Problem::new(n);
    lp.add_row(vec![1.0; n], Cmp::Eq, 0.5);
    for a in pair.strong.tuples() {
        let mut row = vec![0.0; n];
        for i in 0..k {
            if a[i] == b[i] {
                for c in (0..q).filter(|&c| c != b[i]) {
                    row[var(i, c)] -= 1.0;
                }
            } else {
                row[var(i, a[i])] += 1.0;
            }
        }
        lp.add_row(row, Cmp::Ge, 0.0);
    }
    let y = match lp.solve() {
        Outcome::Optimal { x, .. } => normalize(x, 0.5),
        Outcome::Infeasible => return Ok(None),
        Outcome::Unbounded => return Err(SepError::Numerical("feasibility LP reported unbounded".into())),
    };
    let w = (0..k)
        .map(|i| {
            let mut row = vec![0.0; q];
            for c in (0..q).filter(|&c| c != b[i]) {
                row[c] = y[var(i, c)];
            }
            row[b[i]] = -(0..q).filter(|&c| c != b[i]).map(|c| row[c]).sum::<f64>();
            row
        })
        .collect();
    let wm = WeightMatrix { w, b: b.to_vec() };
    wm.verify(pair).map_err(SepError::Numerical)?;
    Ok(Some(wm))
}

impl WeightMatrix {
    /// `Frob(W, Pi_a)` for a tuple `a`.
    pub fn pairing(&self, a: &[usize]) -> f64 {
        self.w.iter().zip(a).map(|(row, &e)| row[e]).sum()
    }

    /// `Frob(W, M)` for an arbitrary `k x |A|` matrix.
    pub fn frobenius(&self, m: &[Vec<f64>]) -> f64 {
        self.w.iter().zip(m).map(|(r, s)| r.iter().zip(s).map(|(x, y)| x * y).sum::<f64>()).sum()
    }

    /// Check every defining condition, including each of the
    /// `2^(|A|-1)` subset sums per row.
    pub fn verify(&self, pair: &PromisePair) -> std::result::Result<(), String> {
        let (k, q) = (pair.arity(), pair.strong.domain());
        if self.w.len() != k || self.b.len() != k || self.w.iter().any(|r| r.len() != q) {
            return Err("shape does not match the pair".into());
        }
        if self.b.iter().any(|&e| e >= q) {
            return Err("target tuple out of range".into());
        }
        if self.w.iter().flatten().any(|v| !v.is_finite()) {
            return Err("non-finite entry".into());
        }
        let l1: f64 = self.w.iter().flatten().map(|v| v.abs()).sum();
        if (l1 - 1.0).abs() > NORM_TOL {
            return Err(format!("l1 norm {l1}"));
        }
        for (i, row) in self.w.iter().enumerate() {
            let s: f64 = row.iter().sum();
            if s.abs() > CERT_TOL {
                return Err(format!("row {i} sums to {s}"));
            }
            let bi = self.b[i];
            for mask in 0..1usize << q {
                if mask >> bi & 1 == 0 {
                    continue;
                }
                let sub: f64 = (0..q).filter(|&c| mask >> c & 1 == 1).map(|c| row[c]).sum();
                if sub > CERT_TOL {
                    return Err(format!("row {i} subset {mask:#b} sums to {sub}"));
                }
            }
        }
        for a in pair.strong.tuples() {
            let s = self.pairing(a);
            if s < -CERT_TOL {
                return Err(format!("pairing with {a:?} is {s}"));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CertificateEntry {
    pub pair: usize,
    pub matrix: WeightMatrix,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SeparabilityCertificate {
    pub entries: Vec<CertificateEntry>,
    /// Conservativity constant of argmax, `1/|A|`.
    pub alpha: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Certification {
    Separable(SeparabilityCertificate),
    Inseparable { pair: usize, b: Tuple },
}

/// Run the argmax LP for every pair and every tuple outside its weak
/// relation, stopping at the first inseparable one.
pub fn certify_separable(template: &Template) -> Result<Certification> {
    if !template.domain.is_same_domain() {
        return Err(SepError::NotSameDomain);
    }
    let q = template.domain.size_a;
    if q > MAX_DOMAIN {
        return Err(SepError::DomainTooLarge(q));
    }
    for p in &template.pairs {
        let count = q.checked_pow(p.arity() as u32).unwrap_or(usize::MAX);
        if count > MAX_TUPLES {
            return Err(SepError::Budget(count));
        }
    }
    let mut entries = Vec::new();
    for (pi, p) in template.pairs.iter().enumerate() {
        for b in p.weak.complement() {
            match find_argmax_separating_matrix(p, &b)? {
                Some(matrix) => entries.push(CertificateEntry { pair: pi, matrix }),
                None => return Ok(Certification::Inseparable { pair: pi, b }),
            }
        }
    }
    Ok(Certification::Separable(SeparabilityCertificate { entries, alpha: 1.0 / q as f64 }))
}

/// On-disk form of one certificate. Majority weight vectors are stored as a
/// single-column matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateRecord {
    pub pair: usize,
    pub b: Vec<usize>,
    #[serde(rename = "W")]
    pub w: Vec<Vec<f64>>,
}

impl From<&CertificateEntry> for CertificateRecord {
    fn from(e: &CertificateEntry) -> Self {
        CertificateRecord { pair: e.pair, b: e.matrix.b.clone(), w: e.matrix.w.clone() }
    }
}

impl CertificateRecord {
    pub fn from_vector(pair: usize, v: &WeightVector) -> Self {
        CertificateRecord { pair, b: v.b.clone(), w: v.w.iter().map(|&x| vec![x]).collect() }
    }
}

/// Parse a JSON array of certificate records, checking shapes only.
pub fn parse_certificates(bytes: &[u8]) -> Result<Vec<CertificateRecord>> {
    let recs: Vec<CertificateRecord> = serde_json::from_slice(bytes).map_err(|e| SepError::Malformed(e.to_string()))?;
    for r in &recs {
        if r.w.len() != r.b.len() {
            return Err(SepError::Malformed(format!("{} rows for a tuple of length {}", r.w.len(), r.b.len())));
        }
        let width = r.w.first().map_or(0, Vec::len);
        if width == 0 || r.w.iter().any(|row| row.len() != width) {
            return Err(SepError::Malformed("rows must be nonempty and of equal length".into()));
        }
    }
    Ok(recs)
}

pub fn serialize_certificates(recs: &[CertificateRecord]) -> Vec<u8> {
    serde_json::to_vec_pretty(recs).expect("certificates serialize")
}

#[cfg(test)]
mod tests {
    use super::*;
    use pcsp_core::zoo;

    #[test]
    fn two_sat_weights() {
        let t = zoo::two_sat();
        let w = find_majority_weights(&t.pairs[0], &[0, 0]).unwrap().unwrap();
        assert!((w.w[0] - 0.5).abs() < 1e-12 && (w.w[1] - 0.5).abs() < 1e-12);
        assert_eq!(find_majority_weights(&t.pairs[0], &[1, 1]), Err(SepError::InWeak(vec![1, 1])));
    }

    #[test]
    fn one_in_three_all_false_is_inseparable() {
        let p = &zoo::one_in_three_vs_nae().pairs[0];
        assert_eq!(find_majority_weights(p, &[0, 0, 0]).unwrap(), None);
        assert_eq!(find_argmax_separating_matrix(p, &[0, 0, 0]).unwrap(), None);
    }

    #[test]
    fn equality_matrix() {
        let p = &zoo::equality(2).pairs[0];
        let m = find_argmax_separating_matrix(p, &[0, 1]).unwrap().unwrap();
        let expect = [[-0.25, 0.25], [0.25, -0.25]];
        for (r, e) in m.w.iter().zip(expect) {
            for (x, y) in r.iter().zip(e) {
                assert!((x - y).abs() < 1e-12);
            }
        }
        assert!(find_argmax_separating_matrix(p, &[1, 1]).is_err());
    }

    #[test]
    fn record_round_trip() {
        let p = &zoo::two_sat().pairs[0];
        let w = find_majority_weights(p, &[0, 0]).unwrap().unwrap();
        let recs = vec![CertificateRecord::from_vector(0, &w)];
        assert_eq!(parse_certificates(&serialize_certificates(&recs)).unwrap(), recs);
        assert!(parse_certificates(br#"[{"pair":0,"b":[0],"W":[[1.0],[2.0]]}]"#).is_err());
        assert!(parse_certificates(br#"[{"pair":0,"b":[0],"W":[[1.0]],"x":1}]"#).is_err());
    }
}

/// Vector solutions realizing a local distribution exactly.
pub mod soundness {
    use pcsp_core::{all_tuples, pm};

    /// Vectors indexed by `{+-1}^k` with `v0 = (sqrt mu(a))_a` and
    /// `v_i = (a_i sqrt mu(a))_a`, so `<v_i, v0> = E a_i` and
    /// `<v_i, v_j> = E a_i a_j`. `mu` is indexed in lexicographic tuple order.
    pub fn moment_vectors(k: usize, mu: &[f64]) -> (Vec<f64>, Vec<Vec<f64>>) {
        let v0: Vec<f64> = mu.iter().map(|m| m.max(0.0).sqrt()).collect();
        let tuples: Vec<_> = all_tuples(k, 2).collect();
        let vs = (0..k).map(|i| tuples.iter().zip(&v0).map(|(a, s)| pm(a[i]) * s).collect()).collect();
        (v0, vs)
    }

    fn dot(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| x * y).sum()
    }

    /// `(sum w_i <v_i, v0>, <u, u>, <u, v0>)` with `u = sum w_i v_i`.
    pub fn weighted_moments(w: &[f64], v0: &[f64], vs: &[Vec<f64>]) -> (f64, f64, f64) {
        let mut u = vec![0.0; v0.len()];
        for (wi, v) in w.iter().zip(vs) {
            for (x, y) in u.iter_mut().zip(v) {
                *x += wi * y;
            }
        }
        let first: f64 = w.iter().zip(vs).map(|(wi, v)| wi * dot(v, v0)).sum();
        (first, dot(&u, &u), dot(&u, v0))
    }
}
