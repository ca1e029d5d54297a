use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use pcsp_core::{rng, zoo, Clause, DomainPair, Instance, Literal, Template};
use rand::Rng;
use rand_distr::StandardNormal;
use sha2::{Digest, Sha256};

use crate::{Coeffs, GapError, GapParams, Result};

/// Which distribution a constraint was drawn from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Class {
    /// `T'_x` with `x = 1 - 2^{-k}`; the triple sums to `v0`.
    Pos(u32),
    /// `T'_{-x}`; the triple sums to `-v0`.
    Neg(u32),
    /// `(v0, v0, p)` with `p` from `A'_{-x0}`.
    AnchorPlus,
    /// `(-v0, -v0, p)` with `p` from `A'_{x0}`.
    AnchorMinus,
}

impl Class {
    /// Whether the nominal triple sums to `+v0`. Those triples carry the
    /// 1-in-3 constraint on their negations.
    pub fn sums_to_v0(&self) -> bool {
        matches!(self, Class::Pos(_) | Class::AnchorPlus)
    }

    pub fn is_anchor(&self) -> bool {
        matches!(self, Class::AnchorPlus | Class::AnchorMinus)
    }
}

impl fmt::Display for Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Class::Pos(k) => write!(f, "pos:{k}"),
            Class::Neg(k) => write!(f, "neg:{k}"),
            Class::AnchorPlus => f.write_str("anchor+"),
            Class::AnchorMinus => f.write_str("anchor-"),
        }
    }
}

impl FromStr for Class {
    type Err = GapError;

    fn from_str(s: &str) -> Result<Self> {
        let level = |k: &str| k.parse::<u32>().ok().filter(|&k| k >= 1);
        match s {
            "anchor+" => Ok(Class::AnchorPlus),
            "anchor-" => Ok(Class::AnchorMinus),
            _ => match s.split_once(':') {
                Some(("pos", k)) if level(k).is_some() => Ok(Class::Pos(level(k).unwrap())),
                Some(("neg", k)) if level(k).is_some() => Ok(Class::Neg(level(k).unwrap())),
                _ => Err(GapError::Params(format!("unknown class tag {s:?}"))),
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Discard {
    Norm,
    Dot,
}

impl fmt::Display for Discard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Discard::Norm => "norm",
            Discard::Dot => "dot",
        })
    }
}

/// One position of a constraint: the fixed point `±v0` or a region center.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Slot {
    V0 { sign: i8 },
    Center(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct GapConstraint {
    pub class: Class,
    pub discard: Option<Discard>,
    pub slots: [Slot; 3],
}

impl GapConstraint {
    /// Sign of each literal of the emitted clause, taking the point `-v0`
    /// as the negated literal of the `v0` variable.
    pub fn literal_signs(&self) -> [i8; 3] {
        let sigma = if self.class.sums_to_v0() { -1 } else { 1 };
        self.slots.map(|s| match s {
            Slot::V0 { sign } => sigma * sign,
            Slot::Center(_) => sigma,
        })
    }
}

/// The regenerated, undiscretized vectors of one constraint.
#[derive(Clone, Debug)]
pub struct RawTriple {
    pub class: Class,
    pub w: Vec<f64>,
    pub u: Option<Vec<f64>>,
    /// Points in `R^{d+1}`, `v0` last.
    pub points: [Vec<f64>; 3],
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Source {
    Sentinel,
    Seen { constraint: usize, slot: usize },
}

#[derive(Clone, Debug)]
pub struct GapInstance {
    pub params: GapParams,
    pub constraints: Vec<GapConstraint>,
    /// Folded (1-in-3, NAE); variable 0 is `v0`, center `c` is variable `c + 1`.
    pub template: Template,
    pub instance: Instance,
    sources: Vec<Source>,
    index: HashMap<[u8; 16], usize>,
}

type Key = [u8; 16];

fn cell_key(cell: &[i64]) -> Key {
    let mut h = Sha256::new();
    for c in cell {
        h.update(c.to_le_bytes());
    }
    let digest = h.finalize();
    let mut key = [0u8; 16];
    key.copy_from_slice(&digest[..16]);
    key
}

const SENTINEL_KEY: Key = [0xff; 16];

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl GapInstance {
    pub fn dim(&self) -> usize {
        self.params.dim
    }

    pub fn n_centers(&self) -> usize {
        self.sources.len()
    }

    /// `±v0` in `R^{d+1}`.
    pub fn v0(&self, sign: f64) -> Vec<f64> {
        let mut v = vec![0.0; self.params.dim + 1];
        v[self.params.dim] = sign;
        v
    }

    /// Regenerate the raw vectors of constraint `i`.
    pub fn raw(&self, i: usize) -> RawTriple {
        draw(&self.params, i).1
    }

    /// Cell of a point, or `None` when it lies outside the radius-2 ball.
    fn cell(&self, p: &[f64]) -> Option<Vec<i64>> {
        if norm2(p) > 4.0 {
            return None;
        }
        let h = self.params.spacing();
        Some(p.iter().map(|x| (x / h).round() as i64).collect())
    }

    fn sentinel(&self) -> Vec<f64> {
        self.v0(3.0)
    }

    /// Region center of a point.
    pub fn discretize(&self, p: &[f64]) -> Vec<f64> {
        let h = self.params.spacing();
        match self.cell(p) {
            Some(c) => c.iter().map(|&q| q as f64 * h).collect(),
            None => self.sentinel(),
        }
    }

    /// Center id of a point, if its region holds any sampled point.
    pub fn locate(&self, p: &[f64]) -> Option<usize> {
        let key = self.cell(p).map_or(SENTINEL_KEY, |c| cell_key(&c));
        self.index.get(&key).copied()
    }

    /// Vectors at the three positions after discretization.
    pub fn discretized(&self, raw: &RawTriple, c: &GapConstraint) -> [Vec<f64>; 3] {
        std::array::from_fn(|i| match c.slots[i] {
            Slot::V0 { sign } => self.v0(sign as f64),
            Slot::Center(_) => self.discretize(&raw.points[i]),
        })
    }

    /// Unit vectors summing exactly to `±v0` next to the raw triple: the
    /// formulas with `w/‖w‖` and the part of `u` orthogonal to `w`, normalized.
    pub fn nominal(&self, raw: &RawTriple) -> [Vec<f64>; 3] {
        let d = self.params.dim;
        let lift = |v0: f64, scale: f64, dir: &[f64]| {
            let mut p: Vec<f64> = dir.iter().map(|x| scale * x).collect();
            p.push(v0);
            p
        };
        let zero = vec![0.0; d];
        match raw.class {
            Class::AnchorPlus => [lift(1.0, 0.0, &zero), lift(1.0, 0.0, &zero), lift(-1.0, 0.0, &zero)],
            Class::AnchorMinus => [lift(-1.0, 0.0, &zero), lift(-1.0, 0.0, &zero), lift(1.0, 0.0, &zero)],
            Class::Pos(k) | Class::Neg(k) => {
                let c = Coeffs::for_level(k);
                let b = if matches!(raw.class, Class::Pos(_)) { 1.0 } else { -1.0 };
                let nw = norm2(&raw.w).sqrt();
                let w: Vec<f64> = raw.w.iter().map(|x| x / nw).collect();
                let u = raw.u.as_ref().expect("T' triples draw u");
                let uw = dot(u, &w);
                let mut u: Vec<f64> = u.iter().zip(&w).map(|(a, b)| a - uw * b).collect();
                let nu = norm2(&u).sqrt();
                u.iter_mut().for_each(|x| *x /= nu);
                triple(b, &c, &w, &u)
            }
        }
    }

    /// Coordinates of center `id`.
    pub fn center(&self, id: usize) -> Vec<f64> {
        match self.sources[id] {
            Source::Sentinel => self.sentinel(),
            Source::Seen { constraint, slot } => self.discretize(&self.raw(constraint).points[slot]),
        }
    }

    /// Visit every center once, in id order, regenerating each constraint at
    /// most once.
    pub fn for_each_center(&self, mut f: impl FnMut(usize, &[f64])) {
        let mut next = 0;
        for (i, c) in self.constraints.iter().enumerate() {
            let fresh = c.slots.iter().any(|s| matches!(s, Slot::Center(id) if *id >= next));
            if !fresh {
                continue;
            }
            let raw = self.raw(i);
            for (j, s) in c.slots.iter().enumerate() {
                if let Slot::Center(id) = *s {
                    if id == next {
                        f(id, &self.discretize(&raw.points[j]));
                        next += 1;
                    }
                }
            }
        }
        debug_assert_eq!(next, self.n_centers());
    }

    /// Fraction of sampled constraints that were discarded.
    pub fn discard_fraction(&self) -> f64 {
        self.constraints.iter().filter(|c| c.discard.is_some()).count() as f64 / self.constraints.len() as f64
    }
}

fn triple(b: f64, c: &Coeffs, w: &[f64], u: &[f64]) -> [Vec<f64>; 3] {
    let g = c.beta * c.gamma();
    let p = |v0: f64, cw: f64, cu: f64| {
        let mut p: Vec<f64> = w.iter().zip(u).map(|(x, y)| cw * x + cu * y).collect();
        p.push(v0);
        p
    };
    [p(b * c.x, -c.alpha / 2.0, g), p(b * c.x, -c.alpha / 2.0, -g), p(b * (1.0 - 2.0 * c.x), c.alpha, 0.0)]
}

fn gaussian(d: usize, r: &mut impl Rng) -> Vec<f64> {
    let s = 1.0 / (d as f64).sqrt();
    (0..d).map(|_| s * r.sample::<f64, _>(StandardNormal)).collect()
}

/// Class, raw vectors and discard flag of constraint `i`.
fn draw(p: &GapParams, i: usize) -> (Option<Discard>, RawTriple) {
    let d = p.dim;
    let k0 = p.k0();
    let mut r = rng::stream(p.seed, i as u64);
    let j = r.random_range(0..2 * k0 + 2);
    let class = if j < k0 {
        Class::Pos(j + 1)
    } else if j < 2 * k0 {
        Class::Neg(j - k0 + 1)
    } else if j == 2 * k0 {
        Class::AnchorMinus
    } else {
        Class::AnchorPlus
    };
    let w = gaussian(d, &mut r);
    let tol = p.discard_tol();
    let off = |v: &[f64]| (norm2(v) - 1.0).abs() > tol;
    let mut discard = off(&w).then_some(Discard::Norm);
    let (u, points) = match class {
        Class::Pos(k) | Class::Neg(k) => {
            let u = gaussian(d, &mut r);
            if discard.is_none() {
                discard = if off(&u) {
                    Some(Discard::Norm)
                } else if dot(&w, &u).abs() > tol {
                    Some(Discard::Dot)
                } else {
                    None
                };
            }
            let b = if matches!(class, Class::Pos(_)) { 1.0 } else { -1.0 };
            let pts = triple(b, &Coeffs::for_level(k), &w, &u);
            (Some(u), pts)
        }
        Class::AnchorPlus | Class::AnchorMinus => {
            let c = Coeffs::for_level(k0);
            let b = if class == Class::AnchorPlus { 1.0 } else { -1.0 };
            let v0 = |s: f64| {
                let mut v = vec![0.0; d + 1];
                v[d] = s;
                v
            };
            let mut q: Vec<f64> = w.iter().map(|x| c.beta * x).collect();
            q.push(-b * c.x);
            (None, [v0(b), v0(b), q])
        }
    };
    (discard, RawTriple { class, w, u, points })
}

/// Sample the gap instance.
pub fn sample_gap_instance(params: &GapParams) -> Result<GapInstance> {
    params.validate()?;
    let template = folded_template()?;
    let mut inst = GapInstance {
        params: *params,
        constraints: Vec::with_capacity(params.samples),
        template,
        instance: Instance { n_vars: 1, clauses: vec![] },
        sources: vec![],
        index: HashMap::new(),
    };
    for i in 0..params.samples {
        let (discard, raw) = draw(params, i);
        let slots = std::array::from_fn(|j| {
            if raw.class.is_anchor() && j < 2 {
                return Slot::V0 { sign: raw.points[j][params.dim] as i8 };
            }
            let key = inst.cell(&raw.points[j]).map_or(SENTINEL_KEY, |c| cell_key(&c));
            let n = inst.sources.len();
            let id = *inst.index.entry(key).or_insert(n);
            if id == n {
                inst.sources.push(if key == SENTINEL_KEY {
                    Source::Sentinel
                } else {
                    Source::Seen { constraint: i, slot: j }
                });
            }
            Slot::Center(id)
        });
        inst.constraints.push(GapConstraint { class: raw.class, discard, slots });
    }
    let weight = 1.0 / params.samples as f64;
    let clauses = inst
        .constraints
        .iter()
        .map(|c| {
            let signs = c.literal_signs();
            let lits = (0..3)
                .map(|j| {
                    let var = match c.slots[j] {
                        Slot::V0 { .. } => 0,
                        Slot::Center(id) => id + 1,
                    };
                    Literal { var, sign: signs[j] }
                })
                .collect();
            Clause::new(0, lits, weight)
        })
        .collect();
    inst.instance = Instance::new(&inst.template, inst.sources.len() + 1, clauses)?;
    Ok(inst)
}

/// (1-in-3, NAE) with signed literals and no constant pairs: negating every
/// variable preserves NAE, so `v0` can be taken true without pinning it.
pub fn folded_template() -> Result<Template> {
    let base = zoo::one_in_three_vs_nae();
    Ok(Template::new(DomainPair::same(2), base.pairs, true, false)?)
}
