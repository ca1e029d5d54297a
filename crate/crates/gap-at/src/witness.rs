use serde::{Deserialize, Serialize};

use crate::instance::dot;
use crate::{GapInstance, Slot};

/// Pattern index of `(x1, x2, x3)`: bit `2 - i` is set when `x_i = +1`, so
/// index 0 is `(-1,-1,-1)` and index 7 is `(1,1,1)`.
pub fn pattern(s: usize) -> [f64; 3] {
    std::array::from_fn(|i| if s >> (2 - i) & 1 == 1 { 1.0 } else { -1.0 })
}

/// Patterns with exactly one `+1`.
const ONE_IN_THREE: [usize; 3] = [4, 2, 1];

/// A lifted vector: `d + 2` dense coordinates (the original space, `v0` at
/// index `d`, then the shared direction `g`) plus at most one private
/// coordinate `z`.
#[derive(Clone, Debug, PartialEq)]
pub struct LiftedVector {
    pub dense: Vec<f64>,
    pub z: Option<(usize, f64)>,
}

impl LiftedVector {
    /// `sign * v0`.
    pub fn constant(d: usize, sign: f64) -> Self {
        let mut dense = vec![0.0; d + 2];
        dense[d] = sign;
        LiftedVector { dense, z: None }
    }

    /// `sqrt(t) R(c/‖c‖) + sqrt(1 - t) z_id`, where `R` turns `v0` into
    /// `sqrt(t) v0 + sqrt(1 - t) g` and fixes its orthogonal complement. Then
    /// `<lift, v0> = t <c, v0>/‖c‖` and distinct centers have inner product
    /// `t` times that of their normalizations, which is exactly what mixing
    /// the distributions with weight `1 - t` does to the moments.
    pub fn lift(center: &[f64], id: usize, t: f64) -> Self {
        let d = center.len() - 1;
        let n = dot(center, center).sqrt();
        let a = center[d] / n;
        let st = t.sqrt();
        let mut dense: Vec<f64> = center.iter().map(|x| st * x / n).collect();
        dense[d] = t * a;
        dense.push((t * (1.0 - t)).sqrt() * a);
        LiftedVector { dense, z: Some((id, (1.0 - t).sqrt())) }
    }

    pub fn scaled(mut self, s: f64) -> Self {
        self.dense.iter_mut().for_each(|x| *x *= s);
        if let Some((_, c)) = self.z.as_mut() {
            *c *= s;
        }
        self
    }

    pub fn dot(&self, other: &LiftedVector) -> f64 {
        let z = match (self.z, other.z) {
            (Some((i, a)), Some((j, b))) if i == j => a * b,
            _ => 0.0,
        };
        dot(&self.dense, &other.dense) + z
    }

    /// Inner product with `v0`.
    pub fn bias(&self) -> f64 {
        self.dense[self.dense.len() - 2]
    }
}

/// One position of a triple in the literal frame, where the three nominal
/// literal vectors sum to `-v0`.
#[derive(Clone, Copy, Debug)]
pub enum SlotInput<'a> {
    /// The literal vector `sign * v0`.
    Constant(f64),
    /// The literal vector `sign * center`; `id` names the center's private
    /// direction.
    Point { center: &'a [f64], sign: f64, id: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TripleWitness {
    /// `D`: the exact distribution on the nominal triple.
    pub base: [f64; 8],
    /// `D'`: shifted to the normalized centers; may be signed.
    pub shifted: [f64; 8],
    /// `D''`: after noise mixing.
    pub mixed: [f64; 8],
    /// Strong (1-in-3) mass of `D''`.
    pub value: f64,
    /// Largest first/second moment mismatch against the lifted vectors.
    pub moment_residual: f64,
    pub min_entry: f64,
    /// `sum |Δ_i| + sum |Δ_ij|`.
    pub shift_budget: f64,
    /// Largest `|‖lifted‖ - 1|`.
    pub norm_error: f64,
}

impl TripleWitness {
    pub fn is_valid(&self, epsilon: f64) -> bool {
        self.min_entry >= -1e-12 && self.moment_residual <= 1e-9 && self.value >= 1.0 - epsilon
    }
}

/// Build `D`, `D'` and `D''` for one triple and check `D''` against the
/// lifted vectors.
///
/// `exact` are unit literal vectors summing to `-v0` (in `R^{d+1}`, `v0`
/// last); `slots` give the discretized positions. Constant positions stay
/// fixed throughout: the shift `Δ/2^f` and the noise act on the `f` free
/// coordinates only, so with no constants the shift is the usual `Δ/8` and the
/// noise is uniform over all eight patterns. Noise mixing uses
/// `eps' = epsilon / 4`.
pub fn triple_witness(exact: [&[f64]; 3], slots: [SlotInput; 3], epsilon: f64) -> TripleWitness {
    let d = exact[0].len() - 1;
    let e = epsilon / 4.0;
    let t = 1.0 - e;
    let a: [f64; 3] = std::array::from_fn(|i| exact[i][d]);
    let mut base = [0.0; 8];
    for i in 0..3 {
        base[ONE_IN_THREE[i]] = (1.0 + a[i]) / 2.0;
    }
    let unit: [Vec<f64>; 3] = std::array::from_fn(|i| match slots[i] {
        SlotInput::Constant(s) => {
            let mut v = vec![0.0; d + 1];
            v[d] = s;
            v
        }
        SlotInput::Point { center, sign, .. } => {
            let n = dot(center, center).sqrt();
            center.iter().map(|x| sign * x / n).collect()
        }
    });
    let delta: [f64; 3] = std::array::from_fn(|i| unit[i][d] - a[i]);
    let pairs = [(0, 1), (0, 2), (1, 2)];
    let delta2 = pairs.map(|(i, j)| dot(&unit[i], &unit[j]) - dot(exact[i], exact[j]));
    let agrees = |s: usize| {
        let x = pattern(s);
        (0..3).all(|i| match slots[i] {
            SlotInput::Constant(c) => x[i] == c.signum(),
            SlotInput::Point { .. } => true,
        })
    };
    let free: Vec<bool> = slots.iter().map(|s| matches!(s, SlotInput::Point { .. })).collect();
    let support = (0..8).filter(|&s| agrees(s)).count() as f64;
    let mut shifted = base;
    for (s, p) in shifted.iter_mut().enumerate().filter(|(s, _)| agrees(*s)) {
        let x = pattern(s);
        let first: f64 = (0..3).filter(|&i| free[i]).map(|i| x[i] * delta[i]).sum();
        let second: f64 = pairs
            .iter()
            .zip(&delta2)
            .filter(|(&(i, j), _)| free[i] && free[j])
            .map(|(&(i, j), dl)| x[i] * x[j] * dl)
            .sum();
        *p += (first + second) / support;
    }
    let mut mixed = [0.0; 8];
    for s in 0..8 {
        mixed[s] = t * shifted[s] + if agrees(s) { e / support } else { 0.0 };
    }

    let lifted: [LiftedVector; 3] = std::array::from_fn(|i| match slots[i] {
        SlotInput::Constant(s) => LiftedVector::constant(d, s),
        SlotInput::Point { center, sign, id } => LiftedVector::lift(center, id, t).scaled(sign),
    });
    let moment = |f: &dyn Fn([f64; 3]) -> f64| (0..8).map(|s| mixed[s] * f(pattern(s))).sum::<f64>();
    let mut residual = (moment(&|_| 1.0) - 1.0).abs();
    for i in 0..3 {
        residual = residual.max((moment(&|x| x[i]) - lifted[i].bias()).abs());
    }
    for &(i, j) in &pairs {
        residual = residual.max((moment(&|x| x[i] * x[j]) - lifted[i].dot(&lifted[j])).abs());
    }
    TripleWitness {
        base,
        shifted,
        mixed,
        value: ONE_IN_THREE.iter().map(|&s| mixed[s]).sum(),
        moment_residual: residual,
        min_entry: mixed.iter().copied().fold(f64::INFINITY, f64::min),
        shift_budget: delta.iter().chain(&delta2).map(|x| x.abs()).sum(),
        norm_error: lifted.iter().map(|l| (l.dot(l).sqrt() - 1.0).abs()).fold(0.0, f64::max),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub epsilon: f64,
    pub samples: usize,
    pub discarded: usize,
    pub discard_fraction: f64,
    /// `6 e^{-10/eps}`, guaranteed only from `required_dim` on.
    pub discard_bound: f64,
    pub dim: usize,
    pub required_dim: f64,
    /// Kept constraints whose `D''` fails a check.
    pub failures: Vec<usize>,
    pub max_moment_residual: f64,
    /// `None` when every constraint was discarded.
    pub min_entry: Option<f64>,
    pub min_value: Option<f64>,
    pub max_shift_budget: f64,
    pub max_norm_error: f64,
}

impl WitnessReport {
    /// Every kept constraint has a valid `D''`.
    pub fn valid(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    /// One entry per sampled constraint, discarded ones included.
    pub constraints: Vec<TripleWitness>,
    pub report: WitnessReport,
}

/// Witness for every constraint. Statistics and failures cover the kept
/// constraints only; discarded ones are still computed for inspection.
pub fn build_sdp_witness(inst: &GapInstance, epsilon: f64) -> Witness {
    let d = inst.dim();
    let mut out = Vec::with_capacity(inst.constraints.len());
    let mut report = WitnessReport {
        epsilon,
        samples: inst.constraints.len(),
        discarded: 0,
        discard_fraction: inst.discard_fraction(),
        discard_bound: inst.params.discard_bound(),
        dim: d,
        required_dim: inst.params.required_dim(),
        failures: vec![],
        max_moment_residual: 0.0,
        min_entry: None,
        min_value: None,
        max_shift_budget: 0.0,
        max_norm_error: 0.0,
    };
    for (i, c) in inst.constraints.iter().enumerate() {
        let raw = inst.raw(i);
        let sigma = if c.class.sums_to_v0() { -1.0 } else { 1.0 };
        let exact = inst.nominal(&raw).map(|v| v.into_iter().map(|x| sigma * x).collect::<Vec<f64>>());
        let centers = inst.discretized(&raw, c);
        let slots = std::array::from_fn(|j| match c.slots[j] {
            Slot::V0 { sign } => SlotInput::Constant(sigma * sign as f64),
            Slot::Center(id) => SlotInput::Point { center: &centers[j], sign: sigma, id },
        });
        let w = triple_witness([&exact[0], &exact[1], &exact[2]], slots, epsilon);
        if c.discard.is_some() {
            report.discarded += 1;
        } else {
            if !w.is_valid(epsilon) {
                report.failures.push(i);
            }
            report.max_moment_residual = report.max_moment_residual.max(w.moment_residual);
            report.min_entry = Some(report.min_entry.map_or(w.min_entry, |m| m.min(w.min_entry)));
            report.min_value = Some(report.min_value.map_or(w.value, |m| m.min(w.value)));
            report.max_shift_budget = report.max_shift_budget.max(w.shift_budget);
            report.max_norm_error = report.max_norm_error.max(w.norm_error);
        }
        out.push(w);
    }
    Witness { constraints: out, report }
}
