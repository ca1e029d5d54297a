use pcsp_core::rng;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::instance::dot;
use crate::witness::LiftedVector;
use crate::{GapInstance, Slot};

/// Fraction of sampled constraints (discarded ones included) whose literal
/// values are all equal, for `values[id]` the value of center `id` (`true` is
/// `+1`). The points `v0` and `-v0` take `+1` and `-1`.
pub fn count_violations_with(inst: &GapInstance, values: &[bool]) -> f64 {
    assert_eq!(values.len(), inst.n_centers(), "one value per center");
    let violated = inst
        .constraints
        .iter()
        .filter(|c| {
            let signs = c.literal_signs();
            let lits: Vec<i8> = (0..3)
                .map(|j| {
                    let point = match c.slots[j] {
                        Slot::V0 { .. } => 1,
                        Slot::Center(id) => 2 * values[id] as i8 - 1,
                    };
                    signs[j] * point
                })
                .collect();
            lits[0] == lits[1] && lits[1] == lits[2]
        })
        .count();
    violated as f64 / inst.constraints.len() as f64
}

/// Violated fraction under an assignment given as a function of the center
/// vector.
pub fn count_violations(inst: &GapInstance, mut f: impl FnMut(&[f64]) -> bool) -> f64 {
    let mut values = Vec::with_capacity(inst.n_centers());
    inst.for_each_center(|_, c| values.push(f(c)));
    count_violations_with(inst, &values)
}

/// `sign(<c, v0> - theta)`, ties to `+1`.
pub fn threshold_assignment(inst: &GapInstance, theta: f64) -> Vec<bool> {
    let d = inst.dim();
    let mut values = Vec::with_capacity(inst.n_centers());
    inst.for_each_center(|_, c| values.push(c[d] >= theta));
    values
}

/// Random hyperplane through the origin of `R^{d+1}`, ties to `+1`.
pub fn hyperplane_assignment(inst: &GapInstance, seed: u64) -> Vec<bool> {
    let mut r = rng::stream(seed, 0);
    let normal: Vec<f64> = (0..=inst.dim()).map(|_| r.sample(StandardNormal)).collect();
    let mut values = Vec::with_capacity(inst.n_centers());
    inst.for_each_center(|_, c| values.push(dot(c, &normal) >= 0.0));
    values
}

/// CMM rounding of the witness vectors: `+1` iff
/// `<lift(c), v0 + sqrt(eps) r> >= 0` for a Gaussian `r` on the lifted space.
pub fn cmm_assignment(inst: &GapInstance, epsilon: f64, seed: u64) -> Vec<bool> {
    let d = inst.dim();
    let t = 1.0 - epsilon / 4.0;
    let mut r = rng::stream(seed, 0);
    let dense: Vec<f64> = (0..d + 2).map(|_| r.sample(StandardNormal)).collect();
    let mut rz = rng::stream(seed, 1);
    let z: Vec<f64> = (0..inst.n_centers()).map(|_| rz.sample(StandardNormal)).collect();
    let se = epsilon.sqrt();
    let mut values = Vec::with_capacity(inst.n_centers());
    inst.for_each_center(|id, c| {
        let l = LiftedVector::lift(c, id, t);
        let zc = l.z.map_or(0.0, |(i, a)| a * z[i]);
        values.push(l.bias() + se * (dot(&l.dense, &dense) + zc) >= 0.0);
    });
    values
}
