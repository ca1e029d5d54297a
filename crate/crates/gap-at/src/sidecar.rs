use serde::{Deserialize, Serialize};

use crate::{Class, GapError, GapInstance, GapParams, Result, Witness, WitnessReport};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SidecarConstraint {
    pub class: String,
    pub discard: Option<String>,
    #[serde(rename = "D2")]
    pub d2: [f64; 8],
    pub value: f64,
}

/// The witness file written next to a generated instance. `params` make the
/// instance reproducible, so a verifier can rebuild every vector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub params: GapParams,
    pub epsilon: f64,
    pub constraints: Vec<SidecarConstraint>,
    #[serde(default)]
    pub report: Option<WitnessReport>,
}

impl Sidecar {
    pub fn new(inst: &GapInstance, witness: &Witness) -> Self {
        let constraints = inst
            .constraints
            .iter()
            .zip(&witness.constraints)
            .map(|(c, w)| SidecarConstraint {
                class: c.class.to_string(),
                discard: c.discard.map(|d| d.to_string()),
                d2: w.mixed,
                value: w.value,
            })
            .collect();
        Sidecar {
            params: inst.params,
            epsilon: witness.report.epsilon,
            constraints,
            report: Some(witness.report.clone()),
        }
    }

    pub fn to_json(&self) -> Vec<u8> {
        serde_json::to_vec(self).expect("sidecar serializes")
    }
}

/// Parse and sanity-check a witness file.
pub fn parse_sidecar(bytes: &[u8]) -> Result<Sidecar> {
    let s: Sidecar = serde_json::from_slice(bytes).map_err(|e| GapError::Params(format!("witness file: {e}")))?;
    s.params.validate()?;
    if s.constraints.len() != s.params.samples {
        return Err(GapError::Params(format!(
            "witness lists {} constraints, params say {}",
            s.constraints.len(),
            s.params.samples
        )));
    }
    if !(s.epsilon > 0.0 && s.epsilon < 1.0) {
        return Err(GapError::Params(format!("witness epsilon {} outside (0, 1)", s.epsilon)));
    }
    for (i, c) in s.constraints.iter().enumerate() {
        c.class.parse::<Class>()?;
        if let Some(d) = &c.discard {
            if d != "norm" && d != "dot" {
                return Err(GapError::Params(format!("constraint {i}: unknown discard reason {d:?}")));
            }
        }
        if !c.value.is_finite() || c.d2.iter().any(|x| !x.is_finite()) {
            return Err(GapError::Params(format!("constraint {i}: non-finite entry")));
        }
    }
    Ok(s)
}
