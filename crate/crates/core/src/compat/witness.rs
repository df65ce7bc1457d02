use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::dist::JointDistribution;
use crate::error::{Error, Result};
use crate::hypergraph::DirectedHypergraph;
use crate::info::{conditional_entropy, multi_information};

/// An extension of a distribution by one noise variable per arc.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawWitness")]
pub struct Witness {
    joint: JointDistribution,
    arc_map: BTreeMap<String, String>,
    base_vars: Vec<String>,
}

#[derive(Deserialize)]
struct RawWitness {
    joint: JointDistribution,
    arc_map: BTreeMap<String, String>,
}

impl TryFrom<RawWitness> for Witness {
    type Error = Error;

    fn try_from(raw: RawWitness) -> Result<Self> {
        Witness::new(raw.joint, raw.arc_map)
    }
}

impl Witness {
    /// `arc_map` sends arc labels to distinct variables of `joint`; every other
    /// variable of `joint` is a base variable.
    pub fn new(joint: JointDistribution, arc_map: BTreeMap<String, String>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for (label, name) in &arc_map {
            if !joint.contains(name) {
                return Err(Error::InvalidWitness(format!("noise variable `{name}` of arc `{label}` is missing")));
            }
            if !seen.insert(name.as_str()) {
                return Err(Error::InvalidWitness(format!("noise variable `{name}` is shared by several arcs")));
            }
        }
        let base_vars = joint.names().into_iter().filter(|n| !seen.contains(n.as_str())).collect();
        Ok(Witness { joint, arc_map, base_vars })
    }

    pub fn joint(&self) -> &JointDistribution {
        &self.joint
    }

    pub fn arc_map(&self) -> &BTreeMap<String, String> {
        &self.arc_map
    }

    pub fn base_vars(&self) -> &[String] {
        &self.base_vars
    }

    pub fn noise_of(&self, label: &str) -> Option<&str> {
        self.arc_map.get(label).map(String::as_str)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("witness serializes")
    }

    pub fn from_json(text: &str) -> Result<Witness> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Outcome of one witness condition; `violation` is the offending quantity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub passed: bool,
    pub violation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessReport {
    /// Largest entrywise gap between the witness marginal and the distribution.
    pub marginal: Check,
    /// Multi-information of the noise variables, in bits.
    pub independence: Check,
    /// Per arc: whether sources and noise determine the targets; the violation
    /// is `H(Tgt | Src, U)` in bits.
    pub determination: BTreeMap<String, Check>,
}

impl WitnessReport {
    pub fn passed(&self) -> bool {
        self.marginal.passed && self.independence.passed && self.determination.values().all(|c| c.passed)
    }
}

/// Checks that `w` extends `mu`, has mutually independent noise, and that each
/// arc's sources together with its noise determine its targets.
pub fn verify_witness(
    mu: &JointDistribution,
    graph: &DirectedHypergraph,
    w: &Witness,
    tol: f64,
) -> Result<WitnessReport> {
    let labels: BTreeSet<&str> = graph.arcs().iter().map(|a| a.label.as_str()).collect();
    let mapped: BTreeSet<&str> = w.arc_map.keys().map(String::as_str).collect();
    if labels != mapped {
        return Err(Error::InvalidWitness("arc map does not match the hypergraph's arcs".into()));
    }
    for name in mu.names() {
        if !w.base_vars.contains(&name) {
            return Err(Error::Precondition(format!("witness lacks base variable `{name}`")));
        }
    }
    for a in graph.arcs() {
        if let Some(n) = a.sources.iter().chain(&a.targets).find(|n| !w.base_vars.contains(n)) {
            return Err(Error::InvalidWitness(format!("arc `{}` mentions `{n}`, which is not a base variable", a.label)));
        }
    }

    let gap = w.joint.marginal(&mu.names())?.max_abs_diff(mu).unwrap_or(f64::INFINITY);
    let marginal = Check { passed: gap <= tol, violation: gap };

    let groups: Vec<Vec<&str>> = graph.arcs().iter().map(|a| vec![w.arc_map[&a.label].as_str()]).collect();
    let mi = if groups.len() < 2 { 0.0 } else { multi_information(&w.joint, &groups)? };
    let independence = Check { passed: mi <= tol, violation: mi };

    let mut determination = BTreeMap::new();
    for a in graph.arcs() {
        let mut given: Vec<&str> = a.sources.iter().map(String::as_str).collect();
        given.push(&w.arc_map[&a.label]);
        let tgt: Vec<&str> = a.targets.iter().map(String::as_str).collect();
        let passed = w.joint.check_determines(&given, &tgt, tol)?;
        let h = conditional_entropy(&w.joint, &tgt, &given)?;
        determination.insert(a.label.clone(), Check { passed, violation: h });
    }
    Ok(WitnessReport { marginal, independence, determination })
}
