use std::collections::BTreeMap;

use crate::dist::{JointDistribution, Variable};
use crate::error::{Error, Result};
use crate::hypergraph::{noise_name, DirectedHypergraph};

use super::Witness;

/// Value label of the single value of a constant noise variable.
pub const UNIT_VALUE: &str = "*";

/// Moves a witness for `stronger` to `weaker` along a weakening map
/// (weaker label → stronger label): arc `a'` reuses the noise of `iota(a')`.
/// Noise of stronger arcs outside the image is marginalized away.
pub fn transport_witness(
    stronger: &DirectedHypergraph,
    weaker: &DirectedHypergraph,
    iota: &BTreeMap<String, String>,
    w: &Witness,
) -> Result<Witness> {
    let weak_labels: Vec<&str> = weaker.labels();
    if iota.len() != weak_labels.len() || weak_labels.iter().any(|l| !iota.contains_key(*l)) {
        return Err(Error::InvalidWitness("map must cover exactly the weaker hypergraph's arcs".into()));
    }
    let mut arc_map = BTreeMap::new();
    let mut used = Vec::new();
    for (weak, strong) in iota {
        if stronger.arc(strong).is_none() {
            return Err(Error::InvalidWitness(format!("`{strong}` is not an arc of the stronger hypergraph")));
        }
        let u = w
            .noise_of(strong)
            .ok_or_else(|| Error::InvalidWitness(format!("witness has no noise for arc `{strong}`")))?;
        if used.iter().any(|n| n == u) {
            return Err(Error::InvalidWitness("map is not injective".into()));
        }
        used.push(u.to_string());
        arc_map.insert(weak.clone(), u.to_string());
    }
    let mut keep = w.base_vars().to_vec();
    keep.extend(w.joint().names().into_iter().filter(|n| used.contains(n)));
    Witness::new(w.joint().marginal(&keep)?, arc_map)
}

/// Adds a constant noise variable `U__<label>` for each listed arc.
pub fn with_unit_noise(w: &Witness, labels: &[String]) -> Result<Witness> {
    let mut joint = w.joint().clone();
    let mut arc_map = w.arc_map().clone();
    for l in labels {
        let name = noise_name(l);
        let unit = JointDistribution::new(vec![Variable::new(&name, [UNIT_VALUE])?], vec![1.0])?;
        joint = joint.product(&unit)?;
        arc_map.insert(l.clone(), name);
    }
    Witness::new(joint, arc_map)
}

/// Extends a witness over some of `mu`'s variables to all of them by drawing the
/// missing variables from `mu` conditioned on the covered ones.
pub fn extend_to(w: &Witness, mu: &JointDistribution) -> Result<Witness> {
    let covered: Vec<String> = mu.names().into_iter().filter(|n| w.base_vars().contains(n)).collect();
    let missing: Vec<String> = mu.names().into_iter().filter(|n| !w.base_vars().contains(n)).collect();
    if missing.is_empty() {
        return Ok(w.clone());
    }
    // Order the witness as covered variables, then everything else (its noise and extra base variables).
    let others: Vec<String> = w.joint().names().into_iter().filter(|n| !covered.contains(n)).collect();
    let mut order = covered.clone();
    order.extend(others.iter().cloned());
    let left = w.joint().reordered(&order)?;
    let mut split = covered.clone();
    split.extend(missing.iter().cloned());
    let right = mu.marginal(&split)?;
    let c_size: usize = covered.iter().map(|n| mu.variable(n).unwrap().cardinality()).product();
    let o_size = left.probs().len() / c_size;
    let m_size = right.probs().len() / c_size;
    let mut probs = Vec::with_capacity(c_size * o_size * m_size);
    for c in 0..c_size {
        let block = &right.probs()[c * m_size..(c + 1) * m_size];
        let mass: f64 = block.iter().sum();
        for o in 0..o_size {
            let p = left.probs()[c * o_size + o];
            for &r in block {
                probs.push(if mass > 0.0 { p * r / mass } else { 0.0 });
            }
        }
    }
    let mut variables: Vec<Variable> = left.variables().to_vec();
    variables.extend(missing.iter().map(|n| mu.variable(n).unwrap().clone()));
    let joint = JointDistribution::from_weights(variables, probs)?;
    let mut final_order = mu.names();
    final_order.extend(others.into_iter().filter(|n| !mu.contains(n)));
    Witness::new(joint.reordered(&final_order)?, w.arc_map().clone())
}
