use std::collections::BTreeMap;

use crate::causal::derandomize_cpd;
use crate::dist::{strides_of, JointDistribution, Odometer, Variable, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::graph::Dag;
use crate::hypergraph::noise_name;

use super::Witness;

const MAX_WITNESS_ENTRIES: usize = 1 << 24;

/// A vertex whose local independence fails: `I(v; rest | Pa(v))` in bits.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalViolation {
    pub vertex: String,
    pub bits: f64,
}

/// The first vertex `v` (in vertex order) with `v` dependent on its non-parent
/// non-descendants given its parents, if any.
pub fn bn_violation(g: &Dag, mu: &JointDistribution, tol: f64) -> Result<Option<LocalViolation>> {
    for v in g.vertices() {
        let parents = g.parents_ordered(v);
        let rest: Vec<String> = g.nondescendants(v).into_iter().filter(|u| !parents.contains(u)).collect();
        if rest.is_empty() {
            continue;
        }
        let bits = crate::info::conditional_mutual_information(mu, &[v], &rest, &parents)?;
        if bits > tol {
            return Ok(Some(LocalViolation { vertex: v.clone(), bits }));
        }
    }
    Ok(None)
}

/// Whether `mu` satisfies every local independence of `g`: each vertex is
/// independent of its non-descendants given its parents.
pub fn decide_bn(g: &Dag, mu: &JointDistribution) -> Result<bool> {
    Ok(bn_violation(g, mu, DEFAULT_TOL)?.is_none())
}

/// Builds a witness by giving each vertex a noise variable ranging over functions
/// from parent settings to its values, distributed by the product of its
/// conditional rows. Parent settings of probability zero use a uniform row.
pub fn bn_witness(g: &Dag, mu: &JointDistribution) -> Result<Witness> {
    if g.vertices().len() != mu.variables().len() || g.vertices().iter().any(|v| !mu.contains(v)) {
        return Err(Error::Precondition("the graph's vertices must be the distribution's variables".into()));
    }
    if !decide_bn(g, mu)? {
        return Err(Error::Precondition("the distribution violates the graph's independencies".into()));
    }
    let cards = mu.cardinalities();
    let order: Vec<usize> = g.topological_order().iter().map(|v| mu.position(v).unwrap()).collect();
    // Per vertex (in vertex order): position, parent positions, noise table.
    let mut locals = Vec::new();
    for v in g.vertices() {
        let parents = g.parents_ordered(v);
        let mut names = parents.clone();
        names.push(v.clone());
        let table = mu.marginal(&names)?;
        let t = cards[mu.position(v).unwrap()];
        let rows: Vec<Vec<f64>> = table
            .probs()
            .chunks(t)
            .map(|row| {
                let total: f64 = row.iter().sum();
                if total > 0.0 {
                    row.iter().map(|p| p / total).collect()
                } else {
                    vec![1.0 / t as f64; t]
                }
            })
            .collect();
        let q = derandomize_cpd(&noise_name(v), &rows)?;
        locals.push((mu.position(v).unwrap(), mu.positions(&parents)?, q));
    }
    let noise_cards: Vec<usize> = locals.iter().map(|(_, _, q)| q.probs().len()).collect();
    let noise_total: usize = noise_cards.iter().product();
    let entries = noise_total
        .checked_mul(mu.probs().len())
        .filter(|&n| n <= MAX_WITNESS_ENTRIES)
        .ok_or_else(|| Error::InvalidOption("witness is too large to tabulate".into()))?;
    let mut probs = vec![0.0; entries];
    let by_position: BTreeMap<usize, usize> = locals.iter().enumerate().map(|(i, (p, _, _))| (*p, i)).collect();
    let x_strides = strides_of(&cards);
    let mut x = vec![0; cards.len()];
    let mut odo = Odometer::new(noise_cards);
    let mut u_flat = 0;
    while let Some(u) = odo.next_setting() {
        let p: f64 = u.iter().zip(&locals).map(|(&k, (_, _, q))| q.probs()[k]).product();
        if p > 0.0 {
            for &pos in &order {
                let i = by_position[&pos];
                let (_, parents, _) = &locals[i];
                let s = parents.iter().fold(0, |acc, &q| acc * cards[q] + x[q]);
                let s_count: usize = parents.iter().map(|&q| cards[q]).product();
                let weight = cards[pos].pow((s_count - 1 - s) as u32);
                x[pos] = (u[i] / weight) % cards[pos];
            }
            let x_flat: usize = x.iter().zip(&x_strides).map(|(a, b)| a * b).sum();
            probs[x_flat * noise_total + u_flat] += p;
        }
        u_flat += 1;
    }
    let mut variables: Vec<Variable> = mu.variables().to_vec();
    variables.extend(locals.iter().map(|(_, _, q)| q.variables()[0].clone()));
    let joint = JointDistribution::new(variables, probs)?;
    let arc_map = g.vertices().iter().map(|v| (v.clone(), noise_name(v))).collect();
    Witness::new(joint, arc_map)
}
