//! Entropy scores of a distribution against a hypergraph.
//!
//! [`idef`] is a linear function of the information profile; a positive value
//! certifies incompatibility. [`siminc`] searches extensions of the distribution
//! for the best witness and is zero exactly when a witness exists.

mod siminc;

pub use siminc::{
    siminc, NoiseSizes, Parametrization, SimincBreakdown, SimincOptions, SimincProblem, SimincResult, StepSchedule,
    RESPONSE_LABEL_PREFIX,
};

use crate::dist::JointDistribution;
use crate::error::{Error, Result};
use crate::hypergraph::{dagger, noise_name, DirectedHypergraph};
use crate::info::{conditional_entropy, entropy};

fn check_nodes(graph: &DirectedHypergraph, d: &JointDistribution) -> Result<()> {
    for a in graph.arcs() {
        for n in a.sources.iter().chain(&a.targets) {
            if !d.contains(n) {
                return Err(Error::UnknownVariable(n.clone()));
            }
        }
    }
    Ok(())
}

/// Information deficiency: `-H(all variables of d) + sum_a H(Tgt a | Src a)`.
pub fn idef(graph: &DirectedHypergraph, d: &JointDistribution) -> Result<f64> {
    check_nodes(graph, d)?;
    let mut total = -entropy(d, &d.names())?;
    for a in graph.arcs() {
        let src: Vec<&String> = a.sources.iter().collect();
        let tgt: Vec<&String> = a.targets.iter().collect();
        total += conditional_entropy(d, &tgt, &src)?;
    }
    Ok(total)
}

/// `true` only if `idef > tol`, which proves `d` has no witness for `graph`.
/// `false` is inconclusive.
pub fn certify_incompatible(graph: &DirectedHypergraph, d: &JointDistribution, tol: f64) -> Result<bool> {
    Ok(idef(graph, d)? > tol)
}

/// Information deficiency of the noise-explicit hypergraph at the extension `nu`,
/// an upper bound on SIMInc of `d`. `nu` must hold `d`'s variables plus one
/// `U__<label>` variable per arc.
pub fn siminc_upper_bound(graph: &DirectedHypergraph, d: &JointDistribution, nu: &JointDistribution) -> Result<f64> {
    check_nodes(graph, d)?;
    let mut expected = d.names();
    expected.extend(graph.arcs().iter().map(|a| noise_name(&a.label)));
    if nu.variables().len() != expected.len() || expected.iter().any(|n| !nu.contains(n)) {
        return Err(Error::InvalidWitness(format!("extension must have exactly the variables {expected:?}")));
    }
    let base = nu.marginal(&d.names())?;
    let gap = base.max_abs_diff(d).ok_or_else(|| Error::MarginalMismatch("value spaces differ".into()))?;
    if gap > crate::dist::SUM_TOLERANCE {
        return Err(Error::MarginalMismatch(format!("extension differs from the distribution by {gap}")));
    }
    let explicit = dagger(&graph.with_nodes(&d.names()))?;
    idef(&explicit, nu)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::Variable;
    use crate::hypergraph::{from_graph, Hyperarc};

    fn xor() -> JointDistribution {
        let vars = vec![Variable::binary("X"), Variable::binary("Y"), Variable::binary("Z")];
        JointDistribution::from_fn(vars, |s| if s[2] == s[0] ^ s[1] { 1.0 } else { 0.0 }).unwrap()
    }

    #[test]
    fn three_cycle_on_xor_is_one_bit() {
        let g = from_graph(&["X", "Y", "Z"], &[("X", "Y"), ("Y", "Z"), ("Z", "X")], &[]).unwrap();
        let v = idef(&g, &xor()).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
        assert!(certify_incompatible(&g, &xor(), 1e-9).unwrap());
    }

    #[test]
    fn copy_distribution_has_zero_deficiency_for_two_roots() {
        // X, Z fair and independent, Y = X.
        let vars = vec![Variable::binary("X"), Variable::binary("Y"), Variable::binary("Z")];
        let d = JointDistribution::from_fn(vars, |s| if s[1] == s[0] { 1.0 } else { 0.0 }).unwrap();
        let g = DirectedHypergraph::new(
            ["X", "Y", "Z"],
            vec![Hyperarc::new("1", &[] as &[&str], &["X"]), Hyperarc::new("2", &[] as &[&str], &["Y"])],
        )
        .unwrap();
        assert!(idef(&g, &d).unwrap().abs() < 1e-12);
        assert!(!d.check_ci(&["X"], &["Y"], &crate::dist::NO_VARS, 1e-9).unwrap());
    }

    #[test]
    fn empty_graph_gives_negative_entropy() {
        let coin = JointDistribution::uniform(vec![Variable::binary("C")]).unwrap();
        let g = DirectedHypergraph::new(["C"], vec![]).unwrap();
        assert!((idef(&g, &coin).unwrap() + 1.0).abs() < 1e-12);
        assert!(!certify_incompatible(&g, &coin, 1e-9).unwrap());
    }

    #[test]
    fn upper_bound_with_independent_uniform_noise() {
        // Single arc X -> Y, nu = mu x uniform(U). IDef of the explicit graph is
        // -H(X,Y,U) + H(U) + H(Y|X,U) + H(X,Y|U) = H(Y|X) when U is independent.
        let vars = vec![Variable::binary("X"), Variable::binary("Y")];
        let mu = JointDistribution::new(vars, vec![0.4, 0.1, 0.2, 0.3]).unwrap();
        let g = DirectedHypergraph::new(["X", "Y"], vec![Hyperarc::new("a", &["X"], &["Y"])]).unwrap();
        let noise = JointDistribution::uniform(vec![Variable::with_cardinality("U__a", 3).unwrap()]).unwrap();
        let nu = mu.product(&noise).unwrap();
        let bound = siminc_upper_bound(&g, &mu, &nu).unwrap();
        let h_y_given_x = conditional_entropy(&mu, &["Y"], &["X"]).unwrap();
        assert!((bound - h_y_given_x).abs() < 1e-12);
        assert!(bound >= idef(&g, &mu).unwrap() - 1e-9);
    }

    #[test]
    fn upper_bound_rejects_wrong_extension() {
        let mu = JointDistribution::uniform(vec![Variable::binary("X")]).unwrap();
        let g = DirectedHypergraph::new(["X"], vec![Hyperarc::new("a", &[] as &[&str], &["X"])]).unwrap();
        let skewed = JointDistribution::new(vec![Variable::binary("X")], vec![0.9, 0.1]).unwrap();
        let noise = JointDistribution::uniform(vec![Variable::binary("U__a")]).unwrap();
        let nu = skewed.product(&noise).unwrap();
        assert!(matches!(siminc_upper_bound(&g, &mu, &nu), Err(Error::MarginalMismatch(_))));
    }
}
