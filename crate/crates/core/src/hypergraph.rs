//! Directed hypergraphs: the qualitative structure a distribution is tested against.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::info::InformationProfile;

/// Prefix of the noise variable generated for each arc (`U__<label>`).
pub const NOISE_PREFIX: &str = "U__";

/// Name of the noise variable belonging to the arc `label`.
pub fn noise_name(label: &str) -> String {
    format!("{NOISE_PREFIX}{label}")
}

/// One mechanism: the targets are produced from the sources.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Hyperarc {
    pub label: String,
    pub sources: BTreeSet<String>,
    pub targets: BTreeSet<String>,
}

impl Hyperarc {
    pub fn new<S: AsRef<str>, T: AsRef<str>>(label: impl Into<String>, sources: &[S], targets: &[T]) -> Self {
        Hyperarc {
            label: label.into(),
            sources: sources.iter().map(|s| s.as_ref().to_string()).collect(),
            targets: targets.iter().map(|t| t.as_ref().to_string()).collect(),
        }
    }

    /// Sources in the order they appear in `order`.
    pub fn sources_in<S: AsRef<str>>(&self, order: &[S]) -> Vec<String> {
        order.iter().map(|s| s.as_ref()).filter(|s| self.sources.contains(*s)).map(String::from).collect()
    }

    /// Targets in the order they appear in `order`.
    pub fn targets_in<S: AsRef<str>>(&self, order: &[S]) -> Vec<String> {
        order.iter().map(|s| s.as_ref()).filter(|s| self.targets.contains(*s)).map(String::from).collect()
    }
}

/// A node list plus labelled hyperarcs. Parallel arcs differ only by label.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawHypergraph")]
pub struct DirectedHypergraph {
    nodes: Vec<String>,
    arcs: Vec<Hyperarc>,
}

#[derive(Deserialize)]
struct RawHypergraph {
    nodes: Vec<String>,
    arcs: Vec<Hyperarc>,
}

impl TryFrom<RawHypergraph> for DirectedHypergraph {
    type Error = Error;

    fn try_from(raw: RawHypergraph) -> Result<Self> {
        DirectedHypergraph::new(raw.nodes, raw.arcs)
    }
}

impl DirectedHypergraph {
    pub fn new<S: Into<String>>(nodes: impl IntoIterator<Item = S>, arcs: Vec<Hyperarc>) -> Result<Self> {
        let nodes: Vec<String> = nodes.into_iter().map(Into::into).collect();
        let mut seen = HashSet::new();
        for n in &nodes {
            if n.is_empty() || !seen.insert(n.as_str()) {
                return Err(Error::InvalidHypergraph(format!("bad or repeated node `{n}`")));
            }
        }
        let mut labels = HashSet::new();
        for a in &arcs {
            if !labels.insert(a.label.as_str()) {
                return Err(Error::InvalidHypergraph(format!("repeated arc label `{}`", a.label)));
            }
            if let Some(missing) = a.sources.iter().chain(&a.targets).find(|n| !seen.contains(n.as_str())) {
                return Err(Error::InvalidHypergraph(format!("arc `{}` mentions unknown node `{missing}`", a.label)));
            }
        }
        Ok(DirectedHypergraph { nodes, arcs })
    }

    /// Collects nodes from the arcs in order of first appearance (sources before targets).
    pub fn from_arcs(arcs: Vec<Hyperarc>) -> Result<Self> {
        let mut nodes: Vec<String> = Vec::new();
        for a in &arcs {
            for n in a.sources.iter().chain(&a.targets) {
                if !nodes.contains(n) {
                    nodes.push(n.clone());
                }
            }
        }
        DirectedHypergraph::new(nodes, arcs)
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn arcs(&self) -> &[Hyperarc] {
        &self.arcs
    }

    pub fn arc(&self, label: &str) -> Option<&Hyperarc> {
        self.arcs.iter().find(|a| a.label == label)
    }

    pub fn labels(&self) -> Vec<&str> {
        self.arcs.iter().map(|a| a.label.as_str()).collect()
    }

    /// Same arcs over a node list extended by `extra` (already-present names are skipped).
    pub fn with_nodes<S: AsRef<str>>(&self, extra: &[S]) -> DirectedHypergraph {
        let mut nodes = self.nodes.clone();
        for n in extra {
            if !nodes.iter().any(|m| m == n.as_ref()) {
                nodes.push(n.as_ref().to_string());
            }
        }
        DirectedHypergraph { nodes, arcs: self.arcs.clone() }
    }

    /// Drops the arcs whose labels satisfy `drop`.
    pub fn without_arcs(&self, mut drop: impl FnMut(&Hyperarc) -> bool) -> DirectedHypergraph {
        DirectedHypergraph { nodes: self.nodes.clone(), arcs: self.arcs.iter().filter(|a| !drop(a)).cloned().collect() }
    }

    /// Nodes appearing as a source or target of some arc, in node order.
    pub fn mentioned_nodes(&self) -> Vec<String> {
        self.nodes
            .iter()
            .filter(|n| self.arcs.iter().any(|a| a.sources.contains(*n) || a.targets.contains(*n)))
            .cloned()
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("hypergraph serializes")
    }

    pub fn from_json(text: &str) -> Result<DirectedHypergraph> {
        Ok(serde_json::from_str(text)?)
    }
}

/// The hypergraph of a graph: one arc per vertex `u`, labelled `u`, from every
/// vertex with an edge into `u`. Undirected edges count in both directions.
pub fn from_graph<S: AsRef<str>>(vertices: &[S], directed: &[(S, S)], undirected: &[(S, S)]) -> Result<DirectedHypergraph> {
    let names: Vec<String> = vertices.iter().map(|v| v.as_ref().to_string()).collect();
    let mut parents: BTreeMap<&str, BTreeSet<String>> = names.iter().map(|v| (v.as_str(), BTreeSet::new())).collect();
    let mut add = |from: &str, to: &str| -> Result<()> {
        if !parents.contains_key(from) {
            return Err(Error::InvalidHypergraph(format!("edge endpoint `{from}` is not a vertex")));
        }
        match parents.get_mut(to) {
            Some(p) => {
                p.insert(from.to_string());
                Ok(())
            }
            None => Err(Error::InvalidHypergraph(format!("edge endpoint `{to}` is not a vertex"))),
        }
    };
    for (a, b) in directed {
        add(a.as_ref(), b.as_ref())?;
    }
    for (a, b) in undirected {
        add(a.as_ref(), b.as_ref())?;
        add(b.as_ref(), a.as_ref())?;
    }
    let arcs = names
        .iter()
        .map(|v| Hyperarc {
            label: v.clone(),
            sources: parents[v.as_str()].clone(),
            targets: BTreeSet::from([v.clone()]),
        })
        .collect();
    DirectedHypergraph::new(names, arcs)
}

/// Label of the single arc from all noise variables to all original nodes in [`dagger`].
pub const DAGGER_JOINT_ARC: &str = "U__*";

/// Makes the noise explicit: each arc `a` becomes `∅ → U_a` (labelled `U__a`) and
/// `Src a ∪ {U_a} → Tgt a` (labelled `a`), and one arc from every `U_a` to every
/// original node is added. With no arcs this leaves the single arc `∅ → nodes`.
pub fn dagger(graph: &DirectedHypergraph) -> Result<DirectedHypergraph> {
    let mut nodes = graph.nodes.clone();
    let mut arcs = Vec::with_capacity(2 * graph.arcs.len() + 1);
    let mut noise = BTreeSet::new();
    for a in &graph.arcs {
        let u = noise_name(&a.label);
        if graph.nodes.contains(&u) {
            return Err(Error::NoiseNameCollision(u));
        }
        if graph.arc(&u).is_some() || a.label == DAGGER_JOINT_ARC {
            return Err(Error::InvalidHypergraph(format!("arc label `{}` clashes with generated labels", a.label)));
        }
        nodes.push(u.clone());
        noise.insert(u.clone());
        arcs.push(Hyperarc { label: u.clone(), sources: BTreeSet::new(), targets: BTreeSet::from([u.clone()]) });
        let mut sources = a.sources.clone();
        sources.insert(u);
        arcs.push(Hyperarc { label: a.label.clone(), sources, targets: a.targets.clone() });
    }
    arcs.push(Hyperarc {
        label: DAGGER_JOINT_ARC.to_string(),
        sources: noise,
        targets: graph.nodes.iter().cloned().collect(),
    });
    DirectedHypergraph::new(nodes, arcs)
}

/// Appends `n` arcs `sources → targets` with fresh labels `par1`, `par2`, ...
pub fn add_parallel_arcs<S: AsRef<str>, T: AsRef<str>>(
    graph: &DirectedHypergraph,
    sources: &[S],
    targets: &[T],
    n: usize,
) -> Result<DirectedHypergraph> {
    let mut arcs = graph.arcs.clone();
    let mut k = 0;
    for _ in 0..n {
        let label = loop {
            k += 1;
            let candidate = format!("par{k}");
            if !arcs.iter().any(|a| a.label == candidate) {
                break candidate;
            }
        };
        arcs.push(Hyperarc::new(label, sources, targets));
    }
    DirectedHypergraph::new(graph.nodes.clone(), arcs)
}

/// An injective map from the arcs of `weaker` to the arcs of `stronger` with
/// `Tgt a' ⊆ Tgt ι(a')` and `Src a' ⊇ Src ι(a')`, if one exists.
///
/// Keys and values are arc labels. Found by augmenting-path matching with both
/// sides visited in label order, so the result is reproducible.
pub fn is_weakening(stronger: &DirectedHypergraph, weaker: &DirectedHypergraph) -> Option<BTreeMap<String, String>> {
    let mut left: Vec<&Hyperarc> = weaker.arcs.iter().collect();
    let mut right: Vec<&Hyperarc> = stronger.arcs.iter().collect();
    left.sort_by(|a, b| a.label.cmp(&b.label));
    right.sort_by(|a, b| a.label.cmp(&b.label));
    if left.len() > right.len() {
        return None;
    }
    let admissible: Vec<Vec<usize>> = left
        .iter()
        .map(|w| {
            (0..right.len())
                .filter(|&j| w.targets.is_subset(&right[j].targets) && w.sources.is_superset(&right[j].sources))
                .collect()
        })
        .collect();

    fn augment(i: usize, adj: &[Vec<usize>], seen: &mut [bool], owner: &mut [Option<usize>]) -> bool {
        for &j in &adj[i] {
            if seen[j] {
                continue;
            }
            seen[j] = true;
            if owner[j].is_none() || augment(owner[j].unwrap(), adj, seen, owner) {
                owner[j] = Some(i);
                return true;
            }
        }
        false
    }

    let mut owner: Vec<Option<usize>> = vec![None; right.len()];
    for i in 0..left.len() {
        let mut seen = vec![false; right.len()];
        if !augment(i, &admissible, &mut seen, &mut owner) {
            return None;
        }
    }
    Some(
        owner
            .iter()
            .enumerate()
            .filter_map(|(j, o)| o.map(|i| (left[i].label.clone(), right[j].label.clone())))
            .collect(),
    )
}

/// Integer weights on information-profile atoms whose dot product with a profile
/// is the information deficiency of the hypergraph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoefficientVector {
    variables: Vec<String>,
    coeffs: Vec<i64>,
}

impl CoefficientVector {
    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn coefficient<S: AsRef<str>>(&self, subset: &[S]) -> Result<i64> {
        let mut mask = 0usize;
        for s in subset {
            let i = self
                .variables
                .iter()
                .position(|v| v == s.as_ref())
                .ok_or_else(|| Error::UnknownVariable(s.as_ref().to_string()))?;
            mask |= 1 << i;
        }
        if mask == 0 {
            return Err(Error::Precondition("the empty set has no coefficient".into()));
        }
        Ok(self.coeffs[mask])
    }

    pub fn iter(&self) -> impl Iterator<Item = (Vec<&str>, i64)> + '_ {
        (1..self.coeffs.len()).map(move |mask| {
            let names =
                (0..self.variables.len()).filter(|i| mask & (1 << i) != 0).map(|i| self.variables[i].as_str()).collect();
            (names, self.coeffs[mask])
        })
    }

    /// Dot product with a profile over the same variable set (in any order).
    pub fn dot(&self, profile: &InformationProfile) -> Result<f64> {
        if profile.variables().len() != self.variables.len() {
            return Err(Error::Precondition("profile and coefficients cover different variables".into()));
        }
        let mut remap = Vec::with_capacity(self.variables.len());
        for v in &self.variables {
            remap.push(profile.mask_of(&[v])?);
        }
        Ok((1..self.coeffs.len())
            .map(|mask| {
                let pm = (0..remap.len()).filter(|i| mask & (1 << i) != 0).fold(0, |acc, i| acc | remap[i]);
                self.coeffs[mask] as f64 * profile.atom_by_mask(pm)
            })
            .sum())
    }
}

/// `coeff(W) = -1 + #{a : W meets Tgt a and misses Src a}` for every nonempty `W`.
pub fn coefficient_vector<S: AsRef<str>>(graph: &DirectedHypergraph, variables: &[S]) -> Result<CoefficientVector> {
    let variables: Vec<String> = variables.iter().map(|v| v.as_ref().to_string()).collect();
    if variables.len() > crate::info::MAX_PROFILE_VARIABLES {
        return Err(Error::Precondition("too many variables for a coefficient vector".into()));
    }
    let index = |n: &String| -> Result<usize> {
        variables.iter().position(|v| v == n).ok_or_else(|| Error::UnknownVariable(n.clone()))
    };
    let mut arc_masks = Vec::with_capacity(graph.arcs.len());
    for a in &graph.arcs {
        let mut src = 0usize;
        let mut tgt = 0usize;
        for s in &a.sources {
            src |= 1 << index(s)?;
        }
        for t in &a.targets {
            tgt |= 1 << index(t)?;
        }
        arc_masks.push((src, tgt));
    }
    let mut coeffs = vec![0i64; 1 << variables.len()];
    for (w, c) in coeffs.iter_mut().enumerate().skip(1) {
        let hits = arc_masks.iter().filter(|(s, t)| w & t != 0 && w & s == 0).count();
        *c = hits as i64 - 1;
    }
    Ok(CoefficientVector { variables, coeffs })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn three_cycle() -> DirectedHypergraph {
        from_graph(&["X", "Y", "Z"], &[("X", "Y"), ("Y", "Z"), ("Z", "X")], &[]).unwrap()
    }

    fn arc_set(g: &DirectedHypergraph) -> BTreeSet<(Vec<String>, Vec<String>)> {
        g.arcs()
            .iter()
            .map(|a| (a.sources.iter().cloned().collect(), a.targets.iter().cloned().collect()))
            .collect()
    }

    fn pairs(list: &[(&[&str], &[&str])]) -> BTreeSet<(Vec<String>, Vec<String>)> {
        list.iter()
            .map(|(s, t)| (s.iter().map(|x| x.to_string()).collect(), t.iter().map(|x| x.to_string()).collect()))
            .collect()
    }

    #[test]
    fn chain_graph_arcs() {
        let g = from_graph(&["X", "Y", "Z"], &[("X", "Y"), ("Y", "Z")], &[]).unwrap();
        assert_eq!(arc_set(&g), pairs(&[(&[], &["X"]), (&["X"], &["Y"]), (&["Y"], &["Z"])]));
    }

    #[test]
    fn undirected_path_arcs() {
        let g = from_graph(&["A", "B", "C"], &[], &[("A", "B"), ("B", "C")]).unwrap();
        assert_eq!(arc_set(&g), pairs(&[(&["B"], &["A"]), (&["A", "C"], &["B"]), (&["B"], &["C"])]));
    }

    #[test]
    fn lone_vertex() {
        let g = from_graph(&["X"], &[], &[]).unwrap();
        assert_eq!(arc_set(&g), pairs(&[(&[], &["X"])]));
    }

    #[test]
    fn from_graph_rejects_unknown_endpoint() {
        assert!(from_graph(&["X"], &[("X", "Q")], &[]).is_err());
    }

    #[test]
    fn dagger_of_single_arc() {
        let g = DirectedHypergraph::new(["X", "Y"], vec![Hyperarc::new("a", &["X"], &["Y"])]).unwrap();
        let d = dagger(&g).unwrap();
        assert_eq!(d.nodes(), &["X", "Y", "U__a"]);
        assert_eq!(
            arc_set(&d),
            pairs(&[(&[], &["U__a"]), (&["U__a", "X"], &["Y"]), (&["U__a"], &["X", "Y"])])
        );
    }

    #[test]
    fn dagger_of_empty_graph() {
        let g = DirectedHypergraph::new(["X"], vec![]).unwrap();
        let d = dagger(&g).unwrap();
        assert_eq!(d.nodes(), &["X"]);
        assert_eq!(arc_set(&d), pairs(&[(&[], &["X"])]));
    }

    #[test]
    fn dagger_counts_on_three_cycle() {
        let d = dagger(&three_cycle()).unwrap();
        assert_eq!(d.arcs().len(), 7);
        assert_eq!(d.nodes().len(), 6);
    }

    #[test]
    fn dagger_rejects_name_collision() {
        let g = DirectedHypergraph::new(["X", "U__a"], vec![Hyperarc::new("a", &["U__a"], &["X"])]).unwrap();
        assert!(matches!(dagger(&g), Err(Error::NoiseNameCollision(_))));
    }

    #[test]
    fn parallel_arcs() {
        let empty = DirectedHypergraph::new(["X"], vec![]).unwrap();
        assert_eq!(add_parallel_arcs(&empty, &[] as &[&str], &["X"], 0).unwrap(), empty);
        let two = add_parallel_arcs(&empty, &[] as &[&str], &["X"], 2).unwrap();
        assert_eq!(two.arcs().len(), 2);
        assert_ne!(two.arcs()[0].label, two.arcs()[1].label);
        assert_eq!(two.arcs()[0].sources, two.arcs()[1].sources);
        let more = add_parallel_arcs(&two, &[] as &[&str], &["X"], 3).unwrap();
        let labels: HashSet<_> = more.labels().into_iter().collect();
        assert_eq!(labels.len(), 5);
    }

    #[test]
    fn weakening_examples() {
        let strong = DirectedHypergraph::new(["X", "Y", "Z", "W"], vec![Hyperarc::new("s", &["X"], &["Y", "Z"])]).unwrap();
        let weak = DirectedHypergraph::new(["X", "Y", "Z", "W"], vec![Hyperarc::new("w", &["X", "W"], &["Y"])]).unwrap();
        let map = is_weakening(&strong, &weak).unwrap();
        assert_eq!(map["w"], "s");
        assert!(is_weakening(&weak, &strong).is_none());

        let chain = from_graph(&["X", "Y"], &[("X", "Y")], &[]).unwrap();
        let cycle = from_graph(&["X", "Y"], &[("X", "Y"), ("Y", "X")], &[]).unwrap();
        let map = is_weakening(&chain, &cycle).unwrap();
        assert_eq!(map["X"], "X");
        assert_eq!(map["Y"], "Y");
        assert!(is_weakening(&cycle, &chain).is_none());

        let one = DirectedHypergraph::new(["X"], vec![Hyperarc::new("a", &[] as &[&str], &["X"])]).unwrap();
        let two = add_parallel_arcs(&one, &[] as &[&str], &["X"], 1).unwrap();
        assert!(is_weakening(&one, &two).is_none());
    }

    #[test]
    fn deleting_an_arc_is_a_weakening() {
        let g = three_cycle();
        let smaller = g.without_arcs(|a| a.label == "Y");
        assert!(is_weakening(&g, &smaller).is_some());
    }

    #[test]
    fn coefficients_of_three_cycle() {
        let c = coefficient_vector(&three_cycle(), &["X", "Y", "Z"]).unwrap();
        for (names, v) in c.iter() {
            let expected = if names.len() == 3 { -1 } else { 0 };
            assert_eq!(v, expected, "{names:?}");
        }
    }

    #[test]
    fn coefficients_of_empty_and_single_root() {
        let empty = DirectedHypergraph::new(["X", "Y"], vec![]).unwrap();
        assert!(coefficient_vector(&empty, &["X", "Y"]).unwrap().iter().all(|(_, c)| c == -1));
        let root = from_graph(&["X"], &[], &[]).unwrap();
        assert_eq!(coefficient_vector(&root, &["X"]).unwrap().coefficient(&["X"]).unwrap(), 0);
    }

    #[test]
    fn json_round_trip_and_validation() {
        let g = three_cycle();
        assert_eq!(DirectedHypergraph::from_json(&g.to_json()).unwrap(), g);
        let bad = r#"{"nodes":["X"],"arcs":[{"label":"a","sources":["Y"],"targets":["X"]}]}"#;
        assert!(DirectedHypergraph::from_json(bad).is_err());
    }
}
