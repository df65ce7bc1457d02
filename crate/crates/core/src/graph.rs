//! Directed acyclic graphs over named vertices.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::hypergraph::{from_graph, DirectedHypergraph};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dag {
    vertices: Vec<String>,
    parents: BTreeMap<String, BTreeSet<String>>,
    order: Vec<String>,
}

impl Dag {
    pub fn new<S: AsRef<str>>(vertices: &[S], edges: &[(S, S)]) -> Result<Dag> {
        let vertices: Vec<String> = vertices.iter().map(|v| v.as_ref().to_string()).collect();
        let mut parents: BTreeMap<String, BTreeSet<String>> =
            vertices.iter().map(|v| (v.clone(), BTreeSet::new())).collect();
        if parents.len() != vertices.len() {
            return Err(Error::InvalidHypergraph("repeated vertex".into()));
        }
        for (a, b) in edges {
            let (a, b) = (a.as_ref(), b.as_ref());
            if !parents.contains_key(a) {
                return Err(Error::InvalidHypergraph(format!("edge endpoint `{a}` is not a vertex")));
            }
            parents
                .get_mut(b)
                .ok_or_else(|| Error::InvalidHypergraph(format!("edge endpoint `{b}` is not a vertex")))?
                .insert(a.to_string());
        }
        Dag::from_parents(vertices, parents)
    }

    pub(crate) fn from_parents(vertices: Vec<String>, parents: BTreeMap<String, BTreeSet<String>>) -> Result<Dag> {
        // Kahn's algorithm, taking ready vertices in declaration order.
        let mut remaining: BTreeMap<&str, usize> =
            vertices.iter().map(|v| (v.as_str(), parents[v].len())).collect();
        let mut order = Vec::with_capacity(vertices.len());
        while order.len() < vertices.len() {
            let next = vertices
                .iter()
                .find(|v| remaining.get(v.as_str()) == Some(&0))
                .ok_or(Error::CyclicGraph)?
                .clone();
            remaining.remove(next.as_str());
            for v in &vertices {
                if parents[v].contains(&next) {
                    if let Some(c) = remaining.get_mut(v.as_str()) {
                        *c -= 1;
                    }
                }
            }
            order.push(next);
        }
        Ok(Dag { vertices, parents, order })
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn parents(&self, v: &str) -> &BTreeSet<String> {
        &self.parents[v]
    }

    /// Parents of `v` listed in vertex order.
    pub fn parents_ordered(&self, v: &str) -> Vec<String> {
        self.vertices.iter().filter(|u| self.parents[v].contains(*u)).cloned().collect()
    }

    pub fn edges(&self) -> Vec<(String, String)> {
        self.vertices
            .iter()
            .flat_map(|v| self.parents_ordered(v).into_iter().map(move |p| (p, v.clone())))
            .collect()
    }

    pub fn topological_order(&self) -> &[String] {
        &self.order
    }

    pub fn descendants(&self, v: &str) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        let mut stack = vec![v.to_string()];
        while let Some(u) = stack.pop() {
            for w in &self.vertices {
                if self.parents[w].contains(&u) && out.insert(w.clone()) {
                    stack.push(w.clone());
                }
            }
        }
        out
    }

    /// Vertices that are neither `v` nor its descendants, in vertex order.
    pub fn nondescendants(&self, v: &str) -> Vec<String> {
        let desc = self.descendants(v);
        self.vertices.iter().filter(|u| *u != v && !desc.contains(*u)).cloned().collect()
    }

    /// The hypergraph with one arc `Pa(u) → {u}` per vertex, labelled `u`.
    pub fn hypergraph(&self) -> DirectedHypergraph {
        let edges = self.edges();
        from_graph(&self.vertices, &edges, &[]).expect("vertices are consistent")
    }

    /// Recognizes hypergraphs of the form produced by [`Dag::hypergraph`]: every node
    /// is the sole target of exactly one arc and the induced graph is acyclic.
    /// Returns the graph and the arc label serving each vertex.
    pub fn from_hypergraph(graph: &DirectedHypergraph) -> Option<(Dag, BTreeMap<String, String>)> {
        if graph.arcs().len() != graph.nodes().len() {
            return None;
        }
        let mut parents = BTreeMap::new();
        let mut labels = BTreeMap::new();
        for a in graph.arcs() {
            if a.targets.len() != 1 {
                return None;
            }
            let t = a.targets.iter().next().unwrap().clone();
            if a.sources.contains(&t) || parents.insert(t.clone(), a.sources.clone()).is_some() {
                return None;
            }
            labels.insert(t, a.label.clone());
        }
        let dag = Dag::from_parents(graph.nodes().to_vec(), parents).ok()?;
        Some((dag, labels))
    }
}

/// Every acyclic orientation pattern on the given vertices: each unordered pair is
/// absent, forward, or backward, and cyclic results are skipped.
pub fn enumerate_dags<S: AsRef<str>>(vertices: &[S]) -> Vec<Dag> {
    let names: Vec<&str> = vertices.iter().map(|v| v.as_ref()).collect();
    let pairs: Vec<(usize, usize)> =
        (0..names.len()).flat_map(|i| (i + 1..names.len()).map(move |j| (i, j))).collect();
    let total = 3usize.pow(pairs.len() as u32);
    let mut out = Vec::new();
    for mut code in 0..total {
        let mut edges = Vec::new();
        for &(i, j) in &pairs {
            match code % 3 {
                1 => edges.push((names[i], names[j])),
                2 => edges.push((names[j], names[i])),
                _ => {}
            }
            code /= 3;
        }
        if let Ok(d) = Dag::new(&names, &edges) {
            out.push(d);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_vertices_have_25_dags() {
        assert_eq!(enumerate_dags(&["A", "B", "C"]).len(), 25);
        assert_eq!(enumerate_dags(&["A", "B", "C", "D"]).len(), 543);
    }

    #[test]
    fn cycles_are_rejected() {
        assert!(matches!(Dag::new(&["A", "B"], &[("A", "B"), ("B", "A")]), Err(Error::CyclicGraph)));
    }

    #[test]
    fn nondescendants_of_chain() {
        let g = Dag::new(&["X", "Y", "Z"], &[("X", "Y"), ("Y", "Z")]).unwrap();
        assert_eq!(g.nondescendants("Y"), vec!["X"]);
        assert!(g.nondescendants("X").is_empty());
        assert_eq!(g.topological_order(), &["X", "Y", "Z"]);
    }

    #[test]
    fn hypergraph_round_trip() {
        let g = Dag::new(&["A", "B", "C"], &[("A", "B"), ("C", "B")]).unwrap();
        let (back, labels) = Dag::from_hypergraph(&g.hypergraph()).unwrap();
        assert_eq!(back, g);
        assert_eq!(labels["B"], "B");
        let cycle = crate::hypergraph::from_graph(&["X", "Y"], &[("X", "Y"), ("Y", "X")], &[]).unwrap();
        assert!(Dag::from_hypergraph(&cycle).is_none());
    }
}
