use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::dist::JointDistribution;
use crate::error::{Error, Result};
use crate::graph::Dag;
use crate::hypergraph::{add_parallel_arcs, is_weakening, DirectedHypergraph, Hyperarc};
use crate::scoring::{idef, siminc, NoiseSizes, SimincOptions, SimincResult};

use super::bn::{bn_violation, bn_witness, decide_bn};
use super::transport::{extend_to, transport_witness, with_unit_noise};
use super::{verify_witness, Witness};

/// Why a distribution cannot be compatible.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Certificate {
    /// Information deficiency above tolerance.
    Idef { bits: f64 },
    /// An exact characterization was violated.
    Exact { characterization: String, detail: String },
}

#[derive(Debug, Clone)]
pub enum CompatVerdict {
    Compatible { witness: Witness, method: String },
    Incompatible { certificate: Certificate },
    /// Neither certificate nor witness was found. Carries the best search result when a search ran.
    Unknown { best: Option<Box<SimincResult>>, reason: String },
}

impl CompatVerdict {
    pub fn status(&self) -> &'static str {
        match self {
            CompatVerdict::Compatible { .. } => "compatible",
            CompatVerdict::Incompatible { .. } => "incompatible",
            CompatVerdict::Unknown { .. } => "unknown",
        }
    }

    pub fn is_compatible(&self) -> bool {
        matches!(self, CompatVerdict::Compatible { .. })
    }

    pub fn is_incompatible(&self) -> bool {
        matches!(self, CompatVerdict::Incompatible { .. })
    }

    /// `Some(true)` / `Some(false)` for a decided verdict, `None` for unknown.
    pub fn decided(&self) -> Option<bool> {
        match self {
            CompatVerdict::Compatible { .. } => Some(true),
            CompatVerdict::Incompatible { .. } => Some(false),
            CompatVerdict::Unknown { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneralOptions {
    /// Tolerance for exact checks and the deficiency certificate.
    pub tol: f64,
    /// Search values below this count as reaching zero.
    pub compat_threshold: f64,
    /// Tolerance for verifying witnesses found by search.
    pub witness_tol: f64,
    /// Largest node count for which acyclic strengthenings are enumerated.
    pub max_order_nodes: usize,
    /// Noise sizes searched, in order, before the final search with `siminc.noise`.
    /// Small noise spaces are cheap and often enough.
    pub noise_ladder: Vec<NoiseSizes>,
    pub siminc: SimincOptions,
}

impl Default for GeneralOptions {
    fn default() -> Self {
        GeneralOptions {
            tol: 1e-9,
            compat_threshold: 1e-6,
            witness_tol: 1e-6,
            max_order_nodes: 6,
            noise_ladder: vec![NoiseSizes::Uniform(2), NoiseSizes::Uniform(4)],
            siminc: SimincOptions::default(),
        }
    }
}

fn exact(characterization: &str, detail: String) -> CompatVerdict {
    CompatVerdict::Incompatible { certificate: Certificate::Exact { characterization: characterization.into(), detail } }
}

fn names(set: &BTreeSet<String>) -> Vec<&str> {
    set.iter().map(String::as_str).collect()
}

/// Decides whether `mu` can arise from independent mechanisms along `graph`.
///
/// Tries, in order: structural cases with exact answers, a strengthening to an
/// acyclic graph whose independencies hold, the information-deficiency
/// certificate, and finally a SIMInc search. Every compatible verdict carries a
/// witness that has been re-verified against `mu`.
pub fn decide_general(graph: &DirectedHypergraph, mu: &JointDistribution, options: &GeneralOptions) -> Result<CompatVerdict> {
    for a in graph.arcs() {
        if let Some(n) = a.sources.iter().chain(&a.targets).find(|n| !mu.contains(n)) {
            return Err(Error::UnknownVariable(n.clone()));
        }
    }
    // Arcs with no targets constrain nothing; they get constant noise at the end.
    let vacuous: Vec<String> = graph.arcs().iter().filter(|a| a.targets.is_empty()).map(|a| a.label.clone()).collect();
    let arcs: Vec<Hyperarc> = graph.arcs().iter().filter(|a| !a.targets.is_empty()).cloned().collect();
    let mentioned: BTreeSet<&String> = arcs.iter().flat_map(|a| a.sources.iter().chain(&a.targets)).collect();
    let nodes: Vec<String> = mu.names().into_iter().filter(|n| mentioned.contains(n)).collect();
    let core_graph = DirectedHypergraph::new(nodes.clone(), arcs)?;
    let core_mu = mu.marginal(&nodes)?;

    let verdict = decide_core(&core_graph, &core_mu, options)?;
    let CompatVerdict::Compatible { witness, method } = verdict else {
        return Ok(verdict);
    };
    let witness = extend_to(&with_unit_noise(&witness, &vacuous)?, mu)?;
    let tol = if method == "siminc" { options.witness_tol } else { options.tol };
    let report = verify_witness(mu, graph, &witness, tol)?;
    if report.passed() {
        Ok(CompatVerdict::Compatible { witness, method })
    } else {
        Ok(CompatVerdict::Unknown { best: None, reason: format!("witness from {method} failed verification") })
    }
}

fn decide_core(graph: &DirectedHypergraph, mu: &JointDistribution, options: &GeneralOptions) -> Result<CompatVerdict> {
    if graph.arcs().is_empty() {
        return Ok(CompatVerdict::Compatible { witness: Witness::new(mu.clone(), BTreeMap::new())?, method: "empty".into() });
    }
    if let Some(v) = dag_case(graph, mu, options)? {
        return Ok(v);
    }
    if let Some(v) = parallel_case(graph, mu, options)? {
        return Ok(v);
    }
    if let Some(v) = dag_plus_one_case(graph, mu, options)? {
        return Ok(v);
    }
    if let Some(w) = acyclic_strengthening(graph, mu, options)? {
        return Ok(CompatVerdict::Compatible { witness: w, method: "acyclic-strengthening".into() });
    }
    let bits = idef(graph, mu)?;
    if bits > options.tol {
        return Ok(CompatVerdict::Incompatible { certificate: Certificate::Idef { bits } });
    }
    let mut best: Option<SimincResult> = None;
    let mut skipped = Vec::new();
    let ladder = options.noise_ladder.iter().chain(std::iter::once(&options.siminc.noise));
    for noise in ladder {
        let opts = SimincOptions { noise: noise.clone(), ..options.siminc.clone() };
        let r = match siminc(graph, mu, &opts) {
            Ok(r) => r,
            Err(Error::InvalidOption(msg)) => {
                skipped.push(msg);
                continue;
            }
            Err(e) => return Err(e),
        };
        if r.value < options.compat_threshold {
            let w = Witness::new(r.witness_candidate.clone(), r.arc_map.clone())?;
            if verify_witness(mu, graph, &w, options.witness_tol)?.passed() {
                return Ok(CompatVerdict::Compatible { witness: w, method: "siminc".into() });
            }
        }
        if best.as_ref().map_or(true, |b| r.value < b.value) {
            best = Some(r);
        }
    }
    let Some(best) = best else {
        return Ok(CompatVerdict::Unknown { best: None, reason: format!("search not attempted: {}", skipped.join("; ")) });
    };
    let reason = format!("search reached {:.3e} bits without a verified witness", best.value);
    Ok(CompatVerdict::Unknown { best: Some(Box::new(best)), reason })
}

/// Exactly the hypergraph of an acyclic graph: compatible iff its independencies hold.
fn dag_case(graph: &DirectedHypergraph, mu: &JointDistribution, options: &GeneralOptions) -> Result<Option<CompatVerdict>> {
    let Some((dag, labels)) = Dag::from_hypergraph(graph) else {
        return Ok(None);
    };
    if let Some(v) = bn_violation(&dag, mu, options.tol)? {
        return Ok(Some(exact(
            "bayesian-network",
            format!("`{}` shares {:.6} bits with its non-descendants given its parents", v.vertex, v.bits),
        )));
    }
    let w = bn_witness(&dag, mu)?;
    Ok(Some(CompatVerdict::Compatible { witness: relabel(&w, &labels)?, method: "bayesian-network".into() }))
}

/// Renames a vertex-keyed witness to the arc labels serving each vertex.
fn relabel(w: &Witness, labels: &BTreeMap<String, String>) -> Result<Witness> {
    let arc_map = w.arc_map().iter().map(|(v, u)| (labels[v].clone(), u.clone())).collect();
    Witness::new(w.joint().clone(), arc_map)
}

fn without(graph: &DirectedHypergraph, drop: &BTreeSet<String>) -> DirectedHypergraph {
    graph.without_arcs(|a| drop.contains(&a.label))
}

/// Repeated arcs `S → T`. If `S` determines `T`, the copies beyond one add
/// nothing; if not, the copies are impossible whenever the rest of the graph is
/// acyclic or gives `S` an unconditional mechanism.
fn parallel_case(graph: &DirectedHypergraph, mu: &JointDistribution, options: &GeneralOptions) -> Result<Option<CompatVerdict>> {
    let mut groups: BTreeMap<(Vec<&str>, Vec<&str>), Vec<String>> = BTreeMap::new();
    for a in graph.arcs() {
        groups.entry((names(&a.sources), names(&a.targets))).or_default().push(a.label.clone());
    }
    let Some(((src, tgt), labels)) = groups.into_iter().find(|(_, l)| l.len() >= 2) else {
        return Ok(None);
    };
    if mu.check_determines(&src, &tgt, options.tol)? {
        let extra: BTreeSet<String> = labels[1..].iter().cloned().collect();
        let reduced = without(graph, &extra);
        return Ok(Some(match decide_core(&reduced, mu, options)? {
            CompatVerdict::Compatible { witness, .. } => CompatVerdict::Compatible {
                witness: with_unit_noise(&witness, &labels[1..])?,
                method: "parallel-reduction".into(),
            },
            other => other,
        }));
    }
    let detail = format!("{src:?} does not determine {tgt:?}");
    let all: BTreeSet<String> = labels.iter().cloned().collect();
    let extra: BTreeSet<String> = labels[1..].iter().cloned().collect();
    for (drop, copies) in [(&all, labels.len()), (&extra, labels.len() - 1)] {
        let base = without(graph, drop);
        if copies >= 1 && Dag::from_hypergraph(&base).is_some() {
            return Ok(Some(exact("determination-over-acyclic-base", detail)));
        }
        let unconditional = src.is_empty()
            || base.arcs().iter().any(|b| b.sources.is_empty() && src.iter().all(|s| b.targets.contains(*s)));
        if copies >= 2 && unconditional {
            return Ok(Some(exact("determination-over-unconditional-source", detail)));
        }
    }
    Ok(None)
}

/// An acyclic graph's hypergraph plus one more arc: compatible iff the arc's
/// sources determine its targets and the graph's independencies hold.
fn dag_plus_one_case(
    graph: &DirectedHypergraph,
    mu: &JointDistribution,
    options: &GeneralOptions,
) -> Result<Option<CompatVerdict>> {
    for a in graph.arcs() {
        let base = without(graph, &BTreeSet::from([a.label.clone()]));
        let Some((dag, labels)) = Dag::from_hypergraph(&base) else {
            continue;
        };
        if !mu.check_determines(&names(&a.sources), &names(&a.targets), options.tol)? {
            return Ok(Some(exact(
                "determination-over-acyclic-base",
                format!("{:?} does not determine {:?}", a.sources, a.targets),
            )));
        }
        if let Some(v) = bn_violation(&dag, mu, options.tol)? {
            return Ok(Some(exact(
                "bayesian-network",
                format!("`{}` shares {:.6} bits with its non-descendants given its parents", v.vertex, v.bits),
            )));
        }
        let w = relabel(&bn_witness(&dag, mu)?, &labels)?;
        return Ok(Some(CompatVerdict::Compatible {
            witness: with_unit_noise(&w, std::slice::from_ref(&a.label))?,
            method: "determination-over-acyclic-base".into(),
        }));
    }
    Ok(None)
}

/// Looks for an acyclic graph whose hypergraph weakens to `graph` and whose
/// independencies `mu` satisfies; its witness then transports to `graph`.
///
/// Each topological order gives the largest candidate: a targeted vertex takes
/// as parents the earlier sources of its arc, an untargeted vertex takes every
/// earlier vertex.
fn acyclic_strengthening(
    graph: &DirectedHypergraph,
    mu: &JointDistribution,
    options: &GeneralOptions,
) -> Result<Option<Witness>> {
    let nodes = graph.nodes().to_vec();
    if nodes.len() > options.max_order_nodes {
        return Ok(None);
    }
    let mut arc_for: BTreeMap<&String, &Hyperarc> = BTreeMap::new();
    for a in graph.arcs() {
        if a.targets.len() != 1 {
            return Ok(None);
        }
        if arc_for.insert(a.targets.iter().next().unwrap(), a).is_some() {
            return Ok(None);
        }
    }
    let mut order: Vec<usize> = (0..nodes.len()).collect();
    loop {
        let mut parents = BTreeMap::new();
        for (k, &i) in order.iter().enumerate() {
            let earlier: BTreeSet<String> = order[..k].iter().map(|&j| nodes[j].clone()).collect();
            let pa = match arc_for.get(&nodes[i]) {
                Some(a) => a.sources.intersection(&earlier).cloned().collect(),
                None => earlier,
            };
            parents.insert(nodes[i].clone(), pa);
        }
        let dag = Dag::from_parents(nodes.clone(), parents)?;
        if decide_bn(&dag, mu)? {
            let strong = dag.hypergraph();
            if let Some(iota) = is_weakening(&strong, graph) {
                let w = bn_witness(&dag, mu)?;
                return Ok(Some(transport_witness(&strong, graph, &iota, &w)?));
            }
        }
        if !next_permutation(&mut order) {
            return Ok(None);
        }
    }
}

fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).unwrap();
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Which structural side condition licenses an exact answer for `n` added `X → Y` arcs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ParallelClause {
    /// The base is an acyclic graph's hypergraph and `n >= 1`.
    AcyclicBase,
    /// Some base arc has no sources and targets all of `X`, and `n >= 2`.
    UnconditionalSource,
}

#[derive(Debug, Clone)]
pub struct ParallelReport {
    pub clause: ParallelClause,
    /// Whether `X` determines `Y` under `mu`.
    pub determines: bool,
    /// Compatibility with the base hypergraph; `None` if undecided.
    pub base: Option<bool>,
    /// `determines && base`, the exact answer for the augmented hypergraph.
    pub compatible: Option<bool>,
    /// The general procedure's verdict on the augmented hypergraph.
    pub augmented: Option<bool>,
    /// Witness for the augmented hypergraph when compatible.
    pub witness: Option<Witness>,
}

impl ParallelReport {
    /// Both answers are known and equal.
    pub fn agrees(&self) -> bool {
        self.compatible.is_some() && self.compatible == self.augmented
    }
}

/// Decides compatibility of `base` plus `n` parallel arcs `X → Y` from
/// determination and compatibility with `base`, and cross-checks against the
/// general procedure on the augmented hypergraph.
pub fn decide_parallel_func<S: AsRef<str>, T: AsRef<str>>(
    base: &DirectedHypergraph,
    x: &[S],
    y: &[T],
    n: usize,
    mu: &JointDistribution,
    clause: ParallelClause,
    options: &GeneralOptions,
) -> Result<ParallelReport> {
    let ok = match clause {
        ParallelClause::AcyclicBase => n >= 1 && Dag::from_hypergraph(base).is_some(),
        ParallelClause::UnconditionalSource => {
            n >= 2
                && (x.is_empty()
                    || base
                        .arcs()
                    .iter()
                        .any(|a| a.sources.is_empty() && x.iter().all(|s| a.targets.contains(s.as_ref()))))
        }
    };
    if !ok {
        return Err(Error::Precondition(format!("side condition of {clause:?} does not hold")));
    }
    let augmented_graph = add_parallel_arcs(base, x, y, n)?;
    let added: Vec<String> = augmented_graph.arcs()[base.arcs().len()..].iter().map(|a| a.label.clone()).collect();
    let determines = mu.check_determines(x, y, options.tol)?;
    let base_verdict = decide_general(base, mu, options)?;
    let base_known = base_verdict.decided();
    let compatible = if !determines { Some(false) } else { base_known };
    let witness = match (&base_verdict, determines) {
        (CompatVerdict::Compatible { witness, .. }, true) => Some(with_unit_noise(witness, &added)?),
        _ => None,
    };
    let augmented = decide_general(&augmented_graph, mu, options)?.decided();
    Ok(ParallelReport { clause, determines, base: base_known, compatible, augmented, witness })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::Variable;
    use crate::hypergraph::from_graph;

    fn quick() -> GeneralOptions {
        GeneralOptions { siminc: SimincOptions { restarts: 2, ..Default::default() }, ..Default::default() }
    }

    fn xor() -> JointDistribution {
        let vars = vec![Variable::binary("X"), Variable::binary("Y"), Variable::binary("Z")];
        JointDistribution::from_fn(vars, |s| if s[2] == s[0] ^ s[1] { 1.0 } else { 0.0 }).unwrap()
    }

    #[test]
    fn two_cycle_is_always_compatible() {
        let mu = JointDistribution::new(vec![Variable::binary("X"), Variable::binary("Y")], vec![0.1, 0.2, 0.3, 0.4])
            .unwrap();
        let g = from_graph(&["X", "Y"], &[("X", "Y"), ("Y", "X")], &[]).unwrap();
        let v = decide_general(&g, &mu, &quick()).unwrap();
        assert!(v.is_compatible(), "{v:?}");
    }

    #[test]
    fn three_cycle_rejects_xor_by_deficiency() {
        let g = from_graph(&["X", "Y", "Z"], &[("X", "Y"), ("Y", "Z"), ("Z", "X")], &[]).unwrap();
        match decide_general(&g, &xor(), &quick()).unwrap() {
            CompatVerdict::Incompatible { certificate: Certificate::Idef { bits } } => assert!((bits - 1.0).abs() < 1e-9),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn double_arc_needs_a_point_mass() {
        let g = DirectedHypergraph::new(
            ["X"],
            vec![Hyperarc::new("1", &[] as &[&str], &["X"]), Hyperarc::new("2", &[] as &[&str], &["X"])],
        )
        .unwrap();
        let point = JointDistribution::point_mass(vec![Variable::binary("X")], &[1]).unwrap();
        assert!(decide_general(&g, &point, &quick()).unwrap().is_compatible());
        let coin = JointDistribution::uniform(vec![Variable::binary("X")]).unwrap();
        assert!(decide_general(&g, &coin, &quick()).unwrap().is_incompatible());
    }

    #[test]
    fn chain_with_deterministic_extra_arc() {
        let vars = vec![Variable::binary("X"), Variable::binary("Y")];
        let mu = JointDistribution::new(vars, vec![0.3, 0.0, 0.0, 0.7]).unwrap();
        let chain = from_graph(&["X", "Y"], &[("X", "Y")], &[]).unwrap();
        let r = decide_parallel_func(&chain, &["X"], &["Y"], 1, &mu, ParallelClause::AcyclicBase, &quick()).unwrap();
        assert_eq!(r.compatible, Some(true));
        assert!(r.agrees());
        let w = r.witness.unwrap();
        let aug = add_parallel_arcs(&chain, &["X"], &["Y"], 1).unwrap();
        assert!(verify_witness(&mu, &aug, &w, 1e-9).unwrap().passed());
    }

    #[test]
    fn side_conditions_are_enforced() {
        let cycle = from_graph(&["X", "Y"], &[("X", "Y"), ("Y", "X")], &[]).unwrap();
        let mu = JointDistribution::uniform(vec![Variable::binary("X"), Variable::binary("Y")]).unwrap();
        let r = decide_parallel_func(&cycle, &["X"], &["Y"], 1, &mu, ParallelClause::AcyclicBase, &quick());
        assert!(matches!(r, Err(Error::Precondition(_))));
    }

    #[test]
    fn permutations_cover_all_orders() {
        let mut p = vec![0, 1, 2];
        let mut count = 1;
        while next_permutation(&mut p) {
            count += 1;
        }
        assert_eq!(count, 6);
    }
}
