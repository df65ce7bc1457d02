//! Witnesses: build one for a Bayesian network, check it, move it along a
//! weakening, and turn it into a structural equation model.
//!
//!     cargo run --example witnesses

use qim::causal::witness_to_psem;
use qim::compat::{bn_witness, decide_bn, transport_witness, verify_witness};
use qim::corpus::xor_triple;
use qim::graph::Dag;
use qim::hypergraph::{from_graph, is_weakening};
use qim::info::conditional_mutual_information;

fn main() -> qim::Result<()> {
    // B is the parity of A and C: a collider A -> B <- C.
    let d = xor_triple(["A", "C", "B"]).reordered(&["A", "B", "C"])?;
    let collider = Dag::new(&["A", "B", "C"], &[("A", "B"), ("C", "B")])?;
    println!("collider fits: {}", decide_bn(&collider, &d)?);

    let w = bn_witness(&collider, &d)?;
    let report = verify_witness(&d, &collider.hypergraph(), &w, 1e-12)?;
    println!("witness over {:?} passes: {}", w.joint().names(), report.passed());

    // The undirected chain A - B - C is weaker, so the witness carries over
    // even though A and C are dependent given B.
    let chain = from_graph(&["A", "B", "C"], &[], &[("A", "B"), ("B", "C")])?;
    let iota = is_weakening(&collider.hypergraph(), &chain).expect("chain weakens the collider");
    let moved = transport_witness(&collider.hypergraph(), &chain, &iota, &w)?;
    println!("transported witness passes: {}", verify_witness(&d, &chain, &moved, 1e-12)?.passed());
    println!("I(A; C | B) = {} bits", conditional_mutual_information(&d, &["A"], &["C"], &["B"])?);

    // Noise values the witness never uses leave equation rows to fill in.
    let (model, complete) = witness_to_psem(&w, &collider.hypergraph())?;
    println!("equations read off the witness; no rows filled in: {complete}");
    let back = model.extension_from_witness(&w)?;
    println!("witness lies in the model's solution set: {}", model.in_solution_set(&back, 1e-12)?);
    Ok(())
}
