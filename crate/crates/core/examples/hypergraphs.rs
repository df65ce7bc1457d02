//! Directed hypergraphs: building them from graphs, making noise explicit,
//! adding parallel arcs, testing weakening and reading off IDef coefficients.
//!
//!     cargo run --example hypergraphs

use qim::hypergraph::{add_parallel_arcs, coefficient_vector, dagger, from_graph, is_weakening, DirectedHypergraph, Hyperarc};

fn show(name: &str, g: &DirectedHypergraph) {
    println!("{name}:");
    for a in g.arcs() {
        let src: Vec<&str> = a.sources.iter().map(String::as_str).collect();
        let tgt: Vec<&str> = a.targets.iter().map(String::as_str).collect();
        println!("  {:<6} {{{}}} -> {{{}}}", a.label, src.join(","), tgt.join(","));
    }
}

fn main() -> qim::Result<()> {
    let cycle = from_graph(&["X", "Y", "Z"], &[("X", "Y"), ("Y", "Z"), ("Z", "X")], &[])?;
    show("3-cycle", &cycle);
    show("with noise made explicit", &dagger(&cycle)?);

    let undirected = from_graph(&["A", "B", "C"], &[], &[("A", "B"), ("B", "C")])?;
    show("undirected chain", &undirected);

    let single = DirectedHypergraph::new(["X", "Y"], vec![Hyperarc::new("f", &["X"], &["Y"])])?;
    show("two parallel copies", &add_parallel_arcs(&single, &["X"], &["Y"], 1)?);

    let collider = from_graph(&["A", "B", "C"], &[("A", "B"), ("C", "B")], &[])?;
    match is_weakening(&collider, &undirected) {
        Some(map) => println!("the undirected chain weakens the collider via {map:?}"),
        None => println!("no weakening map"),
    }
    println!("the reverse direction works too: {}", is_weakening(&undirected, &collider).is_some());

    println!("IDef coefficients of the 3-cycle:");
    for (subset, c) in coefficient_vector(&cycle, &["X", "Y", "Z"])?.iter() {
        println!("  {:<4} {c:+}", subset.join(""));
    }
    Ok(())
}
