//! Information deficiency of a few distributions against a few structures.
//! A positive value rules out compatibility; zero or below is inconclusive.
//!
//!     cargo run --example deficiency

use qim::corpus::{anchored_pairs, three_cycle, xor_triple};
use qim::hypergraph::{coefficient_vector, from_graph};
use qim::info::information_profile;
use qim::scoring::{certify_incompatible, idef};

fn main() -> qim::Result<()> {
    let xor = xor_triple(["A", "B", "C"]);
    let pairs = anchored_pairs();
    let structures = [
        ("3-cycle", three_cycle(["A", "B", "C"])),
        ("collider A -> C <- B", from_graph(&["A", "B", "C"], &[("A", "C"), ("B", "C")], &[])?),
        ("chain A -> B -> C", from_graph(&["A", "B", "C"], &[("A", "B"), ("B", "C")], &[])?),
    ];
    for (name, g) in &structures {
        for (dname, d) in [("xor", &xor), ("anchored pairs", &pairs)] {
            let bits = idef(g, d)?;
            let certain = certify_incompatible(g, d, 1e-9)?;
            println!("{name:<22} {dname:<15} idef {bits:+.4}  {}", if certain { "incompatible" } else { "inconclusive" });
        }
    }

    // The same number as a dot product of coefficients with the profile.
    let g = &structures[0].1;
    let dot = coefficient_vector(g, &["A", "B", "C"])?.dot(&information_profile(&xor)?)?;
    println!("coefficients . profile = {dot:+.4}");
    Ok(())
}
