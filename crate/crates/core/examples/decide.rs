//! Runs the general decision procedure on a handful of cases and prints the
//! verdict, the rule that settled it and any certificate.
//!
//!     cargo run --release --example decide

use qim::compat::{decide_general, CompatVerdict, GeneralOptions};
use qim::corpus::{anchored_pairs, copy_with_spare, three_cycle, xor_triple};
use qim::dist::{JointDistribution, Variable};
use qim::hypergraph::{from_graph, DirectedHypergraph, Hyperarc};

fn main() -> qim::Result<()> {
    let coins = JointDistribution::uniform(vec![Variable::binary("X"), Variable::binary("Y")])?;
    let roots = DirectedHypergraph::new(
        ["X", "Y"],
        vec![Hyperarc::new("x", &[] as &[&str], &["X"]), Hyperarc::new("y", &[] as &[&str], &["Y"])],
    )?;
    let cases = [
        ("coins, two roots", roots.clone(), coins.clone()),
        ("copy plus spare, two roots", roots, copy_with_spare()),
        ("coins, 2-cycle", from_graph(&["X", "Y"], &[("X", "Y"), ("Y", "X")], &[])?, coins),
        ("xor, 3-cycle", three_cycle(["X", "Y", "Z"]), xor_triple(["X", "Y", "Z"])),
        ("xor, collider", from_graph(&["X", "Y", "Z"], &[("X", "Z"), ("Y", "Z")], &[])?, xor_triple(["X", "Y", "Z"])),
        ("anchored pairs, 3-cycle", three_cycle(["A", "B", "C"]), anchored_pairs()),
    ];
    let options = GeneralOptions::default();
    for (name, g, d) in &cases {
        match decide_general(g, d, &options)? {
            CompatVerdict::Compatible { method, .. } => println!("{name:<28} compatible   ({method})"),
            CompatVerdict::Incompatible { certificate } => println!("{name:<28} incompatible {certificate:?}"),
            CompatVerdict::Unknown { reason, .. } => println!("{name:<28} unknown      {reason}"),
        }
    }
    Ok(())
}
