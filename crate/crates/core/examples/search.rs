//! Searches for the extension closest to a witness. The value is zero exactly
//! when the distribution is compatible and never falls below IDef.
//!
//!     cargo run --release --example search

use qim::corpus::{anchored_pairs, three_cycle, xor_triple};
use qim::scoring::{idef, siminc, NoiseSizes, SimincOptions};

fn main() -> qim::Result<()> {
    let g = three_cycle(["A", "B", "C"]);
    for (name, d) in [("anchored pairs", anchored_pairs()), ("xor", xor_triple(["A", "B", "C"]))] {
        let opts = SimincOptions { noise: NoiseSizes::Uniform(2), restarts: 4, seed: 7, ..Default::default() };
        let r = siminc(&g, &d, &opts)?;
        println!("{name}: idef {:+.4}, search {:.6} after {} restarts ({:?})", idef(&g, &d)?, r.value, r.restarts_used, r.parametrization);
        println!("  independence gap {:.6}", r.breakdown.independence_gap);
        for (arc, bits) in &r.breakdown.arc_conditional_entropy {
            println!("  residual on {arc}: {bits:.6}");
        }
        println!("  restart values {:?}", r.restart_values);
    }
    Ok(())
}
