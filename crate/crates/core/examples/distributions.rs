//! Builds a small joint distribution and reads off its basic structure:
//! marginals, conditioning, determination, independence and the information profile.
//!
//!     cargo run --example distributions

use qim::dist::{Event, JointDistribution, Variable};
use qim::info::{co_information, entropy, information_profile};

fn main() -> qim::Result<()> {
    // Two fair coins and their parity.
    let vars = ["X", "Y", "Z"].map(Variable::binary).to_vec();
    let d = JointDistribution::from_fn(vars, |s| if s[2] == s[0] ^ s[1] { 1.0 } else { 0.0 })?;
    println!("joint: {}", d.to_json());
    println!("marginal on X, Y: {:?}", d.marginal(&["X", "Y"])?.probs());

    let z0 = Event::new(&d, &["Z"], [0])?;
    println!("given Z = 0: {:?}", d.condition(&z0)?.probs());

    println!("X, Y determine Z: {}", d.check_determines(&["X", "Y"], &["Z"], 1e-12)?);
    println!("X alone determines Z: {}", d.check_determines(&["X"], &["Z"], 1e-12)?);
    println!("X independent of Y: {}", d.check_ci(&["X"], &["Y"], &[] as &[&str], 1e-12)?);
    println!("X independent of Y given Z: {}", d.check_ci(&["X"], &["Y"], &["Z"], 1e-12)?);

    println!("H(X, Y, Z) = {} bits", entropy(&d, &["X", "Y", "Z"])?);
    let co = co_information(&d, &[["X"], ["Y"], ["Z"]], &[] as &[&str])?;
    println!("I(X; Y; Z) = {co} bits");
    println!("information profile:");
    for (atom, bits) in information_profile(&d)?.iter() {
        println!("  {:<10} {bits:+.3}", atom.join(""));
    }
    Ok(())
}
