//! Structural equation models: solutions, the arising distribution,
//! interventions, do-events and box/diamond formulas.
//!
//!     cargo run --example causal

use std::collections::BTreeMap;

use qim::causal::{check_intervention, derandomize_cpd, formula_probability, CausalFormula, Expr, Grpsem};
use qim::compat::Witness;
use qim::dist::Variable;
use qim::hypergraph::from_graph;

fn response(rows: &[Vec<f64>]) -> qim::Result<(Vec<String>, Vec<f64>)> {
    let u = derandomize_cpd("U", rows)?;
    Ok((u.variables()[0].values().to_vec(), u.probs().to_vec()))
}

fn main() -> qim::Result<()> {
    // X -> Y, with function-valued noise reproducing p(x) and p(y | x).
    let g = from_graph(&["X", "Y"], &[("X", "Y")], &[])?;
    let noise = vec![response(&[vec![0.3, 0.7]])?, response(&[vec![0.9, 0.1], vec![0.2, 0.8]])?];
    // Rows run over source settings, then noise values: noise value k maps x
    // to digit x of k in base 2, most significant first.
    let eq_y = (0..2).flat_map(|x| (0..4).map(move |k| (k >> (1 - x)) & 1)).collect();
    let equations = vec![vec![0, 1], eq_y];
    let m = Grpsem::new(g, vec![Variable::binary("X"), Variable::binary("Y")], noise, equations)?;

    let arising = m.arising_distribution()?;
    println!("arising distribution on X, Y: {:?}", arising.marginal(&["X", "Y"])?.probs());

    let forced = m.intervene(&[("X", "1")])?;
    println!("after X <- 1: {:?}", forced.arising_distribution()?.marginal(&["Y"])?.probs());

    let event = m.do_event(&[("X", "1")])?;
    println!("do-event X <- 1 has probability {}", event.probability(&m.noise_distribution())?);

    let phi = CausalFormula::boxed(&[("X", "1")], Expr::eq("Y", "1"));
    println!("P([X <- 1] Y = 1) = {}", formula_probability(&m, &phi)?.probability);

    let map = BTreeMap::from([("X".to_string(), "U__X".to_string()), ("Y".to_string(), "U__Y".to_string())]);
    let w = Witness::new(arising, map)?;
    let r = check_intervention(&w, &m, &[("X", "1")], &Expr::eq("Y", "1"), 1e-9)?;
    println!(
        "conditioning on the do-event: box {:?} <= conditional {:?} <= diamond {:?}",
        r.box_probability, r.conditional_probability, r.diamond_probability
    );

    // A copy loop has two solutions in every context, so box and diamond split.
    let lp = from_graph(&["X", "Y"], &[("X", "Y"), ("Y", "X")], &[])?;
    let unit = || (vec!["*".to_string()], vec![1.0]);
    let copy = Grpsem::new(lp, vec![Variable::binary("X"), Variable::binary("Y")], vec![unit(), unit()], vec![vec![0, 1], vec![0, 1]])?;
    println!("copy loop solutions: {:?}", copy.solutions(&[0, 0]));
    let x0 = Expr::eq("X", "0");
    let boxed = formula_probability(&copy, &CausalFormula::boxed(&[], x0.clone()))?.probability;
    let diamond = formula_probability(&copy, &CausalFormula::diamond(&[], x0))?.probability;
    println!("P([] X = 0) = {boxed}, P(<> X = 0) = {diamond}");
    Ok(())
}
