//! Structural equation models with one randomized equation per arc.

mod formula;
mod model;

pub use formula::{
    check_intervention, eval_formula, formula_probability, CausalFormula, Expr, FormulaProbability,
    InterventionReport,
};
pub use model::{derandomize_cpd, witness_to_psem, Grpsem, NOISE_SUM_TOLERANCE};
