use serde::{Deserialize, Serialize};

use crate::compat::Witness;
use crate::dist::{JointDistribution, Variable, NO_VARS};
use crate::error::{Error, Result};
use crate::info::conditional_mutual_information;

use super::model::Grpsem;

/// A Boolean expression over endogenous variables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expr {
    True,
    /// `variable = value`, by value label.
    Eq(String, String),
    Not(Box<Expr>),
    And(Vec<Expr>),
}

impl Expr {
    pub fn eq(var: impl Into<String>, value: impl Into<String>) -> Expr {
        Expr::Eq(var.into(), value.into())
    }

    pub fn not(e: Expr) -> Expr {
        Expr::Not(Box::new(e))
    }

    pub fn or(parts: Vec<Expr>) -> Expr {
        Expr::not(Expr::And(parts.into_iter().map(Expr::not).collect()))
    }

    fn resolve(&self, vars: &[Variable]) -> Result<Resolved> {
        Ok(match self {
            Expr::True => Resolved::And(Vec::new()),
            Expr::Eq(name, value) => {
                let p = vars.iter().position(|v| v.name() == name).ok_or_else(|| Error::UnknownVariable(name.clone()))?;
                let i = vars[p]
                    .value_index(value)
                    .ok_or_else(|| Error::UnknownValue { name: name.clone(), value: value.clone() })?;
                Resolved::Eq(p, i)
            }
            Expr::Not(e) => Resolved::Not(Box::new(e.resolve(vars)?)),
            Expr::And(es) => Resolved::And(es.iter().map(|e| e.resolve(vars)).collect::<Result<_>>()?),
        })
    }
}

enum Resolved {
    Eq(usize, usize),
    Not(Box<Resolved>),
    And(Vec<Resolved>),
}

impl Resolved {
    fn holds(&self, x: &[usize]) -> bool {
        match self {
            Resolved::Eq(p, i) => x[*p] == *i,
            Resolved::Not(e) => !e.holds(x),
            Resolved::And(es) => es.iter().all(|e| e.holds(x)),
        }
    }
}

/// Boolean combinations of `[Y←y]φ` (at every solution) and `⟨Y←y⟩φ` (at some solution).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CausalFormula {
    Box { assign: Vec<(String, String)>, then: Expr },
    Diamond { assign: Vec<(String, String)>, then: Expr },
    Not(Box<CausalFormula>),
    And(Vec<CausalFormula>),
}

impl CausalFormula {
    pub fn boxed(assign: &[(&str, &str)], then: Expr) -> CausalFormula {
        CausalFormula::Box { assign: owned(assign), then }
    }

    pub fn diamond(assign: &[(&str, &str)], then: Expr) -> CausalFormula {
        CausalFormula::Diamond { assign: owned(assign), then }
    }
}

fn owned(assign: &[(&str, &str)]) -> Vec<(String, String)> {
    assign.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
}

enum Compiled {
    Modal { universal: bool, model: Grpsem, body: Resolved },
    Not(Box<Compiled>),
    And(Vec<Compiled>),
}

fn compile(m: &Grpsem, phi: &CausalFormula) -> Result<Compiled> {
    Ok(match phi {
        CausalFormula::Box { assign, then } | CausalFormula::Diamond { assign, then } => Compiled::Modal {
            universal: matches!(phi, CausalFormula::Box { .. }),
            model: m.intervene(assign)?,
            body: then.resolve(m.variables())?,
        },
        CausalFormula::Not(f) => Compiled::Not(Box::new(compile(m, f)?)),
        CausalFormula::And(fs) => Compiled::And(fs.iter().map(|f| compile(m, f)).collect::<Result<_>>()?),
    })
}

impl Compiled {
    /// Truth value in context `u`, and whether some modality met an empty solution set.
    fn eval(&self, u: &[usize]) -> (bool, bool) {
        match self {
            Compiled::Modal { universal, model, body } => {
                let sols = model.solutions(u);
                let value = if *universal { sols.iter().all(|x| body.holds(x)) } else { sols.iter().any(|x| body.holds(x)) };
                (value, sols.is_empty())
            }
            Compiled::Not(f) => {
                let (v, e) = f.eval(u);
                (!v, e)
            }
            Compiled::And(fs) => fs.iter().fold((true, false), |(v, e), f| {
                let (fv, fe) = f.eval(u);
                (v && fv, e || fe)
            }),
        }
    }
}

/// Truth of `phi` in context `u` (noise value indices, arc order).
///
/// A context with no solutions makes every `[Y←y]φ` true and every `⟨Y←y⟩φ` false.
pub fn eval_formula(m: &Grpsem, u: &[usize], phi: &CausalFormula) -> Result<bool> {
    if u.len() != m.noise().len() || u.iter().zip(m.noise()).any(|(&i, v)| i >= v.cardinality()) {
        return Err(Error::InvalidModel("context does not match the model's noise variables".into()));
    }
    Ok(compile(m, phi)?.eval(u).0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FormulaProbability {
    pub probability: f64,
    /// Mass of contexts where some modality had no solutions, so its value was vacuous.
    pub vacuous_mass: f64,
}

/// Noise probability of the contexts in which `phi` holds.
pub fn formula_probability(m: &Grpsem, phi: &CausalFormula) -> Result<FormulaProbability> {
    let compiled = compile(m, phi)?;
    let mut out = FormulaProbability { probability: 0.0, vacuous_mass: 0.0 };
    for (u, p) in m.contexts() {
        let (v, empty) = compiled.eval(&u);
        if v {
            out.probability += p;
        }
        if empty {
            out.vacuous_mass += p;
        }
    }
    Ok(out)
}

/// Comparison of conditioning a witness on a do-event against intervening in its model.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InterventionReport {
    /// Probability of the do-event under the witness. Zero means the remaining
    /// fields are not applicable.
    pub do_event_probability: f64,
    /// Mutual information between intervened and remaining noise, in bits.
    pub noise_dependence: f64,
    pub applicable: bool,
    /// Whether the conditioned witness, with fresh intervened noise, is a
    /// solution distribution of the intervened model.
    pub in_solution_set: Option<bool>,
    pub box_probability: Option<f64>,
    pub conditional_probability: Option<f64>,
    pub diamond_probability: Option<f64>,
    pub sandwich_holds: Option<bool>,
    /// Total variation between the conditioned witness and the intervened
    /// model's arising distribution on the endogenous variables, when the
    /// intervened model has a unique solution in every context.
    pub arising_distance: Option<f64>,
}

/// Checks that conditioning `w` on `do(assignment)` behaves like intervening in `m`:
/// the result can arise from the intervened model, and
/// `P([X←x]φ) ≤ w(φ | do) ≤ P(⟨X←x⟩φ)` within `tol`.
pub fn check_intervention(
    w: &Witness,
    m: &Grpsem,
    assignment: &[(&str, &str)],
    phi: &Expr,
    tol: f64,
) -> Result<InterventionReport> {
    let nu = m.extension_from_witness(w)?;
    let event = m.do_event(assignment)?;
    let p_event = event.probability(&nu)?;
    let endogenous: Vec<String> = m.variables().iter().map(|v| v.name().to_string()).collect();
    let intervened_arcs: Vec<usize> = (0..m.structure().arcs().len())
        .filter(|&a| assignment.iter().any(|(x, _)| m.structure().arcs()[a].targets.contains(*x)))
        .collect();
    let fresh: Vec<String> = intervened_arcs.iter().map(|&a| m.noise()[a].name().to_string()).collect();
    let kept: Vec<String> =
        m.noise().iter().map(|v| v.name().to_string()).filter(|n| !fresh.contains(n)).collect();
    let noise_dependence = if kept.is_empty() || fresh.is_empty() {
        0.0
    } else {
        conditional_mutual_information(&nu, &fresh, &kept, &NO_VARS)?
    };
    let mut report = InterventionReport {
        do_event_probability: p_event,
        noise_dependence,
        applicable: p_event > 0.0,
        in_solution_set: None,
        box_probability: None,
        conditional_probability: None,
        diamond_probability: None,
        sandwich_holds: None,
        arising_distance: None,
    };
    if p_event <= 0.0 {
        return Ok(report);
    }
    if noise_dependence > tol {
        return Err(Error::Precondition(format!(
            "intervened noise shares {noise_dependence} bits with the remaining noise"
        )));
    }
    let conditioned = nu.condition(&event)?;
    let intervened = m.intervene(assignment)?;

    let mut rest = endogenous.clone();
    rest.extend(kept.iter().cloned());
    let mut resampled = conditioned.marginal(&rest)?;
    for &a in &intervened_arcs {
        let fresh_noise = JointDistribution::new(vec![m.noise()[a].clone()], m.noise_probs(a).to_vec())?;
        resampled = resampled.product(&fresh_noise)?;
    }
    report.in_solution_set = Some(intervened.in_solution_set(&resampled, tol)?);

    let body = phi.resolve(m.variables())?;
    let on_endogenous = conditioned.marginal(&endogenous)?;
    let cond: f64 = on_endogenous
        .probs()
        .iter()
        .enumerate()
        .filter(|(i, _)| body.holds(&on_endogenous.decode(*i)))
        .map(|(_, p)| p)
        .sum();
    let boxed = formula_probability(m, &CausalFormula::Box { assign: owned(assignment), then: phi.clone() })?;
    let diamond = formula_probability(m, &CausalFormula::Diamond { assign: owned(assignment), then: phi.clone() })?;
    report.conditional_probability = Some(cond);
    report.box_probability = Some(boxed.probability);
    report.diamond_probability = Some(diamond.probability);
    report.sandwich_holds = Some(boxed.probability <= cond + tol && cond <= diamond.probability + tol);
    if let Ok(arising) = intervened.arising_distribution() {
        let arising = arising.marginal(&endogenous)?;
        report.arising_distance = arising.total_variation(&on_endogenous);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::causal::model::derandomize_cpd;
    use crate::hypergraph::from_graph;
    use std::collections::BTreeMap;

    fn copy_loop() -> Grpsem {
        let g = from_graph(&["X", "Y"], &[("X", "Y"), ("Y", "X")], &[]).unwrap();
        let unit = || (vec!["*".to_string()], vec![1.0]);
        Grpsem::new(g, vec![Variable::binary("X"), Variable::binary("Y")], vec![unit(), unit()], vec![vec![0, 1], vec![0, 1]])
            .unwrap()
    }

    #[test]
    fn box_and_diamond_split_on_two_solutions() {
        let m = copy_loop();
        let x0 = Expr::eq("X", "0");
        assert!(!eval_formula(&m, &[0, 0], &CausalFormula::boxed(&[], x0.clone())).unwrap());
        assert!(eval_formula(&m, &[0, 0], &CausalFormula::diamond(&[], x0)).unwrap());
    }

    fn chain() -> (Grpsem, Witness) {
        let g = from_graph(&["X", "Y"], &[("X", "Y")], &[]).unwrap();
        let ux = derandomize_cpd("U", &[vec![0.3, 0.7]]).unwrap();
        let uy = derandomize_cpd("U", &[vec![0.9, 0.1], vec![0.2, 0.8]]).unwrap();
        let noise = vec![
            (ux.variables()[0].values().to_vec(), ux.probs().to_vec()),
            (uy.variables()[0].values().to_vec(), uy.probs().to_vec()),
        ];
        let eq_y = (0..2).flat_map(|s| (0..4).map(move |g| (g >> (1 - s)) & 1)).collect();
        let m = Grpsem::new(g, vec![Variable::binary("X"), Variable::binary("Y")], noise, vec![vec![0, 1], eq_y])
            .unwrap();
        let joint = m.arising_distribution().unwrap();
        let map = BTreeMap::from([("X".to_string(), "U__X".to_string()), ("Y".to_string(), "U__Y".to_string())]);
        (m, Witness::new(joint, map).unwrap())
    }

    #[test]
    fn acyclic_box_equals_diamond() {
        let (m, _) = chain();
        let phi = Expr::eq("Y", "1");
        let b = formula_probability(&m, &CausalFormula::boxed(&[("X", "1")], phi.clone())).unwrap();
        let d = formula_probability(&m, &CausalFormula::diamond(&[("X", "1")], phi)).unwrap();
        assert!((b.probability - 0.8).abs() < 1e-12);
        assert!((b.probability - d.probability).abs() < 1e-12);
        let sure = formula_probability(&m, &CausalFormula::boxed(&[("Y", "0")], Expr::eq("Y", "0"))).unwrap();
        assert!((sure.probability - 1.0).abs() < 1e-12);
    }

    #[test]
    fn conditioning_on_do_event_matches_intervention() {
        let (m, w) = chain();
        let r = check_intervention(&w, &m, &[("X", "1")], &Expr::eq("Y", "1"), 1e-9).unwrap();
        assert!(r.applicable);
        assert_eq!(r.in_solution_set, Some(true));
        assert_eq!(r.sandwich_holds, Some(true));
        assert!(r.arising_distance.unwrap() < 1e-9);
        assert!((r.conditional_probability.unwrap() - 0.8).abs() < 1e-9);
        let all = check_intervention(&w, &m, &[("X", "0")], &Expr::True, 1e-9).unwrap();
        assert!((all.box_probability.unwrap() - 1.0).abs() < 1e-12);
        assert!((all.diamond_probability.unwrap() - 1.0).abs() < 1e-12);
    }
}
