use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::compat::Witness;
use crate::dist::{Event, JointDistribution, Odometer, Variable};
use crate::error::{Error, Result};
use crate::hypergraph::{noise_name, DirectedHypergraph};
use crate::scoring::RESPONSE_LABEL_PREFIX;

/// Tolerance on the total mass of each noise distribution.
pub const NOISE_SUM_TOLERANCE: f64 = 1e-12;

/// Turns a conditional table into a distribution over functions.
///
/// `rows[s][t]` is `p(t | s)`. The result has one variable `name` whose values
/// are the `T^S` functions from source settings to target values, labelled
/// `g<k>` with the output at source setting 0 as the most significant digit, and
/// `q(g) = ∏_s p(g(s) | s)`.
pub fn derandomize_cpd(name: &str, rows: &[Vec<f64>]) -> Result<JointDistribution> {
    let t = rows.first().map_or(0, Vec::len);
    if rows.is_empty() || t == 0 {
        return Err(Error::InvalidDistribution("conditional table has no rows or no target values".into()));
    }
    for (s, row) in rows.iter().enumerate() {
        let sum: f64 = row.iter().sum();
        if row.len() != t || row.iter().any(|p| !p.is_finite() || *p < 0.0) || (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidDistribution(format!("row {s} of the conditional table is not a distribution")));
        }
    }
    let size = u32::try_from(rows.len())
        .ok()
        .and_then(|s| t.checked_pow(s))
        .filter(|&n| n <= 1 << 24)
        .ok_or_else(|| Error::InvalidDistribution("too many functions to enumerate".into()))?;
    let mut probs = Vec::with_capacity(size);
    let mut odo = Odometer::new(vec![t; rows.len()]);
    while let Some(g) = odo.next_setting() {
        probs.push(g.iter().zip(rows).map(|(&v, row)| row[v]).product());
    }
    let values = (0..size).map(|k| format!("{RESPONSE_LABEL_PREFIX}{k}"));
    JointDistribution::new(vec![Variable::new(name, values)?], probs)
}

/// A generalized randomized structural equation model.
///
/// One equation per arc, stored as a total table: entry `s * |U_a| + u` holds the
/// target setting produced from source setting `s` and noise value `u`. Source
/// and target settings are read in model-variable order, last variable fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct Grpsem {
    structure: DirectedHypergraph,
    variables: Vec<Variable>,
    noise: Vec<Variable>,
    noise_probs: Vec<Vec<f64>>,
    equations: Vec<Vec<usize>>,
    src_pos: Vec<Vec<usize>>,
    tgt_pos: Vec<Vec<usize>>,
}

fn index_of(setting: &[usize], positions: &[usize], cards: &[usize]) -> usize {
    positions.iter().fold(0, |acc, &p| acc * cards[p] + setting[p])
}

impl Grpsem {
    /// `variables` must cover the structure's nodes. `noise` gives each arc's
    /// value labels and probabilities, in arc order.
    pub fn new(
        structure: DirectedHypergraph,
        variables: Vec<Variable>,
        noise: Vec<(Vec<String>, Vec<f64>)>,
        equations: Vec<Vec<usize>>,
    ) -> Result<Self> {
        let mut ordered = Vec::with_capacity(structure.nodes().len());
        for n in structure.nodes() {
            let v = variables.iter().find(|v| v.name() == n).ok_or_else(|| Error::UnknownVariable(n.clone()))?;
            ordered.push(v.clone());
        }
        if variables.len() != ordered.len() {
            return Err(Error::InvalidModel("variables must match the structure's nodes".into()));
        }
        let arcs = structure.arcs();
        if noise.len() != arcs.len() || equations.len() != arcs.len() {
            return Err(Error::InvalidModel("need one noise variable and one equation per arc".into()));
        }
        let names: Vec<&str> = ordered.iter().map(Variable::name).collect();
        let cards: Vec<usize> = ordered.iter().map(Variable::cardinality).collect();
        let pos = |set: &BTreeSet<String>| -> Vec<usize> {
            names.iter().enumerate().filter(|(_, n)| set.contains(**n)).map(|(i, _)| i).collect()
        };
        let src_pos: Vec<Vec<usize>> = arcs.iter().map(|a| pos(&a.sources)).collect();
        let tgt_pos: Vec<Vec<usize>> = arcs.iter().map(|a| pos(&a.targets)).collect();
        let mut noise_vars = Vec::with_capacity(arcs.len());
        let mut noise_probs = Vec::with_capacity(arcs.len());
        for (i, (a, (values, probs))) in arcs.iter().zip(noise).enumerate() {
            let var = Variable::new(noise_name(&a.label), values)?;
            if names.contains(&var.name()) {
                return Err(Error::NoiseNameCollision(var.name().to_string()));
            }
            let sum: f64 = probs.iter().sum();
            if probs.len() != var.cardinality()
                || probs.iter().any(|p| !p.is_finite() || *p < 0.0)
                || (sum - 1.0).abs() > NOISE_SUM_TOLERANCE
            {
                return Err(Error::InvalidModel(format!("noise of arc `{}` is not a distribution", a.label)));
            }
            let s: usize = src_pos[i].iter().map(|&p| cards[p]).product();
            let t: usize = tgt_pos[i].iter().map(|&p| cards[p]).product();
            if equations[i].len() != s * var.cardinality() || equations[i].iter().any(|&o| o >= t) {
                return Err(Error::InvalidModel(format!("equation of arc `{}` is not a total table", a.label)));
            }
            noise_vars.push(var);
            noise_probs.push(probs);
        }
        Ok(Grpsem { structure, variables: ordered, noise: noise_vars, noise_probs, equations, src_pos, tgt_pos })
    }

    pub fn structure(&self) -> &DirectedHypergraph {
        &self.structure
    }

    /// Endogenous variables, in structure node order.
    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    /// Noise variables, one per arc in arc order.
    pub fn noise(&self) -> &[Variable] {
        &self.noise
    }

    pub fn noise_probs(&self, arc: usize) -> &[f64] {
        &self.noise_probs[arc]
    }

    pub fn equation(&self, arc: usize) -> &[usize] {
        &self.equations[arc]
    }

    fn cards(&self) -> Vec<usize> {
        self.variables.iter().map(Variable::cardinality).collect()
    }

    fn endogenous_names(&self) -> Vec<String> {
        self.variables.iter().map(|v| v.name().to_string()).collect()
    }

    fn noise_names(&self) -> Vec<String> {
        self.noise.iter().map(|v| v.name().to_string()).collect()
    }

    /// The product of the noise distributions, over the noise variables.
    pub fn noise_distribution(&self) -> JointDistribution {
        let mut out = JointDistribution::unit();
        for (v, p) in self.noise.iter().zip(&self.noise_probs) {
            let single = JointDistribution::from_weights(vec![v.clone()], p.clone()).expect("validated noise");
            out = out.product(&single).expect("distinct noise names");
        }
        out
    }

    fn satisfies(&self, x: &[usize], u: &[usize], cards: &[usize]) -> bool {
        (0..self.equations.len()).all(|a| {
            let s = index_of(x, &self.src_pos[a], cards);
            self.equations[a][s * self.noise[a].cardinality() + u[a]] == index_of(x, &self.tgt_pos[a], cards)
        })
    }

    /// Every endogenous setting (value indices) satisfying all equations in context `u`.
    pub fn solutions(&self, u: &[usize]) -> Vec<Vec<usize>> {
        let cards = self.cards();
        let mut out = Vec::new();
        let mut odo = Odometer::new(cards.clone());
        while let Some(x) = odo.next_setting() {
            if self.satisfies(x, u, &cards) {
                out.push(x.to_vec());
            }
        }
        out
    }

    /// Contexts as (noise setting, probability), skipping zero-probability ones.
    pub(crate) fn contexts(&self) -> Vec<(Vec<usize>, f64)> {
        let noise = self.noise_distribution();
        (0..noise.probs().len())
            .filter(|&i| noise.probs()[i] > 0.0)
            .map(|i| (noise.decode(i), noise.probs()[i]))
            .collect()
    }

    /// Reorders `nu` to endogenous variables followed by noise variables.
    fn canonical(&self, nu: &JointDistribution) -> Result<JointDistribution> {
        let mut order = self.endogenous_names();
        order.extend(self.noise_names());
        if nu.variables().len() != order.len() {
            return Err(Error::InvalidModel("distribution must cover exactly the model's variables".into()));
        }
        let nu = nu.reordered(&order)?;
        let expected = self.variables.iter().chain(&self.noise);
        if nu.variables().iter().zip(expected).any(|(a, b)| a != b) {
            return Err(Error::InvalidModel("value spaces differ from the model's".into()));
        }
        Ok(nu)
    }

    /// Whether `nu` puts at most `tol` mass off the equations and its noise
    /// marginal is within `tol` of the product of noise distributions.
    pub fn in_solution_set(&self, nu: &JointDistribution, tol: f64) -> Result<bool> {
        let nu = self.canonical(nu)?;
        let cards = self.cards();
        let k = self.variables.len();
        let mut off = 0.0;
        for (i, &p) in nu.probs().iter().enumerate() {
            if p > 0.0 {
                let setting = nu.decode(i);
                if !self.satisfies(&setting[..k], &setting[k..], &cards) {
                    off += p;
                }
            }
        }
        let gap = nu.marginal(&self.noise_names())?.max_abs_diff(&self.noise_distribution()).unwrap_or(f64::INFINITY);
        Ok(off <= tol && gap <= tol)
    }

    /// Pushes the noise distribution through the unique solution of each context.
    /// Fails if some positive-probability context has zero or several solutions.
    pub fn arising_distribution(&self) -> Result<JointDistribution> {
        let mut variables = self.variables.clone();
        variables.extend(self.noise.iter().cloned());
        let size: usize = variables.iter().map(Variable::cardinality).product();
        let mut probs = vec![0.0; size];
        let noise_size: usize = self.noise.iter().map(Variable::cardinality).product();
        let x_space = JointDistribution::from_fn(self.variables.clone(), |_| 1.0)?;
        let u_space = JointDistribution::from_fn(self.noise.clone(), |_| 1.0)?;
        for (u, p) in self.contexts() {
            let sols = self.solutions(&u);
            if sols.len() != 1 {
                return Err(Error::InvalidModel(format!("a context has {} solutions, not exactly one", sols.len())));
            }
            probs[x_space.encode(&sols[0]) * noise_size + u_space.encode(&u)] += p;
        }
        JointDistribution::new(variables, probs)
    }

    fn resolve_assignment<S: AsRef<str>, T: AsRef<str>>(&self, assignment: &[(S, T)]) -> Result<Vec<(usize, usize)>> {
        let mut out: Vec<(usize, usize)> = Vec::with_capacity(assignment.len());
        for (name, value) in assignment {
            let (name, value) = (name.as_ref(), value.as_ref());
            let p = self
                .variables
                .iter()
                .position(|v| v.name() == name)
                .ok_or_else(|| Error::UnknownVariable(name.to_string()))?;
            if out.iter().any(|&(q, _)| q == p) {
                return Err(Error::InvalidIntervention(format!("`{name}` is assigned more than once")));
            }
            if !self.tgt_pos.iter().any(|t| t.contains(&p)) {
                return Err(Error::InvalidIntervention(format!("`{name}` is not the target of any arc")));
            }
            let i = self.variables[p]
                .value_index(value)
                .ok_or_else(|| Error::UnknownValue { name: name.to_string(), value: value.to_string() })?;
            out.push((p, i));
        }
        Ok(out)
    }

    /// Digit of variable `p` within a target setting of arc `a`.
    fn target_digit(&self, a: usize, setting: usize, p: usize) -> usize {
        let cards = self.cards();
        let mut rest = setting;
        for &q in self.tgt_pos[a].iter().rev() {
            if q == p {
                return rest % cards[q];
            }
            rest /= cards[q];
        }
        unreachable!("variable is a target of the arc")
    }

    /// Replaces the equations for the assigned variables by constants.
    pub fn intervene<S: AsRef<str>, T: AsRef<str>>(&self, assignment: &[(S, T)]) -> Result<Grpsem> {
        let fixed = self.resolve_assignment(assignment)?;
        let cards = self.cards();
        let mut out = self.clone();
        for (a, table) in out.equations.iter_mut().enumerate() {
            let targets = &self.tgt_pos[a];
            if !fixed.iter().any(|(p, _)| targets.contains(p)) {
                continue;
            }
            for o in table.iter_mut() {
                let mut digits = Vec::with_capacity(targets.len());
                let mut rest = *o;
                for &q in targets.iter().rev() {
                    digits.push(rest % cards[q]);
                    rest /= cards[q];
                }
                digits.reverse();
                for (d, &q) in digits.iter_mut().zip(targets) {
                    if let Some(&(_, v)) = fixed.iter().find(|(p, _)| *p == q) {
                        *d = v;
                    }
                }
                *o = digits.iter().zip(targets).fold(0, |acc, (&d, &q)| acc * cards[q] + d);
            }
        }
        Ok(out)
    }

    /// The noise settings under which every assigned variable takes its assigned
    /// value whatever its sources are. Each assigned variable must be the target
    /// of exactly one arc.
    pub fn do_event<S: AsRef<str>, T: AsRef<str>>(&self, assignment: &[(S, T)]) -> Result<Event> {
        let fixed = self.resolve_assignment(assignment)?;
        let mut arc_of = Vec::with_capacity(fixed.len());
        for &(p, v) in &fixed {
            let arcs: Vec<usize> = (0..self.tgt_pos.len()).filter(|&a| self.tgt_pos[a].contains(&p)).collect();
            if arcs.len() != 1 {
                return Err(Error::InvalidIntervention(format!(
                    "`{}` is the target of {} arcs; a do-event needs exactly one",
                    self.variables[p].name(),
                    arcs.len()
                )));
            }
            arc_of.push((arcs[0], p, v));
        }
        let forced = |a: usize, u: usize, p: usize, v: usize| -> bool {
            let m = self.noise[a].cardinality();
            let rows = self.equations[a].len() / m;
            (0..rows).all(|s| self.target_digit(a, self.equations[a][s * m + u], p) == v)
        };
        let noise = self.noise_distribution();
        Event::from_predicate(&noise, &self.noise_names(), |u| arc_of.iter().all(|&(a, p, v)| forced(a, u[a], p, v)))
    }

    /// The witness's joint restricted to this model's variables, with noise
    /// variables renamed to the model's `U__<label>` names.
    pub fn extension_from_witness(&self, w: &Witness) -> Result<JointDistribution> {
        let mut rename = BTreeMap::new();
        for a in self.structure.arcs() {
            let from = w
                .noise_of(&a.label)
                .ok_or_else(|| Error::InvalidWitness(format!("witness has no noise for arc `{}`", a.label)))?;
            rename.insert(from.to_string(), noise_name(&a.label));
        }
        let mut keep: Vec<String> = self.endogenous_names();
        keep.extend(rename.keys().cloned());
        let restricted = w.joint().marginal(&keep)?;
        let renamed = restricted.with_renamed(|n| rename.get(n).cloned())?;
        let mut order = self.endogenous_names();
        order.extend(self.noise_names());
        renamed.reordered(&order)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_raw()).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<Grpsem> {
        let raw: RawSem = serde_json::from_str(text)?;
        Grpsem::from_raw(raw)
    }

    fn to_raw(&self) -> RawSem {
        let mut noise = Vec::new();
        let mut equations = Vec::new();
        for (a, arc) in self.structure.arcs().iter().enumerate() {
            noise.push(RawNoise {
                arc: arc.label.clone(),
                values: self.noise[a].values().to_vec(),
                probs: self.noise_probs[a].clone(),
            });
            let src_vars: Vec<&Variable> = self.src_pos[a].iter().map(|&p| &self.variables[p]).collect();
            let tgt_vars: Vec<&Variable> = self.tgt_pos[a].iter().map(|&p| &self.variables[p]).collect();
            let m = self.noise[a].cardinality();
            let mut rows = Vec::with_capacity(self.equations[a].len());
            for (i, &o) in self.equations[a].iter().enumerate() {
                let mut inputs = BTreeMap::new();
                let mut s = i / m;
                for v in src_vars.iter().rev() {
                    inputs.insert(v.name().to_string(), v.values()[s % v.cardinality()].clone());
                    s /= v.cardinality();
                }
                inputs.insert(self.noise[a].name().to_string(), self.noise[a].values()[i % m].clone());
                let mut out = BTreeMap::new();
                let mut t = o;
                for v in tgt_vars.iter().rev() {
                    out.insert(v.name().to_string(), v.values()[t % v.cardinality()].clone());
                    t /= v.cardinality();
                }
                rows.push(RawRow { inputs, out });
            }
            equations.push(RawEquation { arc: arc.label.clone(), rows });
        }
        RawSem { hypergraph: self.structure.clone(), variables: self.variables.clone(), noise, equations }
    }

    fn from_raw(raw: RawSem) -> Result<Grpsem> {
        let arcs = raw.hypergraph.arcs().to_vec();
        let lookup = |name: &str| -> Result<&Variable> {
            raw.variables.iter().find(|v| v.name() == name).ok_or_else(|| Error::UnknownVariable(name.to_string()))
        };
        let mut noise = Vec::with_capacity(arcs.len());
        let mut equations = Vec::with_capacity(arcs.len());
        for a in &arcs {
            let n = raw
                .noise
                .iter()
                .find(|n| n.arc == a.label)
                .ok_or_else(|| Error::InvalidModel(format!("no noise for arc `{}`", a.label)))?;
            let u_var = Variable::new(noise_name(&a.label), n.values.clone())?;
            let src: Vec<&Variable> =
                raw.variables.iter().filter(|v| a.sources.contains(v.name())).collect();
            let tgt: Vec<&Variable> =
                raw.variables.iter().filter(|v| a.targets.contains(v.name())).collect();
            for name in a.sources.iter().chain(&a.targets) {
                lookup(name)?;
            }
            let s_size: usize = src.iter().map(|v| v.cardinality()).product();
            let m = u_var.cardinality();
            let mut table: Vec<Option<usize>> = vec![None; s_size * m];
            let eq = raw
                .equations
                .iter()
                .find(|e| e.arc == a.label)
                .ok_or_else(|| Error::InvalidModel(format!("no equation for arc `{}`", a.label)))?;
            for row in &eq.rows {
                let label = |v: &Variable, map: &BTreeMap<String, String>| -> Result<usize> {
                    let l = map
                        .get(v.name())
                        .ok_or_else(|| Error::InvalidModel(format!("row of arc `{}` lacks `{}`", a.label, v.name())))?;
                    v.value_index(l).ok_or_else(|| Error::UnknownValue { name: v.name().into(), value: l.clone() })
                };
                if row.inputs.len() != src.len() + 1 || row.out.len() != tgt.len() {
                    return Err(Error::InvalidModel(format!("row of arc `{}` has extra entries", a.label)));
                }
                let mut s = 0;
                for v in &src {
                    s = s * v.cardinality() + label(v, &row.inputs)?;
                }
                let u = label(&u_var, &row.inputs)?;
                let mut t = 0;
                for v in &tgt {
                    t = t * v.cardinality() + label(v, &row.out)?;
                }
                if table[s * m + u].replace(t).is_some() {
                    return Err(Error::InvalidModel(format!("arc `{}` has a repeated input row", a.label)));
                }
            }
            let table: Option<Vec<usize>> = table.into_iter().collect();
            equations.push(
                table.ok_or_else(|| Error::InvalidModel(format!("equation of arc `{}` is not total", a.label)))?,
            );
            noise.push((n.values.clone(), n.probs.clone()));
        }
        Grpsem::new(raw.hypergraph, raw.variables, noise, equations)
    }
}

#[derive(Serialize, Deserialize)]
struct RawSem {
    hypergraph: DirectedHypergraph,
    variables: Vec<Variable>,
    noise: Vec<RawNoise>,
    equations: Vec<RawEquation>,
}

#[derive(Serialize, Deserialize)]
struct RawNoise {
    arc: String,
    values: Vec<String>,
    probs: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawEquation {
    arc: String,
    rows: Vec<RawRow>,
}

#[derive(Serialize, Deserialize)]
struct RawRow {
    #[serde(rename = "in")]
    inputs: BTreeMap<String, String>,
    out: BTreeMap<String, String>,
}

/// Reads a model off a witness whose arcs have pairwise-disjoint targets.
///
/// Each equation row with positive probability takes its most probable target
/// setting; rows of probability zero take the first target setting. The flag is
/// `true` when no row had to be filled.
pub fn witness_to_psem(w: &Witness, graph: &DirectedHypergraph) -> Result<(Grpsem, bool)> {
    let mut claimed: BTreeSet<&String> = BTreeSet::new();
    for a in graph.arcs() {
        for t in &a.targets {
            if !claimed.insert(t) {
                return Err(Error::OverlappingTargets(t.clone()));
            }
        }
    }
    let joint = w.joint();
    let variables: Vec<Variable> = graph
        .nodes()
        .iter()
        .map(|n| joint.variable(n).cloned().ok_or_else(|| Error::UnknownVariable(n.clone())))
        .collect::<Result<_>>()?;
    let mut unique = true;
    let mut noise = Vec::new();
    let mut equations = Vec::new();
    for a in graph.arcs() {
        let u_name = w
            .noise_of(&a.label)
            .ok_or_else(|| Error::InvalidWitness(format!("witness has no noise for arc `{}`", a.label)))?;
        let src = a.sources_in(graph.nodes());
        let tgt = a.targets_in(graph.nodes());
        let mut order = src.clone();
        order.push(u_name.to_string());
        order.extend(tgt.iter().cloned());
        let table = joint.marginal(&order)?;
        let u_var = joint.variable(u_name).expect("checked by the witness").clone();
        let m = u_var.cardinality();
        let t_size: usize = tgt.iter().map(|n| joint.variable(n).unwrap().cardinality()).product();
        let rows = table.probs().len() / t_size;
        let mut eq = Vec::with_capacity(rows);
        let mut u_mass = vec![0.0; m];
        for r in 0..rows {
            let row = &table.probs()[r * t_size..(r + 1) * t_size];
            u_mass[r % m] += row.iter().sum::<f64>();
            let (best, &p) = row
                .iter()
                .enumerate()
                .fold((0, &0.0), |acc, (i, p)| if *p > *acc.1 { (i, p) } else { acc });
            if p <= 0.0 {
                unique = false;
            }
            eq.push(best);
        }
        let total: f64 = u_mass.iter().sum();
        noise.push((u_var.values().to_vec(), u_mass.iter().map(|p| p / total).collect()));
        equations.push(eq);
    }
    Ok((Grpsem::new(graph.clone(), variables, noise, equations)?, unique))
}
