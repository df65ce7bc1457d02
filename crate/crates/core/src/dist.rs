//! Exact finite joint distributions stored as dense tables.
//!
//! Entries are laid out row-major with the last variable varying fastest.
//! The empty variable list is a legal "unit" distribution with a single
//! outcome of probability one.

use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::info;

/// Maximum deviation of a table's total mass from one.
pub const SUM_TOLERANCE: f64 = 1e-9;

/// Default cutoff below which a probability counts as zero.
pub const DEFAULT_TOL: f64 = 1e-9;

/// An empty variable-name list, for call sites that need `&[]` with a concrete type.
pub const NO_VARS: [&str; 0] = [];

/// A named variable with an ordered list of distinct value labels.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawVariable")]
pub struct Variable {
    name: String,
    values: Vec<String>,
}

#[derive(Deserialize)]
struct RawVariable {
    name: String,
    values: Vec<String>,
}

impl TryFrom<RawVariable> for Variable {
    type Error = Error;

    fn try_from(raw: RawVariable) -> Result<Self> {
        Variable::new(raw.name, raw.values)
    }
}

impl Variable {
    pub fn new<S: Into<String>>(name: impl Into<String>, values: impl IntoIterator<Item = S>) -> Result<Self> {
        let name = name.into();
        let values: Vec<String> = values.into_iter().map(Into::into).collect();
        if name.is_empty() {
            return Err(Error::InvalidVariable("empty variable name".into()));
        }
        if values.is_empty() {
            return Err(Error::InvalidVariable(format!("`{name}` has no values")));
        }
        let mut seen = HashSet::new();
        for v in &values {
            if !seen.insert(v.as_str()) {
                return Err(Error::InvalidVariable(format!("`{name}` repeats value `{v}`")));
            }
        }
        Ok(Variable { name, values })
    }

    /// A variable with values `"0"`, `"1"`, ..., `"k-1"`.
    pub fn with_cardinality(name: impl Into<String>, k: usize) -> Result<Self> {
        Variable::new(name, (0..k).map(|i| i.to_string()))
    }

    pub fn binary(name: impl Into<String>) -> Self {
        Variable::with_cardinality(name, 2).expect("two distinct labels")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn values(&self) -> &[String] {
        &self.values
    }

    pub fn cardinality(&self) -> usize {
        self.values.len()
    }

    pub fn value_index(&self, label: &str) -> Option<usize> {
        self.values.iter().position(|v| v == label)
    }

    pub fn renamed(&self, name: impl Into<String>) -> Variable {
        Variable { name: name.into(), values: self.values.clone() }
    }
}

/// A probability table over an ordered list of variables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDistribution")]
pub struct JointDistribution {
    variables: Vec<Variable>,
    probs: Vec<f64>,
}

#[derive(Deserialize)]
struct RawDistribution {
    variables: Vec<Variable>,
    probs: Vec<f64>,
}

impl TryFrom<RawDistribution> for JointDistribution {
    type Error = Error;

    fn try_from(raw: RawDistribution) -> Result<Self> {
        JointDistribution::new(raw.variables, raw.probs)
    }
}

/// Iterates every joint setting of a list of cardinalities, last digit fastest.
pub(crate) struct Odometer {
    cards: Vec<usize>,
    digits: Vec<usize>,
    started: bool,
    done: bool,
}

impl Odometer {
    pub(crate) fn new(cards: Vec<usize>) -> Self {
        let done = cards.iter().any(|&c| c == 0);
        let digits = vec![0; cards.len()];
        Odometer { cards, digits, started: false, done }
    }

    /// Advances to the next setting; returns `None` once every setting has been visited.
    pub(crate) fn next_setting(&mut self) -> Option<&[usize]> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(&self.digits);
        }
        for i in (0..self.cards.len()).rev() {
            self.digits[i] += 1;
            if self.digits[i] < self.cards[i] {
                return Some(&self.digits);
            }
            self.digits[i] = 0;
        }
        self.done = true;
        None
    }
}

pub(crate) fn strides_of(cards: &[usize]) -> Vec<usize> {
    let mut strides = vec![1; cards.len()];
    for i in (0..cards.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * cards[i + 1];
    }
    strides
}

impl JointDistribution {
    /// Builds a distribution, validating names, table length, signs, and total mass.
    pub fn new(variables: Vec<Variable>, probs: Vec<f64>) -> Result<Self> {
        let mut names = HashSet::new();
        for v in &variables {
            if !names.insert(v.name()) {
                return Err(Error::DuplicateVariable(v.name().to_string()));
            }
        }
        let size: usize = variables.iter().map(Variable::cardinality).product();
        if probs.len() != size {
            return Err(Error::InvalidDistribution(format!(
                "table has {} entries but the variables admit {size} settings",
                probs.len()
            )));
        }
        if let Some((i, p)) = probs.iter().enumerate().find(|(_, p)| !p.is_finite() || **p < 0.0) {
            return Err(Error::InvalidDistribution(format!("entry {i} is {p}")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::InvalidDistribution(format!("entries sum to {total}")));
        }
        Ok(JointDistribution { variables, probs })
    }

    /// Normalizes nonnegative weights into a distribution.
    pub fn from_weights(variables: Vec<Variable>, weights: Vec<f64>) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::InvalidDistribution(format!("weights sum to {total}")));
        }
        let probs = weights.into_iter().map(|w| w / total).collect();
        JointDistribution::new(variables, probs)
    }

    /// Evaluates `weight` at every joint setting (value indices) and normalizes.
    pub fn from_fn(variables: Vec<Variable>, mut weight: impl FnMut(&[usize]) -> f64) -> Result<Self> {
        let cards: Vec<usize> = variables.iter().map(Variable::cardinality).collect();
        let mut odo = Odometer::new(cards);
        let mut weights = Vec::new();
        while let Some(setting) = odo.next_setting() {
            weights.push(weight(setting));
        }
        JointDistribution::from_weights(variables, weights)
    }

    pub fn uniform(variables: Vec<Variable>) -> Result<Self> {
        JointDistribution::from_fn(variables, |_| 1.0)
    }

    /// All mass on the setting given by value indices.
    pub fn point_mass(variables: Vec<Variable>, setting: &[usize]) -> Result<Self> {
        if setting.len() != variables.len()
            || setting.iter().zip(&variables).any(|(&i, v)| i >= v.cardinality())
        {
            return Err(Error::InvalidDistribution("point-mass setting out of range".into()));
        }
        JointDistribution::from_fn(variables, |s| if s == setting { 1.0 } else { 0.0 })
    }

    /// The distribution over no variables.
    pub fn unit() -> Self {
        JointDistribution { variables: Vec::new(), probs: vec![1.0] }
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn names(&self) -> Vec<String> {
        self.variables.iter().map(|v| v.name().to_string()).collect()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn cardinalities(&self) -> Vec<usize> {
        self.variables.iter().map(Variable::cardinality).collect()
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.name() == name)
    }

    pub fn variable(&self, name: &str) -> Option<&Variable> {
        self.variables.iter().find(|v| v.name() == name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.position(name).is_some()
    }

    /// Positions of the named variables, in the order given. Duplicates are rejected.
    pub fn positions<S: AsRef<str>>(&self, names: &[S]) -> Result<Vec<usize>> {
        let mut out = Vec::with_capacity(names.len());
        for n in names {
            let n = n.as_ref();
            let p = self.position(n).ok_or_else(|| Error::UnknownVariable(n.to_string()))?;
            if out.contains(&p) {
                return Err(Error::DuplicateVariable(n.to_string()));
            }
            out.push(p);
        }
        Ok(out)
    }

    /// Positions of a set of names, deduplicated and in distribution order.
    pub(crate) fn set_positions<S: AsRef<str>>(&self, names: &[S]) -> Result<Vec<usize>> {
        let mut out = BTreeSet::new();
        for n in names {
            let n = n.as_ref();
            out.insert(self.position(n).ok_or_else(|| Error::UnknownVariable(n.to_string()))?);
        }
        Ok(out.into_iter().collect())
    }

    pub fn decode(&self, mut flat: usize) -> Vec<usize> {
        let mut setting = vec![0; self.variables.len()];
        for (i, v) in self.variables.iter().enumerate().rev() {
            setting[i] = flat % v.cardinality();
            flat /= v.cardinality();
        }
        setting
    }

    pub fn encode(&self, setting: &[usize]) -> usize {
        setting
            .iter()
            .zip(&self.variables)
            .fold(0, |acc, (&d, v)| acc * v.cardinality() + d)
    }

    /// Probability of a full joint setting given by value labels in variable order.
    pub fn prob_of(&self, labels: &[&str]) -> Result<f64> {
        if labels.len() != self.variables.len() {
            return Err(Error::InvalidDistribution(format!(
                "expected {} labels, got {}",
                self.variables.len(),
                labels.len()
            )));
        }
        let mut setting = Vec::with_capacity(labels.len());
        for (v, l) in self.variables.iter().zip(labels) {
            setting.push(v.value_index(l).ok_or_else(|| Error::UnknownValue {
                name: v.name().to_string(),
                value: l.to_string(),
            })?);
        }
        Ok(self.probs[self.encode(&setting)])
    }

    /// Marginal table over the given positions (in the given order), last fastest.
    pub(crate) fn project(&self, positions: &[usize]) -> Vec<f64> {
        let cards = self.cardinalities();
        let out_cards: Vec<usize> = positions.iter().map(|&p| cards[p]).collect();
        let out_strides = strides_of(&out_cards);
        // Contribution of each input digit to the output index.
        let mut weight = vec![0usize; cards.len()];
        for (k, &p) in positions.iter().enumerate() {
            weight[p] = out_strides[k];
        }
        let mut out = vec![0.0; out_cards.iter().product()];
        let mut odo = Odometer::new(cards);
        let mut flat = 0;
        while let Some(setting) = odo.next_setting() {
            let idx: usize = setting.iter().zip(&weight).map(|(d, w)| d * w).sum();
            out[idx] += self.probs[flat];
            flat += 1;
        }
        out
    }

    /// Maps each flat index of `self` to its index in the sub-table over `positions`.
    pub(crate) fn projection_index(&self, positions: &[usize]) -> Vec<usize> {
        let cards = self.cardinalities();
        let out_cards: Vec<usize> = positions.iter().map(|&p| cards[p]).collect();
        let out_strides = strides_of(&out_cards);
        let mut weight = vec![0usize; cards.len()];
        for (k, &p) in positions.iter().enumerate() {
            weight[p] = out_strides[k];
        }
        let mut out = Vec::with_capacity(self.probs.len());
        let mut odo = Odometer::new(cards);
        while let Some(setting) = odo.next_setting() {
            out.push(setting.iter().zip(&weight).map(|(d, w)| d * w).sum());
        }
        out
    }

    /// Marginal distribution on `subset`, preserving the order given.
    pub fn marginal<S: AsRef<str>>(&self, subset: &[S]) -> Result<JointDistribution> {
        let positions = self.positions(subset)?;
        let variables = positions.iter().map(|&p| self.variables[p].clone()).collect();
        Ok(JointDistribution { variables, probs: self.project(&positions) })
    }

    /// Renormalized restriction to an event over some of this distribution's variables.
    pub fn condition(&self, event: &Event) -> Result<JointDistribution> {
        let mask = event.lift(self)?;
        let mass: f64 = self.probs.iter().zip(&mask).filter(|(_, &m)| m).map(|(p, _)| p).sum();
        if !(mass > 0.0) {
            return Err(Error::ZeroProbabilityEvent);
        }
        let probs = self
            .probs
            .iter()
            .zip(&mask)
            .map(|(&p, &m)| if m { p / mass } else { 0.0 })
            .collect();
        Ok(JointDistribution { variables: self.variables.clone(), probs })
    }

    /// Independent product; variables of `self` come first.
    pub fn product(&self, other: &JointDistribution) -> Result<JointDistribution> {
        for v in &other.variables {
            if self.contains(v.name()) {
                return Err(Error::SharedVariable(v.name().to_string()));
            }
        }
        let mut variables = self.variables.clone();
        variables.extend(other.variables.iter().cloned());
        let mut probs = Vec::with_capacity(self.probs.len() * other.probs.len());
        for &p in &self.probs {
            probs.extend(other.probs.iter().map(|&q| p * q));
        }
        Ok(JointDistribution { variables, probs })
    }

    /// Whether every `source` setting of probability above `tol` co-occurs with
    /// exactly one `target` setting of probability above `tol`.
    pub fn check_determines<S: AsRef<str>, T: AsRef<str>>(
        &self,
        sources: &[S],
        targets: &[T],
        tol: f64,
    ) -> Result<bool> {
        let src = self.set_positions(sources)?;
        let tgt: Vec<usize> = self.set_positions(targets)?.into_iter().filter(|p| !src.contains(p)).collect();
        let src_table = self.project(&src);
        let mut joint_pos = src.clone();
        joint_pos.extend(&tgt);
        let joint = self.project(&joint_pos);
        let tgt_size = joint.len() / src_table.len().max(1);
        for (s, &ps) in src_table.iter().enumerate() {
            if ps <= tol {
                continue;
            }
            let row = &joint[s * tgt_size..(s + 1) * tgt_size];
            if row.iter().filter(|&&p| p > tol).count() != 1 {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Whether `I(X;Y|Z) <= tol`.
    pub fn check_ci<X: AsRef<str>, Y: AsRef<str>, Z: AsRef<str>>(
        &self,
        x: &[X],
        y: &[Y],
        z: &[Z],
        tol: f64,
    ) -> Result<bool> {
        Ok(info::conditional_mutual_information(self, x, y, z)? <= tol)
    }

    /// Returns a copy with variables renamed according to `rename(old) -> Option<new>`.
    pub fn with_renamed(&self, mut rename: impl FnMut(&str) -> Option<String>) -> Result<JointDistribution> {
        let variables = self
            .variables
            .iter()
            .map(|v| match rename(v.name()) {
                Some(n) => v.renamed(n),
                None => v.clone(),
            })
            .collect();
        JointDistribution::new(variables, self.probs.clone())
    }

    /// Reorders the variables; `order` must be a permutation of the variable names.
    pub fn reordered<S: AsRef<str>>(&self, order: &[S]) -> Result<JointDistribution> {
        if order.len() != self.variables.len() {
            return Err(Error::InvalidDistribution("reorder must list every variable".into()));
        }
        self.marginal(order)
    }

    /// Largest absolute entrywise difference; `None` if the variable lists differ.
    pub fn max_abs_diff(&self, other: &JointDistribution) -> Option<f64> {
        if self.variables != other.variables {
            return None;
        }
        Some(self.probs.iter().zip(&other.probs).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
    }

    /// Total-variation distance; `None` if the variable lists differ.
    pub fn total_variation(&self, other: &JointDistribution) -> Option<f64> {
        if self.variables != other.variables {
            return None;
        }
        Some(0.5 * self.probs.iter().zip(&other.probs).map(|(a, b)| (a - b).abs()).sum::<f64>())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("distribution serializes")
    }

    pub fn from_json(text: &str) -> Result<JointDistribution> {
        Ok(serde_json::from_str(text)?)
    }
}

/// A set of joint settings over a stated list of variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Event {
    variables: Vec<String>,
    cards: Vec<usize>,
    members: BTreeSet<usize>,
}

impl Event {
    /// Builds an event over `names` (whose value spaces are read from `d`).
    pub fn new<S: AsRef<str>>(
        d: &JointDistribution,
        names: &[S],
        members: impl IntoIterator<Item = usize>,
    ) -> Result<Event> {
        let positions = d.positions(names)?;
        let cards: Vec<usize> = positions.iter().map(|&p| d.variables[p].cardinality()).collect();
        let size: usize = cards.iter().product();
        let members: BTreeSet<usize> = members.into_iter().collect();
        if let Some(&bad) = members.iter().find(|&&m| m >= size) {
            return Err(Error::InvalidEvent(format!("setting index {bad} out of range {size}")));
        }
        let variables = names.iter().map(|n| n.as_ref().to_string()).collect();
        Ok(Event { variables, cards, members })
    }

    /// The settings of `names` (as value-index tuples) satisfying `pred`.
    pub fn from_predicate<S: AsRef<str>>(
        d: &JointDistribution,
        names: &[S],
        mut pred: impl FnMut(&[usize]) -> bool,
    ) -> Result<Event> {
        let positions = d.positions(names)?;
        let cards: Vec<usize> = positions.iter().map(|&p| d.variables[p].cardinality()).collect();
        let mut odo = Odometer::new(cards);
        let mut members = Vec::new();
        let mut flat = 0;
        while let Some(setting) = odo.next_setting() {
            if pred(setting) {
                members.push(flat);
            }
            flat += 1;
        }
        Event::new(d, names, members)
    }

    /// Every setting of `names`.
    pub fn full<S: AsRef<str>>(d: &JointDistribution, names: &[S]) -> Result<Event> {
        Event::from_predicate(d, names, |_| true)
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn members(&self) -> &BTreeSet<usize> {
        &self.members
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    /// Membership mask over the flat indices of `d`.
    pub(crate) fn lift(&self, d: &JointDistribution) -> Result<Vec<bool>> {
        let positions = d.positions(&self.variables)?;
        let cards: Vec<usize> = positions.iter().map(|&p| d.variables[p].cardinality()).collect();
        if cards != self.cards {
            return Err(Error::InvalidEvent("value spaces differ from the event's".into()));
        }
        Ok(d.projection_index(&positions).into_iter().map(|i| self.members.contains(&i)).collect())
    }

    pub fn probability(&self, d: &JointDistribution) -> Result<f64> {
        let mask = self.lift(d)?;
        Ok(d.probs.iter().zip(mask).filter(|(_, m)| *m).map(|(p, _)| p).sum())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coin(name: &str) -> JointDistribution {
        JointDistribution::uniform(vec![Variable::binary(name)]).unwrap()
    }

    /// X, Y fair coins and Z = X xor Y, built by enumerating the 8 settings.
    fn xor() -> JointDistribution {
        let vars = vec![Variable::binary("X"), Variable::binary("Y"), Variable::binary("Z")];
        JointDistribution::from_fn(vars, |s| if s[2] == s[0] ^ s[1] { 1.0 } else { 0.0 }).unwrap()
    }

    #[test]
    fn marginal_of_two_bits_is_fair_coin() {
        let d = JointDistribution::uniform(vec![Variable::binary("A"), Variable::binary("B")]).unwrap();
        assert_eq!(d.marginal(&["A"]).unwrap(), coin("A"));
    }

    #[test]
    fn marginal_on_everything_is_identity() {
        let d = xor();
        assert_eq!(d.marginal(&["X", "Y", "Z"]).unwrap(), d);
    }

    #[test]
    fn xor_marginal_on_two_inputs_is_uniform() {
        let m = xor().marginal(&["X", "Y"]).unwrap();
        assert!(m.probs().iter().all(|&p| (p - 0.25).abs() < 1e-15));
    }

    #[test]
    fn marginal_preserves_requested_order() {
        let d = xor();
        let m = d.marginal(&["Z", "X"]).unwrap();
        assert_eq!(m.names(), vec!["Z", "X"]);
        // P(Z=1, X=0) = P(X=0, Y=1) = 1/4
        assert!((m.prob_of(&["1", "0"]).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn marginal_rejects_unknown_name() {
        assert!(matches!(xor().marginal(&["W"]), Err(Error::UnknownVariable(_))));
    }

    #[test]
    fn condition_coin_on_heads() {
        let d = coin("C");
        let heads = Event::new(&d, &["C"], [1]).unwrap();
        let c = d.condition(&heads).unwrap();
        assert_eq!(c.probs(), &[0.0, 1.0]);
    }

    #[test]
    fn condition_on_full_space_is_identity() {
        let d = xor();
        let all = Event::full(&d, &["X", "Z"]).unwrap();
        assert_eq!(d.condition(&all).unwrap().max_abs_diff(&d), Some(0.0));
    }

    #[test]
    fn condition_xor_on_z_zero() {
        let d = xor();
        let e = Event::new(&d, &["Z"], [0]).unwrap();
        let c = d.condition(&e).unwrap();
        assert!((c.prob_of(&["0", "0", "0"]).unwrap() - 0.5).abs() < 1e-15);
        assert!((c.prob_of(&["1", "1", "0"]).unwrap() - 0.5).abs() < 1e-15);
        assert!((c.probs().iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn condition_on_null_event_errors() {
        let d = JointDistribution::point_mass(vec![Variable::binary("C")], &[0]).unwrap();
        let e = Event::new(&d, &["C"], [1]).unwrap();
        assert!(matches!(d.condition(&e), Err(Error::ZeroProbabilityEvent)));
    }

    #[test]
    fn product_of_coins() {
        let p = coin("A").product(&coin("B")).unwrap();
        assert_eq!(p.probs(), &[0.25; 4]);
        assert_eq!(p.names(), vec!["A", "B"]);
    }

    #[test]
    fn product_with_point_mass_lifts() {
        let pm = JointDistribution::point_mass(vec![Variable::binary("K")], &[1]).unwrap();
        let p = pm.product(&xor()).unwrap();
        assert_eq!(p.marginal(&["X", "Y", "Z"]).unwrap(), xor());
        assert_eq!(p.marginal(&["K"]).unwrap(), pm);
    }

    #[test]
    fn three_coins_associate() {
        let left = coin("A").product(&coin("B")).unwrap().product(&coin("C")).unwrap();
        let right = coin("A").product(&coin("B").product(&coin("C")).unwrap()).unwrap();
        assert_eq!(left, right);
        assert!(left.probs().iter().all(|&p| (p - 0.125).abs() < 1e-15));
    }

    #[test]
    fn product_rejects_shared_names() {
        assert!(matches!(coin("A").product(&coin("A")), Err(Error::SharedVariable(_))));
    }

    #[test]
    fn determination_on_xor() {
        let d = xor();
        assert!(d.check_determines(&["X", "Y"], &["Z"], DEFAULT_TOL).unwrap());
        assert!(!d.check_determines(&["X"], &["Z"], DEFAULT_TOL).unwrap());
        assert!(d.check_determines(&["X"], &NO_VARS, DEFAULT_TOL).unwrap());
    }

    #[test]
    fn conditional_independence_on_xor() {
        let d = xor();
        assert!(d.check_ci(&["X"], &["Y"], &NO_VARS, DEFAULT_TOL).unwrap());
        assert!(!d.check_ci(&["X"], &["Y"], &["Z"], DEFAULT_TOL).unwrap());
        let p = coin("A").product(&coin("B")).unwrap();
        assert!(p.check_ci(&["A"], &["B"], &NO_VARS, DEFAULT_TOL).unwrap());
    }

    #[test]
    fn loader_rejects_bad_mass() {
        let text = r#"{"variables":[{"name":"X","values":["0","1"]}],"probs":[0.5,0.6]}"#;
        assert!(JointDistribution::from_json(text).is_err());
        let ok = r#"{"variables":[{"name":"X","values":["0","1"]}],"probs":[0.5,0.5]}"#;
        assert_eq!(JointDistribution::from_json(ok).unwrap(), coin("X"));
    }

    #[test]
    fn loader_rejects_numeric_labels_and_duplicates() {
        let numeric = r#"{"variables":[{"name":"X","values":[0,1]}],"probs":[0.5,0.5]}"#;
        assert!(JointDistribution::from_json(numeric).is_err());
        let dup = r#"{"variables":[{"name":"X","values":["0","0"]}],"probs":[0.5,0.5]}"#;
        assert!(JointDistribution::from_json(dup).is_err());
    }

    #[test]
    fn unit_distribution_has_one_outcome() {
        let u = JointDistribution::unit();
        assert_eq!(u.probs(), &[1.0]);
        assert_eq!(u.product(&coin("A")).unwrap(), coin("A"));
        assert_eq!(coin("A").marginal(&NO_VARS).unwrap(), u);
    }
}
