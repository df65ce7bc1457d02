//! Shannon quantities in bits and the information profile.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::dist::JointDistribution;
use crate::error::{Error, Result};

/// `-sum p log2 p` over a table, with `0 log 0 = 0`.
pub(crate) fn entropy_of(probs: &[f64]) -> f64 {
    probs.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.log2()).sum()
}

/// Entropy of the marginal on `vars`.
pub fn entropy<S: AsRef<str>>(d: &JointDistribution, vars: &[S]) -> Result<f64> {
    let positions = d.set_positions(vars)?;
    Ok(entropy_of(&d.project(&positions)))
}

fn union<A: AsRef<str>, B: AsRef<str>>(a: &[A], b: &[B]) -> Vec<String> {
    let mut out: Vec<String> = a.iter().map(|s| s.as_ref().to_string()).collect();
    for s in b {
        if !out.iter().any(|o| o == s.as_ref()) {
            out.push(s.as_ref().to_string());
        }
    }
    out
}

/// `H(T | S) = H(S ∪ T) - H(S)`.
pub fn conditional_entropy<T: AsRef<str>, S: AsRef<str>>(
    d: &JointDistribution,
    targets: &[T],
    given: &[S],
) -> Result<f64> {
    Ok(entropy(d, &union(given, targets))? - entropy(d, given)?)
}

/// `I(X;Y|Z)`; `X` and `Y` may overlap, in which case `I(Y;Y|Z) = H(Y|Z)`.
pub fn conditional_mutual_information<X: AsRef<str>, Y: AsRef<str>, Z: AsRef<str>>(
    d: &JointDistribution,
    x: &[X],
    y: &[Y],
    z: &[Z],
) -> Result<f64> {
    let xz = union(x, z);
    let yz = union(y, z);
    let xyz = union(&xz, y);
    Ok(entropy(d, &xz)? + entropy(d, &yz)? - entropy(d, &xyz)? - entropy(d, z)?)
}

/// Co-information of a family of variable sets, conditioned on `cond`:
/// `-sum over nonempty subfamilies T of (-1)^|T| H(∪T | cond)`.
///
/// For two sets this is conditional mutual information; for three singletons it
/// is the interaction information `I(X;Y;Z)`.
pub fn co_information<F: AsRef<[S]>, S: AsRef<str>, C: AsRef<str>>(
    d: &JointDistribution,
    family: &[F],
    cond: &[C],
) -> Result<f64> {
    if family.is_empty() {
        return Err(Error::Precondition("co-information of an empty family".into()));
    }
    if family.len() > 24 {
        return Err(Error::Precondition("family too large to enumerate".into()));
    }
    let h_cond = entropy(d, cond)?;
    let mut total = 0.0;
    for mask in 1u32..(1 << family.len()) {
        let mut members: Vec<String> = cond.iter().map(|c| c.as_ref().to_string()).collect();
        for (i, set) in family.iter().enumerate() {
            if mask & (1 << i) != 0 {
                members = union(&members, set.as_ref());
            }
        }
        let sign = if mask.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        total -= sign * (entropy(d, &members)? - h_cond);
    }
    Ok(total)
}

/// Relative entropy `D(p || q)` in bits.
///
/// Returns `+inf` when `p` puts mass where `q` has none; callers detect the
/// support violation with `is_infinite()`.
pub fn kl_divergence(p: &JointDistribution, q: &JointDistribution) -> Result<f64> {
    if p.variables() != q.variables() {
        return Err(Error::InvalidDistribution("KL divergence needs identical variable lists".into()));
    }
    let mut total = 0.0;
    for (&a, &b) in p.probs().iter().zip(q.probs()) {
        if a > 0.0 {
            if b <= 0.0 {
                return Ok(f64::INFINITY);
            }
            total += a * (a / b).log2();
        }
    }
    Ok(total.max(0.0))
}

/// `sum_i H(G_i) - H(∪ G_i)`: the divergence of the joint of disjoint groups from
/// the product of their marginals.
pub fn multi_information<G: AsRef<[S]>, S: AsRef<str>>(d: &JointDistribution, groups: &[G]) -> Result<f64> {
    let mut all: Vec<String> = Vec::new();
    let mut sum = 0.0;
    for g in groups {
        sum += entropy(d, g.as_ref())?;
        all = union(&all, g.as_ref());
    }
    Ok(sum - entropy(d, &all)?)
}

/// Entropies of every subset of the distribution's variables, indexed by bitmask.
pub(crate) fn entropy_lattice(d: &JointDistribution) -> Vec<f64> {
    let n = d.variables().len();
    (0..1usize << n)
        .map(|mask| {
            let positions: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
            entropy_of(&d.project(&positions))
        })
        .collect()
}

/// The signed decomposition of all entropies of a distribution into `2^n - 1` atoms.
///
/// `atom(W)` is the co-information of the singletons in `W` conditioned on every
/// variable outside `W`. Any `H(T|S)` is the sum of atoms meeting `T` and missing `S`.
#[derive(Debug, Clone, PartialEq)]
pub struct InformationProfile {
    variables: Vec<String>,
    /// Indexed by bitmask over `variables`; index 0 is unused and holds 0.
    atoms: Vec<f64>,
}

/// Largest variable count for which profiles are computed.
pub const MAX_PROFILE_VARIABLES: usize = 16;

pub fn information_profile(d: &JointDistribution) -> Result<InformationProfile> {
    let n = d.variables().len();
    if n > MAX_PROFILE_VARIABLES {
        return Err(Error::Precondition(format!("{n} variables is too many for a profile")));
    }
    let h = entropy_lattice(d);
    let full = (1usize << n) - 1;
    let mut atoms = vec![0.0; 1 << n];
    for w in 1..=full {
        let c = full & !w;
        let mut value = 0.0;
        // Nonempty submasks of w.
        let mut t = w;
        while t > 0 {
            let sign = if t.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            value -= sign * (h[t | c] - h[c]);
            t = (t - 1) & w;
        }
        atoms[w] = value;
    }
    Ok(InformationProfile { variables: d.names(), atoms })
}

impl InformationProfile {
    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub(crate) fn mask_of<S: AsRef<str>>(&self, names: &[S]) -> Result<usize> {
        let mut mask = 0;
        for n in names {
            let i = self
                .variables
                .iter()
                .position(|v| v == n.as_ref())
                .ok_or_else(|| Error::UnknownVariable(n.as_ref().to_string()))?;
            mask |= 1 << i;
        }
        Ok(mask)
    }

    /// The atom for a nonempty subset of variables.
    pub fn atom<S: AsRef<str>>(&self, subset: &[S]) -> Result<f64> {
        let mask = self.mask_of(subset)?;
        if mask == 0 {
            return Err(Error::Precondition("the empty set has no atom".into()));
        }
        Ok(self.atoms[mask])
    }

    pub(crate) fn atom_by_mask(&self, mask: usize) -> f64 {
        self.atoms[mask]
    }

    pub fn len(&self) -> usize {
        self.atoms.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `(subset, atom)` pairs in bitmask order.
    pub fn iter(&self) -> impl Iterator<Item = (Vec<&str>, f64)> + '_ {
        (1..self.atoms.len()).map(move |mask| {
            let names = (0..self.variables.len())
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| self.variables[i].as_str())
                .collect();
            (names, self.atoms[mask])
        })
    }

    /// `H(T | S)` rebuilt from the atoms.
    pub fn conditional_entropy<T: AsRef<str>, S: AsRef<str>>(&self, targets: &[T], given: &[S]) -> Result<f64> {
        let t = self.mask_of(targets)?;
        let s = self.mask_of(given)?;
        Ok((1..self.atoms.len())
            .filter(|w| w & t != 0 && w & s == 0)
            .map(|w| self.atoms[w])
            .sum())
    }

    pub fn total(&self) -> f64 {
        self.atoms.iter().sum()
    }

    /// Atoms keyed by comma-joined, sorted variable names.
    pub fn keyed(&self) -> BTreeMap<String, f64> {
        self.iter()
            .map(|(mut names, v)| {
                names.sort_unstable();
                (names.join(","), v)
            })
            .collect()
    }

    pub fn max_abs_diff(&self, other: &InformationProfile) -> Option<f64> {
        if self.variables != other.variables {
            return None;
        }
        Some(self.atoms.iter().zip(&other.atoms).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
    }

    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct Out {
            atoms: BTreeMap<String, f64>,
        }
        serde_json::to_value(Out { atoms: self.keyed() }).expect("profile serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::{Variable, NO_VARS};

    fn xor() -> JointDistribution {
        let vars = vec![Variable::binary("X"), Variable::binary("Y"), Variable::binary("Z")];
        JointDistribution::from_fn(vars, |s| if s[2] == s[0] ^ s[1] { 1.0 } else { 0.0 }).unwrap()
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn entropy_basics() {
        let coin = JointDistribution::uniform(vec![Variable::binary("C")]).unwrap();
        assert!(close(entropy(&coin, &["C"]).unwrap(), 1.0));
        let pm = JointDistribution::point_mass(vec![Variable::binary("C")], &[1]).unwrap();
        assert_eq!(entropy(&pm, &["C"]).unwrap(), 0.0);
        assert!(close(entropy(&xor(), &["X", "Y", "Z"]).unwrap(), 2.0));
        assert_eq!(entropy(&xor(), &NO_VARS).unwrap(), 0.0);
    }

    #[test]
    fn conditional_entropies_on_xor() {
        let d = xor();
        assert!(close(conditional_entropy(&d, &["Z"], &["X", "Y"]).unwrap(), 0.0));
        assert!(close(conditional_entropy(&d, &["Y"], &["X"]).unwrap(), 1.0));
        assert!(close(
            conditional_entropy(&d, &["Y", "Z"], &NO_VARS).unwrap(),
            entropy(&d, &["Y", "Z"]).unwrap()
        ));
    }

    #[test]
    fn interaction_information_of_xor_is_minus_one() {
        let d = xor();
        let fam = [vec!["X"], vec!["Y"], vec!["Z"]];
        assert!(close(co_information(&d, &fam, &NO_VARS).unwrap(), -1.0));
        let pair = [vec!["X"], vec!["Y"]];
        assert!(close(co_information(&d, &pair, &NO_VARS).unwrap(), 0.0));
        assert!(close(co_information(&d, &pair, &["Z"]).unwrap(), 1.0));
    }

    #[test]
    fn xor_profile() {
        let p = information_profile(&xor()).unwrap();
        assert_eq!(p.len(), 7);
        for single in ["X", "Y", "Z"] {
            assert!(close(p.atom(&[single]).unwrap(), 0.0));
        }
        for pair in [["X", "Y"], ["X", "Z"], ["Y", "Z"]] {
            assert!(close(p.atom(&pair).unwrap(), 1.0));
        }
        assert!(close(p.atom(&["X", "Y", "Z"]).unwrap(), -1.0));
        assert!(close(p.total(), 2.0));
    }

    #[test]
    fn independent_coins_have_only_singleton_atoms() {
        let vars = (0..4).map(|i| Variable::binary(format!("C{i}"))).collect();
        let d = JointDistribution::uniform(vars).unwrap();
        let p = information_profile(&d).unwrap();
        for (names, v) in p.iter() {
            let expected = if names.len() == 1 { 1.0 } else { 0.0 };
            assert!(close(v, expected), "{names:?} -> {v}");
        }
    }

    #[test]
    fn profile_json_keys_are_sorted_names() {
        let p = information_profile(&xor()).unwrap();
        let json = p.to_json();
        assert!(json["atoms"]["X,Y,Z"].as_f64().unwrap() < -0.99);
        assert!(json["atoms"]["X,Z"].is_number());
    }

    #[test]
    fn kl_cases() {
        let v = || vec![Variable::binary("C")];
        let fair = JointDistribution::uniform(v()).unwrap();
        let skew = JointDistribution::new(v(), vec![0.75, 0.25]).unwrap();
        let pm = JointDistribution::point_mass(v(), &[0]).unwrap();
        assert_eq!(kl_divergence(&fair, &fair).unwrap(), 0.0);
        assert!(kl_divergence(&fair, &pm).unwrap().is_infinite());
        // 0.75 log2(1.5) + 0.25 log2(0.5)
        assert!((kl_divergence(&skew, &fair).unwrap() - 0.188_721_875_540_867).abs() < 1e-12);
    }
}
