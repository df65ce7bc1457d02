//! Named distributions built from fair coins, and a small golden corpus of
//! (distribution, hypergraph) pairs with known answers.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::compat::{decide_general, verify_witness, GeneralOptions, Witness};
use crate::dist::{JointDistribution, Variable};
use crate::error::{Error, Result};
use crate::hypergraph::{from_graph, noise_name, DirectedHypergraph, Hyperarc};
use crate::info::conditional_mutual_information;
use crate::scoring::{idef, siminc};

/// Pushes `coins` fair coins through `f`, which returns a value index per variable.
pub fn from_coins(coins: usize, variables: Vec<Variable>, f: impl Fn(&[usize]) -> Vec<usize>) -> Result<JointDistribution> {
    let cards: Vec<usize> = variables.iter().map(Variable::cardinality).collect();
    let mut probs = vec![0.0; cards.iter().product()];
    let weight = 0.5f64.powi(coins as i32);
    let mut bits = vec![0; coins];
    for k in 0..1usize << coins {
        for (i, b) in bits.iter_mut().enumerate() {
            *b = (k >> (coins - 1 - i)) & 1;
        }
        let setting = f(&bits);
        let flat = setting.iter().zip(&cards).fold(0, |acc, (&v, &c)| acc * c + v);
        probs[flat] += weight;
    }
    JointDistribution::new(variables, probs)
}

/// Variable whose values are the bit strings of length `width`, first bit most significant.
fn bits_variable(name: &str, width: usize) -> Variable {
    let labels = (0..1usize << width).map(|v| format!("{v:0width$b}"));
    Variable::new(name, labels).expect("bit-string labels are distinct")
}

fn pack(bits: &[usize]) -> usize {
    bits.iter().fold(0, |acc, &b| acc * 2 + b)
}

/// Two fair coins and their parity. The parity is the last of `names`.
pub fn xor_triple(names: [&str; 3]) -> JointDistribution {
    let vars = names.iter().map(|n| Variable::binary(*n)).collect();
    from_coins(2, vars, |c| vec![c[0], c[1], c[0] ^ c[1]]).expect("valid construction")
}

fn pair_vars(names: &[&str]) -> Vec<Variable> {
    names.iter().map(|n| bits_variable(n, 2)).collect()
}

/// `A = (X1,X2)`, `B = (X2,X3)`, `C = (X3,X1)` for three fair coins.
pub fn cyclic_pairs() -> JointDistribution {
    from_coins(3, pair_vars(&["A", "B", "C"]), |x| {
        vec![pack(&[x[0], x[1]]), pack(&[x[1], x[2]]), pack(&[x[2], x[0]])]
    })
    .expect("valid construction")
}

/// `A = (X1,X2)`, `B = (X1,X3)`, `C = (X1, X2 xor X3)` for three fair coins.
pub fn anchored_pairs() -> JointDistribution {
    from_coins(3, pair_vars(&["A", "B", "C"]), |x| {
        vec![pack(&[x[0], x[1]]), pack(&[x[0], x[2]]), pack(&[x[0], x[1] ^ x[2]])]
    })
    .expect("valid construction")
}

/// The three-cycle `A -> B -> C -> A`, arcs labelled by their targets.
pub fn three_cycle(names: [&str; 3]) -> DirectedHypergraph {
    let [a, b, c] = names;
    from_graph(&[a, b, c], &[(a, b), (b, c), (c, a)], &[]).expect("valid graph")
}

/// Witness for the cyclic pairs on the three-cycle, each noise being the coin a node does not share with its parent.
pub fn cyclic_pairs_witness() -> Witness {
    // noise of arcs into B, C, A: X3, X1, X2
    pairs_witness(|x| {
        (vec![pack(&[x[0], x[1]]), pack(&[x[1], x[2]]), pack(&[x[2], x[0]])], [x[2], x[0], x[1]])
    })
}

/// Witness for the anchored pairs on the three-cycle: `X3 xor X1`, `X2`, `X3`.
pub fn anchored_pairs_witness() -> Witness {
    pairs_witness(|x| {
        (vec![pack(&[x[0], x[1]]), pack(&[x[0], x[2]]), pack(&[x[0], x[1] ^ x[2]])], [x[2] ^ x[0], x[1], x[2]])
    })
}

fn pairs_witness(f: impl Fn(&[usize]) -> (Vec<usize>, [usize; 3])) -> Witness {
    let mut vars = pair_vars(&["A", "B", "C"]);
    let targets = ["B", "C", "A"];
    vars.extend(targets.iter().map(|t| Variable::binary(noise_name(t))));
    let joint = from_coins(3, vars, |x| {
        let (mut v, u) = f(x);
        v.extend(u);
        v
    })
    .expect("valid construction");
    let arc_map = targets.iter().map(|t| (t.to_string(), noise_name(t))).collect();
    Witness::new(joint, arc_map).expect("valid witness")
}

/// Uniform `X` and `Z` with `Y` a copy of `X`.
pub fn copy_with_spare() -> JointDistribution {
    let vars = ["X", "Y", "Z"].iter().map(|n| Variable::binary(*n)).collect();
    from_coins(2, vars, |c| vec![c[0], c[0], c[1]]).expect("valid construction")
}

/// A distribution with a witness for one arc `Y -> X` plus `n` parallel arcs
/// `X -> Y`, in which `X` nevertheless does not determine `Y`.
#[derive(Debug, Clone)]
pub struct ParallelCounterexample {
    pub distribution: JointDistribution,
    pub hypergraph: DirectedHypergraph,
    pub witness: Witness,
}

/// Coins `A, U0..Un`; `X = (A^U1..A^Un, U0^U1..U0^Un)` and `Y = (A, U0^U1..U0^Un)`.
/// The back arc `g` uses `U0`; arc `f<i>` uses `Ui`.
pub fn parallel_counterexample(n: usize) -> Result<ParallelCounterexample> {
    if n == 0 || 2 * n > 20 {
        return Err(Error::InvalidOption(format!("parallel counterexample needs 1 <= n <= 10, got {n}")));
    }
    let mut arcs = vec![Hyperarc::new("g", &["Y"], &["X"])];
    arcs.extend((1..=n).map(|i| Hyperarc::new(format!("f{i}"), &["X"], &["Y"])));
    let hypergraph = DirectedHypergraph::new(["X", "Y"], arcs)?;
    let labels: Vec<String> = hypergraph.labels().into_iter().map(String::from).collect();

    let mut vars = vec![bits_variable("X", 2 * n), bits_variable("Y", n + 1)];
    vars.extend(labels.iter().map(|l| Variable::binary(noise_name(l))));
    // coin 0 is A, coin 1 is U0, coin 1+i is Ui
    let joint = from_coins(n + 2, vars, |c| {
        let (a, u0, u) = (c[0], c[1], &c[2..]);
        let mut x: Vec<usize> = u.iter().map(|ui| a ^ ui).collect();
        x.extend(u.iter().map(|ui| u0 ^ ui));
        let mut y = vec![a];
        y.extend(u.iter().map(|ui| u0 ^ ui));
        let mut out = vec![pack(&x), pack(&y), u0];
        out.extend(u);
        out
    })?;
    let arc_map = labels.iter().map(|l| (l.clone(), noise_name(l))).collect();
    let witness = Witness::new(joint, arc_map)?;
    let distribution = witness.joint().marginal(&["X", "Y"])?;
    Ok(ParallelCounterexample { distribution, hypergraph, witness })
}

/// The named distributions used throughout the corpus.
pub fn build_corpus_distributions() -> BTreeMap<String, JointDistribution> {
    let mut out = BTreeMap::new();
    out.insert("xor".to_string(), xor_triple(["X", "Y", "Z"]));
    out.insert("cyclic-pairs".to_string(), cyclic_pairs());
    out.insert("anchored-pairs".to_string(), anchored_pairs());
    out.insert("copy-with-spare".to_string(), copy_with_spare());
    out.insert(
        "parallel-counterexample-3".to_string(),
        parallel_counterexample(3).expect("n = 3 is in range").distribution,
    );
    out
}

/// `I(x; y | given)` in bits must equal `bits`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InformationCheck {
    pub x: Vec<String>,
    pub y: Vec<String>,
    #[serde(default)]
    pub given: Vec<String>,
    pub bits: f64,
}

/// Whether `sources` determine `targets` in the distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeterminationCheck {
    pub sources: Vec<String>,
    pub targets: Vec<String>,
    pub holds: bool,
}

/// What a corpus entry should produce. Absent fields are not checked.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Expectation {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub idef_bits: Option<f64>,
    /// Tolerance at which the shipped witness must verify.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub siminc_below: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub determines: Option<DeterminationCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub information: Option<InformationCheck>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusEntry {
    pub name: String,
    pub distribution: JointDistribution,
    pub hypergraph: DirectedHypergraph,
    pub witness: Option<Witness>,
    pub expect: Expectation,
    pub note: String,
}

/// Tolerance for expected scores.
pub const SCORE_TOL: f64 = 1e-9;

fn entry(
    name: &str,
    distribution: JointDistribution,
    hypergraph: DirectedHypergraph,
    expect: Expectation,
    note: &str,
) -> CorpusEntry {
    CorpusEntry { name: name.into(), distribution, hypergraph, witness: None, expect, note: note.into() }
}

fn verdict(v: &str) -> Option<String> {
    Some(v.to_string())
}

fn strings(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

/// The built-in corpus. The files shipped under `corpus/` are this list written by [`write_corpus`].
pub fn builtin_corpus() -> Vec<CorpusEntry> {
    let coin = JointDistribution::uniform(vec![Variable::binary("X")]).expect("valid");
    let constant = JointDistribution::point_mass(vec![Variable::binary("X")], &[0]).expect("valid");
    let double_root =
        DirectedHypergraph::new(["X"], vec![Hyperarc::new("a1", &[] as &[&str], &["X"]), Hyperarc::new("a2", &[] as &[&str], &["X"])])
            .expect("valid");
    let two_roots = DirectedHypergraph::new(
        ["X", "Y", "Z"],
        vec![Hyperarc::new("x", &[] as &[&str], &["X"]), Hyperarc::new("y", &[] as &[&str], &["Y"])],
    )
    .expect("valid");
    let xy = vec![Variable::binary("X"), Variable::binary("Y")];
    let abc = xor_triple(["A", "C", "B"]).reordered(&["A", "B", "C"]).expect("valid");
    let counter = parallel_counterexample(3).expect("n = 3 is in range");

    let mut out = vec![
        entry(
            "xor-three-cycle",
            xor_triple(["X", "Y", "Z"]),
            three_cycle(["X", "Y", "Z"]),
            Expectation { verdict: verdict("incompatible"), idef_bits: Some(1.0), ..Default::default() },
            "parity of two fair coins cannot arise around a three-cycle",
        ),
        CorpusEntry {
            witness: Some(anchored_pairs_witness()),
            ..entry(
                "anchored-pairs-three-cycle",
                anchored_pairs(),
                three_cycle(["A", "B", "C"]),
                Expectation {
                    verdict: verdict("compatible"),
                    idef_bits: Some(0.0),
                    witness_tol: Some(1e-12),
                    ..Default::default()
                },
                "pairs sharing one anchor coin; compatible with the three-cycle",
            )
        },
        CorpusEntry {
            witness: Some(cyclic_pairs_witness()),
            ..entry(
                "cyclic-pairs-three-cycle",
                cyclic_pairs(),
                three_cycle(["A", "B", "C"]),
                Expectation {
                    verdict: verdict("compatible"),
                    idef_bits: Some(0.0),
                    witness_tol: Some(1e-12),
                    ..Default::default()
                },
                "pairs of adjacent coins on a ring; same profile as the anchored pairs",
            )
        },
        entry(
            "two-cycle-any",
            JointDistribution::new(xy, vec![0.1, 0.2, 0.3, 0.4]).expect("valid"),
            from_graph(&["X", "Y"], &[("X", "Y"), ("Y", "X")], &[]).expect("valid"),
            Expectation { verdict: verdict("compatible"), ..Default::default() },
            "the two-cycle admits every distribution",
        ),
        entry(
            "constant-double-root",
            constant,
            double_root.clone(),
            Expectation { verdict: verdict("compatible"), idef_bits: Some(0.0), ..Default::default() },
            "two unconditional arcs into a constant",
        ),
        entry(
            "coin-double-root",
            coin,
            double_root,
            Expectation { verdict: verdict("incompatible"), idef_bits: Some(1.0), ..Default::default() },
            "two unconditional arcs force a constant, a fair coin is not one",
        ),
        entry(
            "copy-with-spare-roots",
            copy_with_spare(),
            two_roots,
            Expectation {
                verdict: verdict("incompatible"),
                idef_bits: Some(0.0),
                information: Some(InformationCheck { x: strings(&["X"]), y: strings(&["Y"]), given: vec![], bits: 1.0 }),
                ..Default::default()
            },
            "zero deficiency yet the two roots are dependent",
        ),
        entry(
            "xor-collider",
            xor_triple(["X", "Y", "Z"]),
            from_graph(&["X", "Y", "Z"], &[("X", "Z"), ("Y", "Z")], &[]).expect("valid"),
            Expectation { verdict: verdict("compatible"), idef_bits: Some(0.0), ..Default::default() },
            "parity as the child of a collider",
        ),
        entry(
            "xor-undirected-chain",
            abc,
            from_graph(&["A", "B", "C"], &[], &[("A", "B"), ("B", "C")]).expect("valid"),
            Expectation {
                verdict: verdict("compatible"),
                information: Some(InformationCheck {
                    x: strings(&["A"]),
                    y: strings(&["C"]),
                    given: strings(&["B"]),
                    bits: 1.0,
                }),
                ..Default::default()
            },
            "compatible through the collider although the ends are dependent given the middle",
        ),
        CorpusEntry {
            witness: Some(counter.witness),
            ..entry(
                "parallel-counterexample-3",
                counter.distribution,
                counter.hypergraph,
                Expectation {
                    idef_bits: Some(-1.0),
                    witness_tol: Some(1e-12),
                    determines: Some(DeterminationCheck {
                        sources: strings(&["X"]),
                        targets: strings(&["Y"]),
                        holds: false,
                    }),
                    ..Default::default()
                },
                "three parallel arcs X -> Y with a witness, yet X does not determine Y",
            )
        },
        entry(
            "coins-two-roots",
            JointDistribution::uniform(vec![Variable::binary("X"), Variable::binary("Y"), Variable::binary("Z")])
                .expect("valid")
                .marginal(&["X", "Y"])
                .expect("valid"),
            DirectedHypergraph::new(
                ["X", "Y"],
                vec![Hyperarc::new("x", &[] as &[&str], &["X"]), Hyperarc::new("y", &[] as &[&str], &["Y"])],
            )
            .expect("valid"),
            Expectation {
                verdict: verdict("compatible"),
                idef_bits: Some(0.0),
                siminc_below: Some(1e-6),
                ..Default::default()
            },
            "independent coins from independent roots",
        ),
        entry(
            "xor-chain",
            xor_triple(["X", "Y", "Z"]),
            from_graph(&["X", "Y", "Z"], &[("X", "Y"), ("Y", "Z")], &[]).expect("valid"),
            Expectation { verdict: verdict("incompatible"), ..Default::default() },
            "the chain needs X and Z independent given Y",
        ),
    ];
    out.sort_by(|a, b| a.name.cmp(&b.name));
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct ManifestEntry {
    name: String,
    distribution: String,
    hypergraph: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    witness: Option<String>,
    #[serde(default)]
    expect: Expectation,
    #[serde(default)]
    note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Manifest {
    entries: Vec<ManifestEntry>,
}

pub const MANIFEST_FILE: &str = "manifest.json";

/// Writes each entry as `<name>.dist.json`, `<name>.graph.json` and optionally
/// `<name>.witness.json`, plus a manifest listing them.
pub fn write_corpus(dir: &Path, entries: &[CorpusEntry]) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut manifest = Manifest { entries: Vec::new() };
    for e in entries {
        let dist = format!("{}.dist.json", e.name);
        let graph = format!("{}.graph.json", e.name);
        fs::write(dir.join(&dist), e.distribution.to_json() + "\n")?;
        fs::write(dir.join(&graph), e.hypergraph.to_json() + "\n")?;
        let witness = match &e.witness {
            Some(w) => {
                let file = format!("{}.witness.json", e.name);
                fs::write(dir.join(&file), w.to_json() + "\n")?;
                Some(file)
            }
            None => None,
        };
        manifest.entries.push(ManifestEntry {
            name: e.name.clone(),
            distribution: dist,
            hypergraph: graph,
            witness,
            expect: e.expect.clone(),
            note: e.note.clone(),
        });
    }
    fs::write(dir.join(MANIFEST_FILE), serde_json::to_string_pretty(&manifest)? + "\n")?;
    Ok(())
}

/// Reads a corpus written by [`write_corpus`].
pub fn load_corpus(dir: &Path) -> Result<Vec<CorpusEntry>> {
    let manifest: Manifest = serde_json::from_str(&fs::read_to_string(dir.join(MANIFEST_FILE))?)?;
    manifest
        .entries
        .into_iter()
        .map(|m| {
            let witness = match &m.witness {
                Some(f) => Some(Witness::from_json(&fs::read_to_string(dir.join(f))?)?),
                None => None,
            };
            Ok(CorpusEntry {
                distribution: JointDistribution::from_json(&fs::read_to_string(dir.join(&m.distribution))?)?,
                hypergraph: DirectedHypergraph::from_json(&fs::read_to_string(dir.join(&m.hypergraph))?)?,
                witness,
                expect: m.expect,
                note: m.note,
                name: m.name,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub check: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntryReport {
    pub name: String,
    pub passed: bool,
    pub checks: Vec<CheckOutcome>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusReport {
    pub passed: bool,
    pub entries: Vec<EntryReport>,
}

fn outcome(check: &str, passed: bool, detail: String) -> CheckOutcome {
    CheckOutcome { check: check.into(), passed, detail }
}

/// Runs every expectation of one entry. Errors become failed checks.
pub fn run_entry(e: &CorpusEntry, options: &GeneralOptions) -> EntryReport {
    let mut checks = Vec::new();
    let x = &e.expect;
    if let Some(want) = x.idef_bits {
        checks.push(match idef(&e.hypergraph, &e.distribution) {
            Ok(got) => outcome("idef", (got - want).abs() <= SCORE_TOL, format!("{got:.12} bits, expected {want}")),
            Err(err) => outcome("idef", false, err.to_string()),
        });
    }
    if let Some(tol) = x.witness_tol {
        checks.push(match &e.witness {
            None => outcome("witness", false, "no witness shipped".into()),
            Some(w) => match verify_witness(&e.distribution, &e.hypergraph, w, tol) {
                Ok(r) => outcome("witness", r.passed(), format!("verified at tolerance {tol:e}")),
                Err(err) => outcome("witness", false, err.to_string()),
            },
        });
    }
    if let Some(d) = &x.determines {
        checks.push(match e.distribution.check_determines(&d.sources, &d.targets, SCORE_TOL) {
            Ok(got) => outcome("determines", got == d.holds, format!("{:?} determines {:?}: {got}", d.sources, d.targets)),
            Err(err) => outcome("determines", false, err.to_string()),
        });
    }
    if let Some(c) = &x.information {
        checks.push(match conditional_mutual_information(&e.distribution, &c.x, &c.y, &c.given) {
            Ok(got) => outcome("information", (got - c.bits).abs() <= SCORE_TOL, format!("{got:.12} bits, expected {}", c.bits)),
            Err(err) => outcome("information", false, err.to_string()),
        });
    }
    if let Some(bound) = x.siminc_below {
        checks.push(match siminc(&e.hypergraph, &e.distribution, &options.siminc) {
            Ok(r) => outcome("siminc", r.value < bound, format!("{:.3e} bits, bound {bound:e}", r.value)),
            Err(err) => outcome("siminc", false, err.to_string()),
        });
    }
    if let Some(want) = &x.verdict {
        checks.push(match decide_general(&e.hypergraph, &e.distribution, options) {
            Ok(v) => outcome("verdict", v.status() == want, format!("{}, expected {want}", v.status())),
            Err(err) => outcome("verdict", false, err.to_string()),
        });
    }
    EntryReport { name: e.name.clone(), passed: checks.iter().all(|c| c.passed), checks }
}

pub fn run_corpus(entries: &[CorpusEntry], options: &GeneralOptions) -> CorpusReport {
    let entries: Vec<EntryReport> = entries.iter().map(|e| run_entry(e, options)).collect();
    CorpusReport { passed: entries.iter().all(|e| e.passed), entries }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::info::{conditional_entropy, information_profile};

    #[test]
    fn xor_has_four_equal_outcomes() {
        let d = xor_triple(["X", "Y", "Z"]);
        assert_eq!(d.probs().iter().filter(|&&p| p == 0.25).count(), 4);
        assert_eq!(d.probs().iter().filter(|&&p| p == 0.0).count(), 4);
    }

    #[test]
    fn ring_and_anchor_share_a_profile() {
        let p = information_profile(&cyclic_pairs()).unwrap();
        let q = information_profile(&anchored_pairs()).unwrap();
        assert!(p.max_abs_diff(&q).unwrap() < 1e-9);
    }

    #[test]
    fn counterexample_profile() {
        let c = parallel_counterexample(3).unwrap();
        let d = &c.distribution;
        assert!((conditional_entropy(d, &["X"], &["Y"]).unwrap() - 1.0).abs() < 1e-9);
        assert!((conditional_entropy(d, &["Y"], &["X"]).unwrap() - 1.0).abs() < 1e-9);
        assert!((conditional_mutual_information(d, &["X"], &["Y"], &[] as &[&str]).unwrap() - 3.0).abs() < 1e-9);
        assert!(verify_witness(d, &c.hypergraph, &c.witness, 1e-12).unwrap().passed());
        assert!(parallel_counterexample(0).is_err());
    }

    #[test]
    fn pair_witnesses_verify() {
        let g = three_cycle(["A", "B", "C"]);
        assert!(verify_witness(&anchored_pairs(), &g, &anchored_pairs_witness(), 1e-12).unwrap().passed());
        assert!(verify_witness(&cyclic_pairs(), &g, &cyclic_pairs_witness(), 1e-12).unwrap().passed());
    }

    #[test]
    fn corpus_round_trips_through_files() {
        let dir = std::env::temp_dir().join(format!("qim-corpus-{}", std::process::id()));
        let entries = builtin_corpus();
        write_corpus(&dir, &entries).unwrap();
        let back = load_corpus(&dir).unwrap();
        fs::remove_dir_all(&dir).ok();
        assert_eq!(back, entries);
    }
}
