mod suites;

use std::collections::BTreeSet;

use proptest::prelude::*;

use qim::causal::witness_to_psem;
use qim::compat::{verify_witness, Witness};
use qim::dist::JointDistribution;
use qim::hypergraph::{coefficient_vector, is_weakening, DirectedHypergraph};
use qim::info::{conditional_entropy, entropy, information_profile, kl_divergence, multi_information};
use qim::scoring::idef;

use suites::{acyclic_model, arcs, close, config, distribution, hypergraph, subset, SUITE_CASES};

#[test]
fn chain_rule() {
    suites::chain_rule(SUITE_CASES).unwrap();
}

#[test]
fn profile_reconstruction() {
    suites::profile_reconstruction(SUITE_CASES).unwrap();
}

#[test]
fn derandomization_recovers_conditionals() {
    suites::derandomization(SUITE_CASES).unwrap();
}

#[test]
fn deficiency_is_monotone_under_weakening() {
    suites::weakening_monotone(SUITE_CASES).unwrap();
}

#[test]
fn siminc_gradient_matches_finite_differences() {
    suites::siminc_gradient(SUITE_CASES).unwrap();
}

proptest! {
    #![proptest_config(config(256))]

    #[test]
    fn marginal_consistency(d in distribution(), a in 0u32..16, b in 0u32..16) {
        let outer = subset(&d, a | b);
        let inner = subset(&d, b);
        let twice = d.marginal(&outer).unwrap().marginal(&inner).unwrap();
        prop_assert!(twice.max_abs_diff(&d.marginal(&inner).unwrap()).unwrap() <= 1e-12);
    }

    #[test]
    fn entropies_are_nonnegative(d in distribution(), s in 0u32..16, t in 0u32..16) {
        let (s, t) = (subset(&d, s), subset(&d, t));
        prop_assert!(entropy(&d, &t).unwrap() >= -1e-12);
        prop_assert!(conditional_entropy(&d, &t, &s).unwrap() >= -1e-12);
    }

    #[test]
    fn determination_combines(d in distribution(), s in 0u32..16, t in 0u32..16, u in 0u32..16) {
        let (s, t, u) = (subset(&d, s), subset(&d, t), subset(&d, u));
        if d.check_determines(&s, &t, 1e-9).unwrap() && d.check_determines(&s, &u, 1e-9).unwrap() {
            let both: Vec<String> = t.iter().chain(&u).cloned().collect::<BTreeSet<_>>().into_iter().collect();
            prop_assert!(d.check_determines(&s, &both, 1e-9).unwrap());
        }
        // Y is a function of X exactly when Y is independent of itself given X.
        let self_ci = d.check_ci(&t, &t, &s, 1e-12).unwrap();
        prop_assert_eq!(d.check_determines(&s, &t, 0.0).unwrap(), self_ci);
    }

    #[test]
    fn coefficients_dot_profile_is_deficiency(d in distribution(), graph in arcs(0)) {
        let g = hypergraph(d.variables().len(), &graph);
        let c = coefficient_vector(&g, &d.names()).unwrap();
        let dot = c.dot(&information_profile(&d).unwrap()).unwrap();
        prop_assert!(close(dot, idef(&g, &d).unwrap(), 1e-9));
    }

    #[test]
    fn noise_dependence_identity(d in distribution()) {
        let groups: Vec<Vec<String>> = d.names().into_iter().map(|n| vec![n]).collect();
        let mut product = JointDistribution::unit();
        for n in d.names() {
            product = product.product(&d.marginal(&[n]).unwrap()).unwrap();
        }
        let kl = kl_divergence(&d, &product).unwrap();
        prop_assert!(close(kl, multi_information(&d, &groups).unwrap(), 1e-9));
    }

    #[test]
    fn weakening_is_a_preorder(a in arcs(0), b in arcs(0), c in arcs(0)) {
        let (a, b, c) = (hypergraph(4, &a), hypergraph(4, &b), hypergraph(4, &c));
        prop_assert!(is_weakening(&a, &a).is_some());
        if is_weakening(&a, &b).is_some() && is_weakening(&b, &c).is_some() {
            prop_assert!(is_weakening(&a, &c).is_some());
        }
        for label in a.labels() {
            prop_assert!(is_weakening(&a, &a.without_arcs(|x| x.label == label)).is_some());
        }
    }

    #[test]
    fn json_round_trip(d in distribution(), graph in arcs(0)) {
        prop_assert_eq!(JointDistribution::from_json(&d.to_json()).unwrap(), d.clone());
        let g = hypergraph(d.variables().len(), &graph);
        prop_assert_eq!(DirectedHypergraph::from_json(&g.to_json()).unwrap(), g);
    }

    #[test]
    fn acyclic_models_arise_as_witnesses(model in acyclic_model()) {
        let joint = model.arising_distribution().unwrap();
        let arc_map = model
            .structure()
            .arcs()
            .iter()
            .zip(model.noise())
            .map(|(a, u)| (a.label.clone(), u.name().to_string()))
            .collect();
        let w = Witness::new(joint, arc_map).unwrap();
        let mu = w.joint().marginal(&model.structure().nodes().to_vec()).unwrap();
        prop_assert!(verify_witness(&mu, model.structure(), &w, 1e-9).unwrap().passed());

        let (back, _) = witness_to_psem(&w, model.structure()).unwrap();
        prop_assert!(back.in_solution_set(&back.extension_from_witness(&w).unwrap(), 1e-9).unwrap());
    }
}
