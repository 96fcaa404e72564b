mod common;

use std::collections::BTreeMap;

use proptest::prelude::*;

use ban_opt::dynamics::{attractors, step, Configuration};
use ban_opt::network::{interaction_digraph, is_acyclic, recursive_wiring, semantically_equal};
use ban_opt::outputs::output_functions;
use ban_opt::synthesis::{fire, Rule};
use ban_opt::table::{equivalent, simplify};
use ban_opt::unfold::{
    exhaustive_fvs, is_feedback_vertex_set, minimum_fvs_indices, unfold, verify_unfolding,
};
use ban_opt::{parse_expr, Expr, NetworkFile, VarRef};

const NODES: [&str; 3] = ["a", "b", "C*"];
const INPUTS: [&str; 2] = ["alpha", "beta"];

fn expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        any::<bool>().prop_map(Expr::Const),
        prop::sample::select(NODES.to_vec()).prop_map(Expr::node),
        prop::sample::select(INPUTS.to_vec()).prop_map(Expr::input),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Expr::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::and(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| Expr::or(a, b)),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn printed_expressions_parse_back(e in expr()) {
        let text = e.to_string();
        let back = parse_expr(&text, &NODES, &INPUTS).unwrap();
        prop_assert_eq!(back.to_string(), text);
        prop_assert!(equivalent(&back, &e).unwrap());
    }

    #[test]
    fn simplification_preserves_meaning(e in expr()) {
        let s = simplify(&e).unwrap();
        prop_assert!(equivalent(&s, &e).unwrap());
        prop_assert!(s.syntactic_vars().len() <= e.syntactic_vars().len());
    }

    #[test]
    fn network_files_round_trip(seed in any::<u64>(), n in 1usize..7) {
        let f = common::random_ban(&mut common::rng(seed), n, 3);
        let file = NetworkFile::new(f);
        prop_assert_eq!(NetworkFile::parse(&file.to_string()).unwrap(), file);
    }

    #[test]
    fn fvs_matches_the_oracle(seed in any::<u64>(), n in 0usize..=10, p in 0.05f64..0.4) {
        let g = common::random_digraph(&mut common::rng(seed), n, p);
        let bb = minimum_fvs_indices(&g);
        prop_assert!(is_feedback_vertex_set(&g, &bb.vertices));
        prop_assert_eq!(bb.vertices.len(), exhaustive_fvs(&g).unwrap().len());
    }

    #[test]
    fn unfolding_rewires_to_the_original(seed in any::<u64>(), n in 1usize..9) {
        let f = common::random_ban(&mut common::rng(seed), n, 3);
        let u = unfold(&f).unwrap();
        prop_assert!(is_acyclic(&u.module).unwrap());
        prop_assert!(verify_unfolding(&f, &u).unwrap());
        let back = recursive_wiring(&u.module, &u.wiring).unwrap();
        prop_assert!(semantically_equal(&back, &f).unwrap());
        let g = interaction_digraph(&f).unwrap();
        let idx: Vec<usize> = u.cut.iter().map(|s| f.index_of(s).unwrap()).collect();
        prop_assert!(is_feedback_vertex_set(&g.node_successors(), &idx));
    }

    #[test]
    fn every_rule_firing_keeps_outputs(seed in any::<u64>(), mask in any::<u8>()) {
        let m = common::random_module(&mut common::rng(seed), 6, 2, 3);
        let x: Vec<String> = m
            .nodes()
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, s)| s.clone())
            .collect();
        let want = output_functions(&m, &x).unwrap();
        for rule in Rule::ORDER {
            let real: BTreeMap<String, String> = x.iter().map(|s| (s.clone(), s.clone())).collect();
            if let Some(f) = fire(rule, &m, &real).unwrap() {
                prop_assert!(is_acyclic(&f.module).unwrap());
                prop_assert!(f.module.len() <= m.len());
                for s in &x {
                    let node = &f.realization[s];
                    let got = output_functions(&f.module, &[node]).unwrap();
                    prop_assert!(got[node].equivalent(&want[s]), "{} broke O_{}", f.rewrite, s);
                }
            }
        }
    }

    #[test]
    fn attractor_states_are_recurrent(seed in any::<u64>(), n in 1usize..8) {
        let f = common::random_ban(&mut common::rng(seed), n, 3);
        let atts = attractors(&f, 24).unwrap();
        prop_assert!(!atts.is_empty());
        for a in &atts {
            for (i, &x) in a.states().iter().enumerate() {
                let next = step(&f, &Configuration::new(x, n)).unwrap();
                prop_assert_eq!(next.index(), a.states()[(i + 1) % a.len()]);
            }
        }
    }
}

#[test]
fn generators_keep_their_promises() {
    let mut rng = common::rng(1);
    for _ in 0..50 {
        let m = common::random_module(&mut rng, 6, 2, 3);
        assert!(is_acyclic(&m).unwrap());
        for local in m.locals() {
            assert!(local.syntactic_vars().len() <= 3);
            assert!(local
                .syntactic_vars()
                .iter()
                .all(|v| !matches!(v, VarRef::Delayed(..))));
        }
    }
}
