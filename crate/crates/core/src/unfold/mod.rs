//! Acyclic unfolding: cut a minimum feedback vertex set and replace every
//! cut node's outgoing influence by a fresh input.

use std::collections::{BTreeMap, HashSet};

use crate::error::{Error, Result};
use crate::expr::{Expr, VarRef};
use crate::network::{
    interaction_digraph, is_acyclic, recursive_wiring, semantically_equal, validate_promise,
    InteractionDigraph, NetworkDef, Wiring,
};

pub mod fvs;

pub use fvs::{exhaustive_fvs, is_feedback_vertex_set, minimum_fvs_indices, FvsSolution};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FvsResult {
    /// Cut nodes in declaration order.
    pub nodes: Vec<String>,
    pub optimal: bool,
}

/// Minimum feedback vertex set over the node vertices of `g`.
pub fn minimum_fvs(g: &InteractionDigraph) -> FvsResult {
    let sol = minimum_fvs_indices(&g.node_successors());
    FvsResult {
        nodes: sol.vertices.iter().map(|&i| g.nodes()[i].clone()).collect(),
        optimal: sol.optimal,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnfoldResult {
    pub module: NetworkDef,
    pub wiring: Wiring,
    /// Cut set T, in declaration order.
    pub cut: Vec<String>,
    /// Cut node to its fresh input label.
    pub fresh: BTreeMap<String, String>,
    /// False when the cut came from the heuristic fallback.
    pub optimal: bool,
}

fn fresh_labels(net: &NetworkDef, cut: &[String]) -> BTreeMap<String, String> {
    let mut taken: HashSet<String> = net.nodes().iter().chain(net.inputs()).cloned().collect();
    let mut out = BTreeMap::new();
    for s in cut {
        let base = format!("alpha_{s}");
        let mut label = base.clone();
        let mut k = 2;
        while taken.contains(&label) {
            label = format!("{base}_{k}");
            k += 1;
        }
        taken.insert(label.clone());
        out.insert(s.clone(), label);
    }
    out
}

/// Unfolds a closed BAN along a minimum feedback vertex set.
pub fn unfold(f: &NetworkDef) -> Result<UnfoldResult> {
    if !f.is_closed() {
        return Err(Error::OpenInputs(f.inputs().to_vec()));
    }
    let violations = validate_promise(f)?;
    if !violations.is_empty() {
        return Err(Error::PromiseViolation(violations));
    }
    let cut = minimum_fvs(&interaction_digraph(f)?);
    unfold_at(f, &cut.nodes).map(|r| UnfoldResult {
        optimal: cut.optimal,
        ..r
    })
}

/// Unfolds `f` along a caller-chosen cut set, which must break every cycle.
pub fn unfold_at(f: &NetworkDef, cut: &[String]) -> Result<UnfoldResult> {
    for s in cut {
        if f.index_of(s).is_none() {
            return Err(Error::UnknownNode(s.clone()));
        }
    }
    let mut cut: Vec<String> = cut.to_vec();
    cut.sort_by_key(|s| f.index_of(s));
    cut.dedup();
    let fresh = fresh_labels(f, &cut);
    let mut inputs = f.inputs().to_vec();
    inputs.extend(cut.iter().map(|s| fresh[s].clone()));
    let nodes = f
        .entries()
        .map(|(id, e)| {
            let e = e.substitute_with(&mut |v| match v {
                VarRef::Node(n) => fresh.get(n).map(Expr::input),
                _ => None,
            });
            (id.clone(), e)
        })
        .collect();
    let module = NetworkDef::new(f.name(), inputs, nodes)?;
    if !is_acyclic(&module)? {
        return Err(Error::Network("cut set leaves a cycle".into()));
    }
    let wiring = cut.iter().map(|s| (fresh[s].clone(), s.clone())).collect();
    Ok(UnfoldResult {
        module,
        wiring,
        cut,
        fresh,
        optimal: true,
    })
}

/// True when the module is acyclic and rewiring it gives back `f`.
pub fn verify_unfolding(f: &NetworkDef, r: &UnfoldResult) -> Result<bool> {
    if !is_acyclic(&r.module)? {
        return Ok(false);
    }
    let rewired = recursive_wiring(&r.module, &r.wiring)?;
    if !rewired.is_closed() {
        return Ok(false);
    }
    semantically_equal(&rewired, f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn fvs_of_examples() {
        let a = minimum_fvs(&interaction_digraph(&fixtures::f_a()).unwrap());
        assert_eq!(a.nodes, names(&["d"]));
        assert!(a.optimal);
        let b = minimum_fvs(&interaction_digraph(&fixtures::f_b()).unwrap());
        assert_eq!(b.nodes, names(&["St", "Sl", "Sk", "Pp", "C", "C*"]));
    }

    #[test]
    fn unfolds_f_a() {
        let f = fixtures::f_a();
        let r = unfold(&f).unwrap();
        assert_eq!(r.cut, names(&["d"]));
        assert_eq!(r.module.inputs(), ["alpha_d"]);
        assert_eq!(r.wiring.get("alpha_d"), Some("d"));
        let expected = fixtures::module(
            "F_A",
            &["alpha_d"],
            &[("a", "alpha_d"), ("b", "a"), ("c", "a"), ("d", "!b | !c")],
        );
        assert_eq!(r.module, expected);
        assert!(verify_unfolding(&f, &r).unwrap());
    }

    #[test]
    fn unfolds_f_b() {
        let f = fixtures::f_b();
        let r = unfold(&f).unwrap();
        assert_eq!(r.module.inputs().len(), 6);
        let expected = fixtures::m_b();
        assert_eq!(r.module.inputs(), expected.inputs());
        assert!(semantically_equal(&r.module, &expected).unwrap());
        assert!(verify_unfolding(&f, &r).unwrap());
    }

    #[test]
    fn emptied_wiring_fails_verification() {
        let f = fixtures::f_a();
        let mut r = unfold(&f).unwrap();
        r.wiring = Wiring::new();
        assert!(!verify_unfolding(&f, &r).unwrap());
    }

    #[test]
    fn acyclic_network_is_left_alone() {
        let f = fixtures::closed("acyc", &[("a", "1"), ("b", "!a"), ("c", "a & b")]);
        let r = unfold(&f).unwrap();
        assert!(r.cut.is_empty());
        assert!(r.wiring.is_empty());
        assert_eq!(r.module, f);
    }

    #[test]
    fn fresh_labels_avoid_collisions() {
        let f = fixtures::closed("x", &[("a", "!a"), ("alpha_a", "a")]);
        let r = unfold(&f).unwrap();
        assert_eq!(r.module.inputs(), ["alpha_a_2"]);
        assert!(verify_unfolding(&f, &r).unwrap());
    }

    #[test]
    fn rejects_promise_violations_and_open_networks() {
        let bad = fixtures::closed("bad", &[("a", "b & !b"), ("b", "a")]);
        assert!(matches!(unfold(&bad), Err(Error::PromiseViolation(_))));
        assert!(matches!(
            unfold(&fixtures::m_a()),
            Err(Error::OpenInputs(_))
        ));
    }
}
