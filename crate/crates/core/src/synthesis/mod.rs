//! Shrinking acyclic modules while keeping chosen output functions.
//!
//! The greedy synthesizer applies four rewrite rules, one firing at a time,
//! always retrying from the first rule after a firing:
//!
//! 1. `merge`: two nodes with the same output function become one.
//! 2. `delay-shift`: a node whose output is another node's output delayed by
//!    one update becomes a copy of that node.
//! 3. `simplify`: a local function is replaced by a smaller equivalent one.
//! 4. `dead-elim`: nodes that influence no protected node are dropped.
//!
//! Each rule keeps the output function of every surviving node, so the
//! protected outputs are preserved after every single firing.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::expr::{Expr, VarRef};
use crate::network::{is_acyclic, NetworkDef};
use crate::outputs::{all_output_functions, output_functions, OutputFunction};
use crate::table::simplify;

mod exact;

pub use exact::{exact_synthesize, local_function_counts, ExactBounds};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SynthesisInstance {
    pub inputs: Vec<String>,
    pub outputs: BTreeMap<String, OutputFunction>,
    /// Advisory node budget.
    pub budget: Option<usize>,
}

impl SynthesisInstance {
    pub fn new(inputs: Vec<String>, outputs: BTreeMap<String, OutputFunction>) -> Self {
        SynthesisInstance {
            inputs,
            outputs,
            budget: None,
        }
    }

    pub fn with_budget(mut self, k: usize) -> Self {
        self.budget = Some(k);
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    Merge,
    DelayShift,
    Simplify,
    DeadElim,
}

impl Rule {
    /// Order in which the rules are tried.
    pub const ORDER: [Rule; 4] = [
        Rule::Merge,
        Rule::DelayShift,
        Rule::Simplify,
        Rule::DeadElim,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Rule::Merge => "merge",
            Rule::DelayShift => "delay-shift",
            Rule::Simplify => "simplify",
            Rule::DeadElim => "dead-elim",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One applied rule. `nodes` is `[survivor, removed]` for a merge,
/// `[rewired, source]` for a delay shift, `[node]` for a simplification and
/// the removed nodes for dead-node elimination.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rewrite {
    pub rule: Rule,
    pub nodes: Vec<String>,
}

impl fmt::Display for Rewrite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.rule {
            Rule::Merge => write!(f, "merge {} into {}", self.nodes[1], self.nodes[0]),
            Rule::DelayShift => write!(f, "delay-shift {} := {}", self.nodes[0], self.nodes[1]),
            Rule::Simplify => write!(f, "simplify {}", self.nodes[0]),
            Rule::DeadElim => write!(f, "dead-elim {}", self.nodes.join(", ")),
        }
    }
}

/// A module right after one rule firing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Firing {
    pub rewrite: Rewrite,
    pub module: NetworkDef,
    /// Output name to realizing node, updated for merges.
    pub realization: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SynthesisResult {
    pub module: NetworkDef,
    pub realization: BTreeMap<String, String>,
    pub log: Vec<Rewrite>,
    /// False when a budget was given and the module exceeds it.
    pub within_budget: bool,
}

/// `reach[u][v]`: node `v` can be reached from node `u` through the
/// syntactic dependencies of the locals.
fn reachability(m: &NetworkDef) -> Vec<Vec<bool>> {
    let n = m.len();
    let mut succ = vec![Vec::new(); n];
    for (t, local) in m.locals().iter().enumerate() {
        for v in local.syntactic_vars() {
            if let VarRef::Node(s) = v {
                succ[m.index_of(&s).unwrap()].push(t);
            }
        }
    }
    (0..n)
        .map(|u| {
            let mut seen = vec![false; n];
            let mut stack = succ[u].clone();
            while let Some(v) = stack.pop() {
                if !seen[v] {
                    seen[v] = true;
                    stack.extend(&succ[v]);
                }
            }
            seen
        })
        .collect()
}

fn protected(realization: &BTreeMap<String, String>) -> BTreeSet<&str> {
    realization.values().map(String::as_str).collect()
}

fn arc_count(e: &Expr) -> usize {
    e.syntactic_vars().len()
}

fn try_merge(m: &NetworkDef, realization: &BTreeMap<String, String>) -> Result<Option<Firing>> {
    let outs = all_output_functions(m)?;
    let keep_set = protected(realization);
    let reach = reachability(m);
    let n = m.len();
    for i in 0..n {
        for j in i + 1..n {
            if !outs[i].equivalent(&outs[j]) {
                continue;
            }
            let (mut keep, mut drop) = if keep_set.contains(m.nodes()[j].as_str())
                && !keep_set.contains(m.nodes()[i].as_str())
            {
                (j, i)
            } else {
                (i, j)
            };
            // The survivor must not depend on the node it replaces.
            if reach[drop][keep] {
                std::mem::swap(&mut keep, &mut drop);
            }
            if reach[drop][keep] {
                continue;
            }
            let (k, d) = (m.nodes()[keep].clone(), m.nodes()[drop].clone());
            let entries = m
                .entries()
                .filter(|(id, _)| **id != d)
                .map(|(id, e)| {
                    let e = e.substitute_with(&mut |v| match v {
                        VarRef::Node(x) if *x == d => Some(Expr::node(k.clone())),
                        _ => None,
                    });
                    (id.clone(), e)
                })
                .collect();
            let module = NetworkDef::new(m.name(), m.inputs().to_vec(), entries)?;
            let realization = realization
                .iter()
                .map(|(o, s)| (o.clone(), if *s == d { k.clone() } else { s.clone() }))
                .collect();
            return Ok(Some(Firing {
                rewrite: Rewrite {
                    rule: Rule::Merge,
                    nodes: vec![k, d],
                },
                module,
                realization,
            }));
        }
    }
    Ok(None)
}

fn try_delay_shift(
    m: &NetworkDef,
    realization: &BTreeMap<String, String>,
) -> Result<Option<Firing>> {
    let outs = all_output_functions(m)?;
    let shifted = outs
        .iter()
        .map(|o| o.table.shifted(1))
        .collect::<Result<Vec<_>>>()?;
    let reach = reachability(m);
    for u in 0..m.len() {
        if outs[u].table.constant_value().is_some() {
            continue;
        }
        for v in 0..m.len() {
            let target = Expr::node(m.nodes()[v].clone());
            if u == v || reach[u][v] || m.locals()[u] == target || outs[u].table != shifted[v] {
                continue;
            }
            let module = m.with_local(&m.nodes()[u], target)?;
            return Ok(Some(Firing {
                rewrite: Rewrite {
                    rule: Rule::DelayShift,
                    nodes: vec![m.nodes()[u].clone(), m.nodes()[v].clone()],
                },
                module,
                realization: realization.clone(),
            }));
        }
    }
    Ok(None)
}

fn try_simplify(m: &NetworkDef, realization: &BTreeMap<String, String>) -> Result<Option<Firing>> {
    for (id, local) in m.entries() {
        let s = simplify(local)?;
        let (before, after) = (arc_count(local), arc_count(&s));
        if after < before || (after == before && s.size() < local.size()) {
            return Ok(Some(Firing {
                rewrite: Rewrite {
                    rule: Rule::Simplify,
                    nodes: vec![id.clone()],
                },
                module: m.with_local(id, s)?,
                realization: realization.clone(),
            }));
        }
    }
    Ok(None)
}

fn try_dead_elim(m: &NetworkDef, realization: &BTreeMap<String, String>) -> Result<Option<Firing>> {
    let keep_set = protected(realization);
    let reach = reachability(m);
    let live: Vec<bool> = (0..m.len())
        .map(|u| {
            keep_set.contains(m.nodes()[u].as_str())
                || (0..m.len()).any(|v| reach[u][v] && keep_set.contains(m.nodes()[v].as_str()))
        })
        .collect();
    if live.iter().all(|&l| l) {
        return Ok(None);
    }
    let dead: Vec<String> = (0..m.len())
        .filter(|&u| !live[u])
        .map(|u| m.nodes()[u].clone())
        .collect();
    let module = m.retain_nodes(|id| live[m.index_of(id).unwrap()])?;
    Ok(Some(Firing {
        rewrite: Rewrite {
            rule: Rule::DeadElim,
            nodes: dead,
        },
        module,
        realization: realization.clone(),
    }))
}

/// Applies one firing of `rule`, if it has any.
pub fn fire(
    rule: Rule,
    m: &NetworkDef,
    realization: &BTreeMap<String, String>,
) -> Result<Option<Firing>> {
    match rule {
        Rule::Merge => try_merge(m, realization),
        Rule::DelayShift => try_delay_shift(m, realization),
        Rule::Simplify => try_simplify(m, realization),
        Rule::DeadElim => try_dead_elim(m, realization),
    }
}

fn identity<S: AsRef<str>>(x: &[S]) -> BTreeMap<String, String> {
    x.iter()
        .map(|s| (s.as_ref().to_string(), s.as_ref().to_string()))
        .collect()
}

fn exhaust<S: AsRef<str>>(rule: Rule, m: &NetworkDef, x: &[S]) -> Result<NetworkDef> {
    if !is_acyclic(m)? {
        return Err(Error::CyclicModule(m.name().to_string()));
    }
    let mut realization = identity(x);
    let mut m = m.clone();
    while let Some(f) = fire(rule, &m, &realization)? {
        m = f.module;
        realization = f.realization;
    }
    Ok(m)
}

/// Merges nodes with equal output functions until none are left.
pub fn merge_equivalent_nodes<S: AsRef<str>>(m: &NetworkDef, x: &[S]) -> Result<NetworkDef> {
    exhaust(Rule::Merge, m, x)
}

/// Turns every node whose output is another node's output one update later
/// into a copy of that node.
pub fn delay_shift_rewrite<S: AsRef<str>>(m: &NetworkDef, x: &[S]) -> Result<NetworkDef> {
    exhaust(Rule::DelayShift, m, x)
}

/// Replaces every local by its simplified form.
pub fn simplify_locals(m: &NetworkDef) -> Result<NetworkDef> {
    let entries = m
        .entries()
        .map(|(id, e)| Ok((id.clone(), simplify(e)?)))
        .collect::<Result<_>>()?;
    NetworkDef::new(m.name(), m.inputs().to_vec(), entries)
}

/// Drops every node outside `x` that influences no node of `x`.
pub fn eliminate_dead<S: AsRef<str>>(m: &NetworkDef, x: &[S]) -> Result<NetworkDef> {
    exhaust(Rule::DeadElim, m, x)
}

pub fn synthesize(
    inst: &SynthesisInstance,
    seed: &NetworkDef,
    realization: &BTreeMap<String, String>,
) -> Result<SynthesisResult> {
    synthesize_with(inst, seed, realization, |_| {})
}

/// Greedy synthesis from a seed module whose node `realization[o]` already
/// realizes output `o`. `observe` sees the module after every firing.
pub fn synthesize_with(
    inst: &SynthesisInstance,
    seed: &NetworkDef,
    realization: &BTreeMap<String, String>,
    mut observe: impl FnMut(&Firing),
) -> Result<SynthesisResult> {
    let as_set = |v: &[String]| v.iter().cloned().collect::<BTreeSet<_>>();
    if as_set(seed.inputs()) != as_set(&inst.inputs) {
        return Err(Error::Network(
            "seed module and instance declare different inputs".into(),
        ));
    }
    if !is_acyclic(seed)? {
        return Err(Error::CyclicModule(seed.name().to_string()));
    }
    for (name, want) in &inst.outputs {
        let node = realization
            .get(name)
            .ok_or_else(|| Error::SeedMismatch(name.clone()))?;
        let got = output_functions(seed, &[node])?;
        if !got[node].equivalent(want) {
            return Err(Error::SeedMismatch(name.clone()));
        }
    }
    let mut m = seed.clone();
    let mut real: BTreeMap<String, String> = inst
        .outputs
        .keys()
        .map(|o| (o.clone(), realization[o].clone()))
        .collect();
    let mut log = Vec::new();
    'fixpoint: loop {
        for rule in Rule::ORDER {
            if let Some(f) = fire(rule, &m, &real)? {
                observe(&f);
                log.push(f.rewrite.clone());
                m = f.module;
                real = f.realization;
                continue 'fixpoint;
            }
        }
        break;
    }
    let result = SynthesisResult {
        within_budget: inst.budget.is_none_or(|k| m.len() <= k),
        module: m,
        realization: real,
        log,
    };
    if !verify_synthesis(&result, inst) {
        return Err(Error::HypothesisFailed(
            "synthesized module lost a requested output function".into(),
        ));
    }
    Ok(result)
}

/// Recomputes the output functions of the result and compares them with the
/// requested ones, delays included.
pub fn verify_synthesis(result: &SynthesisResult, inst: &SynthesisInstance) -> bool {
    if !matches!(is_acyclic(&result.module), Ok(true)) {
        return false;
    }
    inst.outputs.iter().all(|(name, want)| {
        let Some(node) = result.realization.get(name) else {
            return false;
        };
        match output_functions(&result.module, &[node]) {
            Ok(got) => got[node].equivalent(want),
            Err(_) => false,
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::network::semantically_equal;
    use crate::outputs::output_circuit;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn instance(m: &NetworkDef, x: &[&str]) -> SynthesisInstance {
        SynthesisInstance::new(m.inputs().to_vec(), output_functions(m, x).unwrap())
    }

    #[test]
    fn merge_on_m_a() {
        let m = merge_equivalent_nodes(&fixtures::m_a(), &["d"]).unwrap();
        assert_eq!(m.nodes(), names(&["a", "b", "d"]));
        assert_eq!(m.local("d").unwrap().to_string(), "!b | !b");
    }

    #[test]
    fn merge_on_m_b_drops_s9() {
        let m =
            merge_equivalent_nodes(&fixtures::m_b(), &["St", "Sl", "Sk", "Pp", "C", "C*"]).unwrap();
        assert!(m.index_of("S9").is_none());
        assert!(m.index_of("Ru").is_some());
        let unchanged = merge_equivalent_nodes(&fixtures::m_b_prime(), &["C"]).unwrap();
        assert_eq!(unchanged, fixtures::m_b_prime());
    }

    #[test]
    fn merge_keeps_protected_names() {
        let m = fixtures::module("m", &["a"], &[("u", "a"), ("v", "a"), ("w", "u & v")]);
        let merged = merge_equivalent_nodes(&m, &["v", "w"]).unwrap();
        assert_eq!(merged.nodes(), names(&["v", "w"]));
    }

    #[test]
    fn delay_shift_on_m_b() {
        let x = ["St", "Sl", "Sk", "Pp", "C", "C*"];
        let m = delay_shift_rewrite(&fixtures::m_b(), &x).unwrap();
        assert_eq!(m.local("C*"), Some(&Expr::node("C25")));
        let chain = fixtures::module("c", &["a"], &[("p", "a"), ("q", "p")]);
        assert_eq!(delay_shift_rewrite(&chain, &["q"]).unwrap(), chain);
    }

    #[test]
    fn simplify_examples() {
        let m = fixtures::module(
            "s",
            &["alpha_Sl"],
            &[("Ru", "1"), ("C", "!Ru | !Ru | !alpha_Sl")],
        );
        let s = simplify_locals(&m).unwrap();
        assert_eq!(s.local("C").unwrap().to_string(), "!Ru | !alpha_Sl");
        assert_eq!(simplify_locals(&s).unwrap(), s);
    }

    #[test]
    fn dead_elimination() {
        let m = fixtures::module("d", &["a"], &[("p", "a"), ("q", "!a"), ("r", "p")]);
        assert_eq!(
            eliminate_dead(&m, &["r"]).unwrap().nodes(),
            names(&["p", "r"])
        );
        assert_eq!(eliminate_dead(&m, &["q", "r"]).unwrap(), m);
        assert!(eliminate_dead::<&str>(&m, &[]).unwrap().is_empty());
    }

    #[test]
    fn greedy_reproduces_m_a_prime() {
        let m = fixtures::m_a();
        let inst = instance(&m, &["d"]).with_budget(3);
        let r = synthesize(&inst, &m, &identity(&["d"])).unwrap();
        assert!(r.within_budget);
        assert!(semantically_equal(&r.module, &fixtures::m_a_prime()).unwrap());
        assert_eq!(r.module.nodes(), fixtures::m_a_prime().nodes());
        let log: Vec<String> = r.log.iter().map(ToString::to_string).collect();
        assert_eq!(log, ["merge c into b", "simplify d"]);
        assert!(verify_synthesis(&r, &inst));
    }

    #[test]
    fn greedy_reproduces_m_b_prime() {
        let m = fixtures::m_b();
        let x = ["St", "Sl", "Sk", "Pp", "C", "C*"];
        let inst = instance(&m, &x).with_budget(8);
        let r = synthesize(&inst, &m, &identity(&x)).unwrap();
        assert_eq!(r.module.len(), 8);
        assert_eq!(r.module.nodes(), fixtures::m_b_prime().nodes());
        assert!(semantically_equal(&r.module, &fixtures::m_b_prime()).unwrap());
        assert!(r.within_budget);
        assert!(verify_synthesis(&r, &inst));
    }

    #[test]
    fn flipped_local_fails_verification() {
        let m = fixtures::m_a();
        let inst = instance(&m, &["d"]);
        let mut r = synthesize(&inst, &m, &identity(&["d"])).unwrap();
        r.module = r.module.with_local("d", Expr::node("b")).unwrap();
        assert!(!verify_synthesis(&r, &inst));
    }

    #[test]
    fn constant_output_needs_one_node() {
        let m = fixtures::module("k", &["a"], &[("p", "a"), ("k", "1")]);
        let inst = instance(&m, &["k"]).with_budget(1);
        let r = synthesize(&inst, &m, &identity(&["k"])).unwrap();
        assert_eq!(r.module.len(), 1);
        assert_eq!(r.module.local("k"), Some(&Expr::Const(true)));
        assert_eq!(output_circuit(&r.module, "k").unwrap().delay, 0);
    }

    #[test]
    fn seed_must_realize_the_outputs() {
        let m = fixtures::m_a();
        let inst = instance(&m, &["d"]);
        let wrong: BTreeMap<_, _> = [("d".to_string(), "a".to_string())].into();
        assert!(matches!(
            synthesize(&inst, &m, &wrong),
            Err(Error::SeedMismatch(_))
        ));
    }

    #[test]
    fn budget_is_advisory() {
        let m = fixtures::m_a();
        let inst = instance(&m, &["d"]).with_budget(2);
        let r = synthesize(&inst, &m, &identity(&["d"])).unwrap();
        assert!(!r.within_budget);
        assert_eq!(r.module.len(), 3);
    }
}
