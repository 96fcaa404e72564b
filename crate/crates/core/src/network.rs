//! Networks and modules, interaction digraphs, and recursive wiring.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::expr::{is_ident, Expr, VarRef};
use crate::table::{canonicalize, Sign, TruthTable, DEFAULT_FAN_IN_CAP};

/// A Boolean automata network, or a module when it declares inputs.
///
/// Node order is declaration order and fixes the bit order of
/// configurations. Locals may reference declared nodes and inputs only.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NetworkDef {
    name: String,
    nodes: Vec<String>,
    inputs: Vec<String>,
    locals: Vec<Expr>,
}

impl NetworkDef {
    pub fn new(
        name: impl Into<String>,
        inputs: Vec<String>,
        nodes: Vec<(String, Expr)>,
    ) -> Result<Self> {
        let (nodes, locals): (Vec<String>, Vec<Expr>) = nodes.into_iter().unzip();
        let net = NetworkDef {
            name: name.into(),
            nodes,
            inputs,
            locals,
        };
        net.check()?;
        Ok(net)
    }

    fn check(&self) -> Result<()> {
        let mut seen = HashSet::new();
        for id in self.nodes.iter().chain(&self.inputs) {
            if !is_ident(id) {
                return Err(Error::Network(format!("`{id}` is not a valid identifier")));
            }
            if !seen.insert(id.as_str()) {
                return Err(Error::Network(format!("`{id}` is declared twice")));
            }
        }
        for (id, local) in self.nodes.iter().zip(&self.locals) {
            for v in local.syntactic_vars() {
                let ok = match &v {
                    VarRef::Node(n) => self.nodes.contains(n),
                    VarRef::Input(i) => self.inputs.contains(i),
                    VarRef::Delayed(..) => false,
                };
                if !ok {
                    return Err(Error::Network(format!(
                        "local function of `{id}` references undeclared `{v}`"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn inputs(&self) -> &[String] {
        &self.inputs
    }

    pub fn locals(&self) -> &[Expr] {
        &self.locals
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// A network without inputs is a closed BAN.
    pub fn is_closed(&self) -> bool {
        self.inputs.is_empty()
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n == id)
    }

    pub fn local(&self, id: &str) -> Option<&Expr> {
        self.index_of(id).map(|i| &self.locals[i])
    }

    pub fn entries(&self) -> impl Iterator<Item = (&String, &Expr)> {
        self.nodes.iter().zip(&self.locals)
    }

    /// Replaces one local function; the result is revalidated.
    pub fn with_local(&self, id: &str, local: Expr) -> Result<Self> {
        let i = self
            .index_of(id)
            .ok_or_else(|| Error::UnknownNode(id.to_string()))?;
        let mut out = self.clone();
        out.locals[i] = local;
        out.check()?;
        Ok(out)
    }

    pub fn map_locals(&self, mut f: impl FnMut(&str, &Expr) -> Expr) -> Result<Self> {
        let mut out = self.clone();
        for (id, local) in out.nodes.iter().zip(out.locals.iter_mut()) {
            *local = f(id, local);
        }
        out.check()?;
        Ok(out)
    }

    /// Keeps the nodes accepted by `keep`, in order. Fails if a survivor
    /// still references a dropped node.
    pub fn retain_nodes(&self, mut keep: impl FnMut(&str) -> bool) -> Result<Self> {
        let entries = self
            .entries()
            .filter(|(id, _)| keep(id))
            .map(|(id, e)| (id.clone(), e.clone()))
            .collect();
        NetworkDef::new(self.name.clone(), self.inputs.clone(), entries)
    }

    /// Essential node/input variables of every local, in node order.
    pub(crate) fn essential_deps(&self) -> Result<Vec<Vec<VarRef>>> {
        self.locals
            .iter()
            .map(|e| Ok(TruthTable::from_expr(e, DEFAULT_FAN_IN_CAP)?.essential_vars()))
            .collect()
    }

    /// `preds[t]` lists the node indices that influence node `t`.
    pub(crate) fn node_predecessors(&self) -> Result<Vec<Vec<usize>>> {
        Ok(self
            .essential_deps()?
            .iter()
            .map(|deps| {
                deps.iter()
                    .filter_map(|v| match v {
                        VarRef::Node(n) => self.index_of(n),
                        _ => None,
                    })
                    .collect()
            })
            .collect())
    }
}

/// A partial map from input labels to node ids.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Wiring(BTreeMap<String, String>);

impl Wiring {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, input: impl Into<String>, node: impl Into<String>) -> Option<String> {
        self.0.insert(input.into(), node.into())
    }

    pub fn get(&self, input: &str) -> Option<&str> {
        self.0.get(input).map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.0.iter().map(|(a, b)| (a.as_str(), b.as_str()))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl FromIterator<(String, String)> for Wiring {
    fn from_iter<T: IntoIterator<Item = (String, String)>>(iter: T) -> Self {
        Wiring(iter.into_iter().collect())
    }
}

/// A local function mentioning a variable it does not depend on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub node: String,
    pub variable: String,
}

/// Lists every (node, variable) pair where the variable occurs in the local
/// function without being essential to it.
pub fn validate_promise(net: &NetworkDef) -> Result<Vec<Violation>> {
    let mut out = Vec::new();
    for (id, local) in net.entries() {
        let essential: BTreeSet<VarRef> = canonicalize(local)?.vars().iter().cloned().collect();
        for v in local.syntactic_vars() {
            if !essential.contains(&v) {
                out.push(Violation {
                    node: id.clone(),
                    variable: v.to_string(),
                });
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arc {
    /// A node or input variable.
    pub source: VarRef,
    pub target: String,
    pub sign: Sign,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InteractionDigraph {
    nodes: Vec<String>,
    inputs: Vec<String>,
    arcs: Vec<Arc>,
}

impl InteractionDigraph {
    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn inputs(&self) -> &[String] {
        &self.inputs
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn arc(&self, source: &str, target: &str) -> Option<&Arc> {
        self.arcs
            .iter()
            .find(|a| a.source.label() == source && a.target == target)
    }

    /// Successor lists restricted to node vertices, by node index.
    pub fn node_successors(&self) -> Vec<Vec<usize>> {
        let mut succ = vec![Vec::new(); self.nodes.len()];
        for a in &self.arcs {
            if let VarRef::Node(s) = &a.source {
                let s = self.nodes.iter().position(|n| n == s).unwrap();
                let t = self.nodes.iter().position(|n| *n == a.target).unwrap();
                succ[s].push(t);
            }
        }
        succ
    }

    /// Graphviz rendering: inputs as boxes, arcs labeled with their sign.
    pub fn to_dot(&self, name: &str) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "digraph {} {{", quote(name));
        for n in &self.nodes {
            let _ = writeln!(out, "  {};", quote(n));
        }
        for i in &self.inputs {
            let _ = writeln!(out, "  {} [shape=box];", quote(i));
        }
        for a in &self.arcs {
            let _ = writeln!(
                out,
                "  {} -> {} [label=\"{}\"];",
                quote(a.source.label()),
                quote(&a.target),
                a.sign.symbol()
            );
        }
        out.push_str("}\n");
        out
    }
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Semantic influence digraph with signs probed from each local's truth
/// table. Arcs are listed by target in node order, sources in variable order.
pub fn interaction_digraph(net: &NetworkDef) -> Result<InteractionDigraph> {
    let mut arcs = Vec::new();
    for (id, local) in net.entries() {
        let t = TruthTable::from_expr(local, DEFAULT_FAN_IN_CAP)?;
        for (i, v) in t.vars().iter().enumerate() {
            if let Some(sign) = t.sign_of(i) {
                arcs.push(Arc {
                    source: v.clone(),
                    target: id.clone(),
                    sign,
                });
            }
        }
    }
    Ok(InteractionDigraph {
        nodes: net.nodes().to_vec(),
        inputs: net.inputs().to_vec(),
        arcs,
    })
}

/// Node indices in an order where every influencer precedes the nodes it
/// influences. Fails on a cycle, naming one node on it.
pub fn topological_order(net: &NetworkDef) -> Result<Vec<usize>> {
    let preds = net.node_predecessors()?;
    let n = net.len();
    let mut indegree: Vec<usize> = preds.iter().map(Vec::len).collect();
    let mut succ = vec![Vec::new(); n];
    for (t, ps) in preds.iter().enumerate() {
        for &s in ps {
            succ[s].push(t);
        }
    }
    let mut ready: Vec<usize> = (0..n).filter(|&i| indegree[i] == 0).rev().collect();
    let mut order = Vec::with_capacity(n);
    while let Some(v) = ready.pop() {
        order.push(v);
        for &t in succ[v].iter().rev() {
            indegree[t] -= 1;
            if indegree[t] == 0 {
                ready.push(t);
            }
        }
    }
    if order.len() < n {
        let stuck = (0..n).find(|&i| indegree[i] > 0).unwrap();
        return Err(Error::CyclicModule(net.nodes()[stuck].clone()));
    }
    Ok(order)
}

pub fn is_acyclic(net: &NetworkDef) -> Result<bool> {
    match topological_order(net) {
        Ok(_) => Ok(true),
        Err(Error::CyclicModule(_)) => Ok(false),
        Err(e) => Err(e),
    }
}

/// Closes the wired inputs: every `Input(a)` with `a` in the wiring becomes
/// `Node(w(a))`. Node set and order are unchanged.
pub fn recursive_wiring(m: &NetworkDef, w: &Wiring) -> Result<NetworkDef> {
    for (input, node) in w.iter() {
        if !m.inputs().iter().any(|i| i == input) {
            return Err(Error::Network(format!(
                "wiring uses undeclared input `{input}`"
            )));
        }
        if m.index_of(node).is_none() {
            return Err(Error::Network(format!(
                "wiring targets undeclared node `{node}`"
            )));
        }
    }
    let inputs = m
        .inputs()
        .iter()
        .filter(|i| w.get(i).is_none())
        .cloned()
        .collect();
    let nodes = m
        .entries()
        .map(|(id, e)| {
            let e = e.substitute_with(&mut |v| match v {
                VarRef::Input(i) => w.get(i).map(Expr::node),
                _ => None,
            });
            (id.clone(), e)
        })
        .collect();
    NetworkDef::new(m.name(), inputs, nodes)
}

/// Node-by-node equivalence of local functions. Both networks must declare
/// the same node and input sets.
pub fn semantically_equal(f: &NetworkDef, g: &NetworkDef) -> Result<bool> {
    let set = |v: &[String]| v.iter().cloned().collect::<BTreeSet<_>>();
    if set(f.nodes()) != set(g.nodes()) || set(f.inputs()) != set(g.inputs()) {
        return Err(Error::Network(format!(
            "`{}` and `{}` have different signatures",
            f.name(),
            g.name()
        )));
    }
    for (id, e) in f.entries() {
        let other = g.local(id).expect("same node set");
        if canonicalize(e)? != canonicalize(other)? {
            return Ok(false);
        }
    }
    Ok(true)
}
