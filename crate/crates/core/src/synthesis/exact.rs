//! Exhaustive minimum synthesis for very small instances.
//!
//! Nodes are placed one at a time in topological order; each picks a parent
//! set among the inputs and earlier nodes and a local function that depends
//! on every parent. Smaller modules are tried first, and among modules of
//! the same size the one with the fewest arcs wins.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::expr::VarRef;
use crate::network::NetworkDef;
use crate::table::{TruthTable, DEFAULT_FAN_IN_CAP};

use super::{SynthesisInstance, SynthesisResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExactBounds {
    pub max_nodes: usize,
    pub max_fanin: usize,
}

impl Default for ExactBounds {
    fn default() -> Self {
        ExactBounds {
            max_nodes: 4,
            max_fanin: 3,
        }
    }
}

const MAX_NODES: usize = 4;
const MAX_FANIN: usize = 3;
const MAX_INPUTS: usize = 3;
const MAX_DELAY: u32 = 3;

/// Truth tables (as row bitmasks) of the functions of `arity` variables
/// that depend on all of them.
fn all_essential(arity: usize) -> Vec<u8> {
    let rows = 1usize << arity;
    let count = 1u32 << rows;
    (0..count)
        .map(|f| f as u8)
        .filter(|&f| {
            (0..arity).all(|i| (0..rows).any(|r| (f >> r & 1) != (f >> (r ^ (1 << i)) & 1)))
        })
        .collect()
}

/// Number of all-essential local functions for 0, 1, 2 and 3 parents.
pub fn local_function_counts() -> [usize; 4] {
    [0, 1, 2, 3].map(|a| all_essential(a).len())
}

#[derive(Clone)]
struct Placed {
    parents: Vec<VarRef>,
    function: u8,
    out: TruthTable,
}

struct Search<'a> {
    inputs: &'a [String],
    targets: Vec<TruthTable>,
    target_delays: Vec<u32>,
    functions: Vec<Vec<u8>>,
    max_fanin: usize,
    best: Option<(usize, Vec<Placed>)>,
}

fn node_name(i: usize) -> String {
    format!("n{i}")
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    go(0, n, k, &mut cur, &mut out);
    out
}

impl Search<'_> {
    fn unrealized(&self, placed: &[Placed]) -> Vec<usize> {
        (0..self.targets.len())
            .filter(|&t| !placed.iter().any(|p| p.out == self.targets[t]))
            .collect()
    }

    fn dfs(&mut self, placed: &mut Vec<Placed>, k: usize, arcs: usize) -> Result<()> {
        if self.best.as_ref().is_some_and(|(b, _)| arcs >= *b) {
            return Ok(());
        }
        let missing = self.unrealized(placed);
        if placed.len() == k {
            if missing.is_empty() {
                self.best = Some((arcs, placed.clone()));
            }
            return Ok(());
        }
        let remaining = k - placed.len();
        if missing.len() > remaining {
            return Ok(());
        }
        // A new node is at most one update deeper than its deepest parent.
        let deepest = placed.iter().map(|p| p.out.max_delay()).max().unwrap_or(0);
        if missing
            .iter()
            .any(|&t| self.target_delays[t] as usize > deepest as usize + remaining)
        {
            return Ok(());
        }
        let must_realize = missing.len() == remaining;

        let mut sources: Vec<(VarRef, TruthTable)> = placed
            .iter()
            .enumerate()
            .map(|(i, p)| Ok((VarRef::node(node_name(i)), p.out.shifted(1)?)))
            .collect::<Result<_>>()?;
        for a in self.inputs {
            sources.push((
                VarRef::input(a.clone()),
                TruthTable::from_fn(vec![VarRef::delayed(a.clone(), 1)], |r| r == 1),
            ));
        }
        for size in 0..=self.max_fanin.min(sources.len()) {
            for combo in combinations(sources.len(), size) {
                // Sources are already in variable order: nodes, then inputs.
                let parents: Vec<VarRef> = combo.iter().map(|&i| sources[i].0.clone()).collect();
                let args: Vec<&TruthTable> = combo.iter().map(|&i| &sources[i].1).collect();
                for fi in 0..self.functions[size].len() {
                    let function = self.functions[size][fi];
                    let local = TruthTable::from_fn(parents.clone(), |r| function >> r & 1 == 1);
                    let out = TruthTable::compose(&local, &args, DEFAULT_FAN_IN_CAP)?;
                    if placed.iter().any(|p| p.out == out) {
                        continue;
                    }
                    if must_realize && !missing.iter().any(|&t| self.targets[t] == out) {
                        continue;
                    }
                    placed.push(Placed {
                        parents: parents.clone(),
                        function,
                        out,
                    });
                    self.dfs(placed, k, arcs + size)?;
                    placed.pop();
                }
            }
        }
        Ok(())
    }
}

fn check_bounds(inst: &SynthesisInstance, bounds: ExactBounds) -> Result<()> {
    if bounds.max_nodes > MAX_NODES || bounds.max_fanin > MAX_FANIN {
        return Err(Error::Bounds(format!(
            "at most {MAX_NODES} nodes and fan-in {MAX_FANIN}"
        )));
    }
    if inst.inputs.len() > MAX_INPUTS {
        return Err(Error::Bounds(format!("at most {MAX_INPUTS} inputs")));
    }
    for (name, o) in &inst.outputs {
        if o.delay > MAX_DELAY {
            return Err(Error::Bounds(format!(
                "output `{name}` has delay {}, at most {MAX_DELAY} supported",
                o.delay
            )));
        }
        for v in o.table.vars() {
            if !inst.inputs.iter().any(|i| i == v.label()) {
                return Err(Error::Bounds(format!(
                    "output `{name}` reads undeclared input `{}`",
                    v.label()
                )));
            }
        }
    }
    Ok(())
}

/// Smallest module realizing every output of `inst`, or `None` when no
/// module within `bounds` does.
pub fn exact_synthesize(
    inst: &SynthesisInstance,
    bounds: ExactBounds,
) -> Result<Option<SynthesisResult>> {
    check_bounds(inst, bounds)?;
    let mut targets: Vec<TruthTable> = Vec::new();
    for o in inst.outputs.values() {
        if !targets.contains(&o.table) {
            targets.push(o.table.clone());
        }
    }
    let mut inputs = inst.inputs.clone();
    inputs.sort();
    let mut search = Search {
        inputs: &inputs,
        target_delays: targets.iter().map(TruthTable::max_delay).collect(),
        targets,
        functions: (0..=bounds.max_fanin).map(all_essential).collect(),
        max_fanin: bounds.max_fanin,
        best: None,
    };
    for k in 0..=bounds.max_nodes {
        search.dfs(&mut Vec::new(), k, 0)?;
        if let Some((_, placed)) = search.best.take() {
            return build(inst, &placed).map(Some);
        }
    }
    Ok(None)
}

fn build(inst: &SynthesisInstance, placed: &[Placed]) -> Result<SynthesisResult> {
    let entries = placed
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let f = p.function;
            let local = TruthTable::from_fn(p.parents.clone(), |r| f >> r & 1 == 1);
            (node_name(i), local.to_expr())
        })
        .collect();
    let module = NetworkDef::new("exact", inst.inputs.clone(), entries)?;
    let realization: BTreeMap<String, String> = inst
        .outputs
        .iter()
        .map(|(name, o)| {
            let i = placed
                .iter()
                .position(|p| p.out == o.table)
                .expect("realized");
            (name.clone(), node_name(i))
        })
        .collect();
    Ok(SynthesisResult {
        within_budget: inst.budget.is_none_or(|k| placed.len() <= k),
        module,
        realization,
        log: Vec::new(),
    })
}
