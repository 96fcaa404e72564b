//! Exhaustive parallel-update dynamics and attractors.
//!
//! Configurations are packed into integers with the first declared node as
//! the least significant bit; bitstrings are printed in node order.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::expr::VarRef;
use crate::network::NetworkDef;
use crate::table::{TruthTable, DEFAULT_FAN_IN_CAP};

/// Largest node count for which the full successor array is built.
pub const DEFAULT_MAX_N: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Configuration {
    bits: u64,
    width: usize,
}

impl Configuration {
    pub fn new(bits: u64, width: usize) -> Self {
        assert!(width <= 64);
        let mask = if width == 64 { !0 } else { (1u64 << width) - 1 };
        Configuration {
            bits: bits & mask,
            width,
        }
    }

    pub fn zeros(width: usize) -> Self {
        Configuration::new(0, width)
    }

    /// Parses a 0/1 string in node order.
    pub fn parse(s: &str) -> Option<Self> {
        let mut bits = 0;
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => bits |= 1 << i,
                _ => return None,
            }
        }
        (s.len() <= 64).then(|| Configuration::new(bits, s.len()))
    }

    pub fn index(&self) -> u64 {
        self.bits
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn get(&self, i: usize) -> bool {
        (self.bits >> i) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        if value {
            self.bits |= 1 << i;
        } else {
            self.bits &= !(1 << i);
        }
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.width {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

pub fn bitstring(index: u64, width: usize) -> String {
    Configuration::new(index, width).to_string()
}

#[derive(Clone, Copy)]
enum Source {
    Node(usize),
    Input(usize),
}

struct CompiledLocal {
    sources: Vec<Source>,
    table: TruthTable,
}

/// Locals turned into lookup tables over their essential variables.
struct Compiled {
    locals: Vec<CompiledLocal>,
}

impl Compiled {
    fn new(net: &NetworkDef) -> Result<Self> {
        let locals = net
            .locals()
            .iter()
            .map(|e| {
                let table = TruthTable::from_expr(e, DEFAULT_FAN_IN_CAP)?.canonical();
                let sources = table
                    .vars()
                    .iter()
                    .map(|v| match v {
                        VarRef::Node(n) => Source::Node(net.index_of(n).unwrap()),
                        VarRef::Input(i) => {
                            Source::Input(net.inputs().iter().position(|x| x == i).unwrap())
                        }
                        VarRef::Delayed(..) => unreachable!("networks hold no delayed variables"),
                    })
                    .collect();
                Ok(CompiledLocal { sources, table })
            })
            .collect::<Result<_>>()?;
        Ok(Compiled { locals })
    }

    fn step(&self, x: u64, inputs: u64) -> u64 {
        let mut y = 0;
        for (s, local) in self.locals.iter().enumerate() {
            let mut row = 0;
            for (k, src) in local.sources.iter().enumerate() {
                let bit = match *src {
                    Source::Node(i) => (x >> i) & 1,
                    Source::Input(i) => (inputs >> i) & 1,
                };
                row |= (bit as usize) << k;
            }
            if local.table.get(row) {
                y |= 1 << s;
            }
        }
        y
    }
}

fn require_closed(net: &NetworkDef) -> Result<()> {
    if net.is_closed() {
        Ok(())
    } else {
        Err(Error::OpenInputs(net.inputs().to_vec()))
    }
}

fn require_width(net: &NetworkDef, x: &Configuration) -> Result<()> {
    if x.width() == net.len() {
        Ok(())
    } else {
        Err(Error::Network(format!(
            "configuration has {} bits, network has {} nodes",
            x.width(),
            net.len()
        )))
    }
}

/// One synchronous update of a closed network.
pub fn step(net: &NetworkDef, x: &Configuration) -> Result<Configuration> {
    require_closed(net)?;
    require_width(net, x)?;
    let c = Compiled::new(net)?;
    Ok(Configuration::new(c.step(x.index(), 0), net.len()))
}

/// The successor function on all `2^n` configurations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DynamicsGraph {
    n: usize,
    successor: Vec<u32>,
}

impl DynamicsGraph {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn successor(&self) -> &[u32] {
        &self.successor
    }

    pub fn next(&self, x: u64) -> u64 {
        u64::from(self.successor[x as usize])
    }

    /// All cycles of the functional graph, rotation-normalized and sorted by
    /// (length, smallest configuration).
    pub fn attractors(&self) -> Vec<Attractor> {
        const UNVISITED: u8 = 0;
        const ON_PATH: u8 = 1;
        const DONE: u8 = 2;
        let size = self.successor.len();
        let mut color = vec![UNVISITED; size];
        let mut path = Vec::new();
        let mut out = Vec::new();
        for start in 0..size {
            if color[start] != UNVISITED {
                continue;
            }
            path.clear();
            let mut x = start;
            while color[x] == UNVISITED {
                color[x] = ON_PATH;
                path.push(x);
                x = self.successor[x] as usize;
            }
            if color[x] == ON_PATH {
                let mut cycle = vec![x as u64];
                let mut y = self.successor[x] as usize;
                while y != x {
                    cycle.push(y as u64);
                    y = self.successor[y] as usize;
                }
                out.push(Attractor::normalized(cycle));
            }
            for &p in &path {
                color[p] = DONE;
            }
        }
        out.sort_by_key(|a| (a.len(), a.states[0]));
        out
    }
}

pub fn full_dynamics(net: &NetworkDef, max_n: usize) -> Result<DynamicsGraph> {
    require_closed(net)?;
    let n = net.len();
    if n > max_n || n > 32 {
        return Err(Error::StateSpaceCap {
            n,
            cap: max_n.min(32),
        });
    }
    let c = Compiled::new(net)?;
    let mut successor = vec![0u32; 1usize << n];
    const CHUNK: usize = 1 << 12;
    successor
        .par_chunks_mut(CHUNK)
        .enumerate()
        .for_each(|(k, chunk)| {
            let base = k * CHUNK;
            for (off, slot) in chunk.iter_mut().enumerate() {
                *slot = c.step((base + off) as u64, 0) as u32;
            }
        });
    Ok(DynamicsGraph { n, successor })
}

/// A cycle of the dynamics, starting at its numerically smallest
/// configuration index.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Attractor {
    states: Vec<u64>,
}

impl Attractor {
    fn normalized(mut cycle: Vec<u64>) -> Self {
        let start = (0..cycle.len()).min_by_key(|&i| cycle[i]).unwrap();
        cycle.rotate_left(start);
        Attractor { states: cycle }
    }

    pub fn states(&self) -> &[u64] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn is_fixed_point(&self) -> bool {
        self.states.len() == 1
    }

    pub fn bitstrings(&self, width: usize) -> Vec<String> {
        self.states.iter().map(|&s| bitstring(s, width)).collect()
    }
}

pub fn attractors(net: &NetworkDef, max_n: usize) -> Result<Vec<Attractor>> {
    Ok(full_dynamics(net, max_n)?.attractors())
}

/// Input values per label, one entry per update step (step 1 first).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct InputSequence {
    columns: BTreeMap<String, Vec<bool>>,
}

impl InputSequence {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, label: impl Into<String>, values: Vec<bool>) -> Self {
        self.columns.insert(label.into(), values);
        self
    }

    /// `f(label, step)` for steps `1..=k`.
    pub fn from_fn(labels: &[String], k: usize, mut f: impl FnMut(&str, usize) -> bool) -> Self {
        InputSequence {
            columns: labels
                .iter()
                .map(|l| (l.clone(), (1..=k).map(|t| f(l, t)).collect()))
                .collect(),
        }
    }

    pub fn get(&self, label: &str, step: usize) -> Option<bool> {
        self.columns
            .get(label)
            .and_then(|c| c.get(step.checked_sub(1)?))
            .copied()
    }

    /// Common length of every column (0 when empty).
    pub fn len(&self) -> usize {
        self.columns.values().map(Vec::len).max().unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Runs the module `j.len()` steps from `x`, step `t` reading `j(., t)`.
pub fn module_trajectory(
    m: &NetworkDef,
    x: &Configuration,
    j: &InputSequence,
) -> Result<Configuration> {
    require_width(m, x)?;
    if m.inputs().len() > 64 {
        return Err(Error::Network("more than 64 inputs".into()));
    }
    let k = j.len();
    for label in m.inputs() {
        match j.columns.get(label) {
            Some(c) if c.len() == k => {}
            Some(c) => {
                return Err(Error::IncompleteInput(format!(
                    "input `{label}` has {} of {k} steps",
                    c.len()
                )))
            }
            None if k == 0 => {}
            None => {
                return Err(Error::IncompleteInput(format!(
                    "input `{label}` is missing"
                )))
            }
        }
    }
    let c = Compiled::new(m)?;
    let mut state = x.index();
    for t in 1..=k {
        let mut inputs = 0u64;
        for (i, label) in m.inputs().iter().enumerate() {
            if j.get(label, t).unwrap() {
                inputs |= 1 << i;
            }
        }
        state = c.step(state, inputs);
    }
    Ok(Configuration::new(state, m.len()))
}

/// Per-step restriction of an attractor to `nodes` (in the given order).
pub fn attractor_trace(
    net: &NetworkDef,
    a: &Attractor,
    nodes: &[String],
) -> Result<Vec<Vec<bool>>> {
    let idx: Vec<usize> = nodes
        .iter()
        .map(|n| net.index_of(n).ok_or_else(|| Error::UnknownNode(n.clone())))
        .collect::<Result<_>>()?;
    Ok(a.states
        .iter()
        .map(|&s| idx.iter().map(|&i| (s >> i) & 1 == 1).collect())
        .collect())
}

/// True when `b` is a cyclic rotation of `a`: `b` occurs in `a ++ a`.
pub fn equal_up_to_rotation<T: PartialEq>(a: &[T], b: &[T]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    if a.is_empty() {
        return true;
    }
    let doubled: Vec<&T> = a.iter().chain(a.iter()).collect();
    doubled
        .windows(b.len())
        .any(|w| w.iter().zip(b).all(|(x, y)| *x == y))
}

/// Checks for a length-preserving bijection between the attractors of `f`
/// and `g` whose paired cycles agree, up to rotation, on the trace of `t`
/// in `f` and of `h(t)` in `g`.
pub fn isomorphic_attractors(
    f: &NetworkDef,
    g: &NetworkDef,
    t: &[String],
    h: &BTreeMap<String, String>,
    max_n: usize,
) -> Result<bool> {
    check_injective(t, h)?;
    let (fa, ga) = rayon::join(|| attractors(f, max_n), || attractors(g, max_n));
    match_attractors(f, &fa?, g, &ga?, t, h)
}

fn check_injective(t: &[String], h: &BTreeMap<String, String>) -> Result<Vec<String>> {
    let mut images = HashSet::new();
    let mut mapped = Vec::with_capacity(t.len());
    for s in t {
        let image = h
            .get(s)
            .ok_or_else(|| Error::InvalidMapping(format!("h is undefined on `{s}`")))?;
        if !images.insert(image.as_str()) {
            return Err(Error::InvalidMapping(format!(
                "h maps two nodes to `{image}`"
            )));
        }
        mapped.push(image.clone());
    }
    Ok(mapped)
}

/// [`isomorphic_attractors`] on attractor sets that are already known.
pub fn match_attractors(
    f: &NetworkDef,
    fa: &[Attractor],
    g: &NetworkDef,
    ga: &[Attractor],
    t: &[String],
    h: &BTreeMap<String, String>,
) -> Result<bool> {
    let mapped = check_injective(t, h)?;
    if fa.len() != ga.len() {
        return Ok(false);
    }
    let ft: Vec<_> = fa
        .iter()
        .map(|a| attractor_trace(f, a, t))
        .collect::<Result<_>>()?;
    let gt: Vec<_> = ga
        .iter()
        .map(|a| attractor_trace(g, a, &mapped))
        .collect::<Result<_>>()?;
    // Rotation equality is an equivalence relation, so greedy matching
    // finds a perfect matching whenever one exists.
    let mut used = vec![false; gt.len()];
    for a in &ft {
        let partner = (0..gt.len()).find(|&k| !used[k] && equal_up_to_rotation(a, &gt[k]));
        match partner {
            Some(k) => used[k] = true,
            None => return Ok(false),
        }
    }
    Ok(true)
}

/// Multiset of attractor lengths, sorted.
pub fn cycle_lengths(attractors: &[Attractor]) -> Vec<usize> {
    let mut v: Vec<usize> = attractors.iter().map(Attractor::len).collect();
    v.sort_unstable();
    v
}
