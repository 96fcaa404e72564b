//! Random instance generators shared by the integration tests.

#![allow(dead_code)]

use rand::seq::index::sample;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use ban_opt::{Expr, NetworkDef, TruthTable, VarRef};

pub fn rng(seed: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random local function over `vars` that depends on every one of them.
pub fn essential_local(rng: &mut ChaCha8Rng, vars: Vec<VarRef>) -> Expr {
    loop {
        let bits: u32 = rng.random();
        let t = TruthTable::from_fn(vars.clone(), |r| bits >> r & 1 == 1);
        if (0..vars.len()).all(|i| t.is_essential(i)) {
            return t.to_expr();
        }
    }
}

fn pick(rng: &mut ChaCha8Rng, pool: &[VarRef], k: usize) -> Vec<VarRef> {
    let mut idx = sample(rng, pool.len(), k.min(pool.len())).into_vec();
    idx.sort_unstable();
    idx.into_iter().map(|i| pool[i].clone()).collect()
}

fn names(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

/// Closed network with `n` nodes, each reading 1 to `max_fanin` nodes
/// through an essential local function. A few nodes are constants.
pub fn random_ban(rng: &mut ChaCha8Rng, n: usize, max_fanin: usize) -> NetworkDef {
    let ids = names("x", n);
    let pool: Vec<VarRef> = ids.iter().map(VarRef::node).collect();
    let entries = ids
        .iter()
        .map(|id| {
            let k = if rng.random_bool(0.05) {
                0
            } else {
                rng.random_range(1..=max_fanin)
            };
            let mut vars = pick(rng, &pool, k);
            vars.sort();
            (id.clone(), essential_local(rng, vars))
        })
        .collect();
    NetworkDef::new("rand", Vec::new(), entries).expect("random network")
}

/// Acyclic module with 1 to `max_nodes` nodes and 1 to `max_inputs`
/// inputs. No chain of nodes is longer than `max_depth`.
pub fn random_module(
    rng: &mut ChaCha8Rng,
    max_nodes: usize,
    max_inputs: usize,
    max_depth: usize,
) -> NetworkDef {
    let n = rng.random_range(1..=max_nodes);
    let inputs = names("in", rng.random_range(1..=max_inputs));
    let ids = names("m", n);
    let mut depth = vec![0usize; n];
    let mut entries: Vec<(String, Expr)> = Vec::new();
    for i in 0..n {
        // Copies give the merge and delay-shift rules something to do.
        if i > 0 && rng.random_bool(0.2) {
            let p = rng.random_range(0..i);
            depth[i] = depth[p];
            let local = entries[p].1.clone();
            entries.push((ids[i].clone(), local));
            continue;
        }
        let mut pool: Vec<VarRef> = inputs.iter().map(VarRef::input).collect();
        pool.extend(
            (0..i)
                .filter(|&p| depth[p] < max_depth)
                .map(|p| VarRef::node(&ids[p])),
        );
        let k = if rng.random_bool(0.08) {
            0
        } else {
            rng.random_range(1..=3usize)
        };
        let mut vars = pick(rng, &pool, k);
        vars.sort();
        depth[i] = 1 + vars
            .iter()
            .filter_map(|v| match v {
                VarRef::Node(s) => ids.iter().position(|x| x == s).map(|p| depth[p]),
                _ => None,
            })
            .max()
            .unwrap_or(0);
        entries.push((ids[i].clone(), essential_local(rng, vars)));
    }
    NetworkDef::new("rmod", inputs, entries).expect("random module")
}

/// Random digraph on `n` vertices as successor lists.
pub fn random_digraph(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Vec<Vec<usize>> {
    (0..n)
        .map(|_| (0..n).filter(|_| rng.random_bool(p)).collect())
        .collect()
}
