//! Minimum feedback vertex sets of small digraphs.
//!
//! The exact solver forces self-loop vertices into the set, then branches on
//! the vertices of a shortest remaining cycle, pruning with a lower bound
//! from greedily packed vertex-disjoint cycles. Among minimum sets it returns
//! the one that cuts the latest-declared vertices: the set whose indices,
//! read from largest to smallest, are lexicographically greatest.

use crate::error::{Error, Result};

/// Vertex count up to which the branch-and-bound solver is used.
pub const EXACT_FVS_CAP: usize = 30;

/// Vertex count up to which [`exhaustive_fvs`] accepts a graph.
pub const ORACLE_FVS_CAP: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FvsSolution {
    /// Vertex indices, ascending.
    pub vertices: Vec<usize>,
    /// False when the graph exceeded [`EXACT_FVS_CAP`] and the greedy
    /// fallback was used.
    pub optimal: bool,
}

fn bits(mask: u64) -> impl Iterator<Item = usize> {
    let mut m = mask;
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let i = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(i)
        }
    })
}

struct Solver {
    n: usize,
    out: Vec<u64>,
    inn: Vec<u64>,
    self_loops: u64,
}

impl Solver {
    fn new(succ: &[Vec<usize>]) -> Self {
        let n = succ.len();
        let mut out = vec![0u64; n];
        let mut inn = vec![0u64; n];
        let mut self_loops = 0;
        for (s, ts) in succ.iter().enumerate() {
            for &t in ts {
                out[s] |= 1 << t;
                inn[t] |= 1 << s;
                if s == t {
                    self_loops |= 1 << s;
                }
            }
        }
        Solver {
            n,
            out,
            inn,
            self_loops,
        }
    }

    fn all(&self) -> u64 {
        if self.n == 64 {
            !0
        } else {
            (1u64 << self.n) - 1
        }
    }

    /// Strips vertices without an in- or out-neighbour; what remains is the
    /// part of `alive` that can still lie on a cycle.
    fn core(&self, mut alive: u64) -> u64 {
        loop {
            let before = alive;
            for v in bits(alive) {
                if self.out[v] & alive == 0 || self.inn[v] & alive == 0 {
                    alive &= !(1 << v);
                }
            }
            if alive == before {
                return alive;
            }
        }
    }

    fn shortest_cycle(&self, alive: u64) -> Option<Vec<usize>> {
        let mut best: Option<Vec<usize>> = None;
        for v in bits(alive) {
            if self.out[v] & (1 << v) != 0 {
                return Some(vec![v]);
            }
            // BFS from v until an arc back to v is found.
            let mut parent = vec![usize::MAX; self.n];
            let mut seen = 1u64 << v;
            let mut frontier = vec![v];
            let mut found = None;
            // Cycles closed from the frontier have length depth + 1.
            let mut depth = 0;
            'bfs: while !frontier.is_empty() {
                if best.as_ref().is_some_and(|b| depth + 1 >= b.len()) {
                    break;
                }
                let mut next = Vec::new();
                for &u in &frontier {
                    if self.out[u] & (1 << v) != 0 {
                        found = Some(u);
                        break 'bfs;
                    }
                    for w in bits(self.out[u] & alive & !seen) {
                        seen |= 1 << w;
                        parent[w] = u;
                        next.push(w);
                    }
                }
                frontier = next;
                depth += 1;
            }
            if let Some(last) = found {
                let mut cycle = vec![last];
                let mut u = last;
                while u != v {
                    u = parent[u];
                    cycle.push(u);
                }
                cycle.reverse();
                if best.as_ref().is_none_or(|b| cycle.len() < b.len()) {
                    best = Some(cycle);
                }
            }
        }
        best
    }

    fn packing_bound(&self, mut alive: u64) -> usize {
        let mut count = 0;
        loop {
            alive = self.core(alive);
            match self.shortest_cycle(alive) {
                None => return count,
                Some(c) => {
                    count += 1;
                    for v in c {
                        alive &= !(1 << v);
                    }
                }
            }
        }
    }

    /// Is there a feedback vertex set of size at most `k` containing
    /// `include` and disjoint from `exclude`?
    fn feasible(&self, include: u64, exclude: u64, k: usize) -> bool {
        let used = include.count_ones() as usize;
        if used > k {
            return false;
        }
        let alive = self.core(self.all() & !include);
        if alive == 0 {
            return true;
        }
        let forced = alive & self.self_loops;
        if forced != 0 {
            if forced & exclude != 0 {
                return false;
            }
            return self.feasible(include | forced, exclude, k);
        }
        let budget = k - used;
        if budget == 0 || self.packing_bound(alive) > budget {
            return false;
        }
        let cycle = self.shortest_cycle(alive).expect("core is cyclic");
        let mut exclude = exclude;
        for v in cycle {
            let bit = 1u64 << v;
            if exclude & bit != 0 {
                continue;
            }
            if self.feasible(include | bit, exclude, k) {
                return true;
            }
            exclude |= bit;
        }
        false
    }

    fn solve(&self) -> Vec<usize> {
        let lower = self.packing_bound(self.all());
        let k = (lower..=self.n)
            .find(|&k| self.feasible(0, 0, k))
            .expect("the full vertex set is a feedback vertex set");
        let mut include = 0u64;
        let mut exclude = 0u64;
        let candidates: Vec<usize> = bits(self.core(self.all())).collect();
        for &v in candidates.iter().rev() {
            let bit = 1u64 << v;
            if self.feasible(include | bit, exclude, k) {
                include |= bit;
            } else {
                exclude |= bit;
            }
        }
        debug_assert_eq!(include.count_ones() as usize, k);
        bits(include).collect()
    }
}

/// True when removing `set` leaves `succ` acyclic.
pub fn is_feedback_vertex_set(succ: &[Vec<usize>], set: &[usize]) -> bool {
    let n = succ.len();
    let mut removed = vec![false; n];
    for &v in set {
        removed[v] = true;
    }
    let mut indegree = vec![0usize; n];
    for (s, ts) in succ.iter().enumerate() {
        if removed[s] {
            continue;
        }
        for &t in ts {
            if !removed[t] {
                indegree[t] += 1;
            }
        }
    }
    let mut stack: Vec<usize> = (0..n)
        .filter(|&v| !removed[v] && indegree[v] == 0)
        .collect();
    let mut seen = 0;
    while let Some(v) = stack.pop() {
        seen += 1;
        for &t in &succ[v] {
            if !removed[t] {
                indegree[t] -= 1;
                if indegree[t] == 0 {
                    stack.push(t);
                }
            }
        }
    }
    seen == removed.iter().filter(|r| !**r).count()
}

fn greedy_fvs(succ: &[Vec<usize>]) -> Vec<usize> {
    let n = succ.len();
    let mut chosen = vec![false; n];
    for (s, ts) in succ.iter().enumerate() {
        if ts.contains(&s) {
            chosen[s] = true;
        }
    }
    loop {
        // Peel vertices that cannot be on a cycle.
        let mut alive: Vec<bool> = chosen.iter().map(|c| !c).collect();
        loop {
            let mut changed = false;
            for v in 0..n {
                if !alive[v] {
                    continue;
                }
                let has_out = succ[v].iter().any(|&t| alive[t]);
                let has_in = (0..n).any(|s| alive[s] && succ[s].contains(&v));
                if !has_out || !has_in {
                    alive[v] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let score = |v: usize| {
            let outd = succ[v].iter().filter(|&&t| alive[t]).count();
            let ind = (0..n).filter(|&s| alive[s] && succ[s].contains(&v)).count();
            outd * ind
        };
        match (0..n).filter(|&v| alive[v]).max_by_key(|&v| (score(v), v)) {
            None => break,
            Some(v) => chosen[v] = true,
        }
    }
    let mut set: Vec<usize> = (0..n).filter(|&v| chosen[v]).collect();
    for v in set.clone() {
        let without: Vec<usize> = set.iter().copied().filter(|&x| x != v).collect();
        if is_feedback_vertex_set(succ, &without) {
            set = without;
        }
    }
    set
}

/// Minimum feedback vertex set of the digraph given by successor lists.
pub fn minimum_fvs_indices(succ: &[Vec<usize>]) -> FvsSolution {
    if succ.len() > EXACT_FVS_CAP {
        return FvsSolution {
            vertices: greedy_fvs(succ),
            optimal: false,
        };
    }
    FvsSolution {
        vertices: Solver::new(succ).solve(),
        optimal: true,
    }
}

/// Reference solver: tries every vertex subset in ascending size order and
/// returns the first feedback vertex set found.
pub fn exhaustive_fvs(succ: &[Vec<usize>]) -> Result<Vec<usize>> {
    let n = succ.len();
    if n > ORACLE_FVS_CAP {
        return Err(Error::Bounds(format!(
            "exhaustive search takes at most {ORACLE_FVS_CAP} vertices, got {n}"
        )));
    }
    let mut subsets: Vec<u32> = (0..1u32 << n).collect();
    subsets.sort_by_key(|m| (m.count_ones(), *m));
    for m in subsets {
        let set: Vec<usize> = (0..n).filter(|i| m >> i & 1 == 1).collect();
        if is_feedback_vertex_set(succ, &set) {
            return Ok(set);
        }
    }
    unreachable!("the full vertex set breaks every cycle")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(n: usize, arcs: &[(usize, usize)]) -> Vec<Vec<usize>> {
        let mut succ = vec![Vec::new(); n];
        for &(s, t) in arcs {
            succ[s].push(t);
        }
        succ
    }

    #[test]
    fn acyclic_graph_needs_nothing() {
        let g = graph(4, &[(0, 1), (1, 2), (0, 3)]);
        assert!(minimum_fvs_indices(&g).vertices.is_empty());
        assert!(exhaustive_fvs(&g).unwrap().is_empty());
    }

    #[test]
    fn self_loops_are_always_cut() {
        let g = graph(3, &[(0, 0), (1, 2), (2, 1)]);
        let s = minimum_fvs_indices(&g);
        assert!(s.vertices.contains(&0));
        assert_eq!(s.vertices.len(), 2);
        assert!(s.optimal);
    }

    #[test]
    fn prefers_later_vertices_on_ties() {
        // a -> b -> d -> a and a -> c -> d: both {a} and {d} are minimum.
        let g = graph(4, &[(3, 0), (0, 1), (0, 2), (1, 3), (2, 3)]);
        assert_eq!(minimum_fvs_indices(&g).vertices, [3]);
        let cycle = graph(3, &[(0, 1), (1, 2), (2, 0)]);
        assert_eq!(minimum_fvs_indices(&cycle).vertices, [2]);
    }

    #[test]
    fn matches_oracle_on_complete_graph() {
        let mut arcs = Vec::new();
        for s in 0..6 {
            for t in 0..6 {
                if s != t {
                    arcs.push((s, t));
                }
            }
        }
        let g = graph(6, &arcs);
        assert_eq!(minimum_fvs_indices(&g).vertices.len(), 5);
        assert_eq!(exhaustive_fvs(&g).unwrap().len(), 5);
    }

    #[test]
    fn greedy_fallback_above_cap() {
        // A ring of 2-cycles over 32 vertices.
        let n = 32;
        let mut arcs = Vec::new();
        for i in 0..n {
            arcs.push((i, (i + 1) % n));
            if i % 2 == 0 {
                arcs.push((i + 1, i));
            }
        }
        let g = graph(n, &arcs);
        let s = minimum_fvs_indices(&g);
        assert!(!s.optimal);
        assert!(is_feedback_vertex_set(&g, &s.vertices));
        assert!(s.vertices.len() >= 16);
    }

    #[test]
    fn oracle_refuses_large_graphs() {
        assert!(exhaustive_fvs(&vec![Vec::new(); 13]).is_err());
    }
}
