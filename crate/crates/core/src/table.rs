//! Truth tables: the canonical semantic form of an expression.
//!
//! A [`TruthTable`] stores one bit per assignment of its variables, with
//! `vars[0]` as the least significant bit of the row index. Rows are packed
//! 64 per word so that evaluation, essential-variable detection and
//! monotonicity probes run word-parallel.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use crate::error::{Error, Result};
use crate::expr::{Expr, VarRef};

/// Maximum number of variables an expression may carry before
/// truth-table based operations refuse it.
pub const DEFAULT_FAN_IN_CAP: usize = 20;

/// Above this many essential variables `simplify` stops computing prime
/// implicants and emits the one-pass merged minterm cover instead.
const PRIME_IMPLICANT_LIMIT: usize = 12;

const PATTERNS: [u64; 6] = [
    0xAAAA_AAAA_AAAA_AAAA,
    0xCCCC_CCCC_CCCC_CCCC,
    0xF0F0_F0F0_F0F0_F0F0,
    0xFF00_FF00_FF00_FF00,
    0xFFFF_0000_FFFF_0000,
    0xFFFF_FFFF_0000_0000,
];

fn word_count(n: usize) -> usize {
    if n <= 6 {
        1
    } else {
        1 << (n - 6)
    }
}

fn valid_mask(n: usize) -> u64 {
    if n >= 6 {
        !0
    } else {
        (1u64 << (1u32 << n)) - 1
    }
}

fn var_word(i: usize, word: usize) -> u64 {
    if i < 6 {
        PATTERNS[i]
    } else if (word >> (i - 6)) & 1 == 1 {
        !0
    } else {
        0
    }
}

#[derive(Clone, Copy)]
enum Op {
    Const(bool),
    Var(usize),
    Not,
    And,
    Or,
}

fn compile(e: &Expr, index: &HashMap<&VarRef, usize>, out: &mut Vec<Op>) {
    match e {
        Expr::Const(b) => out.push(Op::Const(*b)),
        Expr::Var(v) => out.push(Op::Var(index[v])),
        Expr::Not(a) => {
            compile(a, index, out);
            out.push(Op::Not);
        }
        Expr::And(a, b) => {
            compile(a, index, out);
            compile(b, index, out);
            out.push(Op::And);
        }
        Expr::Or(a, b) => {
            compile(a, index, out);
            compile(b, index, out);
            out.push(Op::Or);
        }
    }
}

fn run(prog: &[Op], word: usize, stack: &mut Vec<u64>) -> u64 {
    stack.clear();
    for op in prog {
        match *op {
            Op::Const(b) => stack.push(if b { !0 } else { 0 }),
            Op::Var(i) => stack.push(var_word(i, word)),
            Op::Not => {
                let a = stack.pop().unwrap();
                stack.push(!a);
            }
            Op::And => {
                let b = stack.pop().unwrap();
                let a = stack.pop().unwrap();
                stack.push(a & b);
            }
            Op::Or => {
                let b = stack.pop().unwrap();
                let a = stack.pop().unwrap();
                stack.push(a | b);
            }
        }
    }
    stack.pop().unwrap()
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TruthTable {
    vars: Vec<VarRef>,
    bits: Vec<u64>,
}

impl TruthTable {
    /// Table of `e` over its syntactic variables (not yet canonical).
    pub fn from_expr(e: &Expr, cap: usize) -> Result<Self> {
        let vars: Vec<VarRef> = e.syntactic_vars().into_iter().collect();
        Self::from_expr_over(e, vars, cap)
    }

    /// Table of `e` over `vars`, which must contain every syntactic variable.
    pub fn from_expr_over(e: &Expr, vars: Vec<VarRef>, cap: usize) -> Result<Self> {
        if vars.len() > cap {
            return Err(Error::FanInCap {
                vars: vars.len(),
                cap,
            });
        }
        let index: HashMap<&VarRef, usize> = vars.iter().enumerate().map(|(i, v)| (v, i)).collect();
        if let Some(missing) = e.syntactic_vars().iter().find(|v| !index.contains_key(v)) {
            return Err(Error::Unassigned(missing.to_string()));
        }
        let mut prog = Vec::with_capacity(e.size());
        compile(e, &index, &mut prog);
        let n = vars.len();
        let mask = valid_mask(n);
        let mut stack = Vec::new();
        let bits = (0..word_count(n))
            .map(|w| run(&prog, w, &mut stack) & mask)
            .collect();
        Ok(TruthTable { vars, bits })
    }

    pub fn constant(value: bool) -> Self {
        TruthTable {
            vars: Vec::new(),
            bits: vec![u64::from(value)],
        }
    }

    /// Builds a table from a row predicate. `vars` must be sorted and distinct.
    pub fn from_fn(vars: Vec<VarRef>, mut f: impl FnMut(usize) -> bool) -> Self {
        let n = vars.len();
        let mut bits = vec![0u64; word_count(n)];
        for row in 0..(1usize << n) {
            if f(row) {
                bits[row >> 6] |= 1 << (row & 63);
            }
        }
        TruthTable { vars, bits }
    }

    pub fn vars(&self) -> &[VarRef] {
        &self.vars
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn rows(&self) -> usize {
        1 << self.vars.len()
    }

    pub fn get(&self, row: usize) -> bool {
        (self.bits[row >> 6] >> (row & 63)) & 1 == 1
    }

    /// Entries in row order, for display and tests.
    pub fn bit_vec(&self) -> Vec<bool> {
        (0..self.rows()).map(|r| self.get(r)).collect()
    }

    pub fn constant_value(&self) -> Option<bool> {
        let n = self.num_vars();
        let mask = valid_mask(n);
        if self.bits.iter().all(|&w| w & mask == 0) {
            Some(false)
        } else if self.bits.iter().all(|&w| w & mask == mask) {
            Some(true)
        } else {
            None
        }
    }

    /// Largest delay among the variables, 0 when there is none.
    pub fn max_delay(&self) -> u32 {
        self.vars
            .iter()
            .filter_map(VarRef::delay)
            .max()
            .unwrap_or(0)
    }

    pub fn eval(&self, assignment: &HashMap<VarRef, bool>) -> Result<bool> {
        let mut row = 0;
        for (i, v) in self.vars.iter().enumerate() {
            let value = assignment
                .get(v)
                .ok_or_else(|| Error::Unassigned(v.to_string()))?;
            if *value {
                row |= 1 << i;
            }
        }
        Ok(self.get(row))
    }

    /// For variable `i`: (some row where setting it lowers the value,
    /// some row where setting it raises the value).
    fn flip_effects(&self, i: usize) -> (bool, bool) {
        let n = self.num_vars();
        let mut falls = false;
        let mut rises = false;
        if i < 6 {
            let shift = 1u32 << i;
            let low = !PATTERNS[i] & valid_mask(n);
            for &w in &self.bits {
                let f0 = w & low;
                let f1 = (w >> shift) & low;
                falls |= f0 & !f1 != 0;
                rises |= !f0 & f1 != 0;
            }
        } else {
            let stride = 1 << (i - 6);
            for w in 0..self.bits.len() {
                if w & stride == 0 {
                    let f0 = self.bits[w];
                    let f1 = self.bits[w | stride];
                    falls |= f0 & !f1 != 0;
                    rises |= !f0 & f1 != 0;
                }
            }
        }
        (falls, rises)
    }

    pub fn is_essential(&self, i: usize) -> bool {
        let (falls, rises) = self.flip_effects(i);
        falls || rises
    }

    /// Monotonicity of the table in variable `i`.
    pub fn sign_of(&self, i: usize) -> Option<Sign> {
        match self.flip_effects(i) {
            (false, false) => None,
            (false, true) => Some(Sign::Positive),
            (true, false) => Some(Sign::Negative),
            (true, true) => Some(Sign::Dual),
        }
    }

    pub fn essential_vars(&self) -> Vec<VarRef> {
        (0..self.num_vars())
            .filter(|&i| self.is_essential(i))
            .map(|i| self.vars[i].clone())
            .collect()
    }

    /// Restricts the table to its essential variables.
    pub fn canonical(self) -> Self {
        let keep: Vec<usize> = (0..self.num_vars())
            .filter(|&i| self.is_essential(i))
            .collect();
        if keep.len() == self.num_vars() {
            return self;
        }
        let vars = keep.iter().map(|&i| self.vars[i].clone()).collect();
        TruthTable::from_fn(vars, |row| {
            let mut old = 0;
            for (j, &i) in keep.iter().enumerate() {
                if (row >> j) & 1 == 1 {
                    old |= 1 << i;
                }
            }
            self.get(old)
        })
    }

    pub fn is_canonical(&self) -> bool {
        (0..self.num_vars()).all(|i| self.is_essential(i))
    }

    /// Maps every variable through `f`; the result is re-sorted into the
    /// canonical variable order. Fails if two variables collide.
    pub fn rename(&self, mut f: impl FnMut(&VarRef) -> VarRef) -> Result<Self> {
        let renamed: Vec<VarRef> = self.vars.iter().map(&mut f).collect();
        let mut sorted = renamed.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != renamed.len() {
            return Err(Error::InvalidMapping(
                "renaming merges two table variables".into(),
            ));
        }
        let position: Vec<usize> = renamed
            .iter()
            .map(|v| sorted.binary_search(v).unwrap())
            .collect();
        Ok(TruthTable::from_fn(sorted, |row| {
            let mut old = 0;
            for (i, &p) in position.iter().enumerate() {
                if (row >> p) & 1 == 1 {
                    old |= 1 << i;
                }
            }
            self.get(old)
        }))
    }

    /// Adds `delta` to every delay; all variables must be delayed inputs.
    pub fn shifted(&self, delta: u32) -> Result<Self> {
        if let Some(v) = self.vars.iter().find(|v| !matches!(v, VarRef::Delayed(..))) {
            return Err(Error::InvalidShift(format!("`{v}` is not a delayed input")));
        }
        // Shifting every delay by the same amount keeps the order.
        Ok(TruthTable {
            vars: self
                .vars
                .iter()
                .map(|v| match v {
                    VarRef::Delayed(l, d) => VarRef::Delayed(l.clone(), d + delta),
                    _ => unreachable!(),
                })
                .collect(),
            bits: self.bits.clone(),
        })
    }

    /// Applies a `k`-ary local function (row `r` of `local` is its value when
    /// argument `i` equals bit `i` of `r`) to argument tables. The result is
    /// canonical.
    pub fn compose(local: &TruthTable, args: &[&TruthTable], cap: usize) -> Result<Self> {
        assert_eq!(local.num_vars(), args.len(), "arity mismatch");
        let all: BTreeSet<&VarRef> = args.iter().flat_map(|t| t.vars.iter()).collect();
        if all.len() > cap {
            return Err(Error::FanInCap {
                vars: all.len(),
                cap,
            });
        }
        let vars: Vec<VarRef> = all.into_iter().cloned().collect();
        let positions: Vec<Vec<usize>> = args
            .iter()
            .map(|t| {
                t.vars
                    .iter()
                    .map(|v| vars.binary_search(v).unwrap())
                    .collect()
            })
            .collect();
        Ok(TruthTable::from_fn(vars, |row| {
            let mut local_row = 0;
            for (k, (t, pos)) in args.iter().zip(&positions).enumerate() {
                let mut r = 0;
                for (i, &p) in pos.iter().enumerate() {
                    if (row >> p) & 1 == 1 {
                        r |= 1 << i;
                    }
                }
                if t.get(r) {
                    local_row |= 1 << k;
                }
            }
            local.get(local_row)
        })
        .canonical())
    }

    /// Deterministic sum-of-products expression for this table.
    ///
    /// Up to 12 variables the cover is built from prime implicants (essential
    /// primes first, then greedily by coverage); above that, adjacent minterms
    /// are merged in a single pass.
    pub fn to_expr(&self) -> Expr {
        if let Some(b) = self.constant_value() {
            return Expr::Const(b);
        }
        let n = self.num_vars();
        let ones: Vec<u32> = (0..self.rows())
            .filter(|&r| self.get(r))
            .map(|r| r as u32)
            .collect();
        let mut cubes = if n <= PRIME_IMPLICANT_LIMIT {
            prime_cover(n, &ones)
        } else {
            merged_minterms(&ones)
        };
        cubes.sort_by_key(|c| c.order_key(n));
        Expr::or_all(cubes.iter().map(|c| c.to_expr(&self.vars)))
    }
}

/// Sign of an influence: nondecreasing, nonincreasing, or neither.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Positive,
    Negative,
    Dual,
}

impl Sign {
    pub fn symbol(self) -> &'static str {
        match self {
            Sign::Positive => "+",
            Sign::Negative => "-",
            Sign::Dual => "±",
        }
    }
}

/// A product term: variables in `free` are absent, the others take the
/// value of the matching bit in `value`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Cube {
    free: u32,
    value: u32,
}

impl Cube {
    fn covers(&self, m: u32) -> bool {
        m & !self.free == self.value
    }

    fn literals(&self, n: usize) -> usize {
        n - self.free.count_ones() as usize
    }

    fn order_key(&self, n: usize) -> Vec<(usize, bool)> {
        (0..n)
            .filter(|i| self.free >> i & 1 == 0)
            .map(|i| (i, self.value >> i & 1 == 0))
            .collect()
    }

    fn to_expr(self, vars: &[VarRef]) -> Expr {
        Expr::and_all(
            (0..vars.len())
                .filter(|i| self.free >> i & 1 == 0)
                .map(|i| {
                    let v = Expr::Var(vars[i].clone());
                    if self.value >> i & 1 == 1 {
                        v
                    } else {
                        Expr::not(v)
                    }
                }),
        )
    }
}

fn prime_implicants(n: usize, ones: &[u32]) -> Vec<Cube> {
    let mut current: BTreeSet<Cube> = ones.iter().map(|&m| Cube { free: 0, value: m }).collect();
    let mut primes = Vec::new();
    while !current.is_empty() {
        let mut next = BTreeSet::new();
        let mut used = HashSet::new();
        for c in &current {
            for b in 0..n {
                let bit = 1u32 << b;
                if c.free & bit != 0 || c.value & bit != 0 {
                    continue;
                }
                let partner = Cube {
                    free: c.free,
                    value: c.value | bit,
                };
                if current.contains(&partner) {
                    next.insert(Cube {
                        free: c.free | bit,
                        value: c.value,
                    });
                    used.insert(*c);
                    used.insert(partner);
                }
            }
        }
        primes.extend(current.iter().filter(|c| !used.contains(c)));
        current = next;
    }
    primes
}

fn prime_cover(n: usize, ones: &[u32]) -> Vec<Cube> {
    let primes = prime_implicants(n, ones);
    let mut chosen: Vec<Cube> = Vec::new();
    let mut uncovered: BTreeSet<u32> = ones.iter().copied().collect();
    for &m in ones {
        let mut covering = primes.iter().filter(|p| p.covers(m));
        let first = covering.next().copied();
        if covering.next().is_none() {
            if let Some(p) = first {
                if !chosen.contains(&p) {
                    chosen.push(p);
                }
            }
        }
    }
    uncovered.retain(|&m| !chosen.iter().any(|c| c.covers(m)));
    while !uncovered.is_empty() {
        let best = primes
            .iter()
            .filter(|p| !chosen.contains(p))
            .max_by(|a, b| {
                let ca = uncovered.iter().filter(|&&m| a.covers(m)).count();
                let cb = uncovered.iter().filter(|&&m| b.covers(m)).count();
                ca.cmp(&cb)
                    .then(b.literals(n).cmp(&a.literals(n)))
                    .then(b.order_key(n).cmp(&a.order_key(n)))
            })
            .copied()
            .expect("prime implicants cover every minterm");
        uncovered.retain(|&m| !best.covers(m));
        chosen.push(best);
    }
    chosen
}

fn merged_minterms(ones: &[u32]) -> Vec<Cube> {
    let on: HashSet<u32> = ones.iter().copied().collect();
    let mut used = HashSet::new();
    let mut out = Vec::new();
    for &m in ones {
        if used.contains(&m) {
            continue;
        }
        used.insert(m);
        let partner = (0..32)
            .map(|b| 1u32 << b)
            .filter(|bit| m & bit == 0)
            .map(|bit| (bit, m | bit))
            .find(|(_, p)| on.contains(p) && !used.contains(p));
        match partner {
            Some((bit, p)) => {
                used.insert(p);
                out.push(Cube {
                    free: bit,
                    value: m,
                });
            }
            None => out.push(Cube { free: 0, value: m }),
        }
    }
    out
}

/// Canonical truth table of `e`: restricted to essential variables, sorted
/// by the canonical variable order.
pub fn canonicalize(e: &Expr) -> Result<TruthTable> {
    canonicalize_capped(e, DEFAULT_FAN_IN_CAP)
}

pub fn canonicalize_capped(e: &Expr, cap: usize) -> Result<TruthTable> {
    Ok(TruthTable::from_expr(e, cap)?.canonical())
}

pub fn essential_vars(e: &Expr) -> Result<BTreeSet<VarRef>> {
    Ok(TruthTable::from_expr(e, DEFAULT_FAN_IN_CAP)?
        .essential_vars()
        .into_iter()
        .collect())
}

pub fn equivalent(a: &Expr, b: &Expr) -> Result<bool> {
    Ok(canonicalize(a)? == canonicalize(b)?)
}

/// Equivalent expression whose syntactic variables are exactly the
/// essential ones, in a deterministic sum-of-products form.
pub fn simplify(e: &Expr) -> Result<Expr> {
    Ok(canonicalize(e)?.to_expr())
}

/// Signs of the essential variables of `e`, keyed by variable.
pub fn signs(e: &Expr) -> Result<BTreeMap<VarRef, Sign>> {
    let t = TruthTable::from_expr(e, DEFAULT_FAN_IN_CAP)?;
    Ok((0..t.num_vars())
        .filter_map(|i| t.sign_of(i).map(|s| (t.vars[i].clone(), s)))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;

    fn p(text: &str) -> Expr {
        parse_expr(text, &["a", "b", "c", "d", "Ru"], &["alpha_Sl"]).unwrap()
    }

    #[test]
    fn essential_examples() {
        let names = |e: &str| -> Vec<String> {
            essential_vars(&p(e))
                .unwrap()
                .iter()
                .map(|v| v.to_string())
                .collect()
        };
        assert_eq!(names("a & (a | b)"), ["a"]);
        assert_eq!(names("!b | !c"), ["b", "c"]);
        assert!(names("a | !a").is_empty());
    }

    #[test]
    fn canonicalize_examples() {
        let t = canonicalize(&p("a | !a")).unwrap();
        assert!(t.vars().is_empty());
        assert_eq!(t.bit_vec(), [true]);
        let t = canonicalize(&Expr::not(Expr::delayed("alpha", 3))).unwrap();
        assert_eq!(t.vars(), [VarRef::delayed("alpha", 3)]);
        assert_eq!(t.bit_vec(), [true, false]);
    }

    #[test]
    fn equivalence_examples() {
        assert!(equivalent(&p("!b | !b"), &p("!b")).unwrap());
        assert!(!equivalent(
            &Expr::not(Expr::delayed("alpha", 3)),
            &Expr::not(Expr::delayed("alpha", 2))
        )
        .unwrap());
    }

    #[test]
    fn simplify_examples() {
        assert_eq!(
            simplify(&p("!Ru | !Ru | !alpha_Sl")).unwrap(),
            p("!Ru | !alpha_Sl")
        );
        assert_eq!(simplify(&p("a & !a")).unwrap(), Expr::Const(false));
        assert_eq!(simplify(&p("a & (a | b)")).unwrap(), p("a"));
        assert_eq!(simplify(&p("!b | !b")).unwrap(), p("!b"));
    }

    #[test]
    fn simplify_orders_terms_by_variable_order() {
        let e = Expr::or(
            Expr::not(Expr::delayed("alpha_Pp", 2)),
            Expr::delayed("alpha_C", 2),
        );
        assert_eq!(simplify(&e).unwrap().to_string(), "alpha_C@2 | !alpha_Pp@2");
    }

    #[test]
    fn large_tables_use_word_parallel_paths() {
        // 8 variables spans several words.
        let names: Vec<String> = (0..8).map(|i| format!("v{i}")).collect();
        let e = parse_expr("v0 & v7 | !v6 & v3 | v5 & !v0", &names, &[]).unwrap();
        let t = canonicalize(&e).unwrap();
        assert_eq!(t.num_vars(), 5);
        assert!(equivalent(&t.to_expr(), &e).unwrap());
        let x = parse_expr("v7 | v6", &names, &[]).unwrap();
        let s = signs(&Expr::and(x, Expr::not(Expr::node("v0")))).unwrap();
        assert_eq!(s[&VarRef::node("v7")], Sign::Positive);
        assert_eq!(s[&VarRef::node("v0")], Sign::Negative);
    }

    #[test]
    fn fan_in_cap_is_enforced() {
        let names: Vec<String> = (0..21).map(|i| format!("v{i}")).collect();
        let e = Expr::or_all(names.iter().map(|n| Expr::node(n.clone())));
        assert!(matches!(
            canonicalize(&e),
            Err(Error::FanInCap { vars: 21, cap: 20 })
        ));
        assert!(canonicalize_capped(&e, 21).is_ok());
    }

    #[test]
    fn signs_detect_dual_influence() {
        let names = ["a", "b"];
        let xor = parse_expr("a & !b | !a & b", &names, &[]).unwrap();
        let s = signs(&xor).unwrap();
        assert_eq!(s[&VarRef::node("a")], Sign::Dual);
        assert_eq!(s[&VarRef::node("b")], Sign::Dual);
    }

    #[test]
    fn rename_resorts_variables() {
        let e = Expr::and(Expr::delayed("a", 1), Expr::not(Expr::delayed("b", 1)));
        let t = canonicalize(&e).unwrap();
        let r = t
            .rename(|v| match v {
                VarRef::Delayed(l, d) if l == "a" => VarRef::delayed("z", *d),
                other => other.clone(),
            })
            .unwrap();
        assert_eq!(r.vars(), [VarRef::delayed("b", 1), VarRef::delayed("z", 1)]);
        let back = Expr::and(Expr::delayed("z", 1), Expr::not(Expr::delayed("b", 1)));
        assert_eq!(r, canonicalize(&back).unwrap());
        assert!(t.rename(|_| VarRef::delayed("q", 1)).is_err());
    }

    #[test]
    fn merged_minterm_fallback_is_equivalent() {
        let names: Vec<String> = (0..13).map(|i| format!("v{i}")).collect();
        let e = Expr::or_all((0..13).step_by(2).map(|i| {
            Expr::and(
                Expr::node(names[i].clone()),
                Expr::not(Expr::node(names[(i + 1) % 13].clone())),
            )
        }));
        let t = canonicalize(&e).unwrap();
        assert_eq!(t.num_vars(), 13);
        let s = t.to_expr();
        assert_eq!(canonicalize(&s).unwrap(), t);
    }
}
