//! Output functions of acyclic modules.
//!
//! `alpha@d` is the value input `alpha` held `d` updates before the
//! observation. Each node's output is its local function applied to the
//! outputs of its in-neighbours shifted by one update; inputs read directly
//! contribute `alpha@1`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use crate::dynamics::InputSequence;
use crate::error::{Error, Result};
use crate::expr::{Expr, VarRef};
use crate::network::{topological_order, NetworkDef};
use crate::table::{TruthTable, DEFAULT_FAN_IN_CAP};

/// A node reached while walking back from the observed node, with the
/// number of updates separating the two.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Requirement {
    pub node: String,
    pub added_delay: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OutputFunction {
    pub expr: Expr,
    /// Largest essential delay; 0 exactly when the function is constant.
    pub delay: u32,
    /// Canonical table over the essential delayed inputs.
    pub table: TruthTable,
}

impl OutputFunction {
    pub fn from_table(table: TruthTable) -> Self {
        let table = table.canonical();
        OutputFunction {
            expr: table.to_expr(),
            delay: table.max_delay(),
            table,
        }
    }

    /// Parses an expression over `label@delay` variables.
    pub fn from_expr(e: &Expr) -> Result<Self> {
        if let Some(v) = e
            .syntactic_vars()
            .into_iter()
            .find(|v| !matches!(v, VarRef::Delayed(..)))
        {
            return Err(Error::InvalidShift(format!(
                "output functions range over delayed inputs, found `{v}`"
            )));
        }
        Ok(Self::from_table(TruthTable::from_expr(
            e,
            DEFAULT_FAN_IN_CAP,
        )?))
    }

    /// Same table and same delay.
    pub fn equivalent(&self, other: &OutputFunction) -> bool {
        self.delay == other.delay && self.table == other.table
    }

    /// Evaluates against an input sequence read backwards: `alpha@d` takes
    /// the value of step `k - d + 1`, where `k = j.len()`.
    pub fn eval_backward(&self, j: &InputSequence) -> Result<bool> {
        let k = j.len();
        let mut row = 0;
        for (i, v) in self.table.vars().iter().enumerate() {
            let (label, d) = match v {
                VarRef::Delayed(l, d) => (l, *d as usize),
                _ => unreachable!("output tables hold delayed inputs only"),
            };
            if d > k {
                return Err(Error::IncompleteInput(format!(
                    "`{v}` needs {d} steps, sequence has {k}"
                )));
            }
            let value = j
                .get(label, k - d + 1)
                .ok_or_else(|| Error::IncompleteInput(format!("input `{label}` is missing")))?;
            if value {
                row |= 1 << i;
            }
        }
        Ok(self.table.get(row))
    }
}

impl fmt::Display for OutputFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (delay {})", self.expr, self.delay)
    }
}

fn node_index(m: &NetworkDef, s: &str) -> Result<usize> {
    m.index_of(s)
        .ok_or_else(|| Error::UnknownNode(s.to_string()))
}

/// Every `(t, d)` such that node `t` influences `s` through a path of
/// length `d`.
pub fn requirements(m: &NetworkDef, s: &str) -> Result<BTreeSet<Requirement>> {
    topological_order(m)?;
    let start = node_index(m, s)?;
    let preds = m.node_predecessors()?;
    let mut seen = BTreeSet::new();
    let mut frontier = vec![(start, 0u32)];
    while let Some((t, d)) = frontier.pop() {
        if !seen.insert((t, d)) {
            continue;
        }
        for &p in &preds[t] {
            frontier.push((p, d + 1));
        }
    }
    Ok(seen
        .into_iter()
        .map(|(t, d)| Requirement {
            node: m.nodes()[t].clone(),
            added_delay: d,
        })
        .collect())
}

/// Output functions of every node of an acyclic module, in node order.
pub fn all_output_functions(m: &NetworkDef) -> Result<Vec<OutputFunction>> {
    Ok(compose_outputs(m, &vec![true; m.len()])?
        .into_iter()
        .map(|o| o.expect("every node requested"))
        .collect())
}

fn compose_outputs(m: &NetworkDef, keep: &[bool]) -> Result<Vec<Option<OutputFunction>>> {
    let order = topological_order(m)?;
    let mut tables: Vec<Option<TruthTable>> = vec![None; m.len()];
    for i in order.into_iter().filter(|&i| keep[i]) {
        let local = TruthTable::from_expr(&m.locals()[i], DEFAULT_FAN_IN_CAP)?.canonical();
        let args = local
            .vars()
            .iter()
            .map(|v| match v {
                VarRef::Input(a) => Ok(TruthTable::from_fn(
                    vec![VarRef::delayed(a.clone(), 1)],
                    |r| r == 1,
                )),
                VarRef::Node(t) => {
                    let t = m.index_of(t).expect("validated local");
                    tables[t].as_ref().expect("ancestors come first").shifted(1)
                }
                VarRef::Delayed(..) => unreachable!("networks hold no delayed variables"),
            })
            .collect::<Result<Vec<_>>>()?;
        let refs: Vec<&TruthTable> = args.iter().collect();
        tables[i] = Some(TruthTable::compose(&local, &refs, DEFAULT_FAN_IN_CAP)?);
    }
    Ok(tables
        .into_iter()
        .map(|t| t.map(OutputFunction::from_table))
        .collect())
}

pub fn output_circuit(m: &NetworkDef, s: &str) -> Result<OutputFunction> {
    let mut map = output_functions(m, &[s])?;
    Ok(map.remove(s).expect("requested node"))
}

/// Output functions of the nodes in `x`.
pub fn output_functions<S: AsRef<str>>(
    m: &NetworkDef,
    x: &[S],
) -> Result<BTreeMap<String, OutputFunction>> {
    let wanted: Vec<usize> = x
        .iter()
        .map(|s| node_index(m, s.as_ref()))
        .collect::<Result<_>>()?;
    // Only ancestors of the requested nodes are composed.
    let preds = m.node_predecessors()?;
    let mut keep = vec![false; m.len()];
    let mut stack = wanted.clone();
    while let Some(t) = stack.pop() {
        if !keep[t] {
            keep[t] = true;
            stack.extend(&preds[t]);
        }
    }
    let all = compose_outputs(m, &keep)?;
    Ok(wanted
        .into_iter()
        .map(|i| (m.nodes()[i].clone(), all[i].clone().expect("kept node")))
        .collect())
}

/// The unsimplified substitution circuit for node `s`: every input read at
/// accumulated delay `d` becomes `alpha@(d+1)` and every node is replaced by
/// its own local one update further back.
pub fn raw_output_circuit(m: &NetworkDef, s: &str) -> Result<Expr> {
    topological_order(m)?;
    let start = node_index(m, s)?;
    let mut memo: HashMap<(usize, u32), Expr> = HashMap::new();
    Ok(expand(m, start, 0, &mut memo))
}

fn expand(m: &NetworkDef, t: usize, d: u32, memo: &mut HashMap<(usize, u32), Expr>) -> Expr {
    if let Some(e) = memo.get(&(t, d)) {
        return e.clone();
    }
    let e = m.locals()[t].substitute_with(&mut |v| match v {
        VarRef::Input(a) => Some(Expr::delayed(a.clone(), d + 1)),
        VarRef::Node(u) => Some(expand(m, m.index_of(u).unwrap(), d + 1, memo)),
        VarRef::Delayed(..) => None,
    });
    memo.insert((t, d), e.clone());
    e
}

/// Length of the longest chain of influences ending at each node, counting
/// the final update: after that many steps the node's state no longer
/// depends on the initial configuration.
pub fn settling_times(m: &NetworkDef) -> Result<Vec<usize>> {
    let order = topological_order(m)?;
    let preds = m.node_predecessors()?;
    let mut h = vec![0usize; m.len()];
    for i in order {
        h[i] = 1 + preds[i].iter().map(|&p| h[p]).max().unwrap_or(0);
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{module_trajectory, Configuration};
    use crate::expr::{parse_delayed_expr, parse_expr};
    use crate::fixtures;
    use crate::table::{canonicalize, equivalent};

    fn delayed(text: &str, inputs: &[&str]) -> OutputFunction {
        OutputFunction::from_expr(&parse_delayed_expr(text, inputs).unwrap()).unwrap()
    }

    fn req(pairs: &[(&str, u32)]) -> BTreeSet<Requirement> {
        pairs
            .iter()
            .map(|(n, d)| Requirement {
                node: n.to_string(),
                added_delay: *d,
            })
            .collect()
    }

    #[test]
    fn requirement_lists() {
        let m = fixtures::m_a();
        assert_eq!(
            requirements(&m, "d").unwrap(),
            req(&[("d", 0), ("b", 1), ("c", 1), ("a", 2)])
        );
        assert_eq!(requirements(&m, "a").unwrap(), req(&[("a", 0)]));
        let mb = fixtures::m_b();
        assert_eq!(
            requirements(&mb, "C").unwrap(),
            req(&[("C", 0), ("Ru", 1), ("S9", 1)])
        );
        assert!(matches!(
            requirements(&fixtures::f_a(), "d"),
            Err(Error::CyclicModule(_))
        ));
    }

    #[test]
    fn output_of_m_a() {
        let o = output_circuit(&fixtures::m_a(), "d").unwrap();
        assert_eq!(o.delay, 3);
        assert_eq!(o.expr.to_string(), "!alpha@3");
        assert_eq!(o.to_string(), "!alpha@3 (delay 3)");
        let relay = output_circuit(&fixtures::m_a(), "a").unwrap();
        assert_eq!(relay.expr.to_string(), "alpha@1");
        assert_eq!(relay.delay, 1);
    }

    #[test]
    fn outputs_of_m_b() {
        let m = fixtures::m_b();
        let x = ["St", "Sk", "Sl", "Pp", "C", "C*"];
        let o = output_functions(&m, &x).unwrap();
        let expect = [
            ("St", "!alpha_St@1", 1),
            ("Sl", "!alpha_Sl@1 | alpha_C*@1", 1),
            ("Sk", "alpha_St@1 | !alpha_Sk@1", 1),
            ("Pp", "alpha_Sl@1 | !alpha_Pp@1", 1),
            (
                "C",
                "alpha_Sk@2 & !alpha_Pp@2 & alpha_C@2 & alpha_C*@2 | !alpha_Sl@1",
                2,
            ),
            ("C*", "alpha_C@2 | !alpha_Pp@2", 2),
        ];
        for (node, text, d) in expect {
            let want = delayed(
                text,
                m.inputs()
                    .iter()
                    .map(String::as_str)
                    .collect::<Vec<_>>()
                    .as_slice(),
            );
            assert!(o[node].equivalent(&want), "{node}: {}", o[node]);
            assert_eq!(o[node].delay, d);
        }
        assert_eq!(o["C*"].expr.to_string(), "alpha_C@2 | !alpha_Pp@2");
    }

    #[test]
    fn empty_request_and_unknown_node() {
        assert!(output_functions::<&str>(&fixtures::m_a(), &[])
            .unwrap()
            .is_empty());
        assert!(matches!(
            output_functions(&fixtures::m_a(), &["zz"]),
            Err(Error::UnknownNode(_))
        ));
    }

    #[test]
    fn constant_outputs_have_delay_zero() {
        let m = fixtures::module(
            "k",
            &["a"],
            &[("t", "a"), ("u", "a"), ("s", "t & !u | !t & u")],
        );
        let o = output_circuit(&m, "s").unwrap();
        assert_eq!(o.delay, 0);
        assert_eq!(o.expr, Expr::Const(false));
    }

    #[test]
    fn raw_circuit_matches_normalized() {
        for m in [fixtures::m_a(), fixtures::m_b()] {
            for s in m.nodes() {
                let raw = raw_output_circuit(&m, s).unwrap();
                let o = output_circuit(&m, s).unwrap();
                assert!(equivalent(&raw, &o.expr).unwrap(), "{s}");
                assert_eq!(canonicalize(&raw).unwrap(), o.table);
            }
        }
    }

    #[test]
    fn trajectories_agree_with_output_functions() {
        let m = fixtures::m_a();
        let o = output_circuit(&m, "d").unwrap();
        let labels = vec!["alpha".to_string()];
        for bits in 0..8u32 {
            let j = InputSequence::from_fn(&labels, 3, |_, t| bits >> (t - 1) & 1 == 1);
            for x in 0..16 {
                let y = module_trajectory(&m, &Configuration::new(x, 4), &j).unwrap();
                assert_eq!(y.get(3), o.eval_backward(&j).unwrap());
            }
        }
    }

    #[test]
    fn settling_time_of_m_a() {
        assert_eq!(settling_times(&fixtures::m_a()).unwrap(), [1, 2, 2, 3]);
    }

    #[test]
    fn delayed_names_only_parse_as_outputs() {
        assert!(parse_expr("alpha@1", &["a"], &["alpha"]).is_err());
        let o = delayed("!alpha@3 | alpha@3 & 0", &["alpha"]);
        assert_eq!(o.to_string(), "!alpha@3 (delay 3)");
        assert!(parse_delayed_expr("alpha@", &["alpha"]).is_err());
        assert!(parse_delayed_expr("beta@1", &["alpha"]).is_err());
    }
}
