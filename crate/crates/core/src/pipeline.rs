//! End-to-end optimization: unfold, compute output functions, synthesize a
//! smaller module and wire it back into a closed network.

use std::collections::BTreeMap;

use crate::dynamics::{attractors, cycle_lengths, match_attractors, Attractor, DEFAULT_MAX_N};
use crate::error::{Error, Result};
use crate::network::{recursive_wiring, NetworkDef, Wiring};
use crate::outputs::{output_functions, OutputFunction};
use crate::synthesis::{synthesize, Rewrite, SynthesisInstance};
use crate::unfold::unfold;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OptimizeOptions {
    /// Largest node count for which attractors are enumerated.
    pub max_n: usize,
    /// Enumerate the attractors of both networks and compare them.
    pub verify: bool,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        OptimizeOptions {
            max_n: DEFAULT_MAX_N,
            verify: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PipelineReport {
    pub original: NetworkDef,
    pub optimized: NetworkDef,
    /// Acyclic unfolding of the original network.
    pub module: NetworkDef,
    /// Synthesized module, before wiring.
    pub synthesized: NetworkDef,
    /// Cut set T, in declaration order.
    pub cut: Vec<String>,
    /// False when the cut set came from the heuristic fallback.
    pub fvs_optimal: bool,
    /// Output functions of the cut nodes in the unfolding.
    pub outputs: BTreeMap<String, OutputFunction>,
    pub h: BTreeMap<String, String>,
    pub g: BTreeMap<String, String>,
    pub omega: Wiring,
    pub omega_prime: Wiring,
    pub rewrites: Vec<Rewrite>,
    /// Attractors of the original network, when they were compared.
    pub original_attractors: Option<Vec<Attractor>>,
    /// Attractors of the optimized network, when within the cap.
    pub optimized_attractors: Option<Vec<Attractor>>,
    pub verified: Option<bool>,
}

impl PipelineReport {
    pub fn before(&self) -> usize {
        self.original.len()
    }

    pub fn after(&self) -> usize {
        self.optimized.len()
    }

    /// The dynamics shrink by a factor of two to this power.
    pub fn reduction_exponent(&self) -> usize {
        self.before() - self.after()
    }

    pub fn cycle_lengths(&self) -> Option<(Vec<usize>, Vec<usize>)> {
        Some((
            cycle_lengths(self.original_attractors.as_ref()?),
            cycle_lengths(self.optimized_attractors.as_ref()?),
        ))
    }
}

/// True when every `s` in `t` has the same output function in `m` as
/// `h(s)` in `m2`, after renaming the inputs of `m` through `g`.
pub fn check_theorem_hypotheses(
    m: &NetworkDef,
    m2: &NetworkDef,
    t: &[String],
    h: &BTreeMap<String, String>,
    g: &BTreeMap<String, String>,
) -> Result<bool> {
    let image =
        |map: &BTreeMap<String, String>, keys: &[String], what: &str| -> Result<Vec<String>> {
            let mut seen = std::collections::HashSet::new();
            keys.iter()
                .map(|k| {
                    let v = map.get(k).ok_or_else(|| {
                        Error::InvalidMapping(format!("{what} is undefined on `{k}`"))
                    })?;
                    if !seen.insert(v.clone()) {
                        return Err(Error::InvalidMapping(format!("{what} is not injective")));
                    }
                    Ok(v.clone())
                })
                .collect()
        };
    let ht = image(h, t, "h")?;
    image(g, m.inputs(), "g")?;
    let before = output_functions(m, t)?;
    let after = output_functions(m2, &ht)?;
    for (s, hs) in t.iter().zip(&ht) {
        let renamed = before[s].table.rename(|v| {
            let mut v = v.clone();
            if let crate::expr::VarRef::Delayed(label, _) = &mut v {
                *label = g[label.as_str()].clone();
            }
            v
        })?;
        let o = OutputFunction::from_table(renamed);
        if !o.equivalent(&after[hs]) {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn optimize(f: &NetworkDef, opts: OptimizeOptions) -> Result<PipelineReport> {
    let unfolded = unfold(f)?;
    let m = &unfolded.module;
    let cut = unfolded.cut.clone();
    let outputs = output_functions(m, &cut)?;
    let inst = SynthesisInstance::new(m.inputs().to_vec(), outputs.clone()).with_budget(m.len());
    let identity: BTreeMap<String, String> = cut.iter().map(|s| (s.clone(), s.clone())).collect();
    let synth = synthesize(&inst, m, &identity)?;

    // Cut nodes merged into another node come back as copies of it, so that
    // every cut node keeps its own name in the synthesized module.
    let mut entries = Vec::new();
    for id in f.nodes() {
        if let Some(e) = synth.module.local(id) {
            entries.push((id.clone(), e.clone()));
        } else if let Some(real) = synth.realization.get(id) {
            entries.push((
                id.clone(),
                synth.module.local(real).expect("realizing node").clone(),
            ));
        }
    }
    let synthesized = NetworkDef::new(m.name(), m.inputs().to_vec(), entries)?;

    let h = identity.clone();
    let g: BTreeMap<String, String> = m.inputs().iter().map(|i| (i.clone(), i.clone())).collect();
    if !check_theorem_hypotheses(m, &synthesized, &cut, &h, &g)? {
        return Err(Error::HypothesisFailed(
            "output functions of the cut set differ after synthesis".into(),
        ));
    }
    // omega' = h . omega . g^-1 with h and g identities on names.
    let omega_prime: Wiring = unfolded
        .wiring
        .iter()
        .map(|(a, s)| (g[a].clone(), h[s].clone()))
        .collect();
    let optimized =
        recursive_wiring(&synthesized, &omega_prime)?.with_name(format!("{}_opt", f.name()));

    let mut report = PipelineReport {
        original: f.clone(),
        optimized,
        module: m.clone(),
        synthesized,
        cut,
        fvs_optimal: unfolded.optimal,
        outputs,
        h,
        g,
        omega: unfolded.wiring.clone(),
        omega_prime,
        rewrites: synth.log,
        original_attractors: None,
        optimized_attractors: None,
        verified: None,
    };
    if report.after() <= opts.max_n {
        if opts.verify && report.before() <= opts.max_n {
            let (fa, ga) = rayon::join(
                || attractors(f, opts.max_n),
                || attractors(&report.optimized, opts.max_n),
            );
            let (fa, ga) = (fa?, ga?);
            report.verified = Some(match_attractors(
                f,
                &fa,
                &report.optimized,
                &ga,
                &report.cut,
                &report.h,
            )?);
            report.original_attractors = Some(fa);
            report.optimized_attractors = Some(ga);
        } else {
            report.optimized_attractors = Some(attractors(&report.optimized, opts.max_n)?);
        }
    }
    Ok(report)
}

/// Recomputes both attractor sets and checks that they are isomorphic on
/// the cut set.
pub fn verify(f: &NetworkDef, report: &PipelineReport, max_n: usize) -> Result<bool> {
    crate::dynamics::isomorphic_attractors(f, &report.optimized, &report.cut, &report.h, max_n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Expr;
    use crate::fixtures;
    use crate::network::semantically_equal;

    #[test]
    fn optimizes_f_a() {
        let f = fixtures::f_a();
        let r = optimize(&f, OptimizeOptions::default()).unwrap();
        assert_eq!(r.after(), 3);
        assert_eq!(r.reduction_exponent(), 1);
        assert_eq!(r.cut, ["d"]);
        assert_eq!(r.outputs["d"].to_string(), "!alpha_d@3 (delay 3)");
        let expected = fixtures::f_a_prime().with_name("F_A_opt");
        assert!(semantically_equal(&r.optimized, &expected).unwrap());
        assert_eq!(r.optimized.nodes(), expected.nodes());
        assert_eq!(r.verified, Some(true));
        let (a, b) = r.cycle_lengths().unwrap();
        assert_eq!(a, [2, 6]);
        assert_eq!(b, [2, 6]);
        assert!(verify(&f, &r, DEFAULT_MAX_N).unwrap());
    }

    #[test]
    fn optimizes_f_b() {
        let f = fixtures::f_b();
        let r = optimize(&f, OptimizeOptions::default()).unwrap();
        assert_eq!(r.before(), 10);
        assert_eq!(r.after(), 8);
        assert_eq!(r.reduction_exponent(), 2);
        assert!(semantically_equal(&r.optimized, &fixtures::f_b_prime()).unwrap());
        assert_eq!(r.verified, Some(true));
        let (a, b) = r.cycle_lengths().unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn acyclic_network_collapses() {
        let f = fixtures::closed("acyc", &[("a", "1"), ("b", "!a"), ("c", "a | b")]);
        let r = optimize(&f, OptimizeOptions::default()).unwrap();
        assert!(r.cut.is_empty());
        assert_eq!(r.after(), 0);
        assert_eq!(r.verified, Some(true));
        assert_eq!(r.cycle_lengths().unwrap(), (vec![1], vec![1]));
    }

    #[test]
    fn hypotheses_examples() {
        let m = fixtures::m_a();
        let m2 = fixtures::m_a_prime();
        let t = vec!["d".to_string()];
        let id: BTreeMap<_, _> = [("d".to_string(), "d".to_string())].into();
        let g: BTreeMap<_, _> = [("alpha".to_string(), "alpha".to_string())].into();
        assert!(check_theorem_hypotheses(&m, &m2, &t, &id, &g).unwrap());
        let broken = m2.with_local("d", Expr::node("b")).unwrap();
        assert!(!check_theorem_hypotheses(&m, &broken, &t, &id, &g).unwrap());

        let mb = fixtures::m_b();
        let xb: Vec<String> = ["St", "Sl", "Sk", "Pp", "C", "C*"]
            .map(String::from)
            .to_vec();
        let idb = xb.iter().map(|s| (s.clone(), s.clone())).collect();
        let gb = mb.inputs().iter().map(|s| (s.clone(), s.clone())).collect();
        assert!(check_theorem_hypotheses(&mb, &fixtures::m_b_prime(), &xb, &idb, &gb).unwrap());
    }

    #[test]
    fn constant_replacement_fails_verification() {
        let f = fixtures::f_a();
        let mut r = optimize(&f, OptimizeOptions::default()).unwrap();
        r.optimized = fixtures::closed("k", &[("a", "0"), ("b", "0"), ("d", "0")]);
        assert!(!verify(&f, &r, DEFAULT_MAX_N).unwrap());
    }

    #[test]
    fn merged_cut_nodes_are_aliased() {
        // u and v are both cut and end up with the same output function.
        let f = fixtures::closed("twin", &[("u", "!u & !v"), ("v", "!v & !u")]);
        let r = optimize(&f, OptimizeOptions::default()).unwrap();
        assert_eq!(r.cut, ["u", "v"]);
        assert_eq!(r.after(), 2);
        assert_eq!(r.verified, Some(true));
    }

    #[test]
    fn skips_dynamics_above_the_cap() {
        let f = fixtures::f_a();
        let opts = OptimizeOptions {
            max_n: 3,
            verify: true,
        };
        let r = optimize(&f, opts).unwrap();
        assert_eq!(r.verified, None);
        assert!(r.original_attractors.is_none());
        assert!(r.optimized_attractors.is_some());
    }

    #[test]
    fn rejects_promise_violations() {
        let bad = fixtures::closed("bad", &[("a", "b & !b"), ("b", "a")]);
        assert!(matches!(
            optimize(&bad, OptimizeOptions::default()),
            Err(Error::PromiseViolation(_))
        ));
    }
}
