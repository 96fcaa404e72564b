use std::collections::BTreeMap;

use ban_opt::dynamics::{attractors, cycle_lengths};
use ban_opt::fixtures;
use ban_opt::network::{recursive_wiring, semantically_equal};
use ban_opt::outputs::output_functions;
use ban_opt::pipeline::check_theorem_hypotheses;
use ban_opt::synthesis::{synthesize, SynthesisInstance};
use ban_opt::unfold::{unfold, verify_unfolding};
use ban_opt::NetworkFile;

fn ids(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

fn identity(xs: &[String]) -> BTreeMap<String, String> {
    xs.iter().map(|s| (s.clone(), s.clone())).collect()
}

#[test]
fn fixture_files_wire_back_to_their_networks() {
    for (module, closed) in [
        (fixtures::M_A, fixtures::f_a()),
        (fixtures::M_B, fixtures::f_b()),
    ] {
        let file = NetworkFile::parse(module).unwrap();
        let wired = recursive_wiring(&file.network, &file.wiring).unwrap();
        assert!(semantically_equal(&wired, &closed).unwrap());
    }
    let a = NetworkFile::parse(fixtures::M_A_PRIME).unwrap();
    let wired = recursive_wiring(&a.network, &a.wiring).unwrap();
    assert!(semantically_equal(&wired, &fixtures::f_a_prime()).unwrap());
}

#[test]
fn unfolding_f_a_matches_m_a_up_to_input_names() {
    let f = fixtures::f_a();
    let u = unfold(&f).unwrap();
    assert_eq!(u.cut, ["d"]);
    assert_eq!(u.module.inputs(), ["alpha_d"]);
    assert!(verify_unfolding(&f, &u).unwrap());
    let t = ids(&["d"]);
    let g: BTreeMap<_, _> = [("alpha_d".to_string(), "alpha".to_string())].into();
    assert!(check_theorem_hypotheses(&u.module, &fixtures::m_a(), &t, &identity(&t), &g).unwrap());
}

#[test]
fn unfolding_f_b_matches_m_b() {
    let f = fixtures::f_b();
    let u = unfold(&f).unwrap();
    assert_eq!(u.cut, ["St", "Sl", "Sk", "Pp", "C", "C*"]);
    assert!(semantically_equal(&u.module, &fixtures::m_b()).unwrap());
}

#[test]
fn greedy_synthesis_reproduces_the_small_modules() {
    for (m, small, t) in [
        (fixtures::m_a(), fixtures::m_a_prime(), ids(&["d"])),
        (
            fixtures::m_b(),
            fixtures::m_b_prime(),
            ids(&["St", "Sl", "Sk", "Pp", "C", "C*"]),
        ),
    ] {
        let outputs = output_functions(&m, &t).unwrap();
        let inst = SynthesisInstance::new(m.inputs().to_vec(), outputs).with_budget(small.len());
        let r = synthesize(&inst, &m, &identity(&t)).unwrap();
        assert!(r.within_budget);
        assert_eq!(r.module.len(), small.len());
        let g = identity(m.inputs());
        assert!(check_theorem_hypotheses(&m, &small, &t, &identity(&t), &g).unwrap());
    }
}

#[test]
fn small_networks_keep_the_cycle_lengths() {
    for (f, g) in [
        (fixtures::f_a(), fixtures::f_a_prime()),
        (fixtures::f_b(), fixtures::f_b_prime()),
    ] {
        let a = cycle_lengths(&attractors(&f, 24).unwrap());
        let b = cycle_lengths(&attractors(&g, 24).unwrap());
        assert_eq!(a, b);
    }
}
