//! The two worked networks and their intermediate modules, bundled for
//! tests, benchmarks and the C API smoke tests.

use crate::expr::parse_expr;
use crate::format::{parse_network_file, NetworkFile};
use crate::network::NetworkDef;

pub const F_A: &str = include_str!("../data/f_a.ban");
pub const M_A: &str = include_str!("../data/m_a.ban");
pub const M_A_PRIME: &str = include_str!("../data/m_a_prime.ban");
pub const F_A_PRIME: &str = include_str!("../data/f_a_prime.ban");
pub const F_B: &str = include_str!("../data/f_b.ban");
pub const M_B: &str = include_str!("../data/m_b.ban");
pub const M_B_PRIME: &str = include_str!("../data/m_b_prime.ban");
pub const F_B_PRIME: &str = include_str!("../data/f_b_prime.ban");

pub fn file(text: &str) -> NetworkFile {
    parse_network_file(text).expect("bundled fixture parses")
}

fn net(text: &str) -> NetworkDef {
    file(text).network
}

/// Four-node network with one feedback loop through `d`.
pub fn f_a() -> NetworkDef {
    net(F_A)
}

/// Unfolding of [`f_a`] with input `alpha` standing for `d`.
pub fn m_a() -> NetworkDef {
    net(M_A)
}

pub fn m_a_prime() -> NetworkDef {
    net(M_A_PRIME)
}

pub fn f_a_prime() -> NetworkDef {
    net(F_A_PRIME)
}

/// Ten-node fission yeast cell cycle network.
pub fn f_b() -> NetworkDef {
    net(F_B)
}

pub fn m_b() -> NetworkDef {
    net(M_B)
}

pub fn m_b_prime() -> NetworkDef {
    net(M_B_PRIME)
}

pub fn f_b_prime() -> NetworkDef {
    net(F_B_PRIME)
}

/// Builds a closed network from `(node, expression)` pairs.
pub fn closed(name: &str, nodes: &[(&str, &str)]) -> NetworkDef {
    module(name, &[], nodes)
}

/// Builds a module from input labels and `(node, expression)` pairs.
pub fn module(name: &str, inputs: &[&str], nodes: &[(&str, &str)]) -> NetworkDef {
    let ids: Vec<&str> = nodes.iter().map(|(n, _)| *n).collect();
    let entries = nodes
        .iter()
        .map(|(n, e)| {
            (
                n.to_string(),
                parse_expr(e, &ids, inputs).expect("fixture expression"),
            )
        })
        .collect();
    NetworkDef::new(
        name,
        inputs.iter().map(|s| s.to_string()).collect(),
        entries,
    )
    .expect("fixture network")
}
