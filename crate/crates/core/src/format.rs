//! Line-oriented network file format.
//!
//! ```text
//! # comment
//! network F_A
//! input alpha            # zero or more
//! node a = alpha         # one or more, declaration order = bit order
//! node d = !b | !c
//! wire alpha -> d        # optional
//! ```

use std::fmt;

use crate::error::{Error, Result};
use crate::expr::{is_ident, parse_expr_with, VarRef};
use crate::network::{NetworkDef, Wiring};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NetworkFile {
    pub network: NetworkDef,
    /// Wires declared in the file; empty for a plain network.
    pub wiring: Wiring,
}

impl NetworkFile {
    pub fn new(network: NetworkDef) -> Self {
        NetworkFile {
            network,
            wiring: Wiring::new(),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        parse_network_file(text)
    }

    pub fn read(path: impl AsRef<std::path::Path>) -> Result<Self> {
        parse_network_file(&std::fs::read_to_string(path)?)
    }
}

enum Line<'a> {
    Node {
        name: &'a str,
        expr: &'a str,
        expr_col: usize,
    },
    Input(&'a str),
    Wire(&'a str, &'a str),
}

fn ident_at(s: &str, line: usize, col: usize, what: &str) -> Result<()> {
    if is_ident(s) {
        Ok(())
    } else {
        Err(Error::syntax(line, col, format!("invalid {what} `{s}`")))
    }
}

pub fn parse_network_file(text: &str) -> Result<NetworkFile> {
    let mut name: Option<String> = None;
    let mut lines = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let ln = ln + 1;
        let content = raw.split('#').next().unwrap_or("");
        let trimmed = content.trim_start();
        let indent = content.len() - trimmed.len();
        let trimmed = trimmed.trim_end();
        if trimmed.is_empty() {
            continue;
        }
        let (keyword, rest) = trimmed
            .split_once(char::is_whitespace)
            .unwrap_or((trimmed, ""));
        let rest_offset = indent + keyword.len() + (rest.len() - rest.trim_start().len()) + 1;
        let rest = rest.trim();
        let col = rest_offset + 1;
        match keyword {
            "network" => {
                if name.is_some() {
                    return Err(Error::syntax(ln, 1, "duplicate `network` line"));
                }
                ident_at(rest, ln, col, "network name")?;
                name = Some(rest.to_string());
            }
            "input" => {
                ident_at(rest, ln, col, "input label")?;
                lines.push((ln, Line::Input(rest)));
            }
            "node" => {
                let (lhs, rhs) = rest
                    .split_once('=')
                    .ok_or_else(|| Error::syntax(ln, col, "expected `node NAME = EXPR`"))?;
                let node = lhs.trim();
                ident_at(node, ln, col, "node name")?;
                let expr_col = col + lhs.len() + 1 + (rhs.len() - rhs.trim_start().len());
                lines.push((
                    ln,
                    Line::Node {
                        name: node,
                        expr: rhs.trim(),
                        expr_col,
                    },
                ));
            }
            "wire" => {
                let (lhs, rhs) = rest
                    .split_once("->")
                    .ok_or_else(|| Error::syntax(ln, col, "expected `wire INPUT -> NODE`"))?;
                let (input, node) = (lhs.trim(), rhs.trim());
                ident_at(input, ln, col, "input label")?;
                ident_at(node, ln, col, "node name")?;
                lines.push((ln, Line::Wire(input, node)));
            }
            other => {
                return Err(Error::syntax(
                    ln,
                    indent + 1,
                    format!("unknown keyword `{other}`"),
                ))
            }
        }
    }
    let name = name.ok_or_else(|| Error::syntax(1, 1, "missing `network NAME` line"))?;

    let mut nodes: Vec<&str> = Vec::new();
    let mut inputs: Vec<&str> = Vec::new();
    for (ln, line) in &lines {
        let (id, is_node) = match line {
            Line::Node { name, .. } => (*name, true),
            Line::Input(i) => (*i, false),
            Line::Wire(..) => continue,
        };
        if nodes.contains(&id) || inputs.contains(&id) {
            return Err(Error::syntax(*ln, 1, format!("`{id}` is declared twice")));
        }
        if is_node {
            nodes.push(id);
        } else {
            inputs.push(id);
        }
    }
    if nodes.is_empty() {
        return Err(Error::syntax(1, 1, "a network needs at least one node"));
    }

    let resolve = |s: &str| {
        if nodes.contains(&s) {
            Some(VarRef::node(s))
        } else if inputs.contains(&s) {
            Some(VarRef::input(s))
        } else {
            None
        }
    };
    let mut entries = Vec::new();
    let mut wiring = Wiring::new();
    for (ln, line) in &lines {
        match line {
            Line::Node {
                name,
                expr,
                expr_col,
            } => {
                let e = parse_expr_with(expr, &resolve).map_err(|e| match e {
                    Error::Syntax { col, msg, .. } => Error::syntax(*ln, expr_col + col - 1, msg),
                    Error::UnknownIdentifier { name, col } => Error::syntax(
                        *ln,
                        expr_col + col - 1,
                        format!("unknown identifier `{name}`"),
                    ),
                    other => other,
                })?;
                entries.push((name.to_string(), e));
            }
            Line::Wire(input, node) => {
                if !inputs.contains(input) {
                    return Err(Error::syntax(
                        *ln,
                        1,
                        format!("wire from undeclared input `{input}`"),
                    ));
                }
                if !nodes.contains(node) {
                    return Err(Error::syntax(
                        *ln,
                        1,
                        format!("wire to undeclared node `{node}`"),
                    ));
                }
                if wiring.insert(*input, *node).is_some() {
                    return Err(Error::syntax(
                        *ln,
                        1,
                        format!("input `{input}` wired twice"),
                    ));
                }
            }
            Line::Input(_) => {}
        }
    }
    let network = NetworkDef::new(
        name,
        inputs.iter().map(|s| s.to_string()).collect(),
        entries,
    )?;
    Ok(NetworkFile { network, wiring })
}

impl fmt::Display for NetworkFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let net = &self.network;
        writeln!(f, "network {}", net.name())?;
        for i in net.inputs() {
            writeln!(f, "input {i}")?;
        }
        for (id, e) in net.entries() {
            writeln!(f, "node {id} = {e}")?;
        }
        for (i, n) in self.wiring.iter() {
            writeln!(f, "wire {i} -> {n}")?;
        }
        Ok(())
    }
}

impl fmt::Display for NetworkDef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        NetworkFile::new(self.clone()).fmt(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Expr;

    #[test]
    fn parses_module_with_wire() {
        let text = "# demo\nnetwork M\ninput alpha\nnode a = alpha  # relay\nnode b = !a\nwire alpha -> b\n";
        let file = parse_network_file(text).unwrap();
        assert_eq!(file.network.nodes(), ["a", "b"]);
        assert_eq!(file.network.inputs(), ["alpha"]);
        assert_eq!(file.network.local("a"), Some(&Expr::input("alpha")));
        assert_eq!(file.wiring.get("alpha"), Some("b"));
        assert_eq!(parse_network_file(&file.to_string()).unwrap(), file);
    }

    #[test]
    fn forward_references_resolve() {
        let file = parse_network_file("network N\nnode a = b\nnode b = a").unwrap();
        assert_eq!(file.network.local("a"), Some(&Expr::node("b")));
    }

    #[test]
    fn reports_line_and_column() {
        match parse_network_file("network N\nnode a = a &\n") {
            Err(Error::Syntax { line, col, .. }) => {
                assert_eq!(line, 2);
                assert_eq!(col, 13);
            }
            other => panic!("unexpected {other:?}"),
        }
        match parse_network_file("network N\nnode a =  !zz\n") {
            Err(Error::Syntax { line, col, msg }) => {
                assert_eq!((line, col), (2, 12));
                assert!(msg.contains("zz"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_files() {
        for text in [
            "node a = 1",
            "network N\nnetwork M\nnode a = 1",
            "network N\nnode a = 1\nnode a = 0",
            "network N\ninput a\nnode a = 1",
            "network N\ninput x\nnode a = x\nwire x -> q",
            "network N\nnode a = 1\nwire q -> a",
            "network N\nfoo a",
            "network N",
            "network N\nnode 9a = 1",
            "network N\ninput x\nnode a = x\nwire x -> a\nwire x -> a",
        ] {
            assert!(parse_network_file(text).is_err(), "{text:?} should fail");
        }
    }
}
