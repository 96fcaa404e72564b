//! Boolean expressions over node, input and delayed-input variables.
//!
//! Expressions are plain term trees with the gate alphabet `{&, |, !}` plus
//! constants. Everything semantic (essential variables, equivalence,
//! simplification) goes through [`crate::table::TruthTable`].

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::error::{Error, Result};

/// A variable occurring in a local or output function.
///
/// The derived ordering is the canonical variable order used by truth tables:
/// nodes before inputs before delayed inputs, then by label, then by delay.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VarRef {
    Node(String),
    Input(String),
    /// Value the input held `delay` updates before the observation instant.
    Delayed(String, u32),
}

impl VarRef {
    pub fn node(id: impl Into<String>) -> Self {
        VarRef::Node(id.into())
    }

    pub fn input(label: impl Into<String>) -> Self {
        VarRef::Input(label.into())
    }

    pub fn delayed(label: impl Into<String>, delay: u32) -> Self {
        VarRef::Delayed(label.into(), delay)
    }

    pub fn label(&self) -> &str {
        match self {
            VarRef::Node(s) | VarRef::Input(s) | VarRef::Delayed(s, _) => s,
        }
    }

    pub fn delay(&self) -> Option<u32> {
        match self {
            VarRef::Delayed(_, d) => Some(*d),
            _ => None,
        }
    }
}

impl fmt::Display for VarRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VarRef::Node(s) | VarRef::Input(s) => f.write_str(s),
            VarRef::Delayed(s, d) => write!(f, "{s}@{d}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    Const(bool),
    Var(VarRef),
    Not(Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn var(v: VarRef) -> Self {
        Expr::Var(v)
    }

    pub fn node(id: impl Into<String>) -> Self {
        Expr::Var(VarRef::node(id))
    }

    pub fn input(label: impl Into<String>) -> Self {
        Expr::Var(VarRef::input(label))
    }

    pub fn delayed(label: impl Into<String>, delay: u32) -> Self {
        Expr::Var(VarRef::delayed(label, delay))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(e: Expr) -> Self {
        Expr::Not(Box::new(e))
    }

    pub fn and(a: Expr, b: Expr) -> Self {
        Expr::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Expr, b: Expr) -> Self {
        Expr::Or(Box::new(a), Box::new(b))
    }

    /// Left-folded conjunction; the empty conjunction is `1`.
    pub fn and_all(items: impl IntoIterator<Item = Expr>) -> Self {
        items
            .into_iter()
            .reduce(Expr::and)
            .unwrap_or(Expr::Const(true))
    }

    /// Left-folded disjunction; the empty disjunction is `0`.
    pub fn or_all(items: impl IntoIterator<Item = Expr>) -> Self {
        items
            .into_iter()
            .reduce(Expr::or)
            .unwrap_or(Expr::Const(false))
    }

    pub fn eval(&self, assignment: &HashMap<VarRef, bool>) -> Result<bool> {
        self.eval_with(&mut |v| assignment.get(v).copied())
    }

    /// Evaluates with a lookup closure; `None` from the closure is an error.
    pub fn eval_with(&self, lookup: &mut impl FnMut(&VarRef) -> Option<bool>) -> Result<bool> {
        Ok(match self {
            Expr::Const(b) => *b,
            Expr::Var(v) => lookup(v).ok_or_else(|| Error::Unassigned(v.to_string()))?,
            Expr::Not(e) => !e.eval_with(lookup)?,
            Expr::And(a, b) => a.eval_with(lookup)? & b.eval_with(lookup)?,
            Expr::Or(a, b) => a.eval_with(lookup)? | b.eval_with(lookup)?,
        })
    }

    pub fn syntactic_vars(&self) -> BTreeSet<VarRef> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<VarRef>) {
        match self {
            Expr::Const(_) => {}
            Expr::Var(v) => {
                if !out.contains(v) {
                    out.insert(v.clone());
                }
            }
            Expr::Not(e) => e.collect_vars(out),
            Expr::And(a, b) | Expr::Or(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    /// Number of tree nodes (gates, variables and constants).
    pub fn size(&self) -> usize {
        match self {
            Expr::Const(_) | Expr::Var(_) => 1,
            Expr::Not(e) => 1 + e.size(),
            Expr::And(a, b) | Expr::Or(a, b) => 1 + a.size() + b.size(),
        }
    }

    /// Replaces every occurrence of a mapped variable by its image.
    pub fn substitute(&self, map: &HashMap<VarRef, Expr>) -> Expr {
        self.substitute_with(&mut |v| map.get(v).cloned())
    }

    pub fn substitute_with(&self, f: &mut impl FnMut(&VarRef) -> Option<Expr>) -> Expr {
        match self {
            Expr::Const(b) => Expr::Const(*b),
            Expr::Var(v) => f(v).unwrap_or_else(|| Expr::Var(v.clone())),
            Expr::Not(e) => Expr::not(e.substitute_with(f)),
            Expr::And(a, b) => Expr::and(a.substitute_with(f), b.substitute_with(f)),
            Expr::Or(a, b) => Expr::or(a.substitute_with(f), b.substitute_with(f)),
        }
    }

    /// Adds `delta` to every delay. Bare inputs are read as delay 0, so
    /// they need `delta >= 1`; node variables are rejected.
    pub fn shift_delays(&self, delta: u32) -> Result<Expr> {
        let mut failure = None;
        let out = self.substitute_with(&mut |v| match v {
            VarRef::Delayed(l, d) => Some(Expr::delayed(l.clone(), d + delta)),
            VarRef::Input(l) if delta >= 1 => Some(Expr::delayed(l.clone(), delta)),
            VarRef::Input(l) => {
                failure.get_or_insert_with(|| {
                    Error::InvalidShift(format!("bare input `{l}` shifted by 0"))
                });
                None
            }
            VarRef::Node(n) => {
                failure.get_or_insert_with(|| {
                    Error::InvalidShift(format!("node variable `{n}` in a delayed expression"))
                });
                None
            }
        });
        match failure {
            Some(e) => Err(e),
            None => Ok(out),
        }
    }

    pub fn rename_vars(&self, f: &mut impl FnMut(&VarRef) -> VarRef) -> Expr {
        self.substitute_with(&mut |v| Some(Expr::Var(f(v))))
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Or(..) => 0,
            Expr::And(..) => 1,
            Expr::Not(_) => 2,
            Expr::Const(_) | Expr::Var(_) => 3,
        }
    }
}

impl From<VarRef> for Expr {
    fn from(v: VarRef) -> Self {
        Expr::Var(v)
    }
}

struct Child<'a>(&'a Expr, bool);

impl fmt::Display for Child<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.1 {
            write!(f, "({})", self.0)
        } else {
            write!(f, "{}", self.0)
        }
    }
}

// Parenthesization mirrors the left-associative grammar, so printing then
// parsing returns the identical tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(b) => f.write_str(if *b { "1" } else { "0" }),
            Expr::Var(v) => write!(f, "{v}"),
            Expr::Not(e) => write!(f, "!{}", Child(e, e.precedence() < 2)),
            Expr::And(a, b) => write!(
                f,
                "{} & {}",
                Child(a, a.precedence() < 1),
                Child(b, b.precedence() <= 1)
            ),
            Expr::Or(a, b) => write!(f, "{} | {}", Child(a, false), Child(b, b.precedence() == 0)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Const(bool),
    Not,
    And,
    Or,
    LParen,
    RParen,
}

pub(crate) fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

pub(crate) fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '*'
}

pub(crate) fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if is_ident_start(c)) && chars.all(is_ident_char)
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>> {
    let mut out = Vec::new();
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        let col = pos + 1;
        match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '!' => out.push((col, Tok::Not)),
            '&' => out.push((col, Tok::And)),
            '|' => out.push((col, Tok::Or)),
            '(' => out.push((col, Tok::LParen)),
            ')' => out.push((col, Tok::RParen)),
            '0' | '1' => {
                if chars.get(i + 1).is_some_and(|&(_, n)| is_ident_char(n)) {
                    return Err(Error::syntax(
                        1,
                        col,
                        "constants are the single digits 0 and 1",
                    ));
                }
                out.push((col, Tok::Const(c == '1')));
            }
            c if is_ident_start(c) => {
                let start = i;
                while i < chars.len() && is_ident_char(chars[i].1) {
                    i += 1;
                }
                // `label@delay` names a delayed input.
                if chars.get(i).is_some_and(|&(_, c)| c == '@') {
                    i += 1;
                    let digits = i;
                    while i < chars.len() && chars[i].1.is_ascii_digit() {
                        i += 1;
                    }
                    if i == digits {
                        return Err(Error::syntax(
                            1,
                            chars[digits - 1].0 + 1,
                            "expected a delay after `@`",
                        ));
                    }
                }
                let ident: String = chars[start..i].iter().map(|&(_, c)| c).collect();
                out.push((col, Tok::Ident(ident)));
                continue;
            }
            other => {
                return Err(Error::syntax(
                    1,
                    col,
                    format!("unexpected character `{other}`"),
                ));
            }
        }
        i += 1;
    }
    Ok(out)
}

struct Parser<'a, F> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end_col: usize,
    resolve: &'a F,
}

impl<F> Parser<'_, F>
where
    F: Fn(&str) -> Option<VarRef>,
{
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end_col, |(c, _)| *c)
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        while self.peek() == Some(&Tok::Or) {
            self.pos += 1;
            lhs = Expr::or(lhs, self.term()?);
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        while self.peek() == Some(&Tok::And) {
            self.pos += 1;
            lhs = Expr::and(lhs, self.factor()?);
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Expr> {
        let col = self.col();
        let tok = self
            .toks
            .get(self.pos)
            .map(|(_, t)| t.clone())
            .ok_or_else(|| Error::syntax(1, col, "unexpected end of expression"))?;
        self.pos += 1;
        match tok {
            Tok::Not => Ok(Expr::not(self.factor()?)),
            Tok::LParen => {
                let e = self.expr()?;
                if self.peek() != Some(&Tok::RParen) {
                    return Err(Error::syntax(1, self.col(), "expected `)`"));
                }
                self.pos += 1;
                Ok(e)
            }
            Tok::Const(b) => Ok(Expr::Const(b)),
            Tok::Ident(name) => (self.resolve)(&name)
                .map(Expr::Var)
                .ok_or(Error::UnknownIdentifier { name, col }),
            Tok::And | Tok::Or | Tok::RParen => Err(Error::syntax(1, col, "expected an operand")),
        }
    }
}

/// Parses an expression, resolving identifiers against node ids first and
/// input labels second.
pub fn parse_expr<S: AsRef<str>>(text: &str, nodes: &[S], inputs: &[S]) -> Result<Expr> {
    let resolve = |name: &str| {
        if nodes.iter().any(|n| n.as_ref() == name) {
            Some(VarRef::node(name))
        } else if inputs.iter().any(|n| n.as_ref() == name) {
            Some(VarRef::input(name))
        } else {
            None
        }
    };
    parse_expr_with(text, &resolve)
}

/// Parses an expression over delayed inputs written `label@delay`.
pub fn parse_delayed_expr<S: AsRef<str>>(text: &str, inputs: &[S]) -> Result<Expr> {
    let resolve = |name: &str| {
        let (label, d) = name.split_once('@')?;
        let d = d.parse().ok()?;
        inputs
            .iter()
            .any(|i| i.as_ref() == label)
            .then(|| VarRef::delayed(label, d))
    };
    parse_expr_with(text, &resolve)
}

pub(crate) fn parse_expr_with<F>(text: &str, resolve: &F) -> Result<Expr>
where
    F: Fn(&str) -> Option<VarRef>,
{
    let toks = tokenize(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end_col: text.len() + 1,
        resolve,
    };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(Error::syntax(1, p.col(), "trailing input after expression"));
    }
    Ok(e)
}
