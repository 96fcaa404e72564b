use thiserror::Error;

use crate::network::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at line {line}, column {col}: {msg}")]
    Syntax {
        line: usize,
        col: usize,
        msg: String,
    },

    #[error("unknown identifier `{name}` at column {col}")]
    UnknownIdentifier { name: String, col: usize },

    #[error("variable `{0}` is not assigned")]
    Unassigned(String),

    #[error("invalid delay shift: {0}")]
    InvalidShift(String),

    #[error("expression has {vars} variables, fan-in cap is {cap}")]
    FanInCap { vars: usize, cap: usize },

    #[error("invalid network: {0}")]
    Network(String),

    #[error("unknown node `{0}`")]
    UnknownNode(String),

    #[error("local functions carry inessential variables: {}", fmt_violations(.0))]
    PromiseViolation(Vec<Violation>),

    #[error("{n} nodes exceed the state-space cap of {cap}")]
    StateSpaceCap { n: usize, cap: usize },

    #[error("network has open inputs: {}", .0.join(", "))]
    OpenInputs(Vec<String>),

    #[error("module is not acyclic (cycle through `{0}`)")]
    CyclicModule(String),

    #[error("incomplete input sequence: {0}")]
    IncompleteInput(String),

    #[error("invalid mapping: {0}")]
    InvalidMapping(String),

    #[error("search bounds exceeded: {0}")]
    Bounds(String),

    #[error("seed module does not realize output `{0}`")]
    SeedMismatch(String),

    #[error("output-function hypotheses do not hold: {0}")]
    HypothesisFailed(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn fmt_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|v| format!("node {} ignores {}", v.node, v.variable))
        .collect::<Vec<_>>()
        .join("; ")
}

impl Error {
    pub(crate) fn syntax(line: usize, col: usize, msg: impl Into<String>) -> Self {
        Error::Syntax {
            line,
            col,
            msg: msg.into(),
        }
    }

    /// Process exit code used by the command-line tool and the C API.
    ///
    /// 1 is reserved for internal inconsistencies (a failed verification or
    /// hypothesis check).
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::HypothesisFailed(_) | Error::SeedMismatch(_) => 1,
            Error::Syntax { .. }
            | Error::UnknownIdentifier { .. }
            | Error::Network(_)
            | Error::UnknownNode(_)
            | Error::Io(_)
            | Error::Unassigned(_)
            | Error::InvalidShift(_)
            | Error::IncompleteInput(_)
            | Error::InvalidMapping(_) => 2,
            Error::PromiseViolation(_) => 3,
            Error::FanInCap { .. } | Error::StateSpaceCap { .. } | Error::Bounds(_) => 4,
            Error::OpenInputs(_) => 5,
            Error::CyclicModule(_) => 6,
        }
    }
}
