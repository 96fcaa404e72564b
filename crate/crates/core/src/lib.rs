//! Shrinking Boolean automata networks while keeping their attractors.
//!
//! A closed network is unfolded along a minimum feedback vertex set into an
//! acyclic module, the output functions of the cut nodes are computed, a
//! smaller module realizing the same output functions is synthesized, and
//! its inputs are wired back. The result has isomorphic attractors.

pub mod dynamics;
pub mod error;
pub mod expr;
pub mod fixtures;
pub mod format;
pub mod network;
pub mod outputs;
pub mod pipeline;
pub mod report;
pub mod synthesis;
pub mod table;
pub mod unfold;

pub use error::{Error, Result};
pub use expr::{parse_delayed_expr, parse_expr, Expr, VarRef};
pub use format::{parse_network_file, NetworkFile};
pub use network::{NetworkDef, Wiring};
pub use outputs::OutputFunction;
pub use pipeline::{optimize, OptimizeOptions, PipelineReport};
pub use table::TruthTable;
