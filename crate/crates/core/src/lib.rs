//! Naive probability on proposition graphs.
//!
//! Propositions carry grades on a seven-point likeliness scale
//! ([`scale::Likeliness`]). Implications between them form a directed
//! [`graph::ContextGraph`]; chains of implications are evaluated in the
//! (max, min) semiring ([`inference`]), evidence is spread along them and
//! conditioned by scenarios ([`update`]), and a small spreading-activation
//! layer learns new vertices and edges ([`activation`]).
//!
//! ```
//! use likelic::graph::parse_context;
//! use likelic::inference::derived_implication;
//!
//! let g = parse_context("edge rain -> wet : 5\nedge wet -> slip : 3\n").unwrap();
//! let (a, b) = (g.vertex("rain").unwrap(), g.vertex("slip").unwrap());
//! assert_eq!(derived_implication(&g, a, b).unwrap().value.grade(), 3);
//! ```

pub mod activation;
pub mod cli;
pub mod graph;
pub mod inference;
pub mod scale;
pub mod update;

pub use graph::{ContextGraph, Valuation, VertexId};
pub use scale::Likeliness;
