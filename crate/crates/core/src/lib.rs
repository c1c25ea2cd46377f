//! Finding and counting bounded-treewidth patterns in host graphs.
//!
//! * [`graph`]: simple graphs on at most 64 vertices, vertex maps, parsing.
//! * [`decomp`]: exact tree/path decompositions, nice decompositions and
//!   balanced path splits of small patterns.
//! * [`circuit`]: the homomorphism polynomial as an explicit circuit or a
//!   label-streamed formula.
//! * [`detect`]: randomized multilinear-term detection over a group algebra,
//!   deciding subgraph existence.
//! * [`lattice`]: set functions, trimmed zeta transforms and disjoint sums.
//! * [`count`]: exact `hom`, `inj`, `sub` and `aut` counters.
//! * [`oracle`]: exhaustive reference counters.

pub mod circuit;
pub mod count;
pub mod decomp;
pub mod detect;
pub mod gen;
pub mod gf;
pub mod graph;
pub mod lattice;
pub mod oracle;
pub mod par;

use thiserror::Error;

pub use graph::{Graph, VertexMap, VertexSet};

/// Any failure of the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error(transparent)]
    Graph(#[from] graph::GraphError),
    #[error(transparent)]
    Decomposition(#[from] decomp::DecompError),
    #[error(transparent)]
    Circuit(#[from] circuit::CircuitError),
    #[error(transparent)]
    Lattice(#[from] lattice::LatticeError),
    #[error(transparent)]
    Detection(#[from] detect::DetectError),
    #[error(transparent)]
    Count(#[from] count::CountError),
    #[error(transparent)]
    Oracle(#[from] oracle::OracleError),
}
