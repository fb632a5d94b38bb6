//! Total variation on hypergraphs.
//!
//! Cut functionals and the `Ω_{H,p}` regularizers ([`hypergraph`],
//! [`lovasz`]), the proximal maps behind the primal-dual solvers ([`prox`],
//! [`pdhg`]), balanced hypergraph cuts via RatioDCA ([`ratiodca`]),
//! semi-supervised learning ([`learning`]) and table ingestion
//! ([`ingest`]).

pub mod error;
pub mod fixtures;
pub mod hypergraph;
pub mod ingest;
pub mod learning;
pub mod lovasz;
mod parallel;
pub mod pdhg;
pub mod prox;
pub mod ratiodca;

pub use error::{Error, Result};
pub use hypergraph::{Hyperedge, Hypergraph, Partition, WeightedGraph};
pub use lovasz::{lovasz_extension, lovasz_subgradient, SetFunction};
pub use pdhg::{DataTerm, PdhgConfig, PdhgState, Power, SolveReport};
